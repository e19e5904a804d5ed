//! Priors, parameter vectors, and the unconstrained-space transform.
//!
//! Inference runs on an unconstrained parameter space: positive rates are
//! represented by their logarithm and simplex blocks by stick-breaking
//! coordinates. The prior owns both representations and the Jacobians
//! linking their densities. Only the simulator boundary sees natural-scale
//! parameters.

use crate::error::CoreError;
use crate::Result;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

const LN_2PI: f64 = 1.8378770664093453;

/// Model parameters in natural space.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite("ParamVector".into()));
        }
        Ok(ParamVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// One block of the prior specification.
#[derive(Clone, Debug, PartialEq)]
pub enum PriorBlock {
    /// Unbounded coordinate, `theta ~ N(mean, sd^2)`.
    Normal { mean: f64, sd: f64 },
    /// Positive coordinate, `log theta ~ N(mu, sd^2)`.
    LogNormal { mu: f64, sd: f64 },
    /// Simplex of length `alpha.len()`, `p ~ Dirichlet(alpha)`.
    Dirichlet { alpha: Vec<f64> },
}

impl PriorBlock {
    fn natural_dim(&self) -> usize {
        match self {
            PriorBlock::Normal { .. } | PriorBlock::LogNormal { .. } => 1,
            PriorBlock::Dirichlet { alpha } => alpha.len(),
        }
    }

    fn unconstrained_dim(&self) -> usize {
        match self {
            PriorBlock::Normal { .. } | PriorBlock::LogNormal { .. } => 1,
            PriorBlock::Dirichlet { alpha } => alpha.len() - 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            PriorBlock::Normal { sd, .. } | PriorBlock::LogNormal { sd, .. } => {
                if !sd.is_finite() || *sd <= 0.0 {
                    return Err(CoreError::InvalidPrior(format!("scale must be positive, got {sd}")));
                }
            }
            PriorBlock::Dirichlet { alpha } => {
                if alpha.len() < 2 {
                    return Err(CoreError::InvalidPrior("Dirichlet needs at least 2 categories".into()));
                }
                if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
                    return Err(CoreError::InvalidPrior("Dirichlet concentrations must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

/// Joint prior over a parameter vector, block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    blocks: Vec<PriorBlock>,
    natural_dim: usize,
    unconstrained_dim: usize,
}

fn normal_logpdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * LN_2PI - sd.ln() - 0.5 * z * z
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Prior {
    pub fn new(blocks: Vec<PriorBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(CoreError::InvalidPrior("prior has no blocks".into()));
        }
        for b in &blocks {
            b.validate()?;
        }
        let natural_dim = blocks.iter().map(|b| b.natural_dim()).sum();
        let unconstrained_dim = blocks.iter().map(|b| b.unconstrained_dim()).sum();
        Ok(Prior { blocks, natural_dim, unconstrained_dim })
    }

    pub fn blocks(&self) -> &[PriorBlock] {
        &self.blocks
    }

    pub fn natural_dim(&self) -> usize {
        self.natural_dim
    }

    pub fn unconstrained_dim(&self) -> usize {
        self.unconstrained_dim
    }

    /// Draw `count` independent parameter vectors in natural space.
    pub fn sample(&self, rng: &mut impl Rng, count: usize) -> Vec<ParamVector> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    fn sample_one(&self, rng: &mut impl Rng) -> ParamVector {
        let mut values = Vec::with_capacity(self.natural_dim);
        for block in &self.blocks {
            match block {
                PriorBlock::Normal { mean, sd } => {
                    values.push(mean + sd * standard_normal(rng));
                }
                PriorBlock::LogNormal { mu, sd } => {
                    values.push((mu + sd * standard_normal(rng)).exp());
                }
                PriorBlock::Dirichlet { alpha } => {
                    let mut gs: Vec<f64> = alpha
                        .iter()
                        .map(|&a| Gamma::new(a, 1.0).expect("validated alpha").sample(rng))
                        .collect();
                    let total: f64 = gs.iter().sum();
                    for g in &mut gs {
                        *g /= total;
                    }
                    values.extend_from_slice(&gs);
                }
            }
        }
        ParamVector { values }
    }

    /// Draw in unconstrained space.
    pub fn sample_unconstrained(&self, rng: &mut impl Rng, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.to_unconstrained(&self.sample_one(rng)).expect("own sample")).collect()
    }

    /// Log prior density of a natural-space parameter vector. Returns
    /// `-inf` outside the support.
    pub fn logpdf(&self, theta: &ParamVector) -> Result<f64> {
        if theta.dim() != self.natural_dim {
            return Err(CoreError::DimensionMismatch { expected: self.natural_dim, got: theta.dim() });
        }
        let mut lp = 0.0;
        let mut off = 0;
        for block in &self.blocks {
            let d = block.natural_dim();
            let vals = &theta.values[off..off + d];
            off += d;
            match block {
                PriorBlock::Normal { mean, sd } => lp += normal_logpdf(vals[0], *mean, *sd),
                PriorBlock::LogNormal { mu, sd } => {
                    let t = vals[0];
                    if t <= 0.0 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    lp += normal_logpdf(t.ln(), *mu, *sd) - t.ln();
                }
                PriorBlock::Dirichlet { alpha } => {
                    let sum: f64 = vals.iter().sum();
                    if vals.iter().any(|&p| p <= 0.0) || (sum - 1.0).abs() > 1e-8 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    let a0: f64 = alpha.iter().sum();
                    lp += ln_gamma(a0);
                    for (&p, &a) in vals.iter().zip(alpha) {
                        lp += (a - 1.0) * p.ln() - ln_gamma(a);
                    }
                }
            }
        }
        Ok(lp)
    }

    /// Map natural parameters to the unconstrained training space.
    pub fn to_unconstrained(&self, theta: &ParamVector) -> Result<Vec<f64>> {
        if theta.dim() != self.natural_dim {
            return Err(CoreError::DimensionMismatch { expected: self.natural_dim, got: theta.dim() });
        }
        let mut u = Vec::with_capacity(self.unconstrained_dim);
        let mut off = 0;
        for block in &self.blocks {
            let d = block.natural_dim();
            let vals = &theta.values[off..off + d];
            off += d;
            match block {
                PriorBlock::Normal { .. } => u.push(vals[0]),
                PriorBlock::LogNormal { .. } => {
                    if vals[0] <= 0.0 {
                        return Err(CoreError::MechanismDomain(
                            "log-scale coordinate must be positive".into(),
                        ));
                    }
                    u.push(vals[0].ln());
                }
                PriorBlock::Dirichlet { alpha } => {
                    let j = alpha.len();
                    let mut rem = 1.0;
                    for k in 0..j - 1 {
                        let z = (vals[k] / rem).clamp(1e-15, 1.0 - 1e-15);
                        u.push((z / (1.0 - z)).ln() + ((j - 1 - k) as f64).ln());
                        rem -= vals[k];
                    }
                }
            }
        }
        Ok(u)
    }

    /// Map an unconstrained point back to natural space.
    pub fn from_unconstrained(&self, u: &[f64]) -> Result<ParamVector> {
        if u.len() != self.unconstrained_dim {
            return Err(CoreError::DimensionMismatch { expected: self.unconstrained_dim, got: u.len() });
        }
        let mut values = Vec::with_capacity(self.natural_dim);
        let mut off = 0;
        for block in &self.blocks {
            let d = block.unconstrained_dim();
            let us = &u[off..off + d];
            off += d;
            match block {
                PriorBlock::Normal { .. } => values.push(us[0]),
                PriorBlock::LogNormal { .. } => values.push(us[0].exp()),
                PriorBlock::Dirichlet { alpha } => {
                    let j = alpha.len();
                    let mut rem = 1.0;
                    for (k, &uk) in us.iter().enumerate() {
                        let z = sigmoid(uk - ((j - 1 - k) as f64).ln());
                        values.push(z * rem);
                        rem *= 1.0 - z;
                    }
                    values.push(rem);
                }
            }
        }
        ParamVector::new(values)
    }

    /// Log prior density in unconstrained space (includes transform
    /// Jacobians); finite everywhere.
    pub fn logpdf_unconstrained(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.unconstrained_dim {
            return Err(CoreError::DimensionMismatch { expected: self.unconstrained_dim, got: u.len() });
        }
        let theta = self.from_unconstrained(u)?;
        let base = self.logpdf(&theta)?;
        Ok(base + self.natural_per_unconstrained_logdet(u)?)
    }

    /// `log |det d theta / d u|` at an unconstrained point: the volume
    /// factor converting unconstrained-space densities to natural-space
    /// densities (`log q_nat = log q_u - logdet`).
    pub fn natural_per_unconstrained_logdet(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.unconstrained_dim {
            return Err(CoreError::DimensionMismatch { expected: self.unconstrained_dim, got: u.len() });
        }
        let mut logdet = 0.0;
        let mut off = 0;
        for block in &self.blocks {
            let d = block.unconstrained_dim();
            let us = &u[off..off + d];
            off += d;
            match block {
                PriorBlock::Normal { .. } => {}
                PriorBlock::LogNormal { .. } => logdet += us[0],
                PriorBlock::Dirichlet { alpha } => {
                    let j = alpha.len();
                    let mut rem: f64 = 1.0;
                    for (k, &uk) in us.iter().enumerate() {
                        let z = sigmoid(uk - ((j - 1 - k) as f64).ln());
                        logdet += z.ln() + (1.0 - z).ln() + rem.ln();
                        rem *= 1.0 - z;
                    }
                }
            }
        }
        Ok(logdet)
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    rand_distr::StandardNormal.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    fn ks_stat_against_cdf(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in samples.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs()).max(((i as f64 + 1.0) / n - f).abs());
        }
        d
    }

    fn normal_cdf(x: f64, mean: f64, sd: f64) -> f64 {
        0.5 * statrs::function::erf::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
    }

    #[test]
    fn log_scale_prior_mean_converges() {
        // beta prior on log scale: log beta ~ N(log 0.4, 0.5^2)
        let prior = Prior::new(vec![PriorBlock::LogNormal { mu: 0.4f64.ln(), sd: 0.5 }]).unwrap();
        let mut rng = RngStream::from_seed(11).rng();
        let n = 100_000;
        let draws = prior.sample(&mut rng, n);
        let logs: Vec<f64> = draws.iter().map(|p| p.values()[0].ln()).collect();
        let mean = logs.iter().sum::<f64>() / n as f64;
        let var = logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.4f64.ln()).abs() < 3.0 * se, "mean {mean}, target {}", 0.4f64.ln());
    }

    #[test]
    fn zero_scale_rejected_at_construction() {
        assert!(Prior::new(vec![PriorBlock::Normal { mean: 0.0, sd: 0.0 }]).is_err());
        assert!(Prior::new(vec![PriorBlock::LogNormal { mu: 0.0, sd: -1.0 }]).is_err());
        assert!(Prior::new(vec![PriorBlock::Dirichlet { alpha: vec![1.0, 0.0] }]).is_err());
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let prior = Prior::new(vec![
            PriorBlock::Normal { mean: 1.0, sd: 2.0 },
            PriorBlock::Dirichlet { alpha: vec![2.0, 2.0, 2.0] },
        ])
        .unwrap();
        let a = prior.sample(&mut RngStream::from_seed(5).rng(), 50);
        let b = prior.sample(&mut RngStream::from_seed(5).rng(), 50);
        assert_eq!(a, b);
    }

    #[test]
    fn standard_normal_logpdf_at_mode() {
        let prior = Prior::new(vec![
            PriorBlock::Normal { mean: 0.0, sd: 1.0 },
            PriorBlock::Normal { mean: 0.0, sd: 1.0 },
        ])
        .unwrap();
        let lp = prior.logpdf(&ParamVector::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(lp, -LN_2PI, epsilon = 1e-12);
    }

    #[test]
    fn log_scale_logpdf_matches_cdf_derivative() {
        // Numerically differentiate the natural-space CDF and compare with
        // exp(logpdf).
        let mu = 0.4f64.ln();
        let sd = 0.5;
        let prior = Prior::new(vec![PriorBlock::LogNormal { mu, sd }]).unwrap();
        let cdf = |t: f64| normal_cdf(t.ln(), mu, sd);
        for &t in &[0.1, 0.4, 0.9, 2.5] {
            let h = 1e-6 * t;
            let deriv = (cdf(t + h) - cdf(t - h)) / (2.0 * h);
            let lp = prior.logpdf(&ParamVector::new(vec![t]).unwrap()).unwrap();
            assert_abs_diff_eq!(lp.exp(), deriv, epsilon = 1e-6);
        }
    }

    #[test]
    fn outside_support_is_neg_infinity() {
        let prior = Prior::new(vec![PriorBlock::LogNormal { mu: 0.0, sd: 1.0 }]).unwrap();
        let lp = prior.logpdf(&ParamVector::new(vec![-0.5]).unwrap()).unwrap();
        assert_eq!(lp, f64::NEG_INFINITY);
        let lp0 = prior.logpdf(&ParamVector::new(vec![0.0]).unwrap()).unwrap();
        assert_eq!(lp0, f64::NEG_INFINITY);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let prior = Prior::new(vec![PriorBlock::Normal { mean: 0.0, sd: 1.0 }]).unwrap();
        assert!(prior.logpdf(&ParamVector::new(vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn logpdf_integrates_to_one_in_natural_space() {
        // Simpson quadrature over each 1-D family.
        let normal = Prior::new(vec![PriorBlock::Normal { mean: 0.3, sd: 0.7 }]).unwrap();
        let mass = simpson(-8.0, 8.0, 40_001, |x| {
            normal.logpdf(&ParamVector::new(vec![x]).unwrap()).unwrap().exp()
        });
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);

        let logn = Prior::new(vec![PriorBlock::LogNormal { mu: -0.9, sd: 0.5 }]).unwrap();
        let mass = simpson(1e-9, 40.0, 400_001, |x| {
            logn.logpdf(&ParamVector::new(vec![x]).unwrap()).unwrap().exp()
        });
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn unconstrained_logpdf_integrates_to_one() {
        // Dirichlet(2,2) has one stick coordinate; integrate over u.
        let prior = Prior::new(vec![PriorBlock::Dirichlet { alpha: vec![2.0, 2.0] }]).unwrap();
        let mass = simpson(-30.0, 30.0, 120_001, |u| prior.logpdf_unconstrained(&[u]).unwrap().exp());
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn transform_round_trip() {
        let prior = Prior::new(vec![
            PriorBlock::Normal { mean: -1.0, sd: 2.0 },
            PriorBlock::LogNormal { mu: 0.2, sd: 0.4 },
            PriorBlock::Dirichlet { alpha: vec![2.0, 1.5, 3.0] },
        ])
        .unwrap();
        let mut rng = RngStream::from_seed(77).rng();
        for theta in prior.sample(&mut rng, 200) {
            let u = prior.to_unconstrained(&theta).unwrap();
            let back = prior.from_unconstrained(&u).unwrap();
            for (a, b) in theta.values().iter().zip(back.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn sampling_matches_cdf_normal_and_log_scale() {
        // Prior/transform consistency: KS statistic < 0.02 at 1e5 draws.
        let n = 100_000;
        let prior = Prior::new(vec![PriorBlock::LogNormal { mu: 0.4f64.ln(), sd: 0.5 }]).unwrap();
        let mut rng = RngStream::from_seed(3).rng();
        let mut logs: Vec<f64> =
            prior.sample(&mut rng, n).iter().map(|p| p.values()[0].ln()).collect();
        let d = ks_stat_against_cdf(&mut logs, |x| normal_cdf(x, 0.4f64.ln(), 0.5));
        assert!(d < 0.02, "KS {d}");

        // Direct log-space sampling distribution equals natural-then-log.
        let normal = Prior::new(vec![PriorBlock::Normal { mean: 0.4f64.ln(), sd: 0.5 }]).unwrap();
        let mut rng2 = RngStream::from_seed(4).rng();
        let mut direct: Vec<f64> =
            normal.sample(&mut rng2, n).iter().map(|p| p.values()[0]).collect();
        let d2 = ks_stat_against_cdf(&mut direct, |x| normal_cdf(x, 0.4f64.ln(), 0.5));
        assert!(d2 < 0.02, "KS {d2}");
    }

    #[test]
    fn dirichlet_stick_marginals_are_beta() {
        // First stick fraction of Dirichlet(a) is Beta(a_0, a_1 + a_2).
        let prior = Prior::new(vec![PriorBlock::Dirichlet { alpha: vec![2.0, 2.0, 2.0] }]).unwrap();
        let mut rng = RngStream::from_seed(21).rng();
        let n = 50_000;
        let mut first: Vec<f64> = prior.sample(&mut rng, n).iter().map(|p| p.values()[0]).collect();
        let beta_cdf = |x: f64| {
            statrs::function::beta::beta_reg(2.0, 4.0, x.clamp(0.0, 1.0))
        };
        let d = ks_stat_against_cdf(&mut first, beta_cdf);
        assert!(d < 0.02, "KS {d}");
    }

    fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
        assert!(n % 2 == 1);
        let h = (b - a) / (n - 1) as f64;
        let mut s = f(a) + f(b);
        for i in 1..n - 1 {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }
}

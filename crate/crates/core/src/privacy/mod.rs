//! Differential-privacy mechanisms as deterministic maps from uniform
//! hypercube points to released outputs.
//!
//! Representing a mechanism as `tau: (u, s(x)) -> s_dp` with `u` uniform on
//! the hypercube is what lets the nested RQMC estimator drive the same
//! low-discrepancy points through every mechanism. Each mechanism also
//! exposes its conditional log-density, which the auditor enumerates on
//! small domains.

mod audit;

pub use audit::{dp_audit, AuditDomain, AuditReport};

use crate::error::CoreError;
use crate::Result;
use rand::Rng;

/// The released privatized statistic: the only data the analyst observes.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivatizedSummary {
    pub values: Vec<f64>,
    pub mechanism_id: String,
    pub epsilon: f64,
}

/// An L_p global sensitivity bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityBound {
    pub order: u8,
    pub value: f64,
}

/// A privacy mechanism: a deterministic map from `[0,1]^r x summary` to the
/// released output, plus its budget and conditional density.
#[derive(Clone, Debug, PartialEq)]
pub enum Mechanism {
    /// Per-coordinate Laplace inverse-CDF perturbation with scale
    /// `delta1 / epsilon`.
    Laplace { delta1: f64, epsilon: f64, dim: usize },
    /// Binomial release of an infection trajectory: coordinate `i` is
    /// `Binomial(n, (I(t_i)+m)/(K+2m))` drawn by inverse CDF. When
    /// `proportions` is set the release is `s_i / n`.
    SirBinomial { k_pop: u64, n_trials: u64, m_blur: u64, len: usize, proportions: bool },
    /// Gaussian perturbation via the normal quantile function. Not a DP
    /// mechanism; used for conjugate-oracle checks.
    GaussianNoise { sigma: f64, dim: usize },
    /// Releases the summary unchanged. Fails any audit; used as a negative
    /// control and for exact-release diagnostics.
    Identity { dim: usize },
    /// Finite-domain mechanism given by rows of conditional probabilities:
    /// `rows[x][s]` is `eta(s | x)` for integer-coded summaries.
    DiscreteRows { rows: Vec<Vec<f64>> },
}

impl Mechanism {
    pub fn id(&self) -> &'static str {
        match self {
            Mechanism::Laplace { .. } => "laplace",
            Mechanism::SirBinomial { .. } => "sir-binomial",
            Mechanism::GaussianNoise { .. } => "gaussian-noise",
            Mechanism::Identity { .. } => "identity",
            Mechanism::DiscreteRows { .. } => "discrete-rows",
        }
    }

    /// Dimension `r` of the uniform hypercube driving the mechanism.
    pub fn input_dim(&self) -> usize {
        match self {
            Mechanism::Laplace { dim, .. } => *dim,
            Mechanism::SirBinomial { len, .. } => *len,
            Mechanism::GaussianNoise { dim, .. } => *dim,
            Mechanism::Identity { dim } => *dim,
            Mechanism::DiscreteRows { .. } => 1,
        }
    }

    /// Dimension of the released output.
    pub fn output_dim(&self) -> usize {
        self.input_dim()
    }

    /// Privacy loss budget. Infinite for non-private mechanisms.
    pub fn epsilon(&self) -> f64 {
        match self {
            Mechanism::Laplace { epsilon, .. } => *epsilon,
            Mechanism::SirBinomial { n_trials, m_blur, len, .. } => {
                sir_epsilon(*n_trials, *m_blur, *len as u64)
            }
            Mechanism::GaussianNoise { .. } | Mechanism::Identity { .. } => f64::INFINITY,
            Mechanism::DiscreteRows { .. } => f64::INFINITY,
        }
    }

    /// Apply `tau(u, s)`. Every `u_i` must lie strictly inside `(0,1)`.
    pub fn apply(&self, u: &[f64], summary: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.input_dim() {
            return Err(CoreError::DimensionMismatch { expected: self.input_dim(), got: u.len() });
        }
        if u.iter().any(|&ui| !(ui > 0.0 && ui < 1.0)) {
            return Err(CoreError::MechanismDomain(
                "uniform variate on the hypercube boundary".into(),
            ));
        }
        match self {
            Mechanism::Laplace { delta1, epsilon, .. } => {
                check_dim(summary.len(), self.input_dim())?;
                let b = delta1 / epsilon;
                Ok(u.iter()
                    .zip(summary)
                    .map(|(&ui, &si)| si - b * laplace_std_quantile_neg(ui))
                    .collect())
            }
            Mechanism::SirBinomial { k_pop, n_trials, m_blur, len, proportions } => {
                check_dim(summary.len(), *len)?;
                let mut out = Vec::with_capacity(*len);
                for (&ui, &ii) in u.iter().zip(summary) {
                    let i_count = ii.round();
                    if !(0.0..=(*k_pop as f64)).contains(&i_count) {
                        return Err(CoreError::MechanismDomain(format!(
                            "infection count {ii} outside [0, {k_pop}]"
                        )));
                    }
                    let p = (i_count + *m_blur as f64) / ((*k_pop + 2 * m_blur) as f64);
                    let s = binomial_inverse_cdf(*n_trials, p, ui);
                    out.push(if *proportions { s as f64 / *n_trials as f64 } else { s as f64 });
                }
                Ok(out)
            }
            Mechanism::GaussianNoise { sigma, .. } => {
                check_dim(summary.len(), self.input_dim())?;
                Ok(u.iter()
                    .zip(summary)
                    .map(|(&ui, &si)| si + sigma * normal_quantile(ui))
                    .collect())
            }
            Mechanism::Identity { .. } => {
                check_dim(summary.len(), self.input_dim())?;
                Ok(summary.to_vec())
            }
            Mechanism::DiscreteRows { rows } => {
                check_dim(summary.len(), 1)?;
                let x = summary[0].round() as usize;
                let row = rows.get(x).ok_or_else(|| {
                    CoreError::MechanismDomain(format!("summary value {x} outside table"))
                })?;
                let mut acc = 0.0;
                let mut chosen = row.len() - 1;
                for (s, &p) in row.iter().enumerate() {
                    acc += p;
                    if u[0] <= acc {
                        chosen = s;
                        break;
                    }
                }
                Ok(vec![chosen as f64])
            }
        }
    }

    /// Draw one release using fresh uniforms from `rng`.
    pub fn sample(&self, summary: &[f64], rng: &mut impl Rng) -> Result<Vec<f64>> {
        let u: Vec<f64> = (0..self.input_dim()).map(|_| open_unit(rng)).collect();
        self.apply(&u, summary)
    }

    /// Apply and wrap with provenance.
    pub fn privatize(&self, u: &[f64], summary: &[f64]) -> Result<PrivatizedSummary> {
        Ok(PrivatizedSummary {
            values: self.apply(u, summary)?,
            mechanism_id: self.id().to_string(),
            epsilon: self.epsilon(),
        })
    }

    /// Conditional log-density (or log-pmf) `log eta(s_dp | summary)`.
    /// Returns `-inf` where the release is impossible.
    pub fn log_density(&self, summary: &[f64], s_dp: &[f64]) -> Result<f64> {
        match self {
            Mechanism::Laplace { delta1, epsilon, .. } => {
                check_dim(summary.len(), self.input_dim())?;
                check_dim(s_dp.len(), self.input_dim())?;
                let b = delta1 / epsilon;
                Ok(s_dp
                    .iter()
                    .zip(summary)
                    .map(|(&z, &s)| -(z - s).abs() / b - (2.0 * b).ln())
                    .sum())
            }
            Mechanism::SirBinomial { k_pop, n_trials, m_blur, len, proportions } => {
                check_dim(summary.len(), *len)?;
                check_dim(s_dp.len(), *len)?;
                let mut lp = 0.0;
                for (&z, &ii) in s_dp.iter().zip(summary) {
                    let count = if *proportions { z * *n_trials as f64 } else { z };
                    let k = count.round();
                    if (count - k).abs() > 1e-6 || !(0.0..=(*n_trials as f64)).contains(&k) {
                        return Ok(f64::NEG_INFINITY);
                    }
                    let p = (ii.round() + *m_blur as f64) / ((*k_pop + 2 * m_blur) as f64);
                    lp += binomial_log_pmf(*n_trials, p, k as u64);
                }
                Ok(lp)
            }
            Mechanism::GaussianNoise { sigma, .. } => {
                let mut lp = 0.0;
                for (&z, &s) in s_dp.iter().zip(summary) {
                    let d = (z - s) / sigma;
                    lp += -0.5 * d * d - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
                }
                Ok(lp)
            }
            Mechanism::Identity { .. } => {
                let same = s_dp.iter().zip(summary).all(|(a, b)| a == b);
                Ok(if same { 0.0 } else { f64::NEG_INFINITY })
            }
            Mechanism::DiscreteRows { rows } => {
                let x = summary[0].round() as usize;
                let s = s_dp[0].round() as usize;
                let p = rows
                    .get(x)
                    .and_then(|r| r.get(s))
                    .copied()
                    .ok_or_else(|| CoreError::MechanismDomain("index outside table".into()))?;
                Ok(p.ln())
            }
        }
    }
}

fn check_dim(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(CoreError::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Uniform draw strictly inside (0,1).
pub fn open_unit(rng: &mut impl Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// `sgn(u - 1/2) * log(1 - 2|u - 1/2|)`: the negated standard Laplace
/// quantile at `u`, so that `s - b * (this)` is Laplace(s, b).
fn laplace_std_quantile_neg(u: f64) -> f64 {
    let d = u - 0.5;
    d.signum() * (1.0 - 2.0 * d.abs()).ln()
}

fn normal_quantile(u: f64) -> f64 {
    use statrs::distribution::ContinuousCDF;
    statrs::distribution::Normal::new(0.0, 1.0).unwrap().inverse_cdf(u)
}

/// Binomial inverse CDF by ascending cumulative summation with compensated
/// addition; returns the smallest `k` with `F(k) >= u`.
pub fn binomial_inverse_cdf(n: u64, p: f64, u: f64) -> u64 {
    debug_assert!(u > 0.0 && u < 1.0);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let ratio = ln_p - ln_q;
    let mut log_pmf = n as f64 * ln_q; // log pmf(0)
    let mut sum = 0.0;
    let mut comp = 0.0; // Kahan compensation
    for k in 0..=n {
        let term = log_pmf.exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if sum >= u {
            return k;
        }
        if k < n {
            log_pmf += ((n - k) as f64).ln() - ((k + 1) as f64).ln() + ratio;
        }
    }
    n
}

pub fn binomial_log_pmf(n: u64, p: f64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    let kf = k as f64;
    ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
        + kf * p.ln()
        + (nf - kf) * (1.0 - p).ln()
}

/// Budget of the binomial trajectory release: `n * L / m`.
pub fn sir_epsilon(n: u64, m: u64, l: u64) -> f64 {
    n as f64 * l as f64 / m as f64
}

/// Refined L1 sensitivity of the clamped regression summary.
pub fn regression_sensitivity(p: usize, n: usize) -> SensitivityBound {
    let pf = p as f64;
    SensitivityBound { order: 1, value: (pf * pf + 3.0 * pf + 3.0) / n as f64 }
}

/// Laplace scale for the log-linear proportion release: `2K / (n epsilon)`.
pub fn loglinear_laplace_scale(k_features: usize, n: usize, epsilon: f64) -> f64 {
    2.0 * k_features as f64 / (n as f64 * epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn laplace_median_is_identity() {
        let mech = Mechanism::Laplace { delta1: 1.0, epsilon: 1.0, dim: 3 };
        let out = mech.apply(&[0.5, 0.5, 0.5], &[1.0, -2.0, 0.25]).unwrap();
        assert_eq!(out, vec![1.0, -2.0, 0.25]);
    }

    #[test]
    fn laplace_quantile_at_three_quarters() {
        // Laplace(0,1) quantile at 0.75 is log 2.
        let mech = Mechanism::Laplace { delta1: 1.0, epsilon: 1.0, dim: 1 };
        let out = mech.apply(&[0.75], &[0.0]).unwrap();
        assert_abs_diff_eq!(out[0], std::f64::consts::LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(out[0], 0.6931, epsilon = 5e-5);
    }

    #[test]
    fn laplace_boundary_rejected() {
        let mech = Mechanism::Laplace { delta1: 1.0, epsilon: 1.0, dim: 1 };
        assert!(mech.apply(&[0.0], &[0.0]).is_err());
        assert!(mech.apply(&[1.0], &[0.0]).is_err());
    }

    #[test]
    fn laplace_empirical_variance() {
        // Var of Laplace(s, b) is 2 b^2; check within 2% over 1e6 draws.
        let b = 0.7;
        let mech = Mechanism::Laplace { delta1: b, epsilon: 1.0, dim: 1 };
        let mut rng = RngStream::from_seed(100).rng();
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let z = mech.sample(&[0.0], &mut rng).unwrap()[0];
            sum += z;
            sumsq += z * z;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        let target = 2.0 * b * b;
        assert!((var - target).abs() / target < 0.02, "var {var} target {target}");
    }

    #[test]
    fn regression_sensitivity_values() {
        assert_abs_diff_eq!(regression_sensitivity(2, 100).value, 0.13, epsilon = 1e-15);
        assert_abs_diff_eq!(regression_sensitivity(1, 1).value, 7.0, epsilon = 1e-15);
    }

    #[test]
    fn sir_epsilon_values() {
        assert_abs_diff_eq!(sir_epsilon(1000, 1000, 10), 10.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sir_epsilon(1000, 10_000, 10), 1.0, epsilon = 1e-15);
        assert_eq!(sir_epsilon(1000, 1000, 0), 0.0);
    }

    #[test]
    fn loglinear_scale_values() {
        assert_abs_diff_eq!(loglinear_laplace_scale(2, 100, 10.0), 0.004, epsilon = 1e-15);
        assert!(loglinear_laplace_scale(2, 100, 1e12) < 1e-13);
    }

    #[test]
    fn binomial_perfect_privacy_limit() {
        // m -> infinity: success probability 1/2 regardless of I.
        let mech = Mechanism::SirBinomial {
            k_pop: 100,
            n_trials: 10_000,
            m_blur: 10_000_000_000,
            len: 1,
            proportions: false,
        };
        let s_lo = mech.apply(&[0.5], &[0.0]).unwrap()[0];
        let s_hi = mech.apply(&[0.5], &[100.0]).unwrap()[0];
        // Medians of Binomial(n, ~1/2) coincide.
        assert_eq!(s_lo, s_hi);
        assert_abs_diff_eq!(s_lo, 5000.0, epsilon = 1.0);
    }

    #[test]
    fn binomial_cdf_endpoints() {
        let mech = Mechanism::SirBinomial {
            k_pop: 100,
            n_trials: 20,
            m_blur: 20,
            len: 1,
            proportions: false,
        };
        assert_eq!(mech.apply(&[1e-300], &[30.0]).unwrap()[0], 0.0);
        assert_eq!(mech.apply(&[1.0 - 1e-16], &[30.0]).unwrap()[0], 20.0);
    }

    #[test]
    fn binomial_matches_exact_pmf() {
        // Chi-squared goodness of fit at (K=100, n=20, m=20, I=30) over 1e6
        // uniforms against Binomial(20, 50/140).
        let mech = Mechanism::SirBinomial {
            k_pop: 100,
            n_trials: 20,
            m_blur: 20,
            len: 1,
            proportions: false,
        };
        let mut rng = RngStream::from_seed(2024).rng();
        let reps = 1_000_000usize;
        let mut counts = [0u64; 21];
        for _ in 0..reps {
            let s = mech.sample(&[30.0], &mut rng).unwrap()[0] as usize;
            counts[s] += 1;
        }
        let p = 50.0 / 140.0;
        // Merge cells with expected count below 5.
        let mut chi2 = 0.0;
        let mut df: i64 = -1;
        let mut merged_obs = 0.0;
        let mut merged_exp = 0.0;
        for k in 0..=20u64 {
            let e = reps as f64 * binomial_log_pmf(20, p, k).exp();
            merged_obs += counts[k as usize] as f64;
            merged_exp += e;
            if merged_exp >= 5.0 {
                chi2 += (merged_obs - merged_exp).powi(2) / merged_exp;
                df += 1;
                merged_obs = 0.0;
                merged_exp = 0.0;
            }
        }
        if merged_exp > 0.0 {
            chi2 += (merged_obs - merged_exp).powi(2) / merged_exp;
            df += 1;
        }
        use statrs::distribution::ContinuousCDF;
        let dist = statrs::distribution::ChiSquared::new(df as f64).unwrap();
        let p_value = 1.0 - dist.cdf(chi2);
        assert!(p_value > 0.001, "chi2 {chi2} df {df} p {p_value}");
    }

    #[test]
    fn binomial_proportions_release() {
        let mech = Mechanism::SirBinomial {
            k_pop: 100,
            n_trials: 20,
            m_blur: 20,
            len: 1,
            proportions: true,
        };
        let out = mech.apply(&[0.4], &[30.0]).unwrap()[0];
        assert!(out >= 0.0 && out <= 1.0);
        assert_abs_diff_eq!(out * 20.0, (out * 20.0).round(), epsilon = 1e-12);
    }

    #[test]
    fn budget_composition_is_linear() {
        // epsilon scales linearly in L and n and inversely in m.
        let base = sir_epsilon(100, 50, 5);
        assert_abs_diff_eq!(sir_epsilon(200, 50, 5), 2.0 * base, epsilon = 1e-12);
        assert_abs_diff_eq!(sir_epsilon(100, 50, 10), 2.0 * base, epsilon = 1e-12);
        assert_abs_diff_eq!(sir_epsilon(100, 100, 5), 0.5 * base, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_noise_quantile_coupling() {
        let mech = Mechanism::GaussianNoise { sigma: 2.0, dim: 1 };
        let out = mech.apply(&[0.5], &[3.0]).unwrap()[0];
        assert_abs_diff_eq!(out, 3.0, epsilon = 1e-9);
        // 97.72% quantile of N(0,1) is ~2.0
        let hi = mech.apply(&[0.9772498680518208], &[0.0]).unwrap()[0];
        assert_abs_diff_eq!(hi, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn discrete_rows_inverse_cdf() {
        let mech = Mechanism::DiscreteRows { rows: vec![vec![0.7, 0.3], vec![0.2, 0.8]] };
        assert_eq!(mech.apply(&[0.69], &[0.0]).unwrap()[0], 0.0);
        assert_eq!(mech.apply(&[0.71], &[0.0]).unwrap()[0], 1.0);
        assert_eq!(mech.apply(&[0.19], &[1.0]).unwrap()[0], 0.0);
        assert_abs_diff_eq!(mech.log_density(&[1.0], &[1.0]).unwrap(), 0.8f64.ln(), epsilon = 1e-12);
    }
}

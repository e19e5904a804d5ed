//! Bayesian linear regression simulator and its clamped summary statistic.
//!
//! Predictors are drawn as `x_0i ~ N_p(m, Sigma)` and outcomes as
//! `y | x_0 ~ N_n(x beta, sigma^2 I)`. Before privatization, non-intercept
//! predictors and responses are clamped to `[-B, B]` and divided by `B`;
//! the intercept column stays 1 so its self-moment is exactly one and
//! carries no privacy budget.

use crate::error::CoreError;
use crate::prior::ParamVector;
use crate::Result;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Confidential regression data: design matrix with intercept plus outcomes.
#[derive(Clone, Debug)]
pub struct RegressionData {
    /// Row-major n x (p+1); first column identically 1.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub n: usize,
    pub p: usize,
}

impl RegressionData {
    pub fn new(x: Vec<f64>, y: Vec<f64>, n: usize, p: usize) -> Result<Self> {
        if x.len() != n * (p + 1) || y.len() != n {
            return Err(CoreError::DimensionMismatch { expected: n * (p + 1), got: x.len() });
        }
        if (0..n).any(|i| x[i * (p + 1)] != 1.0) {
            return Err(CoreError::MechanismDomain("first design column must be 1".into()));
        }
        Ok(RegressionData { x, y, n, p })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * (self.p + 1)..(i + 1) * (self.p + 1)]
    }
}

/// Moments of the clamped data in the declared order: `x~' y~ / n` (p+1
/// entries), `y~' y~ / n`, and the upper triangle of `x~' x~ / n` row by
/// row ((p+1)(p+2)/2 entries, led by the constant intercept moment).
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionSummary {
    pub xty: Vec<f64>,
    pub yty: f64,
    pub xtx_upper: Vec<f64>,
    pub p: usize,
}

impl RegressionSummary {
    /// Full vectorized form, dimension (p+1) + 1 + (p+1)(p+2)/2.
    pub fn full_vector(&self) -> Vec<f64> {
        let mut v = self.xty.clone();
        v.push(self.yty);
        v.extend_from_slice(&self.xtx_upper);
        v
    }

    /// The released form: the constant intercept-intercept moment carries
    /// no information and is dropped before noise is added.
    pub fn released(&self) -> Vec<f64> {
        let mut v = self.xty.clone();
        v.push(self.yty);
        v.extend_from_slice(&self.xtx_upper[1..]);
        v
    }

    /// Dimension of the released vector: (p+1) + 1 + (p+1)(p+2)/2 - 1.
    pub fn released_dim(p: usize) -> usize {
        (p + 1) + 1 + (p + 1) * (p + 2) / 2 - 1
    }
}

/// Draw a confidential dataset.
pub fn regression_simulate(
    beta: &ParamVector,
    sigma: f64,
    mean: &[f64],
    cov: &[f64],
    n: usize,
    rng: &mut impl Rng,
) -> Result<RegressionData> {
    let p = mean.len();
    if beta.dim() != p + 1 {
        return Err(CoreError::DimensionMismatch { expected: p + 1, got: beta.dim() });
    }
    if cov.len() != p * p {
        return Err(CoreError::DimensionMismatch { expected: p * p, got: cov.len() });
    }
    let chol = cholesky(cov, p)
        .ok_or_else(|| CoreError::MechanismDomain("covariance not positive definite".into()))?;
    let b = beta.values();
    let mut x = Vec::with_capacity(n * (p + 1));
    let mut y = Vec::with_capacity(n);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        x.push(1.0);
        let row_start = x.len();
        for i in 0..p {
            let mut v = mean[i];
            for (j, zj) in z.iter().enumerate().take(i + 1) {
                v += chol[i * p + j] * zj;
            }
            x.push(v);
        }
        let mut mu = b[0];
        for i in 0..p {
            mu += b[i + 1] * x[row_start + i];
        }
        let noise: f64 = StandardNormal.sample(rng);
        y.push(mu + sigma * noise);
    }
    RegressionData::new(x, y, n, p)
}

/// Clamp to `[-B, B]`, scale to `[-1, 1]`, and assemble the moment summary.
pub fn regression_summary(data: &RegressionData, clamp_bound: f64) -> Result<RegressionSummary> {
    if clamp_bound <= 0.0 {
        return Err(CoreError::MechanismDomain("clamp bound must be positive".into()));
    }
    let n = data.n;
    let p = data.p;
    let nf = n as f64;
    let clamp = |v: f64| v.clamp(-clamp_bound, clamp_bound) / clamp_bound;

    let mut xty = vec![0.0; p + 1];
    let mut yty = 0.0;
    let mut xtx = vec![0.0; (p + 1) * (p + 1)];
    let mut row = vec![0.0; p + 1];
    for i in 0..n {
        let raw = data.row(i);
        row[0] = 1.0;
        for j in 1..=p {
            row[j] = clamp(raw[j]);
        }
        let cy = clamp(data.y[i]);
        for j in 0..=p {
            xty[j] += row[j] * cy;
            for l in j..=p {
                xtx[j * (p + 1) + l] += row[j] * row[l];
            }
        }
        yty += cy * cy;
    }
    for v in xty.iter_mut() {
        *v /= nf;
    }
    yty /= nf;
    let mut xtx_upper = Vec::with_capacity((p + 1) * (p + 2) / 2);
    for j in 0..=p {
        for l in j..=p {
            xtx_upper.push(xtx[j * (p + 1) + l] / nf);
        }
    }
    Ok(RegressionSummary { xty, yty, xtx_upper, p })
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + j] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

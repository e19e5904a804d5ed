//! Confidential-data generators and the model interface the inference
//! drivers consume.
//!
//! A model owns its prior, its confidential simulator `f(x | theta)` reduced
//! to the summary `s(x)`, and the privacy mechanism that releases
//! `s_dp = tau(u, s(x))`.

pub mod loglinear;
pub mod regression;
pub mod sir;

pub use loglinear::{loglinear_simulate, CountTable, LogLinearParams};
pub use regression::{
    regression_simulate, regression_summary, RegressionData, RegressionSummary,
};
pub use sir::{sir_gillespie, sir_simulate_grid, LeapMode, SirEvent, SirParams, SirTrajectory};

use crate::error::CoreError;
use crate::prior::{ParamVector, Prior, PriorBlock};
use crate::privacy::Mechanism;
use crate::Result;
use rand_chacha::ChaCha20Rng;

/// A simulation model: prior + confidential summary simulator + mechanism.
pub trait Model: Send + Sync {
    fn name(&self) -> &str;
    fn prior(&self) -> &Prior;
    fn mechanism(&self) -> &Mechanism;
    fn summary_dim(&self) -> usize;
    fn param_names(&self) -> Vec<String>;
    /// Draw confidential data for `theta` and return its summary `s(x)`.
    fn simulate_summary(&self, theta: &ParamVector, rng: &mut ChaCha20Rng) -> Result<Vec<f64>>;
    /// Grid step of discrete release coordinates (drives dequantization
    /// when a flow models the release); `None` for continuous releases.
    fn discrete_release_step(&self) -> Option<f64> {
        None
    }
}

/// Stochastic SIR with the binomial trajectory release.
pub struct SirModel {
    pub k_pop: u64,
    pub t_max: f64,
    pub grid: Vec<f64>,
    pub leap: LeapMode,
    prior: Prior,
    mechanism: Mechanism,
}

impl SirModel {
    pub fn new(
        k_pop: u64,
        t_max: f64,
        grid: Vec<f64>,
        n_trials: u64,
        m_blur: u64,
        proportions: bool,
        prior: Prior,
        leap: LeapMode,
    ) -> Result<Self> {
        if prior.natural_dim() != 2 {
            return Err(CoreError::InvalidPrior("SIR prior must cover (beta, gamma)".into()));
        }
        let mechanism = Mechanism::SirBinomial {
            k_pop,
            n_trials,
            m_blur,
            len: grid.len(),
            proportions,
        };
        Ok(SirModel { k_pop, t_max, grid, leap, prior, mechanism })
    }

    /// Paper-style prior: log beta ~ N(log 0.4, 0.5), log gamma ~ N(log 0.125, 0.2).
    pub fn default_prior() -> Prior {
        Prior::new(vec![
            PriorBlock::LogNormal { mu: 0.4f64.ln(), sd: 0.5 },
            PriorBlock::LogNormal { mu: 0.125f64.ln(), sd: 0.2 },
        ])
        .expect("valid prior")
    }
}

impl Model for SirModel {
    fn name(&self) -> &str {
        "sir"
    }

    fn prior(&self) -> &Prior {
        &self.prior
    }

    fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    fn summary_dim(&self) -> usize {
        self.grid.len()
    }

    fn param_names(&self) -> Vec<String> {
        vec!["beta".into(), "gamma".into()]
    }

    fn simulate_summary(&self, theta: &ParamVector, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
        let params = SirParams::new(theta.values()[0], theta.values()[1])?;
        let counts = sir_simulate_grid(params, self.k_pop, self.t_max, &self.grid, self.leap, rng)?;
        Ok(counts.into_iter().map(|c| c as f64).collect())
    }

    fn discrete_release_step(&self) -> Option<f64> {
        match self.mechanism {
            Mechanism::SirBinomial { n_trials, proportions, .. } => {
                Some(if proportions { 1.0 / n_trials as f64 } else { 1.0 })
            }
            _ => None,
        }
    }
}

/// Linear regression with clamped private sufficient statistics.
pub struct RegressionModel {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub mean: Vec<f64>,
    pub cov: Vec<f64>,
    pub clamp_bound: f64,
    prior: Prior,
    mechanism: Mechanism,
}

impl RegressionModel {
    pub fn new(
        n: usize,
        sigma: f64,
        mean: Vec<f64>,
        cov: Vec<f64>,
        clamp_bound: f64,
        epsilon: f64,
        prior: Prior,
    ) -> Result<Self> {
        let p = mean.len();
        if prior.natural_dim() != p + 1 {
            return Err(CoreError::InvalidPrior(format!(
                "regression prior must cover {} coefficients",
                p + 1
            )));
        }
        let delta1 = crate::privacy::regression_sensitivity(p, n).value;
        let mechanism = Mechanism::Laplace {
            delta1,
            epsilon,
            dim: RegressionSummary::released_dim(p),
        };
        Ok(RegressionModel { n, p, sigma, mean, cov, clamp_bound, prior, mechanism })
    }

    /// Paper configuration: p=2, m=(0.9,-1.17), Sigma=I, sigma^2=2, n=100,
    /// beta ~ N(0,1) iid.
    pub fn paper_config(epsilon: f64) -> Result<Self> {
        let prior = Prior::new(vec![
            PriorBlock::Normal { mean: 0.0, sd: 1.0 },
            PriorBlock::Normal { mean: 0.0, sd: 1.0 },
            PriorBlock::Normal { mean: 0.0, sd: 1.0 },
        ])?;
        RegressionModel::new(
            100,
            2.0f64.sqrt(),
            vec![0.9, -1.17],
            vec![1.0, 0.0, 0.0, 1.0],
            10.0,
            epsilon,
            prior,
        )
    }
}

impl Model for RegressionModel {
    fn name(&self) -> &str {
        "regression"
    }

    fn prior(&self) -> &Prior {
        &self.prior
    }

    fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    fn summary_dim(&self) -> usize {
        RegressionSummary::released_dim(self.p)
    }

    fn param_names(&self) -> Vec<String> {
        (0..=self.p).map(|j| format!("beta{j}")).collect()
    }

    fn simulate_summary(&self, theta: &ParamVector, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
        let data = regression_simulate(theta, self.sigma, &self.mean, &self.cov, self.n, rng)?;
        Ok(regression_summary(&data, self.clamp_bound)?.released())
    }
}

/// Naive-Bayes log-linear model with Laplace noise on count proportions.
pub struct LogLinearModel {
    pub n: u64,
    pub classes: usize,
    pub features: usize,
    pub levels: usize,
    prior: Prior,
    mechanism: Mechanism,
}

impl LogLinearModel {
    pub fn new(
        n: u64,
        classes: usize,
        features: usize,
        levels: usize,
        alpha: f64,
        epsilon: f64,
    ) -> Result<Self> {
        let mut blocks = vec![PriorBlock::Dirichlet { alpha: vec![alpha; classes] }];
        for _ in 0..classes * features {
            blocks.push(PriorBlock::Dirichlet { alpha: vec![alpha; levels] });
        }
        let prior = Prior::new(blocks)?;
        let scale = crate::privacy::loglinear_laplace_scale(features, n as usize, epsilon);
        let mechanism = Mechanism::Laplace {
            delta1: scale * epsilon,
            epsilon,
            dim: classes * features * levels,
        };
        Ok(LogLinearModel { n, classes, features, levels, prior, mechanism })
    }

    fn params_from(&self, theta: &ParamVector) -> LogLinearParams {
        let vals = theta.values();
        let mut off = 0;
        let p_class = vals[off..off + self.classes].to_vec();
        off += self.classes;
        let mut p_feat = Vec::with_capacity(self.classes);
        for _ in 0..self.classes {
            let mut rows = Vec::with_capacity(self.features);
            for _ in 0..self.features {
                rows.push(vals[off..off + self.levels].to_vec());
                off += self.levels;
            }
            p_feat.push(rows);
        }
        LogLinearParams { p_class, p_feat }
    }
}

impl Model for LogLinearModel {
    fn name(&self) -> &str {
        "loglinear"
    }

    fn prior(&self) -> &Prior {
        &self.prior
    }

    fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    fn summary_dim(&self) -> usize {
        self.classes * self.features * self.levels
    }

    fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.classes).map(|i| format!("p{}", i + 1)).collect();
        for i in 0..self.classes {
            for k in 0..self.features {
                for j in 0..self.levels {
                    names.push(format!("p{}_{}_{}", i + 1, k + 1, j + 1));
                }
            }
        }
        names
    }

    fn simulate_summary(&self, theta: &ParamVector, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
        let params = self.params_from(theta);
        let table = loglinear_simulate(&params, self.n, rng)?;
        Ok(table.proportions())
    }
}

/// 1-D conjugate test model: `s(x) = theta + N(0, sigma_sim^2)` with a
/// Gaussian release, so the private-data posterior is available in closed
/// form.
pub struct GaussianToyModel {
    pub sigma_sim: f64,
    prior: Prior,
    mechanism: Mechanism,
}

impl GaussianToyModel {
    pub fn new(prior_mean: f64, prior_sd: f64, sigma_sim: f64, sigma_mech: f64) -> Result<Self> {
        let prior = Prior::new(vec![PriorBlock::Normal { mean: prior_mean, sd: prior_sd }])?;
        let mechanism = Mechanism::GaussianNoise { sigma: sigma_mech, dim: 1 };
        Ok(GaussianToyModel { sigma_sim, prior, mechanism })
    }

    /// Total observation noise: simulator plus mechanism.
    pub fn total_sd(&self) -> f64 {
        match self.mechanism {
            Mechanism::GaussianNoise { sigma, .. } => (self.sigma_sim.powi(2) + sigma * sigma).sqrt(),
            _ => unreachable!(),
        }
    }

    /// Closed-form posterior (mean, sd) given the released value.
    pub fn analytic_posterior(&self, s_dp: f64) -> (f64, f64) {
        let (m0, s0) = match self.prior.blocks() {
            [PriorBlock::Normal { mean, sd }] => (*mean, *sd),
            _ => unreachable!(),
        };
        let tot = self.total_sd();
        let prec = 1.0 / (s0 * s0) + 1.0 / (tot * tot);
        let mean = (m0 / (s0 * s0) + s_dp / (tot * tot)) / prec;
        (mean, (1.0 / prec).sqrt())
    }
}

impl Model for GaussianToyModel {
    fn name(&self) -> &str {
        "gaussian-toy"
    }

    fn prior(&self) -> &Prior {
        &self.prior
    }

    fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    fn summary_dim(&self) -> usize {
        1
    }

    fn param_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn simulate_summary(&self, theta: &ParamVector, rng: &mut ChaCha20Rng) -> Result<Vec<f64>> {
        use rand_distr::Distribution;
        let z: f64 = rand_distr::StandardNormal.sample(rng);
        Ok(vec![theta.values()[0] + self.sigma_sim * z])
    }
}

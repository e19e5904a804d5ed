//! Low-discrepancy point sets and the nested inner-integral estimator.
//!
//! Both training losses contain an inner integral of the form
//! `I(theta, x) = integral eta(s_dp | x) g(s_dp, theta) d s_dp`. Because a
//! mechanism is a deterministic map `tau(u, s(x))` of a uniform hypercube
//! point, the integral becomes `integral_{[0,1]^r} g(tau(u, s(x)), theta) du`
//! and one point set drives the estimate for every mechanism. Scrambled
//! digital nets replace pseudo-random uniforms to cut the estimator RMSE
//! from O(M^-1/2) toward O(M^-1) on smooth integrands.

mod sobol;
mod sobol_table;

pub use sobol::{max_dimension, sobol_raw_u32, sobol_scrambled};

use crate::error::CoreError;
use crate::privacy::Mechanism;
use crate::rng::RngStream;
use crate::Result;

/// Which generator produced a point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    ScrambledNet,
    PseudoRandom,
}

impl GeneratorKind {
    pub fn label(&self) -> &'static str {
        match self {
            GeneratorKind::ScrambledNet => "rqmc",
            GeneratorKind::PseudoRandom => "mc",
        }
    }
}

/// M points in the open hypercube (0,1)^r. Fixed (generator, seed, M, r)
/// always reproduces the identical set.
#[derive(Clone, Debug)]
pub struct PointSet {
    m: usize,
    r: usize,
    kind: GeneratorKind,
    seed: u64,
    points: Vec<f64>, // row-major, m x r
}

impl PointSet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.r..(j + 1) * self.r]
    }
}

/// Scrambled digital net in base 2.
pub fn lds_points(m: usize, r: usize, seed: u64) -> Result<PointSet> {
    if r == 0 || m == 0 {
        return Err(CoreError::EstimatorFailure("point set needs m >= 1 and r >= 1".into()));
    }
    if r > sobol::max_dimension() {
        return Err(CoreError::EstimatorFailure(format!(
            "dimension {r} exceeds the generator's table ({} dims)",
            sobol::max_dimension()
        )));
    }
    let mut points = Vec::with_capacity(m * r);
    for i in 0..m {
        for d in 0..r {
            points.push(sobol_scrambled(i as u32, d, seed));
        }
    }
    Ok(PointSet { m, r, kind: GeneratorKind::ScrambledNet, seed, points })
}

/// Pseudo-random uniforms with the same interface (the MC baseline).
pub fn pseudo_points(m: usize, r: usize, seed: u64) -> Result<PointSet> {
    if r == 0 || m == 0 {
        return Err(CoreError::EstimatorFailure("point set needs m >= 1 and r >= 1".into()));
    }
    let mut rng = RngStream::from_seed(seed).rng();
    let points = (0..m * r).map(|_| crate::privacy::open_unit(&mut rng)).collect();
    Ok(PointSet { m, r, kind: GeneratorKind::PseudoRandom, seed, points })
}

/// `(1/M) sum_j g(tau(v_j, s(x)), theta)`: the nested estimate of the inner
/// integral for one `(theta, x)` pair.
pub fn nested_estimate(
    g: &mut dyn FnMut(&[f64], &[f64]) -> f64,
    theta: &[f64],
    x_summary: &[f64],
    mechanism: &Mechanism,
    points: &PointSet,
) -> Result<f64> {
    if points.r() != mechanism.input_dim() {
        return Err(CoreError::DimensionMismatch {
            expected: mechanism.input_dim(),
            got: points.r(),
        });
    }
    let mut acc = 0.0;
    for j in 0..points.m() {
        let s_dp = mechanism.apply(points.point(j), x_summary)?;
        let val = g(&s_dp, theta);
        if !val.is_finite() {
            return Err(CoreError::EstimatorFailure(format!(
                "integrand returned {val} at inner point {j} (s_dp = {s_dp:?})"
            )));
        }
        acc += val;
    }
    Ok(acc / points.m() as f64)
}

/// One row of the convergence probe output.
#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub generator: &'static str,
    pub m: usize,
    pub rmse: f64,
}

/// RMSE-vs-M table with fitted log-log slopes for both generators.
#[derive(Clone, Debug)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    pub mc_slope: f64,
    pub rqmc_slope: f64,
    pub reference: f64,
}

/// Estimate the RMSE of the nested estimator against a quadrature reference
/// over a grid of M values for both generators. Only 1-D mechanisms are
/// supported (the reference is a dense 1-D quadrature).
pub fn convergence_probe(
    g: &mut dyn FnMut(&[f64], &[f64]) -> f64,
    theta: &[f64],
    x_summary: &[f64],
    mechanism: &Mechanism,
    m_grid: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<ProbeTable> {
    if mechanism.input_dim() != 1 {
        return Err(CoreError::EstimatorFailure(
            "convergence probe supports 1-D mechanisms only".into(),
        ));
    }
    if m_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CoreError::EstimatorFailure("M grid must be ascending".into()));
    }
    let reference = quadrature_reference(g, theta, x_summary, mechanism)?;

    let root = RngStream::from_seed(seed);
    let mut rows = Vec::new();
    for kind in [GeneratorKind::PseudoRandom, GeneratorKind::ScrambledNet] {
        for (mi, &m) in m_grid.iter().enumerate() {
            let mut sq_err = 0.0;
            for rep in 0..replicates {
                let sub = root.substream(match kind {
                    GeneratorKind::PseudoRandom => 0,
                    GeneratorKind::ScrambledNet => 1,
                });
                let pt_seed = sub.substream(mi as u64).substream(rep as u64).rng().next_u64();
                let points = match kind {
                    GeneratorKind::PseudoRandom => pseudo_points(m, 1, pt_seed)?,
                    GeneratorKind::ScrambledNet => lds_points(m, 1, pt_seed)?,
                };
                let est = nested_estimate(g, theta, x_summary, mechanism, &points)?;
                sq_err += (est - reference).powi(2);
            }
            rows.push(ProbeRow {
                generator: kind.label(),
                m,
                rmse: (sq_err / replicates as f64).sqrt(),
            });
        }
    }
    let slope = |label: &str| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.generator == label && r.rmse > 0.0)
            .map(|r| ((r.m as f64).ln(), r.rmse.ln()))
            .collect();
        ols_slope(&pts)
    };
    Ok(ProbeTable { mc_slope: slope("mc"), rqmc_slope: slope("rqmc"), rows, reference })
}

use rand_chacha::rand_core::RngCore;

fn quadrature_reference(
    g: &mut dyn FnMut(&[f64], &[f64]) -> f64,
    theta: &[f64],
    x_summary: &[f64],
    mechanism: &Mechanism,
) -> Result<f64> {
    // Composite midpoint rule: every node is strictly inside (0,1), and a
    // constant integrand reproduces itself exactly.
    let n = 1 << 21;
    let h = 1.0 / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let u = (i as f64 + 0.5) * h;
        let s_dp = mechanism.apply(&[u], x_summary)?;
        let val = g(&s_dp, theta);
        if !val.is_finite() {
            return Err(CoreError::EstimatorFailure(format!("integrand not finite at u={u}")));
        }
        acc += val;
    }
    Ok(acc * h)
}

fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

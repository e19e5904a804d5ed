//! Naive-Bayes log-linear model for categorical data.
//!
//! Class counts are multinomial over the class probabilities and, within
//! each class, per-feature counts are multinomial over the conditional
//! feature probabilities. The confidential summary is the table of count
//! proportions `r^k_{i,j} = n^k_{i,j} / n` flattened class-major.

use crate::error::CoreError;
use crate::Result;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

/// Parameters: class probabilities and per-class, per-feature conditionals.
#[derive(Clone, Debug)]
pub struct LogLinearParams {
    /// `p_class[i] = P(y = i)`, length I.
    pub p_class: Vec<f64>,
    /// `p_feat[i][k][j] = P(x_k = j | y = i)`.
    pub p_feat: Vec<Vec<Vec<f64>>>,
}

impl LogLinearParams {
    pub fn validate(&self) -> Result<()> {
        check_simplex(&self.p_class)?;
        for per_class in &self.p_feat {
            for probs in per_class {
                check_simplex(probs)?;
            }
        }
        if self.p_feat.len() != self.p_class.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.p_class.len(),
                got: self.p_feat.len(),
            });
        }
        Ok(())
    }
}

fn check_simplex(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| v < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-8 {
        return Err(CoreError::MechanismDomain(format!("probability vector off the simplex: {p:?}")));
    }
    Ok(())
}

/// Simulated contingency counts and proportions.
#[derive(Clone, Debug)]
pub struct CountTable {
    pub n: u64,
    /// Class counts, length I.
    pub class_counts: Vec<u64>,
    /// `feat_counts[i][k][j]`.
    pub feat_counts: Vec<Vec<Vec<u64>>>,
}

impl CountTable {
    /// Proportions `r^k_{i,j}` flattened as `for i { for k { for j } }`.
    pub fn proportions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for per_class in &self.feat_counts {
            for counts in per_class {
                for &c in counts {
                    out.push(c as f64 / self.n as f64);
                }
            }
        }
        out
    }

    fn check_invariants(&self) {
        let total: u64 = self.class_counts.iter().sum();
        assert_eq!(total, self.n, "class counts must sum to n");
        for (i, per_class) in self.feat_counts.iter().enumerate() {
            for counts in per_class {
                let s: u64 = counts.iter().sum();
                assert_eq!(s, self.class_counts[i], "feature counts must sum to the class count");
            }
        }
    }
}

fn multinomial(n: u64, probs: &[f64], rng: &mut impl Rng) -> Vec<u64> {
    // Sequential conditional binomials.
    let mut out = Vec::with_capacity(probs.len());
    let mut remaining = n;
    let mut rest = 1.0;
    for (idx, &p) in probs.iter().enumerate() {
        if idx + 1 == probs.len() {
            out.push(remaining);
            break;
        }
        let cond = (p / rest).clamp(0.0, 1.0);
        let draw = if remaining == 0 || cond <= 0.0 {
            0
        } else if cond >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, cond).expect("valid binomial").sample(rng)
        };
        out.push(draw);
        remaining -= draw;
        rest -= p;
    }
    out
}

/// Simulate class and feature counts for `n` individuals.
pub fn loglinear_simulate(
    params: &LogLinearParams,
    n: u64,
    rng: &mut impl Rng,
) -> Result<CountTable> {
    if n == 0 {
        return Err(CoreError::MechanismDomain("need at least one observation".into()));
    }
    params.validate()?;
    let class_counts = multinomial(n, &params.p_class, rng);
    let mut feat_counts = Vec::with_capacity(params.p_class.len());
    for (i, per_class) in params.p_feat.iter().enumerate() {
        let mut rows = Vec::with_capacity(per_class.len());
        for probs in per_class {
            rows.push(multinomial(class_counts[i], probs, rng));
        }
        feat_counts.push(rows);
    }
    let table = CountTable { n, class_counts, feat_counts };
    table.check_invariants();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    fn paper_params() -> LogLinearParams {
        LogLinearParams {
            p_class: vec![0.8489, 0.1511],
            p_feat: vec![
                vec![vec![0.3887, 0.6113], vec![0.7537, 0.2463]],
                vec![vec![0.6534, 0.3466], vec![0.5834, 0.4166]],
            ],
        }
    }

    #[test]
    fn single_class_gets_all_counts() {
        let params = LogLinearParams { p_class: vec![1.0], p_feat: vec![vec![vec![0.5, 0.5]]] };
        let mut rng = RngStream::from_seed(1).rng();
        for _ in 0..20 {
            let t = loglinear_simulate(&params, 100, &mut rng).unwrap();
            assert_eq!(t.class_counts, vec![100]);
        }
    }

    #[test]
    fn class_frequency_matches_ground_truth() {
        let params = paper_params();
        let mut rng = RngStream::from_seed(2).rng();
        let reps = 10_000;
        let n = 100;
        let mut sum = 0.0;
        for _ in 0..reps {
            let t = loglinear_simulate(&params, n, &mut rng).unwrap();
            sum += t.class_counts[0] as f64 / n as f64;
        }
        let mean = sum / reps as f64;
        let p = 0.8489;
        let se = (p * (1.0 - p) / (n as f64 * reps as f64)).sqrt();
        assert!((mean - p).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn expected_proportions_by_exhaustive_enumeration() {
        // At n=3, enumerate all joint assignments of individuals to
        // (class, feature values) and accumulate E[r]; it must equal
        // p_i * p^k_{i,j}.
        let params = LogLinearParams {
            p_class: vec![0.3, 0.7],
            p_feat: vec![
                vec![vec![0.2, 0.8], vec![0.6, 0.4]],
                vec![vec![0.5, 0.5], vec![0.1, 0.9]],
            ],
        };
        let n = 3usize;
        // Per-individual outcomes: (class, x1, x2) with product probability.
        let mut outcomes = Vec::new();
        for i in 0..2usize {
            for j1 in 0..2usize {
                for j2 in 0..2usize {
                    let p = params.p_class[i] * params.p_feat[i][0][j1] * params.p_feat[i][1][j2];
                    outcomes.push((i, j1, j2, p));
                }
            }
        }
        let mut expected_r = vec![0.0; 8]; // [i][k][j] flattened
        let idx = |i: usize, k: usize, j: usize| i * 4 + k * 2 + j;
        // Enumerate assignments of 3 individuals.
        for a in &outcomes {
            for b in &outcomes {
                for c in &outcomes {
                    let prob = a.3 * b.3 * c.3;
                    for ind in [a, b, c] {
                        expected_r[idx(ind.0, 0, ind.1)] += prob / n as f64;
                        expected_r[idx(ind.0, 1, ind.2)] += prob / n as f64;
                    }
                }
            }
        }
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    let analytic = params.p_class[i] * params.p_feat[i][k][j];
                    assert_abs_diff_eq!(expected_r[idx(i, k, j)], analytic, epsilon = 1e-12);
                }
            }
        }
        // And the simulator's Monte Carlo mean agrees with the enumeration.
        let mut rng = RngStream::from_seed(3).rng();
        let reps = 40_000;
        let mut mc = vec![0.0; 8];
        for _ in 0..reps {
            let t = loglinear_simulate(&params, n as u64, &mut rng).unwrap();
            for (slot, r) in mc.iter_mut().zip(t.proportions()) {
                *slot += r / reps as f64;
            }
        }
        for (got, expect) in mc.iter().zip(&expected_r) {
            assert!((got - expect).abs() < 0.01, "mc {got} enum {expect}");
        }
    }

    #[test]
    fn off_simplex_rejected() {
        let params = LogLinearParams { p_class: vec![0.5, 0.6], p_feat: vec![vec![], vec![]] };
        let mut rng = RngStream::from_seed(4).rng();
        assert!(loglinear_simulate(&params, 10, &mut rng).is_err());
    }

    #[test]
    fn proportions_order_is_class_major() {
        let params = paper_params();
        let mut rng = RngStream::from_seed(5).rng();
        let t = loglinear_simulate(&params, 100, &mut rng).unwrap();
        let r = t.proportions();
        assert_eq!(r.len(), 8);
        // First four entries belong to class 1 and sum to n_1/n per feature.
        let n1 = t.class_counts[0] as f64 / 100.0;
        assert_abs_diff_eq!(r[0] + r[1], n1, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2] + r[3], n1, epsilon = 1e-12);
    }
}

//! Exhaustive DP auditor for small, enumerable domains.
//!
//! The auditor enumerates neighboring confidential summaries and all
//! releases, and reports the largest observed log density ratio
//! `log [eta(s_dp | x) / eta(s_dp | x')]`. The claim passes when the
//! maximum does not exceed `epsilon_claim + 1e-12`.

use super::Mechanism;
use crate::error::CoreError;
use crate::Result;

const MAX_EVALS: u64 = 10_000_000;

/// Enumerable neighbor structure for an audit.
#[derive(Clone, Debug)]
pub enum AuditDomain {
    /// Infection counts `I in 0..=k_pop` with neighbors `I' = I +/- 1`,
    /// releases `s in 0..=n_trials` per coordinate. The per-coordinate
    /// maximum is scaled by the release length `L`.
    TrajectoryCounts,
    /// 1-D real summaries on a grid; neighbor pairs are summaries at most
    /// `neighbor_gap` apart in L1; releases evaluated on `out_points`.
    Grid1D { inputs: Vec<f64>, neighbor_gap: f64, out_points: Vec<f64> },
    /// Two neighboring summaries with releases on the listed points.
    TwoPoint { a: f64, b: f64, out_points: Vec<f64> },
}

/// Result of an exhaustive audit.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub max_log_ratio: f64,
    pub epsilon_claim: f64,
    pub passes: bool,
    pub evaluations: u64,
}

/// Run the exhaustive audit of `mechanism` over `domain` against a claimed
/// budget.
pub fn dp_audit(mechanism: &Mechanism, domain: &AuditDomain, epsilon_claim: f64) -> Result<AuditReport> {
    let (max_log_ratio, evaluations) = match domain {
        AuditDomain::TrajectoryCounts => audit_trajectory(mechanism)?,
        AuditDomain::Grid1D { inputs, neighbor_gap, out_points } => {
            audit_pairs_1d(mechanism, inputs, *neighbor_gap, out_points)?
        }
        AuditDomain::TwoPoint { a, b, out_points } => {
            audit_pairs_1d(mechanism, &[*a, *b], f64::INFINITY, out_points)?
        }
    };
    Ok(AuditReport {
        max_log_ratio,
        epsilon_claim,
        passes: max_log_ratio <= epsilon_claim + 1e-12,
        evaluations,
    })
}

fn audit_trajectory(mechanism: &Mechanism) -> Result<(f64, u64)> {
    let (k_pop, n_trials, len) = match mechanism {
        Mechanism::SirBinomial { k_pop, n_trials, len, .. } => (*k_pop, *n_trials, *len),
        _ => {
            return Err(CoreError::MechanismDomain(
                "trajectory audit requires the binomial trajectory mechanism".into(),
            ))
        }
    };
    let evals = (k_pop + 1) * 2 * (n_trials + 1);
    if evals > MAX_EVALS {
        return Err(CoreError::AuditTooLarge { evals });
    }
    // Single-coordinate mechanism for per-point ratios.
    let single = match mechanism {
        Mechanism::SirBinomial { k_pop, n_trials, m_blur, proportions, .. } => {
            Mechanism::SirBinomial {
                k_pop: *k_pop,
                n_trials: *n_trials,
                m_blur: *m_blur,
                len: 1,
                proportions: *proportions,
            }
        }
        _ => unreachable!(),
    };
    let mut max_ratio: f64 = 0.0;
    let mut count = 0u64;
    for i in 0..=k_pop {
        for i_next in [i.wrapping_sub(1), i + 1] {
            if i_next > k_pop {
                continue; // covers both underflow and the upper edge
            }
            for s in 0..=n_trials {
                let lp = single.log_density(&[i as f64], &[s as f64])?;
                let lp_next = single.log_density(&[i_next as f64], &[s as f64])?;
                max_ratio = max_ratio.max((lp - lp_next).abs());
                count += 1;
            }
        }
    }
    // Independent coordinates; a neighbor can shift every I(t_i) by one.
    Ok((max_ratio * len as f64, count))
}

fn audit_pairs_1d(
    mechanism: &Mechanism,
    inputs: &[f64],
    neighbor_gap: f64,
    out_points: &[f64],
) -> Result<(f64, u64)> {
    let evals = (inputs.len() * inputs.len() * out_points.len()) as u64;
    if evals > MAX_EVALS {
        return Err(CoreError::AuditTooLarge { evals });
    }
    let mut max_ratio: f64 = 0.0;
    let mut count = 0u64;
    for (ai, &a) in inputs.iter().enumerate() {
        for &b in &inputs[ai + 1..] {
            if (a - b).abs() > neighbor_gap {
                continue;
            }
            for &z in out_points {
                let la = mechanism.log_density(&[a], &[z])?;
                let lb = mechanism.log_density(&[b], &[z])?;
                let ratio = if la == f64::NEG_INFINITY && lb == f64::NEG_INFINITY {
                    0.0
                } else {
                    (la - lb).abs()
                };
                max_ratio = max_ratio.max(ratio);
                count += 1;
            }
        }
    }
    Ok((max_ratio, count))
}

//! Stochastic SIR epidemic simulation via the Gillespie algorithm.
//!
//! Events are infections at rate `beta * S * I / K` and recoveries at rate
//! `gamma * I`, from the initial state `(K-1, 1, 0)`. The released summary
//! is the infected count at requested grid times, extracted by
//! left-continuous step interpolation of the jump process.

use crate::error::CoreError;
use crate::Result;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Infection and recovery rates (per unit time).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirParams {
    pub beta: f64,
    pub gamma: f64,
}

impl SirParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !(beta >= 0.0 && gamma >= 0.0) || !beta.is_finite() || !gamma.is_finite() {
            return Err(CoreError::MechanismDomain(format!(
                "SIR rates must be non-negative, got beta={beta} gamma={gamma}"
            )));
        }
        Ok(SirParams { beta, gamma })
    }
}

/// One recorded jump: time and the post-event compartment counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SirEvent {
    pub t: f64,
    pub s: u64,
    pub i: u64,
    pub r: u64,
}

/// Full event history plus grid extraction.
#[derive(Clone, Debug)]
pub struct SirTrajectory {
    pub k_pop: u64,
    pub events: Vec<SirEvent>,
    pub grid_times: Vec<f64>,
    pub grid_values: Vec<u64>,
}

/// Switching rule between exact simulation and tau-leaping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LeapMode {
    Exact,
    /// Leap with a fixed step while total propensity exceeds `threshold`.
    Auto { threshold: f64, dt: f64 },
}

impl Default for LeapMode {
    fn default() -> Self {
        LeapMode::Auto { threshold: 1e5, dt: 0.01 }
    }
}

/// Exact-event simulation retaining the full event history.
pub fn sir_gillespie(
    params: SirParams,
    k_pop: u64,
    t_max: f64,
    grid: &[f64],
    rng: &mut impl Rng,
) -> Result<SirTrajectory> {
    validate_grid(k_pop, t_max, grid)?;
    let mut events = Vec::new();
    let grid_values = simulate(params, k_pop, t_max, grid, rng, LeapMode::Exact, Some(&mut events));
    Ok(SirTrajectory { k_pop, events, grid_times: grid.to_vec(), grid_values })
}

/// Grid-only simulation, optionally tau-leaped; the workhorse for inference
/// where event histories would dominate memory.
pub fn sir_simulate_grid(
    params: SirParams,
    k_pop: u64,
    t_max: f64,
    grid: &[f64],
    mode: LeapMode,
    rng: &mut impl Rng,
) -> Result<Vec<u64>> {
    validate_grid(k_pop, t_max, grid)?;
    Ok(simulate(params, k_pop, t_max, grid, rng, mode, None))
}

fn validate_grid(k_pop: u64, t_max: f64, grid: &[f64]) -> Result<()> {
    if k_pop < 2 {
        return Err(CoreError::MechanismDomain("population must be at least 2".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|&t| t < 0.0 || t > t_max) {
        return Err(CoreError::MechanismDomain(
            "grid times must be ascending within [0, t_max]".into(),
        ));
    }
    Ok(())
}

fn simulate(
    params: SirParams,
    k_pop: u64,
    t_max: f64,
    grid: &[f64],
    rng: &mut impl Rng,
    mode: LeapMode,
    mut events: Option<&mut Vec<SirEvent>>,
) -> Vec<u64> {
    let k = k_pop as f64;
    let mut s = k_pop - 1;
    let mut i = 1u64;
    let mut r = 0u64;
    let mut t = 0.0f64;
    let mut gi = 0usize;
    let mut out = Vec::with_capacity(grid.len());

    if let Some(ev) = events.as_deref_mut() {
        ev.push(SirEvent { t: 0.0, s, i, r });
    }

    loop {
        let a_inf = params.beta * s as f64 * i as f64 / k;
        let a_rec = params.gamma * i as f64;
        let a_total = a_inf + a_rec;
        if i == 0 || a_total <= 0.0 {
            break;
        }

        let leap = match mode {
            LeapMode::Exact => None,
            LeapMode::Auto { threshold, dt } if a_total > threshold => Some(dt),
            LeapMode::Auto { .. } => None,
        };

        let (t_next, n_inf, n_rec) = match leap {
            None => {
                let dt = -crate::privacy::open_unit(rng).ln() / a_total;
                let is_infection = crate::privacy::open_unit(rng) * a_total < a_inf;
                (t + dt, u64::from(is_infection), u64::from(!is_infection))
            }
            Some(dt) => {
                let draw = |lambda: f64, rng: &mut dyn rand::RngCore| -> u64 {
                    if lambda <= 0.0 {
                        0
                    } else {
                        Poisson::new(lambda).expect("positive rate").sample(rng) as u64
                    }
                };
                let mut n_inf = draw(a_inf * dt, rng);
                let mut n_rec = draw(a_rec * dt, rng);
                n_inf = n_inf.min(s);
                n_rec = n_rec.min(i + n_inf);
                (t + dt, n_inf, n_rec)
            }
        };

        // Grid points passed before this jump see the pre-jump state.
        while gi < grid.len() && grid[gi] < t_next {
            out.push(i);
            gi += 1;
        }
        if t_next > t_max {
            break;
        }
        s -= n_inf;
        i = i + n_inf - n_rec;
        r += n_rec;
        t = t_next;
        assert!(s + i + r == k_pop, "SIR conservation violated");
        if let Some(ev) = events.as_deref_mut() {
            ev.push(SirEvent { t, s, i, r });
        }
    }
    while gi < grid.len() {
        out.push(i);
        gi += 1;
    }
    out
}

//! Conditional normalizing flow with rational-quadratic spline coupling
//! layers.
//!
//! The flow models a density `q(y | z)` on standardized coordinates: a
//! stack of coupling layers, each transforming half of the coordinates
//! (all of them in one dimension) through monotone splines whose
//! parameters come from a residual conditioner network reading the
//! untouched coordinates and the conditioning vector. Fixed seeded
//! permutations mix coordinates between layers. The base distribution is a
//! standard normal, so a freshly initialized flow (zero final conditioner
//! layer) is exactly the standard normal on standardized inputs.
//!
//! Two evaluation paths share the same parameter layout: a plain `f64`
//! path for density evaluation and sampling, and a tape path used during
//! training where gradients are required. Training drives both the
//! posterior estimator `q(theta | s_dp)` and the likelihood emulator
//! `q(s_dp | theta)`.

pub mod spline;
pub mod tape;
mod train;

pub use train::{train_flow, EarlyStop, EpochReport, TrainConfig, TrainOutcome};

use crate::error::CoreError;
use crate::Result;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use tape::{NodeId, Tape, Tensor};

const LN_2PI: f64 = 1.8378770664093453;

/// Architecture hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub y_dim: usize,
    pub z_dim: usize,
    pub layers: usize,
    pub hidden: usize,
    pub residual_blocks: usize,
    pub bins: usize,
    pub tail_bound: f64,
}

impl FlowConfig {
    /// Paper defaults: 8 layers, two residual blocks of 50 units, 10 bins,
    /// tail bound 5, standard-normal base.
    pub fn defaults(y_dim: usize, z_dim: usize) -> Self {
        FlowConfig { y_dim, z_dim, layers: 8, hidden: 50, residual_blocks: 2, bins: 10, tail_bound: 5.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.y_dim == 0 {
            return Err(CoreError::invalid_config("flow.y_dim", "must be at least 1"));
        }
        if self.layers == 0 {
            return Err(CoreError::invalid_config("flow.layers", "must be at least 1"));
        }
        if self.bins < 2 {
            return Err(CoreError::invalid_config("flow.bins", "needs at least 2 bins"));
        }
        if self.tail_bound <= 0.0 {
            return Err(CoreError::invalid_config("flow.tail_bound", "must be positive"));
        }
        Ok(())
    }
}

/// Per-coordinate affine standardization applied before the flow sees data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub y_shift: Vec<f64>,
    pub y_scale: Vec<f64>,
    pub z_shift: Vec<f64>,
    pub z_scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(y_dim: usize, z_dim: usize) -> Self {
        Standardizer {
            y_shift: vec![0.0; y_dim],
            y_scale: vec![1.0; y_dim],
            z_shift: vec![0.0; z_dim],
            z_scale: vec![1.0; z_dim],
        }
    }

    /// Fit from sample rows; scales are floored to avoid degenerate axes.
    pub fn fit(ys: &[Vec<f64>], zs: &[Vec<f64>]) -> Self {
        let stat = |rows: &[Vec<f64>]| -> (Vec<f64>, Vec<f64>) {
            if rows.is_empty() {
                return (Vec::new(), Vec::new());
            }
            let d = rows[0].len();
            let n = rows.len() as f64;
            let mut mean = vec![0.0; d];
            for r in rows {
                for (m, v) in mean.iter_mut().zip(r) {
                    *m += v / n;
                }
            }
            let mut var = vec![0.0; d];
            for r in rows {
                for ((vv, v), m) in var.iter_mut().zip(r).zip(&mean) {
                    *vv += (v - m) * (v - m) / n;
                }
            }
            let scale = var.into_iter().map(|v| v.sqrt().max(1e-6)).collect();
            (mean, scale)
        };
        let (y_shift, y_scale) = stat(ys);
        let (z_shift, z_scale) = stat(zs);
        Standardizer { y_shift, y_scale, z_shift, z_scale }
    }

    pub fn standardize_y(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(self.y_shift.iter().zip(&self.y_scale)).map(|(v, (s, c))| (v - s) / c).collect()
    }

    pub fn destandardize_y(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(self.y_shift.iter().zip(&self.y_scale)).map(|(v, (s, c))| v * c + s).collect()
    }

    pub fn standardize_z(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(self.z_shift.iter().zip(&self.z_scale)).map(|(v, (s, c))| (v - s) / c).collect()
    }

    /// `log |det d y_std / d y|`, added to standardized-space densities.
    pub fn y_logdet(&self) -> f64 {
        -self.y_scale.iter().map(|s| s.ln()).sum::<f64>()
    }
}

/// One named parameter tensor inside the flat vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamEntry {
    pub name: String,
    pub offset: usize,
    pub rows: usize,
    pub cols: usize,
}

/// All trainable weights, flattened, with a stable index map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlowParams {
    pub data: Vec<f64>,
    pub entries: Vec<ParamEntry>,
}

impl FlowParams {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn slice(&self, idx: usize) -> &[f64] {
        let e = &self.entries[idx];
        &self.data[e.offset..e.offset + e.rows * e.cols]
    }
}

struct LayerPlan {
    perm: Vec<usize>,
    id_dims: Vec<usize>,
    t_dims: Vec<usize>,
}

/// The conditional spline flow. Owns the architecture plan and the
/// standardizer; the trainable weights live in a separate [`FlowParams`].
pub struct ConditionalFlow {
    config: FlowConfig,
    layers: Vec<LayerPlan>,
    standardizer: Standardizer,
    entries_per_layer: usize,
}

impl ConditionalFlow {
    /// Build the architecture and an identity-initialized parameter vector.
    pub fn new(config: FlowConfig, seed: u64) -> Result<(Self, FlowParams)> {
        config.validate()?;
        let mut rng = crate::rng::RngStream::from_seed(seed).substream(0).rng();
        let dy = config.y_dim;

        let mut layers = Vec::with_capacity(config.layers);
        for l in 0..config.layers {
            let perm = if l == 0 || dy == 1 {
                (0..dy).collect()
            } else {
                random_permutation(dy, &mut rng)
            };
            let (id_dims, t_dims) = if dy == 1 {
                (Vec::new(), vec![0])
            } else {
                let mut id = Vec::new();
                let mut t = Vec::new();
                for i in 0..dy {
                    if (i + l) % 2 == 0 {
                        id.push(i);
                    } else {
                        t.push(i);
                    }
                }
                (id, t)
            };
            layers.push(LayerPlan { perm, id_dims, t_dims });
        }

        let flow = ConditionalFlow {
            entries_per_layer: 4 + 4 * config.residual_blocks,
            config,
            layers,
            standardizer: Standardizer::identity(dy, 0),
        };
        let params = flow.init_params(&mut rng);
        let mut flow = flow;
        flow.standardizer = Standardizer::identity(dy, flow.config.z_dim);
        Ok((flow, params))
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn set_standardizer(&mut self, s: Standardizer) {
        assert_eq!(s.y_shift.len(), self.config.y_dim);
        assert_eq!(s.z_shift.len(), self.config.z_dim);
        assert!(s.y_scale.iter().chain(&s.z_scale).all(|&v| v > 0.0));
        self.standardizer = s;
    }

    fn spline_params_per_dim(&self) -> usize {
        3 * self.config.bins - 1
    }

    fn conditioner_in_dim(&self, plan: &LayerPlan) -> usize {
        1 + plan.id_dims.len() + self.config.z_dim
    }

    fn init_params(&self, rng: &mut ChaCha20Rng) -> FlowParams {
        let mut data = Vec::new();
        let mut entries = Vec::new();
        let h = self.config.hidden;
        let mut push = |name: String, rows: usize, cols: usize, zero: bool,
                        data: &mut Vec<f64>, entries: &mut Vec<ParamEntry>, rng: &mut ChaCha20Rng| {
            let offset = data.len();
            let fan_in = rows.max(1);
            let sd = (2.0 / fan_in as f64).sqrt();
            for _ in 0..rows * cols {
                data.push(if zero {
                    0.0
                } else {
                    let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
                    sd * z
                });
            }
            entries.push(ParamEntry { name, offset, rows, cols });
        };
        for (l, plan) in self.layers.iter().enumerate() {
            let in_dim = self.conditioner_in_dim(plan);
            let out_dim = plan.t_dims.len() * self.spline_params_per_dim();
            push(format!("l{l}.w_in"), in_dim, h, false, &mut data, &mut entries, rng);
            push(format!("l{l}.b_in"), 1, h, true, &mut data, &mut entries, rng);
            for b in 0..self.config.residual_blocks {
                push(format!("l{l}.rb{b}.w1"), h, h, false, &mut data, &mut entries, rng);
                push(format!("l{l}.rb{b}.b1"), 1, h, true, &mut data, &mut entries, rng);
                push(format!("l{l}.rb{b}.w2"), h, h, false, &mut data, &mut entries, rng);
                push(format!("l{l}.rb{b}.b2"), 1, h, true, &mut data, &mut entries, rng);
            }
            // Zero-initialized head: every spline starts as the identity.
            push(format!("l{l}.w_out"), h, out_dim, true, &mut data, &mut entries, rng);
            push(format!("l{l}.b_out"), 1, out_dim, true, &mut data, &mut entries, rng);
        }
        FlowParams { data, entries }
    }

    fn layer_entry(&self, layer: usize, k: usize) -> usize {
        layer * self.entries_per_layer + k
    }

    /// Plain-`f64` conditioner evaluation for one input vector.
    fn conditioner_raw(&self, params: &FlowParams, layer: usize, input: &[f64]) -> Vec<f64> {
        let h = self.config.hidden;
        let e0 = self.layer_entry(layer, 0);
        let w_in = params.slice(e0);
        let b_in = params.slice(e0 + 1);
        let mut hid = b_in.to_vec();
        for (i, &x) in input.iter().enumerate() {
            if x != 0.0 {
                let row = &w_in[i * h..(i + 1) * h];
                for (hv, &wv) in hid.iter_mut().zip(row) {
                    *hv += x * wv;
                }
            }
        }
        for v in hid.iter_mut() {
            *v = v.max(0.0);
        }
        for b in 0..self.config.residual_blocks {
            let eb = e0 + 2 + 4 * b;
            let w1 = params.slice(eb);
            let b1 = params.slice(eb + 1);
            let w2 = params.slice(eb + 2);
            let b2 = params.slice(eb + 3);
            let mut t = b1.to_vec();
            for (i, &x) in hid.iter().enumerate() {
                if x != 0.0 {
                    let row = &w1[i * h..(i + 1) * h];
                    for (tv, &wv) in t.iter_mut().zip(row) {
                        *tv += x * wv;
                    }
                }
            }
            for v in t.iter_mut() {
                *v = v.max(0.0);
            }
            let mut u = b2.to_vec();
            for (i, &x) in t.iter().enumerate() {
                if x != 0.0 {
                    let row = &w2[i * h..(i + 1) * h];
                    for (uv, &wv) in u.iter_mut().zip(row) {
                        *uv += x * wv;
                    }
                }
            }
            for (hv, uv) in hid.iter_mut().zip(&u) {
                *hv += uv;
            }
        }
        let e_out = e0 + 2 + 4 * self.config.residual_blocks;
        let w_out = params.slice(e_out);
        let b_out = params.slice(e_out + 1);
        let out_dim = b_out.len();
        let mut out = b_out.to_vec();
        for (i, &x) in hid.iter().enumerate() {
            if x != 0.0 {
                let row = &w_out[i * out_dim..(i + 1) * out_dim];
                for (ov, &wv) in out.iter_mut().zip(row) {
                    *ov += x * wv;
                }
            }
        }
        out
    }

    /// Forward transform of one standardized `y` to the base space.
    /// Returns the base point and the accumulated log-determinant.
    fn forward_std(&self, params: &FlowParams, y_std: &[f64], z_std: &[f64]) -> (Vec<f64>, f64) {
        let mut v = y_std.to_vec();
        let mut logdet = 0.0;
        let spp = self.spline_params_per_dim();
        for (l, plan) in self.layers.iter().enumerate() {
            let permuted: Vec<f64> = plan.perm.iter().map(|&i| v[i]).collect();
            v = permuted;
            let mut input = Vec::with_capacity(self.conditioner_in_dim(plan));
            input.push(1.0);
            input.extend(plan.id_dims.iter().map(|&i| v[i]));
            input.extend_from_slice(z_std);
            let raw = self.conditioner_raw(params, l, &input);
            for (c, &dim) in plan.t_dims.iter().enumerate() {
                let knots = spline::decode(&raw[c * spp..(c + 1) * spp], self.config.bins, self.config.tail_bound);
                let (out, ld) = spline::forward(&knots, v[dim]);
                v[dim] = out;
                logdet += ld;
            }
        }
        (v, logdet)
    }

    /// Inverse transform of a base point to standardized `y`.
    fn inverse_std(&self, params: &FlowParams, u: &[f64], z_std: &[f64]) -> Vec<f64> {
        let mut v = u.to_vec();
        let spp = self.spline_params_per_dim();
        for (l, plan) in self.layers.iter().enumerate().rev() {
            let mut input = Vec::with_capacity(self.conditioner_in_dim(plan));
            input.push(1.0);
            input.extend(plan.id_dims.iter().map(|&i| v[i]));
            input.extend_from_slice(z_std);
            let raw = self.conditioner_raw(params, l, &input);
            for (c, &dim) in plan.t_dims.iter().enumerate() {
                let knots = spline::decode(&raw[c * spp..(c + 1) * spp], self.config.bins, self.config.tail_bound);
                let (out, _) = spline::inverse(&knots, v[dim]);
                v[dim] = out;
            }
            let mut unpermuted = vec![0.0; v.len()];
            for (pos, &src) in plan.perm.iter().enumerate() {
                unpermuted[src] = v[pos];
            }
            v = unpermuted;
        }
        v
    }

    /// Exact log density `log q(y | z)` in the original (natural) space.
    pub fn logprob(&self, params: &FlowParams, y: &[f64], z: &[f64]) -> Result<f64> {
        if y.len() != self.config.y_dim {
            return Err(CoreError::DimensionMismatch { expected: self.config.y_dim, got: y.len() });
        }
        if z.len() != self.config.z_dim {
            return Err(CoreError::DimensionMismatch { expected: self.config.z_dim, got: z.len() });
        }
        let y_std = self.standardizer.standardize_y(y);
        let z_std = self.standardizer.standardize_z(z);
        let (u, logdet) = self.forward_std(params, &y_std, &z_std);
        let base: f64 = u.iter().map(|&x| -0.5 * x * x).sum::<f64>()
            - 0.5 * self.config.y_dim as f64 * LN_2PI;
        let lp = base + logdet + self.standardizer.y_logdet();
        if !lp.is_finite() {
            return Err(CoreError::NonFinite(format!("flow logprob at y={y:?}")));
        }
        Ok(lp)
    }

    /// Draw `count` samples from `q(. | z)` in the original space.
    pub fn sample(
        &self,
        params: &FlowParams,
        z: &[f64],
        count: usize,
        rng: &mut ChaCha20Rng,
    ) -> Result<Vec<Vec<f64>>> {
        if z.len() != self.config.z_dim {
            return Err(CoreError::DimensionMismatch { expected: self.config.z_dim, got: z.len() });
        }
        let z_std = self.standardizer.standardize_z(z);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let u: Vec<f64> = (0..self.config.y_dim)
                .map(|_| rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng))
                .collect();
            let y_std = self.inverse_std(params, &u, &z_std);
            out.push(self.standardizer.destandardize_y(&y_std));
        }
        Ok(out)
    }

    /// Create the parameter leaves for a training tape, in entry order.
    pub fn bind(&self, tape: &mut Tape, params: &FlowParams) -> Vec<NodeId> {
        params
            .entries
            .iter()
            .map(|e| {
                tape.param(Tensor::new(
                    e.rows,
                    e.cols,
                    params.data[e.offset..e.offset + e.rows * e.cols].to_vec(),
                ))
            })
            .collect()
    }

    /// Batched log density on the tape. `y_std` and `z_std` are
    /// already-standardized constant tensors (`[n x y_dim]`, `[n x z_dim]`);
    /// the result is an `[n x 1]` column of `log q(y | z)` in natural-space
    /// units (the standardizer volume correction is included).
    pub fn logprob_tape(
        &self,
        tape: &mut Tape,
        bound: &[NodeId],
        y_std: NodeId,
        z_std: NodeId,
    ) -> NodeId {
        let n = tape.value(y_std).rows;
        let dy = self.config.y_dim;
        let spp = self.spline_params_per_dim();
        let h = self.config.hidden;

        let mut cols: Vec<NodeId> =
            (0..dy).map(|d| tape.slice_cols(y_std, d, d + 1)).collect();
        let ones = tape.constant(Tensor::column(vec![1.0; n]));
        let mut logdet_acc: Option<NodeId> = None;

        for (l, plan) in self.layers.iter().enumerate() {
            let permuted: Vec<NodeId> = plan.perm.iter().map(|&i| cols[i]).collect();
            cols = permuted;

            let mut input = ones;
            for &i in &plan.id_dims {
                input = tape.concat2(input, cols[i]);
            }
            if self.config.z_dim > 0 {
                input = tape.concat2(input, z_std);
            }

            let e0 = self.layer_entry(l, 0);
            let mut hid = {
                let mm = tape.matmul(input, bound[e0]);
                let ar = tape.add_row(mm, bound[e0 + 1]);
                tape.relu(ar)
            };
            for b in 0..self.config.residual_blocks {
                let eb = e0 + 2 + 4 * b;
                let t = {
                    let mm = tape.matmul(hid, bound[eb]);
                    let ar = tape.add_row(mm, bound[eb + 1]);
                    tape.relu(ar)
                };
                let u = {
                    let mm = tape.matmul(t, bound[eb + 2]);
                    tape.add_row(mm, bound[eb + 3])
                };
                hid = tape.add(hid, u);
            }
            debug_assert_eq!(tape.value(hid).cols, h);
            let e_out = e0 + 2 + 4 * self.config.residual_blocks;
            let raw = {
                let mm = tape.matmul(hid, bound[e_out]);
                tape.add_row(mm, bound[e_out + 1])
            };

            for (c, &dim) in plan.t_dims.iter().enumerate() {
                let raw_c = tape.slice_cols(raw, c * spp, (c + 1) * spp);
                let (y_new, ld) = spline::forward_tape(
                    tape,
                    cols[dim],
                    raw_c,
                    self.config.bins,
                    self.config.tail_bound,
                );
                cols[dim] = y_new;
                logdet_acc = Some(match logdet_acc {
                    None => ld,
                    Some(acc) => tape.add(acc, ld),
                });
            }
        }

        // Base log density: -1/2 sum u^2 - d/2 log(2 pi).
        let mut sq_acc: Option<NodeId> = None;
        for &c in &cols {
            let sq = tape.square(c);
            sq_acc = Some(match sq_acc {
                None => sq,
                Some(acc) => tape.add(acc, sq),
            });
        }
        let base = {
            let s = tape.scale(sq_acc.unwrap(), -0.5);
            tape.add_scalar(s, -0.5 * dy as f64 * LN_2PI + self.standardizer.y_logdet())
        };
        match logdet_acc {
            None => base,
            Some(ld) => tape.add(base, ld),
        }
    }
}

fn random_permutation(n: usize, rng: &mut ChaCha20Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.random::<u64>() % (i as u64 + 1)) as usize;
        perm.swap(i, j);
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_abs_diff_eq;

    fn small_config(y_dim: usize, z_dim: usize) -> FlowConfig {
        FlowConfig { y_dim, z_dim, layers: 3, hidden: 16, residual_blocks: 2, bins: 5, tail_bound: 5.0 }
    }

    fn randomize(params: &mut FlowParams, seed: u64, scale: f64) {
        let mut rng = RngStream::from_seed(seed).rng();
        use rand::Rng;
        for v in params.data.iter_mut() {
            *v = rng.random_range(-scale..scale);
        }
    }

    #[test]
    fn identity_initialized_flow_is_standard_normal() {
        let (flow, params) = ConditionalFlow::new(small_config(3, 2), 1).unwrap();
        let lp = flow.logprob(&params, &[0.0, 0.0, 0.0], &[0.7, -0.3]).unwrap();
        assert_abs_diff_eq!(lp, -1.5 * LN_2PI, epsilon = 1e-12);
        // And matches the closed-form normal elsewhere.
        let y = [0.5, -1.2, 2.0];
        let lp2 = flow.logprob(&params, &y, &[0.0, 0.0]).unwrap();
        let expect: f64 =
            y.iter().map(|v| -0.5 * v * v).sum::<f64>() - 1.5 * LN_2PI;
        assert_abs_diff_eq!(lp2, expect, epsilon = 1e-12);
    }

    #[test]
    fn forward_inverse_round_trip() {
        for (dy, dz) in [(1usize, 1usize), (2, 3), (4, 2)] {
            let (flow, mut params) = ConditionalFlow::new(small_config(dy, dz), 2).unwrap();
            randomize(&mut params, 40 + dy as u64, 0.8);
            let mut rng = RngStream::from_seed(7).rng();
            use rand::Rng;
            for trial in 0..250 {
                let y: Vec<f64> = (0..dy).map(|_| rng.random_range(-8.0..8.0)).collect();
                let z: Vec<f64> = (0..dz).map(|_| rng.random_range(-2.0..2.0)).collect();
                let (u, _) = flow.forward_std(&params, &y, &z);
                let back = flow.inverse_std(&params, &u, &z);
                for (a, b) in y.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-8, "trial {trial}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn change_of_variables_against_numerical_jacobian() {
        // 2-D flow: compare the analytic log-determinant with a numerical
        // Jacobian determinant of the forward map.
        let (flow, mut params) = ConditionalFlow::new(small_config(2, 1), 3).unwrap();
        randomize(&mut params, 50, 0.7);
        let z = [0.4];
        let mut rng = RngStream::from_seed(9).rng();
        use rand::Rng;
        for _ in 0..30 {
            let y = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
            let (_, logdet) = flow.forward_std(&params, &y, &z);
            let h = 1e-6;
            let mut jac = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut up = y;
                up[j] += h;
                let mut dn = y;
                dn[j] -= h;
                let (fu, _) = flow.forward_std(&params, &up, &z);
                let (fd, _) = flow.forward_std(&params, &dn, &z);
                for i in 0..2 {
                    jac[i][j] = (fu[i] - fd[i]) / (2.0 * h);
                }
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            assert!((det.abs().ln() - logdet).abs() < 1e-5, "logdet {logdet} det {det}");
        }
    }

    #[test]
    fn tape_and_raw_logprob_agree() {
        let (flow, mut params) = ConditionalFlow::new(small_config(3, 2), 4).unwrap();
        randomize(&mut params, 60, 0.6);
        let mut rng = RngStream::from_seed(11).rng();
        use rand::Rng;
        let n = 17;
        let ys: Vec<Vec<f64>> =
            (0..n).map(|_| (0..3).map(|_| rng.random_range(-6.0..6.0)).collect()).collect();
        let zs: Vec<Vec<f64>> =
            (0..n).map(|_| (0..2).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();

        let mut tape = Tape::new();
        let bound = flow.bind(&mut tape, &params);
        let y_t = tape.constant(Tensor::new(n, 3, ys.iter().flatten().copied().collect()));
        let z_t = tape.constant(Tensor::new(n, 2, zs.iter().flatten().copied().collect()));
        let lp = flow.logprob_tape(&mut tape, &bound, y_t, z_t);
        for i in 0..n {
            let raw = flow.logprob(&params, &ys[i], &zs[i]).unwrap();
            assert_abs_diff_eq!(tape.value(lp).data[i], raw, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampling_matches_density_one_dim() {
        // Identity flow samples are standard normal; KS against the CDF.
        let (flow, params) = ConditionalFlow::new(small_config(1, 1), 5).unwrap();
        let mut rng = RngStream::from_seed(13).rng();
        let draws = flow.sample(&params, &[0.3], 10_000, &mut rng).unwrap();
        let mut xs: Vec<f64> = draws.into_iter().map(|v| v[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = |x: f64| 0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2);
        let n = xs.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs()).max(((i as f64 + 1.0) / n - f).abs());
        }
        assert!(d < 0.019, "KS {d}"); // 0.1% critical value at n=1e4
    }

    #[test]
    fn sampling_consistent_with_logprob_after_randomization() {
        // Pushforward samples of a randomized flow match its own density:
        // KS of samples against the numerically integrated CDF of
        // exp(logprob).
        let (flow, mut params) = ConditionalFlow::new(small_config(1, 1), 6).unwrap();
        randomize(&mut params, 70, 0.5);
        let z = [0.5];
        let mut rng = RngStream::from_seed(15).rng();
        let mut xs: Vec<f64> =
            flow.sample(&params, &z, 8000, &mut rng).unwrap().into_iter().map(|v| v[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // CDF via dense trapezoid on a wide grid.
        let lo = -12.0;
        let hi = 12.0;
        let steps = 4000;
        let dx = (hi - lo) / steps as f64;
        let mut grid_x = Vec::with_capacity(steps + 1);
        let mut cdf = Vec::with_capacity(steps + 1);
        let mut acc = 0.0;
        let mut prev = flow.logprob(&params, &[lo], &z).unwrap().exp();
        grid_x.push(lo);
        cdf.push(0.0);
        for i in 1..=steps {
            let x = lo + i as f64 * dx;
            let cur = flow.logprob(&params, &[x], &z).unwrap().exp();
            acc += 0.5 * (prev + cur) * dx;
            prev = cur;
            grid_x.push(x);
            cdf.push(acc);
        }
        let total = acc;
        assert!((total - 1.0).abs() < 1e-3, "density mass {total}");
        let eval_cdf = |x: f64| -> f64 {
            let idx = ((x - lo) / dx).clamp(0.0, steps as f64) as usize;
            (cdf[idx] / total).clamp(0.0, 1.0)
        };
        let n = xs.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            let f = eval_cdf(x);
            d = d.max((f - i as f64 / n).abs()).max(((i as f64 + 1.0) / n - f).abs());
        }
        assert!(d < 0.022, "KS {d}");
    }

    #[test]
    fn normalization_after_randomization_two_dim() {
        // exp(logprob) integrates to 1 over a 2-D grid.
        let (flow, mut params) = ConditionalFlow::new(small_config(2, 1), 7).unwrap();
        randomize(&mut params, 80, 0.5);
        let z = [-0.2];
        let lo = -9.0;
        let hi = 9.0;
        let steps = 300;
        let dx = (hi - lo) / steps as f64;
        let mut mass = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let x = lo + (i as f64 + 0.5) * dx;
                let y = lo + (j as f64 + 0.5) * dx;
                mass += flow.logprob(&params, &[x, y], &z).unwrap().exp() * dx * dx;
            }
        }
        assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
    }

    #[test]
    fn standardizer_changes_density_consistently() {
        let (mut flow, params) = ConditionalFlow::new(small_config(1, 0), 8).unwrap();
        flow.set_standardizer(Standardizer {
            y_shift: vec![3.0],
            y_scale: vec![2.0],
            z_shift: vec![],
            z_scale: vec![],
        });
        // Identity flow + standardizer = N(3, 2^2).
        let lp = flow.logprob(&params, &[3.0], &[]).unwrap();
        assert_abs_diff_eq!(lp, -0.5 * LN_2PI - 2.0f64.ln(), epsilon = 1e-12);
        let mut rng = RngStream::from_seed(21).rng();
        let xs = flow.sample(&params, &[], 20_000, &mut rng).unwrap();
        let mean: f64 = xs.iter().map(|v| v[0]).sum::<f64>() / xs.len() as f64;
        assert!((mean - 3.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn gradient_passes_finite_difference_check() {
        // Criterion-8 style check at reduced size: 64 random coordinates of
        // the flattened parameter vector.
        let (flow, mut params) = ConditionalFlow::new(small_config(2, 2), 9).unwrap();
        randomize(&mut params, 90, 0.4);
        let mut rng = RngStream::from_seed(17).rng();
        use rand::Rng;
        let n = 6;
        let ys: Vec<f64> = (0..n * 2).map(|_| rng.random_range(-3.0..3.0)).collect();
        let zs: Vec<f64> = (0..n * 2).map(|_| rng.random_range(-1.5..1.5)).collect();

        let loss_of = |p: &FlowParams| -> f64 {
            let mut tape = Tape::new();
            let bound = flow.bind(&mut tape, p);
            let y_t = tape.constant(Tensor::new(n, 2, ys.clone()));
            let z_t = tape.constant(Tensor::new(n, 2, zs.clone()));
            let lp = flow.logprob_tape(&mut tape, &bound, y_t, z_t);
            let neg = tape.neg(lp);
            let loss = tape.mean_all(neg);
            tape.value(loss).item()
        };

        let mut tape = Tape::new();
        let bound = flow.bind(&mut tape, &params);
        let y_t = tape.constant(Tensor::new(n, 2, ys.clone()));
        let z_t = tape.constant(Tensor::new(n, 2, zs.clone()));
        let lp = flow.logprob_tape(&mut tape, &bound, y_t, z_t);
        let neg = tape.neg(lp);
        let loss = tape.mean_all(neg);
        let grads = tape.backward(loss);

        // Flatten analytic gradient in entry order.
        let mut flat = vec![0.0; params.len()];
        for (e, &node) in params.entries.iter().zip(&bound) {
            if let Some(g) = grads.get(node) {
                flat[e.offset..e.offset + g.data.len()].copy_from_slice(&g.data);
            }
        }
        let mut rng2 = RngStream::from_seed(18).rng();
        let mut checked = 0;
        while checked < 64 {
            let coord = (rng2.random::<u64>() as usize) % params.len();
            let mut up = params.clone();
            up.data[coord] += 1e-5;
            let mut dn = params.clone();
            dn.data[coord] -= 1e-5;
            let fd = (loss_of(&up) - loss_of(&dn)) / 2e-5;
            let an = flat[coord];
            if fd.abs() < 1e-10 && an.abs() < 1e-10 {
                checked += 1;
                continue;
            }
            let rel = (fd - an).abs() / fd.abs().max(an.abs());
            assert!(rel < 1e-4, "coord {coord}: analytic {an} fd {fd} rel {rel}");
            checked += 1;
        }
    }
}

//! Monotonic rational-quadratic spline transforms with linear tails.
//!
//! Each transformed coordinate receives `3*bins - 1` unconstrained numbers
//! from its conditioner: bin widths and heights through a softmax (floored
//! at a minimal bin fraction) and internal knot derivatives through a
//! shifted softplus (floored at a minimal slope). Boundary derivatives are
//! pinned to 1 so the transform continues as the identity outside
//! `[-tail, tail]`, keeping the log-density finite everywhere. All-zero
//! parameters decode to the exact identity map.

use super::tape::{softplus, NodeId, Tape, Tensor};

pub const MIN_BIN_FRACTION: f64 = 1e-3;
pub const MIN_DERIVATIVE: f64 = 1e-3;

/// Shift making `min_d + softplus(0 + shift) = 1`.
pub fn derivative_shift() -> f64 {
    ((1.0 - MIN_DERIVATIVE).exp() - 1.0).ln()
}

/// Decoded knots for one coordinate.
#[derive(Clone, Debug)]
pub struct SplineKnots {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub derivs: Vec<f64>,
}

/// Decode `3*bins - 1` raw parameters into knot arrays on `[-tail, tail]`.
pub fn decode(raw: &[f64], bins: usize, tail: f64) -> SplineKnots {
    assert_eq!(raw.len(), 3 * bins - 1);
    let two_b = 2.0 * tail;
    let softmax = |vals: &[f64]| -> Vec<f64> {
        let mx = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = vals.iter().map(|&v| (v - mx).exp()).collect();
        let denom: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / denom).collect()
    };
    let make_knots = |vals: &[f64]| -> Vec<f64> {
        let sm = softmax(vals);
        let mut out = Vec::with_capacity(bins + 1);
        out.push(-tail);
        let mut acc = -tail;
        for &w in &sm {
            acc += two_b * (MIN_BIN_FRACTION + (1.0 - bins as f64 * MIN_BIN_FRACTION) * w);
            out.push(acc);
        }
        out
    };
    let xs = make_knots(&raw[..bins]);
    let ys = make_knots(&raw[bins..2 * bins]);
    let shift = derivative_shift();
    let mut derivs = Vec::with_capacity(bins + 1);
    derivs.push(1.0);
    for &d in &raw[2 * bins..] {
        derivs.push(MIN_DERIVATIVE + softplus(d + shift));
    }
    derivs.push(1.0);
    SplineKnots { xs, ys, derivs }
}

fn bin_index(knots: &[f64], v: f64) -> usize {
    let bins = knots.len() - 2;
    knots[1..knots.len() - 1].partition_point(|&k| k < v).min(bins)
}

/// Forward map and log |dy/dx|. Identity outside the tail bound.
pub fn forward(k: &SplineKnots, x: f64) -> (f64, f64) {
    let tail = *k.xs.last().unwrap();
    if !(-tail..=tail).contains(&x) {
        return (x, 0.0);
    }
    let b = bin_index(&k.xs, x);
    let (xk, xk1) = (k.xs[b], k.xs[b + 1]);
    let (yk, yk1) = (k.ys[b], k.ys[b + 1]);
    let (dk, dk1) = (k.derivs[b], k.derivs[b + 1]);
    let w = xk1 - xk;
    let h = yk1 - yk;
    let s = h / w;
    let xi = (x - xk) / w;
    let xip = xi * (1.0 - xi);
    let denom = s + (dk + dk1 - 2.0 * s) * xip;
    let y = yk + h * (s * xi * xi + dk * xip) / denom;
    let deriv_num = s * s * (dk1 * xi * xi + 2.0 * s * xip + dk * (1.0 - xi) * (1.0 - xi));
    (y, deriv_num.ln() - 2.0 * denom.ln())
}

/// Inverse map; returns `x` and log |dy/dx| evaluated at `x`.
pub fn inverse(k: &SplineKnots, y: f64) -> (f64, f64) {
    let tail = *k.xs.last().unwrap();
    if !(-tail..=tail).contains(&y) {
        return (y, 0.0);
    }
    let b = bin_index(&k.ys, y);
    let (xk, xk1) = (k.xs[b], k.xs[b + 1]);
    let (yk, yk1) = (k.ys[b], k.ys[b + 1]);
    let (dk, dk1) = (k.derivs[b], k.derivs[b + 1]);
    let w = xk1 - xk;
    let h = yk1 - yk;
    let s = h / w;
    let dy = y - yk;
    let mix = dk + dk1 - 2.0 * s;
    let a = h * (s - dk) + dy * mix;
    let bq = h * dk - dy * mix;
    let c = -s * dy;
    let disc = (bq * bq - 4.0 * a * c).max(0.0);
    let xi = (2.0 * c / (-bq - disc.sqrt())).clamp(0.0, 1.0);
    let x = xi * w + xk;
    let xip = xi * (1.0 - xi);
    let denom = s + mix * xip;
    let deriv_num = s * s * (dk1 * xi * xi + 2.0 * s * xip + dk * (1.0 - xi) * (1.0 - xi));
    (x, deriv_num.ln() - 2.0 * denom.ln())
}

/// Tape version of [`forward`] for a batch column. `x` is `[n x 1]` and
/// `raw` is the `[n x (3*bins-1)]` conditioner output for this coordinate.
/// Returns the transformed column and the per-row log-determinant
/// contribution.
pub fn forward_tape(
    tape: &mut Tape,
    x: NodeId,
    raw: NodeId,
    bins: usize,
    tail: f64,
) -> (NodeId, NodeId) {
    let n = tape.value(x).rows;
    let k = bins;
    let two_b = 2.0 * tail;

    let w_raw = tape.slice_cols(raw, 0, k);
    let h_raw = tape.slice_cols(raw, k, 2 * k);
    let d_raw = tape.slice_cols(raw, 2 * k, 3 * k - 1);

    let scale_f = two_b * (1.0 - k as f64 * MIN_BIN_FRACTION);
    let widths = {
        let sm = tape.softmax_rows(w_raw);
        let sc = tape.scale(sm, scale_f);
        tape.add_scalar(sc, two_b * MIN_BIN_FRACTION)
    };
    let heights = {
        let sm = tape.softmax_rows(h_raw);
        let sc = tape.scale(sm, scale_f);
        tape.add_scalar(sc, two_b * MIN_BIN_FRACTION)
    };
    let kx_right = {
        let cs = tape.cumsum_rows(widths);
        tape.add_scalar(cs, -tail)
    };
    let ky_right = {
        let cs = tape.cumsum_rows(heights);
        tape.add_scalar(cs, -tail)
    };
    let d_inner = {
        let sh = tape.add_scalar(d_raw, derivative_shift());
        let sp = tape.softplus(sh);
        tape.add_scalar(sp, MIN_DERIVATIVE)
    };

    // Tail mask and safe input (out-of-range rows ride the identity path).
    let xv = tape.value(x).data.clone();
    let mask_vec: Vec<f64> =
        xv.iter().map(|&v| if (-tail..=tail).contains(&v) { 1.0 } else { 0.0 }).collect();
    let mask = tape.constant(Tensor::column(mask_vec.clone()));
    let x_safe = tape.mul(x, mask);

    // Bin indices from current values.
    let kxv = tape.value(kx_right);
    let idx: Vec<usize> = (0..n)
        .map(|i| {
            let v = xv[i] * mask_vec[i];
            let row = &kxv.data[i * k..(i + 1) * k];
            row[..k - 1].partition_point(|&kn| kn < v).min(k - 1)
        })
        .collect();
    let idx1: Vec<usize> = idx.iter().map(|&j| j + 1).collect();

    let neg_b = tape.constant(Tensor::column(vec![-tail; n]));
    let ones = tape.constant(Tensor::column(vec![1.0; n]));
    let kx_aug = tape.concat2(neg_b, kx_right);
    let ky_aug = tape.concat2(neg_b, ky_right);
    let d_aug = {
        let left = tape.concat2(ones, d_inner);
        tape.concat2(left, ones)
    };

    let xk = tape.gather_cols(kx_aug, idx.clone());
    let xk1 = tape.gather_cols(kx_aug, idx1.clone());
    let yk = tape.gather_cols(ky_aug, idx.clone());
    let yk1 = tape.gather_cols(ky_aug, idx1.clone());
    let dk = tape.gather_cols(d_aug, idx);
    let dk1 = tape.gather_cols(d_aug, idx1);

    let w = tape.sub(xk1, xk);
    let h = tape.sub(yk1, yk);
    let s = tape.div(h, w);

    let xi = {
        let dxk = tape.sub(x_safe, xk);
        tape.div(dxk, w)
    };
    let one_minus_xi = {
        let nx = tape.neg(xi);
        tape.add_scalar(nx, 1.0)
    };
    let xip = tape.mul(xi, one_minus_xi);
    let xi2 = tape.square(xi);

    let mix = {
        let dsum = tape.add(dk, dk1);
        let s2 = tape.scale(s, 2.0);
        tape.sub(dsum, s2)
    };
    let denom = {
        let t = tape.mul(mix, xip);
        tape.add(s, t)
    };
    let numer = {
        let a = tape.mul(s, xi2);
        let b = tape.mul(dk, xip);
        let sum = tape.add(a, b);
        tape.mul(h, sum)
    };
    let y_spline = {
        let frac = tape.div(numer, denom);
        tape.add(yk, frac)
    };
    let deriv_num = {
        let t1 = tape.mul(dk1, xi2);
        let sxip = tape.mul(s, xip);
        let t2 = tape.scale(sxip, 2.0);
        let om2 = tape.square(one_minus_xi);
        let t3 = tape.mul(dk, om2);
        let sum = tape.add(t1, t2);
        let sum = tape.add(sum, t3);
        let s2 = tape.square(s);
        tape.mul(s2, sum)
    };
    let logdet_spline = {
        let ln_num = tape.ln(deriv_num);
        let ln_den = tape.ln(denom);
        let two_ln_den = tape.scale(ln_den, 2.0);
        tape.sub(ln_num, two_ln_den)
    };

    let inv_mask_vec: Vec<f64> = mask_vec.iter().map(|&m| 1.0 - m).collect();
    let inv_mask = tape.constant(Tensor::column(inv_mask_vec));
    let y = {
        let a = tape.mul(y_spline, mask);
        let b = tape.mul(x, inv_mask);
        tape.add(a, b)
    };
    let logdet = tape.mul(logdet_spline, mask);
    (y, logdet)
}

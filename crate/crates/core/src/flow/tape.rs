//! Tape-based reverse-mode automatic differentiation over small dense
//! tensors.
//!
//! The tape is eager: node values are computed at construction, so shapes
//! and data-dependent choices (spline bin indices, tail masks) can be read
//! while the graph is being built. `backward` then accumulates exact
//! gradients for every node on a path from a trainable leaf to the loss.

use std::fmt;

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tensor[{}x{}]", self.rows, self.cols)
    }
}

impl Tensor {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len());
        Tensor { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn scalar(v: f64) -> Self {
        Tensor { rows: 1, cols: 1, data: vec![v] }
    }

    pub fn column(data: Vec<f64>) -> Self {
        Tensor { rows: data.len(), cols: 1, data }
    }

    pub fn item(&self) -> f64 {
        assert_eq!(self.data.len(), 1);
        self.data[0]
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    MatMul(NodeId, NodeId),
    AddRow(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    MulCol(NodeId, NodeId),
    DivCol(NodeId, NodeId),
    SubCol(NodeId, NodeId),
    Relu(NodeId),
    Exp(NodeId),
    Ln(NodeId),
    Softplus(NodeId),
    Square(NodeId),
    Neg(NodeId),
    Scale(NodeId, f64),
    AddScalar(NodeId, f64),
    SumAll(NodeId),
    MeanAll(NodeId),
    SumRows(NodeId),
    CumsumRows(NodeId),
    SoftmaxRows(NodeId),
    LogSumExpRows(NodeId),
    Concat2(NodeId, NodeId),
    SliceCols(NodeId, usize, usize),
    GatherCols(NodeId, Vec<usize>),
    Dot(NodeId, NodeId),
}

struct Node {
    op: Op,
    value: Tensor,
    needs_grad: bool,
    trainable: bool,
}

/// Eager reverse-mode tape.
pub struct Tape {
    nodes: Vec<Node>,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::with_capacity(1024) }
    }

    pub fn value(&self, id: NodeId) -> &Tensor {
        &self.nodes[id].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Tensor, needs_grad: bool) -> NodeId {
        self.nodes.push(Node { op, value, needs_grad, trainable: false });
        self.nodes.len() - 1
    }

    fn ng(&self, id: NodeId) -> bool {
        self.nodes[id].needs_grad
    }

    /// Trainable leaf.
    pub fn param(&mut self, value: Tensor) -> NodeId {
        self.nodes.push(Node { op: Op::Leaf, value, needs_grad: true, trainable: true });
        self.nodes.len() - 1
    }

    /// Non-trainable leaf.
    pub fn constant(&mut self, value: Tensor) -> NodeId {
        self.push(Op::Leaf, value, false)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (x, w) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!(x.cols, w.rows, "matmul shape mismatch");
        let (n, k, m) = (x.rows, x.cols, w.cols);
        let mut out = vec![0.0; n * m];
        for i in 0..n {
            let xrow = &x.data[i * k..(i + 1) * k];
            let orow = &mut out[i * m..(i + 1) * m];
            for (kk, &xv) in xrow.iter().enumerate() {
                if xv != 0.0 {
                    let wrow = &w.data[kk * m..(kk + 1) * m];
                    for (o, &wv) in orow.iter_mut().zip(wrow) {
                        *o += xv * wv;
                    }
                }
            }
        }
        let ng = self.ng(a) || self.ng(b);
        self.push(Op::MatMul(a, b), Tensor::new(n, m, out), ng)
    }

    pub fn add_row(&mut self, a: NodeId, bias: NodeId) -> NodeId {
        let (x, b) = (&self.nodes[a].value, &self.nodes[bias].value);
        assert_eq!(b.rows, 1);
        assert_eq!(x.cols, b.cols);
        let mut out = x.data.clone();
        for i in 0..x.rows {
            for j in 0..x.cols {
                out[i * x.cols + j] += b.data[j];
            }
        }
        let ng = self.ng(a) || self.ng(bias);
        self.push(Op::AddRow(a, bias), Tensor::new(x.rows, x.cols, out), ng)
    }

    fn binary_elementwise(
        &mut self,
        a: NodeId,
        b: NodeId,
        f: impl Fn(f64, f64) -> f64,
        op: Op,
    ) -> NodeId {
        let (x, y) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!((x.rows, x.cols), (y.rows, y.cols), "elementwise shape mismatch");
        let out: Vec<f64> = x.data.iter().zip(&y.data).map(|(&u, &v)| f(u, v)).collect();
        let ng = self.ng(a) || self.ng(b);
        self.push(op, Tensor::new(x.rows, x.cols, out), ng)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary_elementwise(a, b, |u, v| u + v, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary_elementwise(a, b, |u, v| u - v, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary_elementwise(a, b, |u, v| u * v, Op::Mul(a, b))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.binary_elementwise(a, b, |u, v| u / v, Op::Div(a, b))
    }

    fn col_broadcast(
        &mut self,
        a: NodeId,
        col: NodeId,
        f: impl Fn(f64, f64) -> f64,
        op: Op,
    ) -> NodeId {
        let (x, c) = (&self.nodes[a].value, &self.nodes[col].value);
        assert_eq!(c.cols, 1);
        assert_eq!(x.rows, c.rows);
        let mut out = vec![0.0; x.rows * x.cols];
        for i in 0..x.rows {
            let cv = c.data[i];
            for j in 0..x.cols {
                out[i * x.cols + j] = f(x.data[i * x.cols + j], cv);
            }
        }
        let ng = self.ng(a) || self.ng(col);
        self.push(op, Tensor::new(x.rows, x.cols, out), ng)
    }

    pub fn mul_col(&mut self, a: NodeId, col: NodeId) -> NodeId {
        self.col_broadcast(a, col, |u, v| u * v, Op::MulCol(a, col))
    }

    pub fn div_col(&mut self, a: NodeId, col: NodeId) -> NodeId {
        self.col_broadcast(a, col, |u, v| u / v, Op::DivCol(a, col))
    }

    pub fn sub_col(&mut self, a: NodeId, col: NodeId) -> NodeId {
        self.col_broadcast(a, col, |u, v| u - v, Op::SubCol(a, col))
    }

    fn unary(&mut self, a: NodeId, f: impl Fn(f64) -> f64, op: Op) -> NodeId {
        let x = &self.nodes[a].value;
        let out: Vec<f64> = x.data.iter().map(|&u| f(u)).collect();
        let ng = self.ng(a);
        self.push(op, Tensor::new(x.rows, x.cols, out), ng)
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        self.unary(a, |u| u.max(0.0), Op::Relu(a))
    }

    pub fn exp(&mut self, a: NodeId) -> NodeId {
        self.unary(a, f64::exp, Op::Exp(a))
    }

    pub fn ln(&mut self, a: NodeId) -> NodeId {
        self.unary(a, f64::ln, Op::Ln(a))
    }

    pub fn softplus(&mut self, a: NodeId) -> NodeId {
        self.unary(a, softplus, Op::Softplus(a))
    }

    pub fn square(&mut self, a: NodeId) -> NodeId {
        self.unary(a, |u| u * u, Op::Square(a))
    }

    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.unary(a, |u| -u, Op::Neg(a))
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        self.unary(a, |u| c * u, Op::Scale(a, c))
    }

    pub fn add_scalar(&mut self, a: NodeId, c: f64) -> NodeId {
        self.unary(a, |u| u + c, Op::AddScalar(a, c))
    }

    pub fn sum_all(&mut self, a: NodeId) -> NodeId {
        let s: f64 = self.nodes[a].value.data.iter().sum();
        let ng = self.ng(a);
        self.push(Op::SumAll(a), Tensor::scalar(s), ng)
    }

    pub fn mean_all(&mut self, a: NodeId) -> NodeId {
        let x = &self.nodes[a].value;
        let s: f64 = x.data.iter().sum::<f64>() / x.data.len() as f64;
        let ng = self.ng(a);
        self.push(Op::MeanAll(a), Tensor::scalar(s), ng)
    }

    /// Row sums: [n x m] -> [n x 1].
    pub fn sum_rows(&mut self, a: NodeId) -> NodeId {
        let x = &self.nodes[a].value;
        let out: Vec<f64> =
            (0..x.rows).map(|i| x.data[i * x.cols..(i + 1) * x.cols].iter().sum()).collect();
        let ng = self.ng(a);
        self.push(Op::SumRows(a), Tensor::column(out), ng)
    }

    /// Cumulative sums along each row.
    pub fn cumsum_rows(&mut self, a: NodeId) -> NodeId {
        let x = &self.nodes[a].value;
        let mut out = vec![0.0; x.rows * x.cols];
        for i in 0..x.rows {
            let mut acc = 0.0;
            for j in 0..x.cols {
                acc += x.data[i * x.cols + j];
                out[i * x.cols + j] = acc;
            }
        }
        let ng = self.ng(a);
        self.push(Op::CumsumRows(a), Tensor::new(x.rows, x.cols, out), ng)
    }

    /// Numerically stable softmax along each row.
    pub fn softmax_rows(&mut self, a: NodeId) -> NodeId {
        let x = &self.nodes[a].value;
        let mut out = vec![0.0; x.rows * x.cols];
        for i in 0..x.rows {
            let row = &x.data[i * x.cols..(i + 1) * x.cols];
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut denom = 0.0;
            for (j, &v) in row.iter().enumerate() {
                let e = (v - mx).exp();
                out[i * x.cols + j] = e;
                denom += e;
            }
            for j in 0..x.cols {
                out[i * x.cols + j] /= denom;
            }
        }
        let ng = self.ng(a);
        self.push(Op::SoftmaxRows(a), Tensor::new(x.rows, x.cols, out), ng)
    }

    /// Stable log-sum-exp along each row: [n x m] -> [n x 1].
    pub fn logsumexp_rows(&mut self, a: NodeId) -> NodeId {
        let x = &self.nodes[a].value;
        let out: Vec<f64> = (0..x.rows)
            .map(|i| {
                let row = &x.data[i * x.cols..(i + 1) * x.cols];
                let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if mx == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                mx + row.iter().map(|&v| (v - mx).exp()).sum::<f64>().ln()
            })
            .collect();
        let ng = self.ng(a);
        self.push(Op::LogSumExpRows(a), Tensor::column(out), ng)
    }

    /// Horizontal concatenation.
    pub fn concat2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (x, y) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!(x.rows, y.rows);
        let cols = x.cols + y.cols;
        let mut out = vec![0.0; x.rows * cols];
        for i in 0..x.rows {
            out[i * cols..i * cols + x.cols].copy_from_slice(&x.data[i * x.cols..(i + 1) * x.cols]);
            out[i * cols + x.cols..(i + 1) * cols]
                .copy_from_slice(&y.data[i * y.cols..(i + 1) * y.cols]);
        }
        let ng = self.ng(a) || self.ng(b);
        self.push(Op::Concat2(a, b), Tensor::new(x.rows, cols, out), ng)
    }

    pub fn slice_cols(&mut self, a: NodeId, from: usize, to: usize) -> NodeId {
        let x = &self.nodes[a].value;
        assert!(from < to && to <= x.cols);
        let cols = to - from;
        let mut out = vec![0.0; x.rows * cols];
        for i in 0..x.rows {
            out[i * cols..(i + 1) * cols]
                .copy_from_slice(&x.data[i * x.cols + from..i * x.cols + to]);
        }
        let ng = self.ng(a);
        self.push(Op::SliceCols(a, from, to), Tensor::new(x.rows, cols, out), ng)
    }

    /// Per-row column gather: out[i] = a[i, idx[i]].
    pub fn gather_cols(&mut self, a: NodeId, idx: Vec<usize>) -> NodeId {
        let x = &self.nodes[a].value;
        assert_eq!(idx.len(), x.rows);
        let out: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| x.data[i * x.cols + j]).collect();
        let ng = self.ng(a);
        self.push(Op::GatherCols(a, idx), Tensor::column(out), ng)
    }

    /// Inner product of two same-shape tensors: sum(a * b) -> scalar.
    pub fn dot(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (x, y) = (&self.nodes[a].value, &self.nodes[b].value);
        assert_eq!((x.rows, x.cols), (y.rows, y.cols));
        let s: f64 = x.data.iter().zip(&y.data).map(|(&u, &v)| u * v).sum();
        let ng = self.ng(a) || self.ng(b);
        self.push(Op::Dot(a, b), Tensor::scalar(s), ng)
    }

    /// Reverse pass from a scalar loss node. Returns per-node gradients for
    /// nodes that required them.
    pub fn backward(&self, loss: NodeId) -> Gradients {
        assert_eq!(self.nodes[loss].value.data.len(), 1, "loss must be scalar");
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss] = Some(Tensor::scalar(1.0));
        for id in (0..=loss).rev() {
            if !self.nodes[id].needs_grad {
                continue;
            }
            let Some(g) = grads[id].take() else { continue };
            self.propagate(id, &g, &mut grads);
            grads[id] = Some(g);
        }
        Gradients { grads }
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], id: NodeId, delta: &Tensor) {
        if !self.nodes[id].needs_grad {
            return;
        }
        match &mut grads[id] {
            Some(g) => {
                for (gv, dv) in g.data.iter_mut().zip(&delta.data) {
                    *gv += dv;
                }
            }
            slot @ None => *slot = Some(delta.clone()),
        }
    }

    #[allow(clippy::too_many_lines)]
    fn propagate(&self, id: NodeId, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let val = |n: NodeId| &self.nodes[n].value;
        match &self.nodes[id].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (x, w) = (val(*a), val(*b));
                let (n, k, m) = (x.rows, x.cols, w.cols);
                if self.nodes[*a].needs_grad {
                    // dX = dY . W^T
                    let mut dx = Tensor::zeros(n, k);
                    for i in 0..n {
                        let grow = &g.data[i * m..(i + 1) * m];
                        let drow = &mut dx.data[i * k..(i + 1) * k];
                        for (kk, dv) in drow.iter_mut().enumerate() {
                            let wrow = &w.data[kk * m..(kk + 1) * m];
                            *dv = grow.iter().zip(wrow).map(|(&gv, &wv)| gv * wv).sum();
                        }
                    }
                    self.accumulate(grads, *a, &dx);
                }
                if self.nodes[*b].needs_grad {
                    // dW = X^T . dY
                    let mut dw = Tensor::zeros(k, m);
                    for i in 0..n {
                        let xrow = &x.data[i * k..(i + 1) * k];
                        let grow = &g.data[i * m..(i + 1) * m];
                        for (kk, &xv) in xrow.iter().enumerate() {
                            if xv != 0.0 {
                                let wrow = &mut dw.data[kk * m..(kk + 1) * m];
                                for (dv, &gv) in wrow.iter_mut().zip(grow) {
                                    *dv += xv * gv;
                                }
                            }
                        }
                    }
                    self.accumulate(grads, *b, &dw);
                }
            }
            Op::AddRow(a, bias) => {
                self.accumulate(grads, *a, g);
                if self.nodes[*bias].needs_grad {
                    let cols = val(*bias).cols;
                    let mut db = Tensor::zeros(1, cols);
                    for i in 0..g.rows {
                        for j in 0..cols {
                            db.data[j] += g.data[i * cols + j];
                        }
                    }
                    self.accumulate(grads, *bias, &db);
                }
            }
            Op::Add(a, b) => {
                self.accumulate(grads, *a, g);
                self.accumulate(grads, *b, g);
            }
            Op::Sub(a, b) => {
                self.accumulate(grads, *a, g);
                if self.nodes[*b].needs_grad {
                    let neg = Tensor::new(g.rows, g.cols, g.data.iter().map(|&v| -v).collect());
                    self.accumulate(grads, *b, &neg);
                }
            }
            Op::Mul(a, b) => {
                if self.nodes[*a].needs_grad {
                    let y = val(*b);
                    let da =
                        Tensor::new(g.rows, g.cols, g.data.iter().zip(&y.data).map(|(&gv, &v)| gv * v).collect());
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*b].needs_grad {
                    let x = val(*a);
                    let db =
                        Tensor::new(g.rows, g.cols, g.data.iter().zip(&x.data).map(|(&gv, &v)| gv * v).collect());
                    self.accumulate(grads, *b, &db);
                }
            }
            Op::Div(a, b) => {
                let (x, y) = (val(*a), val(*b));
                if self.nodes[*a].needs_grad {
                    let da = Tensor::new(
                        g.rows,
                        g.cols,
                        g.data.iter().zip(&y.data).map(|(&gv, &v)| gv / v).collect(),
                    );
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*b].needs_grad {
                    let db = Tensor::new(
                        g.rows,
                        g.cols,
                        g.data
                            .iter()
                            .zip(x.data.iter().zip(&y.data))
                            .map(|(&gv, (&xv, &yv))| -gv * xv / (yv * yv))
                            .collect(),
                    );
                    self.accumulate(grads, *b, &db);
                }
            }
            Op::MulCol(a, col) => {
                let (x, c) = (val(*a), val(*col));
                if self.nodes[*a].needs_grad {
                    let mut da = Tensor::zeros(x.rows, x.cols);
                    for i in 0..x.rows {
                        for j in 0..x.cols {
                            da.data[i * x.cols + j] = g.data[i * x.cols + j] * c.data[i];
                        }
                    }
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*col].needs_grad {
                    let mut dc = Tensor::zeros(x.rows, 1);
                    for i in 0..x.rows {
                        let mut acc = 0.0;
                        for j in 0..x.cols {
                            acc += g.data[i * x.cols + j] * x.data[i * x.cols + j];
                        }
                        dc.data[i] = acc;
                    }
                    self.accumulate(grads, *col, &dc);
                }
            }
            Op::DivCol(a, col) => {
                let (x, c) = (val(*a), val(*col));
                if self.nodes[*a].needs_grad {
                    let mut da = Tensor::zeros(x.rows, x.cols);
                    for i in 0..x.rows {
                        for j in 0..x.cols {
                            da.data[i * x.cols + j] = g.data[i * x.cols + j] / c.data[i];
                        }
                    }
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*col].needs_grad {
                    let mut dc = Tensor::zeros(x.rows, 1);
                    for i in 0..x.rows {
                        let mut acc = 0.0;
                        for j in 0..x.cols {
                            acc += g.data[i * x.cols + j] * x.data[i * x.cols + j];
                        }
                        dc.data[i] = -acc / (c.data[i] * c.data[i]);
                    }
                    self.accumulate(grads, *col, &dc);
                }
            }
            Op::SubCol(a, col) => {
                self.accumulate(grads, *a, g);
                if self.nodes[*col].needs_grad {
                    let cols = val(*a).cols;
                    let mut dc = Tensor::zeros(g.rows, 1);
                    for i in 0..g.rows {
                        dc.data[i] = -g.data[i * cols..(i + 1) * cols].iter().sum::<f64>();
                    }
                    self.accumulate(grads, *col, &dc);
                }
            }
            Op::Relu(a) => {
                let x = val(*a);
                let da = Tensor::new(
                    g.rows,
                    g.cols,
                    g.data
                        .iter()
                        .zip(&x.data)
                        .map(|(&gv, &xv)| if xv > 0.0 { gv } else { 0.0 })
                        .collect(),
                );
                self.accumulate(grads, *a, &da);
            }
            Op::Exp(a) => {
                let y = &self.nodes[id].value;
                let da = Tensor::new(
                    g.rows,
                    g.cols,
                    g.data.iter().zip(&y.data).map(|(&gv, &yv)| gv * yv).collect(),
                );
                self.accumulate(grads, *a, &da);
            }
            Op::Ln(a) => {
                let x = val(*a);
                let da = Tensor::new(
                    g.rows,
                    g.cols,
                    g.data.iter().zip(&x.data).map(|(&gv, &xv)| gv / xv).collect(),
                );
                self.accumulate(grads, *a, &da);
            }
            Op::Softplus(a) => {
                let x = val(*a);
                let da = Tensor::new(
                    g.rows,
                    g.cols,
                    g.data.iter().zip(&x.data).map(|(&gv, &xv)| gv * sigmoid(xv)).collect(),
                );
                self.accumulate(grads, *a, &da);
            }
            Op::Square(a) => {
                let x = val(*a);
                let da = Tensor::new(
                    g.rows,
                    g.cols,
                    g.data.iter().zip(&x.data).map(|(&gv, &xv)| 2.0 * gv * xv).collect(),
                );
                self.accumulate(grads, *a, &da);
            }
            Op::Neg(a) => {
                let da = Tensor::new(g.rows, g.cols, g.data.iter().map(|&v| -v).collect());
                self.accumulate(grads, *a, &da);
            }
            Op::Scale(a, c) => {
                let da = Tensor::new(g.rows, g.cols, g.data.iter().map(|&v| c * v).collect());
                self.accumulate(grads, *a, &da);
            }
            Op::AddScalar(a, _) => {
                self.accumulate(grads, *a, g);
            }
            Op::SumAll(a) => {
                let x = val(*a);
                let da = Tensor::new(x.rows, x.cols, vec![g.item(); x.rows * x.cols]);
                self.accumulate(grads, *a, &da);
            }
            Op::MeanAll(a) => {
                let x = val(*a);
                let c = g.item() / (x.rows * x.cols) as f64;
                let da = Tensor::new(x.rows, x.cols, vec![c; x.rows * x.cols]);
                self.accumulate(grads, *a, &da);
            }
            Op::SumRows(a) => {
                let x = val(*a);
                let mut da = Tensor::zeros(x.rows, x.cols);
                for i in 0..x.rows {
                    for j in 0..x.cols {
                        da.data[i * x.cols + j] = g.data[i];
                    }
                }
                self.accumulate(grads, *a, &da);
            }
            Op::CumsumRows(a) => {
                // d/dx_j sum over k >= j of g_k: reverse cumulative sum.
                let x = val(*a);
                let mut da = Tensor::zeros(x.rows, x.cols);
                for i in 0..x.rows {
                    let mut acc = 0.0;
                    for j in (0..x.cols).rev() {
                        acc += g.data[i * x.cols + j];
                        da.data[i * x.cols + j] = acc;
                    }
                }
                self.accumulate(grads, *a, &da);
            }
            Op::SoftmaxRows(a) => {
                let y = &self.nodes[id].value;
                let mut da = Tensor::zeros(y.rows, y.cols);
                for i in 0..y.rows {
                    let yrow = &y.data[i * y.cols..(i + 1) * y.cols];
                    let grow = &g.data[i * y.cols..(i + 1) * y.cols];
                    let dot: f64 = yrow.iter().zip(grow).map(|(&yv, &gv)| yv * gv).sum();
                    for j in 0..y.cols {
                        da.data[i * y.cols + j] = yrow[j] * (grow[j] - dot);
                    }
                }
                self.accumulate(grads, *a, &da);
            }
            Op::LogSumExpRows(a) => {
                let x = val(*a);
                let y = &self.nodes[id].value;
                let mut da = Tensor::zeros(x.rows, x.cols);
                for i in 0..x.rows {
                    for j in 0..x.cols {
                        da.data[i * x.cols + j] =
                            g.data[i] * (x.data[i * x.cols + j] - y.data[i]).exp();
                    }
                }
                self.accumulate(grads, *a, &da);
            }
            Op::Concat2(a, b) => {
                let (x, y) = (val(*a), val(*b));
                if self.nodes[*a].needs_grad {
                    let mut da = Tensor::zeros(x.rows, x.cols);
                    for i in 0..x.rows {
                        da.data[i * x.cols..(i + 1) * x.cols]
                            .copy_from_slice(&g.data[i * g.cols..i * g.cols + x.cols]);
                    }
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*b].needs_grad {
                    let mut db = Tensor::zeros(y.rows, y.cols);
                    for i in 0..y.rows {
                        db.data[i * y.cols..(i + 1) * y.cols]
                            .copy_from_slice(&g.data[i * g.cols + x.cols..(i + 1) * g.cols]);
                    }
                    self.accumulate(grads, *b, &db);
                }
            }
            Op::SliceCols(a, from, _to) => {
                let x = val(*a);
                let mut da = Tensor::zeros(x.rows, x.cols);
                for i in 0..x.rows {
                    for j in 0..g.cols {
                        da.data[i * x.cols + from + j] = g.data[i * g.cols + j];
                    }
                }
                self.accumulate(grads, *a, &da);
            }
            Op::GatherCols(a, idx) => {
                let x = val(*a);
                let mut da = Tensor::zeros(x.rows, x.cols);
                for (i, &j) in idx.iter().enumerate() {
                    da.data[i * x.cols + j] = g.data[i];
                }
                self.accumulate(grads, *a, &da);
            }
            Op::Dot(a, b) => {
                let gv = g.item();
                if self.nodes[*a].needs_grad {
                    let y = val(*b);
                    let da = Tensor::new(y.rows, y.cols, y.data.iter().map(|&v| gv * v).collect());
                    self.accumulate(grads, *a, &da);
                }
                if self.nodes[*b].needs_grad {
                    let x = val(*a);
                    let db = Tensor::new(x.rows, x.cols, x.data.iter().map(|&v| gv * v).collect());
                    self.accumulate(grads, *b, &db);
                }
            }
        }
    }
}

/// Gradients produced by a backward pass.
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn get(&self, id: NodeId) -> Option<&Tensor> {
        self.grads.get(id).and_then(|g| g.as_ref())
    }
}

pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

//! Reverse-mode differentiation over a fixed operation vocabulary.
//!
//! A [`Tape`] records forward values eagerly; [`Tape::backward`] replays the
//! entries in reverse and accumulates gradients. The vocabulary is exactly
//! what the model needs; there is no general expression graph.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor::matrix::{
    add, aggregate, concat_cols, edge_aggregate, matmul, matmul_nt, matmul_tn, mul_mask, relu_map,
    row_gather, scale, tanh_map, Matrix,
};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    Leaf,
    MatMul(Var, Var),
    Add(Var, Var),
    Scale(Var, f64),
    Tanh(Var),
    Relu(Var),
    ConcatCols(Var, Var),
    RowGather(Var, Vec<usize>),
    Aggregate {
        z: Var,
        adj: Arc<Vec<Vec<usize>>>,
        beta: Arc<Vec<f64>>,
    },
    EdgeAggregate {
        z: Var,
        endpoints: Arc<Vec<(u32, u32)>>,
        num_points: usize,
        beta: Arc<Vec<f64>>,
    },
    MulMask(Var, Arc<Vec<f64>>),
}

struct Entry {
    op: Op,
    value: Matrix,
}

/// Forward tape; create one per forward pass.
#[derive(Default)]
pub struct Tape {
    entries: Vec<Entry>,
}

impl Tape {
    pub fn new() -> Tape {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Value of a recorded variable.
    pub fn value(&self, v: Var) -> &Matrix {
        &self.entries[v.0].value
    }

    fn push(&mut self, op: Op, value: Matrix) -> Var {
        self.entries.push(Entry { op, value });
        Var(self.entries.len() - 1)
    }

    /// Records an input (constant or parameter copy).
    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(Op::Leaf, value)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = matmul(self.value(a), self.value(b))?;
        Ok(self.push(Op::MatMul(a, b), value))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = add(self.value(a), self.value(b))?;
        Ok(self.push(Op::Add(a, b), value))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Result<Var> {
        let value = scale(self.value(a), c)?;
        Ok(self.push(Op::Scale(a, c), value))
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        let value = tanh_map(self.value(a))?;
        Ok(self.push(Op::Tanh(a), value))
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        let value = relu_map(self.value(a))?;
        Ok(self.push(Op::Relu(a), value))
    }

    pub fn concat_cols(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = concat_cols(self.value(a), self.value(b))?;
        Ok(self.push(Op::ConcatCols(a, b), value))
    }

    pub fn row_gather(&mut self, a: Var, indices: Vec<usize>) -> Result<Var> {
        let value = row_gather(self.value(a), &indices)?;
        Ok(self.push(Op::RowGather(a, indices), value))
    }

    pub fn aggregate(&mut self, z: Var, adj: Arc<Vec<Vec<usize>>>, beta: Arc<Vec<f64>>) -> Result<Var> {
        let value = aggregate(&adj, &beta, self.value(z))?;
        Ok(self.push(Op::Aggregate { z, adj, beta }, value))
    }

    pub fn edge_aggregate(
        &mut self,
        z: Var,
        endpoints: Arc<Vec<(u32, u32)>>,
        num_points: usize,
        beta: Arc<Vec<f64>>,
    ) -> Result<Var> {
        let value = edge_aggregate(&endpoints, num_points, &beta, self.value(z))?;
        Ok(self.push(
            Op::EdgeAggregate {
                z,
                endpoints,
                num_points,
                beta,
            },
            value,
        ))
    }

    pub fn mul_mask(&mut self, a: Var, mask: Arc<Vec<f64>>) -> Result<Var> {
        let value = mul_mask(self.value(a), &mask)?;
        Ok(self.push(Op::MulMask(a, mask), value))
    }

    /// Accumulates `d(loss)/d(entry)` for every entry that `output` depends
    /// on, given the gradient of the loss with respect to `output`.
    pub fn backward(&self, output: Var, output_grad: Matrix) -> Result<Gradients> {
        if self.entries.is_empty() {
            return Err(Error::BackwardWithoutForward);
        }
        if output.0 >= self.entries.len() {
            return Err(Error::BackwardWithoutForward);
        }
        let out_value = self.value(output);
        if !out_value.same_shape(&output_grad) {
            return Err(Error::ShapeMismatch {
                op: "backward seed",
                lhs: out_value.shape_str(),
                rhs: output_grad.shape_str(),
            });
        }
        let mut grads: Vec<Option<Matrix>> = (0..self.entries.len()).map(|_| None).collect();
        grads[output.0] = Some(output_grad);

        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else {
                continue;
            };
            match &self.entries[idx].op {
                Op::Leaf => {
                    grads[idx] = Some(g);
                    continue;
                }
                Op::MatMul(a, b) => {
                    let da = matmul_nt(&g, self.value(*b))?;
                    let db = matmul_tn(self.value(*a), &g)?;
                    accumulate(&mut grads, a.0, da)?;
                    accumulate(&mut grads, b.0, db)?;
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, a.0, g.clone())?;
                    accumulate(&mut grads, b.0, g)?;
                }
                Op::Scale(a, c) => {
                    let mut da = g;
                    da.scale_assign(*c);
                    accumulate(&mut grads, a.0, da)?;
                }
                Op::Tanh(a) => {
                    let y = &self.entries[idx].value;
                    let mut da = g;
                    for (d, &yi) in da.data_mut().iter_mut().zip(y.data()) {
                        *d *= 1.0 - yi * yi;
                    }
                    accumulate(&mut grads, a.0, da)?;
                }
                Op::Relu(a) => {
                    let y = &self.entries[idx].value;
                    let mut da = g;
                    for (d, &yi) in da.data_mut().iter_mut().zip(y.data()) {
                        if yi <= 0.0 {
                            *d = 0.0;
                        }
                    }
                    accumulate(&mut grads, a.0, da)?;
                }
                Op::ConcatCols(a, b) => {
                    let (ca, cb) = (self.value(*a).cols(), self.value(*b).cols());
                    let rows = g.rows();
                    let mut da = Matrix::zeros(rows, ca);
                    let mut db = Matrix::zeros(rows, cb);
                    for i in 0..rows {
                        da.row_mut(i).copy_from_slice(&g.row(i)[..ca]);
                        db.row_mut(i).copy_from_slice(&g.row(i)[ca..]);
                    }
                    accumulate(&mut grads, a.0, da)?;
                    accumulate(&mut grads, b.0, db)?;
                }
                Op::RowGather(a, indices) => {
                    let src = self.value(*a);
                    let mut da = Matrix::zeros(src.rows(), src.cols());
                    for (k, &i) in indices.iter().enumerate() {
                        let grow = g.row(k);
                        let drow = da.row_mut(i);
                        for (d, &x) in drow.iter_mut().zip(grow) {
                            *d += x;
                        }
                    }
                    accumulate(&mut grads, a.0, da)?;
                }
                Op::Aggregate { z, adj, beta } => {
                    // out_v = z_v + beta_v Σ_{u∈N(v)} z_u
                    // dz_w = g_w + Σ_{v∈N(w)} beta_v g_v
                    let mut dz = g.clone();
                    let cols = g.cols();
                    for w in 0..adj.len() {
                        let drow = &mut dz.data_mut()[w * cols..(w + 1) * cols];
                        for &v in &adj[w] {
                            let bv = beta[v];
                            let grow = &g.data()[v * cols..(v + 1) * cols];
                            for (d, &x) in drow.iter_mut().zip(grow) {
                                *d += bv * x;
                            }
                        }
                    }
                    accumulate(&mut grads, z.0, dz)?;
                }
                Op::EdgeAggregate {
                    z,
                    endpoints,
                    num_points,
                    beta,
                } => {
                    // dz_e = g_e (1 - 2 beta_e) + T_a + T_b, where
                    // T_w = Σ_{e'∋w} beta_{e'} g_{e'}.
                    let cols = g.cols();
                    let mut t = vec![0.0; num_points * cols];
                    for (e, &(a, b)) in endpoints.iter().enumerate() {
                        let be = beta[e];
                        let grow = g.row(e);
                        let (a, b) = (a as usize, b as usize);
                        for (s, &x) in t[a * cols..(a + 1) * cols].iter_mut().zip(grow) {
                            *s += be * x;
                        }
                        for (s, &x) in t[b * cols..(b + 1) * cols].iter_mut().zip(grow) {
                            *s += be * x;
                        }
                    }
                    let mut dz = Matrix::zeros(g.rows(), cols);
                    for (e, &(a, b)) in endpoints.iter().enumerate() {
                        let be = beta[e];
                        let grow = g.row(e);
                        let (a, b) = (a as usize, b as usize);
                        let ta = &t[a * cols..(a + 1) * cols];
                        let tb = &t[b * cols..(b + 1) * cols];
                        let drow = dz.row_mut(e);
                        for j in 0..cols {
                            drow[j] = grow[j] * (1.0 - 2.0 * be) + ta[j] + tb[j];
                        }
                    }
                    accumulate(&mut grads, z.0, dz)?;
                }
                Op::MulMask(a, mask) => {
                    let mut da = g;
                    for (d, &m) in da.data_mut().iter_mut().zip(mask.iter()) {
                        *d *= m;
                    }
                    accumulate(&mut grads, a.0, da)?;
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Matrix>], idx: usize, delta: Matrix) -> Result<()> {
    match &mut grads[idx] {
        Some(g) => g.add_assign(&delta),
        slot @ None => {
            *slot = Some(delta);
            Ok(())
        }
    }
}

/// Gradients produced by [`Tape::backward`], addressed by [`Var`].
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    /// Gradient for `v`; `None` means the output did not depend on it
    /// (i.e. the gradient is identically zero).
    pub fn get(&self, v: Var) -> Option<&Matrix> {
        self.grads.get(v.0).and_then(Option::as_ref)
    }

    pub fn take(&mut self, v: Var) -> Option<Matrix> {
        self.grads.get_mut(v.0).and_then(Option::take)
    }
}

/// Mean-reduced binary cross-entropy over row-wise softmax logits.
///
/// `logits` is `k x 2`, one row per sample; `labels` holds the matching 0/1
/// classes. Returns the loss and its analytic gradient with respect to the
/// logits (already divided by `k`).
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[u8]) -> Result<(f64, Matrix)> {
    if logits.rows() == 0 {
        return Err(Error::EmptyBatch);
    }
    if logits.cols() != 2 || logits.rows() != labels.len() {
        return Err(Error::ShapeMismatch {
            op: "softmax_cross_entropy",
            lhs: logits.shape_str(),
            rhs: format!("{} labels x 2", labels.len()),
        });
    }
    logits.ensure_finite("softmax_cross_entropy")?;
    let k = logits.rows();
    let mut grad = Matrix::zeros(k, 2);
    let mut loss = 0.0;
    let inv_k = 1.0 / k as f64;
    for i in 0..k {
        let y = labels[i];
        if y > 1 {
            return Err(Error::config(format!("label {y} is not binary")));
        }
        let row = logits.row(i);
        let m = row[0].max(row[1]);
        let lse = m + ((row[0] - m).exp() + (row[1] - m).exp()).ln();
        loss += (lse - row[y as usize]) * inv_k;
        let p0 = (row[0] - lse).exp();
        let p1 = (row[1] - lse).exp();
        grad.set(i, 0, (p0 - if y == 0 { 1.0 } else { 0.0 }) * inv_k);
        grad.set(i, 1, (p1 - if y == 1 { 1.0 } else { 0.0 }) * inv_k);
    }
    Ok((loss, grad))
}

/// Softmax probability of class 1 for a single logit row.
pub fn positive_probability(logits: &[f64]) -> f64 {
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    e1 / (e0 + e1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backward_without_forward_is_rejected() {
        let tape = Tape::new();
        assert!(matches!(
            tape.backward(Var(0), Matrix::zeros(1, 1)),
            Err(Error::BackwardWithoutForward)
        ));
    }

    #[test]
    fn unused_parameter_has_zero_gradient() {
        let mut tape = Tape::new();
        let x = tape.leaf(Matrix::from_vec(1, 2, vec![1.0, 2.0]).unwrap());
        let unused = tape.leaf(Matrix::from_vec(1, 2, vec![5.0, 5.0]).unwrap());
        let y = tape.scale(x, 3.0).unwrap();
        let grads = tape.backward(y, Matrix::from_vec(1, 2, vec![1.0, 1.0]).unwrap()).unwrap();
        assert!(grads.get(unused).is_none());
        assert_eq!(grads.get(x).unwrap().data(), &[3.0, 3.0]);
    }

    #[test]
    fn reused_parameter_gradients_sum() {
        // y = x + x  =>  dy/dx = 2
        let mut tape = Tape::new();
        let x = tape.leaf(Matrix::from_vec(1, 1, vec![4.0]).unwrap());
        let y = tape.add(x, x).unwrap();
        let grads = tape.backward(y, Matrix::from_vec(1, 1, vec![1.0]).unwrap()).unwrap();
        assert_eq!(grads.get(x).unwrap().data(), &[2.0]);
    }

    #[test]
    fn matmul_backward_matches_outer_structure() {
        // loss = sum(W x): dW = 1 xᵀ structure.
        let mut tape = Tape::new();
        let w = tape.leaf(Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap());
        let x = tape.leaf(Matrix::from_vec(2, 1, vec![5.0, 7.0]).unwrap());
        let y = tape.matmul(w, x).unwrap();
        let grads = tape.backward(y, Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(grads.get(w).unwrap().data(), &[5.0, 7.0, 5.0, 7.0]);
        assert_eq!(grads.get(x).unwrap().data(), &[1.0 + 3.0, 2.0 + 4.0]);
    }

    #[test]
    fn cross_entropy_perfect_prediction_tends_to_zero() {
        let logits = Matrix::from_vec(2, 2, vec![30.0, -30.0, -30.0, 30.0]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[0, 1]).unwrap();
        assert!(loss < 1e-12, "loss = {loss}");
    }

    #[test]
    fn cross_entropy_uniform_is_ln2() {
        let logits = Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        let (loss, _) = softmax_cross_entropy(&logits, &[1]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_rejects_empty_batch() {
        let logits = Matrix::zeros(0, 2);
        assert!(matches!(
            softmax_cross_entropy(&logits, &[]),
            Err(Error::EmptyBatch)
        ));
    }

    #[test]
    fn cross_entropy_gradient_matches_finite_differences() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let labels: Vec<u8> = (0..5).map(|_| rng.gen_range(0..2u8)).collect();
        let base: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let logits = Matrix::from_vec(5, 2, base.clone()).unwrap();
        let (_, grad) = softmax_cross_entropy(&logits, &labels).unwrap();
        let eps = 1e-6;
        for i in 0..10 {
            let mut plus = base.clone();
            plus[i] += eps;
            let mut minus = base.clone();
            minus[i] -= eps;
            let (lp, _) =
                softmax_cross_entropy(&Matrix::from_vec(5, 2, plus).unwrap(), &labels).unwrap();
            let (lm, _) =
                softmax_cross_entropy(&Matrix::from_vec(5, 2, minus).unwrap(), &labels).unwrap();
            let numeric = (lp - lm) / (2.0 * eps);
            let analytic = grad.data()[i];
            let rel = (numeric - analytic).abs() / analytic.abs().max(1e-8);
            assert!(rel < 1e-6, "entry {i}: numeric {numeric} analytic {analytic}");
        }
    }
}

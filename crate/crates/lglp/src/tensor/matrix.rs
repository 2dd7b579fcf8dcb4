//! Dense row-major matrix storage and the forward operations.
//!
//! Every operation validates shapes and rejects non-finite inputs at the
//! boundary; results are exact dense computations with a fixed per-row
//! summation order, so outputs are bit-deterministic.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major data; rejects length mismatches and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "from_vec",
                lhs: format!("{rows}x{cols}"),
                rhs: format!("len {}", data.len()),
            });
        }
        let m = Matrix { rows, cols, data };
        m.ensure_finite("from_vec")?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::AttrWidth {
                    row: i,
                    got: r.len(),
                    expected: cols,
                });
            }
            data.extend_from_slice(r);
        }
        Matrix::from_vec(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    pub fn same_shape(&self, other: &Matrix) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Adds `other` elementwise in place.
    pub fn add_assign(&mut self, other: &Matrix) -> Result<()> {
        if !self.same_shape(other) {
            return Err(shape_err("add_assign", self, other));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    pub fn scale_assign(&mut self, c: f64) {
        for a in &mut self.data {
            *a *= c;
        }
    }

    pub fn fill(&mut self, x: f64) {
        self.data.iter_mut().for_each(|a| *a = x);
    }

    pub(crate) fn ensure_finite(&self, op: &'static str) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(op))
        }
    }
}

fn shape_err(op: &'static str, a: &Matrix, b: &Matrix) -> Error {
    Error::ShapeMismatch {
        op,
        lhs: a.shape_str(),
        rhs: b.shape_str(),
    }
}

/// `A · B`.
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(shape_err("matmul", a, b));
    }
    a.ensure_finite("matmul lhs")?;
    b.ensure_finite("matmul rhs")?;
    let mut out = Matrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = out.row_mut(i);
        for (k, &aik) in arow.iter().enumerate() {
            if aik != 0.0 {
                let brow = b.row(k);
                for (o, &bkj) in orow.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
    }
    Ok(out)
}

/// `A · Bᵀ`, used by backward passes.
pub(crate) fn matmul_nt(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.cols {
        return Err(shape_err("matmul_nt", a, b));
    }
    let mut out = Matrix::zeros(a.rows, b.rows);
    for i in 0..a.rows {
        let arow = a.row(i);
        for j in 0..b.rows {
            let brow = b.row(j);
            let mut acc = 0.0;
            for (x, y) in arow.iter().zip(brow) {
                acc += x * y;
            }
            out.data[i * b.rows + j] = acc;
        }
    }
    Ok(out)
}

/// `Aᵀ · B`, used by backward passes.
pub(crate) fn matmul_tn(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(shape_err("matmul_tn", a, b));
    }
    let mut out = Matrix::zeros(a.cols, b.cols);
    for i in 0..a.rows {
        let arow = a.row(i);
        let brow = b.row(i);
        for (k, &aik) in arow.iter().enumerate() {
            if aik != 0.0 {
                let orow = out.row_mut(k);
                for (o, &bij) in orow.iter_mut().zip(brow) {
                    *o += aik * bij;
                }
            }
        }
    }
    Ok(out)
}

/// Elementwise `A + B`.
pub fn add(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !a.same_shape(b) {
        return Err(shape_err("add", a, b));
    }
    a.ensure_finite("add lhs")?;
    b.ensure_finite("add rhs")?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

/// `c · A`.
pub fn scale(a: &Matrix, c: f64) -> Result<Matrix> {
    a.ensure_finite("scale")?;
    if !c.is_finite() {
        return Err(Error::NonFinite("scale factor"));
    }
    let data = a.data.iter().map(|x| c * x).collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

/// Elementwise `tanh(A)`.
pub fn tanh_map(a: &Matrix) -> Result<Matrix> {
    a.ensure_finite("tanh")?;
    let data = a.data.iter().map(|x| x.tanh()).collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

/// Elementwise `max(A, 0)`.
pub fn relu_map(a: &Matrix) -> Result<Matrix> {
    a.ensure_finite("relu")?;
    let data = a.data.iter().map(|x| x.max(0.0)).collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

/// Horizontal concatenation `[A | B]` (same row count).
pub fn concat_cols(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(shape_err("concat_cols", a, b));
    }
    a.ensure_finite("concat_cols lhs")?;
    b.ensure_finite("concat_cols rhs")?;
    let cols = a.cols + b.cols;
    let mut data = Vec::with_capacity(a.rows * cols);
    for i in 0..a.rows {
        data.extend_from_slice(a.row(i));
        data.extend_from_slice(b.row(i));
    }
    Ok(Matrix {
        rows: a.rows,
        cols,
        data,
    })
}

/// Gathers the given rows of `A` into a new matrix, in index order.
pub fn row_gather(a: &Matrix, indices: &[usize]) -> Result<Matrix> {
    a.ensure_finite("row_gather")?;
    let mut data = Vec::with_capacity(indices.len() * a.cols);
    for &i in indices {
        if i >= a.rows {
            return Err(Error::NodeOutOfRange { id: i, n: a.rows });
        }
        data.extend_from_slice(a.row(i));
    }
    Ok(Matrix {
        rows: indices.len(),
        cols: a.cols,
        data,
    })
}

/// Self-plus-weighted-neighbor-sum aggregation over an adjacency list:
/// `out_v = Z_v + beta_v · Σ_{u ∈ adj[v]} Z_u`.
pub fn aggregate(adj: &[Vec<usize>], beta: &[f64], z: &Matrix) -> Result<Matrix> {
    if adj.len() != z.rows || beta.len() != z.rows {
        return Err(Error::ShapeMismatch {
            op: "aggregate",
            lhs: format!("adj {} / beta {}", adj.len(), beta.len()),
            rhs: z.shape_str(),
        });
    }
    z.ensure_finite("aggregate")?;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("aggregate beta"));
    }
    let mut out = z.clone();
    for v in 0..z.rows {
        let bv = beta[v];
        for &u in &adj[v] {
            if u >= z.rows {
                return Err(Error::NodeOutOfRange { id: u, n: z.rows });
            }
        }
        let orow = out.row_mut(v);
        for &u in &adj[v] {
            let zrow = &z.data[u * z.cols..(u + 1) * z.cols];
            for (o, &x) in orow.iter_mut().zip(zrow) {
                *o += bv * x;
            }
        }
    }
    Ok(out)
}

/// Equivalent of [`aggregate`] for a line graph given only the incidence
/// structure: row `e` corresponds to an edge `(a,b)` of the underlying graph,
/// and its line-graph neighbors are exactly the other rows sharing endpoint
/// `a` or `b`. Computed via per-endpoint partial sums in
/// `O((rows + num_points) · cols)` instead of touching every neighbor pair.
pub fn edge_aggregate(
    endpoints: &[(u32, u32)],
    num_points: usize,
    beta: &[f64],
    z: &Matrix,
) -> Result<Matrix> {
    if endpoints.len() != z.rows || beta.len() != z.rows {
        return Err(Error::ShapeMismatch {
            op: "edge_aggregate",
            lhs: format!("endpoints {} / beta {}", endpoints.len(), beta.len()),
            rhs: z.shape_str(),
        });
    }
    z.ensure_finite("edge_aggregate")?;
    let cols = z.cols;
    let mut sums = vec![0.0; num_points * cols];
    for (e, &(a, b)) in endpoints.iter().enumerate() {
        let (a, b) = (a as usize, b as usize);
        if a >= num_points || b >= num_points {
            return Err(Error::NodeOutOfRange {
                id: a.max(b),
                n: num_points,
            });
        }
        let zrow = z.row(e);
        for (s, &x) in sums[a * cols..(a + 1) * cols].iter_mut().zip(zrow) {
            *s += x;
        }
        for (s, &x) in sums[b * cols..(b + 1) * cols].iter_mut().zip(zrow) {
            *s += x;
        }
    }
    let mut out = Matrix::zeros(z.rows, cols);
    for (e, &(a, b)) in endpoints.iter().enumerate() {
        let (a, b) = (a as usize, b as usize);
        let bv = beta[e];
        let zrow = z.row(e);
        let sa = &sums[a * cols..(a + 1) * cols];
        let sb = &sums[b * cols..(b + 1) * cols];
        let orow = out.row_mut(e);
        for j in 0..cols {
            // z_e + beta_e * (S_a + S_b - 2 z_e): the edge itself appears in
            // both endpoint sums.
            orow[j] = zrow[j] + bv * (sa[j] + sb[j] - 2.0 * zrow[j]);
        }
    }
    Ok(out)
}

/// Elementwise product with a constant mask (dropout support).
pub fn mul_mask(a: &Matrix, mask: &[f64]) -> Result<Matrix> {
    if mask.len() != a.data.len() {
        return Err(Error::ShapeMismatch {
            op: "mul_mask",
            lhs: a.shape_str(),
            rhs: format!("mask len {}", mask.len()),
        });
    }
    a.ensure_finite("mul_mask")?;
    let data = a.data.iter().zip(mask).map(|(x, m)| x * m).collect();
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        data,
    })
}

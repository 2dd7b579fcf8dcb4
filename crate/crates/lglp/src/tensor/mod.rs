//! Minimal dense numeric core: row-major double-precision matrices, the
//! handful of differentiable operations the model needs, a reverse-mode
//! tape, and the Adam update.

mod autodiff;
mod matrix;
mod optim;

pub use autodiff::{positive_probability, softmax_cross_entropy, Gradients, Tape, Var};
pub use matrix::{
    add, aggregate, concat_cols, edge_aggregate, matmul, mul_mask, relu_map, row_gather, scale,
    tanh_map, Matrix,
};
pub use optim::{adam_step, AdamConfig, Param};

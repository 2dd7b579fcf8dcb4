//! Trainable parameters and the Adam update.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::matrix::Matrix;

/// A named trainable matrix with its gradient and Adam moment state.
#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub value: Matrix,
    pub grad: Matrix,
    moment1: Matrix,
    moment2: Matrix,
    steps: u64,
}

impl Param {
    pub fn new(name: impl Into<String>, value: Matrix) -> Param {
        let (r, c) = (value.rows(), value.cols());
        Param {
            name: name.into(),
            value,
            grad: Matrix::zeros(r, c),
            moment1: Matrix::zeros(r, c),
            moment2: Matrix::zeros(r, c),
            steps: 0,
        }
    }

    /// Glorot-uniform initialization with the row count as fan-in.
    pub fn glorot(name: impl Into<String>, rows: usize, cols: usize, rng: &mut impl Rng) -> Param {
        let limit = (6.0 / (rows + cols) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| rng.gen::<f64>() * 2.0 * limit - limit)
            .collect();
        Param::new(name, Matrix::from_vec(rows, cols, data).expect("finite init"))
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One Adam step with bias correction over all parameters; gradients are
/// zeroed afterwards.
pub fn adam_step(params: &mut [Param], cfg: &AdamConfig) -> Result<()> {
    if cfg.lr <= 0.0 || !cfg.lr.is_finite() {
        return Err(Error::BadLearningRate(cfg.lr));
    }
    if !(0.0..1.0).contains(&cfg.beta1) || !(0.0..1.0).contains(&cfg.beta2) {
        return Err(Error::config(format!(
            "Adam betas must lie in [0,1): got {} / {}",
            cfg.beta1, cfg.beta2
        )));
    }
    for p in params.iter_mut() {
        p.grad.ensure_finite("adam gradient")?;
        let t = p.steps + 1;
        let bc1 = 1.0 - cfg.beta1.powi(t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(t as i32);
        let n = p.value.data().len();
        for i in 0..n {
            let g = p.grad.data()[i];
            let m = cfg.beta1 * p.moment1.data()[i] + (1.0 - cfg.beta1) * g;
            let v = cfg.beta2 * p.moment2.data()[i] + (1.0 - cfg.beta2) * g * g;
            p.moment1.data_mut()[i] = m;
            p.moment2.data_mut()[i] = v;
            let m_hat = m / bc1;
            let v_hat = v / bc2;
            p.value.data_mut()[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
        }
        p.zero_grad();
        p.steps = t;
    }
    Ok(())
}

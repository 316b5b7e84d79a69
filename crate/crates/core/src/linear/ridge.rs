use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{BanditError, Result};

/// Regularised least squares `theta = (lambda I + sum a a^T)^-1 sum a r`,
/// maintained through rank-one Cholesky updates.
#[derive(Debug, Clone)]
pub struct RidgeState {
    lambda: f64,
    gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    b: DVector<f64>,
    theta_hat: DVector<f64>,
    count: usize,
}

impl RidgeState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(BanditError::invalid("ridge dimension must be positive"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(BanditError::invalid(format!("ridge lambda = {lambda} must be positive")));
        }
        let gram = DMatrix::identity(dim, dim) * lambda;
        let chol = Cholesky::new(gram.clone()).expect("lambda I is positive definite");
        Ok(Self {
            lambda,
            gram,
            chol,
            b: DVector::zeros(dim),
            theta_hat: DVector::zeros(dim),
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    /// The regularised Gram matrix `V`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn response(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn update(&mut self, action: &DVector<f64>, reward: f64) -> Result<()> {
        if action.len() != self.dim() {
            return Err(BanditError::invalid(format!(
                "action has dimension {}, ridge state has {}",
                action.len(),
                self.dim()
            )));
        }
        if !reward.is_finite() || action.iter().any(|x| !x.is_finite()) {
            return Err(BanditError::Numerical("non-finite ridge observation".into()));
        }
        self.gram.ger(1.0, action, action, 1.0);
        self.b.axpy(reward, action, 1.0);
        self.chol.rank_one_update(action, 1.0);
        if self.chol.l_dirty().diagonal().iter().any(|&x| !(x > 0.0)) {
            return Err(BanditError::Numerical("Gram matrix lost positive definiteness".into()));
        }
        self.theta_hat = self.chol.solve(&self.b);
        self.count += 1;
        Ok(())
    }

    /// `ln det V`.
    pub fn log_det(&self) -> f64 {
        self.chol.ln_determinant()
    }

    /// `ln(det V / lambda^d)`, zero before any observation.
    pub fn log_det_ratio(&self) -> f64 {
        (self.log_det() - self.dim() as f64 * self.lambda.ln()).max(0.0)
    }

    /// `||x||^2_{V^-1}`.
    pub fn inverse_norm_sq(&self, x: &DVector<f64>) -> f64 {
        self.chol.solve(x).dot(x).max(0.0)
    }

    /// `||x||^2_V`.
    pub fn norm_sq(&self, x: &DVector<f64>) -> f64 {
        (&self.gram * x).dot(x)
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.dim(), self.lambda).expect("parameters validated at construction");
    }
}

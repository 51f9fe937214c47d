//! Ridge accumulators for the least-squares estimates: covariance starts at
//! the identity and grows by rank-1 outer products, so it stays symmetric
//! positive definite and the normal equations always have a unique solution.

use nalgebra::{DMatrix, DVector};

use crate::error::{LtnError, Result};

#[derive(Debug, Clone)]
pub struct RidgeEstimator {
    covariance: DMatrix<f64>,
    reward: DVector<f64>,
    estimate: DVector<f64>,
    observations: usize,
}

impl RidgeEstimator {
    pub fn new(dim: usize) -> Self {
        Self {
            covariance: DMatrix::identity(dim, dim),
            reward: DVector::zeros(dim),
            estimate: DVector::zeros(dim),
            observations: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.reward.len()
    }

    pub fn observations(&self) -> usize {
        self.observations
    }

    /// Rank-1 update: covariance += x x^T, reward += y x.
    pub fn observe(&mut self, x: &DVector<f64>, y: f64) {
        debug_assert_eq!(x.len(), self.dim());
        self.covariance.ger(1.0, x, x, 1.0);
        self.reward.axpy(y, x, 1.0);
        self.observations += 1;
    }

    /// Solves the normal equations and stores the estimate.
    pub fn refresh(&mut self) -> Result<&DVector<f64>> {
        if self.dim() == 0 {
            return Ok(&self.estimate);
        }
        let chol = self
            .covariance
            .clone()
            .cholesky()
            .ok_or_else(|| LtnError::Config("ridge covariance not positive definite".into()))?;
        self.estimate = chol.solve(&self.reward);
        Ok(&self.estimate)
    }

    /// Estimate from the last refresh (zero vector before any refresh).
    pub fn estimate(&self) -> &DVector<f64> {
        &self.estimate
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn reward(&self) -> &DVector<f64> {
        &self.reward
    }

    /// ||M theta_hat - r|| for the stored estimate.
    pub fn normal_residual(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        (&self.covariance * &self.estimate - &self.reward).norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.covariance
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// The two accumulators of the LT-N learner: (M, r) for the edge-weight
/// parameter and (V, s) for the autonomy parameter.
#[derive(Debug, Clone)]
pub struct RidgeState {
    pub theta: RidgeEstimator,
    pub beta: RidgeEstimator,
}

impl RidgeState {
    pub fn new(theta_dim: usize, beta_dim: usize) -> Self {
        Self {
            theta: RidgeEstimator::new(theta_dim),
            beta: RidgeEstimator::new(beta_dim),
        }
    }
}

//! Multimode Gaussian states in the X = a + a†, Y = (a - a†)/i convention.
//!
//! Quadratures are interleaved as (X₁, Y₁, …, X_N, Y_N) and the vacuum has
//! unit variance on every quadrature, so every shot-noise limit is a plain
//! sum of unit variances.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::symplectic::SymplecticTransform;

/// Tolerance on covariance symmetry, |C - Cᵀ|∞.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lower bound on the smallest eigenvalue of cov + iΩ. Slightly negative to
/// absorb floating-point noise on the 8×8 – 12×12 problems we build.
pub const UNCERTAINTY_TOL: f64 = -1e-9;

/// Index of the amplitude quadrature X of `mode` in the interleaved layout.
#[inline]
pub fn x_index(mode: usize) -> usize {
    2 * mode
}

/// Index of the phase quadrature Y of `mode` in the interleaved layout.
#[inline]
pub fn y_index(mode: usize) -> usize {
    2 * mode + 1
}

/// The symplectic form Ω for `n_modes` modes: block-diagonal copies of
/// [[0, 1], [-1, 0]], matching the interleaved quadrature ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(x_index(m), y_index(m))] = 1.0;
        omega[(y_index(m), x_index(m))] = -1.0;
    }
    omega
}

/// Mean vector and covariance matrix of an N-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// The N-mode vacuum: zero mean, identity covariance.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::EmptyState);
        }
        Ok(Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Build a state from raw moments, enforcing symmetry and the
    /// uncertainty relation cov + iΩ ⪰ 0.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::EmptyState);
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "mean has length {dim} but covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Variance of the quadrature cosθ·X + sinθ·Y of `mode`.
    pub fn quadrature_variance(&self, mode: usize, angle: f64) -> Result<f64> {
        self.check_mode(mode)?;
        let (c, s) = (angle.cos(), angle.sin());
        let (ix, iy) = (x_index(mode), y_index(mode));
        Ok(c * c * self.cov[(ix, ix)] + 2.0 * c * s * self.cov[(ix, iy)] + s * s * self.cov[(iy, iy)])
    }

    /// Mean of the quadrature cosθ·X + sinθ·Y of `mode`.
    pub fn quadrature_mean(&self, mode: usize, angle: f64) -> Result<f64> {
        self.check_mode(mode)?;
        Ok(angle.cos() * self.mean[x_index(mode)] + angle.sin() * self.mean[y_index(mode)])
    }

    /// mean' = S·mean + shift, cov' = S·cov·Sᵀ.
    pub fn apply(&self, t: &SymplecticTransform) -> Result<Self> {
        let dim = self.mean.len();
        if t.matrix().nrows() != dim {
            return Err(Error::DimensionMismatch(format!(
                "transform acts on {} quadratures, state has {dim}",
                t.matrix().nrows()
            )));
        }
        let mean = t.matrix() * &self.mean + t.shift();
        let cov = t.matrix() * &self.cov * t.matrix().transpose();
        Ok(Self { mean, cov })
    }

    /// Reduced state on the selected modes, in the order given.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut seen = vec![false; self.n_modes()];
        for &m in modes {
            self.check_mode(m)?;
            if seen[m] {
                return Err(Error::DuplicateMode(m));
            }
            seen[m] = true;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [x_index(m), y_index(m)]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let mut cov = DMatrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                cov[(a, b)] = self.cov[(i, j)];
            }
        }
        Ok(Self { mean, cov })
    }

    /// Tensor product: `self` modes first, then `other` modes.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Self { mean, cov }
    }

    /// Shift the mean in place by a phase-space displacement.
    pub fn displace(&mut self, shift: &DVector<f64>) -> Result<()> {
        if shift.len() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "displacement has length {}, state has {} quadratures",
                shift.len(),
                self.mean.len()
            )));
        }
        self.mean += shift;
        Ok(())
    }

    /// det(cov); equals 1 for pure states and is preserved by shift-free
    /// symplectic transforms.
    pub fn purity_det(&self) -> f64 {
        self.cov.clone().determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix cov + iΩ. Nonnegative
    /// (up to tolerance) for physical states.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        let dim = self.mean.len();
        let omega = symplectic_form(self.n_modes());
        let herm = DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(self.cov[(i, j)], omega[(i, j)])
        });
        let eigs = herm.symmetric_eigenvalues();
        eigs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Check symmetry of the covariance and the uncertainty relation.
    pub fn validate(&self) -> Result<()> {
        let defect = symmetry_defect(&self.cov);
        if defect > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { defect });
        }
        let min_eig = self.min_uncertainty_eigenvalue();
        if min_eig < UNCERTAINTY_TOL {
            return Err(Error::UncertaintyViolated { min_eig });
        }
        Ok(())
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::ModeIndex {
                index: mode,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    pub(crate) fn from_parts_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { mean, cov }
    }
}

pub(crate) fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

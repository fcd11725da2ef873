use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GlueError, Result};

/// Relative asymmetry tolerated when a matrix is accepted as a symmetric form.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric bilinear form on cross-section tangent vectors, stored in
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymForm(DMatrix<f64>);

pub(crate) fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs() / scale);
        }
    }
    worst
}

impl SymForm {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(GlueError::DimensionMismatch(format!(
                "form must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let a = asymmetry(&m);
        if a > SYMMETRY_TOL {
            return Err(GlueError::NonSymmetric { asymmetry: a });
        }
        Ok(SymForm(m))
    }

    /// Wraps `m` without checking. Callers guarantee symmetry by construction.
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        SymForm(m)
    }

    pub fn zeros(dim: usize) -> Self {
        SymForm(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        SymForm(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn eval(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.0 * v))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.clone().cholesky().is_some()
    }

    /// Eigenvalues of the coordinate matrix in ascending order.
    pub fn eigenvalues_ascending(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues_ascending()[0]
    }

    /// Eigenvalues of `self` relative to the metric `metric`, i.e. of the
    /// endomorphism `metric^{-1} self`, ascending.
    pub fn relative_eigenvalues(&self, metric: &SymForm) -> Result<Vec<f64>> {
        let chol = metric
            .0
            .clone()
            .cholesky()
            .ok_or_else(|| GlueError::NotPositiveDefinite { coords: vec![] })?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| GlueError::NotPositiveDefinite { coords: vec![] })?;
        let mut sym = &l_inv * &self.0 * l_inv.transpose();
        sym = (&sym + sym.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }

    /// Determinant of the 2x2 restriction to span{u, v}.
    pub fn plane_det(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let uu = self.eval(u, u);
        let vv = self.eval(v, v);
        let uv = self.eval(u, v);
        uu * vv - uv * uv
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &DMatrix<f64>) -> SymForm {
        SymForm(self.0.component_mul(other))
    }

    pub fn max_abs_diff(&self, other: &SymForm) -> f64 {
        (&self.0 - &other.0).amax()
    }

    pub fn scale(&self, s: f64) -> SymForm {
        SymForm(&self.0 * s)
    }
}

impl std::ops::Add for &SymForm {
    type Output = SymForm;
    fn add(self, rhs: &SymForm) -> SymForm {
        SymForm(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &SymForm {
    type Output = SymForm;
    fn sub(self, rhs: &SymForm) -> SymForm {
        SymForm(&self.0 - &rhs.0)
    }
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::curvature::tensor::{curvature_at, CurvatureAtPoint, Riemann};
use crate::error::{GlueError, Result};
use crate::metric::sym_form::asymmetry;
use crate::metric::{Chart, Point};

/// Relative size of `|u ^ v|^2` below which a plane counts as degenerate.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-14;

/// Tolerance on `g(v, v) = 1` for inputs that must be unit vectors.
const UNIT_TOL: f64 = 1e-8;

pub fn ascending_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Sum of the `k` smallest eigenvalues of a symmetric operator. The
/// operator is `k`-positive exactly when the result is positive.
pub fn k_positive_sum(form: &DMatrix<f64>, k: usize) -> Result<f64> {
    if form.nrows() != form.ncols() {
        return Err(GlueError::DimensionMismatch(format!(
            "operator must be square, got {}x{}",
            form.nrows(),
            form.ncols()
        )));
    }
    if k == 0 || k > form.nrows() {
        return Err(GlueError::InvalidInput(format!(
            "k = {k} outside 1..={}",
            form.nrows()
        )));
    }
    let a = asymmetry(form);
    if a > 1e-10 {
        return Err(GlueError::NonSymmetric { asymmetry: a });
    }
    let sym = (form + form.transpose()) * 0.5;
    Ok(ascending_eigenvalues(&sym).iter().take(k).sum())
}

/// Columns form a `g`-orthonormal basis: `E^T g E = I`.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let chol = g.clone().cholesky()?;
    chol.l().transpose().try_inverse()
}

/// Orthonormal basis (columns) of the Euclidean complement of the unit
/// vector `w`, from the Householder reflection sending `w` to an axis.
pub(crate) fn complement_basis(w: &DVector<f64>) -> DMatrix<f64> {
    let n = w.len();
    let s = if w[n - 1] >= 0.0 { 1.0 } else { -1.0 };
    let mut u = w.clone();
    u[n - 1] += s;
    let norm2 = u.norm_squared();
    let h = DMatrix::identity(n, n) - (&u * u.transpose()) * (2.0 / norm2);
    h.columns(0, n - 1).into_owned()
}

pub fn sectional_from(curv: &CurvatureAtPoint, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let g = &curv.metric;
    let uu = u.dot(&(g * u));
    let vv = v.dot(&(g * v));
    let uv = u.dot(&(g * v));
    let area2 = uu * vv - uv * uv;
    if !(area2 > DEGENERATE_PLANE_TOL * uu * vv) {
        return Err(GlueError::DegeneratePlane { area2 });
    }
    Ok(curv.riemann.apply(u, v, v, u) / area2)
}

/// Sectional curvature `K(u, v) = R(u,v,v,u) / |u ^ v|^2` at `p`.
pub fn sectional(ch: &(impl Chart + ?Sized), p: &Point, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    sectional_from(&curvature_at(ch, p)?, u, v)
}

/// Jacobi operator `e -> R(e, v, v, .)` restricted to `v`-perp, in the
/// `g`-orthonormal basis of `v`-perp obtained by Gram-Schmidt from the
/// coordinate axes. `v` must be `g`-unit.
pub fn jacobi_from(curv: &CurvatureAtPoint, v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let g = &curv.metric;
    let n = g.nrows();
    let vv = v.dot(&(g * v));
    if (vv - 1.0).abs() > UNIT_TOL {
        return Err(GlueError::InvalidInput(format!("direction is not unit: g(v,v) = {vv}")));
    }
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    let mut candidates: Vec<DVector<f64>> = (0..n).map(|i| DVector::from_fn(n, |j, _| (i == j) as u8 as f64)).collect();
    // Process axes by decreasing distance from v so the dropped one is the
    // most nearly parallel.
    candidates.sort_by(|a, b| {
        let pa = a.dot(&(g * v)).abs() / a.dot(&(g * a)).sqrt();
        let pb = b.dot(&(g * v)).abs() / b.dot(&(g * b)).sqrt();
        pa.total_cmp(&pb)
    });
    for c in candidates {
        if basis.len() == n - 1 {
            break;
        }
        let mut e = &c - v * c.dot(&(g * v));
        for b in &basis {
            let proj = e.dot(&(g * b));
            e -= b * proj;
        }
        let norm2 = e.dot(&(g * &e));
        if norm2 > 1e-20 {
            basis.push(e / norm2.sqrt());
        }
    }
    let m = basis.len();
    let mut j = DMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let val = 0.5 * (curv.riemann.apply(&basis[a], v, v, &basis[b]) + curv.riemann.apply(&basis[b], v, v, &basis[a]));
            j[(a, b)] = val;
            j[(b, a)] = val;
        }
    }
    Ok(j)
}

pub fn jacobi_operator(ch: &(impl Chart + ?Sized), p: &Point, v: &DVector<f64>) -> Result<DMatrix<f64>> {
    jacobi_from(&curvature_at(ch, p)?, v)
}

/// Ricci endomorphism (one index raised) expressed in a `g`-orthonormal
/// frame, hence symmetric.
pub fn ricci_endomorphism(curv: &CurvatureAtPoint) -> Result<DMatrix<f64>> {
    let frame = orthonormal_frame(&curv.metric).ok_or_else(|| GlueError::NotPositiveDefinite {
        coords: curv.point.coords(),
    })?;
    let r = frame.transpose() * &curv.ricci * &frame;
    Ok((&r + r.transpose()) * 0.5)
}

/// Curvature expressed in a `g`-orthonormal frame, for fast sweeps over
/// unit directions.
pub struct FrameCurvature {
    pub frame: DMatrix<f64>,
    pub riemann: Riemann,
}

impl FrameCurvature {
    pub fn new(curv: &CurvatureAtPoint) -> Result<Self> {
        let frame = orthonormal_frame(&curv.metric).ok_or_else(|| GlueError::NotPositiveDefinite {
            coords: curv.point.coords(),
        })?;
        let riemann = curv.riemann.in_frame(&frame);
        Ok(FrameCurvature { frame, riemann })
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    /// Jacobi operator for the Euclidean unit vector `w` of frame
    /// components, on an orthonormal basis of `w`-perp.
    pub fn jacobi(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut full = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        v += self.riemann.get(i, a, b, j) * w[a] * w[b];
                    }
                }
                full[(i, j)] = v;
                full[(j, i)] = v;
            }
        }
        let basis = complement_basis(w);
        basis.transpose() * full * basis
    }

    pub fn ric_k(&self, w: &DVector<f64>, k: usize) -> f64 {
        ascending_eigenvalues(&self.jacobi(w)).iter().take(k).sum()
    }

    /// Coordinate tangent vector for frame components `w`.
    pub fn to_coordinates(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.frame * w
    }
}

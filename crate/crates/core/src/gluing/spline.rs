use nalgebra::DMatrix;

use crate::error::{GlueError, Result};
use crate::metric::{CollarMetric, CrossSection, Domain, SliceFamily};

/// Number of t-samples used to confirm the spline stays positive definite.
const DEFINITENESS_SAMPLES: usize = 201;

/// The cubic interpolation `g_t` on `[-eps, eps]` between `h1(-eps)` and
/// `h2(eps)` matching first derivatives at both ends.
///
/// With `A = h1(-eps)`, `B = h2(eps)`, `dA = h1'(-eps)`, `dB = h2'(eps)`
/// and `m = (B - A) / 2 eps`:
///
/// ```text
/// g_t = (t+eps)/(2eps) B - (t-eps)/(2eps) A
///     + (t-eps)^2 (t+eps)/(4eps^2) (dA - m)
///     + (t+eps)^2 (t-eps)/(4eps^2) (dB - m)
/// ```
#[derive(Debug, Clone)]
pub struct SplineFamily {
    h1: CollarMetric,
    h2: CollarMetric,
    eps: f64,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    /// `dA - m`
    c1: DMatrix<f64>,
    /// `dB - m`
    c2: DMatrix<f64>,
    slope: DMatrix<f64>,
}

/// Builds the spline family, checking that both collars reach `t = 0`
/// from `-+eps` and that the spline is positive definite on a sample.
pub fn spline_family(h1: &CollarMetric, h2: &CollarMetric, eps: f64) -> Result<SplineFamily> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(GlueError::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if h1.section() != h2.section() {
        return Err(GlueError::DimensionMismatch(format!(
            "collars live on different cross-sections ({:?} vs {:?})",
            h1.section(),
            h2.section()
        )));
    }
    h1.require_cover(-eps, 0.0)?;
    h2.require_cover(0.0, eps)?;
    let f = SplineFamily::new_unchecked(h1.clone(), h2.clone(), eps);
    f.check_definite()?;
    Ok(f)
}

impl SplineFamily {
    pub(crate) fn new_unchecked(h1: CollarMetric, h2: CollarMetric, eps: f64) -> Self {
        let [a, da, _] = h1.profile_jet(-eps);
        let [b, db, _] = h2.profile_jet(eps);
        let slope = (&b - &a) / (2.0 * eps);
        let c1 = &da - &slope;
        let c2 = &db - &slope;
        SplineFamily {
            h1,
            h2,
            eps,
            a,
            b,
            c1,
            c2,
            slope,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn h1(&self) -> &CollarMetric {
        &self.h1
    }

    pub fn h2(&self) -> &CollarMetric {
        &self.h2
    }

    fn check_definite(&self) -> Result<()> {
        // sigma is diagonal and positive, so definiteness of P * sigma at
        // any x is definiteness of the diagonal of the profile.
        let section = self.section();
        let x = section_witness(section);
        for i in 0..DEFINITENESS_SAMPLES {
            let t = -self.eps + 2.0 * self.eps * i as f64 / (DEFINITENESS_SAMPLES - 1) as f64;
            if !self.value(&x, t).is_positive_definite() {
                let mut coords = x.clone();
                coords.push(t);
                return Err(GlueError::NotPositiveDefinite { coords });
            }
        }
        Ok(())
    }
}

fn section_witness(section: &CrossSection) -> Vec<f64> {
    let d: Domain = section.domain();
    (0..d.dim()).map(|i| d.axis_nodes(i, 1)[0]).collect()
}

impl SliceFamily for SplineFamily {
    fn section(&self) -> &CrossSection {
        self.h1.section()
    }

    fn t_range(&self) -> (f64, f64) {
        (-self.eps, self.eps)
    }

    fn profile(&self, t: f64, order: usize) -> DMatrix<f64> {
        let e = self.eps;
        let e2 = e * e;
        let (tm, tp) = (t - e, t + e);
        match order {
            0 => {
                &self.b * (tp / (2.0 * e)) - &self.a * (tm / (2.0 * e))
                    + &self.c1 * (tm * tm * tp / (4.0 * e2))
                    + &self.c2 * (tp * tp * tm / (4.0 * e2))
            }
            1 => {
                let s = 2.0 * (t * t - e2);
                &self.slope + &self.c1 * ((s + tm * tm) / (4.0 * e2)) + &self.c2 * ((s + tp * tp) / (4.0 * e2))
            }
            2 => (&self.c1 + &self.c2) * (3.0 * t / (2.0 * e2)) + (&self.c2 - &self.c1) * (1.0 / (2.0 * e)),
            3 => (&self.c1 + &self.c2) * (3.0 / (2.0 * e2)),
            _ => DMatrix::zeros(self.a.nrows(), self.a.ncols()),
        }
    }
}

use nalgebra::{DMatrix, DVector};

use crate::error::{GlueError, Result};
use crate::metric::{check_in_domain, Chart, MetricJet, Point};

/// Christoffel symbols of the second kind, `Gamma^c_{ab}`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Gamma^c_{ab}`
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.data[(c * self.n + a) * self.n + b]
    }
}

/// Fully lowered Riemann tensor with `R(u,v,v,u) = K(u,v) |u ^ v|^2`.
#[derive(Debug, Clone)]
pub struct Riemann {
    n: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }

    /// `R(u, v, w, z)` for coordinate vectors.
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>, w: &DVector<f64>, z: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            if u[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                let ab = u[a] * v[b];
                if ab == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let abc = ab * w[c];
                    if abc == 0.0 {
                        continue;
                    }
                    for d in 0..n {
                        acc += abc * z[d] * self.get(a, b, c, d);
                    }
                }
            }
        }
        acc
    }

    /// Components in the frame whose columns are `frame`:
    /// `R'(i,j,k,l) = R(f_i, f_j, f_k, f_l)`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> Riemann {
        let n = self.n;
        let mut cur = self.data.clone();
        // Contract one slot at a time; after each pass the slot order rotates.
        for _ in 0..4 {
            let mut next = vec![0.0; n * n * n * n];
            for a in 0..n {
                for rest in 0..n * n * n {
                    let v = cur[a * n * n * n + rest];
                    if v == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        next[rest * n + i] += frame[(a, i)] * v;
                    }
                }
            }
            cur = next;
        }
        Riemann { n, data: cur }
    }
}

/// Curvature data at one chart point.
#[derive(Debug, Clone)]
pub struct CurvatureAtPoint {
    pub point: Point,
    pub metric: DMatrix<f64>,
    pub riemann: Riemann,
    /// Ricci form `Ric(u, u) = sum_a K(u, e_a)` for an orthonormal basis `e_a`.
    pub ricci: DMatrix<f64>,
}

fn inverse_metric(jet: &MetricJet, coords: &[f64]) -> Result<DMatrix<f64>> {
    jet.g
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| GlueError::NotPositiveDefinite {
            coords: coords.to_vec(),
        })
}

/// First-kind symbols `[d; a b] = 1/2 (d_a g_db + d_b g_da - d_d g_ab)`.
fn first_kind(jet: &MetricJet) -> Vec<f64> {
    let n = jet.dim();
    let mut out = vec![0.0; n * n * n];
    for d in 0..n {
        for a in 0..n {
            for b in 0..n {
                out[(d * n + a) * n + b] = 0.5 * (jet.dg[a][(d, b)] + jet.dg[b][(d, a)] - jet.dg[d][(a, b)]);
            }
        }
    }
    out
}

fn second_kind(ginv: &DMatrix<f64>, first: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n * n];
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                out[(c * n + a) * n + b] = (0..n).map(|d| ginv[(c, d)] * first[(d * n + a) * n + b]).sum();
            }
        }
    }
    out
}

pub fn christoffel_from_jet(jet: &MetricJet, coords: &[f64]) -> Result<Christoffel> {
    let n = jet.dim();
    let ginv = inverse_metric(jet, coords)?;
    let first = first_kind(jet);
    Ok(Christoffel {
        n,
        data: second_kind(&ginv, &first, n),
    })
}

/// Christoffel symbols of `ch` at `p`.
pub fn christoffel(ch: &(impl Chart + ?Sized), p: &Point) -> Result<Christoffel> {
    let coords = p.coords();
    check_in_domain(ch, &coords)?;
    christoffel_from_jet(&ch.jet_at(&coords), &coords)
}

/// Lowered Riemann tensor from a metric jet, using
/// `R_abcd = g_de R^e_abc` with
/// `R^e_abc = d_a G^e_bc - d_b G^e_ac + G^f_bc G^e_af - G^f_ac G^e_bf`.
pub fn riemann_from_jet(jet: &MetricJet, coords: &[f64]) -> Result<Riemann> {
    let n = jet.dim();
    let ginv = inverse_metric(jet, coords)?;
    let first = first_kind(jet);
    let second = second_kind(&ginv, &first, n);
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    // d_a [d; b c]
    let d_first = |a: usize, d: usize, b: usize, c: usize| {
        0.5 * (jet.ddg[a][b][(d, c)] + jet.ddg[a][c][(d, b)] - jet.ddg[a][d][(b, c)])
    };
    let mut data = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // g_de d_a G^e_bc = d_a [d;bc] - (d_a g_de) G^e_bc
                    let mut v = d_first(a, d, b, c) - d_first(b, d, a, c);
                    for e in 0..n {
                        v -= jet.dg[a][(d, e)] * second[idx(e, b, c)];
                        v += jet.dg[b][(d, e)] * second[idx(e, a, c)];
                    }
                    for f in 0..n {
                        v += second[idx(f, b, c)] * first[idx(d, a, f)];
                        v -= second[idx(f, a, c)] * first[idx(d, b, f)];
                    }
                    data[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    Ok(Riemann { n, data })
}

pub(crate) fn ricci_from(riemann: &Riemann, ginv: &DMatrix<f64>) -> DMatrix<f64> {
    let n = riemann.dim();
    let mut ric = DMatrix::zeros(n, n);
    for b in 0..n {
        for c in b..n {
            let mut v = 0.0;
            for a in 0..n {
                for d in 0..n {
                    v += ginv[(a, d)] * riemann.get(a, b, c, d);
                }
            }
            ric[(b, c)] = v;
            ric[(c, b)] = v;
        }
    }
    ric
}

pub fn curvature_from_jet(jet: &MetricJet, coords: &[f64]) -> Result<CurvatureAtPoint> {
    let riemann = riemann_from_jet(jet, coords)?;
    let ginv = inverse_metric(jet, coords)?;
    let ricci = ricci_from(&riemann, &ginv);
    Ok(CurvatureAtPoint {
        point: Point::from_coords(coords),
        metric: jet.g.clone(),
        riemann,
        ricci,
    })
}

/// Riemann and Ricci tensors of `ch` at `p`.
pub fn curvature_at(ch: &(impl Chart + ?Sized), p: &Point) -> Result<CurvatureAtPoint> {
    let coords = p.coords();
    check_in_domain(ch, &coords)?;
    curvature_from_jet(&ch.jet_at(&coords), &coords)
}

/// Curvature at raw coordinates, for charts whose first `dim - 1`
/// coordinates are not a collar cross-section (e.g. slice charts).
pub fn curvature_at_coords(ch: &(impl Chart + ?Sized), coords: &[f64]) -> Result<CurvatureAtPoint> {
    curvature_from_jet(&ch.jet_at(coords), coords)
}

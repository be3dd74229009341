//! The linear connection `nabla_v X = alpha^{-1}(d(alpha X)(v) + [A(v), alpha X])`
//! transported from the adjoint bundle, and the bracket `[u, v]_alpha`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::{central_partials, FdStep, FormValue};
use crate::gauge::{alpha_matrix, curvature, solve_alpha, LocalTriple};

fn square_alpha_at(t: &LocalTriple, x: &[f64]) -> Result<(FormValue, DMatrix<f64>)> {
    let (m, n) = (t.chart().dim(), t.algebra().dim());
    if m != n {
        return Err(GeomError::NonSquareAlpha {
            chart_dim: m,
            algebra_dim: n,
        });
    }
    let v = t.alpha().value(x)?;
    let mat = alpha_matrix(&v);
    Ok((v, mat))
}

/// `[u, v]_alpha = alpha^{-1}[alpha(u), alpha(v)]`.
pub fn bracket_alpha(t: &LocalTriple, u: &[f64], v: &[f64], x: &[f64]) -> Result<DVector<f64>> {
    let (value, mat) = square_alpha_at(t, x)?;
    let b = t.algebra().bracket(&value.apply(u), &value.apply(v))?;
    solve_alpha(&mat, &b)
}

/// Connection coefficients `Gamma^k_ij`, flattened as `(k * m + i) * m + j`,
/// with `nabla_{d_i} d_j = Gamma^k_ij d_k`.
pub fn christoffel(t: &LocalTriple, x: &[f64]) -> Result<Vec<f64>> {
    let (value, mat) = square_alpha_at(t, x)?;
    let m = value.dim();
    let a = t.connection().value(x)?;
    let d_alpha = t.alpha().form().partials(x)?;
    let alg = t.algebra();
    let lu = mat.clone().lu();
    let det = mat.determinant();
    if det.abs() <= crate::gauge::ADMISSIBILITY_THRESHOLD {
        return Err(GeomError::Singular { what: "alpha", det });
    }
    let mut out = vec![0.0; m * m * m];
    for i in 0..m {
        for j in 0..m {
            let mut xi = alg.bracket(a.one(i), value.one(j))?;
            for (o, d) in xi.iter_mut().zip(d_alpha[i].one(j)) {
                *o += d;
            }
            let g = lu.solve(&xi).ok_or(GeomError::Singular { what: "alpha", det })?;
            for k in 0..m {
                out[(k * m + i) * m + j] = g[k];
            }
        }
    }
    Ok(out)
}

/// One evaluation of the induced connection at a point. Tensor indices follow
/// `gamma[k][i][j] = Gamma^k_ij`, `torsion[k][i][j] = T^k_ij` and
/// `curvature[l][k][i][j] = R^l_kij` with `R(d_i, d_j) d_k = R^l_kij d_l`.
#[derive(Debug, Clone, Serialize)]
pub struct InducedConnectionSample {
    pub point: Vec<f64>,
    pub gamma: Vec<Vec<Vec<f64>>>,
    pub torsion: Vec<Vec<Vec<f64>>>,
    /// From finite differences of `Gamma`.
    pub curvature: Vec<Vec<Vec<Vec<f64>>>>,
    /// `alpha^{-1}[Omega(d_i, d_j), alpha(d_k)]`.
    pub curvature_alg: Vec<Vec<Vec<Vec<f64>>>>,
    /// `[[d_i, d_j]_alpha, d_k]_alpha`.
    pub curvature_bracket: Vec<Vec<Vec<Vec<f64>>>>,
}

impl InducedConnectionSample {
    pub fn max_torsion(&self) -> f64 {
        self.torsion.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |R - R_alg|` over all components.
    pub fn curvature_defect(&self) -> f64 {
        max_diff4(&self.curvature, &self.curvature_alg)
    }

    /// `max |R_alg - [[., .]_alpha, .]_alpha|`; zero for integrable triples.
    pub fn bracket_defect(&self) -> f64 {
        max_diff4(&self.curvature_alg, &self.curvature_bracket)
    }

    /// `max |R - [[., .]_alpha, .]_alpha|`.
    pub fn numeric_bracket_defect(&self) -> f64 {
        max_diff4(&self.curvature, &self.curvature_bracket)
    }
}

fn max_diff4(a: &[Vec<Vec<Vec<f64>>>], b: &[Vec<Vec<Vec<f64>>>]) -> f64 {
    a.iter()
        .flatten()
        .flatten()
        .flatten()
        .zip(b.iter().flatten().flatten().flatten())
        .fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}

fn tensor4(m: usize) -> Vec<Vec<Vec<Vec<f64>>>> {
    vec![vec![vec![vec![0.0; m]; m]; m]; m]
}

pub fn induced_connection(t: &LocalTriple, x: &[f64]) -> Result<InducedConnectionSample> {
    induced_connection_with_step(t, x, FdStep::default())
}

pub fn induced_connection_with_step(
    t: &LocalTriple,
    x: &[f64],
    step: FdStep,
) -> Result<InducedConnectionSample> {
    let chart = t.chart().clone();
    let m = chart.dim();
    let g = christoffel(t, x)?;
    let at = |k: usize, i: usize, j: usize| g[(k * m + i) * m + j];

    // Second pass: keep the whole nested stencil inside the chart.
    let steps: Vec<f64> = (0..m).map(|a| step.for_axis(&chart, a)).collect();
    for (axis, &h) in steps.iter().enumerate() {
        let (lo, hi) = chart.bounds()[axis];
        if x[axis] - 4.0 * h < lo || x[axis] + 4.0 * h > hi {
            return Err(GeomError::BoundaryProximity {
                point: x.to_vec(),
                axis,
                step: h,
            });
        }
    }
    let dg = central_partials(x, &steps, |p| christoffel(t, p))?;
    let dat = |axis: usize, k: usize, i: usize, j: usize| dg[axis][(k * m + i) * m + j];

    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    let mut torsion = gamma.clone();
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                gamma[k][i][j] = at(k, i, j);
                torsion[k][i][j] = at(k, i, j) - at(k, j, i);
            }
        }
    }

    let mut curv = tensor4(m);
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut r = dat(i, l, j, k) - dat(j, l, i, k);
                    for s in 0..m {
                        r += at(s, j, k) * at(l, i, s) - at(s, i, k) * at(l, j, s);
                    }
                    curv[l][k][i][j] = r;
                }
            }
        }
    }

    let (value, mat) = square_alpha_at(t, x)?;
    let omega = curvature(t.connection())?.value(x)?;
    let alg = t.algebra();
    let mut alg_curv = tensor4(m);
    let mut br_curv = tensor4(m);
    for i in 0..m {
        for j in 0..m {
            let uv = alg.bracket(value.one(i), value.one(j))?;
            for k in 0..m {
                let ra = solve_alpha(&mat, &alg.bracket(omega.two(i, j), value.one(k))?)?;
                let rb = solve_alpha(&mat, &alg.bracket(uv.as_slice(), value.one(k))?)?;
                for l in 0..m {
                    alg_curv[l][k][i][j] = ra[l];
                    br_curv[l][k][i][j] = rb[l];
                }
            }
        }
    }

    Ok(InducedConnectionSample {
        point: x.to_vec(),
        gamma,
        torsion,
        curvature: curv,
        curvature_alg: alg_curv,
        curvature_bracket: br_curv,
    })
}

/// `max |d_i g(d_a, d_b) - g(nabla_i d_a, d_b) - g(d_a, nabla_i d_b)|` for
/// `g = g_alpha`. Vanishes whenever the inner product is ad-invariant.
pub fn metric_parallelism_defect(t: &LocalTriple, x: &[f64]) -> Result<f64> {
    let m = t.chart().dim();
    let metric = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(super::alpha_metric(t, p)?.iter().copied().collect())
    };
    let g = super::alpha_metric(t, x)?;
    let dg = crate::fields::chart_partials(t.chart(), x, t.alpha().form().fd_step(), metric)?;
    let gam = christoffel(t, x)?;
    let at = |k: usize, i: usize, j: usize| gam[(k * m + i) * m + j];
    let mut worst = 0.0f64;
    for i in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut v = dg[i][a + b * m];
                for k in 0..m {
                    v -= at(k, i, a) * g[(k, b)] + at(k, i, b) * g[(a, k)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// `max |nabla_i [d_a, d_b]_alpha - [nabla_i d_a, d_b]_alpha - [d_a, nabla_i d_b]_alpha|`.
pub fn bracket_parallelism_defect(t: &LocalTriple, x: &[f64]) -> Result<f64> {
    let m = t.chart().dim();
    let unit = |a: usize| {
        let mut e = vec![0.0; m];
        e[a] = 1.0;
        e
    };
    let gam = christoffel(t, x)?;
    let at = |k: usize, i: usize, j: usize| gam[(k * m + i) * m + j];
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in a + 1..m {
            let (ea, eb) = (unit(a), unit(b));
            let field = |p: &[f64]| -> Result<Vec<f64>> {
                Ok(bracket_alpha(t, &ea, &eb, p)?.as_slice().to_vec())
            };
            let y = field(x)?;
            let dy = crate::fields::chart_partials(
                t.chart(),
                x,
                t.alpha().form().fd_step(),
                field,
            )?;
            for i in 0..m {
                let nabla_a: Vec<f64> = (0..m).map(|k| at(k, i, a)).collect();
                let nabla_b: Vec<f64> = (0..m).map(|k| at(k, i, b)).collect();
                let t1 = bracket_alpha(t, &nabla_a, &eb, x)?;
                let t2 = bracket_alpha(t, &ea, &nabla_b, x)?;
                for l in 0..m {
                    let mut lhs = dy[i][l];
                    for k in 0..m {
                        lhs += at(l, i, k) * y[k];
                    }
                    worst = worst.max((lhs - t1[l] - t2[l]).abs());
                }
            }
        }
    }
    Ok(worst)
}

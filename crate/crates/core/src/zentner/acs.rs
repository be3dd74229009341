//! The almost complex structure on a total-space chart `U x H` and its
//! Nijenhuis tensor.
//!
//! A total-space point is `(x, h)` with `h = exp(sum_j k_j e_j)`. A tangent vector
//! `(xdot, kdot)` has vertical part `xi = h^{-1} hdot = D(k) kdot` in the algebra.
//! The pulled-back connection form is `Ad_{h^-1} A(xdot) + xi`, and `alpha` pulls
//! back to `Ad_{h^-1} alpha(xdot)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::central_partials;
use crate::gauge::{alpha_matrix, LocalTriple, ADMISSIBILITY_THRESHOLD};
use crate::lie::{matrix_exp, matrix_log, LieAlgebra};

/// Largest `|k|` accepted for exponential coordinates.
pub const EXP_COORD_GUARD: f64 = 1.0;

/// Step in the group coordinates for finite differences of `J`.
const GROUP_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalSpacePoint {
    pub x: Vec<f64>,
    pub k: Vec<f64>,
}

impl TotalSpacePoint {
    pub fn new(x: Vec<f64>, k: Vec<f64>) -> Self {
        Self { x, k }
    }

    pub fn at_identity(x: Vec<f64>, n: usize) -> Self {
        Self { x, k: vec![0.0; n] }
    }

    fn k_norm(&self) -> f64 {
        self.k.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_guard(&self, guard: f64) -> Result<()> {
        let norm = self.k_norm();
        if norm > guard {
            return Err(GeomError::ExpGuard { norm, guard });
        }
        Ok(())
    }

    fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.k).copied().collect()
    }
}

/// `Ad_{exp(K)^{-1}} = exp(-ad_K)` on algebra coordinates.
fn adjoint_inverse(alg: &LieAlgebra, k: &[f64]) -> Result<DMatrix<f64>> {
    matrix_exp(&(-alg.ad_matrix(k)?))
}

/// `D(k) = sum_p (-ad_K)^p / (p+1)!`, so that `exp(K)^{-1} d exp(K) = D(k) dk`.
fn left_log_jacobian(alg: &LieAlgebra, k: &[f64]) -> Result<DMatrix<f64>> {
    let ad = -alg.ad_matrix(k)?;
    let n = ad.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for p in 1..40 {
        term = &term * &ad / (p as f64 + 1.0);
        sum += &term;
        if term.amax() < 1e-18 {
            break;
        }
    }
    Ok(sum)
}

fn singular_alpha(det: f64) -> GeomError {
    GeomError::Singular { what: "alpha", det }
}

/// `J` in the coordinates `(x, k)`, a `2n x 2n` matrix acting on column vectors.
pub fn acs_matrix(t: &LocalTriple, y: &TotalSpacePoint) -> Result<DMatrix<f64>> {
    acs_matrix_with_guard(t, y, EXP_COORD_GUARD)
}

pub fn acs_matrix_with_guard(t: &LocalTriple, y: &TotalSpacePoint, guard: f64) -> Result<DMatrix<f64>> {
    let (m, n) = (t.chart().dim(), t.algebra().dim());
    if m != n {
        return Err(GeomError::NonSquareAlpha {
            chart_dim: m,
            algebra_dim: n,
        });
    }
    if y.k.len() != n || y.x.len() != m {
        return Err(GeomError::DimensionMismatch {
            context: "total-space point",
            expected: m + n,
            found: y.x.len() + y.k.len(),
        });
    }
    y.check_guard(guard)?;
    let alg = t.algebra();
    let m_alpha = alpha_matrix(&t.alpha().value(&y.x)?);
    let m_a = alpha_matrix(&t.connection().value(&y.x)?);
    let det = m_alpha.determinant();
    if det.abs() <= ADMISSIBILITY_THRESHOLD {
        return Err(singular_alpha(det));
    }
    let p = m_alpha.clone().try_inverse().ok_or_else(|| singular_alpha(det))?;
    let ad = adjoint_inverse(alg, &y.k)?;
    let ad_inv = matrix_exp(&alg.ad_matrix(&y.k)?)?;
    let d = left_log_jacobian(alg, &y.k)?;
    let d_inv = d.clone().try_inverse().ok_or(GeomError::Singular {
        what: "exponential-coordinate Jacobian",
        det: 0.0,
    })?;

    // Frame (xdot, xi): horizontal vectors go to fundamental fields of
    // Ad_{h^-1} alpha(xdot); vertical ones go back through -j^{-1}.
    let j_xx = -(&p * &m_a);
    let j_xv = -(&p * &ad_inv);
    let j_vx = &ad * &m_alpha + &ad * &m_a * &p * &m_a;
    let j_vv = &ad * &m_a * &p * &ad_inv;

    let mut j = DMatrix::zeros(2 * n, 2 * n);
    j.view_mut((0, 0), (n, n)).copy_from(&j_xx);
    j.view_mut((0, n), (n, n)).copy_from(&(j_xv * &d));
    j.view_mut((n, 0), (n, n)).copy_from(&(&d_inv * j_vx));
    j.view_mut((n, n), (n, n)).copy_from(&(&d_inv * j_vv * &d));
    Ok(j)
}

fn acs_at_coords(t: &LocalTriple, z: &[f64], guard: f64) -> Result<Vec<f64>> {
    let m = t.chart().dim();
    let y = TotalSpacePoint::new(z[..m].to_vec(), z[m..].to_vec());
    Ok(acs_matrix_with_guard(t, &y, guard)?.iter().copied().collect())
}

fn total_space_steps(t: &LocalTriple, y: &TotalSpacePoint, guard: f64) -> Result<Vec<f64>> {
    let chart = t.chart();
    let step = t.alpha().form().fd_step();
    let mut steps = Vec::with_capacity(2 * chart.dim());
    for axis in 0..chart.dim() {
        let h = step.for_axis(chart, axis);
        let (lo, hi) = chart.bounds()[axis];
        if y.x[axis] - 2.0 * h < lo || y.x[axis] + 2.0 * h > hi {
            return Err(GeomError::BoundaryProximity {
                point: y.x.clone(),
                axis,
                step: h,
            });
        }
        steps.push(h);
    }
    if y.k_norm() + 2.0 * GROUP_STEP > guard {
        return Err(GeomError::ExpGuard {
            norm: y.k_norm() + 2.0 * GROUP_STEP,
            guard,
        });
    }
    steps.extend(std::iter::repeat_n(GROUP_STEP, y.k.len()));
    Ok(steps)
}

/// Components `N^k_ij`, stored at `(k * d + i) * d + j` with `d = 2n`.
#[derive(Debug, Clone, Serialize)]
pub struct NijenhuisSample {
    pub point: TotalSpacePoint,
    pub components: Vec<f64>,
    pub max_abs: f64,
    /// `max |J^k_l|` at the point.
    pub j_scale: f64,
}

impl NijenhuisSample {
    pub fn component(&self, k: usize, i: usize, j: usize) -> f64 {
        let d = 2 * self.point.x.len();
        self.components[(k * d + i) * d + j]
    }

    /// The threshold `tol * max(1, max |J|)`.
    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs <= tol * self.j_scale.max(1.0)
    }
}

/// `N^k_ij = J^l_i d_l J^k_j - J^l_j d_l J^k_i - J^k_l (d_i J^l_j - d_j J^l_i)`.
pub fn nijenhuis(t: &LocalTriple, y: &TotalSpacePoint) -> Result<NijenhuisSample> {
    let guard = EXP_COORD_GUARD;
    let j = acs_matrix_with_guard(t, y, guard)?;
    let d = j.nrows();
    let steps = total_space_steps(t, y, guard)?;
    let dj = central_partials(&y.coords(), &steps, |z| acs_at_coords(t, z, guard))?;
    // Column-major storage: entry (r, c) sits at r + c * d.
    let dj_at = |l: usize, r: usize, c: usize| dj[l][r + c * d];
    let mut components = vec![0.0; d * d * d];
    let mut max_abs = 0.0f64;
    for k in 0..d {
        for i in 0..d {
            for jj in 0..d {
                let mut v = 0.0;
                for l in 0..d {
                    v += j[(l, i)] * dj_at(l, k, jj) - j[(l, jj)] * dj_at(l, k, i);
                    v -= j[(k, l)] * (dj_at(i, l, jj) - dj_at(jj, l, i));
                }
                components[(k * d + i) * d + jj] = v;
                max_abs = max_abs.max(v.abs());
            }
        }
    }
    Ok(NijenhuisSample {
        point: y.clone(),
        components,
        max_abs,
        j_scale: j.amax(),
    })
}

/// `max |dR_g J(y) - J(R_g y) dR_g|` for right translation by `g = exp(s e)`,
/// with the differential of `R_g` taken by finite differences.
pub fn right_translation_defect(
    t: &LocalTriple,
    y: &TotalSpacePoint,
    e: &[f64],
    s: f64,
) -> Result<f64> {
    let group = t
        .group()
        .ok_or_else(|| GeomError::InvalidConfig("right translation needs a matrix group".into()))?
        .clone();
    let m = t.chart().dim();
    let ge: Vec<f64> = e.iter().map(|v| v * s).collect();
    let g = group.exp(&ge)?;
    let translate = |z: &[f64]| -> Result<Vec<f64>> {
        let h = group.exp(&z[m..])? * &g;
        let k = group.coordinates(&matrix_log(&h)?)?;
        Ok(z[..m].iter().copied().chain(k.iter().copied()).collect())
    };
    let z = y.coords();
    let z_img = translate(&z)?;
    let y_img = TotalSpacePoint::new(z_img[..m].to_vec(), z_img[m..].to_vec());
    let steps = total_space_steps(t, y, EXP_COORD_GUARD)?;
    let cols = central_partials(&z, &steps, translate)?;
    let d = z.len();
    let dr = DMatrix::from_fn(d, d, |r, c| cols[c][r]);
    let lhs = &dr * acs_matrix(t, y)?;
    let rhs = acs_matrix(t, &y_img)? * &dr;
    Ok((lhs - rhs).amax())
}

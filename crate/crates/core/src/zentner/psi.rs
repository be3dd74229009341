use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::gauge::{alpha_matrix, LocalTriple, ADMISSIBILITY_THRESHOLD};

/// `g_alpha(u, v) = <alpha(u), alpha(v)>` as a matrix in chart coordinates.
pub fn alpha_metric(t: &LocalTriple, x: &[f64]) -> Result<DMatrix<f64>> {
    let ip = t.algebra().inner_product().ok_or(GeomError::MissingInnerProduct)?;
    let m = alpha_matrix(&t.alpha().value(x)?);
    Ok(m.transpose() * ip * &m)
}

/// Orientation and metric recovered from `alpha` over a set of points.
#[derive(Debug, Clone)]
pub struct PsiSample {
    /// `+1` or `-1`, the sign of `det alpha`.
    pub orientation: i8,
    pub points: Vec<Vec<f64>>,
    pub metrics: Vec<DMatrix<f64>>,
}

pub fn metric_orientation_psi(t: &LocalTriple, grid: &[Vec<f64>]) -> Result<PsiSample> {
    let (m, n) = (t.chart().dim(), t.algebra().dim());
    if m != n {
        return Err(GeomError::NonSquareAlpha {
            chart_dim: m,
            algebra_dim: n,
        });
    }
    if t.algebra().inner_product().is_none() {
        return Err(GeomError::MissingInnerProduct);
    }
    let rows = grid
        .par_iter()
        .map(|x| {
            let det = alpha_matrix(&t.alpha().value(x)?).determinant();
            if det.abs() <= ADMISSIBILITY_THRESHOLD {
                return Err(GeomError::Singular { what: "alpha", det });
            }
            let g = alpha_metric(t, x)?;
            if g.clone().cholesky().is_none() {
                return Err(GeomError::Singular {
                    what: "recovered metric",
                    det: g.determinant(),
                });
            }
            Ok((det.signum() as i8, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let orientation = rows.first().map_or(1, |r| r.0);
    if rows.iter().any(|r| r.0 != orientation) {
        return Err(GeomError::OrientationChange);
    }
    Ok(PsiSample {
        orientation,
        points: grid.to_vec(),
        metrics: rows.into_iter().map(|r| r.1).collect(),
    })
}

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fields::{max_component_norm, wedge_bracket, AlgForm, FormValue};
use crate::gauge::{beta_inverse, covariant_exterior_derivative, curvature, LocalTriple};

/// `r1 = d_A alpha` and `r2 = Omega_A - 1/2 [alpha ^ alpha]` as forms.
pub fn residual_forms(t: &LocalTriple) -> Result<(AlgForm, AlgForm)> {
    let r1 = covariant_exterior_derivative(t.alpha(), t.connection())?;
    let half = wedge_bracket(t.alpha().form(), t.alpha().form())?.scaled(-0.5);
    let r2 = curvature(t.connection())?.add(&half)?;
    Ok((r1, r2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualNorms {
    pub eq1: f64,
    pub eq2: f64,
}

/// Residual tables over a set of points.
#[derive(Debug, Clone)]
pub struct ZentnerResidual {
    pub grid: Vec<Vec<f64>>,
    pub r1: Vec<FormValue>,
    pub r2: Vec<FormValue>,
    /// Per point, the largest component norm `max_{i<j} |r(d_i, d_j)|`.
    pub norms: Vec<ResidualNorms>,
    pub max_norms: ResidualNorms,
}

impl ZentnerResidual {
    pub fn integrable(&self, tol_eq1: f64, tol_eq2: f64) -> bool {
        self.max_norms.eq1 <= tol_eq1 && self.max_norms.eq2 <= tol_eq2
    }
}

pub fn zentner_residuals(t: &LocalTriple, grid: &[Vec<f64>]) -> Result<ZentnerResidual> {
    let (f1, f2) = residual_forms(t)?;
    let alg = t.algebra().clone();
    let rows = grid
        .par_iter()
        .map(|x| Ok((f1.value(x)?, f2.value(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut r1 = Vec::with_capacity(rows.len());
    let mut r2 = Vec::with_capacity(rows.len());
    let mut norms = Vec::with_capacity(rows.len());
    let mut max_norms = ResidualNorms { eq1: 0.0, eq2: 0.0 };
    for (a, b) in rows {
        let n = ResidualNorms {
            eq1: max_component_norm(&alg, &a),
            eq2: max_component_norm(&alg, &b),
        };
        max_norms.eq1 = max_norms.eq1.max(n.eq1);
        max_norms.eq2 = max_norms.eq2.max(n.eq2);
        norms.push(n);
        r1.push(a);
        r2.push(b);
    }
    Ok(ZentnerResidual {
        grid: grid.to_vec(),
        r1,
        r2,
        norms,
        max_norms,
    })
}

/// Norms of `r` on all pairs of the frame `u_a = alpha^{-1}(e_a)` built from the
/// algebra basis. For an orthonormal basis this frame is `g_alpha`-orthonormal.
pub fn frame_pair_norms(t: &LocalTriple, r: &FormValue, x: &[f64]) -> Result<Vec<f64>> {
    let n = t.algebra().dim();
    let frame = (0..n)
        .map(|a| {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            beta_inverse(t.alpha(), &e, x)
        })
        .collect::<Result<Vec<DVector<f64>>>>()?;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let v = r.apply_pair(frame[a].as_slice(), frame[b].as_slice());
            out.push(t.algebra().residual_norm(&v));
        }
    }
    Ok(out)
}

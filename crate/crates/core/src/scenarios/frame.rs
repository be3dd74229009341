//! Orthonormal-frame triples of conformally flat 3-manifolds `g = e^{2 phi} delta`.
//!
//! With the frame `E_a = e^{-phi} d_a` and coframe `theta^a = e^{phi} dx^a`,
//! `alpha = sum_a theta^a (x) L_a` and the Levi-Civita connection form is
//! `A(d_i) = grad(phi) x e_i` read in the basis `L_a` of so(3).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::fields::{AlgForm, Chart, DerivativeMode, FdStep};
use crate::gauge::{LocalConnection, LocalTriple, TensorialOneForm, TripleDescriptor, TripleMeta};
use crate::lie::{cross, LieAlgebra, MatrixGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameModel {
    Flat,
    Sphere,
    Halfspace,
}

impl FrameModel {
    pub fn curvature(self) -> f64 {
        match self {
            FrameModel::Flat => 0.0,
            FrameModel::Sphere => 1.0,
            FrameModel::Halfspace => -1.0,
        }
    }

    pub fn scenario_name(self) -> &'static str {
        match self {
            FrameModel::Flat => "flat",
            FrameModel::Sphere => "sphere",
            FrameModel::Halfspace => "hyperbolic-halfspace",
        }
    }

    /// Coordinate patch: a slab above `z = 0` for the flat and half-space
    /// models, a cube around the origin of stereographic coordinates for the sphere.
    pub fn chart(self) -> Chart {
        let bounds = match self {
            FrameModel::Flat | FrameModel::Halfspace => {
                vec![(-1.25, 1.25), (-1.25, 1.25), (0.4, 2.25)]
            }
            FrameModel::Sphere => vec![(-1.2, 1.2); 3],
        };
        Chart::new(vec!["x".into(), "y".into(), "z".into()], bounds)
            .expect("model chart bounds are valid")
    }

    fn phi(self, x: &[f64]) -> f64 {
        match self {
            FrameModel::Flat => 0.0,
            FrameModel::Halfspace => -x[2].ln(),
            FrameModel::Sphere => 2f64.ln() - (1.0 + norm2(x)).ln(),
        }
    }

    fn grad(self, x: &[f64]) -> [f64; 3] {
        match self {
            FrameModel::Flat => [0.0; 3],
            FrameModel::Halfspace => [0.0, 0.0, -1.0 / x[2]],
            FrameModel::Sphere => {
                let s = -2.0 / (1.0 + norm2(x));
                [s * x[0], s * x[1], s * x[2]]
            }
        }
    }

    /// `hess[j]` is `d_j grad(phi)`.
    fn hessian(self, x: &[f64]) -> [[f64; 3]; 3] {
        match self {
            FrameModel::Flat => [[0.0; 3]; 3],
            FrameModel::Halfspace => {
                let mut h = [[0.0; 3]; 3];
                h[2][2] = 1.0 / (x[2] * x[2]);
                h
            }
            FrameModel::Sphere => {
                let q = 1.0 + norm2(x);
                let mut h = [[0.0; 3]; 3];
                for (j, row) in h.iter_mut().enumerate() {
                    for (i, v) in row.iter_mut().enumerate() {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        *v = -2.0 * delta / q + 4.0 * x[i] * x[j] / (q * q);
                    }
                }
                h
            }
        }
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn unit(i: usize) -> [f64; 3] {
    let mut e = [0.0; 3];
    e[i] = 1.0;
    e
}

fn frame_alpha(model: FrameModel, chart: Arc<Chart>, alg: Arc<LieAlgebra>) -> Result<AlgForm> {
    AlgForm::with_partials(
        1,
        chart,
        alg,
        Arc::new(move |x| {
            let s = model.phi(x).exp();
            let mut out = vec![0.0; 9];
            for i in 0..3 {
                out[i * 3 + i] = s;
            }
            Ok(out)
        }),
        Arc::new(move |x| {
            let s = model.phi(x).exp();
            let g = model.grad(x);
            Ok((0..3)
                .map(|j| {
                    let mut d = vec![0.0; 9];
                    for i in 0..3 {
                        d[i * 3 + i] = s * g[j];
                    }
                    d
                })
                .collect())
        }),
    )
}

fn frame_connection(model: FrameModel, chart: Arc<Chart>, alg: Arc<LieAlgebra>) -> Result<AlgForm> {
    AlgForm::with_partials(
        1,
        chart,
        alg,
        Arc::new(move |x| {
            let g = model.grad(x);
            Ok((0..3).flat_map(|i| cross(g, unit(i))).collect())
        }),
        Arc::new(move |x| {
            let h = model.hessian(x);
            Ok((0..3)
                .map(|j| (0..3).flat_map(|i| cross(h[j], unit(i))).collect())
                .collect())
        }),
    )
}

/// The orthonormal-frame triple of the constant-curvature model with sectional
/// curvature `kappa`. The model fixes `kappa`; a mismatch is an error.
pub fn constant_curvature_triple(kappa: f64, model: FrameModel) -> Result<LocalTriple> {
    constant_curvature_triple_with_mode(kappa, model, DerivativeMode::ClosedForm)
}

pub fn constant_curvature_triple_with_mode(
    kappa: f64,
    model: FrameModel,
    mode: DerivativeMode,
) -> Result<LocalTriple> {
    if (kappa - model.curvature()).abs() > 1e-12 {
        return Err(GeomError::InvalidScenario(format!(
            "model {} has curvature {}, not {kappa}",
            model.scenario_name(),
            model.curvature()
        )));
    }
    let chart = Arc::new(model.chart());
    let group = Arc::new(MatrixGroup::so3());
    let alg = Arc::new(group.algebra().clone());
    let alpha = frame_alpha(model, chart.clone(), alg.clone())?.with_mode(mode)?;
    let conn = frame_connection(model, chart, alg)?.with_mode(mode)?;
    let mut parameters = BTreeMap::new();
    parameters.insert("kappa".to_string(), serde_json::json!(kappa));
    parameters.insert(
        "derivatives".to_string(),
        serde_json::json!(match mode {
            DerivativeMode::ClosedForm => "closed-form",
            DerivativeMode::FiniteDifference(_) => "finite-difference",
        }),
    );
    if let DerivativeMode::FiniteDifference(FdStep::Relative(r) | FdStep::Absolute(r)) = mode {
        parameters.insert("step".to_string(), serde_json::json!(r));
    }
    Ok(LocalTriple::new(
        TensorialOneForm::new(alpha)?,
        LocalConnection::new(conn)?,
        TripleMeta {
            scenario: model.scenario_name().to_string(),
            expected_integrable: Some(kappa == -1.0),
        },
    )?
    .with_group(group)?
    .with_descriptor(TripleDescriptor {
        scenario: model.scenario_name().to_string(),
        parameters,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FdStep;

    #[test]
    fn halfspace_values_at_unit_height() {
        let t = constant_curvature_triple(-1.0, FrameModel::Halfspace).unwrap();
        let x = [0.0, 0.0, 1.0];
        let a = t.alpha().value(&x).unwrap();
        for j in 0..3 {
            assert_eq!(a.one(j), &unit(j));
        }
        // A(d_x) = -L2, A(d_y) = L1, A(d_z) = 0
        let c = t.connection().value(&x).unwrap();
        assert_eq!(c.one(0), &[0.0, -1.0, 0.0]);
        assert_eq!(c.one(1), &[1.0, 0.0, 0.0]);
        assert_eq!(c.one(2), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn closed_form_partials_agree_with_differences() {
        for model in [FrameModel::Halfspace, FrameModel::Sphere] {
            let t = constant_curvature_triple(model.curvature(), model).unwrap();
            let x = [0.3, -0.2, 0.9];
            for form in [t.alpha().form(), t.connection().form()] {
                let closed = form.partials(&x).unwrap();
                let fd = form.fd_partials(&x, FdStep::default()).unwrap();
                for (p, q) in closed.iter().zip(&fd) {
                    assert!(p.max_abs_diff(q) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn mismatched_curvature_is_rejected() {
        assert!(matches!(
            constant_curvature_triple(1.0, FrameModel::Halfspace),
            Err(GeomError::InvalidScenario(_))
        ));
    }
}

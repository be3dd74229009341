//! Transport of so(3)-valued triples to su(2) through the differential of the
//! double cover `SU(2) -> SO(3)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::fields::{AlgForm, EvalFn, PartialsFn};
use crate::gauge::{LocalConnection, LocalTriple, TensorialOneForm, TripleMeta};
use crate::lie::{complexify, LieAlgebra, MatrixGroup};

const LIFT_SUFFIX: &str = " (su2 lift)";

/// Matrix of `d(su2_to_so3)` at the identity, from su(2) coordinates to so(3)
/// coordinates. Column `k` is the so(3) coordinate vector of `ad_{e_k}`.
pub fn double_cover_differential() -> Result<DMatrix<f64>> {
    let su2 = LieAlgebra::su2();
    let so3 = MatrixGroup::so3();
    let mut m = DMatrix::zeros(3, 3);
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = 1.0;
        let ad = su2.ad_matrix(&e)?;
        m.set_column(k, &so3.coordinates(&complexify(&ad))?);
    }
    Ok(m)
}

/// Applies `map` to every algebra component of `form` and reads the result in `target`.
fn transport_form(form: &AlgForm, map: &DMatrix<f64>, target: Arc<LieAlgebra>) -> Result<AlgForm> {
    let n = target.dim();
    let apply = {
        let map = map.clone();
        move |data: Vec<f64>| -> Vec<f64> {
            let mut out = data;
            for chunk in out.chunks_mut(n) {
                let img = &map * DVector::from_column_slice(chunk);
                chunk.copy_from_slice(img.as_slice());
            }
            out
        }
    };
    let src = form.clone();
    let ap = apply.clone();
    let eval: EvalFn = Arc::new(move |x| Ok(ap(src.value(x)?.into_data())));
    let mode = form.derivative_mode();
    if form.has_closed_form() {
        let src = form.clone();
        let partials: PartialsFn = Arc::new(move |x| {
            Ok(src.partials(x)?.into_iter().map(|d| apply(d.into_data())).collect())
        });
        AlgForm::with_partials(form.degree(), form.chart().clone(), target, eval, partials)?
            .with_mode(mode)
    } else {
        AlgForm::new(form.degree(), form.chart().clone(), target, eval)?.with_mode(mode)
    }
}

fn transport_triple(
    t: &LocalTriple,
    map: &DMatrix<f64>,
    group: MatrixGroup,
    scenario: String,
) -> Result<LocalTriple> {
    let target = Arc::new(group.algebra().clone());
    let alpha = transport_form(t.alpha().form(), map, target.clone())?;
    let conn = transport_form(t.connection().form(), map, target)?;
    LocalTriple::new(
        TensorialOneForm::new(alpha)?,
        LocalConnection::new(conn)?,
        TripleMeta {
            scenario,
            expected_integrable: t.meta().expected_integrable,
        },
    )?
    .with_group(Arc::new(group))
}

fn require_algebra(t: &LocalTriple, expected: &LieAlgebra) -> Result<()> {
    if t.algebra().labels() != expected.labels() || !t.algebra().same_brackets(expected) {
        return Err(GeomError::AlgebraMismatch);
    }
    Ok(())
}

/// Re-expresses an so(3) triple in the su(2) basis `e_k = -i sigma_k / 2`.
pub fn su2_lift(t: &LocalTriple) -> Result<LocalTriple> {
    require_algebra(t, &LieAlgebra::so3())?;
    let inv = double_cover_differential()?
        .try_inverse()
        .ok_or(GeomError::SingularChangeOfBasis("double cover differential".into()))?;
    let scenario = format!("{}{LIFT_SUFFIX}", t.meta().scenario);
    transport_triple(t, &inv, MatrixGroup::su2(), scenario)
}

/// Inverse of [`su2_lift`].
pub fn so3_descent(t: &LocalTriple) -> Result<LocalTriple> {
    require_algebra(t, &LieAlgebra::su2())?;
    let scenario = t.meta().scenario.trim_end_matches(LIFT_SUFFIX).to_string();
    transport_triple(t, &double_cover_differential()?, MatrixGroup::so3(), scenario)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{constant_curvature_triple, FrameModel};

    #[test]
    fn differential_is_identity_in_matched_bases() {
        let m = double_cover_differential().unwrap();
        assert!((m - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn lifted_flat_frame() {
        let t = constant_curvature_triple(0.0, FrameModel::Flat).unwrap();
        let lifted = su2_lift(&t).unwrap();
        assert_eq!(lifted.algebra().labels()[0], "e1");
        let a = lifted.alpha().value(&[0.0, 0.0, 1.0]).unwrap();
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = 1.0;
            assert_eq!(a.one(j), &e);
        }
    }

    #[test]
    fn lift_then_descend_is_identity() {
        let t = constant_curvature_triple(-1.0, FrameModel::Halfspace).unwrap();
        let back = so3_descent(&su2_lift(&t).unwrap()).unwrap();
        let x = [0.3, -0.4, 1.2];
        assert!(back.alpha().value(&x).unwrap().max_abs_diff(&t.alpha().value(&x).unwrap()) < 1e-12);
        assert!(
            back.connection().value(&x).unwrap().max_abs_diff(&t.connection().value(&x).unwrap())
                < 1e-12
        );
    }

    #[test]
    fn lift_requires_so3() {
        let t = su2_lift(&constant_curvature_triple(0.0, FrameModel::Flat).unwrap()).unwrap();
        assert!(matches!(su2_lift(&t), Err(GeomError::AlgebraMismatch)));
    }
}

//! Slice triples of a real form `H` of a complex group `G`.
//!
//! The chart `x -> sigma(x) = exp(sum_j x_j i e_j)` is a local section of
//! `G -> G/H`. The pulled-back Maurer-Cartan form `omega = sigma^{-1} d sigma`
//! splits as `omega = theta - i alpha`, giving the connection `A = theta` and
//! the tensorial form `alpha`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::fields::{AlgForm, Chart, EvalFn};
use crate::gauge::{LocalConnection, LocalTriple, TensorialOneForm, TripleDescriptor, TripleMeta};
use crate::lie::{commutator, matrix_exp, CMatrix, Complex, RealFormDecomposition};

/// Half-width of the coordinate box used for slice charts.
pub const SLICE_CHART_RADIUS: f64 = 0.55;

const DEXP_MAX_TERMS: usize = 60;

/// Directions `i e_j` of the slice.
fn slice_directions(rf: &RealFormDecomposition) -> Vec<CMatrix> {
    rf.subgroup()
        .basis()
        .iter()
        .map(|b| b * Complex::new(0.0, 1.0))
        .collect()
}

fn slice_generator(dirs: &[CMatrix], x: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(dirs[0].nrows(), dirs[0].ncols());
    for (d, xj) in dirs.iter().zip(x) {
        m += d.scale(*xj);
    }
    m
}

/// `sigma(x)`.
pub fn slice_section(rf: &RealFormDecomposition, x: &[f64]) -> Result<CMatrix> {
    matrix_exp(&slice_generator(&slice_directions(rf), x))
}

/// `omega(d_j) = sigma^{-1} d_j sigma = sum_p (-ad_X)^p (i e_j) / (p+1)!`.
pub fn slice_maurer_cartan(rf: &RealFormDecomposition, x: &[f64]) -> Vec<CMatrix> {
    let dirs = slice_directions(rf);
    let gen = slice_generator(&dirs, x);
    dirs.iter()
        .map(|y| {
            let mut term = y.clone();
            let mut sum = y.clone();
            for p in 1..DEXP_MAX_TERMS {
                term = -commutator(&gen, &term).unscale(p as f64 + 1.0);
                sum += &term;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            sum
        })
        .collect()
}

/// Slice triple `(alpha, A)` on the box `|x_j| <= 0.55`, with finite-difference partials.
pub fn real_form_triple(rf: &RealFormDecomposition) -> Result<LocalTriple> {
    real_form_triple_on(rf, SLICE_CHART_RADIUS)
}

pub fn real_form_triple_on(rf: &RealFormDecomposition, radius: f64) -> Result<LocalTriple> {
    let n = rf.subgroup().algebra().dim();
    if !(radius > 0.0 && radius <= crate::zentner::EXP_COORD_GUARD) {
        return Err(GeomError::ExpGuard {
            norm: radius,
            guard: crate::zentner::EXP_COORD_GUARD,
        });
    }
    let chart = Arc::new(Chart::boxed(vec![(-radius, radius); n])?);
    let alg = Arc::new(rf.subgroup().algebra().clone());
    let rf_shared = Arc::new(rf.clone());

    let part = |take_alpha: bool| -> EvalFn {
        let rf = rf_shared.clone();
        Arc::new(move |x| {
            let mut out = Vec::with_capacity(n * n);
            for w in slice_maurer_cartan(&rf, x) {
                let (theta, alpha) = rf.split(&w)?;
                out.extend_from_slice(if take_alpha { alpha.as_slice() } else { theta.as_slice() });
            }
            Ok(out)
        })
    };
    let alpha = AlgForm::new(1, chart.clone(), alg.clone(), part(true))?;
    let theta = AlgForm::new(1, chart, alg, part(false))?;

    let name = scenario_name(rf);
    let mut parameters = BTreeMap::new();
    parameters.insert("radius".to_string(), serde_json::json!(radius));
    Ok(LocalTriple::new(
        TensorialOneForm::new(alpha)?,
        LocalConnection::new(theta)?,
        TripleMeta {
            scenario: name.clone(),
            expected_integrable: Some(true),
        },
    )?
    .with_group(Arc::new(rf.subgroup().clone()))?
    .with_descriptor(TripleDescriptor {
        scenario: name,
        parameters,
    }))
}

fn scenario_name(rf: &RealFormDecomposition) -> String {
    match rf.subgroup().name() {
        "SU(2)" => "su2-sl2c".into(),
        "SL(2,R)" => "sl2r-sl2c".into(),
        other => format!("{}-in-{}", other, rf.ambient().name()),
    }
}

/// `(theta, alpha)` of the curve `s -> sigma(x) exp(s zeta)` at `s = 0`, for `zeta`
/// in the subalgebra. A connection form must return `(zeta, 0)`.
pub fn right_translation_probe(
    rf: &RealFormDecomposition,
    x: &[f64],
    zeta: &[f64],
    step: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sigma = slice_section(rf, x)?;
    let sigma_inv = sigma.clone().try_inverse().ok_or(GeomError::Singular {
        what: "slice section",
        det: 0.0,
    })?;
    let z = rf.subgroup().to_matrix(zeta);
    let curve = |s: f64| -> Result<CMatrix> { Ok(&sigma * matrix_exp(&z.scale(s))?) };
    // Fourth-order central difference of the curve at s = 0.
    let d = (curve(-2.0 * step)? - curve(2.0 * step)?
        + (curve(step)? - curve(-step)?).scale(8.0))
    .unscale(12.0 * step);
    let (theta, alpha) = rf.split(&(sigma_inv * d))?;
    Ok((theta.as_slice().to_vec(), alpha.as_slice().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FdStep;
    use crate::lie::matrix_log;

    #[test]
    fn origin_values() {
        for rf in [RealFormDecomposition::su2_in_sl2c(), RealFormDecomposition::sl2r_in_sl2c()] {
            let t = real_form_triple(&rf).unwrap();
            let a = t.alpha().value(&[0.0; 3]).unwrap();
            let c = t.connection().value(&[0.0; 3]).unwrap();
            for j in 0..3 {
                let mut e = [0.0; 3];
                e[j] = -1.0;
                for k in 0..3 {
                    assert!((a.one(j)[k] - e[k]).abs() < 1e-15);
                    assert!(c.one(j)[k].abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn maurer_cartan_series_matches_differences() {
        let rf = RealFormDecomposition::su2_in_sl2c();
        let x = [0.3, -0.2, 0.4];
        let series = slice_maurer_cartan(&rf, &x);
        let sigma_inv = slice_section(&rf, &x).unwrap().try_inverse().unwrap();
        let h = 1e-4;
        for (j, w) in series.iter().enumerate() {
            let at = |s: f64| {
                let mut p = x;
                p[j] += s;
                slice_section(&rf, &p).unwrap()
            };
            let d = (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)).scale(8.0)).unscale(12.0 * h);
            assert!((&sigma_inv * d - w).norm() < 1e-9);
        }
    }

    #[test]
    fn slice_logarithm_recovers_coordinates() {
        let rf = RealFormDecomposition::sl2r_in_sl2c();
        let x = [0.2, 0.1, -0.3];
        let log = matrix_log(&slice_section(&rf, &x).unwrap()).unwrap();
        let (theta, alpha) = rf.split(&log).unwrap();
        assert!(theta.amax() < 1e-12);
        for j in 0..3 {
            assert!((alpha[j] + x[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn connection_axiom_along_fibres() {
        let rf = RealFormDecomposition::su2_in_sl2c();
        let zeta = [0.4, -0.7, 0.2];
        let (theta, alpha) = right_translation_probe(&rf, &[0.1, 0.3, -0.2], &zeta, 1e-3).unwrap();
        for k in 0..3 {
            assert!((theta[k] - zeta[k]).abs() < 1e-9);
            assert!(alpha[k].abs() < 1e-9);
        }
    }

    #[test]
    fn default_step_is_relative() {
        let t = real_form_triple(&RealFormDecomposition::su2_in_sl2c()).unwrap();
        assert_eq!(
            t.alpha().form().derivative_mode(),
            crate::fields::DerivativeMode::FiniteDifference(FdStep::default())
        );
    }
}

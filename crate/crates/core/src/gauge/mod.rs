//! Local principal-bundle data on a single chart: connections, tensorial
//! 1-forms, curvature, the covariant exterior derivative and the gauge action.
//!
//! Conventions: `Omega = dA + 1/2 [A ^ A]`, `d_A alpha = d alpha + [A ^ alpha]`,
//! and a gauge transformation `h` acts by `A' = h A h^-1 - (dh) h^-1`,
//! `alpha' = h alpha h^-1`.

mod transform;

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::fields::{wedge_bracket_value, AlgForm, Chart, DerivativeMode, EvalFn, FormValue};
use crate::lie::{LieAlgebra, MatrixGroup};

pub use transform::{GroupMapFn, GroupPartialsFn, LocalGaugeTransformation};

/// Default cutoff on `|det alpha|` below which a point counts as degenerate.
pub const ADMISSIBILITY_THRESHOLD: f64 = 1e-10;

fn require_one_form(form: &AlgForm, what: &str) -> Result<()> {
    if form.degree() != 1 {
        return Err(GeomError::InvalidConfig(format!(
            "{what} must be a 1-form, got degree {}",
            form.degree()
        )));
    }
    Ok(())
}

/// Local connection 1-form `A_U` with values in the structure algebra.
#[derive(Clone, Debug)]
pub struct LocalConnection(AlgForm);

impl LocalConnection {
    pub fn new(form: AlgForm) -> Result<Self> {
        require_one_form(&form, "connection")?;
        Ok(Self(form))
    }

    pub fn form(&self) -> &AlgForm {
        &self.0
    }

    pub fn value(&self, x: &[f64]) -> Result<FormValue> {
        self.0.value(x)
    }
}

/// Tensorial 1-form `alpha_U` of adjoint type.
#[derive(Clone, Debug)]
pub struct TensorialOneForm(AlgForm);

impl TensorialOneForm {
    pub fn new(form: AlgForm) -> Result<Self> {
        require_one_form(&form, "tensorial form")?;
        Ok(Self(form))
    }

    pub fn form(&self) -> &AlgForm {
        &self.0
    }

    pub fn value(&self, x: &[f64]) -> Result<FormValue> {
        self.0.value(x)
    }
}

/// Enough information to rebuild a built-in triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleDescriptor {
    pub scenario: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleMeta {
    pub scenario: String,
    pub expected_integrable: Option<bool>,
}

/// A pair `(alpha_U, A_U)` on one chart, optionally tied to a matrix group so
/// that gauge transformations can act on it.
#[derive(Clone, Debug)]
pub struct LocalTriple {
    alpha: TensorialOneForm,
    connection: LocalConnection,
    group: Option<Arc<MatrixGroup>>,
    meta: TripleMeta,
    descriptor: Option<TripleDescriptor>,
}

impl LocalTriple {
    pub fn new(alpha: TensorialOneForm, connection: LocalConnection, meta: TripleMeta) -> Result<Self> {
        alpha.form().check_compatible(connection.form())?;
        Ok(Self {
            alpha,
            connection,
            group: None,
            meta,
            descriptor: None,
        })
    }

    pub fn with_group(mut self, group: Arc<MatrixGroup>) -> Result<Self> {
        if !group.algebra().same_brackets(self.algebra()) {
            return Err(GeomError::AlgebraMismatch);
        }
        self.group = Some(group);
        Ok(self)
    }

    pub fn with_descriptor(mut self, descriptor: TripleDescriptor) -> Self {
        self.descriptor = Some(descriptor);
        self
    }

    pub fn alpha(&self) -> &TensorialOneForm {
        &self.alpha
    }

    pub fn connection(&self) -> &LocalConnection {
        &self.connection
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.alpha.form().chart()
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        self.alpha.form().algebra()
    }

    pub fn group(&self) -> Option<&Arc<MatrixGroup>> {
        self.group.as_ref()
    }

    pub fn meta(&self) -> &TripleMeta {
        &self.meta
    }

    pub fn descriptor(&self) -> Option<&TripleDescriptor> {
        self.descriptor.as_ref()
    }

    /// JSON form of a built-in triple: scenario name plus parameters.
    pub fn to_json(&self) -> Result<String> {
        let d = self.descriptor.as_ref().ok_or_else(|| {
            GeomError::InvalidConfig(format!(
                "triple '{}' is built from code callbacks and has no JSON form",
                self.meta.scenario
            ))
        })?;
        Ok(serde_json::to_string_pretty(d)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: TripleDescriptor = serde_json::from_str(text)?;
        crate::scenarios::triple_from_descriptor(&d)
    }
}

/// `Omega_ij = d_i A_j - d_j A_i + [A_i, A_j]`.
pub fn curvature(a: &LocalConnection) -> Result<AlgForm> {
    let form = a.form().clone();
    let alg = form.algebra().clone();
    let m = form.chart().dim();
    let eval: EvalFn = Arc::new(move |x| {
        let v = form.value(x)?;
        let d = form.partials(x)?;
        let mut out = wedge_bracket_value(&alg, &v, &v);
        for o in out.data_mut() {
            *o *= 0.5;
        }
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (di_aj, dj_ai) = (d[i].one(j), d[j].one(i));
                for (o, (p, q)) in out.two_mut(i, j).iter_mut().zip(di_aj.iter().zip(dj_ai)) {
                    *o += p - q;
                }
            }
        }
        Ok(out.into_data())
    });
    derived_two_form(a.form(), eval)
}

/// `(d_A alpha)_ij = d_i alpha_j - d_j alpha_i + [A_i, alpha_j] - [A_j, alpha_i]`.
pub fn covariant_exterior_derivative(
    alpha: &TensorialOneForm,
    a: &LocalConnection,
) -> Result<AlgForm> {
    alpha.form().check_compatible(a.form())?;
    let (al, conn) = (alpha.form().clone(), a.form().clone());
    let alg = al.algebra().clone();
    let m = al.chart().dim();
    let eval: EvalFn = Arc::new(move |x| {
        let d = al.partials(x)?;
        let mut out = wedge_bracket_value(&alg, &conn.value(x)?, &al.value(x)?);
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let (di_aj, dj_ai) = (d[i].one(j), d[j].one(i));
                for (o, (p, q)) in out.two_mut(i, j).iter_mut().zip(di_aj.iter().zip(dj_ai)) {
                    *o += p - q;
                }
            }
        }
        Ok(out.into_data())
    });
    derived_two_form(alpha.form(), eval)
}

fn derived_two_form(src: &AlgForm, eval: EvalFn) -> Result<AlgForm> {
    AlgForm::new(2, src.chart().clone(), src.algebra().clone(), eval)?
        .with_mode(DerivativeMode::FiniteDifference(src.fd_step()))
}

fn check_gauge_target(h: &LocalGaugeTransformation, form: &AlgForm) -> Result<()> {
    if !h.group().algebra().same_brackets(form.algebra()) {
        return Err(GeomError::AlgebraMismatch);
    }
    if **h.chart() != **form.chart() {
        return Err(GeomError::ChartMismatch);
    }
    // Fail early on a transformation that leaves the group.
    h.value(&form.chart().center())?;
    Ok(())
}

/// Pointwise `Ad_h` on every component of a form of any degree.
pub fn gauge_tensorial(h: &LocalGaugeTransformation, form: &AlgForm) -> Result<AlgForm> {
    check_gauge_target(h, form)?;
    let (h, src) = (h.clone(), form.clone());
    let n = form.algebra().dim();
    let eval: EvalFn = Arc::new(move |x| {
        let ad = h.group().adjoint_matrix(&h.value(x)?)?;
        let v = src.value(x)?;
        let mut out = v.into_data();
        for chunk in out.chunks_mut(n) {
            let img = &ad * DVector::from_column_slice(chunk);
            chunk.copy_from_slice(img.as_slice());
        }
        Ok(out)
    });
    AlgForm::new(form.degree(), form.chart().clone(), form.algebra().clone(), eval)?
        .with_mode(DerivativeMode::FiniteDifference(form.fd_step()))
}

/// `A' = h A h^-1 - (dh) h^-1`.
pub fn gauge_connection(
    h: &LocalGaugeTransformation,
    a: &LocalConnection,
) -> Result<LocalConnection> {
    check_gauge_target(h, a.form())?;
    let (h, src) = (h.clone(), a.form().clone());
    let n = src.algebra().dim();
    let eval: EvalFn = Arc::new(move |x| {
        let g = h.value(x)?;
        let ad = h.group().adjoint_matrix(&g)?;
        let dlog = h.right_log_derivative(x, &g)?;
        let v = src.value(x)?;
        let mut out = v.into_data();
        for (chunk, shift) in out.chunks_mut(n).zip(&dlog) {
            let img = &ad * DVector::from_column_slice(chunk);
            for ((o, a), s) in chunk.iter_mut().zip(img.iter()).zip(shift) {
                *o = a - s;
            }
        }
        Ok(out)
    });
    LocalConnection::new(
        AlgForm::new(1, a.form().chart().clone(), a.form().algebra().clone(), eval)?
            .with_mode(DerivativeMode::FiniteDifference(a.form().fd_step()))?,
    )
}

/// The transformed triple `(h alpha h^-1, h A h^-1 - (dh) h^-1)`.
pub fn gauge_act(h: &LocalGaugeTransformation, t: &LocalTriple) -> Result<LocalTriple> {
    let alpha = TensorialOneForm::new(gauge_tensorial(h, t.alpha().form())?)?;
    let connection = gauge_connection(h, t.connection())?;
    let mut out = LocalTriple::new(alpha, connection, t.meta().clone())?;
    out.group = Some(h.group().clone());
    Ok(out)
}

/// The `n x m` matrix whose column `j` is `alpha(d_j)`.
pub fn alpha_matrix(value: &FormValue) -> DMatrix<f64> {
    let (m, n) = (value.dim(), value.alg_dim());
    DMatrix::from_fn(n, m, |a, j| value.one(j)[a])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub det: f64,
    pub admissible: bool,
}

fn square_alpha(alpha: &TensorialOneForm, x: &[f64]) -> Result<DMatrix<f64>> {
    let (m, n) = (alpha.form().chart().dim(), alpha.form().algebra().dim());
    if m != n {
        return Err(GeomError::NonSquareAlpha {
            chart_dim: m,
            algebra_dim: n,
        });
    }
    Ok(alpha_matrix(&alpha.value(x)?))
}

pub fn admissibility(alpha: &TensorialOneForm, x: &[f64]) -> Result<Admissibility> {
    admissibility_with(alpha, x, ADMISSIBILITY_THRESHOLD)
}

pub fn admissibility_with(
    alpha: &TensorialOneForm,
    x: &[f64],
    threshold: f64,
) -> Result<Admissibility> {
    let det = square_alpha(alpha, x)?.determinant();
    Ok(Admissibility {
        det,
        admissible: det.abs() > threshold,
    })
}

/// `beta(v) = alpha_U(v)`.
pub fn beta_apply(alpha: &TensorialOneForm, v: &[f64], x: &[f64]) -> Result<DVector<f64>> {
    let m = alpha.form().chart().dim();
    if v.len() != m {
        return Err(GeomError::DimensionMismatch {
            context: "tangent vector",
            expected: m,
            found: v.len(),
        });
    }
    Ok(DVector::from_vec(alpha.value(x)?.apply(v)))
}

/// Tangent coordinates `v` with `alpha_U(v) = xi`.
pub fn beta_inverse(alpha: &TensorialOneForm, xi: &[f64], x: &[f64]) -> Result<DVector<f64>> {
    let mat = square_alpha(alpha, x)?;
    if xi.len() != mat.nrows() {
        return Err(GeomError::DimensionMismatch {
            context: "algebra element",
            expected: mat.nrows(),
            found: xi.len(),
        });
    }
    solve_alpha(&mat, &DVector::from_column_slice(xi))
}

pub(crate) fn solve_alpha(mat: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let det = mat.determinant();
    if det.abs() <= ADMISSIBILITY_THRESHOLD {
        return Err(GeomError::Singular { what: "alpha", det });
    }
    mat.clone()
        .lu()
        .solve(rhs)
        .ok_or(GeomError::Singular { what: "alpha", det })
}

/// Largest pointwise defects of the four gauge identities at `x`:
/// curvature, sum of a connection and a tensorial form, covariant derivative,
/// and the wedge bracket of `alpha` with `other`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivarianceDefects {
    pub curvature: f64,
    pub sum: f64,
    pub covariant: f64,
    pub wedge: f64,
}

impl EquivarianceDefects {
    pub fn max(&self) -> f64 {
        self.curvature.max(self.sum).max(self.covariant).max(self.wedge)
    }
}

/// Precomputed forms for evaluating [`EquivarianceDefects`] on many points.
pub struct EquivarianceProbe {
    lhs: [AlgForm; 4],
    rhs: [AlgForm; 4],
}

impl EquivarianceProbe {
    pub fn new(
        h: &LocalGaugeTransformation,
        t: &LocalTriple,
        other: &TensorialOneForm,
    ) -> Result<Self> {
        let a = t.connection();
        let alpha = t.alpha();
        let a_g = gauge_connection(h, a)?;
        let alpha_g = TensorialOneForm::new(gauge_tensorial(h, alpha.form())?)?;
        let other_g = TensorialOneForm::new(gauge_tensorial(h, other.form())?)?;

        let sum = LocalConnection::new(a.form().add(alpha.form())?)?;
        let wedge = crate::fields::wedge_bracket(alpha.form(), other.form())?;

        Ok(Self {
            lhs: [
                curvature(&a_g)?,
                gauge_connection(h, &sum)?.form().clone(),
                covariant_exterior_derivative(&alpha_g, &a_g)?,
                crate::fields::wedge_bracket(alpha_g.form(), other_g.form())?,
            ],
            rhs: [
                gauge_tensorial(h, &curvature(a)?)?,
                a_g.form().add(alpha_g.form())?,
                gauge_tensorial(h, &covariant_exterior_derivative(alpha, a)?)?,
                gauge_tensorial(h, &wedge)?,
            ],
        })
    }

    pub fn defects(&self, x: &[f64]) -> Result<EquivarianceDefects> {
        let mut d = [0.0; 4];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = self.lhs[k].value(x)?.max_abs_diff(&self.rhs[k].value(x)?);
        }
        Ok(EquivarianceDefects {
            curvature: d[0],
            sum: d[1],
            covariant: d[2],
            wedge: d[3],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{so3_of, complexify};

    fn chart() -> Arc<Chart> {
        Arc::new(Chart::boxed(vec![(-1.0, 1.0); 3]).unwrap())
    }

    fn so3() -> Arc<LieAlgebra> {
        Arc::new(LieAlgebra::so3())
    }

    fn identity_alpha() -> TensorialOneForm {
        let mut c = vec![0.0; 9];
        for i in 0..3 {
            c[i * 3 + i] = 1.0;
        }
        TensorialOneForm::new(AlgForm::constant(1, chart(), so3(), c).unwrap()).unwrap()
    }

    fn wavy_connection() -> LocalConnection {
        LocalConnection::new(
            AlgForm::new(
                1,
                chart(),
                so3(),
                Arc::new(|x| {
                    Ok((0..9)
                        .map(|k| (0.3 * k as f64 + x[k % 3]).sin() * 0.4)
                        .collect())
                }),
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn triple(alpha: TensorialOneForm, a: LocalConnection) -> LocalTriple {
        LocalTriple::new(
            alpha,
            a,
            TripleMeta {
                scenario: "test".into(),
                expected_integrable: None,
            },
        )
        .unwrap()
        .with_group(Arc::new(MatrixGroup::so3()))
        .unwrap()
    }

    #[test]
    fn curvature_of_zero_connection_vanishes() {
        let a = LocalConnection::new(AlgForm::zero(1, chart(), so3()).unwrap()).unwrap();
        assert_eq!(curvature(&a).unwrap().value(&[0.1, 0.2, 0.3]).unwrap().amax(), 0.0);
    }

    #[test]
    fn curvature_of_constant_connection_is_bracket() {
        let comps: Vec<f64> = vec![0.5, -1.0, 0.2, 0.3, 0.0, 1.5, -0.7, 0.4, 0.9];
        let a = LocalConnection::new(AlgForm::constant(1, chart(), so3(), comps.clone()).unwrap())
            .unwrap();
        let omega = curvature(&a).unwrap().value(&[0.0; 3]).unwrap();
        let alg = LieAlgebra::so3();
        for i in 0..3 {
            for j in 0..3 {
                let expect = alg.bracket(&comps[i * 3..i * 3 + 3], &comps[j * 3..j * 3 + 3]).unwrap();
                for k in 0..3 {
                    assert!((omega.two(i, j)[k] - expect[k]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn abelian_curvature_is_exterior_derivative() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let a = LocalConnection::new(
            AlgForm::new(1, chart(), alg, Arc::new(|x| Ok(vec![0.0, x[0] * x[0], 0.0]))).unwrap(),
        )
        .unwrap();
        let omega = curvature(&a).unwrap().value(&[0.25, 0.0, 0.0]).unwrap();
        assert!((omega.two(0, 1)[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn covariant_derivative_of_constant_with_zero_connection() {
        let a = LocalConnection::new(AlgForm::zero(1, chart(), so3()).unwrap()).unwrap();
        let d = covariant_exterior_derivative(&identity_alpha(), &a).unwrap();
        assert_eq!(d.value(&[0.0, 0.5, -0.5]).unwrap().amax(), 0.0);
    }

    #[test]
    fn identity_gauge_leaves_triple_unchanged() {
        let t = triple(identity_alpha(), wavy_connection());
        let h = LocalGaugeTransformation::identity(Arc::new(MatrixGroup::so3()), chart());
        let t2 = gauge_act(&h, &t).unwrap();
        let x = [0.3, -0.2, 0.1];
        assert!(t2.alpha().value(&x).unwrap().max_abs_diff(&t.alpha().value(&x).unwrap()) < 1e-15);
        assert!(
            t2.connection().value(&x).unwrap().max_abs_diff(&t.connection().value(&x).unwrap())
                < 1e-15
        );
    }

    #[test]
    fn constant_gauge_is_adjoint_action() {
        let group = Arc::new(MatrixGroup::so3());
        let g = crate::lie::matrix_exp(&complexify(&so3_of([0.3, -0.5, 0.8]))).unwrap();
        let h = LocalGaugeTransformation::constant(group.clone(), chart(), g.clone());
        let t = triple(identity_alpha(), wavy_connection());
        let t2 = gauge_act(&h, &t).unwrap();
        let x = [0.1, 0.2, 0.3];
        let a = t.connection().value(&x).unwrap();
        let a2 = t2.connection().value(&x).unwrap();
        for i in 0..3 {
            let expect = group.adjoint(&g, a.one(i)).unwrap();
            for k in 0..3 {
                assert!((a2.one(i)[k] - expect[k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn four_identities_hold_for_random_gauge() {
        let t = triple(identity_alpha(), wavy_connection());
        let other = TensorialOneForm::new(
            AlgForm::new(1, chart(), so3(), Arc::new(|x| Ok((0..9).map(|k| (k as f64 * x[1]).cos()).collect())))
                .unwrap(),
        )
        .unwrap();
        let h = LocalGaugeTransformation::random_smooth(Arc::new(MatrixGroup::so3()), chart(), 3);
        let probe = EquivarianceProbe::new(&h, &t, &other).unwrap();
        for x in [[0.0, 0.0, 0.0], [0.4, -0.3, 0.5], [-0.6, 0.2, 0.1]] {
            let d = probe.defects(&x).unwrap();
            assert!(d.max() < 1e-8, "{d:?}");
        }
    }

    #[test]
    fn admissibility_cases() {
        let zero = TensorialOneForm::new(AlgForm::zero(1, chart(), so3()).unwrap()).unwrap();
        let a = admissibility(&zero, &[0.0; 3]).unwrap();
        assert_eq!(a, Admissibility { det: 0.0, admissible: false });

        let alpha = identity_alpha();
        assert_eq!(admissibility(&alpha, &[0.0; 3]).unwrap().det, 1.0);
        let scaled = TensorialOneForm::new(alpha.form().scaled(2.0)).unwrap();
        assert!((admissibility(&scaled, &[0.0; 3]).unwrap().det - 8.0).abs() < 1e-12);
    }

    #[test]
    fn non_square_alpha_is_structured_error() {
        let chart2 = Arc::new(Chart::boxed(vec![(-1.0, 1.0); 2]).unwrap());
        let alpha = TensorialOneForm::new(AlgForm::zero(1, chart2, so3()).unwrap()).unwrap();
        assert!(matches!(
            admissibility(&alpha, &[0.0, 0.0]),
            Err(GeomError::NonSquareAlpha { chart_dim: 2, algebra_dim: 3 })
        ));
    }

    #[test]
    fn beta_round_trip_and_singular() {
        let alpha = identity_alpha();
        assert_eq!(beta_apply(&alpha, &[0.0, 1.0, 0.0], &[0.0; 3]).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(beta_inverse(&alpha, &[0.0; 3], &[0.0; 3]).unwrap().amax(), 0.0);
        let zero = TensorialOneForm::new(AlgForm::zero(1, chart(), so3()).unwrap()).unwrap();
        assert!(matches!(beta_inverse(&zero, &[1.0, 0.0, 0.0], &[0.0; 3]), Err(GeomError::Singular { .. })));
    }

    #[test]
    fn gauge_rejects_mismatched_algebra() {
        let alg = Arc::new(LieAlgebra::abelian(3).unwrap());
        let form = AlgForm::zero(1, chart(), alg).unwrap();
        let h = LocalGaugeTransformation::identity(Arc::new(MatrixGroup::so3()), chart());
        assert!(matches!(gauge_tensorial(&h, &form), Err(GeomError::AlgebraMismatch)));
    }
}

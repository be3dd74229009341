//! Lie-algebra-valued 0-, 1- and 2-forms on a chart.
//!
//! A form is an evaluation callback returning all components at once, in the
//! layout of [`FormValue`], plus an optional callback for its coordinate
//! partial derivatives. Without the latter, derivatives come from a
//! fourth-order central stencil.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chart::Chart;
use crate::error::{GeomError, Result};
use crate::lie::LieAlgebra;

pub type EvalFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
/// Returns one component vector per coordinate direction.
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<Vec<f64>>> + Send + Sync>;

/// Default finite-difference step as a fraction of each axis' extent.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

const ANTISYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdStep {
    /// Fraction of the axis extent.
    Relative(f64),
    Absolute(f64),
}

impl Default for FdStep {
    fn default() -> Self {
        FdStep::Relative(DEFAULT_RELATIVE_STEP)
    }
}

impl FdStep {
    pub fn scaled(self, factor: f64) -> Self {
        match self {
            FdStep::Relative(r) => FdStep::Relative(r * factor),
            FdStep::Absolute(h) => FdStep::Absolute(h * factor),
        }
    }

    pub fn for_axis(self, chart: &Chart, axis: usize) -> f64 {
        match self {
            FdStep::Relative(r) => r * chart.extent(axis),
            FdStep::Absolute(h) => h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    ClosedForm,
    FiniteDifference(FdStep),
}

impl Default for DerivativeMode {
    fn default() -> Self {
        DerivativeMode::FiniteDifference(FdStep::default())
    }
}

/// Components of a form at one point.
///
/// Layout: degree 0 is `[a]`, degree 1 is `[i][a]`, degree 2 is `[i][j][a]`,
/// with `i, j` chart indices and `a` the algebra coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    degree: usize,
    dim: usize,
    alg_dim: usize,
    data: Vec<f64>,
}

pub(crate) fn component_count(degree: usize, dim: usize, alg_dim: usize) -> usize {
    dim.pow(degree as u32) * alg_dim
}

impl FormValue {
    pub fn zeros(degree: usize, dim: usize, alg_dim: usize) -> Self {
        Self {
            degree,
            dim,
            alg_dim,
            data: vec![0.0; component_count(degree, dim, alg_dim)],
        }
    }

    pub fn from_data(degree: usize, dim: usize, alg_dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = component_count(degree, dim, alg_dim);
        if data.len() != expected {
            return Err(GeomError::DimensionMismatch {
                context: "form components",
                expected,
                found: data.len(),
            });
        }
        Ok(Self {
            degree,
            dim,
            alg_dim,
            data,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alg_dim(&self) -> usize {
        self.alg_dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Value of a 0-form.
    pub fn scalar(&self) -> &[f64] {
        debug_assert_eq!(self.degree, 0);
        &self.data
    }

    /// `lambda(d_i)` of a 1-form.
    pub fn one(&self, i: usize) -> &[f64] {
        debug_assert_eq!(self.degree, 1);
        let n = self.alg_dim;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn one_mut(&mut self, i: usize) -> &mut [f64] {
        let n = self.alg_dim;
        &mut self.data[i * n..(i + 1) * n]
    }

    /// `omega(d_i, d_j)` of a 2-form.
    pub fn two(&self, i: usize, j: usize) -> &[f64] {
        debug_assert_eq!(self.degree, 2);
        let n = self.alg_dim;
        let o = (i * self.dim + j) * n;
        &self.data[o..o + n]
    }

    pub fn two_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let n = self.alg_dim;
        let o = (i * self.dim + j) * n;
        &mut self.data[o..o + n]
    }

    /// `lambda(v)` for a 1-form and tangent coordinates `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.alg_dim];
        for (i, vi) in v.iter().enumerate() {
            for (o, c) in out.iter_mut().zip(self.one(i)) {
                *o += vi * c;
            }
        }
        out
    }

    /// `omega(u, v)` for a 2-form.
    pub fn apply_pair(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.alg_dim];
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                let w = ui * vj;
                if w == 0.0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(self.two(i, j)) {
                    *o += w * c;
                }
            }
        }
        out
    }

    pub fn axpy(&mut self, scale: f64, other: &FormValue) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn amax(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &FormValue) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Index tuples of the independent components (`i < j` for 2-forms).
    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        match self.degree {
            0 => vec![vec![]],
            1 => (0..self.dim).map(|i| vec![i]).collect(),
            _ => (0..self.dim)
                .flat_map(|i| (i + 1..self.dim).map(move |j| vec![i, j]))
                .collect(),
        }
    }

    pub fn component(&self, idx: &[usize]) -> &[f64] {
        match idx {
            [] => self.scalar(),
            [i] => self.one(*i),
            [i, j] => self.two(*i, *j),
            _ => &[],
        }
    }

    fn antisymmetry_defect(&self) -> f64 {
        if self.degree != 2 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                for (a, b) in self.two(i, j).iter().zip(self.two(j, i)) {
                    worst = worst.max((a + b).abs());
                }
            }
        }
        worst
    }
}

/// Fourth-order central differences of `f` along every axis of `x`, with
/// per-axis steps. No domain checks.
pub fn central_partials<F>(x: &[f64], steps: &[f64], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut out = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for (axis, &h) in steps.iter().enumerate() {
        let x0 = x[axis];
        if !(h > 0.0) || x0 + h == x0 || h < 1e-13 * x0.abs().max(1.0) {
            return Err(GeomError::StepUnderflow {
                step: h,
                coordinate: x0,
            });
        }
        let mut eval = |offset: f64| -> Result<Vec<f64>> {
            probe[axis] = x0 + offset;
            let v = f(&probe);
            probe[axis] = x0;
            v
        };
        let p2 = eval(2.0 * h)?;
        let p1 = eval(h)?;
        let m1 = eval(-h)?;
        let m2 = eval(-2.0 * h)?;
        let denom = 12.0 * h;
        out.push(
            (0..p1.len())
                .map(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / denom)
                .collect(),
        );
    }
    Ok(out)
}

/// Central differences on a chart; rejects points whose stencil would leave it.
pub fn chart_partials<F>(chart: &Chart, x: &[f64], step: FdStep, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    chart.check_contains(x)?;
    let steps: Vec<f64> = (0..chart.dim()).map(|a| step.for_axis(chart, a)).collect();
    for (axis, &h) in steps.iter().enumerate() {
        let (lo, hi) = chart.bounds()[axis];
        if x[axis] - 2.0 * h < lo || x[axis] + 2.0 * h > hi {
            return Err(GeomError::BoundaryProximity {
                point: x.to_vec(),
                axis,
                step: h,
            });
        }
    }
    central_partials(x, &steps, f)
}

#[derive(Clone)]
pub struct AlgForm {
    degree: usize,
    chart: Arc<Chart>,
    algebra: Arc<LieAlgebra>,
    eval: EvalFn,
    closed_partials: Option<PartialsFn>,
    mode: DerivativeMode,
}

impl fmt::Debug for AlgForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgForm")
            .field("degree", &self.degree)
            .field("chart", &self.chart)
            .field("algebra", &self.algebra.labels())
            .field("mode", &self.mode)
            .finish()
    }
}

impl AlgForm {
    /// Form with finite-difference derivatives.
    pub fn new(
        degree: usize,
        chart: Arc<Chart>,
        algebra: Arc<LieAlgebra>,
        eval: EvalFn,
    ) -> Result<Self> {
        if degree > 2 {
            return Err(GeomError::UnsupportedDegree(degree));
        }
        Ok(Self {
            degree,
            chart,
            algebra,
            eval,
            closed_partials: None,
            mode: DerivativeMode::default(),
        })
    }

    /// Form with closed-form partial derivatives.
    pub fn with_partials(
        degree: usize,
        chart: Arc<Chart>,
        algebra: Arc<LieAlgebra>,
        eval: EvalFn,
        partials: PartialsFn,
    ) -> Result<Self> {
        let mut form = Self::new(degree, chart, algebra, eval)?;
        form.closed_partials = Some(partials);
        form.mode = DerivativeMode::ClosedForm;
        Ok(form)
    }

    /// Constant form; its partials vanish identically.
    pub fn constant(
        degree: usize,
        chart: Arc<Chart>,
        algebra: Arc<LieAlgebra>,
        components: Vec<f64>,
    ) -> Result<Self> {
        let expected = component_count(degree, chart.dim(), algebra.dim());
        if components.len() != expected {
            return Err(GeomError::DimensionMismatch {
                context: "constant form",
                expected,
                found: components.len(),
            });
        }
        let dim = chart.dim();
        let zero = vec![0.0; expected];
        let values = components.clone();
        Self::with_partials(
            degree,
            chart,
            algebra,
            Arc::new(move |_| Ok(values.clone())),
            Arc::new(move |_| Ok(vec![zero.clone(); dim])),
        )
    }

    pub fn zero(degree: usize, chart: Arc<Chart>, algebra: Arc<LieAlgebra>) -> Result<Self> {
        let len = component_count(degree, chart.dim(), algebra.dim());
        Self::constant(degree, chart, algebra, vec![0.0; len])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn derivative_mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_partials.is_some()
    }

    /// Switches how partials are computed. Closed form needs a derivative callback.
    pub fn with_mode(mut self, mode: DerivativeMode) -> Result<Self> {
        if mode == DerivativeMode::ClosedForm && self.closed_partials.is_none() {
            return Err(GeomError::InvalidConfig(
                "closed-form derivatives requested for a form without them".into(),
            ));
        }
        self.mode = mode;
        Ok(self)
    }

    fn component_len(&self) -> usize {
        component_count(self.degree, self.chart.dim(), self.algebra.dim())
    }

    fn wrap(&self, data: Vec<f64>) -> Result<FormValue> {
        FormValue::from_data(self.degree, self.chart.dim(), self.algebra.dim(), data)
    }

    pub fn value(&self, x: &[f64]) -> Result<FormValue> {
        self.chart.check_contains(x)?;
        let data = (self.eval)(x)?;
        if data.len() != self.component_len() {
            return Err(GeomError::DimensionMismatch {
                context: "form evaluation",
                expected: self.component_len(),
                found: data.len(),
            });
        }
        let v = self.wrap(data)?;
        let defect = v.antisymmetry_defect();
        if defect > ANTISYMMETRY_TOL * v.amax().max(1.0) {
            return Err(GeomError::InvalidConfig(format!(
                "2-form components are not antisymmetric (defect {defect:.3e})"
            )));
        }
        Ok(v)
    }

    /// Partials `d_k` of every component, one [`FormValue`] per direction.
    pub fn partials(&self, x: &[f64]) -> Result<Vec<FormValue>> {
        match (self.mode, &self.closed_partials) {
            (DerivativeMode::ClosedForm, Some(p)) => {
                self.chart.check_contains(x)?;
                p(x)?.into_iter().map(|d| self.wrap(d)).collect()
            }
            (DerivativeMode::FiniteDifference(step), _) => self.fd_partials(x, step),
            (DerivativeMode::ClosedForm, None) => self.fd_partials(x, FdStep::default()),
        }
    }

    pub fn fd_partials(&self, x: &[f64], step: FdStep) -> Result<Vec<FormValue>> {
        let eval = &self.eval;
        let chart = &self.chart;
        chart_partials(chart, x, step, |p| {
            chart.check_contains(p)?;
            eval(p)
        })?
        .into_iter()
        .map(|d| self.wrap(d))
        .collect()
    }

    /// Step used when this form's partials are finite differences, else the default.
    pub(crate) fn fd_step(&self) -> FdStep {
        match self.mode {
            DerivativeMode::FiniteDifference(step) => step,
            DerivativeMode::ClosedForm => FdStep::default(),
        }
    }

    pub(crate) fn check_compatible(&self, other: &AlgForm) -> Result<()> {
        if self.algebra != other.algebra && *self.algebra != *other.algebra {
            return Err(GeomError::AlgebraMismatch);
        }
        if self.chart != other.chart && *self.chart != *other.chart {
            return Err(GeomError::ChartMismatch);
        }
        Ok(())
    }

    /// Pointwise sum of two forms of equal degree.
    pub fn add(&self, other: &AlgForm) -> Result<AlgForm> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(GeomError::UnsupportedDegree(other.degree));
        }
        let (a, b) = (self.clone(), other.clone());
        let eval: EvalFn = Arc::new(move |x| {
            let mut u = a.value(x)?;
            u.axpy(1.0, &b.value(x)?);
            Ok(u.into_data())
        });
        let mut out = AlgForm::new(self.degree, self.chart.clone(), self.algebra.clone(), eval)?;
        if self.mode == DerivativeMode::ClosedForm && other.mode == DerivativeMode::ClosedForm {
            let (a, b) = (self.clone(), other.clone());
            out.closed_partials = Some(Arc::new(move |x| {
                let pa = a.partials(x)?;
                let pb = b.partials(x)?;
                Ok(pa
                    .into_iter()
                    .zip(pb)
                    .map(|(mut u, v)| {
                        u.axpy(1.0, &v);
                        u.into_data()
                    })
                    .collect())
            }));
            out.mode = DerivativeMode::ClosedForm;
        } else {
            out.mode = DerivativeMode::FiniteDifference(self.fd_step());
        }
        Ok(out)
    }

    /// `t * self`.
    pub fn scaled(&self, t: f64) -> AlgForm {
        let a = self.clone();
        let b = self.clone();
        let mut out = self.clone();
        out.eval = Arc::new(move |x| Ok(a.value(x)?.data.iter().map(|v| t * v).collect()));
        if self.closed_partials.is_some() {
            out.closed_partials = Some(Arc::new(move |x| {
                Ok(b.partials(x)?
                    .into_iter()
                    .map(|d| d.data.iter().map(|v| t * v).collect())
                    .collect())
            }));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Arc::new(Chart::boxed(vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap())
    }

    #[test]
    fn fourth_order_stencil_on_sine() {
        // sin(x1) dx2 with h = 1e-3: derivative along x1 is cos(x1) on component 2
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let form = AlgForm::new(
            1,
            chart(),
            alg,
            Arc::new(|x| Ok(vec![0.0, x[0].sin()])),
        )
        .unwrap()
        .with_mode(DerivativeMode::FiniteDifference(FdStep::Absolute(1e-3)))
        .unwrap();
        let d = form.partials(&[0.5, 0.1]).unwrap();
        assert!((d[0].one(1)[0] - 0.5f64.cos()).abs() < 1e-9);
        assert!(d[1].amax() < 1e-12);
    }

    #[test]
    fn stencil_rejects_points_near_boundary() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let form = AlgForm::new(0, chart(), alg, Arc::new(|x| Ok(vec![x[0]]))).unwrap();
        assert!(matches!(
            form.partials(&[1.0 - 1e-5, 0.0]),
            Err(GeomError::BoundaryProximity { axis: 0, .. })
        ));
        assert!(matches!(form.value(&[1.5, 0.0]), Err(GeomError::OutOfChart { .. })));
    }

    #[test]
    fn step_underflow_is_reported() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let form = AlgForm::new(0, chart(), alg, Arc::new(|x| Ok(vec![x[0]])))
            .unwrap()
            .with_mode(DerivativeMode::FiniteDifference(FdStep::Absolute(1e-300)))
            .unwrap();
        assert!(matches!(form.partials(&[0.5, 0.0]), Err(GeomError::StepUnderflow { .. })));
    }

    #[test]
    fn closed_form_mode_requires_callback() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let form = AlgForm::new(0, chart(), alg, Arc::new(|x| Ok(vec![x[0]]))).unwrap();
        assert!(form.with_mode(DerivativeMode::ClosedForm).is_err());
    }

    #[test]
    fn degree_three_is_refused() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        assert!(matches!(
            AlgForm::new(3, chart(), alg, Arc::new(|_| Ok(vec![]))),
            Err(GeomError::UnsupportedDegree(3))
        ));
    }

    #[test]
    fn non_antisymmetric_two_form_is_rejected() {
        let alg = Arc::new(LieAlgebra::abelian(1).unwrap());
        let form = AlgForm::new(2, chart(), alg, Arc::new(|_| Ok(vec![0.0, 1.0, 1.0, 0.0]))).unwrap();
        assert!(form.value(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn apply_pair_is_bilinear() {
        let v = FormValue::from_data(2, 2, 1, vec![0.0, 2.0, -2.0, 0.0]).unwrap();
        assert_eq!(v.apply_pair(&[1.0, 0.0], &[0.0, 1.0]), vec![2.0]);
        assert_eq!(v.apply_pair(&[3.0, 1.0], &[1.0, 2.0]), vec![3.0 * 2.0 * 2.0 - 2.0]);
    }
}

//! Riemannian metrics on a chart and the classical curvature oracles built
//! only from `g_ij`: Christoffel symbols, Riemann tensor, sectional curvature.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::fields::{central_partials, chart_partials, Chart, FdStep};
use crate::gauge::LocalTriple;
use crate::zentner::alpha_metric;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;
pub type MetricPartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<DMatrix<f64>>> + Send + Sync>;

#[derive(Clone)]
pub struct MetricChart {
    chart: Arc<Chart>,
    metric: MetricFn,
    partials: Option<MetricPartialsFn>,
    orientation: i8,
    step: FdStep,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("chart", &self.chart)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl MetricChart {
    pub fn new(chart: Arc<Chart>, metric: MetricFn) -> Self {
        Self {
            chart,
            metric,
            partials: None,
            orientation: 1,
            step: FdStep::default(),
        }
    }

    pub fn with_partials(mut self, partials: MetricPartialsFn) -> Self {
        self.partials = Some(partials);
        self
    }

    pub fn with_orientation(mut self, orientation: i8) -> Self {
        self.orientation = if orientation < 0 { -1 } else { 1 };
        self
    }

    pub fn with_step(mut self, step: FdStep) -> Self {
        self.step = step;
        self
    }

    pub fn euclidean(chart: Arc<Chart>) -> Self {
        let m = chart.dim();
        Self::new(chart, Arc::new(move |_| Ok(DMatrix::identity(m, m))))
    }

    /// `g = e^{2 phi} delta`.
    pub fn conformally_flat<F>(chart: Arc<Chart>, phi: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let m = chart.dim();
        Self::new(
            chart,
            Arc::new(move |x| Ok(DMatrix::identity(m, m) * (2.0 * phi(x)).exp())),
        )
    }

    /// Upper half-space metric `z^{-2} delta`.
    pub fn halfspace(chart: Arc<Chart>) -> Self {
        let last = chart.dim() - 1;
        Self::conformally_flat(chart, move |x| -x[last].ln())
    }

    /// Round unit sphere in stereographic coordinates, `4 (1 + r^2)^{-2} delta`.
    pub fn stereographic_sphere(chart: Arc<Chart>) -> Self {
        Self::conformally_flat(chart, |x| {
            2f64.ln() - (1.0 + x.iter().map(|v| v * v).sum::<f64>()).ln()
        })
    }

    /// `g_alpha` of a triple, oriented by the sign of `det alpha` at the chart center.
    pub fn from_triple(t: &LocalTriple) -> Result<Self> {
        let center = t.chart().center();
        let det = crate::gauge::admissibility(t.alpha(), &center)?.det;
        let triple = t.clone();
        Ok(Self::new(t.chart().clone(), Arc::new(move |x| alpha_metric(&triple, x)))
            .with_orientation(if det < 0.0 { -1 } else { 1 })
            .with_step(t.alpha().form().fd_step()))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn metric(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.chart.check_contains(x)?;
        let g = (self.metric)(x)?;
        let m = self.chart.dim();
        if g.nrows() != m || g.ncols() != m {
            return Err(GeomError::DimensionMismatch {
                context: "metric",
                expected: m,
                found: g.nrows(),
            });
        }
        Ok(g)
    }

    fn metric_partials(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        if let Some(p) = &self.partials {
            return p(x);
        }
        let m = self.chart.dim();
        let raw = chart_partials(&self.chart, x, self.step, |p| {
            Ok(self.metric(p)?.iter().copied().collect())
        })?;
        Ok(raw
            .into_iter()
            .map(|d| DMatrix::from_column_slice(m, m, &d))
            .collect())
    }

    /// `Gamma^k_ij`, flattened as `(k * m + i) * m + j`.
    fn christoffel_flat(&self, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.chart.dim();
        let g = self.metric(x)?;
        let det = g.determinant();
        let g_inv = g.try_inverse().ok_or(GeomError::Singular { what: "metric", det })?;
        let dg = self.metric_partials(x)?;
        let mut out = vec![0.0; m * m * m];
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut s = 0.0;
                    for l in 0..m {
                        s += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    out[(k * m + i) * m + j] = 0.5 * s;
                }
            }
        }
        Ok(out)
    }
}

/// Christoffel symbols of the Levi-Civita connection, `gamma[k][i][j] = Gamma^k_ij`.
pub fn levi_civita_oracle(mc: &MetricChart, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = mc.chart.dim();
    let flat = mc.christoffel_flat(x)?;
    Ok((0..m)
        .map(|k| {
            (0..m)
                .map(|i| (0..m).map(|j| flat[(k * m + i) * m + j]).collect())
                .collect()
        })
        .collect())
}

/// `riemann[l][k][i][j] = R^l_kij` with `R(d_i, d_j) d_k = R^l_kij d_l`.
pub fn riemann_oracle(mc: &MetricChart, x: &[f64]) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
    let chart = &mc.chart;
    let m = chart.dim();
    let steps: Vec<f64> = (0..m).map(|a| mc.step.for_axis(chart, a)).collect();
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
    let g = mc.christoffel_flat(x)?;
    let dg = central_partials(x, &steps, |p| mc.christoffel_flat(p))?;
    let at = |k: usize, i: usize, j: usize| g[(k * m + i) * m + j];
    let dat = |a: usize, k: usize, i: usize, j: usize| dg[a][(k * m + i) * m + j];
    let mut r = vec![vec![vec![vec![0.0; m]; m]; m]; m];
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut v = dat(i, l, j, k) - dat(j, l, i, k);
                    for s in 0..m {
                        v += at(s, j, k) * at(l, i, s) - at(s, i, k) * at(l, j, s);
                    }
                    r[l][k][i][j] = v;
                }
            }
        }
    }
    Ok(r)
}

/// Sectional curvature `<R(u, v) v, u> / (|u|^2 |v|^2 - <u, v>^2)`.
pub fn riemann_sectional_oracle(mc: &MetricChart, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    let m = mc.chart.dim();
    if u.len() != m || v.len() != m {
        return Err(GeomError::DimensionMismatch {
            context: "plane",
            expected: m,
            found: u.len().min(v.len()),
        });
    }
    let g = mc.metric(x)?;
    let (uu, vv) = (DVector::from_column_slice(u), DVector::from_column_slice(v));
    let area = (uu.transpose() * &g * &uu)[0] * (vv.transpose() * &g * &vv)[0]
        - (uu.transpose() * &g * &vv)[0].powi(2);
    let scale = (uu.transpose() * &g * &uu)[0] * (vv.transpose() * &g * &vv)[0];
    if area <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(GeomError::DegeneratePlane);
    }
    let r = riemann_oracle(mc, x)?;
    let mut w = DVector::zeros(m);
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    w[l] += r[l][k][i][j] * u[i] * v[j] * v[k];
                }
            }
        }
    }
    Ok((w.transpose() * &g * &uu)[0] / area)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halfspace_chart() -> Arc<Chart> {
        Arc::new(Chart::boxed(vec![(-1.25, 1.25), (-1.25, 1.25), (0.4, 2.25)]).unwrap())
    }

    #[test]
    fn euclidean_has_no_christoffels_or_curvature() {
        let mc = MetricChart::euclidean(halfspace_chart());
        let x = [0.1, 0.2, 1.0];
        let g = levi_civita_oracle(&mc, &x).unwrap();
        assert!(g.iter().flatten().flatten().all(|v| *v == 0.0));
        let k = riemann_sectional_oracle(&mc, &x, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(k, 0.0);
    }

    #[test]
    fn halfspace_christoffels_at_unit_height() {
        let mc = MetricChart::halfspace(halfspace_chart());
        let g = levi_civita_oracle(&mc, &[0.0, 0.0, 1.0]).unwrap();
        // Gamma^1_13 = Gamma^1_31 = -1, Gamma^3_11 = 1, Gamma^3_33 = -1
        assert!((g[0][0][2] + 1.0).abs() < 1e-9);
        assert!((g[0][2][0] + 1.0).abs() < 1e-9);
        assert!((g[2][0][0] - 1.0).abs() < 1e-9);
        assert!((g[2][2][2] + 1.0).abs() < 1e-9);
        assert!(g[1][0][0].abs() < 1e-9);
    }

    #[test]
    fn constant_rescaling_leaves_christoffels() {
        let chart = halfspace_chart();
        let base = MetricChart::halfspace(chart.clone());
        let scaled = MetricChart::conformally_flat(chart, |x| 3f64.ln() - x[2].ln());
        let x = [0.3, -0.2, 1.3];
        let a = levi_civita_oracle(&base, &x).unwrap();
        let b = levi_civita_oracle(&scaled, &x).unwrap();
        for (p, q) in a.iter().flatten().flatten().zip(b.iter().flatten().flatten()) {
            assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn constant_curvature_models() {
        let h = MetricChart::halfspace(halfspace_chart());
        let k = riemann_sectional_oracle(&h, &[0.2, 0.1, 1.1], &[1.0, 0.3, 0.0], &[0.0, 1.0, 0.5])
            .unwrap();
        assert!((k + 1.0).abs() < 1e-3, "{k}");

        let s = MetricChart::stereographic_sphere(Arc::new(Chart::boxed(vec![(-1.2, 1.2); 3]).unwrap()));
        let k = riemann_sectional_oracle(&s, &[0.2, -0.4, 0.3], &[1.0, 0.0, 0.2], &[0.1, 1.0, 0.0])
            .unwrap();
        assert!((k - 1.0).abs() < 1e-3, "{k}");
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let mc = MetricChart::euclidean(halfspace_chart());
        assert!(matches!(
            riemann_sectional_oracle(&mc, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0]),
            Err(GeomError::DegeneratePlane)
        ));
    }
}

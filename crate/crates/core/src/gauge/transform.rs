use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::fields::{chart_partials, Chart, FdStep};
use crate::lie::{matrix_exp, CMatrix, Complex, MatrixGroup};

pub type GroupMapFn = Arc<dyn Fn(&[f64]) -> Result<CMatrix> + Send + Sync>;
pub type GroupPartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<CMatrix>> + Send + Sync>;

/// A smooth map `x -> h(x)` from a chart into a matrix group.
#[derive(Clone)]
pub struct LocalGaugeTransformation {
    group: Arc<MatrixGroup>,
    chart: Arc<Chart>,
    map: GroupMapFn,
    partials: Option<GroupPartialsFn>,
    step: FdStep,
}

impl fmt::Debug for LocalGaugeTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalGaugeTransformation")
            .field("group", &self.group.name())
            .field("closed_form", &self.partials.is_some())
            .finish()
    }
}

impl LocalGaugeTransformation {
    pub fn new(group: Arc<MatrixGroup>, chart: Arc<Chart>, map: GroupMapFn) -> Self {
        Self {
            group,
            chart,
            map,
            partials: None,
            step: FdStep::default(),
        }
    }

    pub fn with_partials(mut self, partials: GroupPartialsFn) -> Self {
        self.partials = Some(partials);
        self
    }

    pub fn identity(group: Arc<MatrixGroup>, chart: Arc<Chart>) -> Self {
        let size = group.matrix_size();
        Self::constant(group, chart, CMatrix::identity(size, size))
    }

    pub fn constant(group: Arc<MatrixGroup>, chart: Arc<Chart>, g: CMatrix) -> Self {
        let dim = chart.dim();
        let zero = CMatrix::zeros(g.nrows(), g.ncols());
        Self::new(group, chart, Arc::new(move |_| Ok(g.clone())))
            .with_partials(Arc::new(move |_| Ok(vec![zero.clone(); dim])))
    }

    /// `h(x) = exp(f_1(x) B_1) ... exp(f_n(x) B_n)` with
    /// `f_k(x) = a_k + sum_j b_kj sin(c_kj x_j + d_kj)`, coefficients drawn from `seed`.
    pub fn random_smooth(group: Arc<MatrixGroup>, chart: Arc<Chart>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = group.algebra().dim();
        let m = chart.dim();
        let coeffs: Vec<SineProfile> = (0..n)
            .map(|_| SineProfile {
                offset: rng.gen_range(-1.0..1.0),
                terms: (0..m)
                    .map(|_| {
                        (
                            rng.gen_range(-0.5..0.5),
                            rng.gen_range(0.5..1.5),
                            rng.gen_range(0.0..TAU),
                        )
                    })
                    .collect(),
            })
            .collect();
        let coeffs = Arc::new(coeffs);
        let basis: Arc<Vec<CMatrix>> = Arc::new(group.basis().to_vec());

        let (c1, b1) = (coeffs.clone(), basis.clone());
        let map: GroupMapFn = Arc::new(move |x| {
            let mut h = CMatrix::identity(b1[0].nrows(), b1[0].ncols());
            for (prof, b) in c1.iter().zip(b1.iter()) {
                h *= matrix_exp(&b.scale(prof.value(x)))?;
            }
            Ok(h)
        });
        let partials: GroupPartialsFn = Arc::new(move |x| {
            let factors = basis
                .iter()
                .zip(coeffs.iter())
                .map(|(b, prof)| matrix_exp(&b.scale(prof.value(x))))
                .collect::<Result<Vec<_>>>()?;
            let size = basis[0].nrows();
            let mut out = Vec::with_capacity(x.len());
            for axis in 0..x.len() {
                let mut total = CMatrix::zeros(size, size);
                for k in 0..factors.len() {
                    let mut term = CMatrix::identity(size, size);
                    for (l, f) in factors.iter().enumerate() {
                        if l == k {
                            term *= (&basis[k] * f).scale(coeffs[k].derivative(x, axis));
                        } else {
                            term *= f;
                        }
                    }
                    total += term;
                }
                out.push(total);
            }
            Ok(out)
        });
        Self::new(group, chart, map).with_partials(partials)
    }

    pub fn group(&self) -> &Arc<MatrixGroup> {
        &self.group
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    /// `h(x)`, checked against the group's membership test.
    pub fn value(&self, x: &[f64]) -> Result<CMatrix> {
        self.chart.check_contains(x)?;
        let h = (self.map)(x)?;
        self.group.check_member(&h)?;
        Ok(h)
    }

    /// `d_i h(x)` for every chart direction.
    pub fn partials(&self, x: &[f64]) -> Result<Vec<CMatrix>> {
        if let Some(p) = &self.partials {
            self.chart.check_contains(x)?;
            return p(x);
        }
        let size = self.group.matrix_size();
        let raw = chart_partials(&self.chart, x, self.step, |p| {
            let h = (self.map)(p)?;
            Ok(h.iter().flat_map(|z| [z.re, z.im]).collect())
        })?;
        Ok(raw
            .into_iter()
            .map(|d| {
                CMatrix::from_iterator(
                    size,
                    size,
                    d.chunks(2).map(|c| Complex::new(c[0], c[1])),
                )
            })
            .collect())
    }

    /// Algebra coordinates of `(d_i h) h^{-1}` for each direction.
    pub fn right_log_derivative(&self, x: &[f64], h: &CMatrix) -> Result<Vec<Vec<f64>>> {
        let h_inv = h.clone().try_inverse().ok_or(GeomError::Singular {
            what: "gauge transformation",
            det: 0.0,
        })?;
        self.partials(x)?
            .iter()
            .map(|dh| Ok(self.group.coordinates(&(dh * &h_inv))?.as_slice().to_vec()))
            .collect()
    }
}

struct SineProfile {
    offset: f64,
    /// `(amplitude, frequency, phase)` per coordinate.
    terms: Vec<(f64, f64, f64)>,
}

impl SineProfile {
    fn value(&self, x: &[f64]) -> f64 {
        self.offset
            + self
                .terms
                .iter()
                .zip(x)
                .map(|((a, c, d), xj)| a * (c * xj + d).sin())
                .sum::<f64>()
    }

    fn derivative(&self, x: &[f64], axis: usize) -> f64 {
        let (a, c, d) = self.terms[axis];
        a * c * (c * x[axis] + d).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_transformation_is_deterministic_and_in_group() {
        let group = Arc::new(MatrixGroup::so3());
        let chart = Arc::new(Chart::boxed(vec![(-1.0, 1.0); 3]).unwrap());
        let a = LocalGaugeTransformation::random_smooth(group.clone(), chart.clone(), 7);
        let b = LocalGaugeTransformation::random_smooth(group.clone(), chart, 7);
        let x = [0.2, -0.3, 0.5];
        let ha = a.value(&x).unwrap();
        assert_eq!(ha, b.value(&x).unwrap());
        assert!(group.membership_defect(&ha) < 1e-12);
    }

    #[test]
    fn closed_form_partials_match_finite_differences() {
        let group = Arc::new(MatrixGroup::su2());
        let chart = Arc::new(Chart::boxed(vec![(-1.0, 1.0); 3]).unwrap());
        let h = LocalGaugeTransformation::random_smooth(group.clone(), chart.clone(), 11);
        let fd = LocalGaugeTransformation::new(group, chart, h.map.clone());
        let x = [0.1, 0.4, -0.2];
        for (a, b) in h.partials(&x).unwrap().iter().zip(fd.partials(&x).unwrap()) {
            assert!((a - b).iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn membership_failure_is_reported() {
        let group = Arc::new(MatrixGroup::so3());
        let chart = Arc::new(Chart::boxed(vec![(-1.0, 1.0); 3]).unwrap());
        let bad = LocalGaugeTransformation::new(
            group,
            chart,
            Arc::new(|x| Ok(CMatrix::identity(3, 3).scale(1.0 + x[0].abs()))),
        );
        assert!(bad.value(&[0.0; 3]).is_ok());
        assert!(matches!(bad.value(&[0.5, 0.0, 0.0]), Err(GeomError::Membership { .. })));
    }
}

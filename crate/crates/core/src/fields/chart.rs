use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// A box-shaped coordinate chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    names: Vec<String>,
    bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(names: Vec<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(GeomError::InvalidChart("dimension must be positive".into()));
        }
        if names.len() != bounds.len() {
            return Err(GeomError::InvalidChart(format!(
                "{} coordinate names for {} axes",
                names.len(),
                bounds.len()
            )));
        }
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(GeomError::InvalidChart(format!(
                    "axis {axis} has degenerate bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { names, bounds })
    }

    /// Chart with coordinates named `x1, x2, ...`.
    pub fn boxed(bounds: Vec<(f64, f64)>) -> Result<Self> {
        let names = (1..=bounds.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, bounds)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn extent(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        hi - lo
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(&self.bounds)
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn check_contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                context: "chart point",
                expected: self.dim(),
                found: x.len(),
            });
        }
        if !self.contains(x) {
            return Err(GeomError::OutOfChart { point: x.to_vec() });
        }
        Ok(())
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

/// Tensor-product grid, last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub counts: Vec<usize>,
    pub bounds: Vec<(f64, f64)>,
}

impl Grid {
    pub fn new(counts: Vec<usize>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if counts.len() != bounds.len() || counts.is_empty() {
            return Err(GeomError::InvalidConfig(
                "grid needs one count per bounded axis".into(),
            ));
        }
        if let Some(c) = counts.iter().find(|c| **c < 2) {
            return Err(GeomError::InvalidConfig(format!(
                "grid counts must be at least 2 per axis (got {c})"
            )));
        }
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
                return Err(GeomError::InvalidConfig(format!(
                    "grid bounds [{lo}, {hi}] are invalid"
                )));
            }
        }
        Ok(Self { counts, bounds })
    }

    pub fn uniform(count: usize, bounds: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(vec![count; bounds.len()], bounds)
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let dim = self.counts.len();
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; dim];
        loop {
            out.push(
                (0..dim)
                    .map(|a| {
                        let (lo, hi) = self.bounds[a];
                        lo + (hi - lo) * idx[a] as f64 / (self.counts[a] - 1) as f64
                    })
                    .collect(),
            );
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < self.counts[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_bounds() {
        assert!(Chart::boxed(vec![(0.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(Chart::boxed(vec![]).is_err());
    }

    #[test]
    fn containment() {
        let c = Chart::boxed(vec![(-1.0, 1.0), (0.5, 2.0)]).unwrap();
        assert!(c.contains(&[1.0, 0.5]));
        assert!(!c.contains(&[0.0, 0.4]));
        assert!(matches!(
            c.check_contains(&[0.0]),
            Err(GeomError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn grid_points_are_ordered_and_include_endpoints() {
        let g = Grid::new(vec![2, 3], vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, -1.0]);
        assert_eq!(pts[1], vec![0.0, 0.0]);
        assert_eq!(pts[5], vec![1.0, 1.0]);
    }

    #[test]
    fn grid_needs_two_points_per_axis() {
        assert!(Grid::new(vec![1, 3], vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
    }
}

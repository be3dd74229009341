//! Torsion and curvature of the canonical invariant connection on a reductive
//! homogeneous space `G/H` with `g = h + m`, `[h, m] in m`:
//! `T(X, Y) = -[X, Y]_m` and `R(X, Y) Z = -[[X, Y]_h, Z]` for `X, Y, Z` in `m`.

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::gauge::{alpha_matrix, curvature, solve_alpha, LocalTriple};
use crate::lie::{LieAlgebra, STRUCTURE_TOL};

#[derive(Debug, Clone)]
pub struct ReductivePairSpec {
    ambient: LieAlgebra,
    h: Vec<usize>,
    m: Vec<usize>,
}

impl ReductivePairSpec {
    /// `h` and `m` are basis indices of `ambient`; together they must list
    /// every index exactly once.
    pub fn new(ambient: LieAlgebra, h: Vec<usize>, m: Vec<usize>) -> Result<Self> {
        let n = ambient.dim();
        let mut seen = vec![false; n];
        for &i in h.iter().chain(&m) {
            if i >= n || seen[i] {
                return Err(GeomError::InvalidAlgebra(format!(
                    "index {i} is out of range or listed twice"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(GeomError::InvalidAlgebra("h and m do not span g".into()));
        }
        let spec = Self { ambient, h, m };
        for &a in &spec.h {
            for &b in &spec.h {
                if spec.m.iter().any(|&k| spec.ambient.c(a, b, k).abs() > STRUCTURE_TOL) {
                    return Err(GeomError::InvalidAlgebra("h is not a subalgebra".into()));
                }
            }
            for &b in &spec.m {
                if spec.h.iter().any(|&k| spec.ambient.c(a, b, k).abs() > STRUCTURE_TOL) {
                    return Err(GeomError::InvalidAlgebra("[h, m] leaves m".into()));
                }
            }
        }
        Ok(spec)
    }

    /// `h + i h` inside the complexification of `h`.
    pub fn real_form(h: &LieAlgebra) -> Self {
        let n = h.dim();
        Self::new(h.complexified(), (0..n).collect(), (n..2 * n).collect())
            .expect("a real form is reductive")
    }

    /// `h = 0`, `m = g`.
    pub fn trivial_subgroup(g: LieAlgebra) -> Self {
        let n = g.dim();
        Self::new(g, Vec::new(), (0..n).collect()).expect("trivial split is reductive")
    }

    pub fn ambient(&self) -> &LieAlgebra {
        &self.ambient
    }

    pub fn h_indices(&self) -> &[usize] {
        &self.h
    }

    pub fn m_indices(&self) -> &[usize] {
        &self.m
    }

    fn project(&self, v: &DVector<f64>, keep: &[usize]) -> DVector<f64> {
        let mut out = DVector::zeros(v.len());
        for &i in keep {
            out[i] = v[i];
        }
        out
    }

    fn check_in_m(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.ambient.dim() {
            return Err(GeomError::DimensionMismatch {
                context: "reductive complement",
                expected: self.ambient.dim(),
                found: v.len(),
            });
        }
        let off = self.h.iter().fold(0.0f64, |m, &i| m.max(v[i].abs()));
        if off > 1e-12 * v.iter().fold(1.0f64, |m, x| m.max(x.abs())) {
            return Err(GeomError::NotInComplement(off));
        }
        Ok(())
    }
}

/// `(T(X, Y), R(X, Y) Z)` in ambient coordinates.
pub fn nomizu_tensors(
    rp: &ReductivePairSpec,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<(DVector<f64>, DVector<f64>)> {
    for v in [x, y, z] {
        rp.check_in_m(v)?;
    }
    let xy = rp.ambient.bracket(x, y)?;
    let torsion = -rp.project(&xy, &rp.m);
    let r = -rp.ambient.bracket(rp.project(&xy, &rp.h).as_slice(), z)?;
    Ok((torsion, r))
}

/// Compares the algebraic curvature `alpha^{-1}[Omega(d_i, d_j), alpha(d_k)]` of a
/// triple with the canonical curvature of the real-form pair built on its
/// algebra, transported through `d_j -> -i alpha(d_j)`. Returns the largest
/// componentwise difference; it vanishes exactly when `Omega = [alpha ^ alpha] / 2`
/// holds at `x`.
pub fn nomizu_curvature_defect(t: &LocalTriple, x: &[f64]) -> Result<f64> {
    let alg = t.algebra();
    let n = alg.dim();
    let rp = ReductivePairSpec::real_form(alg);
    let value = t.alpha().value(x)?;
    let mat = alpha_matrix(&value);
    let omega = curvature(t.connection())?.value(x)?;
    let lift = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; 2 * n];
        for (o, a) in out[n..].iter_mut().zip(v) {
            *o = -a;
        }
        out
    };
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                let (_, r) = nomizu_tensors(
                    &rp,
                    &lift(value.one(i)),
                    &lift(value.one(j)),
                    &lift(value.one(k)),
                )?;
                // r lies in i h: r = -i w, so the tangent vector is alpha^{-1}(w).
                let w = DVector::from_iterator(n, r.iter().skip(n).map(|v| -v));
                let nomizu = solve_alpha(&mat, &w)?;
                let alg_r = solve_alpha(&mat, &alg.bracket(omega.two(i, j), value.one(k))?)?;
                worst = worst.max((nomizu - alg_r).amax());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_form_pair_is_torsion_free() {
        let rp = ReductivePairSpec::real_form(&LieAlgebra::su2());
        let x = [0.0, 0.0, 0.0, 0.3, -1.2, 0.5];
        let y = [0.0, 0.0, 0.0, -0.7, 0.4, 0.9];
        let (t, r) = nomizu_tensors(&rp, &x, &y, &x).unwrap();
        assert_eq!(t.amax(), 0.0);
        // R = -[[X, Y], Z] for real forms
        let g = rp.ambient();
        let expect = -g.bracket(g.bracket(&x, &y).unwrap().as_slice(), &x).unwrap();
        assert!((r - expect).amax() < 1e-15);
    }

    #[test]
    fn trivial_subgroup_torsion_is_minus_bracket() {
        let rp = ReductivePairSpec::trivial_subgroup(LieAlgebra::so3());
        let (t, r) = nomizu_tensors(&rp, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.as_slice(), &[0.0, 0.0, -1.0]);
        assert_eq!(r.amax(), 0.0);
    }

    #[test]
    fn inputs_outside_m_are_rejected() {
        let rp = ReductivePairSpec::real_form(&LieAlgebra::su2());
        let x = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(matches!(
            nomizu_tensors(&rp, &x, &x, &x),
            Err(GeomError::NotInComplement(_))
        ));
    }

    #[test]
    fn non_reductive_split_is_rejected() {
        // h = span(L1, L2) is not a subalgebra of so(3)
        assert!(ReductivePairSpec::new(LieAlgebra::so3(), vec![0, 1], vec![2]).is_err());
    }
}

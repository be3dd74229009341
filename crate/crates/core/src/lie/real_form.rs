//! Real forms `h` of a complex matrix algebra `g = h + i h`.

use nalgebra::{DMatrix, DVector};

use super::group::{MatrixGroup, ScalarField};
use super::matrix::{commutator, realify, CMatrix, Complex};
use crate::error::{GeomError, Result};

#[derive(Debug, Clone)]
pub struct RealFormDecomposition {
    ambient: MatrixGroup,
    subgroup: MatrixGroup,
    /// Maps realified ambient matrices to `(a, b)` with `w = sum a_j e_j + sum b_j (i e_j)`.
    split_map: DMatrix<f64>,
}

impl RealFormDecomposition {
    /// `subgroup`'s basis spans `h`; `ambient` must be complex with real
    /// dimension `2 dim h`.
    pub fn new(ambient: MatrixGroup, subgroup: MatrixGroup) -> Result<Self> {
        if ambient.scalar_field() != ScalarField::Complex {
            return Err(GeomError::SingularChangeOfBasis(
                "ambient group must be complex".into(),
            ));
        }
        let n = subgroup.algebra().dim();
        if ambient.algebra().dim() != 2 * n {
            return Err(GeomError::SingularChangeOfBasis(format!(
                "h + i h has real dimension {} but g has {}",
                2 * n,
                ambient.algebra().dim()
            )));
        }
        if subgroup.matrix_size() != ambient.matrix_size() {
            return Err(GeomError::SingularChangeOfBasis("matrix sizes differ".into()));
        }
        for e in subgroup.basis() {
            ambient
                .coordinates(e)
                .map_err(|_| GeomError::SingularChangeOfBasis("h is not inside g".into()))?;
        }
        // closure of h under the commutator
        for a in subgroup.basis() {
            for b in subgroup.basis() {
                subgroup.coordinates(&commutator(a, b)).map_err(|_| {
                    GeomError::SingularChangeOfBasis("h is not closed under commutator".into())
                })?;
            }
        }

        let i = Complex::new(0.0, 1.0);
        let columns: Vec<Vec<f64>> = subgroup
            .basis()
            .iter()
            .map(realify)
            .chain(subgroup.basis().iter().map(|e| realify(&(e * i))))
            .collect();
        let rows = columns[0].len();
        let basis = DMatrix::from_fn(rows, 2 * n, |r, c| columns[c][r]);
        let svd = basis.clone().svd(false, false);
        let smallest = svd.singular_values.min();
        if smallest < 1e-10 {
            return Err(GeomError::SingularChangeOfBasis(format!(
                "{{e_j, i e_j}} is not linearly independent over R (sigma_min {smallest:.3e})"
            )));
        }
        let gram_inv = (basis.transpose() * &basis)
            .try_inverse()
            .ok_or_else(|| GeomError::SingularChangeOfBasis("singular Gram matrix".into()))?;
        let split_map = gram_inv * basis.transpose();
        Ok(Self {
            ambient,
            subgroup,
            split_map,
        })
    }

    /// su(2) inside sl(2,C).
    pub fn su2_in_sl2c() -> Self {
        Self::new(MatrixGroup::sl2c(), MatrixGroup::su2()).expect("su(2) is a real form")
    }

    /// sl(2,R) inside sl(2,C).
    pub fn sl2r_in_sl2c() -> Self {
        Self::new(MatrixGroup::sl2c(), MatrixGroup::sl2r()).expect("sl(2,R) is a real form")
    }

    pub fn ambient(&self) -> &MatrixGroup {
        &self.ambient
    }

    pub fn subgroup(&self) -> &MatrixGroup {
        &self.subgroup
    }

    /// Unique `(theta, alpha)` in `h` with `w = theta - i alpha`.
    pub fn split(&self, omega: &CMatrix) -> Result<(DVector<f64>, DVector<f64>)> {
        self.ambient.coordinates(omega)?;
        Ok(self.split_unchecked(omega))
    }

    pub(crate) fn split_unchecked(&self, omega: &CMatrix) -> (DVector<f64>, DVector<f64>) {
        let n = self.subgroup.algebra().dim();
        let ab = &self.split_map * DVector::from_vec(realify(omega));
        let theta = ab.rows(0, n).into_owned();
        let alpha = -ab.rows(n, n).into_owned();
        (theta, alpha)
    }

    /// `theta - i alpha` as an ambient matrix.
    pub fn combine(&self, theta: &[f64], alpha: &[f64]) -> CMatrix {
        let i = Complex::new(0.0, 1.0);
        self.subgroup.to_matrix(theta) - self.subgroup.to_matrix(alpha) * i
    }
}

/// `Re` and `Im` relative to the real form, as a free function.
pub fn real_form_split(
    omega: &CMatrix,
    rf: &RealFormDecomposition,
) -> Result<(DVector<f64>, DVector<f64>)> {
    rf.split(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_of_h_splits_to_itself() {
        let rf = RealFormDecomposition::su2_in_sl2c();
        let e = rf.subgroup().to_matrix(&[0.3, -0.5, 1.0]);
        let (theta, alpha) = rf.split(&e).unwrap();
        assert!((theta - DVector::from_row_slice(&[0.3, -0.5, 1.0])).amax() < 1e-14);
        assert!(alpha.amax() < 1e-14);
    }

    #[test]
    fn i_times_h_splits_to_minus_alpha() {
        let rf = RealFormDecomposition::sl2r_in_sl2c();
        let e = rf.subgroup().to_matrix(&[0.3, -0.5, 1.0]) * Complex::new(0.0, 1.0);
        let (theta, alpha) = rf.split(&e).unwrap();
        assert!(theta.amax() < 1e-14);
        assert!((alpha + DVector::from_row_slice(&[0.3, -0.5, 1.0])).amax() < 1e-14);
    }

    #[test]
    fn hermitian_traceless_maps_into_su2() {
        let rf = RealFormDecomposition::su2_in_sl2c();
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.7, 0.0),
                Complex::new(0.2, -0.4),
                Complex::new(0.2, 0.4),
                Complex::new(-0.7, 0.0),
            ],
        );
        let (theta, alpha) = rf.split(&h).unwrap();
        assert!(theta.amax() < 1e-14);
        // alpha should be i H, an anti-hermitian traceless matrix
        let alpha_m = rf.subgroup().to_matrix(alpha.as_slice());
        let ih = &h * Complex::new(0.0, 1.0);
        assert!((&alpha_m - &ih).iter().all(|z| z.norm() < 1e-14));
        assert!((&alpha_m + alpha_m.adjoint()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn rejects_matrix_outside_g() {
        let rf = RealFormDecomposition::su2_in_sl2c();
        assert!(rf.split(&CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn rejects_non_real_form() {
        // su(2) inside the real group SL(2,R)-sized ambient: wrong scalar field
        assert!(RealFormDecomposition::new(MatrixGroup::sl2r(), MatrixGroup::su2()).is_err());
        // su(2) doubled: ambient SU(2) has the wrong dimension
        assert!(RealFormDecomposition::new(MatrixGroup::su2(), MatrixGroup::su2()).is_err());
    }

    #[test]
    fn split_is_left_inverse_of_combine() {
        let rf = RealFormDecomposition::sl2r_in_sl2c();
        let theta = [0.1, 0.9, -0.4];
        let alpha = [-1.2, 0.3, 0.25];
        let (t, a) = rf.split(&rf.combine(&theta, &alpha)).unwrap();
        assert!((t - DVector::from_row_slice(&theta)).amax() < 1e-12);
        assert!((a - DVector::from_row_slice(&alpha)).amax() < 1e-12);
    }
}

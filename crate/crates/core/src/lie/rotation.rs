//! The cross-product picture of so(3) and the double cover SU(2) -> SO(3).

use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::group::MatrixGroup;
use super::matrix::{CMatrix, Complex};
use crate::error::Result;

pub fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// The antisymmetric matrix of `v -> u x v`.
pub fn so3_of(u: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[0.0, -u[2], u[1], u[2], 0.0, -u[0], -u[1], u[0], 0.0],
    )
}

/// Pauli matrices `sigma_1, sigma_2, sigma_3`.
pub fn pauli() -> [CMatrix; 3] {
    let o = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    ]
}

fn su2_group() -> &'static MatrixGroup {
    static SU2: OnceLock<MatrixGroup> = OnceLock::new();
    SU2.get_or_init(MatrixGroup::su2)
}

/// Matrix of `Ad_g` on su(2) in the orthonormal basis `e_k = -i sigma_k / 2`.
/// Kernel `{+I, -I}`.
pub fn su2_to_so3(g: &CMatrix) -> Result<DMatrix<f64>> {
    su2_group().adjoint_matrix(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::matrix::commutator;
    use crate::lie::complexify;

    #[test]
    fn cross_of_basis() {
        assert_eq!(cross([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn so3_of_annihilates_its_axis() {
        let u = [0.3, -1.4, 2.2];
        let m = so3_of(u);
        let v = nalgebra::DVector::from_row_slice(&u);
        assert!((m * v).amax() < 1e-15);
    }

    #[test]
    fn so3_of_is_a_lie_algebra_isomorphism() {
        let e1 = complexify(&so3_of([1.0, 0.0, 0.0]));
        let e2 = complexify(&so3_of([0.0, 1.0, 0.0]));
        let e3 = complexify(&so3_of([0.0, 0.0, 1.0]));
        assert_eq!(commutator(&e1, &e2), e3);

        let u = [0.5, -0.2, 1.3];
        let v = [-0.7, 0.9, 0.1];
        let lhs = so3_of(u) * so3_of(v) - so3_of(v) * so3_of(u);
        assert!((lhs - so3_of(cross(u, v))).amax() < 1e-14);
    }

    #[test]
    fn double_cover_kernel() {
        let id = CMatrix::identity(2, 2);
        assert!((su2_to_so3(&id).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let minus = -CMatrix::identity(2, 2);
        assert!((su2_to_so3(&minus).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn rotation_about_third_axis() {
        let t = 0.3;
        let g = su2_group().exp(&[0.0, 0.0, t]).unwrap();
        let r = su2_to_so3(&g).unwrap();
        // conjugation oracle column by column
        let g_inv = g.adjoint();
        for (j, e) in su2_group().basis().iter().enumerate() {
            let col = su2_group().coordinates(&(&g * e * &g_inv)).unwrap();
            for k in 0..3 {
                assert!((r[(k, j)] - col[k]).abs() < 1e-14);
            }
        }
        let (s, c) = t.sin_cos();
        let expected = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        assert!((r - expected).amax() < 1e-14);
    }

    #[test]
    fn rejects_non_unitary() {
        let g = CMatrix::identity(2, 2).scale(1.5);
        assert!(su2_to_so3(&g).is_err());
    }
}

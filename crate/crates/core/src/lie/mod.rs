//! Lie algebras, matrix groups, real forms and the rotation-group dictionary.

mod algebra;
mod group;
mod matrix;
mod real_form;
mod rotation;

pub use algebra::{AlgebraDocument, LieAlgebra, STRUCTURE_TOL};
pub use group::{GroupKind, MatrixGroup, ScalarField, MEMBERSHIP_TOL};
pub use matrix::{commutator, complexify, matrix_exp, matrix_log, realify, CMatrix, Complex};
pub use real_form::{real_form_split, RealFormDecomposition};
pub use rotation::{cross, pauli, so3_of, su2_to_so3};

use nalgebra::DVector;

use crate::error::Result;

/// `[x, y]` for coordinate vectors in `alg`'s basis.
pub fn bracket(x: &[f64], y: &[f64], alg: &LieAlgebra) -> Result<DVector<f64>> {
    alg.bracket(x, y)
}

/// `Ad_g X` for a matrix group element.
pub fn adjoint_ad(g: &CMatrix, x: &[f64], group: &MatrixGroup) -> Result<DVector<f64>> {
    group.adjoint(g, x)
}

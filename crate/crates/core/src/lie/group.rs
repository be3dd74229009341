//! Matrix Lie groups with a concrete matrix basis for their Lie algebra.

use nalgebra::{DMatrix, DVector};

use super::algebra::{LieAlgebra, STRUCTURE_TOL};
use super::matrix::{commutator, matrix_exp, realify, CMatrix, Complex};
use crate::error::{GeomError, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// `g^T g = 1`, `det g = 1`, real entries.
    SpecialOrthogonal,
    /// `g^* g = 1`, `det g = 1`.
    SpecialUnitary,
    /// `det g = 1`, real entries.
    SpecialLinearReal,
    /// `det g = 1`.
    SpecialLinearComplex,
}

impl GroupKind {
    pub fn scalar_field(self) -> ScalarField {
        match self {
            GroupKind::SpecialOrthogonal | GroupKind::SpecialLinearReal => ScalarField::Real,
            GroupKind::SpecialUnitary | GroupKind::SpecialLinearComplex => ScalarField::Complex,
        }
    }

    fn membership_defect(self, g: &CMatrix) -> f64 {
        let n = g.nrows();
        let id = CMatrix::identity(n, n);
        let det = (g.determinant() - Complex::new(1.0, 0.0)).norm();
        let imag = g.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        match self {
            GroupKind::SpecialOrthogonal => (g.transpose() * g - id).amax_norm() + det + imag,
            GroupKind::SpecialUnitary => (g.adjoint() * g - id).amax_norm() + det,
            GroupKind::SpecialLinearReal => det + imag,
            GroupKind::SpecialLinearComplex => det,
        }
    }

    /// Defect of the linearised condition on an algebra matrix.
    fn tangent_defect(self, x: &CMatrix) -> f64 {
        let trace = x.trace().norm();
        let imag = x.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        match self {
            GroupKind::SpecialOrthogonal => (x + x.transpose()).amax_norm() + imag,
            GroupKind::SpecialUnitary => (x + x.adjoint()).amax_norm() + trace,
            GroupKind::SpecialLinearReal => trace + imag,
            GroupKind::SpecialLinearComplex => trace,
        }
    }
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for CMatrix {
    fn amax_norm(&self) -> f64 {
        self.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

#[derive(Debug, Clone)]
pub struct MatrixGroup {
    name: String,
    kind: GroupKind,
    algebra: LieAlgebra,
    basis: Vec<CMatrix>,
    /// Left inverse of the realified basis, `(B^T B)^{-1} B^T`.
    coordinate_map: DMatrix<f64>,
    realified_basis: DMatrix<f64>,
}

impl MatrixGroup {
    /// Builds the group from algebra basis matrices. Structure constants are
    /// read off the matrix commutators; the optional inner product is attached
    /// to the derived algebra.
    pub fn new(
        name: &str,
        kind: GroupKind,
        labels: Vec<String>,
        basis: Vec<CMatrix>,
        inner_product: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = basis.len();
        if n == 0 || labels.len() != n {
            return Err(GeomError::InvalidGroup(format!(
                "{name}: need one label per basis matrix"
            )));
        }
        let size = basis[0].nrows();
        for b in &basis {
            if b.nrows() != size || b.ncols() != size {
                return Err(GeomError::InvalidGroup(format!(
                    "{name}: basis matrices must all be {size}x{size}"
                )));
            }
            let defect = kind.tangent_defect(b);
            if defect > STRUCTURE_TOL {
                return Err(GeomError::InvalidGroup(format!(
                    "{name}: basis matrix fails the linearised membership test ({defect:.3e})"
                )));
            }
        }

        let realified_basis = DMatrix::from_fn(2 * size * size, n, |r, c| realify(&basis[c])[r]);
        let gram = realified_basis.transpose() * &realified_basis;
        let gram_inv = gram.try_inverse().ok_or_else(|| {
            GeomError::InvalidGroup(format!("{name}: basis matrices are linearly dependent"))
        })?;
        let coordinate_map = gram_inv * realified_basis.transpose();

        let mut structure = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let comm = commutator(&basis[i], &basis[j]);
                let v = DVector::from_vec(realify(&comm));
                let coords = &coordinate_map * &v;
                let residual = (&realified_basis * &coords - &v).amax();
                if residual > STRUCTURE_TOL {
                    return Err(GeomError::InvalidGroup(format!(
                        "{name}: basis not closed under commutator ({residual:.3e})"
                    )));
                }
                for k in 0..n {
                    // snap round-off so rational constants stay exact
                    let c = coords[k];
                    let snapped = (c * 4096.0).round() / 4096.0;
                    structure[(i * n + j) * n + k] =
                        if (c - snapped).abs() < 1e-13 { snapped } else { c };
                }
            }
        }
        let algebra = LieAlgebra::new(labels, structure, inner_product)?;
        Ok(Self {
            name: name.to_string(),
            kind,
            algebra,
            basis,
            coordinate_map,
            realified_basis,
        })
    }

    /// SO(3) with basis `L_k = so3_of(e_k)`.
    pub fn so3() -> Self {
        let basis = (0..3)
            .map(|k| {
                let mut u = [0.0; 3];
                u[k] = 1.0;
                super::complexify(&super::so3_of(u))
            })
            .collect();
        Self::new(
            "SO(3)",
            GroupKind::SpecialOrthogonal,
            vec!["L1".into(), "L2".into(), "L3".into()],
            basis,
            Some(DMatrix::identity(3, 3)),
        )
        .expect("so(3) basis is valid")
    }

    /// SU(2) with basis `e_k = -i sigma_k / 2`.
    pub fn su2() -> Self {
        let basis = super::pauli()
            .iter()
            .map(|s| s.scale(0.5) * Complex::new(0.0, -1.0))
            .collect();
        Self::new(
            "SU(2)",
            GroupKind::SpecialUnitary,
            vec!["e1".into(), "e2".into(), "e3".into()],
            basis,
            Some(DMatrix::identity(3, 3)),
        )
        .expect("su(2) basis is valid")
    }

    /// SL(2,R) with basis `sigma_1/2, i sigma_2/2, sigma_3/2` (all real).
    pub fn sl2r() -> Self {
        let [s1, s2, s3] = super::pauli();
        let basis = vec![
            s1.scale(0.5),
            s2.scale(0.5) * Complex::new(0.0, 1.0),
            s3.scale(0.5),
        ];
        Self::new(
            "SL(2,R)",
            GroupKind::SpecialLinearReal,
            vec!["h1".into(), "h2".into(), "h3".into()],
            basis,
            None,
        )
        .expect("sl(2,R) basis is valid")
    }

    /// SL(2,C) as a real six-dimensional group: basis `e_k, i e_k` with
    /// `e_k = -i sigma_k / 2`.
    pub fn sl2c() -> Self {
        let su2 = Self::su2();
        let mut basis = su2.basis.clone();
        basis.extend(su2.basis.iter().map(|b| b * Complex::new(0.0, 1.0)));
        let labels = ["e1", "e2", "e3", "ie1", "ie2", "ie3"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::new("SL(2,C)", GroupKind::SpecialLinearComplex, labels, basis, None)
            .expect("sl(2,C) basis is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn scalar_field(&self) -> ScalarField {
        self.kind.scalar_field()
    }

    pub fn matrix_size(&self) -> usize {
        self.basis[0].nrows()
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn membership_defect(&self, g: &CMatrix) -> f64 {
        if g.nrows() != self.matrix_size() || g.ncols() != self.matrix_size() {
            return f64::INFINITY;
        }
        self.kind.membership_defect(g)
    }

    pub fn check_member(&self, g: &CMatrix) -> Result<()> {
        let defect = self.membership_defect(g);
        if defect > MEMBERSHIP_TOL {
            return Err(GeomError::Membership {
                group: self.name.clone(),
                defect,
            });
        }
        Ok(())
    }

    pub fn to_matrix(&self, coords: &[f64]) -> CMatrix {
        let n = self.matrix_size();
        let mut m = CMatrix::zeros(n, n);
        for (b, c) in self.basis.iter().zip(coords) {
            if *c != 0.0 {
                m += b.scale(*c);
            }
        }
        m
    }

    /// Basis coordinates of an algebra matrix; errors when it is off the span.
    pub fn coordinates(&self, m: &CMatrix) -> Result<DVector<f64>> {
        let v = DVector::from_vec(realify(m));
        let coords = &self.coordinate_map * &v;
        let residual = (&self.realified_basis * &coords - &v).amax();
        if residual > 1e-9 * v.amax().max(1.0) {
            return Err(GeomError::NotInSpan { residual });
        }
        Ok(coords)
    }

    pub fn exp(&self, coords: &[f64]) -> Result<CMatrix> {
        matrix_exp(&self.to_matrix(coords))
    }

    /// `Ad_g X = g X g^{-1}` in basis coordinates.
    pub fn adjoint(&self, g: &CMatrix, x: &[f64]) -> Result<DVector<f64>> {
        self.check_member(g)?;
        if x.len() != self.algebra.dim() {
            return Err(GeomError::DimensionMismatch {
                context: "adjoint",
                expected: self.algebra.dim(),
                found: x.len(),
            });
        }
        let g_inv = g.clone().try_inverse().ok_or(GeomError::Singular {
            what: "group element",
            det: 0.0,
        })?;
        self.coordinates(&(g * self.to_matrix(x) * g_inv))
    }

    /// Matrix of `Ad_g` on coordinates (columns are `Ad_g e_j`).
    pub fn adjoint_matrix(&self, g: &CMatrix) -> Result<DMatrix<f64>> {
        self.check_member(g)?;
        let g_inv = g.clone().try_inverse().ok_or(GeomError::Singular {
            what: "group element",
            det: 0.0,
        })?;
        let n = self.algebra.dim();
        let mut m = DMatrix::zeros(n, n);
        for (j, b) in self.basis.iter().enumerate() {
            let col = self.coordinates(&(g * b * &g_inv))?;
            m.set_column(j, &col);
        }
        Ok(m)
    }
}

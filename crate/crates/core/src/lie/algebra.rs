//! Finite-dimensional real Lie algebras in structure-constant form.
//!
//! Elements are coordinate vectors in the algebra's basis. The bracket is
//! `[e_i, e_j] = sum_k c[i][j][k] e_k`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Tolerance for the structural identities (antisymmetry, Jacobi, invariance).
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// Dense `c[(i * n + j) * n + k]`.
    structure: Vec<f64>,
    inner_product: Option<DMatrix<f64>>,
}

impl LieAlgebra {
    /// Builds and validates an algebra from a dense structure-constant table.
    pub fn new(
        labels: Vec<String>,
        structure: Vec<f64>,
        inner_product: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(GeomError::InvalidAlgebra("dimension must be positive".into()));
        }
        if structure.len() != n * n * n {
            return Err(GeomError::DimensionMismatch {
                context: "structure constants",
                expected: n * n * n,
                found: structure.len(),
            });
        }
        if let Some(ip) = &inner_product {
            if ip.nrows() != n || ip.ncols() != n {
                return Err(GeomError::DimensionMismatch {
                    context: "inner product",
                    expected: n,
                    found: ip.nrows(),
                });
            }
        }
        let alg = Self {
            labels,
            structure,
            inner_product,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// Builds an algebra from sparse `(i, j, k, value)` entries. Entries for
    /// `(j, i)` are not inferred; list both orderings.
    pub fn from_entries(
        labels: Vec<String>,
        entries: &[(usize, usize, usize, f64)],
        inner_product: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut structure = vec![0.0; n * n * n];
        for &(i, j, k, v) in entries {
            if i >= n || j >= n || k >= n {
                return Err(GeomError::InvalidAlgebra(format!(
                    "structure constant index ({i},{j},{k}) out of range for dim {n}"
                )));
            }
            structure[(i * n + j) * n + k] = v;
        }
        Self::new(labels, structure, inner_product)
    }

    /// Abelian algebra of dimension `n` with the Euclidean inner product.
    pub fn abelian(n: usize) -> Result<Self> {
        let labels = (1..=n).map(|i| format!("t{i}")).collect();
        Self::new(labels, vec![0.0; n * n * n], Some(DMatrix::identity(n, n)))
    }

    /// so(3) in the basis `L_k = so3_of(e_k)`, with `[L_i, L_j] = eps_ijk L_k`.
    pub fn so3() -> Self {
        Self::cross_product_algebra(["L1", "L2", "L3"])
    }

    /// su(2) in the basis `e_k = -i sigma_k / 2`. Same structure constants as
    /// so(3); the inner product makes `su2_to_so3` an isometry.
    pub fn su2() -> Self {
        Self::cross_product_algebra(["e1", "e2", "e3"])
    }

    fn cross_product_algebra(names: [&str; 3]) -> Self {
        let mut entries = Vec::new();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            entries.push((i, j, k, 1.0));
            entries.push((j, i, k, -1.0));
        }
        Self::from_entries(
            names.iter().map(|s| s.to_string()).collect(),
            &entries,
            Some(DMatrix::identity(3, 3)),
        )
        .expect("cross-product structure constants are valid")
    }

    /// The realification of the complexification: basis `e_1..e_n, i e_1..i e_n`
    /// with `[i x, y] = i [x, y]` and `[i x, i y] = -[x, y]`.
    pub fn complexified(&self) -> Self {
        let n = self.dim();
        let m = 2 * n;
        let mut structure = vec![0.0; m * m * m];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.c(i, j, k);
                    if c == 0.0 {
                        continue;
                    }
                    structure[(i * m + j) * m + k] = c;
                    structure[((n + i) * m + j) * m + n + k] = c;
                    structure[(i * m + n + j) * m + n + k] = c;
                    structure[((n + i) * m + n + j) * m + k] = -c;
                }
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(self.labels.iter().map(|l| format!("i{l}")));
        Self::new(labels, structure, None).expect("complexification preserves the identities")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inner_product(&self) -> Option<&DMatrix<f64>> {
        self.inner_product.as_ref()
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim();
        self.structure[(i * n + j) * n + k]
    }

    /// Same dimension and structure constants within [`STRUCTURE_TOL`]; labels
    /// and inner products are ignored.
    pub fn same_brackets(&self, other: &LieAlgebra) -> bool {
        self.dim() == other.dim()
            && self
                .structure
                .iter()
                .zip(&other.structure)
                .all(|(a, b)| (a - b).abs() <= STRUCTURE_TOL)
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|c| *c == 0.0)
    }

    fn check_len(&self, context: &'static str, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(GeomError::DimensionMismatch {
                context,
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// `[x, y]` in basis coordinates.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<DVector<f64>> {
        self.check_len("bracket lhs", x.len())?;
        self.check_len("bracket rhs", y.len())?;
        let mut out = DVector::zeros(self.dim());
        self.bracket_acc(x, y, 1.0, out.as_mut_slice());
        Ok(out)
    }

    /// `out += scale * [x, y]`, lengths assumed to match.
    pub(crate) fn bracket_acc(&self, x: &[f64], y: &[f64], scale: f64, out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = scale * x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                let row = &self.structure[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, c) in out.iter_mut().zip(row) {
                    *o += xy * c;
                }
            }
        }
    }

    /// Matrix of `ad_x` acting on coordinates: `(ad_x)[k][j] = sum_i x_i c[i][j][k]`.
    pub fn ad_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_len("ad", x.len())?;
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        Ok(m)
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let ip = self.inner_product.as_ref().ok_or(GeomError::MissingInnerProduct)?;
        self.check_len("inner product", x.len())?;
        self.check_len("inner product", y.len())?;
        let n = self.dim();
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += x[a] * ip[(a, b)] * y[b];
            }
        }
        Ok(s)
    }

    /// Norm from the inner product when present, Euclidean coordinate norm otherwise.
    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        match self.inner(x, x) {
            Ok(q) => q.max(0.0).sqrt(),
            Err(_) => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    fn scale(&self) -> f64 {
        self.structure.iter().fold(1.0f64, |m, c| m.max(c.abs()))
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest cyclic Jacobi sum over basis quadruples.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.c(i, j, m) * self.c(m, k, l)
                                + self.c(j, k, m) * self.c(m, i, l)
                                + self.c(k, i, m) * self.c(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest `<[x,y],z> + <y,[x,z]>` over basis triples; zero without an inner product.
    pub fn invariance_defect(&self) -> f64 {
        let Some(ip) = &self.inner_product else {
            return 0.0;
        };
        let n = self.dim();
        let mut worst = 0.0f64;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += self.c(x, y, k) * ip[(k, z)] + ip[(y, k)] * self.c(x, z, k);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let tol = STRUCTURE_TOL * self.scale() * self.scale();
        let anti = self.antisymmetry_defect();
        if anti > tol {
            return Err(GeomError::InvalidAlgebra(format!(
                "structure constants not antisymmetric (defect {anti:.3e})"
            )));
        }
        let jac = self.jacobi_defect();
        if jac > tol {
            return Err(GeomError::InvalidAlgebra(format!(
                "Jacobi identity fails (defect {jac:.3e})"
            )));
        }
        if let Some(ip) = &self.inner_product {
            let n = self.dim();
            let asym = (ip - ip.transpose()).amax();
            if asym > STRUCTURE_TOL * ip.amax().max(1.0) {
                return Err(GeomError::InvalidAlgebra("inner product not symmetric".into()));
            }
            if ip.clone().cholesky().is_none() {
                return Err(GeomError::InvalidAlgebra(
                    "inner product not positive definite".into(),
                ));
            }
            let inv = self.invariance_defect();
            if inv > tol * ip.amax().max(1.0) * n as f64 {
                return Err(GeomError::InvalidAlgebra(format!(
                    "inner product not ad-invariant (defect {inv:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&AlgebraDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: AlgebraDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// On-disk form: `{ "dim", "labels", "c": [[i,j,k,value],...], "inner_product" }`.
/// Indices are zero-based; only nonzero constants are listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub labels: Vec<String>,
    pub c: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<Vec<Vec<f64>>>,
}

impl From<&LieAlgebra> for AlgebraDocument {
    fn from(alg: &LieAlgebra) -> Self {
        let n = alg.dim();
        let mut c = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = alg.c(i, j, k);
                    if v != 0.0 {
                        c.push([i as f64, j as f64, k as f64, v]);
                    }
                }
            }
        }
        let inner_product = alg
            .inner_product
            .as_ref()
            .map(|ip| (0..n).map(|r| ip.row(r).iter().copied().collect()).collect());
        Self {
            dim: n,
            labels: alg.labels.clone(),
            c,
            inner_product,
        }
    }
}

impl TryFrom<AlgebraDocument> for LieAlgebra {
    type Error = GeomError;

    fn try_from(doc: AlgebraDocument) -> Result<Self> {
        if doc.labels.len() != doc.dim {
            return Err(GeomError::DimensionMismatch {
                context: "algebra labels",
                expected: doc.dim,
                found: doc.labels.len(),
            });
        }
        let mut entries = Vec::with_capacity(doc.c.len());
        for [i, j, k, v] in doc.c {
            let idx = |f: f64| -> Result<usize> {
                if f < 0.0 || f.fract() != 0.0 {
                    return Err(GeomError::InvalidAlgebra(format!(
                        "structure constant index {f} is not a non-negative integer"
                    )));
                }
                Ok(f as usize)
            };
            entries.push((idx(i)?, idx(j)?, idx(k)?, v));
        }
        let ip = match doc.inner_product {
            None => None,
            Some(rows) => {
                if rows.len() != doc.dim || rows.iter().any(|r| r.len() != doc.dim) {
                    return Err(GeomError::DimensionMismatch {
                        context: "inner product",
                        expected: doc.dim,
                        found: rows.len(),
                    });
                }
                Some(DMatrix::from_fn(doc.dim, doc.dim, |r, c| rows[r][c]))
            }
        };
        LieAlgebra::from_entries(doc.labels, &entries, ip)
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid matrix group: {0}")]
    InvalidGroup(String),

    #[error("{group} membership test failed (defect {defect:.3e})")]
    Membership { group: String, defect: f64 },

    #[error("matrix is not in the span of the algebra basis (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("real-form decomposition is degenerate: {0}")]
    SingularChangeOfBasis(String),

    #[error("matrix logarithm undefined: spectral radius of X - I is {radius:.3} (must be < 1)")]
    LogOutOfRange { radius: f64 },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("point {point:?} lies outside the chart bounds")]
    OutOfChart { point: Vec<f64> },

    #[error("finite-difference stencil at {point:?} leaves the chart (axis {axis}, step {step:.3e})")]
    BoundaryProximity {
        point: Vec<f64>,
        axis: usize,
        step: f64,
    },

    #[error("finite-difference step {step:.3e} underflows at coordinate {coordinate}")]
    StepUnderflow { step: f64, coordinate: f64 },

    #[error("form degree {0} not supported here")]
    UnsupportedDegree(usize),

    #[error("forms take values in different Lie algebras")]
    AlgebraMismatch,

    #[error("forms live on different charts")]
    ChartMismatch,

    #[error("Lie algebra has no inner product")]
    MissingInnerProduct,

    #[error("alpha is a {chart_dim}x{algebra_dim} map; admissibility needs a square matrix")]
    NonSquareAlpha { chart_dim: usize, algebra_dim: usize },

    #[error("singular {what} (|det| = {det:.3e})")]
    Singular { what: &'static str, det: f64 },

    #[error("group coordinates |k| = {norm:.3} exceed the exponential guard {guard}")]
    ExpGuard { norm: f64, guard: f64 },

    #[error("orientation of alpha changes sign on the grid")]
    OrientationChange,

    #[error("degenerate tangent plane")]
    DegeneratePlane,

    #[error("vector is not in the complement subspace (defect {0:.3e})")]
    NotInComplement(f64),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

//! Residuals of the Zentner system `d_A alpha = 0`, `Omega_A = 1/2 [alpha ^ alpha]`,
//! the induced linear connection, the recovered metric and orientation, and the
//! almost complex structure on the total space with its Nijenhuis tensor.

mod acs;
mod induced;
mod psi;
mod residual;

pub use acs::{
    acs_matrix, acs_matrix_with_guard, nijenhuis, right_translation_defect, NijenhuisSample,
    TotalSpacePoint, EXP_COORD_GUARD,
};
pub use induced::{
    bracket_alpha, bracket_parallelism_defect, christoffel, induced_connection,
    induced_connection_with_step, metric_parallelism_defect, InducedConnectionSample,
};
pub use psi::{alpha_metric, metric_orientation_psi, PsiSample};
pub use residual::{
    frame_pair_norms, residual_forms, zentner_residuals, ResidualNorms, ZentnerResidual,
};

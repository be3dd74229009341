//! Chart-level numerics for principal bundles carrying a connection and a
//! tensorial 1-form: residuals of the Zentner system, the induced linear
//! connection, the associated almost complex structure and its Nijenhuis
//! tensor, plus reference scenarios (constant-curvature frame bundles and
//! real-form slices).

pub mod error;
pub mod fields;
pub mod gauge;
pub mod lie;
pub mod runner;
pub mod scenarios;
pub mod zentner;

pub use error::{GeomError, Result};

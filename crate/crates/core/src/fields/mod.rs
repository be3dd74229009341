//! Differential calculus on coordinate charts for Lie-algebra-valued forms.

mod calculus;
mod chart;
mod form;

pub use calculus::{
    exterior_derivative, form_norm, form_value_norm, max_component_norm, wedge_bracket,
    wedge_bracket_value, write_grid_csv,
};
pub use chart::{Chart, Grid};
pub use form::{
    central_partials, chart_partials, AlgForm, DerivativeMode, EvalFn, FdStep, FormValue,
    PartialsFn, DEFAULT_RELATIVE_STEP,
};

//! Reference triples and independent oracles: constant-curvature frame bundles,
//! real-form slices, the canonical connection of a reductive pair, and
//! curvature computed directly from a metric.

mod frame;
mod lift;
mod metric;
mod nomizu;
mod real_form;
mod registry;

pub use frame::{constant_curvature_triple, constant_curvature_triple_with_mode, FrameModel};
pub use lift::{double_cover_differential, so3_descent, su2_lift};
pub use metric::{
    levi_civita_oracle, riemann_oracle, riemann_sectional_oracle, MetricChart, MetricFn,
    MetricPartialsFn,
};
pub use nomizu::{nomizu_curvature_defect, nomizu_tensors, ReductivePairSpec};
pub use real_form::{
    real_form_triple, real_form_triple_on, right_translation_probe, slice_maurer_cartan,
    slice_section, SLICE_CHART_RADIUS,
};
pub use registry::{
    build_scenario, list_scenarios, scenario_defaults, scenario_names, triple_from_descriptor,
    ScenarioDefaults, ScenarioInfo, CLOSED_FORM_TOL, FINITE_DIFFERENCE_TOL, SLICE_TOL,
};

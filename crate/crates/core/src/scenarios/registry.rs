//! Named scenarios with their default grids, tolerances and parameter schemas.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::frame::{constant_curvature_triple_with_mode, FrameModel};
use super::metric::MetricChart;
use super::real_form::{real_form_triple_on, SLICE_CHART_RADIUS};
use crate::error::{GeomError, Result};
use crate::fields::{DerivativeMode, FdStep, Grid};
use crate::gauge::{LocalTriple, TripleDescriptor};
use crate::lie::RealFormDecomposition;

/// Default tolerance for residuals computed from closed-form derivatives.
pub const CLOSED_FORM_TOL: f64 = 1e-6;
/// Default tolerance for residuals that go through one finite-difference pass.
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-4;
/// Default residual tolerance for the real-form slices.
pub const SLICE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Frame(FrameModel),
    RealForm(RealFormKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RealFormKind {
    Su2,
    Sl2r,
}

impl RealFormKind {
    fn decomposition(self) -> RealFormDecomposition {
        match self {
            RealFormKind::Su2 => RealFormDecomposition::su2_in_sl2c(),
            RealFormKind::Sl2r => RealFormDecomposition::sl2r_in_sl2c(),
        }
    }
}

struct Entry {
    name: &'static str,
    description: &'static str,
    kind: Kind,
}

const ENTRIES: [Entry; 5] = [
    Entry {
        name: "flat",
        description: "Orthonormal frames of Euclidean 3-space (curvature 0); not integrable",
        kind: Kind::Frame(FrameModel::Flat),
    },
    Entry {
        name: "hyperbolic-halfspace",
        description: "Orthonormal frames of the upper half-space model (curvature -1); integrable",
        kind: Kind::Frame(FrameModel::Halfspace),
    },
    Entry {
        name: "sl2r-sl2c",
        description: "Slice triple of SL(2,R) inside SL(2,C); integrable",
        kind: Kind::RealForm(RealFormKind::Sl2r),
    },
    Entry {
        name: "sphere",
        description: "Orthonormal frames of the round sphere in stereographic coordinates (curvature +1); not integrable",
        kind: Kind::Frame(FrameModel::Sphere),
    },
    Entry {
        name: "su2-sl2c",
        description: "Slice triple of SU(2) inside SL(2,C); integrable",
        kind: Kind::RealForm(RealFormKind::Su2),
    },
];

fn entry(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GeomError::UnknownScenario(name.to_string()))
}

/// Registered scenario names in alphabetical order.
pub fn scenario_names() -> Vec<&'static str> {
    let mut names: Vec<_> = ENTRIES.iter().map(|e| e.name).collect();
    names.sort_unstable();
    names
}

/// Everything a verification run needs to know about a scenario besides the triple.
#[derive(Debug, Clone)]
pub struct ScenarioDefaults {
    pub grid: Grid,
    pub tolerances: BTreeMap<String, f64>,
    /// Sectional curvature the recovered metric should have, when the algebra
    /// carries an inner product.
    pub expected_sectional: Option<f64>,
    /// Base point where the Nijenhuis tensor is reported for non-integrable scenarios.
    pub nijenhuis_point: Vec<f64>,
    pub expected_integrable: bool,
    /// The metric the triple was built from, for frame scenarios.
    pub reference_metric: Option<MetricChart>,
}

fn tolerances(residual: f64, sectional: f64) -> BTreeMap<String, f64> {
    [
        ("curvature_match", FINITE_DIFFERENCE_TOL),
        ("eq1", residual),
        ("eq2", residual),
        ("gauge_equivariance", CLOSED_FORM_TOL),
        ("nijenhuis", FINITE_DIFFERENCE_TOL),
        ("nomizu", FINITE_DIFFERENCE_TOL),
        ("psi", sectional),
        ("torsion", 1e-5),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

pub fn scenario_defaults(name: &str) -> Result<ScenarioDefaults> {
    let e = entry(name)?;
    Ok(match e.kind {
        Kind::Frame(model) => {
            let grid = match model {
                FrameModel::Sphere => Grid::uniform(5, vec![(-1.0, 1.0); 3])?,
                _ => Grid::new(vec![5; 3], vec![(-1.0, 1.0), (-1.0, 1.0), (0.5, 2.0)])?,
            };
            let chart = std::sync::Arc::new(model.chart());
            let reference = match model {
                FrameModel::Flat => MetricChart::euclidean(chart),
                FrameModel::Halfspace => MetricChart::halfspace(chart),
                FrameModel::Sphere => MetricChart::stereographic_sphere(chart),
            };
            ScenarioDefaults {
                grid,
                tolerances: tolerances(CLOSED_FORM_TOL, 1e-3),
                expected_sectional: Some(model.curvature()),
                nijenhuis_point: vec![0.0, 0.0, 1.0],
                expected_integrable: model == FrameModel::Halfspace,
                reference_metric: Some(reference),
            }
        }
        Kind::RealForm(kind) => ScenarioDefaults {
            grid: Grid::uniform(11, vec![(-0.5, 0.5); 3])?,
            tolerances: tolerances(SLICE_TOL, 1e-2),
            expected_sectional: match kind {
                RealFormKind::Su2 => Some(-1.0),
                RealFormKind::Sl2r => None,
            },
            nijenhuis_point: vec![0.0; 3],
            expected_integrable: true,
            reference_metric: None,
        },
    })
}

/// Builds a scenario's triple with default parameters.
pub fn build_scenario(name: &str) -> Result<LocalTriple> {
    triple_from_descriptor(&TripleDescriptor {
        scenario: name.to_string(),
        parameters: BTreeMap::new(),
    })
}

fn number(params: &BTreeMap<String, Value>, key: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| GeomError::InvalidScenario(format!("parameter '{key}' must be a number"))),
    }
}

/// Rebuilds a triple from its scenario name and parameters.
pub fn triple_from_descriptor(d: &TripleDescriptor) -> Result<LocalTriple> {
    let e = entry(&d.scenario)?;
    let known: &[&str] = match e.kind {
        Kind::Frame(_) => &["kappa", "derivatives", "step"],
        Kind::RealForm(_) => &["radius"],
    };
    if let Some(k) = d.parameters.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(GeomError::InvalidScenario(format!(
            "unknown parameter '{k}' for scenario '{}'",
            d.scenario
        )));
    }
    match e.kind {
        Kind::Frame(model) => {
            let kappa = number(&d.parameters, "kappa")?.unwrap_or(model.curvature());
            let mode = match d.parameters.get("derivatives").map(|v| v.as_str()) {
                None | Some(Some("closed-form")) => DerivativeMode::ClosedForm,
                Some(Some("finite-difference")) => DerivativeMode::FiniteDifference(
                    number(&d.parameters, "step")?.map_or(FdStep::default(), FdStep::Relative),
                ),
                _ => {
                    return Err(GeomError::InvalidScenario(
                        "parameter 'derivatives' must be \"closed-form\" or \"finite-difference\"".into(),
                    ))
                }
            };
            constant_curvature_triple_with_mode(kappa, model, mode)
        }
        Kind::RealForm(kind) => {
            let radius = number(&d.parameters, "radius")?.unwrap_or(SLICE_CHART_RADIUS);
            real_form_triple_on(&kind.decomposition(), radius)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: String,
    pub description: String,
    pub expected_integrable: bool,
    pub algebra: Vec<String>,
    pub has_inner_product: bool,
    pub parameters: BTreeMap<String, Value>,
}

/// Alphabetical listing with parameter schemas.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    scenario_names()
        .into_iter()
        .map(|name| {
            let e = entry(name).expect("listed names are registered");
            let defaults = scenario_defaults(name).expect("registered defaults are valid");
            let (algebra, has_ip) = match e.kind {
                Kind::Frame(_) => (vec!["L1", "L2", "L3"], true),
                Kind::RealForm(RealFormKind::Su2) => (vec!["e1", "e2", "e3"], true),
                Kind::RealForm(RealFormKind::Sl2r) => (vec!["h1", "h2", "h3"], false),
            };
            let mut parameters = BTreeMap::new();
            parameters.insert(
                "grid".into(),
                json!({
                    "type": "grid",
                    "description": "points per axis and per-axis bounds",
                    "default": { "counts": defaults.grid.counts, "bounds": defaults.grid.bounds },
                }),
            );
            parameters.insert(
                "tolerances".into(),
                json!({
                    "type": "map of positive numbers keyed by check name",
                    "default": defaults.tolerances,
                }),
            );
            parameters.insert(
                "seed".into(),
                json!({ "type": "integer", "description": "seed for random gauge transformations", "default": 0 }),
            );
            match e.kind {
                Kind::Frame(model) => {
                    parameters.insert(
                        "kappa".into(),
                        json!({ "type": "number", "allowed": [model.curvature()], "default": model.curvature() }),
                    );
                    parameters.insert(
                        "derivatives".into(),
                        json!({ "type": "string", "allowed": ["closed-form", "finite-difference"], "default": "closed-form" }),
                    );
                }
                Kind::RealForm(_) => {
                    parameters.insert(
                        "radius".into(),
                        json!({ "type": "number", "description": "half-width of the slice chart", "default": SLICE_CHART_RADIUS }),
                    );
                }
            }
            ScenarioInfo {
                name: name.to_string(),
                description: e.description.to_string(),
                expected_integrable: defaults.expected_integrable,
                algebra: algebra.into_iter().map(String::from).collect(),
                has_inner_product: has_ip,
                parameters,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_complete() {
        assert_eq!(
            scenario_names(),
            vec!["flat", "hyperbolic-halfspace", "sl2r-sl2c", "sphere", "su2-sl2c"]
        );
    }

    #[test]
    fn every_scenario_builds() {
        for name in scenario_names() {
            let t = build_scenario(name).unwrap();
            assert_eq!(t.meta().scenario, name);
            let d = scenario_defaults(name).unwrap();
            for p in d.grid.points() {
                assert!(t.chart().contains(&p));
            }
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let t = build_scenario("hyperbolic-halfspace").unwrap();
        let back = LocalTriple::from_json(&t.to_json().unwrap()).unwrap();
        let x = [0.1, 0.2, 1.3];
        assert_eq!(back.alpha().value(&x).unwrap(), t.alpha().value(&x).unwrap());
    }

    #[test]
    fn unknown_scenario_and_parameter() {
        assert!(matches!(build_scenario("torus"), Err(GeomError::UnknownScenario(_))));
        let mut parameters = BTreeMap::new();
        parameters.insert("colour".into(), json!(1));
        let d = TripleDescriptor { scenario: "flat".into(), parameters };
        assert!(matches!(triple_from_descriptor(&d), Err(GeomError::InvalidScenario(_))));
    }
}

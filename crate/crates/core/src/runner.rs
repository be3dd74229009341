//! Verification runs: evaluate a named scenario on a grid, judge each selected
//! check against its tolerance and assemble a deterministic report.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{GeomError, Result};
use crate::fields::{AlgForm, Grid};
use crate::gauge::{gauge_act, EquivarianceProbe, LocalGaugeTransformation, LocalTriple, TensorialOneForm};
use crate::scenarios::{
    build_scenario, nomizu_curvature_defect, nomizu_tensors, riemann_sectional_oracle,
    scenario_defaults, MetricChart, ReductivePairSpec, ScenarioDefaults,
};
use crate::zentner::{
    alpha_metric, induced_connection, metric_orientation_psi, nijenhuis, zentner_residuals,
    TotalSpacePoint,
};

/// Number of seeded gauge transformations tried by the equivariance check.
pub const GAUGE_SAMPLES: u64 = 5;
/// Random group coordinates drawn per base point for the Nijenhuis check, besides `k = 0`.
pub const NIJENHUIS_EXTRA_SAMPLES: usize = 3;
const NIJENHUIS_K_RADIUS: f64 = 0.3;
const NIJENHUIS_POINTS: usize = 27;
const CONNECTION_POINTS: usize = 10;
const GAUGE_POINTS: usize = 125;
/// `g_alpha` against the metric a frame triple was built from.
pub const REFERENCE_METRIC_TOL: f64 = 1e-10;
/// `g_alpha` before and after a gauge transformation.
pub const METRIC_GAUGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Eq1,
    Eq2,
    Nijenhuis,
    Torsion,
    CurvatureMatch,
    GaugeEquivariance,
    Psi,
    Nomizu,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Eq1,
        Check::Eq2,
        Check::Nijenhuis,
        Check::Torsion,
        Check::CurvatureMatch,
        Check::GaugeEquivariance,
        Check::Psi,
        Check::Nomizu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Eq1 => "eq1",
            Check::Eq2 => "eq2",
            Check::Nijenhuis => "nijenhuis",
            Check::Torsion => "torsion",
            Check::CurvatureMatch => "curvature_match",
            Check::GaugeEquivariance => "gauge_equivariance",
            Check::Psi => "psi",
            Check::Nomizu => "nomizu",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| GeomError::InvalidConfig(format!("unknown check '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Json,
    #[default]
    Text,
}

impl FromStr for OutputFormat {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(GeomError::InvalidConfig(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub scenario: String,
    /// Replaces the scenario's default grid.
    pub grid: Option<Grid>,
    /// Per-check tolerance overrides.
    pub tolerances: BTreeMap<Check, f64>,
    /// `None` runs every check that applies to the scenario.
    pub checks: Option<Vec<Check>>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            ..Self::default()
        }
    }
}

/// `"5"`, `"5,5,5"` or `"5,5,5@-1:1,-1:1,0.5:2"`. A single count or a single
/// interval applies to every axis; bounds default to `default_bounds`.
pub fn parse_grid(spec: &str, default_bounds: &[(f64, f64)]) -> Result<Grid> {
    let bad = |msg: &str| GeomError::InvalidConfig(format!("grid '{spec}': {msg}"));
    let dim = default_bounds.len();
    let (counts_part, bounds_part) = match spec.split_once('@') {
        Some((c, b)) => (c, Some(b)),
        None => (spec, None),
    };
    let counts = counts_part
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| bad("counts must be integers")))
        .collect::<Result<Vec<_>>>()?;
    let counts = match counts.len() {
        1 => vec![counts[0]; dim],
        n if n == dim => counts,
        _ => return Err(bad("wrong number of axis counts")),
    };
    let bounds = match bounds_part {
        None => default_bounds.to_vec(),
        Some(b) => {
            let parsed = b
                .split(',')
                .map(|iv| {
                    let (lo, hi) = iv.split_once(':').ok_or_else(|| bad("bounds are lo:hi"))?;
                    let lo = lo.trim().parse::<f64>().map_err(|_| bad("bad lower bound"))?;
                    let hi = hi.trim().parse::<f64>().map_err(|_| bad("bad upper bound"))?;
                    Ok((lo, hi))
                })
                .collect::<Result<Vec<_>>>()?;
            match parsed.len() {
                1 => vec![parsed[0]; dim],
                n if n == dim => parsed,
                _ => return Err(bad("wrong number of axis bounds")),
            }
        }
    };
    Grid::new(counts, bounds)
}

/// `"1e-6"` sets the residual tolerance of `eq1` and `eq2`;
/// `"eq2=1e-5,torsion=1e-4"` sets named checks.
pub fn parse_tolerances(spec: &str) -> Result<BTreeMap<Check, f64>> {
    let value = |s: &str| -> Result<f64> {
        let v = s
            .trim()
            .parse::<f64>()
            .map_err(|_| GeomError::InvalidConfig(format!("tolerance '{s}' is not a number")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(GeomError::InvalidConfig(format!("tolerance '{s}' must be positive")));
        }
        Ok(v)
    };
    let mut out = BTreeMap::new();
    if !spec.contains('=') {
        let v = value(spec)?;
        out.insert(Check::Eq1, v);
        out.insert(Check::Eq2, v);
        return Ok(out);
    }
    for item in spec.split(',') {
        let (name, v) = item
            .split_once('=')
            .ok_or_else(|| GeomError::InvalidConfig(format!("tolerance '{item}' is not name=value")))?;
        out.insert(name.trim().parse()?, value(v)?);
    }
    Ok(out)
}

pub fn parse_checks(spec: &str) -> Result<Vec<Check>> {
    if spec.trim() == "all" {
        return Ok(Check::ALL.to_vec());
    }
    let mut out: Vec<Check> = spec.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Verdict {
    pub status: &'static str,
    pub max_residual: Option<f64>,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.status == "PASS"
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PointRecord {
    pub x: Vec<f64>,
    pub eq1: f64,
    pub eq2: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GridSummary {
    pub counts: Vec<usize>,
    pub bounds: Vec<(f64, f64)>,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub scenario: String,
    pub seed: u64,
    pub grid: GridSummary,
    pub tolerances: BTreeMap<String, f64>,
    pub per_point: Vec<PointRecord>,
    pub max_norms: BTreeMap<String, Option<f64>>,
    pub verdicts: BTreeMap<String, Verdict>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.values().all(Verdict::passed)
    }

    /// 0 when every selected check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One line per check: `CHECK name: PASS|FAIL max_residual=... tol=...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in Check::ALL {
            if let Some(v) = self.verdicts.get(c.name()) {
                let residual = v.max_residual.map_or("n/a".to_string(), |r| format!("{r:.6e}"));
                out.push_str(&format!(
                    "CHECK {}: {} max_residual={} tol={:e}",
                    c.name(),
                    v.status,
                    residual,
                    v.tol
                ));
                if let Some(e) = &v.error {
                    out.push_str(&format!(" error=\"{e}\""));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => Ok(self.to_text()),
        }
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| GeomError::Io(e.error))?;
    Ok(())
}

/// Checks that make sense for a scenario: `psi` needs an inner product.
pub fn applicable_checks(t: &LocalTriple) -> Vec<Check> {
    Check::ALL
        .into_iter()
        .filter(|c| *c != Check::Psi || t.algebra().inner_product().is_some())
        .collect()
}

/// Evenly spaced subset of at most `k` points, always including both ends.
fn sample_points(points: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    if points.len() <= k {
        return points.to_vec();
    }
    (0..k)
        .map(|i| points[(i * (points.len() - 1) + (k - 1) / 2) / (k - 1)].clone())
        .collect()
}

struct Outcome {
    residual: f64,
    passed: bool,
    details: BTreeMap<String, Value>,
}

impl Outcome {
    fn against(residual: f64, tol: f64) -> Self {
        Self {
            residual,
            passed: residual <= tol,
            details: BTreeMap::new(),
        }
    }

    fn detail(mut self, key: &str, v: Value) -> Self {
        self.details.insert(key.to_string(), v);
        self
    }
}

struct Context<'a> {
    triple: &'a LocalTriple,
    defaults: &'a ScenarioDefaults,
    points: &'a [Vec<f64>],
    seed: u64,
}

/// Validates the configuration, runs the checks and writes the report when an
/// output path is set. Configuration problems are errors; failing checks are not.
pub fn run(config: &RunConfig) -> Result<VerificationReport> {
    let triple = build_scenario(&config.scenario)?;
    let defaults = scenario_defaults(&config.scenario)?;
    let grid = config.grid.clone().unwrap_or_else(|| defaults.grid.clone());
    if grid.counts.len() != triple.chart().dim() {
        return Err(GeomError::InvalidConfig(format!(
            "grid has {} axes, chart has {}",
            grid.counts.len(),
            triple.chart().dim()
        )));
    }
    let points = grid.points();
    if let Some(p) = points.iter().find(|p| !triple.chart().contains(p)) {
        return Err(GeomError::InvalidConfig(format!(
            "grid point {p:?} lies outside the chart {:?}",
            triple.chart().bounds()
        )));
    }
    for (c, v) in &config.tolerances {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(GeomError::InvalidConfig(format!("tolerance for {c} must be positive")));
        }
    }
    let checks = match &config.checks {
        Some(c) if c.is_empty() => {
            return Err(GeomError::InvalidConfig("no checks selected".into()))
        }
        Some(c) => {
            let mut c = c.clone();
            c.sort();
            c.dedup();
            c
        }
        None => applicable_checks(&triple),
    };
    let tol = |c: Check| -> f64 {
        config
            .tolerances
            .get(&c)
            .copied()
            .unwrap_or_else(|| defaults.tolerances[c.name()])
    };

    let ctx = Context {
        triple: &triple,
        defaults: &defaults,
        points: &points,
        seed: config.seed,
    };

    let mut per_point = Vec::new();
    let mut results: BTreeMap<Check, std::result::Result<Outcome, String>> = BTreeMap::new();
    if checks.contains(&Check::Eq1) || checks.contains(&Check::Eq2) {
        match zentner_residuals(&triple, &points) {
            Ok(r) => {
                per_point = r
                    .grid
                    .iter()
                    .zip(&r.norms)
                    .map(|(x, n)| PointRecord {
                        x: x.clone(),
                        eq1: n.eq1,
                        eq2: n.eq2,
                    })
                    .collect();
                results.insert(Check::Eq1, Ok(Outcome::against(r.max_norms.eq1, tol(Check::Eq1))));
                results.insert(Check::Eq2, Ok(Outcome::against(r.max_norms.eq2, tol(Check::Eq2))));
            }
            Err(e) => {
                results.insert(Check::Eq1, Err(e.to_string()));
                results.insert(Check::Eq2, Err(e.to_string()));
            }
        }
    }
    for &c in &checks {
        let outcome = match c {
            Check::Eq1 | Check::Eq2 => continue,
            Check::Nijenhuis => check_nijenhuis(&ctx, tol(c)),
            Check::Torsion => check_torsion(&ctx, tol(c)),
            Check::CurvatureMatch => check_curvature_match(&ctx, tol(c)),
            Check::GaugeEquivariance => check_gauge(&ctx, tol(c)),
            Check::Psi => check_psi(&ctx, tol(c)),
            Check::Nomizu => check_nomizu(&ctx, tol(c)),
        };
        results.insert(c, outcome.map_err(|e| e.to_string()));
    }

    let mut verdicts = BTreeMap::new();
    let mut max_norms = BTreeMap::new();
    let mut tolerances = BTreeMap::new();
    for c in checks {
        let t = tol(c);
        tolerances.insert(c.name().to_string(), t);
        let verdict = match results.remove(&c).expect("every selected check has a result") {
            Ok(o) => Verdict {
                status: if o.passed { "PASS" } else { "FAIL" },
                max_residual: Some(o.residual),
                tol: t,
                error: None,
                details: o.details,
            },
            Err(e) => Verdict {
                status: "FAIL",
                max_residual: None,
                tol: t,
                error: Some(e),
                details: BTreeMap::new(),
            },
        };
        max_norms.insert(c.name().to_string(), verdict.max_residual);
        verdicts.insert(c.name().to_string(), verdict);
    }

    let report = VerificationReport {
        scenario: config.scenario.clone(),
        seed: config.seed,
        grid: GridSummary {
            counts: grid.counts.clone(),
            bounds: grid.bounds.clone(),
            points: points.len(),
        },
        tolerances,
        per_point,
        max_norms,
        verdicts,
    };
    if let Some(path) = &config.out {
        write_atomic(path, &report.render(config.format)?)?;
    }
    Ok(report)
}

fn check_nijenhuis(ctx: &Context, tol: f64) -> Result<Outcome> {
    let t = ctx.triple;
    let n = t.algebra().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut samples = Vec::new();
    for x in sample_points(ctx.points, NIJENHUIS_POINTS) {
        samples.push(TotalSpacePoint::at_identity(x.clone(), n));
        for _ in 0..NIJENHUIS_EXTRA_SAMPLES {
            let k = (0..n).map(|_| rng.gen_range(-1.0..1.0) * NIJENHUIS_K_RADIUS / (n as f64).sqrt()).collect();
            samples.push(TotalSpacePoint::new(x.clone(), k));
        }
    }
    let scaled = samples
        .par_iter()
        .map(|y| {
            let s = nijenhuis(t, y)?;
            Ok(s.max_abs / s.j_scale.max(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = scaled.iter().fold(0.0f64, |m, v| m.max(*v));
    let designated = nijenhuis(t, &TotalSpacePoint::at_identity(ctx.defaults.nijenhuis_point.clone(), n))?;
    Ok(Outcome::against(worst, tol)
        .detail("samples", json!(samples.len()))
        .detail("designated_point", json!(ctx.defaults.nijenhuis_point))
        .detail("designated_max_abs", json!(designated.max_abs)))
}

fn connection_samples(ctx: &Context) -> Result<Vec<crate::zentner::InducedConnectionSample>> {
    sample_points(ctx.points, CONNECTION_POINTS)
        .par_iter()
        .map(|x| induced_connection(ctx.triple, x))
        .collect()
}

fn check_torsion(ctx: &Context, tol: f64) -> Result<Outcome> {
    let samples = connection_samples(ctx)?;
    let worst = samples.iter().fold(0.0f64, |m, s| m.max(s.max_torsion()));
    Ok(Outcome::against(worst, tol).detail("points", json!(samples.len())))
}

fn check_curvature_match(ctx: &Context, tol: f64) -> Result<Outcome> {
    let samples = connection_samples(ctx)?;
    let fold = |f: fn(&crate::zentner::InducedConnectionSample) -> f64| {
        samples.iter().fold(0.0f64, |m, s| m.max(f(s)))
    };
    Ok(Outcome::against(fold(|s| s.numeric_bracket_defect()), tol)
        .detail("points", json!(samples.len()))
        .detail("numeric_vs_algebraic", json!(fold(|s| s.curvature_defect()))))
}

/// A second smooth tensorial form for the bracket identity.
fn probe_form(t: &LocalTriple) -> Result<TensorialOneForm> {
    let m = t.chart().dim();
    let n = t.algebra().dim();
    TensorialOneForm::new(AlgForm::new(
        1,
        t.chart().clone(),
        t.algebra().clone(),
        Arc::new(move |x| {
            Ok((0..m * n)
                .map(|k| (0.7 * k as f64 + x[k % m]).sin() + 0.3 * (x[(k + 1) % m] - 0.2 * k as f64).cos())
                .collect())
        }),
    )?)
}

fn require_group(t: &LocalTriple) -> Result<Arc<crate::lie::MatrixGroup>> {
    t.group()
        .cloned()
        .ok_or_else(|| GeomError::InvalidConfig("scenario has no structure group".into()))
}

fn check_gauge(ctx: &Context, tol: f64) -> Result<Outcome> {
    let t = ctx.triple;
    let group = require_group(t)?;
    let other = probe_form(t)?;
    let points = sample_points(ctx.points, GAUGE_POINTS);
    let compare_norms = t.algebra().inner_product().is_some();
    let before = if compare_norms { Some(zentner_residuals(t, &points)?) } else { None };
    let mut identities = 0.0f64;
    let mut norm_shift = 0.0f64;
    for s in 0..GAUGE_SAMPLES {
        let h = LocalGaugeTransformation::random_smooth(
            group.clone(),
            t.chart().clone(),
            ctx.seed.wrapping_mul(GAUGE_SAMPLES).wrapping_add(s),
        );
        let probe = EquivarianceProbe::new(&h, t, &other)?;
        let worst = points
            .par_iter()
            .map(|x| Ok(probe.defects(x)?.max()))
            .collect::<Result<Vec<f64>>>()?;
        identities = worst.iter().fold(identities, |m, v| m.max(*v));
        if let Some(before) = &before {
            let after = zentner_residuals(&gauge_act(&h, t)?, &points)?;
            for (a, b) in before.norms.iter().zip(&after.norms) {
                norm_shift = norm_shift.max((a.eq1 - b.eq1).abs()).max((a.eq2 - b.eq2).abs());
            }
        }
    }
    let mut o = Outcome::against(identities.max(norm_shift), tol)
        .detail("transformations", json!(GAUGE_SAMPLES))
        .detail("points", json!(points.len()))
        .detail("identity_defect", json!(identities));
    o = if compare_norms {
        o.detail("residual_norm_shift", json!(norm_shift))
    } else {
        o.detail("residual_norm_shift", json!("skipped: algebra has no invariant inner product"))
    };
    Ok(o)
}

fn check_psi(ctx: &Context, tol: f64) -> Result<Outcome> {
    let t = ctx.triple;
    let psi = metric_orientation_psi(t, ctx.points)?;
    let expected = ctx.defaults.expected_sectional.ok_or(GeomError::MissingInnerProduct)?;
    let mc = MetricChart::from_triple(t)?;
    let m = t.chart().dim();
    let planes: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .map(|(a, b)| {
            let mut u = vec![0.0; m];
            let mut v = vec![0.0; m];
            u[a] = 1.0;
            v[b] = 1.0;
            (u, v)
        })
        .collect();
    let sample = sample_points(ctx.points, CONNECTION_POINTS);
    let sectional = sample
        .par_iter()
        .map(|x| {
            planes.iter().try_fold(0.0f64, |w, (u, v)| {
                Ok(w.max((riemann_sectional_oracle(&mc, x, u, v)? - expected).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    let mut passed = sectional <= tol;
    let mut o = Outcome::against(sectional, tol)
        .detail("orientation", json!(psi.orientation))
        .detail("expected_sectional", json!(expected));

    if let Some(reference) = &ctx.defaults.reference_metric {
        let mut worst = 0.0f64;
        for (x, g) in psi.points.iter().zip(&psi.metrics) {
            worst = worst.max((g - reference.metric(x)?).amax());
        }
        passed &= worst <= REFERENCE_METRIC_TOL;
        o = o.detail("reference_metric_defect", json!(worst));
    }

    let group = require_group(t)?;
    let h = LocalGaugeTransformation::random_smooth(group, t.chart().clone(), ctx.seed);
    let gauged = gauge_act(&h, t)?;
    let mut shift = 0.0f64;
    for x in &sample {
        shift = shift.max((alpha_metric(&gauged, x)? - alpha_metric(t, x)?).amax());
    }
    passed &= shift <= METRIC_GAUGE_TOL;
    o.passed = passed;
    Ok(o.detail("gauge_metric_shift", json!(shift)))
}

fn check_nomizu(ctx: &Context, tol: f64) -> Result<Outcome> {
    let t = ctx.triple;
    let sample = sample_points(ctx.points, CONNECTION_POINTS);
    let worst = sample
        .par_iter()
        .map(|x| nomizu_curvature_defect(t, x))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);

    // Torsion of the canonical connection on the real-form pair vanishes.
    let rp = ReductivePairSpec::real_form(t.algebra());
    let n = t.algebra().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut torsion = 0.0f64;
    for _ in 0..10 {
        let mut draw = || -> Vec<f64> {
            (0..2 * n).map(|i| if i < n { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect()
        };
        let (x, y, z) = (draw(), draw(), draw());
        torsion = torsion.max(nomizu_tensors(&rp, &x, &y, &z)?.0.amax());
    }
    Ok(Outcome::against(worst.max(torsion), tol)
        .detail("points", json!(sample.len()))
        .detail("canonical_torsion", json!(torsion)))
}

//! JSON suites: a list of `{check, instance, tolerance, seed}` entries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::checks::*;
use super::report::VerificationReport;
use super::smooth::{check_det_inequality, check_prekopa_marginal, seeded_quadratic_exponentials, Smooth2DFn};
use crate::ballbody::{PIndex, QuadratureSpec, StarGauge};
use crate::error::{Error, Result};
use crate::geometry::{BodySpec, DirectionGrid};
use crate::linalg::norm;
use crate::logconcave::{FunctionSpec, LogConcaveFn, MollifySpec, RayProfile};
use crate::radialmean::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub check: String,
    pub instance: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parses a suite file: a JSON array of entries.
pub fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>> {
    serde_json::from_str(text).map_err(|e| Error::Spec(format!("suite: {e}")))
}

/// Either a log-concave function or a body (standing for its covariogram).
#[derive(Debug, Clone, Deserialize)]
struct Target {
    #[serde(default)]
    function: Option<FunctionSpec>,
    #[serde(default)]
    body: Option<BodySpec>,
}

impl Target {
    fn build(&self) -> Result<LogConcaveFn> {
        match (&self.function, &self.body) {
            (Some(f), None) => f.build(),
            (None, Some(b)) => LogConcaveFn::covariogram(&b.build()?),
            _ => Err(Error::Spec(
                "instance needs exactly one of `function` and `body`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PIndex),
    Many(Vec<PIndex>),
}

impl OneOrMany {
    fn list(&self) -> Vec<PIndex> {
        match self {
            Self::One(p) => vec![*p],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct SubadditivityInstance {
    #[serde(flatten)]
    target: Target,
    p: OneOrMany,
    #[serde(default = "default_pairs")]
    pairs: usize,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

fn default_pairs() -> usize {
    10_000
}

#[derive(Debug, Clone, Deserialize)]
struct StencilInstance {
    #[serde(flatten)]
    target: Target,
    p: PIndex,
    u: Vec<f64>,
    theta: Vec<f64>,
    #[serde(default)]
    h: Option<f64>,
    #[serde(default)]
    accuracy: Option<f64>,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, Deserialize)]
struct GridInstance {
    #[serde(flatten)]
    target: Target,
    #[serde(default)]
    p: Option<Vec<PIndex>>,
    grid: GridSpec,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsInstance {
    body: BodySpec,
    grid: GridSpec,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MollifyInstance {
    function: FunctionSpec,
    p: Vec<PIndex>,
    k: Vec<f64>,
    probes: Vec<Vec<f64>>,
    #[serde(default)]
    mc_samples: Option<usize>,
    #[serde(default = "default_j")]
    j: f64,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

fn default_j() -> f64 {
    1e6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryInstance {
    function: FunctionSpec,
    directions: Vec<Vec<f64>>,
    p: Vec<PIndex>,
    #[serde(default)]
    quadrature: QuadratureSpec,
}

/// Profiles for the `I_p` check.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ProfileSpec {
    /// `height · χ_{[0, end]}`.
    Step { height: f64, end: f64 },
    /// `e^{-rate r}`.
    Exponential { rate: f64 },
    /// `(1 - r/end)₊`.
    Linear { end: f64 },
}

impl ProfileSpec {
    fn build(&self) -> Result<RayProfile> {
        match *self {
            Self::Step { height, end } if height > 0.0 && end > 0.0 => Ok(RayProfile::step(height, end)),
            Self::Exponential { rate } if rate > 0.0 => Ok(RayProfile::from_fn(
                move |r| (-rate * r).exp(),
                f64::INFINITY,
                vec![],
                Some((1.0, rate)),
            )),
            Self::Linear { end } if end > 0.0 => Ok(RayProfile::from_fn(
                move |r| (1.0 - r / end).max(0.0),
                end,
                vec![end],
                None,
            )),
            _ => Err(Error::Spec(format!("invalid profile {self:?}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct IpInstance {
    profile: ProfileSpec,
    p: Vec<f64>,
    #[serde(default = "default_escape")]
    escape: f64,
}

fn default_escape() -> f64 {
    10.0
}

/// Members of the shipped two-variable families.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
enum SmoothSpec {
    Gaussian,
    QuadraticExponential {
        a: f64,
        b: f64,
        c: f64,
        #[serde(default)]
        d: f64,
        #[serde(default)]
        e: f64,
    },
    SmoothedBox {
        width: f64,
    },
    /// The `index`-th member of [`seeded_quadratic_exponentials`].
    Seeded {
        index: usize,
        seed: u64,
    },
}

impl SmoothSpec {
    fn build(&self) -> Result<Smooth2DFn> {
        match *self {
            Self::Gaussian => Ok(Smooth2DFn::gaussian()),
            Self::QuadraticExponential { a, b, c, d, e } => Smooth2DFn::quadratic_exponential(a, b, c, d, e),
            Self::SmoothedBox { width } => Smooth2DFn::smoothed_box(width),
            Self::Seeded { index, seed } => Ok(seeded_quadratic_exponentials(index + 1, seed).remove(index)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothInstance {
    smooth: SmoothSpec,
    #[serde(default)]
    scale: Option<f64>,
    #[serde(default)]
    p: Vec<f64>,
    #[serde(default)]
    a: Vec<f64>,
}

impl SmoothInstance {
    fn build(&self) -> Result<Smooth2DFn> {
        let f = self.smooth.build()?;
        match self.scale {
            Some(l) => f.scaled(l),
            None => Ok(f),
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(check: &str, v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Spec(format!("{check}: {e}")))
}

fn describe(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

fn unit(u: &[f64]) -> Vec<f64> {
    let l = norm(u);
    u.iter().map(|x| x / l).collect()
}

/// Runs one entry. Most checks give one report; list-valued instances may give several.
pub fn run_entry(entry: &SuiteEntry, default_seed: u64) -> Result<Vec<VerificationReport>> {
    let seed = entry.seed.unwrap_or(default_seed);
    let name = entry.check.as_str();
    let inst = &entry.instance;
    let label = describe(inst);
    let tol = |d: f64| entry.tolerance.unwrap_or(d);
    let mut out = match name {
        "subadditivity" => {
            let i: SubadditivityInstance = parse(name, inst)?;
            let g = i.target.build()?;
            check_subadditivity_ball(&g, &i.p.list(), &i.quadrature, i.pairs, seed, tol(1e-6), &label)?
        }
        "directional-convexity" => {
            let i: StencilInstance = parse(name, inst)?;
            let g = i.target.build()?;
            let gauge = StarGauge::of_ball_body(&g, i.p, i.quadrature);
            let h = i.h.unwrap_or(1e-3 * norm(&i.u));
            vec![check_directional_convexity(
                &gauge,
                &i.u,
                &unit(&i.theta),
                h,
                i.accuracy.unwrap_or(1e-10),
                &label,
            )?]
        }
        "h-inequality" => {
            let i: StencilInstance = parse(name, inst)?;
            let g = i.target.build()?;
            vec![check_h_inequality(
                &g,
                i.p,
                &i.u,
                &unit(&i.theta),
                i.h,
                &i.quadrature,
                tol(1e-9),
                &label,
            )?]
        }
        "monotonicity" | "zero-continuity" => {
            let i: GridInstance = parse(name, inst)?;
            let g = i.target.build()?;
            let grid = DirectionGrid::new(g.dim(), i.grid.scheme, i.grid.count, i.grid.seed)?;
            if name == "monotonicity" {
                let ps = i.p.ok_or_else(|| Error::Spec("monotonicity: missing `p`".into()))?;
                vec![check_monotonicity(&g, &ps, &grid, &i.quadrature, tol(1e-9), &label)?]
            } else {
                vec![check_zero_continuity(&g, &grid, &i.quadrature, tol(5e-3), &label)?]
            }
        }
        "limits" => {
            let i: LimitsInstance = parse(name, inst)?;
            let body = i.body.build()?;
            let grid = i.grid.build(body.dim())?;
            vec![check_limits(&body, &grid, &i.quadrature, tol(0.01), &label)?]
        }
        "mollify-convergence" => {
            let i: MollifyInstance = parse(name, inst)?;
            let g = i.function.build()?;
            let mut spec = MollifySpec {
                seed,
                ..MollifySpec::default()
            };
            if let Some(n) = i.mc_samples {
                spec.mc_samples = n;
            }
            vec![check_mollify_convergence(
                &g,
                &i.p,
                &i.k,
                &i.probes,
                &i.quadrature,
                &spec,
                i.j,
                &label,
            )?]
        }
        "ip-properties" => {
            let i: IpInstance = parse(name, inst)?;
            vec![check_ip_properties(
                &i.profile.build()?,
                &i.p,
                i.escape,
                tol(1e-9),
                &label,
            )?]
        }
        "boundary-infinity" => {
            let i: BoundaryInstance = parse(name, inst)?;
            let g = i.function.build()?;
            vec![check_boundary_infinity(&g, &i.directions, &i.p, &i.quadrature, &label)?]
        }
        "det-inequality" => {
            let i: SmoothInstance = parse(name, inst)?;
            let f = i.build()?;
            let ps = if i.p.is_empty() { vec![1.0] } else { i.p.clone() };
            ps.iter()
                .map(|&p| check_det_inequality(&f, p, tol(1e-6)))
                .collect::<Result<_>>()?
        }
        "prekopa-marginal" => {
            let i: SmoothInstance = parse(name, inst)?;
            let f = i.build()?;
            let ps = if i.p.is_empty() { vec![1.0] } else { i.p.clone() };
            let a = if i.a.is_empty() {
                vec![0.0, 0.5, 1.0]
            } else {
                i.a.clone()
            };
            ps.iter()
                .map(|&p| check_prekopa_marginal(&f, p, &a, tol(1e-9)))
                .collect::<Result<_>>()?
        }
        other => return Err(Error::Spec(format!("unknown check `{other}`"))),
    };
    for r in &mut out {
        r.seed = seed;
    }
    Ok(out)
}

/// Runs every entry (concurrently) and returns the reports ordered by check
/// name, entries with equal names keeping their order in the suite.
pub fn run_suite(entries: &[SuiteEntry], default_seed: u64) -> Result<Vec<VerificationReport>> {
    let results: Vec<Result<Vec<VerificationReport>>> =
        entries.par_iter().map(|e| run_entry(e, default_seed)).collect();
    let mut reports = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let r = r.map_err(|e| Error::Spec(format!("entry {i} ({}): {e}", entries[i].check)))?;
        reports.extend(r);
    }
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(reports)
}

fn entry(check: &str, instance: Value) -> SuiteEntry {
    SuiteEntry {
        check: check.to_string(),
        instance,
        tolerance: None,
        seed: None,
    }
}

/// The suite shipped as `default.json`.
pub fn default_suite() -> Vec<SuiteEntry> {
    let square = json!({ "type": "cube", "dim": 2 });
    let unit_square = json!({ "type": "box", "min": [0.0, 0.0], "max": [1.0, 1.0] });
    let triangle = json!({ "type": "polytope", "vertices": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] });
    let segment = json!({ "type": "box", "min": [0.0], "max": [1.0] });
    let gauss2 = json!({ "family": "gaussian", "params": { "covariance": [[1.0, 0.0], [0.0, 1.0]] } });
    let grid = json!({ "count": 64 });
    vec![
        entry("subadditivity", json!({ "body": unit_square, "p": 1.0 })),
        entry("subadditivity", json!({ "body": triangle, "p": -0.5 })),
        entry(
            "subadditivity",
            json!({ "function": gauss2, "p": [-0.5, 0.0, 2.0], "pairs": 2000 }),
        ),
        entry(
            "directional-convexity",
            json!({ "function": gauss2, "p": -0.5, "u": [0.8, -0.3], "theta": [0.2, 1.0] }),
        ),
        entry(
            "h-inequality",
            json!({ "function": gauss2, "p": 2.0, "u": [1.0, 0.0], "theta": [0.0, 1.0] }),
        ),
        entry(
            "h-inequality",
            json!({ "function": gauss2, "p": 2.0, "u": [1.0, 0.0], "theta": [1.0, 0.0] }),
        ),
        entry(
            "h-inequality",
            json!({ "body": unit_square, "p": -0.5, "u": [0.3, 0.2], "theta": [-0.4, 0.9] }),
        ),
        entry(
            "det-inequality",
            json!({ "smooth": { "family": "gaussian" }, "p": [1.0] }),
        ),
        entry(
            "det-inequality",
            json!({ "smooth": { "family": "quadratic-exponential", "a": 1.0, "b": 1.0, "c": 1.0 }, "p": [-0.5, 0.5, 2.0] }),
        ),
        entry(
            "det-inequality",
            json!({ "smooth": { "family": "smoothed-box", "width": 0.25 }, "p": [-0.5, 1.0] }),
        ),
        entry(
            "prekopa-marginal",
            json!({ "smooth": { "family": "gaussian" }, "p": [1.0], "a": [0.0, 0.5, 1.0] }),
        ),
        entry(
            "prekopa-marginal",
            json!({ "smooth": { "family": "smoothed-box", "width": 0.1 }, "p": [0.5], "a": [0.0, 0.3, 0.6, 0.9] }),
        ),
        entry(
            "monotonicity",
            json!({ "body": segment, "p": [-0.9, -0.5, 0.0, 1.0, 5.0], "grid": { "count": 2 } }),
        ),
        entry(
            "monotonicity",
            json!({ "function": gauss2, "p": [1.0, 2.0], "grid": grid }),
        ),
        entry("zero-continuity", json!({ "body": unit_square, "grid": grid })),
        entry("limits", json!({ "body": segment, "grid": { "count": 2 } })),
        entry("limits", json!({ "body": unit_square, "grid": grid })),
        entry("limits", json!({ "body": triangle, "grid": grid })),
        entry(
            "mollify-convergence",
            json!({
                "function": { "family": "indicator", "params": { "body": { "type": "box", "min": [-1.0], "max": [1.0] } } },
                "p": [-0.5], "k": [4.0, 16.0, 64.0, 256.0], "probes": [[1.0], [-1.0]]
            }),
        ),
        entry(
            "ip-properties",
            json!({ "profile": { "kind": "step", "height": 1.0, "end": 0.7 }, "p": [-0.5, 0.5, 1.0, 2.0, 5.0] }),
        ),
        entry(
            "ip-properties",
            json!({ "profile": { "kind": "exponential", "rate": 1.0 }, "p": [-0.5, 0.5, 1.0, 2.0, 5.0] }),
        ),
        entry(
            "ip-properties",
            json!({ "profile": { "kind": "linear", "end": 1.0 }, "p": [-0.5, 0.5, 1.0, 2.0, 5.0] }),
        ),
        entry(
            "boundary-infinity",
            json!({
                "function": { "family": "indicator", "params": { "body": unit_square } },
                "directions": [[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], "p": [-0.5, 1.0]
            }),
        ),
        entry(
            "subadditivity",
            json!({ "body": square, "p": [-0.75, -0.25, 0.5, 5.0], "pairs": 2000 }),
        ),
    ]
}

/// One-line status after a suite run.
pub fn status_line(reports: &[VerificationReport]) -> String {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.check.as_str()).collect();
    if failed.is_empty() {
        format!("PASS: {} checks", reports.len())
    } else {
        let mut names = failed.clone();
        names.dedup();
        format!(
            "FAIL: {} of {} checks ({})",
            failed.len(),
            reports.len(),
            names.join(", ")
        )
    }
}

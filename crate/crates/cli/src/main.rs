use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use radial_bodies::ballbody::{ball_gauge_quadrature, radial_values, PIndex, QuadratureSpec, StarGauge};
use radial_bodies::geometry::{covariogram_mc, BodySpec, ConvexBody, Covariogram, DirectionGrid, GridScheme};
use radial_bodies::linalg::normalized;
use radial_bodies::logconcave::{FunctionSpec, LogConcaveFn};
use radial_bodies::radialmean::{
    direct_mc_radii, fmt_num, polar_projection_limit_radius, radial_csv, scaled_limit_samples, RadialMean,
    RadialSummary, MIN_MC_SAMPLES,
};
use radial_bodies::verify::{default_suite, parse_suite, run_suite, status_line, SuiteEntry, VerificationReport};
use radial_bodies::Error;

const MIN_GRID: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "radial-bodies",
    version,
    about = "Ball bodies, radial mean bodies and convexity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Covariogram of a body on a lattice or along a ray.
    Covariogram(CovariogramArgs),
    /// Radial function of K_p(g) on a direction grid.
    Ballbody(BallArgs),
    /// Radial function of R_p K on a direction grid.
    Radialmean(RadialArgs),
    /// Deviation of R_p K from DK (p large) and of (1+p)^{1/p} R_p K from Vol(K) times the polar projection body (p near -1).
    Limits(LimitsArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Gauge values under increasingly fine quadrature settings.
    Study(StudyArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Seed for grids and Monte Carlo.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Number of grid directions.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// uniform-angle, fibonacci-sphere or seeded-random.
    #[arg(long, default_value = "uniform-angle")]
    scheme: String,
    /// Quadrature settings (JSON).
    #[arg(long)]
    quadrature: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CovariogramArgs {
    #[arg(long)]
    body: PathBuf,
    /// Sample along this direction (comma separated) instead of a lattice.
    #[arg(long)]
    ray: Option<String>,
    /// Points per lattice axis, or along the ray.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Estimate by Monte Carlo with this many samples per point.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct BallArgs {
    /// Log-concave function (JSON).
    #[arg(long)]
    function: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Comma-separated list of p values.
    #[arg(long, allow_hyphen_values = true)]
    p_list: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct RadialArgs {
    /// Convex body (JSON).
    #[arg(long)]
    body: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_list: Option<String>,
    /// Use direct Monte Carlo with this many samples per direction.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct LimitsArgs {
    #[arg(long)]
    body: PathBuf,
    /// Positive p values compared with DK.
    #[arg(long, allow_hyphen_values = true, default_value = "1,2,5,10,50,100,200")]
    p_list: String,
    /// p values in (-1, -0.9] compared with the polar projection body.
    #[arg(long, allow_hyphen_values = true, default_value = "-0.9,-0.99,-0.999")]
    negative_p_list: String,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite file (JSON); `default` selects the built-in suite.
    #[arg(long)]
    suite: String,
    /// Replace every entry's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Include wall-clock runtimes in the reports.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[arg(long, conflicts_with = "body")]
    function: Option<PathBuf>,
    /// Study the covariogram of this body.
    #[arg(long)]
    body: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    p: String,
    /// Point at which the gauge is evaluated (comma separated); first axis when absent.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[command(flatten)]
    common: Common,
}

/// Exit status 1 (check failed or computation failed) or 2 (bad input).
enum Failure {
    Check,
    Runtime(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidBody(_)
            | Error::UnboundedBody
            | Error::DegenerateBody(_)
            | Error::Unsupported(_)
            | Error::InvalidParameter(_)
            | Error::InvalidFunction(_)
            | Error::Spec(_)
            | Error::Json(_) => Failure::Input(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Input(msg.into()))
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_body(path: &Path) -> Res<(BodySpec, ConvexBody)> {
    let spec: BodySpec =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let body = spec.build()?;
    Ok((spec, body))
}

fn load_function(path: &Path) -> Res<LogConcaveFn> {
    let spec: FunctionSpec =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(spec.build()?)
}

fn parse_p(s: &str) -> Res<PIndex> {
    let t = s.trim();
    let v = match t.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => f64::INFINITY,
        other => other
            .parse::<f64>()
            .map_err(|_| Failure::Input(format!("invalid p `{t}`")))?,
    };
    PIndex::new(v).map_err(|e| Failure::Input(e.to_string()))
}

fn parse_p_args(p: &Option<String>, list: &Option<String>) -> Res<Vec<PIndex>> {
    match (p, list) {
        (Some(p), None) => Ok(vec![parse_p(p)?]),
        (None, Some(l)) => l.split(',').map(parse_p).collect(),
        _ => input("give exactly one of --p and --p-list"),
    }
}

fn parse_vec(s: &str) -> Res<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("invalid number `{t}`")))
        })
        .collect()
}

fn quadrature(path: &Option<PathBuf>) -> Res<QuadratureSpec> {
    match path {
        Some(p) => QuadratureSpec::from_json(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => Ok(QuadratureSpec::default()),
    }
}

fn grid(args: &GridArgs, dim: usize, seed: u64) -> Res<DirectionGrid> {
    let scheme = match args.scheme.as_str() {
        "uniform-angle" => GridScheme::UniformAngle,
        "fibonacci-sphere" => GridScheme::FibonacciSphere,
        "seeded-random" => GridScheme::SeededRandom,
        other => return input(format!("unknown grid scheme `{other}`")),
    };
    if args.grid < MIN_GRID && dim > 1 {
        return input(format!("--grid must be at least {MIN_GRID}"));
    }
    // the sphere in one dimension has two points
    let count = if dim == 1 { 2 } else { args.grid };
    Ok(DirectionGrid::new(dim, scheme, count, seed)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes the CSV and its JSON summary (next to the CSV, or on standard error).
fn emit_with_summary<S: Serialize>(out: &Option<PathBuf>, csv: &str, summary: &S) -> Res<()> {
    let json = serde_json::to_string_pretty(summary).expect("serializable") + "\n";
    emit(out, csv)?;
    match out {
        Some(p) => emit(&Some(p.with_extension("json")), &json),
        None => {
            eprint!("{json}");
            Ok(())
        }
    }
}

/// Long format `p,index,theta_1,...,theta_n,value` for several `p`.
fn long_csv(grid: &DirectionGrid, ps: &[PIndex], values: &[Vec<f64>]) -> String {
    let mut out = String::from("p,index");
    for i in 1..=grid.dim {
        let _ = write!(out, ",theta_{i}");
    }
    out.push_str(",value\n");
    for (j, p) in ps.iter().enumerate() {
        for (k, d) in grid.directions.iter().enumerate() {
            let _ = write!(out, "{p},{k}");
            for t in d {
                let _ = write!(out, ",{}", fmt_num(*t));
            }
            let _ = writeln!(out, ",{}", fmt_num(values[k][j]));
        }
    }
    out
}

fn radial_output(
    label: &str,
    ps: &[PIndex],
    grid: &DirectionGrid,
    values: &[Vec<f64>],
    out: &Option<PathBuf>,
) -> Res<()> {
    let summaries: Vec<RadialSummary> = ps
        .iter()
        .enumerate()
        .map(|(j, &p)| RadialSummary::new(label, p, grid, &values.iter().map(|v| v[j]).collect::<Vec<_>>()))
        .collect();
    if ps.len() == 1 {
        let radii: Vec<f64> = values.iter().map(|v| v[0]).collect();
        emit_with_summary(out, &radial_csv(grid, &radii), &summaries[0])
    } else {
        emit_with_summary(out, &long_csv(grid, ps, values), &summaries)
    }
}

fn covariogram(a: &CovariogramArgs) -> Res<()> {
    let (_, body) = load_body(&a.body)?;
    let n = body.dim();
    if a.points < 2 {
        return input("--points must be at least 2");
    }
    let cov = Covariogram::new(&body)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    if let Some(n_mc) = a.mc_samples {
        if n_mc < MIN_MC_SAMPLES {
            return input(format!("--mc-samples must be at least {MIN_MC_SAMPLES}"));
        }
    }
    let points: Vec<Vec<f64>> = match &a.ray {
        Some(r) => {
            let theta = normalized(&parse_vec(r)?);
            if theta.len() != n || theta.iter().any(|t| !t.is_finite()) {
                return input("--ray must be a non-zero vector of the body's dimension");
            }
            let end = cov.support_end(&theta);
            (0..a.points)
                .map(|i| {
                    theta
                        .iter()
                        .map(|t| t * end * i as f64 / (a.points - 1) as f64)
                        .collect()
                })
                .collect()
        }
        None => {
            if n > 3 {
                return input("lattices are limited to dimension 3");
            }
            let (lo, hi) = body.bounding_box();
            let half: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
            let mut pts = vec![vec![]];
            for w in &half {
                let axis: Vec<f64> = (0..a.points)
                    .map(|i| -w + 2.0 * w * i as f64 / (a.points - 1) as f64)
                    .collect();
                pts = pts
                    .into_iter()
                    .flat_map(|p| axis.iter().map(move |x| [p.clone(), vec![*x]].concat()))
                    .collect();
            }
            pts
        }
    };
    let mut csv = (1..=n).map(|i| format!("x_{i}")).collect::<Vec<_>>().join(",");
    csv.push_str(if a.mc_samples.is_some() {
        ",value,std_error\n"
    } else {
        ",value\n"
    });
    for x in &points {
        let cells: Vec<String> = x.iter().map(|v| fmt_num(*v)).collect();
        let _ = write!(csv, "{}", cells.join(","));
        match a.mc_samples {
            Some(m) => {
                let e = covariogram_mc(&body, x, m, &mut rng)?;
                let _ = writeln!(csv, ",{},{}", fmt_num(e.value), fmt_num(e.std_error));
            }
            None => {
                let _ = writeln!(csv, ",{}", fmt_num(cov.eval(x)));
            }
        }
    }
    emit(&a.common.out, &csv)
}

fn ballbody(a: &BallArgs) -> Res<()> {
    let g = load_function(&a.function)?;
    let ps = parse_p_args(&a.p, &a.p_list)?;
    let q = quadrature(&a.grid.quadrature)?;
    let grid = grid(&a.grid, g.dim(), a.common.seed)?;
    let values = radial_values(&g, &ps, &grid, &q)?;
    radial_output(g.label(), &ps, &grid, &values, &a.common.out)
}

fn radialmean(a: &RadialArgs) -> Res<()> {
    let (spec, body) = load_body(&a.body)?;
    let label = serde_json::to_string(&spec).expect("serializable");
    let ps = parse_p_args(&a.p, &a.p_list)?;
    let q = quadrature(&a.grid.quadrature)?;
    let grid = grid(&a.grid, body.dim(), a.common.seed)?;
    match a.mc_samples {
        Some(m) => {
            if ps.len() != 1 {
                return input("Monte Carlo takes a single --p");
            }
            if m < MIN_MC_SAMPLES {
                return input(format!("--mc-samples must be at least {MIN_MC_SAMPLES}"));
            }
            let est = direct_mc_radii(&body, ps[0], &grid, m, a.common.seed)?;
            let radii: Vec<f64> = est.iter().map(|e| e.value).collect();
            let mut csv = String::new();
            for (i, line) in radial_csv(&grid, &radii).lines().enumerate() {
                let extra = if i == 0 {
                    "std_error".to_string()
                } else {
                    fmt_num(est[i - 1].std_error)
                };
                let _ = writeln!(csv, "{line},{extra}");
            }
            emit_with_summary(&a.common.out, &csv, &RadialSummary::new(&label, ps[0], &grid, &radii))
        }
        None => {
            let values = RadialMean::new(&body)?.radii(&ps, &grid, &q)?;
            radial_output(&label, &ps, &grid, &values, &a.common.out)
        }
    }
}

fn limits(a: &LimitsArgs) -> Res<()> {
    let (_, body) = load_body(&a.body)?;
    if body.dim() > 3 {
        return input("limits are limited to dimension 3");
    }
    let q = quadrature(&a.grid.quadrature)?;
    let grid = grid(&a.grid, body.dim(), a.common.seed)?;
    let pos: Vec<PIndex> = a.p_list.split(',').map(parse_p).collect::<Res<_>>()?;
    let neg: Vec<PIndex> = a.negative_p_list.split(',').map(parse_p).collect::<Res<_>>()?;
    let cov = Covariogram::new(&body)?;
    let dk: Vec<f64> = grid
        .directions
        .iter()
        .map(|t| 1.0 / cov.difference_body_gauge(t))
        .collect();
    let pp: Vec<f64> = grid
        .directions
        .iter()
        .map(|t| polar_projection_limit_radius(&body, t))
        .collect();
    let mut csv = String::from("p,limit,max_relative_deviation\n");
    let radii = RadialMean::new(&body)?.radii(&pos, &grid, &q)?;
    for (j, p) in pos.iter().enumerate() {
        let worst = radii
            .iter()
            .zip(&dk)
            .map(|(r, d)| (r[j] - d).abs() / d)
            .fold(0.0, f64::max);
        let _ = writeln!(csv, "{p},difference-body,{}", fmt_num(worst));
    }
    for &p in &neg {
        let s: StarGauge = scaled_limit_samples(&body, p, &grid, &q)?;
        let worst = s
            .radii()
            .expect("sampled")
            .iter()
            .zip(&pp)
            .map(|(r, d)| (r - d).abs() / d)
            .fold(0.0, f64::max);
        let _ = writeln!(csv, "{p},polar-projection-body,{}", fmt_num(worst));
    }
    emit(&a.common.out, &csv)
}

fn verify(a: &VerifyArgs) -> Res<()> {
    let path = Path::new(&a.suite);
    let mut entries: Vec<SuiteEntry> = if !path.exists() && (a.suite == "default" || a.suite == "default.json") {
        default_suite()
    } else {
        parse_suite(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
    };
    if let Some(t) = a.tol {
        for e in &mut entries {
            e.tolerance = Some(t);
        }
    }
    let mut reports: Vec<VerificationReport> = run_suite(&entries, a.common.seed)?;
    if !a.timing {
        reports = reports.into_iter().map(|r| r.without_runtime()).collect();
    }
    let json = serde_json::to_string_pretty(&reports).expect("serializable") + "\n";
    emit(&a.common.out, &json)?;
    let status = status_line(&reports);
    eprintln!("{status}");
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn study(a: &StudyArgs) -> Res<()> {
    let g = match (&a.function, &a.body) {
        (Some(f), None) => load_function(f)?,
        (None, Some(b)) => LogConcaveFn::covariogram(&load_body(b)?.1)?,
        _ => return input("give exactly one of --function and --body"),
    };
    let p = parse_p(&a.p)?;
    let x = match &a.x {
        Some(s) => parse_vec(s)?,
        None => {
            let mut e = vec![0.0; g.dim()];
            e[0] = 1.0;
            e
        }
    };
    if x.len() != g.dim() {
        return input("--x has the wrong dimension");
    }
    let settings: Vec<(usize, f64)> = [
        (8, 1e-6),
        (16, 1e-7),
        (24, 1e-8),
        (32, 1e-9),
        (48, 1e-10),
        (64, 1e-11),
        (96, 1e-12),
    ]
    .to_vec();
    let values: Vec<f64> = settings
        .iter()
        .map(|&(n, tol)| {
            let q = QuadratureSpec {
                jacobi_nodes: n,
                legendre_tol: tol,
                truncation_tol: tol,
                ..QuadratureSpec::default()
            };
            ball_gauge_quadrature(&g, p, &x, &q)
        })
        .collect::<Result<_, _>>()?;
    let finest = *values.last().expect("non-empty");
    let mut csv = String::from("jacobi_nodes,legendre_tol,gauge,relative_difference_to_finest\n");
    for ((n, tol), v) in settings.iter().zip(&values) {
        let _ = writeln!(
            csv,
            "{n},{},{},{}",
            fmt_num(*tol),
            fmt_num(*v),
            fmt_num((v - finest).abs() / finest.abs())
        );
    }
    emit(&a.common.out, &csv)
}

fn configure_threads() -> Res<()> {
    if let Ok(v) = std::env::var("RADIAL_BODIES_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("RADIAL_BODIES_THREADS: invalid value `{v}`")))?;
        if n == 0 {
            return input("RADIAL_BODIES_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Res<()> {
    configure_threads()?;
    match &cli.command {
        Command::Covariogram(a) => covariogram(a),
        Command::Ballbody(a) => ballbody(a),
        Command::Radialmean(a) => radialmean(a),
        Command::Limits(a) => limits(a),
        Command::Verify(a) => verify(a),
        Command::Study(a) => study(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

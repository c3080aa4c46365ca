//! Radial `p`-th mean bodies `R_p K = K_p(g_K)`, computed from the covariogram
//! or directly as `(1/Vol K ∫_K ‖x‖_{K-y}^{-p} dy)^{-1/p}` by Monte Carlo.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ballbody::{ball_gauge, over_grid, radial_values, Branch, PIndex, QuadratureSpec, StarGauge};
use crate::error::{Error, Result};
use crate::geometry::{BodySpec, ConvexBody, DirectionGrid, Estimate, GridScheme};
use crate::linalg::norm;
use crate::logconcave::LogConcaveFn;

/// Smallest Monte Carlo sample accepted.
pub const MIN_MC_SAMPLES: usize = 1000;
/// Largest fraction of samples allowed to produce a non-finite gauge.
pub const MAX_REJECTED_FRACTION: f64 = 1e-4;

/// `K` with its covariogram, built once and reused across evaluations.
#[derive(Debug, Clone)]
pub struct RadialMean {
    body: ConvexBody,
    g: LogConcaveFn,
}

impl RadialMean {
    pub fn new(body: &ConvexBody) -> Result<Self> {
        Ok(Self {
            body: body.clone(),
            g: LogConcaveFn::covariogram(body)?,
        })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn covariogram(&self) -> &LogConcaveFn {
        &self.g
    }

    /// `‖x‖_{R_p K}`.
    pub fn gauge(&self, p: PIndex, x: &[f64], q: &QuadratureSpec) -> Result<f64> {
        ball_gauge(&self.g, p, x, q)
    }

    /// `ρ_{R_p K}(θ_i)` for each `p`, `out[i][j]` for direction `i` and `ps[j]`.
    pub fn radii(&self, ps: &[PIndex], grid: &DirectionGrid, q: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
        radial_values(&self.g, ps, grid, q)
    }

    pub fn samples(&self, p: PIndex, grid: &DirectionGrid, q: &QuadratureSpec) -> Result<StarGauge> {
        let radii = self.radii(&[p], grid, q)?.into_iter().map(|v| v[0]).collect();
        StarGauge::of_ball_body(&self.g, p, *q).with_samples(grid.clone(), radii)
    }
}

/// `‖x‖_{R_p K}` through the covariogram.
pub fn radial_mean_gauge(body: &ConvexBody, p: PIndex, x: &[f64], q: &QuadratureSpec) -> Result<f64> {
    RadialMean::new(body)?.gauge(p, x, q)
}

fn direct_mc_with(body: &ConvexBody, p: PIndex, x: &[f64], samples: usize, rng: &mut ChaCha8Rng) -> Result<Estimate> {
    if x.len() != body.dim() {
        return Err(Error::InvalidParameter(
            "point dimension does not match the body".into(),
        ));
    }
    if samples < MIN_MC_SAMPLES {
        return Err(Error::MonteCarlo(format!(
            "{samples} samples are too few for a standard error; need at least {MIN_MC_SAMPLES}"
        )));
    }
    let branch = p.branch();
    if branch == Branch::Infinity {
        return Err(Error::InvalidParameter("the direct form needs finite p".into()));
    }
    if norm(x) == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let p = p.value();
    let log_form = branch == Branch::Zero;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut used = 0usize;
    let mut rejected = 0usize;
    let tries = 1000 * samples.max(1);
    for _ in 0..samples {
        let y = body.sample_point(rng, tries)?;
        // ‖x‖_{K-y} = 1 / exit length
        let s = body.exit_length(&y, x);
        let z = if log_form { -s.ln() } else { s.powf(p) };
        if !z.is_finite() || s == 0.0 {
            rejected += 1;
            continue;
        }
        sum += z;
        sum_sq += z * z;
        used += 1;
    }
    if rejected as f64 > MAX_REJECTED_FRACTION * samples as f64 {
        return Err(Error::MonteCarlo(format!(
            "{rejected} of {samples} samples gave a non-finite gauge of K - y"
        )));
    }
    let m = sum / used as f64;
    let var = (sum_sq / used as f64 - m * m).max(0.0) * used as f64 / (used as f64 - 1.0);
    let se_m = (var / used as f64).sqrt();
    if log_form {
        let value = m.exp();
        return Ok(Estimate {
            value,
            std_error: value * se_m,
        });
    }
    // G = m^{-1/p}, |dG/dm| = m^{-1/p - 1} / |p|
    let value = m.powf(-1.0 / p);
    Ok(Estimate {
        value,
        std_error: value / m * se_m / p.abs(),
    })
}

/// Monte Carlo estimate of `‖x‖_{R_p K}` from its definition, with the
/// standard error of the inner mean carried through `(·)^{-1/p}`
/// (through `exp` at `p = 0`).
pub fn radial_mean_direct_mc(body: &ConvexBody, p: PIndex, x: &[f64], samples: usize, seed: u64) -> Result<Estimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    direct_mc_with(body, p, x, samples, &mut rng)
}

/// Direct Monte Carlo radii `ρ(θ_i) = 1/‖θ_i‖` with one random stream per
/// direction index, so results do not depend on scheduling.
pub fn direct_mc_radii(
    body: &ConvexBody,
    p: PIndex,
    grid: &DirectionGrid,
    samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    over_grid(grid, |index, theta| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let e = direct_mc_with(body, p, theta, samples, &mut rng)?;
        Ok(Estimate {
            value: 1.0 / e.value,
            std_error: e.std_error / (e.value * e.value),
        })
    })
}

/// Radial values of `(1+p)^{1/p} R_p K` for `p ∈ (-1, -0.9]`, to be compared
/// with the polar projection body.
pub fn scaled_limit_samples(
    body: &ConvexBody,
    p: PIndex,
    grid: &DirectionGrid,
    q: &QuadratureSpec,
) -> Result<StarGauge> {
    let pv = p.value();
    if !(pv > -1.0 && pv <= -0.9) {
        return Err(Error::InvalidParameter(format!(
            "the dilated limit needs p in (-1, -0.9], got {pv}"
        )));
    }
    let factor = (1.0 + pv).powf(1.0 / pv);
    let rm = RadialMean::new(body)?;
    let radii: Vec<f64> = rm.radii(&[p], grid, q)?.into_iter().map(|v| factor * v[0]).collect();
    let g = rm.g.clone();
    let q = *q;
    StarGauge::new(
        body.dim(),
        std::sync::Arc::new(move |x: &[f64]| Ok(ball_gauge(&g, p, x, &q)? / factor)),
    )
    .with_samples(grid.clone(), radii)
}

/// Radius of the `p → -1⁺` limit of `(1+p)^{1/p} R_p K` in direction `θ`:
/// `Vol(K) / Vol_{n-1}(P_{θ^⊥} K)`, i.e. the body `Vol(K) Π°K` (the averaging
/// over `K` in `R_p K` brings in the volume factor).
pub fn polar_projection_limit_radius(body: &ConvexBody, theta: &[f64]) -> f64 {
    body.volume() / body.polar_projection_gauge(theta)
}

/// Grid part of a request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub count: usize,
    #[serde(default = "default_scheme")]
    pub scheme: GridScheme,
    #[serde(default)]
    pub seed: u64,
}

fn default_scheme() -> GridScheme {
    GridScheme::UniformAngle
}

impl GridSpec {
    pub fn build(&self, dim: usize) -> Result<DirectionGrid> {
        DirectionGrid::new(dim, self.scheme, self.count, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

/// `{"body": {...}, "p": 1, "grid": {"count": 64}, "quadrature": {...}, "mc": {"samples": N, "seed": s}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialMeanRequest {
    pub body: BodySpec,
    pub p: PIndex,
    pub grid: GridSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSpec>,
}

/// Radii of one request with the grid they were computed on.
#[derive(Debug, Clone)]
pub struct RadialMeanResult {
    pub grid: DirectionGrid,
    pub radii: Vec<f64>,
    /// Standard errors when the Monte Carlo path was used.
    pub std_errors: Option<Vec<f64>>,
}

impl RadialMeanRequest {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if let Some(mc) = &self.mc {
            if mc.samples < MIN_MC_SAMPLES {
                return Err(Error::Spec(format!("mc.samples must be at least {MIN_MC_SAMPLES}")));
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<RadialMeanResult> {
        self.validate()?;
        let body = self.body.build()?;
        let grid = self.grid.build(body.dim())?;
        match &self.mc {
            Some(mc) => {
                let est = direct_mc_radii(&body, self.p, &grid, mc.samples, mc.seed)?;
                Ok(RadialMeanResult {
                    radii: est.iter().map(|e| e.value).collect(),
                    std_errors: Some(est.iter().map(|e| e.std_error).collect()),
                    grid,
                })
            }
            None => {
                let radii = RadialMean::new(&body)?
                    .radii(&[self.p], &grid, &self.quadrature)?
                    .into_iter()
                    .map(|v| v[0])
                    .collect();
                Ok(RadialMeanResult {
                    grid,
                    radii,
                    std_errors: None,
                })
            }
        }
    }
}

/// A number with 16 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.15e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV with header `index,theta_1,...,theta_n,value`.
pub fn radial_csv(grid: &DirectionGrid, values: &[f64]) -> String {
    let mut out = String::from("index");
    for i in 1..=grid.dim {
        let _ = write!(out, ",theta_{i}");
    }
    out.push_str(",value\n");
    for (k, (d, v)) in grid.directions.iter().zip(values).enumerate() {
        let _ = write!(out, "{k}");
        for t in d {
            let _ = write!(out, ",{}", fmt_num(*t));
        }
        let _ = writeln!(out, ",{}", fmt_num(*v));
    }
    out
}

/// `{body, p, grid, min_radius, max_radius}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSummary {
    pub body: String,
    pub p: String,
    pub grid: GridSummary,
    pub min_radius: f64,
    pub max_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub dim: usize,
    pub scheme: GridScheme,
    pub count: usize,
    pub seed: u64,
}

impl RadialSummary {
    pub fn new(body: &str, p: PIndex, grid: &DirectionGrid, radii: &[f64]) -> Self {
        Self {
            body: body.to_string(),
            p: p.to_string(),
            grid: GridSummary {
                dim: grid.dim,
                scheme: grid.scheme,
                count: grid.len(),
                seed: grid.seed,
            },
            min_radius: radii.iter().copied().fold(f64::INFINITY, f64::min),
            max_radius: radii.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

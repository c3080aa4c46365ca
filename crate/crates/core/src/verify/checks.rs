//! Checks on gauges of ball bodies and radial mean bodies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{ReportBuilder, VerificationReport};
use crate::ballbody::{ball_gauge, ball_gauges, i_p, radial_values, Eta, PIndex, QuadratureSpec, StarGauge, ZERO_BAND};
use crate::error::{Error, Result};
use crate::geometry::{random_unit, ConvexBody, Covariogram, DirectionGrid};
use crate::linalg::norm;
use crate::logconcave::{mollify, ray_profile, LogConcaveFn, MollifySpec, RayProfile};
use crate::radialmean::{polar_projection_limit_radius, scaled_limit_samples, RadialMean};

/// Seeded pairs `(u, v)` with directions uniform on the sphere and lengths in `[1/4, 1]`.
fn random_pairs(dim: usize, pairs: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|_| {
            let a: f64 = rng.gen_range(0.25..=1.0);
            let b: f64 = rng.gen_range(0.25..=1.0);
            let u: Vec<f64> = random_unit(dim, &mut rng).iter().map(|t| a * t).collect();
            let v: Vec<f64> = random_unit(dim, &mut rng).iter().map(|t| b * t).collect();
            (u, v)
        })
        .collect()
}

fn finite(index: usize, x: &[f64], v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteGauge {
            index,
            direction: x.to_vec(),
        })
    }
}

/// Evaluates `gauges(x)` (one value per body) on `u`, `v` and `u + v` for each
/// pair and records `‖u+v‖ - ‖u‖ - ‖v‖` relative to `‖u‖ + ‖v‖`.
fn subadditivity_core<F>(
    dim: usize,
    bodies: usize,
    gauges: F,
    pairs: usize,
    seed: u64,
    tol: f64,
    labels: &[String],
) -> Result<Vec<VerificationReport>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync + Send,
{
    let probes = random_pairs(dim, pairs, seed);
    let values: Vec<Result<[Vec<f64>; 3]>> = probes
        .par_iter()
        .enumerate()
        .map(|(i, (u, v))| {
            let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
            let gu = gauges(u)?;
            let gv = gauges(v)?;
            let gw = if norm(&w) == 0.0 {
                vec![0.0; bodies]
            } else {
                gauges(&w)?
            };
            for k in 0..bodies {
                finite(i, u, gu[k])?;
                finite(i, v, gv[k])?;
                finite(i, &w, gw[k])?;
            }
            Ok([gu, gv, gw])
        })
        .collect();
    let mut builders: Vec<ReportBuilder> = labels
        .iter()
        .map(|l| ReportBuilder::new("subadditivity", l.clone(), seed, tol))
        .collect();
    for ((u, v), vals) in probes.iter().zip(values) {
        let [gu, gv, gw] = vals?;
        for k in 0..bodies {
            let rhs = gu[k] + gv[k];
            let input: Vec<f64> = u.iter().chain(v).copied().collect();
            builders[k].probe(input, gw[k], rhs, (gw[k] - rhs) / rhs);
        }
    }
    Ok(builders
        .into_iter()
        .map(|mut b| {
            b.details(json!({ "pairs": pairs }));
            b.finish()
        })
        .collect())
}

/// `‖u+v‖ <= ‖u‖ + ‖v‖ + tol (‖u‖ + ‖v‖)` over seeded random pairs.
pub fn check_subadditivity(
    gauge: &StarGauge,
    pairs: usize,
    seed: u64,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let mut r = subadditivity_core(
        gauge.dim(),
        1,
        |x| Ok(vec![gauge.gauge(x)?]),
        pairs,
        seed,
        tol,
        &[instance.to_string()],
    )?;
    Ok(r.remove(0))
}

/// Subadditivity of `K_p(g)` for several `p` on the same pairs, sharing the
/// per-ray work; one report per `p`.
pub fn check_subadditivity_ball(
    g: &LogConcaveFn,
    ps: &[PIndex],
    q: &QuadratureSpec,
    pairs: usize,
    seed: u64,
    tol: f64,
    instance: &str,
) -> Result<Vec<VerificationReport>> {
    let labels: Vec<String> = ps.iter().map(|p| format!("{instance}, p = {p}")).collect();
    subadditivity_core(
        g.dim(),
        ps.len(),
        |x| ball_gauges(g, ps, x, q),
        pairs,
        seed,
        tol,
        &labels,
    )
}

/// Second difference `(‖u+hθ‖ - 2‖u‖ + ‖u-hθ‖)/h² >= -(c h + noise)` with
/// `c = ‖u‖/|u|²` and `noise = 4 ε ‖u‖ / h²` for gauge values accurate to
/// relative `ε`.
pub fn check_directional_convexity(
    gauge: &StarGauge,
    u: &[f64],
    theta: &[f64],
    h: f64,
    accuracy: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let at = |t: f64| -> Result<f64> {
        let x: Vec<f64> = u.iter().zip(theta).map(|(a, b)| a + t * b).collect();
        finite(0, &x, gauge.gauge(&x)?)
    };
    let (gm, g0, gp) = (at(-h)?, at(0.0)?, at(h)?);
    let d2 = (gp - 2.0 * g0 + gm) / (h * h);
    let c = g0 / norm(u).powi(2);
    let tol = c * h + 4.0 * accuracy * g0 / (h * h);
    let mut b = ReportBuilder::new("directional-convexity", instance, 0, tol);
    b.probe(u.iter().chain(theta).copied().collect(), d2, 0.0, -d2);
    b.details(json!({ "second_difference": d2, "c": c, "h": h }));
    Ok(b.finish())
}

fn tightened(q: &QuadratureSpec) -> QuadratureSpec {
    QuadratureSpec {
        eta: q.eta,
        jacobi_nodes: q.jacobi_nodes.max(64),
        legendre_tol: (q.legendre_tol * 1e-3).max(1e-13),
        truncation_tol: (q.truncation_tol * 1e-3).max(1e-14),
    }
}

/// `p Ḧ/H <= (1+p) (Ḣ/H)²` for `H(t) = ‖u + tθ‖_{K_p(g)}^{-p}` from
/// fourth-order differences with step `h`. The allowed excess is the sum of
/// a truncation estimate (difference to the stencil with step `2h`) and a
/// rounding bound from the spread between two quadrature settings.
#[allow(clippy::too_many_arguments)]
pub fn check_h_inequality(
    g: &LogConcaveFn,
    p: PIndex,
    u: &[f64],
    theta: &[f64],
    h: Option<f64>,
    q: &QuadratureSpec,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let pv = p.value();
    if !pv.is_finite() || pv.abs() < ZERO_BAND {
        return Err(Error::InvalidParameter("the H-inequality needs finite p != 0".into()));
    }
    let h = h.unwrap_or(1e-4 * norm(u));
    let fine = tightened(q);
    let ts: Vec<f64> = [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0].iter().map(|k| k * h).collect();
    let mut hv = Vec::with_capacity(ts.len());
    let mut eps: f64 = 1e-14;
    for &t in &ts {
        let x: Vec<f64> = u.iter().zip(theta).map(|(a, b)| a + t * b).collect();
        let gt = ball_gauge(g, p, &x, &fine)?;
        let gd = ball_gauge(g, p, &x, q)?;
        if !(gt.is_finite() && gt > 0.0) {
            return Err(Error::NonFiniteGauge { index: 0, direction: x });
        }
        eps = eps.max(((gt - gd) / gt).abs());
        hv.push(gt.powf(-pv));
    }
    let sides = |hm2: f64, hm1: f64, h0: f64, hp1: f64, hp2: f64, step: f64| {
        let d1 = (-hp2 + 8.0 * hp1 - 8.0 * hm1 + hm2) / (12.0 * step);
        let d2 = (-hp2 + 16.0 * hp1 - 30.0 * h0 + 16.0 * hm1 - hm2) / (12.0 * step * step);
        (pv * d2 / h0, (1.0 + pv) * (d1 / h0).powi(2), d1 / h0)
    };
    let (lhs, rhs, slope) = sides(hv[1], hv[2], hv[3], hv[4], hv[5], h);
    let (lhs2, rhs2, _) = sides(hv[0], hv[1], hv[3], hv[5], hv[6], 2.0 * h);
    let truncation = (lhs - lhs2).abs() + (rhs - rhs2).abs();
    let delta = pv.abs() * eps;
    let rounding = pv.abs() * (64.0 / 12.0) * delta / (h * h) + (1.0 + pv) * 2.0 * slope.abs() * 1.5 * delta / h;
    let allowance = tol * (lhs.abs() + rhs.abs()) + truncation + rounding;
    let mut b = ReportBuilder::new("h-inequality", instance, 0, allowance);
    b.probe(u.iter().chain(theta).copied().collect(), lhs, rhs, lhs - rhs);
    b.details(json!({
        "lhs": lhs, "rhs": rhs, "h": h, "truncation": truncation, "rounding": rounding,
        "gauge_accuracy": eps, "margin": rhs - lhs,
    }));
    Ok(b.finish())
}

/// For consecutive `p < q` of the list and each direction,
/// `‖θ‖_p >= ‖θ‖_q`, i.e. `ρ_p <= ρ_q (1 + tol)`.
pub fn check_monotonicity(
    g: &LogConcaveFn,
    ps: &[PIndex],
    grid: &DirectionGrid,
    q: &QuadratureSpec,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let mut ps = ps.to_vec();
    ps.sort_by(|a, b| a.value().total_cmp(&b.value()));
    let radii = radial_values(g, &ps, grid, q)?;
    let mut b = ReportBuilder::new("monotonicity", instance, grid.seed, tol);
    for (theta, row) in grid.directions.iter().zip(&radii) {
        for j in 1..ps.len() {
            let (lo, hi) = (row[j - 1], row[j]);
            if hi == 0.0 && lo == 0.0 {
                continue;
            }
            let mut input = theta.clone();
            input.push(ps[j - 1].value());
            input.push(ps[j].value());
            b.probe(input, lo, hi, (lo - hi) / hi);
        }
    }
    b.details(json!({ "p": ps.iter().map(|p| p.value()).collect::<Vec<_>>() }));
    Ok(b.finish())
}

/// `|ρ_{±10⁻³}(θ)/ρ_0(θ) - 1| <= tol` on the grid.
pub fn check_zero_continuity(
    g: &LogConcaveFn,
    grid: &DirectionGrid,
    q: &QuadratureSpec,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let ps = [PIndex::new(-ZERO_BAND)?, PIndex::new(0.0)?, PIndex::new(ZERO_BAND)?];
    let radii = radial_values(g, &ps, grid, q)?;
    let mut b = ReportBuilder::new("zero-continuity", instance, grid.seed, tol);
    for (theta, row) in grid.directions.iter().zip(&radii) {
        for k in [0, 2] {
            b.probe(theta.clone(), row[k], row[1], (row[k] / row[1] - 1.0).abs());
        }
    }
    Ok(b.finish())
}

/// `ρ_{R_200 K}` against `ρ_{DK}` and `(1+p)^{1/p} ρ_{R_p K}` at `p = -0.999`
/// against `ρ_{Vol(K) Π°K}`, both within `tol` relative on the grid.
pub fn check_limits(
    body: &ConvexBody,
    grid: &DirectionGrid,
    q: &QuadratureSpec,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    if body.dim() > 3 {
        return Err(Error::Unsupported("limit checks need dimension at most 3".into()));
    }
    let cov = Covariogram::new(body)?;
    let rm = RadialMean::new(body)?;
    let high = PIndex::new(200.0)?;
    let upper = rm.radii(&[high], grid, q)?;
    let lower = scaled_limit_samples(body, PIndex::new(-0.999)?, grid, q)?;
    let mut b = ReportBuilder::new("limits", instance, grid.seed, tol);
    let (mut worst_up, mut worst_low) = (0.0f64, 0.0f64);
    for (i, theta) in grid.directions.iter().enumerate() {
        let dk = 1.0 / cov.difference_body_gauge(theta);
        let d_up = (upper[i][0] - dk).abs() / dk;
        worst_up = worst_up.max(d_up);
        let mut input = theta.clone();
        input.push(200.0);
        b.probe(input, upper[i][0], dk, d_up);
        let pp = polar_projection_limit_radius(body, theta);
        let r = lower.radii().expect("sampled")[i];
        let d_low = (r - pp).abs() / pp;
        worst_low = worst_low.max(d_low);
        let mut input = theta.clone();
        input.push(-0.999);
        b.probe(input, r, pp, d_low);
    }
    b.details(json!({
        "difference_body_deviation": worst_up,
        "polar_projection_deviation": worst_low,
    }));
    Ok(b.finish())
}

/// `e_k(θ) = |‖θ‖_{K_p(g_k)} / ‖θ‖_{K_p(g)} - 1|` along the `k` list, where
/// `g_k` mollifies `e^{-|x|²/j} g`; passes when every probe ends below where
/// it started.
#[allow(clippy::too_many_arguments)]
pub fn check_mollify_convergence(
    g: &LogConcaveFn,
    ps: &[PIndex],
    ks: &[f64],
    probes: &[Vec<f64>],
    q: &QuadratureSpec,
    spec: &MollifySpec,
    j: f64,
    instance: &str,
) -> Result<VerificationReport> {
    if ks.len() < 2 {
        return Err(Error::InvalidParameter("need at least two values of k".into()));
    }
    let n = g.dim();
    let damp = LogConcaveFn::gaussian(
        &(0..n)
            .map(|i| (0..n).map(|k| if i == k { 0.5 * j } else { 0.0 }).collect())
            .collect::<Vec<Vec<f64>>>(),
    )?;
    let gj = LogConcaveFn::product(vec![g.clone(), damp])?;
    let base: Vec<Vec<f64>> = probes.iter().map(|x| ball_gauges(g, ps, x, q)).collect::<Result<_>>()?;
    let mut seqs = vec![vec![Vec::with_capacity(ks.len()); ps.len()]; probes.len()];
    for &k in ks {
        let m = mollify(&gj, k, spec)?;
        let vals: Vec<Result<Vec<f64>>> = probes.par_iter().map(|x| ball_gauges(&m.function, ps, x, q)).collect();
        for (i, v) in vals.into_iter().enumerate() {
            let v = v?;
            for (jp, (&vk, &v0)) in v.iter().zip(&base[i]).enumerate() {
                let e = (vk / v0 - 1.0).abs();
                if !e.is_finite() {
                    return Err(Error::NonFiniteGauge {
                        index: i,
                        direction: probes[i].clone(),
                    });
                }
                seqs[i][jp].push(e);
            }
        }
    }
    let mut b = ReportBuilder::new("mollify-convergence", instance, spec.seed, 0.0);
    for (i, x) in probes.iter().enumerate() {
        for (jp, p) in ps.iter().enumerate() {
            let s = &seqs[i][jp];
            let mut input = x.clone();
            input.push(p.value());
            b.probe(input, s[s.len() - 1], s[0], s[s.len() - 1] - s[0]);
        }
    }
    b.details(json!({ "k": ks, "p": ps.iter().map(|p| p.value()).collect::<Vec<_>>(), "errors": seqs }));
    Ok(b.finish())
}

/// `I_p(ψ)` non-decreasing along the list (relative slack `tol`), and at
/// `p = 200` within 1% of a finite support end or above `escape` otherwise.
/// Violations are reported as the excess over each allowance.
pub fn check_ip_properties(
    psi: &RayProfile,
    ps: &[f64],
    escape: f64,
    tol: f64,
    instance: &str,
) -> Result<VerificationReport> {
    let mut ps = ps.to_vec();
    ps.sort_by(f64::total_cmp);
    let vals: Vec<f64> = ps.iter().map(|&p| i_p(psi, p)).collect::<Result<_>>()?;
    let mut b = ReportBuilder::new("ip-properties", instance, 0, 0.0);
    for j in 1..ps.len() {
        b.probe(
            vec![ps[j - 1], ps[j]],
            vals[j - 1],
            vals[j],
            (vals[j - 1] - vals[j]) / vals[j] - tol,
        );
    }
    let top = i_p(psi, 200.0)?;
    let tau = psi.support_end;
    if tau.is_finite() {
        b.probe(vec![200.0], top, tau, (top - tau).abs() / tau - 0.01);
    } else {
        b.probe(vec![200.0], top, escape, (escape - top) / escape);
    }
    b.details(json!({ "p": ps, "values": vals, "i_200": top, "support_end": tau }));
    Ok(b.finish())
}

/// Along directions where `g` vanishes on the whole open ray, every tested
/// `p` must give `+∞`; other directions are reported without assertion.
pub fn check_boundary_infinity(
    g: &LogConcaveFn,
    directions: &[Vec<f64>],
    ps: &[PIndex],
    q: &QuadratureSpec,
    instance: &str,
) -> Result<VerificationReport> {
    let mut b = ReportBuilder::new("boundary-infinity", instance, 0, 0.0);
    let mut finite_values = Vec::new();
    for u in directions {
        let len = norm(u);
        let theta: Vec<f64> = u.iter().map(|t| t / len).collect();
        let off = !(ray_profile(g, &theta).support_end > 0.0);
        for &p in ps {
            let v = ball_gauge(g, p, u, q)?;
            if off {
                let mut input = u.clone();
                input.push(p.value());
                b.probe(input, v, f64::INFINITY, if v.is_infinite() { 0.0 } else { 1.0 });
            } else {
                finite_values.push(json!({ "direction": u, "p": p.value(), "gauge": v }));
            }
        }
    }
    b.details(json!({ "not_asserted": finite_values }));
    Ok(b.finish())
}

/// Quadrature spec used by the checks when none is given.
pub fn default_quadrature() -> QuadratureSpec {
    QuadratureSpec {
        eta: Eta::Auto,
        ..QuadratureSpec::default()
    }
}

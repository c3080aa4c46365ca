//! Radial integrals along one ray.
//!
//! Everything here works with a unit direction and returns the radial value
//! `ρ(θ) = ‖θ‖⁻¹`. Near the origin the weight `r^β` is integrated with a
//! Gauss–Jacobi rule; between consecutive kinks adaptive Gauss–Kronrod; past
//! the last kink the range is doubled until a log-concave tail bound is small.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use super::{Branch, Eta, PIndex, QuadratureSpec};
use crate::error::{Error, Result};
use crate::logconcave::RayProfile;
use crate::piecewise::PolyPiece;
use crate::quadrature::{integrate_adaptive, EndpointRule};

const MAX_DOUBLINGS: usize = 80;
const MAX_SEGMENTS: usize = 2000;

thread_local! {
    static RULES: RefCell<HashMap<(usize, u64), Arc<EndpointRule>>> = RefCell::new(HashMap::new());
}

fn endpoint_rule(n: usize, beta: f64) -> Result<Arc<EndpointRule>> {
    let key = (n, beta.to_bits());
    if let Some(r) = RULES.with(|m| m.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let rule = Arc::new(EndpointRule::new(n, beta)?);
    RULES.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() > 256 {
            m.clear();
        }
        m.insert(key, rule.clone());
    });
    Ok(rule)
}

/// Split point and kinks of one ray.
struct Layout {
    psi0: f64,
    tau: f64,
    eta: f64,
    /// Kinks in `(eta, tau]`, ending with `tau` when finite.
    knots: Vec<f64>,
}

fn layout(prof: &RayProfile, spec: &QuadratureSpec) -> Layout {
    let psi0 = prof.origin_value;
    let tau = prof.support_end;
    let first = prof
        .breakpoints
        .iter()
        .copied()
        .find(|&b| b > 0.0)
        .unwrap_or(f64::INFINITY);
    let cap = (0.5 * tau).min(first);
    let eta = match spec.eta {
        Eta::Fixed(v) => v.min(cap),
        Eta::Auto => {
            let mut r = if cap.is_finite() { cap } else { 1.0 };
            if prof.eval(r) < 0.99 * psi0 {
                for _ in 0..200 {
                    r *= 0.5;
                    if prof.eval(r) >= 0.99 * psi0 {
                        break;
                    }
                }
            } else {
                for _ in 0..60 {
                    if 2.0 * r > cap || prof.eval(2.0 * r) < 0.99 * psi0 {
                        break;
                    }
                    r *= 2.0;
                }
            }
            r
        }
    };
    let mut knots: Vec<f64> = prof
        .breakpoints
        .iter()
        .copied()
        .filter(|&b| b > eta * (1.0 + 1e-12) && b <= tau)
        .collect();
    knots.dedup();
    if tau.is_finite() && knots.last() != Some(&tau) {
        knots.push(tau);
    }
    Layout { psi0, tau, eta, knots }
}

/// `ψ(r) <= ψ(T) e^{-s (r - T)}` for `r >= T`, from the chord of `log ψ`
/// over `[T/2, T]`. `None` when the profile does not decay there yet.
fn tail_slope(prof: &RayProfile, t: f64) -> Option<(f64, f64)> {
    let at_t = prof.eval(t);
    if at_t <= 0.0 {
        return Some((0.0, f64::INFINITY));
    }
    let half = prof.eval(0.5 * t);
    if !(half > at_t) {
        return None;
    }
    Some((at_t, (half / at_t).ln() / (0.5 * t)))
}

/// Bound on `∫_T^∞ ψ(r) (r/R)^{q} dr` given the chord slope.
fn power_tail(psi_t: f64, s: f64, t: f64, q: f64, scale: f64) -> f64 {
    if psi_t == 0.0 {
        return 0.0;
    }
    let rate = if q > 0.0 { s - q / t } else { s };
    if !(rate > 0.0) {
        return f64::INFINITY;
    }
    (psi_t.ln() + q * (t / scale).ln()).exp() / rate
}

/// The maximizer of `r^{q} ψ(r)` on a geometric grid, used as a scale so that
/// large powers neither overflow nor underflow.
fn peak_scale(prof: &RayProfile, q: f64, eta: f64, tau: f64) -> f64 {
    let mut best = (f64::NEG_INFINITY, eta);
    let mut falling = 0;
    let mut r = eta;
    for _ in 0..800 {
        if r > tau {
            break;
        }
        let v = prof.eval(r);
        if v <= 0.0 {
            break;
        }
        let h = q * r.ln() + v.ln();
        if h > best.0 {
            best = (h, r);
            falling = 0;
        } else {
            falling += 1;
            if falling > 8 {
                break;
            }
        }
        r *= 2f64.powf(0.25);
    }
    best.1
}

/// `∫_lo^hi f` with the engine's tolerances; `reference` sets the absolute floor.
fn segment<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec, reference: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let abs = 0.1 * spec.legendre_tol * reference.abs();
    Ok(integrate_adaptive(f, lo, hi, abs, spec.legendre_tol, MAX_SEGMENTS)?.value)
}

/// Integrates `integrand(r, lo, hi)` piece by piece on `[eta, ∞)` over the knots, then
/// doubles `T` past the last knot until `done(T, total)` accepts the tail.
/// Returns the accumulated value and the final `T`.
fn march<H, W, B>(
    lay: &Layout,
    spec: &QuadratureSpec,
    start: f64,
    floor: f64,
    mut integrand: H,
    mut piece_h: W,
    mut done: B,
) -> Result<(f64, f64)>
where
    H: FnMut(f64, f64, f64) -> f64,
    W: FnMut(f64, f64),
    B: FnMut(f64, f64) -> bool,
{
    let mut acc = start;
    let mut lo = lay.eta;
    for &k in &lay.knots {
        piece_h(lo, k);
        let (a, b) = (lo, k);
        acc += segment(|r| integrand(r, a, b), a, b, spec, acc.abs().max(floor))?;
        lo = k;
    }
    if lay.tau.is_finite() {
        return Ok((acc, lay.tau));
    }
    let mut t = 2.0 * lo.max(lay.eta);
    for _ in 0..MAX_DOUBLINGS {
        piece_h(lo, t);
        let (a, b) = (lo, t);
        acc += segment(|r| integrand(r, a, b), a, b, spec, acc.abs().max(floor))?;
        lo = t;
        if done(t, acc) {
            return Ok((acc, t));
        }
        t *= 2.0;
    }
    Err(Error::Divergent(format!(
        "radial integral did not converge by r = {lo:e}: the profile decays too slowly for this p"
    )))
}

/// `ρ(θ)` from exact polynomial pieces covering `[0, τ]`.
pub(crate) fn radial_from_pieces(pieces: &[PolyPiece], psi0: f64, p: PIndex) -> Option<f64> {
    let tau = pieces.last()?.b;
    // the pieces and g(o) may be computed differently; accept rounding
    let first = pieces.first()?;
    let q0 = if first.a == 0.0 { first.coeffs[0] } else { psi0 };
    if (q0 - psi0).abs() > 1e-12 * psi0 {
        return None;
    }
    let psi0 = q0;
    let v = match p.branch() {
        Branch::Infinity => tau,
        Branch::Positive => {
            let p = p.value();
            let m: f64 = pieces.iter().map(|q| q.moment(p - 1.0, 0.0)).sum();
            (p * m / psi0).powf(1.0 / p)
        }
        Branch::Negative => {
            let p = p.value();
            let n: f64 = pieces.iter().map(|q| q.moment(p - 1.0, psi0)).sum::<f64>() + psi0 * tau.powf(p) / p;
            let base = p * n / psi0;
            if !(base > 0.0) {
                return None;
            }
            base.powf(1.0 / p)
        }
        Branch::Zero => {
            let l: f64 = pieces.iter().map(|q| q.moment(-1.0, psi0)).sum();
            (tau.ln() + l / psi0).exp()
        }
    };
    (v.is_finite() && v > 0.0).then_some(v)
}

/// `ρ(θ)` for the four-branch gauge, preferring exact pieces.
pub(crate) fn radial_value(prof: &RayProfile, p: PIndex, spec: &QuadratureSpec) -> Result<f64> {
    radial_value_with(prof, p, spec, None)
}

/// As [`radial_value`], reusing pieces computed once for several `p`.
pub(crate) fn radial_value_with(
    prof: &RayProfile,
    p: PIndex,
    spec: &QuadratureSpec,
    pieces: Option<&[PolyPiece]>,
) -> Result<f64> {
    let psi0 = prof.origin_value;
    if !(psi0 > 0.0) || !psi0.is_finite() {
        return Err(Error::InvalidFunction(format!(
            "profile value at the origin must be positive, got {psi0}"
        )));
    }
    let tau = prof.support_end;
    if !(tau > 0.0) {
        // g(rθ) = 0 for all r > 0
        return Ok(0.0);
    }
    if p.branch() == Branch::Infinity {
        return Ok(tau);
    }
    let owned;
    let pieces = match pieces {
        Some(p) => Some(p),
        None => match prof.pieces() {
            Some(Ok(v)) => {
                owned = v;
                Some(owned.as_slice())
            }
            _ => None,
        },
    };
    if let Some(ps) = pieces {
        if let Some(v) = radial_from_pieces(ps, psi0, p) {
            return Ok(v);
        }
    }
    general(prof, p, spec)
}

/// The quadrature path, for profiles known only through point values.
pub(crate) fn general(prof: &RayProfile, p: PIndex, spec: &QuadratureSpec) -> Result<f64> {
    let lay = layout(prof, spec);
    let (psi0, eta) = (lay.psi0, lay.eta);
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "split point must be positive, got {eta}"
        )));
    }
    let n = spec.jacobi_nodes;
    match p.branch() {
        Branch::Infinity => Ok(lay.tau),
        Branch::Positive => {
            let p = p.value();
            let q = p - 1.0;
            let scale = if q > 0.0 {
                peak_scale(prof, q, eta, lay.tau)
            } else {
                1.0
            };
            let rule = endpoint_rule(n, q)?;
            // ∫_0^η r^{p-1} ψ = η (η/R)^{p-1} ∫_0^1 u^{p-1} ψ(ηu) du
            let pref = eta * (q * (eta / scale).ln()).exp();
            let j = pref * rule.integrate(1.0, |u| prof.eval(eta * u));
            let floor = psi0 * pref / p;
            let (m, _) = march(
                &lay,
                spec,
                j,
                floor,
                |r, _, _| {
                    let v = prof.eval(r);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * (q * (r / scale).ln()).exp()
                    }
                },
                |_, _| (),
                |t, acc| {
                    tail_slope(prof, t)
                        .is_some_and(|(pt, s)| power_tail(pt, s, t, q, scale) <= spec.truncation_tol * acc.abs())
                },
            )?;
            if !(m > 0.0) {
                return Err(Error::Quadrature {
                    achieved: m,
                    target: spec.legendre_tol,
                });
            }
            Ok(((q * scale.ln() + (p * m / psi0).ln()) / p).exp())
        }
        Branch::Negative => {
            let p = p.value();
            let rule = endpoint_rule(n, p)?;
            // ∫_0^η r^{p-1}(ψ - ψ0) = η^{p+1} ∫_0^1 u^p (ψ(ηu) - ψ0)/(ηu) du
            let j = eta.powf(p + 1.0) * rule.integrate(1.0, |u| (prof.eval(eta * u) - psi0) / (eta * u));
            let floor = psi0 * eta.powf(p) / p.abs();
            let (acc, t) = march(
                &lay,
                spec,
                j,
                floor,
                |r, _, _| r.powf(p - 1.0) * (prof.eval(r) - psi0),
                |_, _| (),
                |t, acc| {
                    let total = acc + psi0 * t.powf(p) / p;
                    tail_slope(prof, t)
                        .is_some_and(|(pt, s)| power_tail(pt, s, t, p - 1.0, 1.0) <= spec.truncation_tol * total.abs())
                },
            )?;
            let total = acc + psi0 * t.powf(p) / p;
            let base = p * total / psi0;
            if !(base > 0.0) {
                return Err(Error::Quadrature {
                    achieved: base,
                    target: spec.legendre_tol,
                });
            }
            Ok(base.powf(1.0 / p))
        }
        Branch::Zero => {
            let rule = endpoint_rule(n, 0.0)?;
            let j = eta * rule.integrate(1.0, |u| (prof.eval(eta * u) - psi0) / (eta * u));
            let (acc, t) = march(
                &lay,
                spec,
                j,
                psi0,
                |r, _, _| (prof.eval(r) - psi0) / r,
                |_, _| (),
                // the criterion is absolute in log ρ, i.e. relative in ρ
                |t, _| {
                    tail_slope(prof, t).is_some_and(|(pt, s)| pt == 0.0 || pt / (t * s) <= spec.truncation_tol * psi0)
                },
            )?;
            Ok((t.ln() + acc / psi0).exp())
        }
    }
}

/// `ρ(θ)` from `(1/ψ(0) ∫ (-ψ') r^p dr)^{1/p}`, with `-ψ'` from finite
/// differences and the jump of `ψ` at a finite support end added as a point mass.
pub(crate) fn radial_unified(prof: &RayProfile, p: PIndex, spec: &QuadratureSpec) -> Result<f64> {
    let psi0 = prof.origin_value;
    let tau = prof.support_end;
    if !(tau > 0.0) {
        return Ok(0.0);
    }
    let branch = p.branch();
    if branch == Branch::Infinity {
        return Ok(tau);
    }
    if branch == Branch::Zero {
        return Err(Error::InvalidParameter(
            "the derivative form needs p != 0; use the four-branch gauge".into(),
        ));
    }
    let p = p.value();
    let lay = layout(prof, spec);
    let eta = lay.eta;
    let scale = if p > 0.0 { peak_scale(prof, p, eta, tau) } else { 1.0 };
    let first_knot = lay.knots.first().copied().unwrap_or(2.0 * eta);
    let h0 = 1e-3 * eta;
    let rule = endpoint_rule(spec.jacobi_nodes, p)?;
    let pref = eta * (p * (eta / scale).ln()).exp();
    let j = pref * rule.integrate(1.0, |u| prof.neg_derivative(eta * u, h0, 0.0, first_knot));
    let h = std::cell::Cell::new(h0);
    let (acc, _) = march(
        &lay,
        spec,
        j,
        psi0 * pref,
        |r, lo, hi| (p * (r / scale).ln()).exp() * prof.neg_derivative(r, h.get(), lo, hi),
        |lo, hi| h.set(1e-3 * (hi - lo).min(eta)),
        |t, acc| {
            tail_slope(prof, t).is_some_and(|(pt, s)| {
                let point = if pt == 0.0 {
                    0.0
                } else {
                    (pt.ln() + p * (t / scale).ln()).exp()
                };
                point + p.abs() * power_tail(pt, s, t, p - 1.0, scale) / scale <= spec.truncation_tol * acc.abs()
            })
        },
    )?;
    let mut total = acc;
    if tau.is_finite() {
        // left limit at the support end
        let jump = prof.eval(tau * (1.0 - 1e-13));
        if jump > 0.0 {
            total += jump * (p * (tau / scale).ln()).exp();
        }
    }
    let u = total / psi0;
    if !(u > 0.0) {
        return Err(Error::Quadrature {
            achieved: u,
            target: spec.legendre_tol,
        });
    }
    Ok(scale * u.powf(1.0 / p))
}

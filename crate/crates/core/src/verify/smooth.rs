//! Smooth log-concave functions on the closed quadrant `r, s >= 0`, and the
//! two checks built on them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::report::{ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::quadrature::integrate_power_weight;

/// `f` and its partials at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub f: f64,
    pub r: f64,
    pub s: f64,
    pub rr: f64,
    pub ss: f64,
    pub rs: f64,
}

type PlainFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    /// `exp(-(a r² + b s² + c r s + d r + e s))`.
    QuadExp {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        e: f64,
    },
    /// `Φ((1-r)/w) Φ((1-s)/w) / Φ(1/w)²` with `Φ` the normal distribution function.
    SmoothedBox {
        w: f64,
    },
    Sampled {
        f: PlainFn,
        h: f64,
    },
}

#[derive(Clone)]
pub struct Smooth2DFn {
    label: String,
    kind: Kind,
    factor: f64,
    scale: f64,
}

impl std::fmt::Debug for Smooth2DFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Smooth2DFn")
            .field("label", &self.label)
            .field("factor", &self.factor)
            .finish()
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn first(g: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    if x >= 2.0 * h {
        (g(x + h) - g(x - h)) / (2.0 * h)
    } else {
        (-3.0 * g(x) + 4.0 * g(x + h) - g(x + 2.0 * h)) / (2.0 * h)
    }
}

fn second(g: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    if x >= 2.0 * h {
        (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h)
    } else {
        (2.0 * g(x) - 5.0 * g(x + h) + 4.0 * g(x + 2.0 * h) - g(x + 3.0 * h)) / (h * h)
    }
}

impl Smooth2DFn {
    pub fn quadratic_exponential(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && 4.0 * a * b > c * c && d >= 0.0 && e >= 0.0) {
            return Err(Error::InvalidFunction(format!(
                "quadratic exponent ({a}, {b}, {c}, {d}, {e}) must be positive definite with non-negative linear part"
            )));
        }
        let scale = 1.0 / a.min(b).sqrt();
        Ok(Self {
            label: format!("exp(-({a} r^2 + {b} s^2 + {c} rs + {d} r + {e} s))"),
            kind: Kind::QuadExp { a, b, c, d, e },
            factor: 1.0,
            scale,
        })
    }

    /// `e^{-(r² + s²)}`.
    pub fn gaussian() -> Self {
        Self::quadratic_exponential(1.0, 1.0, 0.0, 0.0, 0.0).expect("valid")
    }

    /// Product of two smoothed unit steps of width `w`.
    pub fn smoothed_box(w: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidFunction("smoothing width must be positive".into()));
        }
        Ok(Self {
            label: format!("smoothed box, width {w}"),
            kind: Kind::SmoothedBox { w },
            factor: 1.0,
            scale: 1.0 + w,
        })
    }

    /// Partials by finite differences with step `1e-5 scale` (one-sided at the
    /// edges of the quadrant). The caller vouches for the class conditions.
    pub fn from_fn<F>(label: &str, f: F, scale: f64) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        Ok(Self {
            label: label.to_string(),
            kind: Kind::Sampled {
                f: Arc::new(f),
                h: 1e-5 * scale,
            },
            factor: 1.0,
            scale,
        })
    }

    /// `λ f`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter("scale factor must be positive".into()));
        }
        let mut out = self.clone();
        out.factor *= lambda;
        out.label = format!("{lambda} * {}", self.label);
        Ok(out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Length over which `f` changes appreciably.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, r: f64, s: f64) -> f64 {
        self.partials(r, s).f
    }

    pub fn partials(&self, r: f64, s: f64) -> Partials {
        let p = match &self.kind {
            Kind::QuadExp { a, b, c, d, e } => {
                let f = (-(a * r * r + b * s * s + c * r * s + d * r + e * s)).exp();
                let qr = 2.0 * a * r + c * s + d;
                let qs = 2.0 * b * s + c * r + e;
                Partials {
                    f,
                    r: -qr * f,
                    s: -qs * f,
                    rr: (qr * qr - 2.0 * a) * f,
                    ss: (qs * qs - 2.0 * b) * f,
                    rs: (qr * qs - c) * f,
                }
            }
            Kind::SmoothedBox { w } => {
                let norm = normal_cdf(1.0 / w);
                let one = |t: f64| {
                    let z = (1.0 - t) / w;
                    let phi = normal_pdf(z);
                    (normal_cdf(z) / norm, -phi / (w * norm), -z * phi / (w * w * norm))
                };
                let (fr, dr, ddr) = one(r);
                let (fs, ds, dds) = one(s);
                Partials {
                    f: fr * fs,
                    r: dr * fs,
                    s: fr * ds,
                    rr: ddr * fs,
                    ss: fr * dds,
                    rs: dr * ds,
                }
            }
            Kind::Sampled { f, h } => {
                let h = *h;
                let along_r = |s0: f64| move |x: f64| f(x, s0);
                let dr_at = |s0: f64| first(&along_r(s0), r, h);
                Partials {
                    f: f(r, s),
                    r: dr_at(s),
                    s: first(&|y| f(r, y), s, h),
                    rr: second(&along_r(s), r, h),
                    ss: second(&|y| f(r, y), s, h),
                    rs: first(&dr_at, s, h),
                }
            }
        };
        let k = self.factor;
        Partials {
            f: k * p.f,
            r: k * p.r,
            s: k * p.s,
            rr: k * p.rr,
            ss: k * p.ss,
            rs: k * p.rs,
        }
    }

    /// `Φ(a, 0) = ∫_0^∞ r^{p+1} f(r + a, 0) dr` for `a >= 0`.
    pub fn marginal(&self, p: f64, a: f64) -> Result<f64> {
        if a < 0.0 {
            return Err(Error::InvalidParameter("marginal shift must be non-negative".into()));
        }
        integrate_power_weight(|r| self.eval(r + a, 0.0), p + 1.0, 0.25 * self.scale, 1e-12)
    }
}

/// `count` seeded quadratic-exponential instances with `a, b ∈ [1/2, 2]`,
/// `|c| < 1.8 √(ab)` and `d, e ∈ [0, 1]`.
pub fn seeded_quadratic_exponentials(count: usize, seed: u64) -> Vec<Smooth2DFn> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = rng.gen_range(0.5..2.0);
            let b = rng.gen_range(0.5..2.0);
            let c = rng.gen_range(-0.9..0.9) * 2.0 * f64::sqrt(a * b);
            let d = rng.gen_range(0.0..1.0);
            let e = rng.gen_range(0.0..1.0);
            Smooth2DFn::quadratic_exponential(a, b, c, d, e).expect("valid by construction")
        })
        .collect()
}

/// The weighted integrals `(A, B, C)` of `f_rr`, `f_rs`, `f_ss` against
/// `r^{p+1}` on the edge `s = 0`.
pub fn det_integrals(f: &Smooth2DFn, p: f64) -> Result<(f64, f64, f64)> {
    let eta = 0.25 * f.scale();
    let a = integrate_power_weight(|r| f.partials(r, 0.0).rr, p + 1.0, eta, 1e-12)?;
    let b = integrate_power_weight(|r| f.partials(r, 0.0).rs, p + 1.0, eta, 1e-12)?;
    let c = integrate_power_weight(|r| f.partials(r, 0.0).ss, p + 1.0, eta, 1e-12)?;
    Ok((a, b, c))
}

/// `A C - B² <= tol max(|AC|, B², scale²)` with `scale = |A| + |B| + |C|`,
/// together with `A = -(p+1) ∫ r^p f_r(r,0) dr` within the same relative
/// tolerance.
pub fn check_det_inequality(f: &Smooth2DFn, p: f64, tol: f64) -> Result<VerificationReport> {
    if !(p > -1.0 && p != 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "determinant check needs p > -1, p != 0, got {p}"
        )));
    }
    let (a, b, c) = det_integrals(f, p)?;
    let by_parts = -(p + 1.0) * integrate_power_weight(|r| f.partials(r, 0.0).r, p, 0.25 * f.scale(), 1e-12)?;
    let det = a * c - b * b;
    let scale = a.abs() + b.abs() + c.abs();
    let denom = (a * c).abs().max(b * b).max(scale * scale);
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::Divergent(format!(
            "weighted integrals of {} are not usable: A = {a}, B = {b}, C = {c}",
            f.label()
        )));
    }
    let mut rb = ReportBuilder::new("det-inequality", format!("{}, p = {p}", f.label()), 0, tol);
    rb.probe(vec![p], a * c, b * b, det / denom);
    rb.probe(vec![p, 0.0], a, by_parts, (a - by_parts).abs() / scale);
    rb.details(json!({ "A": a, "B": b, "C": c, "det": det, "scale": scale, "A_by_parts": by_parts }));
    Ok(rb.finish())
}

/// Midpoint log-concavity `Φ((a_i + a_j)/2)² >= Φ(a_i) Φ(a_j) (1 - tol)` of
/// `a ↦ Φ(a, 0)` over all pairs of the grid.
pub fn check_prekopa_marginal(f: &Smooth2DFn, p: f64, a_grid: &[f64], tol: f64) -> Result<VerificationReport> {
    if !(p > -1.0) {
        return Err(Error::InvalidParameter("marginal needs p > -1".into()));
    }
    let phi: Vec<f64> = a_grid.iter().map(|&a| f.marginal(p, a)).collect::<Result<_>>()?;
    let mut rb = ReportBuilder::new("prekopa-marginal", format!("{}, p = {p}", f.label()), 0, tol);
    let mut ratios = Vec::new();
    for i in 0..a_grid.len() {
        for j in i + 1..a_grid.len() {
            let mid = f.marginal(p, 0.5 * (a_grid[i] + a_grid[j]))?;
            let prod = phi[i] * phi[j];
            let ratio = mid * mid / prod;
            ratios.push(ratio);
            rb.probe(vec![a_grid[i], a_grid[j]], mid * mid, prod, 1.0 - ratio);
        }
    }
    rb.details(json!({ "phi": phi, "midpoint_ratios": ratios }));
    Ok(rb.finish())
}

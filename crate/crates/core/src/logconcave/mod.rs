//! Evaluatable log-concave functions, their restrictions to rays, generalized
//! covariograms and Gaussian mollification.

mod covariograms;
mod cubature;
mod mollify;
mod ray;
mod spec;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{random_unit, ConvexBody, Covariogram, Shape};
use crate::linalg::{dot, norm};
use crate::piecewise::PolyPiece;

pub use covariograms::{generalized_covariogram, CovariogramKind, IntegrationMode};
pub use cubature::{integrate_polygon, triangle_rule};
pub use mollify::{convolve_gaussian, mollify, Mollified, MollifySpec};
pub use ray::{ray_profile, RayProfile};
pub use spec::{CovariogramSpec, FunctionSpec};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Where a function may be positive.
#[derive(Clone)]
pub enum Support {
    AllSpace,
    /// Contained in this body.
    Body(ConvexBody),
    /// The difference body of the covariogram's body.
    DifferenceBody(Arc<Covariogram>),
    /// Contained in the Euclidean ball of this radius about `o`.
    Bounded(f64),
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::AllSpace => write!(f, "AllSpace"),
            Support::Body(b) => write!(f, "Body(dim {})", b.dim()),
            Support::DifferenceBody(_) => write!(f, "DifferenceBody"),
            Support::Bounded(r) => write!(f, "Bounded({r})"),
        }
    }
}

#[allow(clippy::large_enum_variant)]
enum Kind {
    Gaussian { precision: Vec<f64> },
    ExpNorm { c: f64 },
    Indicator { body: ConvexBody },
    QuadExp { linear: Vec<f64>, quad: Vec<f64> },
    Product(Vec<LogConcaveFn>),
    Restriction { inner: LogConcaveFn, body: ConvexBody },
    Covariogram(Arc<Covariogram>),
    Custom(Evaluator),
}

/// A log-concave function `g : ℝⁿ → [0, ∞)` with `g(o) > 0`.
#[derive(Clone)]
pub struct LogConcaveFn {
    dim: usize,
    origin_value: f64,
    origin_interior: bool,
    support: Support,
    envelope: Option<(f64, f64)>,
    label: String,
    kind: Arc<Kind>,
}

impl fmt::Debug for LogConcaveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogConcaveFn")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("origin_value", &self.origin_value)
            .field("origin_interior", &self.origin_interior)
            .field("support", &self.support)
            .field("envelope", &self.envelope)
            .finish()
    }
}

fn body_has_origin_inside(body: &ConvexBody) -> bool {
    let eps = body.eps();
    match body.shape() {
        Shape::Ball { center, radius } => norm(center) < radius - eps,
        Shape::Box { min, max, .. } => min.iter().zip(max).all(|(a, b)| *a < -eps && *b > eps),
        Shape::Polytope(p) => p.halfspaces.iter().all(|h| h.offset > eps),
    }
}

fn symmetric_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidFunction(format!(
            "{what} must be a non-empty square matrix"
        )));
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    if m.iter().any(|v| !v.is_finite()) || (&m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::InvalidFunction(format!("{what} must be finite and symmetric")));
    }
    Ok(m)
}

impl LogConcaveFn {
    fn build(
        dim: usize,
        kind: Kind,
        support: Support,
        origin_interior: bool,
        envelope: Option<(f64, f64)>,
        label: String,
    ) -> Result<Self> {
        let mut g = Self {
            dim,
            origin_value: 1.0,
            origin_interior,
            support,
            envelope,
            label,
            kind: Arc::new(kind),
        };
        let v = g.eval(&vec![0.0; dim]);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidFunction(format!(
                "{}: value at the origin must be positive, got {v}",
                g.label
            )));
        }
        g.origin_value = v;
        Ok(g)
    }

    /// `exp(-xᵀ Σ⁻¹ x / 2)`.
    pub fn gaussian(covariance: &[Vec<f64>]) -> Result<Self> {
        let m = symmetric_matrix(covariance, "covariance")?;
        let dim = m.nrows();
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidFunction("covariance must be positive definite".into()))?;
        let prec = chol.inverse();
        let lmax = SymmetricEigen::new(m).eigenvalues.max();
        let lam = 1.0 / lmax;
        let precision: Vec<f64> = (0..dim * dim).map(|k| prec[(k / dim, k % dim)]).collect();
        // e^{-λ r²/2} ≤ e^{λ/2} e^{-λ r}
        Self::build(
            dim,
            Kind::Gaussian { precision },
            Support::AllSpace,
            true,
            Some(((lam / 2.0).exp(), lam)),
            "gaussian".into(),
        )
    }

    /// `exp(-|x|² / (2 variance))` in dimension `dim`.
    pub fn isotropic_gaussian(dim: usize, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::InvalidFunction("variance must be positive".into()));
        }
        let cov: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { variance } else { 0.0 }).collect())
            .collect();
        Self::gaussian(&cov)
    }

    /// `exp(-c |x|)`.
    pub fn exp_norm(dim: usize, c: f64) -> Result<Self> {
        if !(c > 0.0) || dim == 0 {
            return Err(Error::InvalidFunction("exp-norm needs c > 0 and dim >= 1".into()));
        }
        Self::build(
            dim,
            Kind::ExpNorm { c },
            Support::AllSpace,
            true,
            Some((1.0, c)),
            format!("exp-norm({c})"),
        )
    }

    /// `χ_K`; legal when `o` lies on the boundary (then `origin_interior` is false).
    pub fn indicator(body: ConvexBody) -> Result<Self> {
        if !body.contains(&vec![0.0; body.dim()]) {
            return Err(Error::InvalidFunction("indicator body must contain the origin".into()));
        }
        let interior = body_has_origin_inside(&body);
        Self::build(
            body.dim(),
            Kind::Indicator { body: body.clone() },
            Support::Body(body),
            interior,
            None,
            "indicator".into(),
        )
    }

    /// `exp(-(l · x + xᵀ Q x))` with `Q` symmetric positive semi-definite.
    pub fn quadratic_exponential(linear: Vec<f64>, quadratic: &[Vec<f64>]) -> Result<Self> {
        let m = symmetric_matrix(quadratic, "quadratic form")?;
        let dim = m.nrows();
        if linear.len() != dim {
            return Err(Error::InvalidFunction("linear term has the wrong dimension".into()));
        }
        let eig = SymmetricEigen::new(m.clone()).eigenvalues;
        let scale = eig.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
        if eig.min() < -1e-12 * scale {
            return Err(Error::InvalidFunction(
                "non-convex quadratic: Q has a negative eigenvalue".into(),
            ));
        }
        let quad: Vec<f64> = (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect();
        Self::build(
            dim,
            Kind::QuadExp { linear, quad },
            Support::AllSpace,
            true,
            None,
            "quadratic-exponential".into(),
        )
    }

    pub fn product(factors: Vec<LogConcaveFn>) -> Result<Self> {
        let dim = factors
            .first()
            .map(|f| f.dim)
            .ok_or_else(|| Error::InvalidFunction("empty product".into()))?;
        if factors.iter().any(|f| f.dim != dim) {
            return Err(Error::InvalidFunction("product factors differ in dimension".into()));
        }
        let interior = factors.iter().all(|f| f.origin_interior);
        let envelope = if factors.iter().any(|f| f.envelope.is_some()) {
            let (mut a, mut c) = (1.0, 0.0);
            for f in &factors {
                match f.envelope {
                    Some((fa, fc)) => {
                        a *= fa;
                        c += fc;
                    }
                    None => a *= f.origin_value,
                }
            }
            Some((a, c))
        } else {
            None
        };
        let support = factors
            .iter()
            .map(|f| f.support.clone())
            .find(|s| !matches!(s, Support::AllSpace))
            .unwrap_or(Support::AllSpace);
        Self::build(
            dim,
            Kind::Product(factors),
            support,
            interior,
            envelope,
            "product".into(),
        )
    }

    /// `g · χ_K`.
    pub fn restrict(inner: LogConcaveFn, body: ConvexBody) -> Result<Self> {
        if body.dim() != inner.dim {
            return Err(Error::InvalidFunction(
                "restriction body has the wrong dimension".into(),
            ));
        }
        if !body.contains(&vec![0.0; body.dim()]) {
            return Err(Error::InvalidFunction(
                "restriction body must contain the origin".into(),
            ));
        }
        let interior = inner.origin_interior && body_has_origin_inside(&body);
        let envelope = inner.envelope;
        let label = format!("{} restricted", inner.label);
        Self::build(
            inner.dim,
            Kind::Restriction {
                inner,
                body: body.clone(),
            },
            Support::Body(body),
            interior,
            envelope,
            label,
        )
    }

    /// The classical covariogram `g_K`, exact for `n <= 3` polytopes and all boxes and balls.
    pub fn covariogram(body: &ConvexBody) -> Result<Self> {
        let cov = Arc::new(Covariogram::new(body)?);
        Self::build(
            body.dim(),
            Kind::Covariogram(cov.clone()),
            Support::DifferenceBody(cov),
            true,
            None,
            "covariogram".into(),
        )
    }

    /// A user-supplied evaluator; log-concavity is the caller's responsibility
    /// (see [`LogConcaveFn::check_class`]).
    pub fn custom(
        dim: usize,
        f: Evaluator,
        support: Support,
        origin_interior: bool,
        envelope: Option<(f64, f64)>,
        label: &str,
    ) -> Result<Self> {
        Self::build(dim, Kind::Custom(f), support, origin_interior, envelope, label.into())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin_value(&self) -> f64 {
        self.origin_value
    }

    pub fn origin_interior(&self) -> bool {
        self.origin_interior
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn envelope(&self) -> Option<(f64, f64)> {
        self.envelope
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_envelope(mut self, a: f64, c: f64) -> Self {
        self.envelope = Some((a, c));
        self
    }

    /// The covariogram evaluator when this is a classical covariogram.
    pub fn as_covariogram(&self) -> Option<&Covariogram> {
        match self.kind.as_ref() {
            Kind::Covariogram(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind.as_ref() {
            Kind::Gaussian { precision } => {
                let n = self.dim;
                let mut q = 0.0;
                for i in 0..n {
                    let mut row = 0.0;
                    for j in 0..n {
                        row += precision[i * n + j] * x[j];
                    }
                    q += x[i] * row;
                }
                (-0.5 * q).exp()
            }
            Kind::ExpNorm { c } => (-c * norm(x)).exp(),
            Kind::Indicator { body } => {
                if body.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::QuadExp { linear, quad } => {
                let n = self.dim;
                let mut q = dot(linear, x);
                for i in 0..n {
                    for j in 0..n {
                        q += x[i] * quad[i * n + j] * x[j];
                    }
                }
                (-q).exp()
            }
            Kind::Product(fs) => {
                let mut v = 1.0;
                for f in fs {
                    v *= f.eval(x);
                    if v == 0.0 {
                        break;
                    }
                }
                v
            }
            Kind::Restriction { inner, body } => {
                if body.contains(x) {
                    inner.eval(x)
                } else {
                    0.0
                }
            }
            Kind::Covariogram(c) => c.eval(x),
            Kind::Custom(f) => f(x),
        }
    }

    /// `τ_θ = sup{r : g(rθ) > 0}` for a unit `θ`; `0` when the ray leaves the
    /// support immediately.
    pub fn ray_end(&self, theta: &[f64]) -> f64 {
        let body_end = |b: &ConvexBody| 1.0 / b.minkowski_functional(theta);
        match self.kind.as_ref() {
            Kind::Gaussian { .. } | Kind::ExpNorm { .. } | Kind::QuadExp { .. } => f64::INFINITY,
            Kind::Indicator { body } => body_end(body),
            Kind::Restriction { inner, body } => inner.ray_end(theta).min(body_end(body)),
            Kind::Product(fs) => fs.iter().map(|f| f.ray_end(theta)).fold(f64::INFINITY, f64::min),
            Kind::Covariogram(c) => c.support_end(theta),
            Kind::Custom(_) => match &self.support {
                Support::AllSpace => f64::INFINITY,
                Support::Body(b) => body_end(b),
                Support::DifferenceBody(c) => c.support_end(theta),
                Support::Bounded(r) => self.bisect_end(theta, *r),
            },
        }
    }

    /// Positivity on a ray is an interval `[0, τ)` by log-concavity.
    fn bisect_end(&self, theta: &[f64], radius: f64) -> f64 {
        let at = |r: f64| {
            let y: Vec<f64> = theta.iter().map(|t| t * r).collect();
            self.eval(&y)
        };
        if at(radius) > 0.0 {
            return radius;
        }
        let (mut lo, mut hi) = (0.0, radius);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Radii where `r ↦ g(rθ)` may have kinks.
    pub fn ray_breakpoints(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = match self.kind.as_ref() {
            Kind::Covariogram(c) => c.ray_breakpoints(theta),
            Kind::Product(fs) => fs.iter().flat_map(|f| f.ray_breakpoints(theta)).collect(),
            Kind::Restriction { inner, .. } => inner.ray_breakpoints(theta),
            Kind::Custom(_) => match &self.support {
                Support::DifferenceBody(c) => c.ray_breakpoints(theta),
                _ => Vec::new(),
            },
            _ => Vec::new(),
        };
        let end = self.ray_end(theta);
        if end.is_finite() && end > 0.0 {
            out.push(end);
        }
        out.retain(|r| r.is_finite() && *r > 0.0 && *r <= end);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Exact polynomial pieces of the ray profile, when known.
    pub fn ray_pieces(&self, theta: &[f64]) -> Option<Result<Vec<PolyPiece>>> {
        match self.kind.as_ref() {
            Kind::Covariogram(c) => c.ray_pieces(theta),
            Kind::Indicator { body } => {
                let end = 1.0 / body.minkowski_functional(theta);
                if end > 0.0 && end.is_finite() {
                    Some(Ok(vec![PolyPiece {
                        a: 0.0,
                        b: end,
                        coeffs: vec![1.0],
                    }]))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Bound `g(x) <= a e^{-c|x|}` from chord slopes of `log g` along sampled
    /// rays: by concavity, for `r >= r0` the chord through `r0` dominates.
    /// The bound is then checked on `checks` random points and `a` is widened
    /// on failure. Returns `None` when `g` does not decay at the probe scale.
    pub fn fit_envelope(&self, scale: f64, checks: usize, seed: u64) -> Option<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = self.origin_value;
        let mut c = f64::INFINITY;
        for _ in 0..64 {
            let th = random_unit(self.dim, &mut rng);
            let y: Vec<f64> = th.iter().map(|t| t * scale).collect();
            let v = self.eval(&y);
            let slope = if v > 0.0 { (g0 / v).ln() / scale } else { f64::INFINITY };
            c = c.min(slope);
        }
        if !(c > 1e-12) {
            return None;
        }
        if c.is_infinite() {
            // bounded support inside the probe radius
            c = 1.0 / scale;
        }
        let mut a = g0 * (c * scale).exp();
        for _ in 0..checks {
            let th = random_unit(self.dim, &mut rng);
            let r = rng.gen_range(0.0..8.0 * scale);
            let y: Vec<f64> = th.iter().map(|t| t * r).collect();
            let v = self.eval(&y);
            let bound = a * (-c * r).exp();
            if v > bound {
                a *= v / bound * 1.01;
            }
        }
        Some((a, c))
    }

    /// Samples the class conditions on `count` random points of the ball of
    /// radius `radius` and as many collinear triples.
    pub fn check_class(&self, count: usize, radius: f64, seed: u64) -> ClassCheck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g0 = self.origin_value;
        let point = |rng: &mut ChaCha8Rng| {
            let th = random_unit(self.dim, rng);
            let r = radius * rng.gen::<f64>().powf(1.0 / self.dim as f64);
            th.into_iter().map(|t| t * r).collect::<Vec<f64>>()
        };
        let mut max_excess = 0.0f64;
        let mut log_concavity = 0.0f64;
        let mut envelope = 0.0f64;
        for _ in 0..count {
            let x = point(&mut rng);
            let y = point(&mut rng);
            let lam: f64 = rng.gen();
            let (fx, fy) = (self.eval(&x), self.eval(&y));
            max_excess = max_excess.max((fx - g0) / g0);
            if let Some((a, c)) = self.envelope {
                envelope = envelope.max((fx - a * (-c * norm(&x)).exp()) / g0);
            }
            if fx > 0.0 && fy > 0.0 {
                let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (1.0 - lam) * a + lam * b).collect();
                let fz = self.eval(&z);
                let rhs = fx.powf(1.0 - lam) * fy.powf(lam);
                log_concavity = log_concavity.max((rhs - fz) / rhs);
            }
        }
        ClassCheck {
            max_excess,
            log_concavity,
            envelope,
        }
    }
}

/// Worst relative violations found by [`LogConcaveFn::check_class`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ClassCheck {
    /// `max (g(x) - g(o)) / g(o)`.
    pub max_excess: f64,
    /// `max (g(x)^{1-λ} g(y)^λ - g(z)) / (g(x)^{1-λ} g(y)^λ)`.
    pub log_concavity: f64,
    /// `max (g(x) - a e^{-c|x|}) / g(o)`.
    pub envelope: f64,
}

impl ClassCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_excess <= 1e-12 && self.log_concavity <= tol && self.envelope <= 1e-12
    }
}

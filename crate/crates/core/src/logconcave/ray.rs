use std::sync::Arc;

use super::LogConcaveFn;
use crate::error::Result;
use crate::piecewise::PolyPiece;

#[derive(Clone)]
#[allow(clippy::large_enum_variant)]
enum Source {
    Function(LogConcaveFn),
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>, Option<Vec<PolyPiece>>),
}

/// `ψ(r) = g(rθ)` for `r >= 0`, with its support end `τ`.
#[derive(Clone)]
pub struct RayProfile {
    pub theta: Vec<f64>,
    pub origin_value: f64,
    pub support_end: f64,
    /// Kinks of `ψ` in `(0, τ]`.
    pub breakpoints: Vec<f64>,
    /// `ψ(r) <= a e^{-c r}` when known.
    pub envelope: Option<(f64, f64)>,
    source: Source,
}

impl std::fmt::Debug for RayProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RayProfile")
            .field("theta", &self.theta)
            .field("origin_value", &self.origin_value)
            .field("support_end", &self.support_end)
            .finish()
    }
}

pub fn ray_profile(g: &LogConcaveFn, theta: &[f64]) -> RayProfile {
    let support_end = g.ray_end(theta);
    RayProfile {
        theta: theta.to_vec(),
        origin_value: g.origin_value(),
        support_end,
        breakpoints: g.ray_breakpoints(theta),
        envelope: g.envelope(),
        source: Source::Function(g.clone()),
    }
}

impl RayProfile {
    /// A profile given directly as a function of `r`.
    pub fn from_fn<F>(psi: F, support_end: f64, breakpoints: Vec<f64>, envelope: Option<(f64, f64)>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let origin_value = psi(0.0);
        Self {
            theta: vec![1.0],
            origin_value,
            support_end,
            breakpoints,
            envelope,
            source: Source::Closure(Arc::new(psi), None),
        }
    }

    /// `h · χ_{[0, a]}`.
    pub fn step(height: f64, a: f64) -> Self {
        let mut p = Self::from_fn(move |r| if r <= a { height } else { 0.0 }, a, vec![a], None);
        if let Source::Closure(_, pieces) = &mut p.source {
            *pieces = Some(vec![PolyPiece {
                a: 0.0,
                b: a,
                coeffs: vec![height],
            }]);
        }
        p
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.source {
            Source::Function(g) => {
                let y: Vec<f64> = self.theta.iter().map(|t| t * r).collect();
                g.eval(&y)
            }
            Source::Closure(f, _) => f(r),
        }
    }

    /// Exact polynomial pieces on `[0, τ]`, when the source provides them.
    pub fn pieces(&self) -> Option<Result<Vec<PolyPiece>>> {
        match &self.source {
            Source::Function(g) => g.ray_pieces(&self.theta),
            Source::Closure(_, p) => p.clone().map(Ok),
        }
    }

    /// A copy that only exposes point evaluations.
    pub fn without_pieces(&self) -> Self {
        let mut p = self.clone();
        if let Source::Closure(_, pieces) = &mut p.source {
            *pieces = None;
        } else {
            let me = self.clone();
            p.source = Source::Closure(Arc::new(move |r| me.eval(r)), None);
        }
        p
    }

    /// `-ψ'(r)` by fourth-order differences with step `h`, using a one-sided
    /// stencil where the central one would leave the smooth piece `[lo, hi]`.
    pub fn neg_derivative(&self, r: f64, h: f64, lo: f64, hi: f64) -> f64 {
        let f = |t: f64| self.eval(t);
        if r - 2.0 * h >= lo && r + 2.0 * h <= hi {
            return -(-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h);
        }
        let d = if r - lo <= hi - r { h } else { -h };
        -(-25.0 * f(r) + 48.0 * f(r + d) - 36.0 * f(r + 2.0 * d) + 16.0 * f(r + 3.0 * d) - 3.0 * f(r + 4.0 * d))
            / (12.0 * d)
    }
}

//! Ball bodies `K_p(g)`: their gauge for `p ∈ (-1, ∞]`, the derivative form,
//! the `I_p` functional of a ray profile and batched radial sampling.
//!
//! For `x = |x| θ` every branch reduces to a one-dimensional integral of
//! `ψ(r) = g(rθ)`, so `‖x‖ = |x| / ρ(θ)` with
//!
//! * `p > 0`: `ρ^p = (p/ψ(0)) ∫_0^∞ ψ(r) r^{p-1} dr`,
//! * `-1 < p < 0`: `ρ^p = (p/ψ(0)) ∫_0^∞ r^{p-1} (ψ(r) - ψ(0)) dr`,
//! * `p = 0`: `log ρ = (1/ψ(0)) ∫_0^∞ (-ψ'(r)) log r dr`,
//! * `p = ∞`: `ρ` is the radial function of `supp g`.

mod engine;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DirectionGrid;
use crate::linalg::norm;
use crate::logconcave::{ray_profile, LogConcaveFn, RayProfile};

/// Values with `|p|` below this use the `p = 0` formula.
pub const ZERO_BAND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Negative,
    Zero,
    Positive,
    Infinity,
}

/// The exponent `p ∈ (-1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PIndex(f64);

impl PIndex {
    pub const INFINITY: PIndex = PIndex(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p <= -1.0 || p == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!("p must lie in (-1, ∞], got {p}")));
        }
        Ok(Self(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn branch(self) -> Branch {
        let p = self.0;
        if p == f64::INFINITY {
            Branch::Infinity
        } else if p.abs() < ZERO_BAND {
            Branch::Zero
        } else if p < 0.0 {
            Branch::Negative
        } else {
            Branch::Positive
        }
    }
}

impl TryFrom<f64> for PIndex {
    type Error = String;

    fn try_from(p: f64) -> std::result::Result<Self, String> {
        PIndex::new(p).map_err(|e| e.to_string())
    }
}

impl From<PIndex> for f64 {
    fn from(p: PIndex) -> f64 {
        p.0
    }
}

impl std::fmt::Display for PIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum AutoTag {
    Auto,
}

/// Split point between the endpoint rule and adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "EtaRepr", into = "EtaRepr")]
pub enum Eta {
    /// `min(τ/2, first kink, radius where ψ drops below 0.99 ψ(0))`.
    Auto,
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EtaRepr {
    Tag(AutoTag),
    Value(f64),
}

impl From<EtaRepr> for Eta {
    fn from(r: EtaRepr) -> Self {
        match r {
            EtaRepr::Tag(_) => Eta::Auto,
            EtaRepr::Value(v) => Eta::Fixed(v),
        }
    }
}

impl From<Eta> for EtaRepr {
    fn from(e: Eta) -> Self {
        match e {
            Eta::Auto => EtaRepr::Tag(AutoTag::Auto),
            Eta::Fixed(v) => EtaRepr::Value(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub eta: Eta,
    /// Gauss–Jacobi nodes on `[0, η]`.
    pub jacobi_nodes: usize,
    /// Relative tolerance of the adaptive rule past `η`.
    pub legendre_tol: f64,
    /// Relative size allowed for the discarded tail.
    pub truncation_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            eta: Eta::Auto,
            jacobi_nodes: 48,
            legendre_tol: 1e-9,
            truncation_tol: 1e-10,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if let Eta::Fixed(v) = self.eta {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("eta must be positive, got {v}")));
            }
        }
        if self.jacobi_nodes < 2 || self.jacobi_nodes > 400 {
            return Err(Error::InvalidParameter(format!(
                "jacobi_nodes must be in [2, 400], got {}",
                self.jacobi_nodes
            )));
        }
        for (name, v) in [
            ("legendre_tol", self.legendre_tol),
            ("truncation_tol", self.truncation_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let q: Self = serde_json::from_str(text)?;
        q.validate()?;
        Ok(q)
    }
}

/// Splits `x` into `(|x|, x/|x|)`.
fn polar(x: &[f64]) -> Option<(f64, Vec<f64>)> {
    let r = norm(x);
    if r == 0.0 {
        return None;
    }
    Some((r, x.iter().map(|v| v / r).collect()))
}

fn gauge_from_radial(r: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        f64::INFINITY
    } else {
        r / rho
    }
}

fn check_dim(g: &LogConcaveFn, x: &[f64]) -> Result<()> {
    if x.len() != g.dim() {
        return Err(Error::InvalidParameter(format!(
            "point has dimension {}, function has dimension {}",
            x.len(),
            g.dim()
        )));
    }
    Ok(())
}

/// `‖x‖_{K_p(g)}`, possibly `+∞` when `g` vanishes on the ray through `x`.
pub fn ball_gauge(g: &LogConcaveFn, p: PIndex, x: &[f64], q: &QuadratureSpec) -> Result<f64> {
    check_dim(g, x)?;
    let Some((r, theta)) = polar(x) else { return Ok(0.0) };
    let rho = engine::radial_value(&ray_profile(g, &theta), p, q)?;
    Ok(gauge_from_radial(r, rho))
}

/// `‖x‖_{K_p(g)}` for several `p`, sharing the ray setup.
pub fn ball_gauges(g: &LogConcaveFn, ps: &[PIndex], x: &[f64], q: &QuadratureSpec) -> Result<Vec<f64>> {
    check_dim(g, x)?;
    let Some((r, theta)) = polar(x) else {
        return Ok(vec![0.0; ps.len()]);
    };
    let prof = ray_profile(g, &theta);
    let pieces = match prof.pieces() {
        Some(Ok(v)) => Some(v),
        _ => None,
    };
    ps.iter()
        .map(|&p| {
            Ok(gauge_from_radial(
                r,
                engine::radial_value_with(&prof, p, q, pieces.as_deref())?,
            ))
        })
        .collect()
}

/// `‖x‖_{K_p(g)} = (1/g(o) ∫_0^∞ (-∂_r g(rx)) r^p dr)^{-1/p}`, `p != 0` finite.
pub fn ball_gauge_unified(g: &LogConcaveFn, p: PIndex, x: &[f64], q: &QuadratureSpec) -> Result<f64> {
    check_dim(g, x)?;
    if p.branch() == Branch::Infinity {
        return Err(Error::InvalidParameter("the derivative form needs finite p".into()));
    }
    let Some((r, theta)) = polar(x) else { return Ok(0.0) };
    let rho = engine::radial_unified(&ray_profile(g, &theta), p, q)?;
    Ok(gauge_from_radial(r, rho))
}

/// Gauge evaluated by the quadrature path only, ignoring exact pieces.
pub fn ball_gauge_quadrature(g: &LogConcaveFn, p: PIndex, x: &[f64], q: &QuadratureSpec) -> Result<f64> {
    check_dim(g, x)?;
    let Some((r, theta)) = polar(x) else { return Ok(0.0) };
    let prof = ray_profile(g, &theta);
    if !(prof.support_end > 0.0) {
        return Ok(f64::INFINITY);
    }
    let rho = engine::general(&prof, p, q)?;
    Ok(gauge_from_radial(r, rho))
}

/// `I_p(ψ)`: `(p/ψ(0) ∫ ψ r^{p-1})^{1/p}` for `p > 0` and
/// `(p/ψ(0) ∫ r^{p-1}(ψ - ψ(0)))^{1/p}` for `-1 < p < 0`. Assumes `ψ(0) = max ψ`.
pub fn i_p(psi: &RayProfile, p: f64) -> Result<f64> {
    let p = PIndex::new(p)?;
    if p.branch() == Branch::Infinity {
        return Err(Error::InvalidParameter("I_p needs finite p".into()));
    }
    engine::radial_value(psi, p, &QuadratureSpec::default())
}

/// `log ρ(θ)` at `p = 0` two ways: the direct log-weight integral and
/// Richardson extrapolation of the finite branches at `±h, ±2h`.
pub fn zero_branch_cross_check(psi: &RayProfile, h: f64, q: &QuadratureSpec) -> Result<(f64, f64)> {
    let direct = engine::radial_value(psi, PIndex::new(0.0)?, q)?.ln();
    let at = |p: f64| -> Result<f64> {
        // bypass the zero band: the finite formulas themselves
        let idx = PIndex(p);
        let v = match psi.pieces() {
            Some(Ok(ps)) => engine::radial_from_pieces(&ps, psi.origin_value, idx),
            _ => None,
        };
        Ok(match v {
            Some(v) => v,
            None => engine::general(psi, idx, q)?,
        }
        .ln())
    };
    let sym = |h: f64| -> Result<f64> { Ok(0.5 * (at(h)? + at(-h)?)) };
    let richardson = (4.0 * sym(h)? - sym(2.0 * h)?) / 3.0;
    Ok((direct, richardson))
}

type GaugeFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// A star-body gauge, optionally with radial samples on a grid.
#[derive(Clone)]
pub struct StarGauge {
    dim: usize,
    evaluator: GaugeFn,
    samples: Option<(DirectionGrid, Vec<f64>)>,
}

impl std::fmt::Debug for StarGauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StarGauge")
            .field("dim", &self.dim)
            .field("samples", &self.samples.as_ref().map(|s| s.1.len()))
            .finish()
    }
}

impl StarGauge {
    pub fn new(dim: usize, evaluator: GaugeFn) -> Self {
        Self {
            dim,
            evaluator,
            samples: None,
        }
    }

    /// The gauge of `K_p(g)`.
    pub fn of_ball_body(g: &LogConcaveFn, p: PIndex, q: QuadratureSpec) -> Self {
        let g = g.clone();
        Self::new(g.dim(), Arc::new(move |x: &[f64]| ball_gauge(&g, p, x, &q)))
    }

    pub fn with_samples(mut self, grid: DirectionGrid, radii: Vec<f64>) -> Result<Self> {
        if grid.len() != radii.len() || grid.dim != self.dim {
            return Err(Error::InvalidParameter("grid and radii do not match".into()));
        }
        self.samples = Some((grid, radii));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        (self.evaluator)(x)
    }

    pub fn grid(&self) -> Option<&DirectionGrid> {
        self.samples.as_ref().map(|s| &s.0)
    }

    /// `ρ(θ_i) = ‖θ_i‖⁻¹` on the grid.
    pub fn radii(&self) -> Option<&[f64]> {
        self.samples.as_ref().map(|s| s.1.as_slice())
    }

    pub fn min_radius(&self) -> Option<f64> {
        self.radii().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
    }

    pub fn max_radius(&self) -> Option<f64> {
        self.radii()
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Runs `f` over the grid in parallel, keeping grid order; the error of the
/// lowest failing index is reported.
pub(crate) fn over_grid<T, F>(grid: &DirectionGrid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &[f64]) -> Result<T> + Sync + Send,
{
    let out: Vec<Result<T>> = grid.directions.par_iter().enumerate().map(|(i, d)| f(i, d)).collect();
    out.into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::Direction {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// `ρ(θ)` on the grid for several exponents at once, sharing the per-ray
/// setup; `out[i][j]` is the radius in direction `i` for `ps[j]`.
pub fn radial_values(
    g: &LogConcaveFn,
    ps: &[PIndex],
    grid: &DirectionGrid,
    q: &QuadratureSpec,
) -> Result<Vec<Vec<f64>>> {
    if grid.dim != g.dim() {
        return Err(Error::InvalidParameter(format!(
            "grid dimension {} does not match function dimension {}",
            grid.dim,
            g.dim()
        )));
    }
    q.validate()?;
    over_grid(grid, |_, theta| {
        let prof = ray_profile(g, theta);
        let pieces = match prof.pieces() {
            Some(Ok(v)) => Some(v),
            _ => None,
        };
        ps.iter()
            .map(|&p| engine::radial_value_with(&prof, p, q, pieces.as_deref()))
            .collect()
    })
}

/// The sampled gauge of `K_p(g)` on `grid`.
pub fn radial_samples(g: &LogConcaveFn, p: PIndex, grid: &DirectionGrid, q: &QuadratureSpec) -> Result<StarGauge> {
    let radii: Vec<f64> = radial_values(g, &[p], grid, q)?.into_iter().map(|v| v[0]).collect();
    if let Some(index) = radii.iter().position(|r| r.is_nan()) {
        return Err(Error::NonFiniteGauge {
            index,
            direction: grid.directions[index].clone(),
        });
    }
    StarGauge::of_ball_body(g, p, *q).with_samples(grid.clone(), radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, GridScheme};
    use crate::quadrature::ln_gamma;
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn gaussian_radius(p: f64) -> f64 {
        // ∫_0^∞ e^{-r²/2} r^{p-1} dr = 2^{p/2-1} Γ(p/2)
        ((p.ln() + (p / 2.0 - 1.0) * 2f64.ln() + ln_gamma(p / 2.0)) / p).exp()
    }

    #[test]
    fn branches() {
        assert_eq!(PIndex::new(-0.5).unwrap().branch(), Branch::Negative);
        assert_eq!(PIndex::new(5e-4).unwrap().branch(), Branch::Zero);
        assert_eq!(PIndex::new(2.0).unwrap().branch(), Branch::Positive);
        assert_eq!(PIndex::INFINITY.branch(), Branch::Infinity);
        assert!(PIndex::new(-1.0).is_err());
        assert!(PIndex::new(f64::NAN).is_err());
    }

    #[test]
    fn quadrature_spec_json() {
        let a = QuadratureSpec::from_json(
            r#"{"eta": "auto", "jacobi_nodes": 48, "legendre_tol": 1e-9, "truncation_tol": 1e-10}"#,
        )
        .unwrap();
        assert_eq!(a, QuadratureSpec::default());
        let b = QuadratureSpec::from_json(r#"{"eta": 0.25}"#).unwrap();
        assert_eq!(b.eta, Eta::Fixed(0.25));
        assert!(QuadratureSpec::from_json(r#"{"eta": "sometimes"}"#).is_err());
        assert!(QuadratureSpec::from_json(r#"{"jacobi_nodes": 1}"#).is_err());
        let text = serde_json::to_string(&QuadratureSpec::default()).unwrap();
        assert!(text.contains(r#""eta":"auto""#), "{text}");
    }

    #[test]
    fn gaussian_closed_form() {
        let g = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
        for p in [0.5, 1.0, 2.0, 5.0, 30.0] {
            let rho = gaussian_radius(p);
            let x = [0.6, -0.8];
            let v = ball_gauge(&g, PIndex::new(p).unwrap(), &x, &q()).unwrap();
            assert_relative_eq!(v, 1.0 / rho, max_relative = 1e-9);
        }
        let v = ball_gauge(&g, PIndex::new(2.0).unwrap(), &[1.0, 0.0], &q()).unwrap();
        assert_relative_eq!(v, 1.0 / 2f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn gaussian_large_p_radius_grows() {
        let g = LogConcaveFn::isotropic_gaussian(1, 1.0).unwrap();
        let v = ball_gauge(&g, PIndex::new(200.0).unwrap(), &[1.0], &q()).unwrap();
        assert_relative_eq!(1.0 / v, gaussian_radius(200.0), max_relative = 1e-8);
        assert!(1.0 / v > 8.0);
        let e = LogConcaveFn::exp_norm(1, 1.0).unwrap();
        // ρ = Γ(p+1)^{1/p} for ψ = e^{-r}
        let v = ball_gauge(&e, PIndex::new(200.0).unwrap(), &[1.0], &q()).unwrap();
        assert_relative_eq!(1.0 / v, (ln_gamma(201.0) / 200.0).exp(), max_relative = 1e-8);
    }

    #[test]
    fn segment_covariogram_closed_form() {
        let seg = ConvexBody::from_vertices(&[vec![0.0], vec![1.0]]).unwrap();
        let g = LogConcaveFn::covariogram(&seg).unwrap();
        for (p, rho) in [(-0.5, 0.25), (1.0, 0.5), (0.0, (-1.0f64).exp()), (2.0, 3f64.powf(-0.5))] {
            let v = ball_gauge(&g, PIndex::new(p).unwrap(), &[1.0], &q()).unwrap();
            assert_relative_eq!(v, 1.0 / rho, max_relative = 1e-12);
            let w = ball_gauge_quadrature(&g, PIndex::new(p).unwrap(), &[-2.0], &q()).unwrap();
            assert_relative_eq!(w, 2.0 / rho, max_relative = 1e-9);
        }
    }

    #[test]
    fn indicator_is_a_fixed_point() {
        let sq = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let g = LogConcaveFn::indicator(sq.clone()).unwrap();
        for p in [-0.9, -0.3, 0.0, 0.7, 3.0] {
            let p = PIndex::new(p).unwrap();
            for x in [[1.0, 0.0], [0.3, 0.7], [-2.0, 0.5]] {
                let exact = sq.minkowski_functional(&x);
                assert_relative_eq!(ball_gauge(&g, p, &x, &q()).unwrap(), exact, max_relative = 1e-12);
                assert_relative_eq!(
                    ball_gauge_quadrature(&g, p, &x, &q()).unwrap(),
                    exact,
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn off_support_direction_is_infinite() {
        let half = ConvexBody::axis_box(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let g = LogConcaveFn::indicator(half).unwrap();
        assert!(!g.origin_interior());
        for p in [-0.5, 0.0, 1.0, f64::INFINITY] {
            let v = ball_gauge(&g, PIndex::new(p).unwrap(), &[-1.0, 0.0], &q()).unwrap();
            assert!(v.is_infinite());
        }
        assert_relative_eq!(
            ball_gauge(&g, PIndex::new(1.0).unwrap(), &[0.5, 0.0], &q()).unwrap(),
            0.5
        );
    }

    #[test]
    fn square_covariogram_diagonal() {
        let sq = ConvexBody::unit_cube(2);
        let g = LogConcaveFn::covariogram(&sq).unwrap();
        // ψ(r) = (1 - r/√2)² on the diagonal: ρ = (∫_0^√2 (1 - r/√2)² dr)^{1} = √2/3
        let v = ball_gauge(&g, PIndex::new(1.0).unwrap(), &[1.0, 1.0], &q()).unwrap();
        assert_relative_eq!(v, 3.0, max_relative = 1e-12);
    }

    #[test]
    fn unified_form_agrees() {
        let seg = ConvexBody::from_vertices(&[vec![0.0], vec![1.0]]).unwrap();
        let g = LogConcaveFn::covariogram(&seg).unwrap();
        let v = ball_gauge_unified(&g, PIndex::new(1.0).unwrap(), &[1.0], &q()).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-8);
        let gauss = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
        let v = ball_gauge_unified(&gauss, PIndex::new(2.0).unwrap(), &[1.0, 0.0], &q()).unwrap();
        assert_relative_eq!(v, 1.0 / 2f64.sqrt(), max_relative = 1e-8);
        let sq = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let ind = LogConcaveFn::indicator(sq).unwrap();
        let v = ball_gauge_unified(&ind, PIndex::new(-0.5).unwrap(), &[0.3, 0.6], &q()).unwrap();
        assert_relative_eq!(v, 0.6, max_relative = 1e-9);
        assert!(ball_gauge_unified(&ind, PIndex::new(0.0).unwrap(), &[1.0, 0.0], &q()).is_err());
    }

    #[test]
    fn i_p_examples() {
        let step = RayProfile::step(1.0, 0.7);
        for p in [-0.8, -0.2, 0.5, 4.0] {
            assert_relative_eq!(i_p(&step, p).unwrap(), 0.7, max_relative = 1e-12);
        }
        let exp = RayProfile::from_fn(|r: f64| (-r).exp(), f64::INFINITY, vec![], Some((1.0, 1.0)));
        assert_relative_eq!(i_p(&exp, 2.0).unwrap(), 2f64.sqrt(), max_relative = 1e-9);
        assert_relative_eq!(i_p(&exp, 1.0).unwrap(), 1.0, max_relative = 1e-9);
        // -1 < p < 0: (p ∫ r^{p-1}(e^{-r} - 1))^{1/p} = Γ(p+1)^{1/p}
        let p = -0.5;
        assert_relative_eq!(
            i_p(&exp, p).unwrap(),
            (ln_gamma(p + 1.0) / p).exp(),
            max_relative = 1e-9
        );
        let flat = RayProfile::from_fn(|_| 1.0, f64::INFINITY, vec![], None);
        assert!(matches!(i_p(&flat, 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn zero_branch_matches_richardson() {
        let exp = RayProfile::from_fn(|r: f64| (-r).exp(), f64::INFINITY, vec![], None);
        let (direct, rich) = zero_branch_cross_check(&exp, 1e-3, &q()).unwrap();
        // log ρ_0 = -γ for ψ = e^{-r}
        assert_relative_eq!(direct, -0.577_215_664_901_532_9, max_relative = 1e-9);
        assert!((direct - rich).abs() < 1e-6, "{direct} vs {rich}");
    }

    #[test]
    fn homogeneity_and_monotonicity() {
        let g = LogConcaveFn::quadratic_exponential(vec![0.0, 0.0], &[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let x = [0.4, -1.3];
        let base = ball_gauge(&g, PIndex::new(0.7).unwrap(), &x, &q()).unwrap();
        let scaled = ball_gauge(&g, PIndex::new(0.7).unwrap(), &[4.0, -13.0], &q()).unwrap();
        assert_relative_eq!(scaled, 10.0 * base, max_relative = 1e-12);
        let mut last = f64::INFINITY;
        for p in [-0.9, -0.5, -0.1, 0.0, 0.1, 1.0, 3.0, 10.0] {
            let v = ball_gauge(&g, PIndex::new(p).unwrap(), &x, &q()).unwrap();
            assert!(v <= last * (1.0 + 1e-9), "p = {p}: {v} > {last}");
            last = v;
        }
    }

    #[test]
    fn radial_samples_are_ordered_and_deterministic() {
        let g = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
        let grid = DirectionGrid::new(2, GridScheme::UniformAngle, 64, 0).unwrap();
        let s = radial_samples(&g, PIndex::new(2.0).unwrap(), &grid, &q()).unwrap();
        for r in s.radii().unwrap() {
            assert!((r - 2f64.sqrt()).abs() < 1e-6);
        }
        let sq = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let ind = LogConcaveFn::indicator(sq).unwrap();
        let t = radial_samples(&ind, PIndex::new(0.4).unwrap(), &grid, &q()).unwrap();
        assert_relative_eq!(t.radii().unwrap()[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(t.radii().unwrap()[16], 1.0, max_relative = 1e-12);
        let again = radial_samples(&ind, PIndex::new(0.4).unwrap(), &grid, &q()).unwrap();
        assert_eq!(t.radii(), again.radii());
    }
}

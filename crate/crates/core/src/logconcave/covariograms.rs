//! Weighted, `L¹`, `L²` and higher-order covariograms.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cubature::{integrate_polygon, triangle_rule};
use super::{LogConcaveFn, Support};
use crate::error::{Error, Result};
use crate::geometry::clip::{clip_polygon, Polyhedron};
use crate::geometry::{ConvexBody, Covariogram, Shape};
use crate::linalg::{self, dot3, V3};
use crate::quadrature::integrate_adaptive;

#[derive(Debug, Clone)]
pub enum CovariogramKind {
    /// `Vol(K ∩ (K + x))`.
    Classical { body: ConvexBody },
    /// `μ(K ∩ (K + x))` for the measure with density `density`.
    Weighted { body: ConvexBody, density: LogConcaveFn },
    /// `∫ f(y) f(x + y) dy`.
    L2 { f: LogConcaveFn },
    /// `∫ min{f(y), f(x + y)} dy`.
    L1 { f: LogConcaveFn },
    /// `Vol(K ∩ (K + x_1) ∩ ... ∩ (K + x_m))` on `(ℝⁿ)^m`.
    MOrder { body: ConvexBody, m: usize },
    /// `∫ min{f(y), f(y + x_1), ..., f(y + x_m)} dy` on `(ℝⁿ)^m`.
    L1MOrder { f: LogConcaveFn, m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationMode {
    /// Clipping plus cubature with `nodes` Gauss points per triangle axis
    /// (adaptive Gauss–Kronrod in 1D).
    Exact { nodes: usize },
    /// Hit counting over a fixed seeded sample of `samples` points.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for IntegrationMode {
    fn default() -> Self {
        IntegrationMode::Exact { nodes: 12 }
    }
}

/// A bounded integration domain `B` in dimension 1, 2 or 3.
#[derive(Clone)]
enum Region {
    Interval(f64, f64),
    Polygon {
        verts: Vec<[f64; 2]>,
        planes: Vec<([f64; 2], f64)>,
    },
    Polyhedron {
        faces: Vec<Vec<V3>>,
        planes: Vec<(V3, f64)>,
        eps: f64,
    },
    None,
}

impl Region {
    fn of(body: &ConvexBody) -> Self {
        let dim = body.dim();
        let (lo, hi) = body.bounding_box();
        let poly = match body.shape() {
            Shape::Ball { .. } => None,
            _ => body.polytope(),
        };
        match dim {
            1 => Region::Interval(lo[0], hi[0]),
            2 => match poly {
                Some(p) => Region::Polygon {
                    verts: p.vertices.iter().map(|v| [v[0], v[1]]).collect(),
                    planes: p
                        .halfspaces
                        .iter()
                        .map(|h| ([h.normal[0], h.normal[1]], h.offset))
                        .collect(),
                },
                None => Region::Polygon {
                    verts: vec![[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]],
                    planes: vec![
                        ([1.0, 0.0], hi[0]),
                        ([0.0, 1.0], hi[1]),
                        ([-1.0, 0.0], -lo[0]),
                        ([0.0, -1.0], -lo[1]),
                    ],
                },
            },
            3 => match poly {
                Some(p) if !p.faces.is_empty() => {
                    let verts: Vec<V3> = p.vertices.iter().map(|v| linalg::to3(v)).collect();
                    Region::Polyhedron {
                        faces: p.faces.iter().map(|f| f.iter().map(|&i| verts[i]).collect()).collect(),
                        planes: p
                            .halfspaces
                            .iter()
                            .map(|h| (linalg::to3(&h.normal), h.offset))
                            .collect(),
                        eps: body.eps(),
                    }
                }
                _ => Region::None,
            },
            _ => Region::None,
        }
    }

    /// `B ∩ ⋂_i (B - s_i)` as an interval, polygon or polyhedron volume.
    fn intersect(&self, shifts: &[&[f64]]) -> Clipped {
        match self {
            Region::Interval(a, b) => {
                let lo = shifts.iter().fold(*a, |acc, s| acc.max(a - s[0]));
                let hi = shifts.iter().fold(*b, |acc, s| acc.min(b - s[0]));
                Clipped::Interval(lo, hi.max(lo))
            }
            Region::Polygon { verts, planes } => {
                let mut cur = verts.clone();
                let mut next = Vec::new();
                for s in shifts {
                    for &(n, b) in planes {
                        clip_polygon(&cur, n, b - n[0] * s[0] - n[1] * s[1], &mut next);
                        std::mem::swap(&mut cur, &mut next);
                        if cur.len() < 3 {
                            return Clipped::Polygon(Vec::new());
                        }
                    }
                }
                Clipped::Polygon(cur)
            }
            Region::Polyhedron { faces, planes, eps } => {
                let mut poly = Polyhedron { faces: faces.clone() };
                for s in shifts {
                    let s3 = linalg::to3(s);
                    for (n, b) in planes {
                        poly.clip(n, b - dot3(n, &s3), *eps);
                        if poly.faces.len() < 4 {
                            return Clipped::Volume(0.0);
                        }
                    }
                }
                Clipped::Volume(poly.volume())
            }
            Region::None => Clipped::Volume(f64::NAN),
        }
    }
}

enum Clipped {
    Interval(f64, f64),
    Polygon(Vec<[f64; 2]>),
    Volume(f64),
}

/// Integrates `h` over a clipped domain (not available for polyhedra).
fn integrate_clipped<F: Fn(&[f64]) -> f64>(c: &Clipped, rule: &[(f64, f64, f64)], h: F) -> f64 {
    match c {
        Clipped::Interval(a, b) => {
            if b <= a {
                return 0.0;
            }
            match integrate_adaptive(|y| h(&[y]), *a, *b, 1e-13, 1e-11, 2000) {
                Ok(i) => i.value,
                Err(_) => f64::NAN,
            }
        }
        Clipped::Polygon(p) => integrate_polygon(p, rule, h),
        Clipped::Volume(_) => f64::NAN,
    }
}

/// Uniform points of `B`, stored flat.
fn sample_set(body: &ConvexBody, samples: usize, seed: u64) -> Result<Arc<Vec<f64>>> {
    if samples < 1000 {
        return Err(Error::MonteCarlo(format!(
            "at least 1000 samples required, got {samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples * body.dim());
    for _ in 0..samples {
        out.extend(body.sample_point(&mut rng, 1_000_000)?);
    }
    Ok(Arc::new(out))
}

/// A bounded body carrying the support of `f` (its own body, or a box from the envelope).
fn support_body(f: &LogConcaveFn) -> Result<(ConvexBody, bool)> {
    let n = f.dim();
    match f.support() {
        Support::Body(b) => Ok((b.clone(), true)),
        Support::Bounded(r) => Ok((ConvexBody::axis_box(vec![-r; n], vec![*r; n])?, true)),
        Support::DifferenceBody(_) | Support::AllSpace => {
            // radius of the superlevel set {f >= 1e-14 f(o)}, sampled over directions
            let level = 1e-14 * f.origin_value();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let mut radius = 0.0f64;
            for k in 0..64 {
                let th = if k < 2 * n {
                    let mut e = vec![0.0; n];
                    e[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                    e
                } else {
                    crate::geometry::random_unit(n, &mut rng)
                };
                let at = |r: f64| f.eval(&th.iter().map(|t| t * r).collect::<Vec<_>>());
                let mut hi = 1.0;
                while at(hi) >= level {
                    hi *= 2.0;
                    if hi > 1e8 {
                        return Err(Error::InvalidFunction("cannot bound the support: no decay".into()));
                    }
                }
                let mut lo = 0.0;
                for _ in 0..50 {
                    let mid = 0.5 * (lo + hi);
                    if at(mid) >= level {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                radius = radius.max(hi);
            }
            let t = 1.1 * radius;
            let bounded = matches!(f.support(), Support::DifferenceBody(_));
            Ok((ConvexBody::axis_box(vec![-t; n], vec![t; n])?, bounded))
        }
    }
}

fn exact_nodes(mode: IntegrationMode, dim: usize, what: &str) -> Result<Option<usize>> {
    match mode {
        IntegrationMode::Exact { nodes } => {
            if dim > 2 {
                return Err(Error::Unsupported(format!(
                    "{what} in dimension {dim}: use monte-carlo mode"
                )));
            }
            Ok(Some(nodes.max(2)))
        }
        IntegrationMode::MonteCarlo { .. } => Ok(None),
    }
}

pub fn generalized_covariogram(kind: CovariogramKind, mode: IntegrationMode) -> Result<LogConcaveFn> {
    match kind {
        CovariogramKind::Classical { body } => match mode {
            IntegrationMode::Exact { .. } => LogConcaveFn::covariogram(&body),
            IntegrationMode::MonteCarlo { .. } => {
                let g = generalized_covariogram(
                    CovariogramKind::MOrder {
                        body: body.clone(),
                        m: 1,
                    },
                    mode,
                )?;
                let cov = Arc::new(Covariogram::new(&body)?);
                let f = g.clone();
                LogConcaveFn::custom(
                    body.dim(),
                    Arc::new(move |x: &[f64]| f.eval(x)),
                    Support::DifferenceBody(cov),
                    true,
                    None,
                    "covariogram (monte carlo)",
                )
            }
        },
        CovariogramKind::Weighted { body, density } => {
            let n = body.dim();
            if density.dim() != n {
                return Err(Error::InvalidFunction("density dimension differs from the body".into()));
            }
            let support = match Covariogram::new(&body) {
                Ok(c) => Support::DifferenceBody(Arc::new(c)),
                Err(_) => Support::Bounded(body.diam()),
            };
            let eval: super::Evaluator = match exact_nodes(mode, n, "weighted covariogram")? {
                Some(nodes) => {
                    let region = Region::of(&body);
                    let rule = triangle_rule(nodes);
                    Arc::new(move |x: &[f64]| {
                        let mx: Vec<f64> = x.iter().map(|v| -v).collect();
                        integrate_clipped(&region.intersect(&[&mx]), &rule, |y| density.eval(y))
                    })
                }
                None => {
                    let IntegrationMode::MonteCarlo { samples, seed } = mode else {
                        unreachable!()
                    };
                    let pts = sample_set(&body, samples, seed)?;
                    let vol = body.volume();
                    Arc::new(move |x: &[f64]| {
                        let mut s = 0.0;
                        let mut z = vec![0.0; n];
                        for y in pts.chunks_exact(n) {
                            for i in 0..n {
                                z[i] = y[i] - x[i];
                            }
                            if body.contains(&z) {
                                s += density.eval(y);
                            }
                        }
                        vol * s / samples as f64
                    })
                }
            };
            LogConcaveFn::custom(n, eval, support, true, None, "weighted covariogram")
        }
        CovariogramKind::L2 { f } => function_covariogram(f, 1, mode, false),
        CovariogramKind::L1 { f } => function_covariogram(f, 1, mode, true),
        CovariogramKind::L1MOrder { f, m } => function_covariogram(f, m, mode, true),
        CovariogramKind::MOrder { body, m } => {
            if m == 0 {
                return Err(Error::InvalidParameter("order m must be at least 1".into()));
            }
            let n = body.dim();
            let support = Support::Bounded((m as f64).sqrt() * body.diam() * (1.0 + 1e-9));
            let eval: super::Evaluator = match mode {
                IntegrationMode::Exact { .. } => {
                    if n * m > 6 {
                        return Err(Error::Unsupported(format!(
                            "m-order covariogram with n·m = {} > 6: use monte-carlo mode",
                            n * m
                        )));
                    }
                    let region = Region::of(&body);
                    if matches!(region, Region::None) || matches!(body.shape(), Shape::Ball { .. }) && n > 1 {
                        return Err(Error::Unsupported(
                            "exact m-order covariogram needs a polytope: use monte-carlo mode".into(),
                        ));
                    }
                    Arc::new(move |x: &[f64]| {
                        let neg: Vec<Vec<f64>> = x.chunks_exact(n).map(|c| c.iter().map(|v| -v).collect()).collect();
                        let shifts: Vec<&[f64]> = neg.iter().map(|v| v.as_slice()).collect();
                        match region.intersect(&shifts) {
                            Clipped::Interval(a, b) => b - a,
                            Clipped::Polygon(p) => crate::geometry::clip::polygon_area(&p),
                            Clipped::Volume(v) => v,
                        }
                    })
                }
                IntegrationMode::MonteCarlo { samples, seed } => {
                    let pts = sample_set(&body, samples, seed)?;
                    let vol = body.volume();
                    Arc::new(move |x: &[f64]| {
                        let mut hits = 0usize;
                        let mut z = vec![0.0; n];
                        for y in pts.chunks_exact(n) {
                            let inside = x.chunks_exact(n).all(|xi| {
                                for i in 0..n {
                                    z[i] = y[i] - xi[i];
                                }
                                body.contains(&z)
                            });
                            hits += usize::from(inside);
                        }
                        vol * hits as f64 / samples as f64
                    })
                }
            };
            LogConcaveFn::custom(n * m, eval, support, true, None, "m-order covariogram")
        }
    }
}

/// `L²` (`use_min = false`, `m = 1`) and `L¹`-type covariograms of a function.
fn function_covariogram(f: LogConcaveFn, m: usize, mode: IntegrationMode, use_min: bool) -> Result<LogConcaveFn> {
    if m == 0 {
        return Err(Error::InvalidParameter("order m must be at least 1".into()));
    }
    let n = f.dim();
    let (body, bounded) = support_body(&f)?;
    let support = if bounded {
        Support::Bounded((m as f64).sqrt() * body.diam() * (1.0 + 1e-9))
    } else {
        Support::AllSpace
    };
    let integrand = {
        let f = f.clone();
        move |y: &[f64], x: &[f64], z: &mut Vec<f64>| {
            let mut acc = f.eval(y);
            for xi in x.chunks_exact(n) {
                for i in 0..n {
                    z[i] = y[i] + xi[i];
                }
                let v = f.eval(z);
                acc = if use_min { acc.min(v) } else { acc * v };
            }
            acc
        }
    };
    let eval: super::Evaluator = match exact_nodes(mode, n, "function covariogram")? {
        Some(nodes) => {
            let region = Region::of(&body);
            let rule = triangle_rule(nodes);
            Arc::new(move |x: &[f64]| {
                let shifts: Vec<&[f64]> = x.chunks_exact(n).collect();
                let clipped = region.intersect(&shifts);
                let z = std::cell::RefCell::new(vec![0.0; n]);
                integrate_clipped(&clipped, &rule, |y| integrand(y, x, &mut z.borrow_mut()))
            })
        }
        None => {
            let IntegrationMode::MonteCarlo { samples, seed } = mode else {
                unreachable!()
            };
            let pts = sample_set(&body, samples, seed)?;
            let vol = body.volume();
            Arc::new(move |x: &[f64]| {
                let mut z = vec![0.0; n];
                let s: f64 = pts.chunks_exact(n).map(|y| integrand(y, x, &mut z)).sum();
                vol * s / samples as f64
            })
        }
    };
    let label = match (use_min, m) {
        (false, _) => "L2 covariogram",
        (true, 1) => "L1 covariogram",
        (true, _) => "L1 m-order covariogram",
    };
    LogConcaveFn::custom(n * m, eval, support, true, None, label)
}

//! The covariogram `g_K(x) = Vol(K ∩ (K + x))`, the difference body `DK`,
//! and the polynomial structure of `g_K` along rays.

use rand::Rng;

use super::body::{gauge_from_halfspaces, ConvexBody, Estimate, HalfSpace, Shape};
use super::clip::{clipped_polygon_area, Polyhedron};
use super::hull::hull2;
use crate::error::{Error, Result};
use crate::linalg::{self, add3, cross3, dot3, norm, norm3, scale3, solve3_columns, sub3, unit_ball_volume, V3};
use crate::piecewise::PolyPiece;

/// Clipped volumes below this fraction of `Vol K` are reported as zero.
pub const DEGENERATE_FRACTION: f64 = 1e-14;

#[derive(Debug, Clone)]
enum Kind {
    Interval {
        len: f64,
    },
    Box {
        lens: Vec<f64>,
    },
    Ball {
        radius: f64,
    },
    Polygon {
        verts: Vec<[f64; 2]>,
        planes: Vec<([f64; 2], f64)>,
    },
    Polyhedron {
        faces: Vec<Vec<V3>>,
        planes: Vec<(V3, f64)>,
        verts: Vec<V3>,
        edges: Vec<(V3, V3)>,
    },
}

#[derive(Debug, Clone)]
enum DiffBody {
    Box(Vec<f64>),
    Ball(f64),
    Halfspaces(Vec<HalfSpace>),
}

/// Covariogram evaluator with the difference body precomputed.
#[derive(Debug, Clone)]
pub struct Covariogram {
    dim: usize,
    volume: f64,
    diam: f64,
    kind: Kind,
    diff: DiffBody,
}

impl Covariogram {
    pub fn new(body: &ConvexBody) -> Result<Self> {
        let dim = body.dim();
        let volume = body.volume();
        let (kind, diff) = match body.shape() {
            Shape::Ball { radius, .. } => (Kind::Ball { radius: *radius }, DiffBody::Ball(2.0 * radius)),
            Shape::Box { min, max, .. } => {
                let lens: Vec<f64> = min.iter().zip(max).map(|(a, b)| b - a).collect();
                (Kind::Box { lens: lens.clone() }, DiffBody::Box(lens))
            }
            Shape::Polytope(p) => match dim {
                1 => {
                    let len = p.vertices[1][0] - p.vertices[0][0];
                    (Kind::Interval { len }, DiffBody::Box(vec![len]))
                }
                2 => {
                    let verts: Vec<[f64; 2]> = p.vertices.iter().map(|v| [v[0], v[1]]).collect();
                    let planes = p
                        .halfspaces
                        .iter()
                        .map(|h| ([h.normal[0], h.normal[1]], h.offset))
                        .collect();
                    let diff = DiffBody::Halfspaces(minkowski_difference_polygon(&verts, body.eps())?);
                    (Kind::Polygon { verts, planes }, diff)
                }
                3 => {
                    let verts: Vec<V3> = p.vertices.iter().map(|v| linalg::to3(v)).collect();
                    let faces = p.faces.iter().map(|f| f.iter().map(|&i| verts[i]).collect()).collect();
                    let planes: Vec<(V3, f64)> = p
                        .halfspaces
                        .iter()
                        .map(|h| (linalg::to3(&h.normal), h.offset))
                        .collect();
                    let edges: Vec<(V3, V3)> = p.edges.iter().map(|&(i, j)| (verts[i], verts[j])).collect();
                    let diff = DiffBody::Halfspaces(difference_body_facets3(&verts, &planes, &edges)?);
                    (
                        Kind::Polyhedron {
                            faces,
                            planes,
                            verts,
                            edges,
                        },
                        diff,
                    )
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "exact covariogram needs dimension <= 3 for polytopes, got {dim}"
                    )))
                }
            },
        };
        Ok(Self {
            dim,
            volume,
            diam: body.diam(),
            kind,
            diff,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Vol K = g_K(o) = max g_K`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// `Vol(K ∩ (K + x))` without the degeneracy cut-off.
    pub fn raw(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Interval { len } => (len - x[0].abs()).max(0.0),
            Kind::Box { lens } => lens.iter().zip(x).map(|(l, v)| (l - v.abs()).max(0.0)).product(),
            Kind::Ball { radius } => ball_covariogram(self.dim, *radius, norm(x)),
            Kind::Polygon { verts, planes } => {
                let shifted: Vec<([f64; 2], f64)> = planes
                    .iter()
                    .map(|&(n, b)| (n, b + n[0] * x[0] + n[1] * x[1]))
                    .collect();
                clipped_polygon_area(verts, &shifted)
            }
            Kind::Polyhedron { faces, planes, .. } => {
                let x3 = linalg::to3(x);
                let eps = 1e-12 * self.diam;
                let mut poly = Polyhedron { faces: faces.clone() };
                for (n, b) in planes {
                    poly.clip(n, b + dot3(n, &x3), eps);
                    if poly.faces.len() < 4 {
                        return 0.0;
                    }
                }
                poly.volume()
            }
        }
    }

    /// `g_K(x)`; intersections thinner than a `1e-14` fraction of `Vol K` count as empty.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = self.raw(x);
        if v < DEGENERATE_FRACTION * self.volume {
            0.0
        } else {
            v
        }
    }

    /// `‖x‖_{DK}` with `DK = K + (-K)`.
    pub fn difference_body_gauge(&self, x: &[f64]) -> f64 {
        match &self.diff {
            DiffBody::Box(lens) => lens.iter().zip(x).map(|(l, v)| v.abs() / l).fold(0.0, f64::max),
            DiffBody::Ball(r) => norm(x) / r,
            DiffBody::Halfspaces(hs) => gauge_from_halfspaces(hs, x, 1e-12 * self.diam),
        }
    }

    /// `‖x‖_{DK}` by bisection on `g_K(r x/|x|) > 0` (60 halvings).
    pub fn difference_body_gauge_bisection(&self, x: &[f64]) -> f64 {
        let len = norm(x);
        if len == 0.0 {
            return 0.0;
        }
        let theta: Vec<f64> = x.iter().map(|v| v / len).collect();
        let (mut lo, mut hi) = (0.0, self.diam * (1.0 + 1e-9));
        let mut y = vec![0.0; self.dim];
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            for i in 0..self.dim {
                y[i] = mid * theta[i];
            }
            if self.raw(&y) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        len / (0.5 * (lo + hi))
    }

    /// Exit radius of the ray `r θ` from `DK` (unit `θ`).
    pub fn support_end(&self, theta: &[f64]) -> f64 {
        1.0 / self.difference_body_gauge(theta)
    }

    /// Radii in `(0, support_end)` at which `r ↦ g_K(rθ)` may change polynomial form.
    pub fn ray_breakpoints(&self, theta: &[f64]) -> Vec<f64> {
        let end = self.support_end(theta);
        let slack = 1e-9 * self.diam;
        let mut out = Vec::new();
        match &self.kind {
            Kind::Interval { .. } | Kind::Box { .. } | Kind::Ball { .. } => {}
            Kind::Polygon { verts, planes } => {
                for &(n, b) in planes {
                    let nt = n[0] * theta[0] + n[1] * theta[1];
                    if nt.abs() < 1e-14 {
                        continue;
                    }
                    for v in verts {
                        let r = (b - n[0] * v[0] - n[1] * v[1]) / nt;
                        let w = [v[0] + r * theta[0], v[1] + r * theta[1]];
                        // only a crossing on the boundary of K changes the form
                        if planes.iter().all(|&(m, c)| m[0] * w[0] + m[1] * w[1] <= c + slack) {
                            out.push(r.abs());
                        }
                    }
                }
            }
            Kind::Polyhedron {
                planes, verts, edges, ..
            } => {
                let t3 = linalg::to3(theta);
                for (n, b) in planes {
                    let nt = dot3(n, &t3);
                    if nt.abs() < 1e-14 {
                        continue;
                    }
                    for v in verts {
                        let r = (b - dot3(n, v)) / nt;
                        let w = add3(v, &scale3(&t3, r));
                        if planes.iter().all(|(m, c)| dot3(m, &w) <= c + slack) {
                            out.push(r.abs());
                        }
                    }
                }
                // an edge of K meets an edge of K + rθ
                let mt = scale3(&t3, -1.0);
                let tol = 1e-12;
                for (p1, q1) in edges {
                    let d1 = sub3(q1, p1);
                    for (p2, q2) in edges {
                        let d2 = scale3(&sub3(q2, p2), -1.0);
                        if let Some([s, t, r]) = solve3_columns(&d1, &d2, &mt, &sub3(p2, p1)) {
                            if (-tol..=1.0 + tol).contains(&s) && (-tol..=1.0 + tol).contains(&t) {
                                out.push(r.abs());
                            }
                        }
                    }
                }
            }
        }
        let gap = 1e-11 * end;
        out.retain(|&r| r > gap && r < end - gap);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() <= gap);
        out
    }

    /// Exact polynomial pieces of `r ↦ g_K(rθ)` on `[0, support_end]`, or
    /// `None` for bodies without polynomial ray structure (balls).
    pub fn ray_pieces(&self, theta: &[f64]) -> Option<Result<Vec<PolyPiece>>> {
        let end = self.support_end(theta);
        match &self.kind {
            Kind::Ball { .. } => None,
            Kind::Interval { len } => Some(Ok(vec![PolyPiece {
                a: 0.0,
                b: end,
                coeffs: vec![*len, -*len],
            }])),
            Kind::Box { lens } => {
                // Π (L_i - r|θ_i|) in t = r / end
                let mut c = vec![1.0];
                for (l, th) in lens.iter().zip(theta) {
                    let slope = th.abs() * end;
                    let mut next = vec![0.0; c.len() + 1];
                    for (k, ck) in c.iter().enumerate() {
                        next[k] += ck * l;
                        next[k + 1] -= ck * slope;
                    }
                    c = next;
                }
                Some(Ok(vec![PolyPiece {
                    a: 0.0,
                    b: end,
                    coeffs: c,
                }]))
            }
            Kind::Polygon { .. } | Kind::Polyhedron { .. } => {
                let mut cuts = vec![0.0];
                cuts.extend(self.ray_breakpoints(theta));
                cuts.push(end);
                let tol = 1e-10 * self.volume;
                let mut y = vec![0.0; self.dim];
                let mut pieces = Vec::with_capacity(cuts.len() - 1);
                for w in cuts.windows(2) {
                    let pinned = if w[0] == 0.0 { Some(self.volume) } else { None };
                    let piece = PolyPiece::fit(w[0], w[1], self.dim, pinned, tol, |r| {
                        for i in 0..self.dim {
                            y[i] = r * theta[i];
                        }
                        self.raw(&y)
                    });
                    match piece {
                        Ok(p) => pieces.push(p),
                        Err(e) => return Some(Err(e)),
                    }
                }
                Some(Ok(pieces))
            }
        }
    }
}

/// Monte Carlo estimate of `g_K(x)`: the fraction of uniform `y ∈ K` with
/// `y - x ∈ K`, times `Vol K`.
pub fn covariogram_mc<R: Rng>(body: &ConvexBody, x: &[f64], samples: usize, rng: &mut R) -> Result<Estimate> {
    if samples < 2 {
        return Err(Error::MonteCarlo("need at least two samples".into()));
    }
    let vol = body.volume();
    let mut hits = 0usize;
    for _ in 0..samples {
        let y = body.sample_point(rng, 1_000_000)?;
        let z = linalg::sub(&y, x);
        if body.contains(&z) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    Ok(Estimate {
        value: vol * frac,
        std_error: vol * (frac * (1.0 - frac) / (samples as f64 - 1.0)).sqrt(),
    })
}

/// Lens volume of two radius-`r` balls at distance `d`:
/// `2 κ_{n-1} r^n ∫_0^φ sin^n`, `φ = arccos(d / 2r)`.
pub fn ball_covariogram(dim: usize, r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    let phi = (d / (2.0 * r)).acos();
    let (s, c) = phi.sin_cos();
    // I_k = -sin^{k-1} cos / k + (k-1)/k I_{k-2}
    let mut i_even = phi;
    let mut i_odd = 1.0 - c;
    let mut integral = if dim.is_multiple_of(2) { i_even } else { i_odd };
    for k in 2..=dim {
        let kf = k as f64;
        let prev = if k % 2 == 0 { i_even } else { i_odd };
        let ik = -s.powi(k as i32 - 1) * c / kf + (kf - 1.0) / kf * prev;
        if k % 2 == 0 {
            i_even = ik;
        } else {
            i_odd = ik;
        }
        integral = ik;
    }
    2.0 * unit_ball_volume(dim - 1) * r.powi(dim as i32) * integral
}

/// Facets of `K + (-K)` for a polygon, from the hull of all vertex differences.
fn minkowski_difference_polygon(verts: &[[f64; 2]], eps: f64) -> Result<Vec<HalfSpace>> {
    let mut diffs = Vec::with_capacity(verts.len() * verts.len());
    for a in verts {
        for b in verts {
            diffs.push([a[0] - b[0], a[1] - b[1]]);
        }
    }
    let h = hull2(&diffs, eps);
    let m = h.len();
    (0..m)
        .map(|j| {
            let a = h[j];
            let b = h[(j + 1) % m];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            HalfSpace::new(vec![dy, -dx], dy * a[0] - dx * a[1])
        })
        .collect()
}

/// Supporting half-spaces of `K + (-K)` in 3D. Facet normals of the sum are
/// facet normals of `±K` or cross products of edge directions; the support
/// value is `h_K(u) + h_K(-u)`. Redundant candidates do not change the gauge.
fn difference_body_facets3(verts: &[V3], planes: &[(V3, f64)], edges: &[(V3, V3)]) -> Result<Vec<HalfSpace>> {
    let mut normals: Vec<V3> = Vec::new();
    let mut push = |u: V3| {
        for s in [1.0, -1.0] {
            let v = scale3(&u, s);
            if !normals.iter().any(|w| norm3(&sub3(w, &v)) < 1e-12) {
                normals.push(v);
            }
        }
    };
    for (n, _) in planes {
        push(*n);
    }
    let dirs: Vec<V3> = edges.iter().map(|(p, q)| sub3(q, p)).collect();
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            let c = cross3(a, b);
            let l = norm3(&c);
            if l > 1e-12 * norm3(a) * norm3(b) {
                push(scale3(&c, 1.0 / l));
            }
        }
    }
    let h = |u: &V3| verts.iter().map(|v| dot3(u, v)).fold(f64::NEG_INFINITY, f64::max);
    normals
        .iter()
        .map(|u| HalfSpace::new(u.to_vec(), h(u) + h(&scale3(u, -1.0))))
        .collect()
}

impl ConvexBody {
    /// `g_K(x)`; builds a fresh evaluator, so prefer [`Covariogram`] in loops.
    pub fn covariogram(&self, x: &[f64]) -> Result<f64> {
        Ok(Covariogram::new(self)?.eval(x))
    }

    /// `‖x‖_{DK}`.
    pub fn difference_body_gauge(&self, x: &[f64]) -> Result<f64> {
        Ok(Covariogram::new(self)?.difference_body_gauge(x))
    }

    /// `‖x‖_{Π°K} = |x| Vol_{n-1}(P_{x^⊥} K)`.
    pub fn polar_projection_gauge(&self, x: &[f64]) -> f64 {
        let len = norm(x);
        if len == 0.0 {
            return 0.0;
        }
        let theta: Vec<f64> = x.iter().map(|v| v / len).collect();
        len * self.projection_volume(&theta)
    }
}

/// Checks `g_K(o) = Vol K` and symmetry; used by tests and diagnostics.
pub fn evenness_defect(cov: &Covariogram, x: &[f64]) -> f64 {
    let minus: Vec<f64> = x.iter().map(|v| -v).collect();
    (cov.eval(x) - cov.eval(&minus)).abs() / cov.volume()
}

use rand::Rng;

use super::hull::{hull2, hull3, Hull3};
use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm, to3, unit_ball_volume, V3};

/// Closed half-space `normal · y <= offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    /// Normalizes `normal` to unit length, rescaling the offset accordingly.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if !(len > 0.0) || !len.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidBody(
                "half-space normal must be finite and non-zero".into(),
            ));
        }
        Ok(Self {
            normal: normal.iter().map(|v| v / len).collect(),
            offset: offset / len,
        })
    }

    pub fn slack(&self, y: &[f64]) -> f64 {
        self.offset - dot(&self.normal, y)
    }
}

/// Boundary structure of a polytope in dimension at most 3.
///
/// In 2D the vertices run counter-clockwise and half-space `j` supports the
/// edge from vertex `j` to vertex `j + 1`. In 3D `faces[j]` is the vertex loop
/// of the facet supported by half-space `j`.
#[derive(Debug, Clone)]
pub struct Polytope {
    pub halfspaces: Vec<HalfSpace>,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    /// `(n-1)`-volume of each facet, aligned with `halfspaces`.
    pub facet_areas: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum Shape {
    Polytope(Polytope),
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
        poly: Polytope,
    },
}

/// A compact convex set with non-empty interior.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    shape: Shape,
    diam: f64,
}

const REL_EPS: f64 = 1e-12;

fn polytope_from_points(dim: usize, points: &[Vec<f64>]) -> Result<Polytope> {
    if points
        .iter()
        .any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::InvalidBody(format!(
            "vertices must be finite points of dimension {dim}"
        )));
    }
    let spread = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| linalg::dist(p, q)))
        .fold(0.0f64, f64::max);
    if spread == 0.0 {
        return Err(Error::DegenerateBody("all vertices coincide".into()));
    }
    let eps = REL_EPS * spread;
    match dim {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(Polytope {
                halfspaces: vec![HalfSpace::new(vec![1.0], hi)?, HalfSpace::new(vec![-1.0], -lo)?],
                vertices: vec![vec![lo], vec![hi]],
                faces: vec![vec![1], vec![0]],
                edges: vec![(0, 1)],
                facet_areas: vec![1.0, 1.0],
            })
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let h = hull2(&pts, eps);
            if h.len() < 3 {
                return Err(Error::DegenerateBody(
                    "fewer than three affinely independent vertices".into(),
                ));
            }
            let area = shoelace(&h);
            if area <= 1e-10 * spread * spread {
                return Err(Error::DegenerateBody("polygon has empty interior".into()));
            }
            let m = h.len();
            let mut halfspaces = Vec::with_capacity(m);
            let mut facet_areas = Vec::with_capacity(m);
            let mut faces = Vec::with_capacity(m);
            for j in 0..m {
                let a = h[j];
                let b = h[(j + 1) % m];
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let hs = HalfSpace::new(vec![dy, -dx], dy * a[0] - dx * a[1])?;
                halfspaces.push(hs);
                facet_areas.push((dx * dx + dy * dy).sqrt());
                faces.push(vec![j, (j + 1) % m]);
            }
            Ok(Polytope {
                halfspaces,
                vertices: h.iter().map(|p| p.to_vec()).collect(),
                edges: (0..m).map(|j| (j, (j + 1) % m)).collect(),
                faces,
                facet_areas,
            })
        }
        3 => {
            let pts: Vec<V3> = points.iter().map(|p| to3(p)).collect();
            let h: Hull3 = hull3(&pts, eps)
                .ok_or_else(|| Error::DegenerateBody("fewer than four affinely independent vertices".into()))?;
            if h.volume() <= 1e-10 * spread.powi(3) {
                return Err(Error::DegenerateBody("polytope has empty interior".into()));
            }
            let halfspaces = h
                .planes
                .iter()
                .map(|(n, o)| HalfSpace::new(n.to_vec(), *o))
                .collect::<Result<Vec<_>>>()?;
            Ok(Polytope {
                halfspaces,
                vertices: h.vertices.iter().map(|v| v.to_vec()).collect(),
                edges: h.edges(),
                facet_areas: h.face_areas(),
                faces: h.faces,
            })
        }
        _ => Err(Error::Unsupported(format!(
            "vertex polytopes are supported in dimensions 1-3, got {dim}"
        ))),
    }
}

fn shoelace(h: &[[f64; 2]]) -> f64 {
    let m = h.len();
    let mut s = 0.0;
    for i in 0..m {
        let a = h[i];
        let b = h[(i + 1) % m];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Recession test for `{y : N y <= b}` in dimension at most 3: the set is
/// bounded iff no non-zero direction `d` has `N d <= 0`. Candidate extreme
/// rays of that cone are orthogonal to `n - 1` of the normals.
fn halfspaces_bounded(dim: usize, hs: &[HalfSpace]) -> bool {
    let feasible = |d: &[f64]| hs.iter().all(|h| dot(&h.normal, d) <= 1e-12);
    match dim {
        1 => hs.iter().any(|h| h.normal[0] > 0.0) && hs.iter().any(|h| h.normal[0] < 0.0),
        2 => {
            let mut cands: Vec<Vec<f64>> = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
            for h in hs {
                cands.push(vec![-h.normal[1], h.normal[0]]);
                cands.push(vec![h.normal[1], -h.normal[0]]);
            }
            !cands.iter().any(|d| feasible(d))
        }
        3 => {
            let mut cands: Vec<Vec<f64>> = Vec::new();
            for e in 0..3 {
                let mut d = vec![0.0; 3];
                d[e] = 1.0;
                cands.push(d.clone());
                d[e] = -1.0;
                cands.push(d);
            }
            for (i, a) in hs.iter().enumerate() {
                let an = to3(&a.normal);
                let o = linalg::orthogonal3(&an);
                let w = linalg::cross3(&an, &o);
                // rays inside a single hyperplane are covered by pair crossings,
                // but a lone normal also needs its own orthogonal fan
                for v in [o, w] {
                    cands.push(v.to_vec());
                    cands.push(linalg::scale3(&v, -1.0).to_vec());
                }
                for b in hs.iter().skip(i + 1) {
                    let c = linalg::cross3(&an, &to3(&b.normal));
                    let l = linalg::norm3(&c);
                    if l > 1e-12 {
                        cands.push(linalg::scale3(&c, 1.0 / l).to_vec());
                        cands.push(linalg::scale3(&c, -1.0 / l).to_vec());
                    }
                }
            }
            !cands.iter().any(|d| feasible(d))
        }
        _ => false,
    }
}

fn enumerate_vertices(dim: usize, hs: &[HalfSpace]) -> Vec<Vec<f64>> {
    let inside = |y: &[f64]| {
        let s = norm(y).max(1.0);
        hs.iter().all(|h| h.slack(y) >= -1e-9 * s)
    };
    let mut out = Vec::new();
    match dim {
        1 => {
            for h in hs {
                let y = vec![h.offset / h.normal[0]];
                if inside(&y) {
                    out.push(y);
                }
            }
        }
        2 => {
            for i in 0..hs.len() {
                for j in (i + 1)..hs.len() {
                    let (a, b) = (&hs[i], &hs[j]);
                    let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                    if det.abs() < 1e-13 {
                        continue;
                    }
                    let x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det;
                    let y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det;
                    let p = vec![x, y];
                    if inside(&p) {
                        out.push(p);
                    }
                }
            }
        }
        3 => {
            for i in 0..hs.len() {
                for j in (i + 1)..hs.len() {
                    for k in (j + 1)..hs.len() {
                        let (a, b, c) = (to3(&hs[i].normal), to3(&hs[j].normal), to3(&hs[k].normal));
                        // rows a, b, c: solve via transposed columns
                        let cols = [[a[0], b[0], c[0]], [a[1], b[1], c[1]], [a[2], b[2], c[2]]];
                        let rhs = [hs[i].offset, hs[j].offset, hs[k].offset];
                        if let Some(p) = linalg::solve3_columns(&cols[0], &cols[1], &cols[2], &rhs) {
                            if inside(&p) {
                                out.push(p.to_vec());
                            }
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

impl ConvexBody {
    /// Convex hull of the given points (dimensions 1 to 3).
    pub fn from_vertices(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::InvalidBody("no vertices".into()))?;
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be at least 1".into()));
        }
        if points.len() < dim + 1 {
            return Err(Error::DegenerateBody(format!(
                "need at least {} vertices in dimension {dim}",
                dim + 1
            )));
        }
        let poly = polytope_from_points(dim, points)?;
        Ok(Self::wrap(dim, Shape::Polytope(poly)))
    }

    /// Intersection of half-spaces (dimensions 1 to 3); must be bounded.
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(|h| h.normal.len())
            .ok_or_else(|| Error::InvalidBody("no half-spaces".into()))?;
        if halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::InvalidBody("half-spaces of mixed dimension".into()));
        }
        if dim > 3 {
            return Err(Error::Unsupported(format!(
                "half-space polytopes are supported in dimensions 1-3, got {dim}"
            )));
        }
        if !halfspaces_bounded(dim, &halfspaces) {
            return Err(Error::UnboundedBody);
        }
        let verts = enumerate_vertices(dim, &halfspaces);
        if verts.len() < dim + 1 {
            return Err(Error::DegenerateBody(
                "half-spaces have empty or flat intersection".into(),
            ));
        }
        Self::from_vertices(&verts)
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidBody("dimension must be at least 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBody(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        let dim = center.len();
        Ok(Self::wrap(dim, Shape::Ball { center, radius }))
    }

    pub fn axis_box(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.is_empty() || min.len() != max.len() {
            return Err(Error::InvalidBody(
                "box corners must have equal, positive dimension".into(),
            ));
        }
        if min
            .iter()
            .zip(&max)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidBody("box needs min < max in every coordinate".into()));
        }
        let dim = min.len();
        let poly = if dim <= 3 {
            let mut pts = Vec::with_capacity(1 << dim);
            for mask in 0..(1usize << dim) {
                pts.push(
                    (0..dim)
                        .map(|i| if mask >> i & 1 == 1 { max[i] } else { min[i] })
                        .collect(),
                );
            }
            polytope_from_points(dim, &pts)?
        } else {
            let mut halfspaces = Vec::with_capacity(2 * dim);
            let mut facet_areas = Vec::with_capacity(2 * dim);
            let vol: f64 = min.iter().zip(&max).map(|(a, b)| b - a).product();
            for i in 0..dim {
                let mut n = vec![0.0; dim];
                n[i] = 1.0;
                halfspaces.push(HalfSpace::new(n.clone(), max[i])?);
                n[i] = -1.0;
                halfspaces.push(HalfSpace::new(n, -min[i])?);
                let a = vol / (max[i] - min[i]);
                facet_areas.push(a);
                facet_areas.push(a);
            }
            Polytope {
                halfspaces,
                vertices: Vec::new(),
                faces: Vec::new(),
                edges: Vec::new(),
                facet_areas,
            }
        };
        Ok(Self::wrap(dim, Shape::Box { min, max, poly }))
    }

    /// `[0, 1]^n`.
    pub fn unit_cube(dim: usize) -> Self {
        Self::axis_box(vec![0.0; dim], vec![1.0; dim]).expect("valid cube")
    }

    /// Standard simplex `conv{o, e_1, ..., e_n}` for `n <= 3`.
    pub fn standard_simplex(dim: usize) -> Result<Self> {
        let mut pts = vec![vec![0.0; dim]];
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            pts.push(e);
        }
        Self::from_vertices(&pts)
    }

    fn wrap(dim: usize, shape: Shape) -> Self {
        let diam = match &shape {
            Shape::Polytope(p) => {
                let mut d = 0.0f64;
                for a in &p.vertices {
                    for b in &p.vertices {
                        d = d.max(linalg::dist(a, b));
                    }
                }
                d
            }
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Box { min, max, .. } => linalg::dist(min, max),
        };
        Self { dim, shape, diam }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Tolerance used by the geometric predicates, relative to the diameter.
    pub fn eps(&self) -> f64 {
        1e-12 * self.diam
    }

    /// Half-space structure for polytopes and boxes.
    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.shape {
            Shape::Polytope(p) => Some(p),
            Shape::Box { poly, .. } => Some(poly),
            Shape::Ball { .. } => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let eps = self.eps();
        match &self.shape {
            Shape::Ball { center, radius } => linalg::dist(x, center) <= radius + eps,
            Shape::Box { min, max, .. } => x
                .iter()
                .zip(min.iter().zip(max))
                .all(|(v, (a, b))| *v >= a - eps && *v <= b + eps),
            Shape::Polytope(p) => p.halfspaces.iter().all(|h| h.slack(x) >= -eps),
        }
    }

    /// `‖x‖_K = inf{t > 0 : x ∈ tK}` with values in `[0, +∞]`.
    pub fn minkowski_functional(&self, x: &[f64]) -> f64 {
        let eps = self.eps();
        match &self.shape {
            Shape::Ball { center, radius } => {
                let a = dot(center, center) - radius * radius;
                let b = -2.0 * dot(x, center);
                let c = dot(x, x);
                if c == 0.0 {
                    return if a <= eps * self.diam { 0.0 } else { f64::INFINITY };
                }
                if a.abs() <= eps * self.diam {
                    return if b < 0.0 { c / -b } else { f64::INFINITY };
                }
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return f64::INFINITY;
                }
                let sq = disc.sqrt();
                if a < 0.0 {
                    // roots straddle zero; feasible for t beyond the positive root
                    (-b - sq) / (2.0 * a)
                } else if b < 0.0 {
                    // both roots positive; feasible between them
                    2.0 * c / (-b + sq)
                } else {
                    f64::INFINITY
                }
            }
            Shape::Box { poly, .. } | Shape::Polytope(poly) => gauge_from_halfspaces(&poly.halfspaces, x, eps),
        }
    }

    /// `sup{s >= 0 : y + s x ∈ K}` for `y ∈ K`, so that `‖x‖_{K-y}` is its
    /// reciprocal. Points slightly outside `K` give `0`.
    pub fn exit_length(&self, y: &[f64], x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => {
                // |y - c + s x|² = R²
                let d: Vec<f64> = y.iter().zip(center).map(|(a, b)| a - b).collect();
                let a = dot(x, x);
                if a == 0.0 {
                    return f64::INFINITY;
                }
                let b = dot(&d, x);
                let c = dot(&d, &d) - radius * radius;
                let disc = b * b - a * c;
                if disc < 0.0 {
                    return 0.0;
                }
                ((-b + disc.sqrt()) / a).max(0.0)
            }
            Shape::Box { poly, .. } | Shape::Polytope(poly) => {
                let mut s = f64::INFINITY;
                for h in &poly.halfspaces {
                    let a = dot(&h.normal, x);
                    if a > 0.0 {
                        s = s.min(h.slack(y).max(0.0) / a);
                    }
                }
                s
            }
        }
    }

    /// Support function `h_K(θ) = max_{y∈K} ⟨y, θ⟩`.
    pub fn support(&self, theta: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => dot(center, theta) + radius * norm(theta),
            Shape::Box { min, max, .. } => theta
                .iter()
                .zip(min.iter().zip(max))
                .map(|(t, (a, b))| (t * a).max(t * b))
                .sum(),
            Shape::Polytope(p) => p
                .vertices
                .iter()
                .map(|v| dot(v, theta))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Box { min, max, .. } => (min.clone(), max.clone()),
            Shape::Polytope(p) => {
                let mut lo = vec![f64::INFINITY; self.dim];
                let mut hi = vec![f64::NEG_INFINITY; self.dim];
                for v in &p.vertices {
                    for i in 0..self.dim {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Exact Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => unit_ball_volume(self.dim) * radius.powi(self.dim as i32),
            Shape::Box { min, max, .. } => min.iter().zip(max).map(|(a, b)| b - a).product(),
            Shape::Polytope(p) => polytope_volume(self.dim, p),
        }
    }

    /// Monte Carlo estimate of the volume by hit counting in the bounding box.
    pub fn volume_mc<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<Estimate> {
        if samples < 2 {
            return Err(Error::MonteCarlo("need at least two samples".into()));
        }
        let (lo, hi) = self.bounding_box();
        let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let mut hits = 0usize;
        let mut y = vec![0.0; self.dim];
        for _ in 0..samples {
            for i in 0..self.dim {
                y[i] = rng.gen_range(lo[i]..hi[i]);
            }
            if self.contains(&y) {
                hits += 1;
            }
        }
        let frac = hits as f64 / samples as f64;
        let se = (frac * (1.0 - frac) / (samples as f64 - 1.0)).sqrt();
        Ok(Estimate {
            value: box_vol * frac,
            std_error: box_vol * se,
        })
    }

    /// `Vol_{n-1}` of the orthogonal projection onto `θ^⊥` (`θ` a unit vector).
    pub fn projection_volume(&self, theta: &[f64]) -> f64 {
        if self.dim == 1 {
            return 1.0;
        }
        match &self.shape {
            Shape::Ball { radius, .. } => unit_ball_volume(self.dim - 1) * radius.powi(self.dim as i32 - 1),
            Shape::Box { min, max, .. } => {
                let lens: Vec<f64> = min.iter().zip(max).map(|(a, b)| b - a).collect();
                let vol: f64 = lens.iter().product();
                theta.iter().zip(&lens).map(|(t, l)| t.abs() * vol / l).sum()
            }
            // Cauchy's projection formula
            Shape::Polytope(p) => {
                0.5 * p
                    .halfspaces
                    .iter()
                    .zip(&p.facet_areas)
                    .map(|(h, a)| dot(&h.normal, theta).abs() * a)
                    .sum::<f64>()
            }
        }
    }

    /// Uniform point of `K` by rejection from the bounding box.
    pub fn sample_point<R: Rng>(&self, rng: &mut R, max_tries: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.bounding_box();
        let mut y = vec![0.0; self.dim];
        for _ in 0..max_tries {
            for i in 0..self.dim {
                y[i] = rng.gen_range(lo[i]..=hi[i]);
            }
            if self.contains(&y) {
                return Ok(y);
            }
        }
        Err(Error::DegenerateBody(format!(
            "rejection sampling found no point in {max_tries} tries"
        )))
    }

    /// The same body translated by `t`.
    pub fn translated(&self, t: &[f64]) -> Result<Self> {
        match &self.shape {
            Shape::Ball { center, radius } => Self::ball(linalg::add(center, t), *radius),
            Shape::Box { min, max, .. } => Self::axis_box(linalg::add(min, t), linalg::add(max, t)),
            Shape::Polytope(p) => {
                Self::from_vertices(&p.vertices.iter().map(|v| linalg::add(v, t)).collect::<Vec<_>>())
            }
        }
    }

    /// `-K`.
    pub fn reflected(&self) -> Result<Self> {
        match &self.shape {
            Shape::Ball { center, radius } => Self::ball(linalg::scale(center, -1.0), *radius),
            Shape::Box { min, max, .. } => Self::axis_box(linalg::scale(max, -1.0), linalg::scale(min, -1.0)),
            Shape::Polytope(p) => {
                Self::from_vertices(&p.vertices.iter().map(|v| linalg::scale(v, -1.0)).collect::<Vec<_>>())
            }
        }
    }
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub(crate) fn polytope_volume(dim: usize, p: &Polytope) -> f64 {
    match dim {
        1 => p.vertices[1][0] - p.vertices[0][0],
        2 => {
            let pts: Vec<[f64; 2]> = p.vertices.iter().map(|v| [v[0], v[1]]).collect();
            shoelace(&pts)
        }
        _ => {
            let m = p.vertices.len() as f64;
            let mut c = vec![0.0; dim];
            for v in &p.vertices {
                for i in 0..dim {
                    c[i] += v[i] / m;
                }
            }
            p.halfspaces
                .iter()
                .zip(&p.facet_areas)
                .map(|(h, a)| a * h.slack(&c) / dim as f64)
                .sum()
        }
    }
}

/// Minkowski functional of `{y : n_i · y <= b_i}` at `x`.
///
/// Each constraint `n_i · x <= t b_i` bounds `t` from below (`b_i > 0`), from
/// above (`b_i < 0`), or is independent of `t` (`b_i = 0`).
pub fn gauge_from_halfspaces(hs: &[HalfSpace], x: &[f64], eps: f64) -> f64 {
    let xn = norm(x);
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    for h in hs {
        let a = dot(&h.normal, x);
        let b = h.offset;
        if b > eps {
            lower = lower.max(a / b);
        } else if b < -eps {
            if a > 0.0 {
                return f64::INFINITY;
            }
            upper = upper.min(a / b);
        } else if a > 1e-12 * xn {
            return f64::INFINITY;
        }
    }
    if upper >= lower && upper > 0.0 {
        lower
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> ConvexBody {
        ConvexBody::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn gauge_examples() {
        let k = ConvexBody::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(k.minkowski_functional(&[2.0, 0.0]), 2.0);
        assert_eq!(k.minkowski_functional(&[0.0, 0.0]), 0.0);
        let seg = ConvexBody::from_vertices(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(seg.minkowski_functional(&[-1.0]).is_infinite());
        assert_relative_eq!(seg.minkowski_functional(&[3.0]), 1.5);
        // o on the boundary: the vertex of the square
        let sq = square();
        assert_eq!(sq.minkowski_functional(&[0.0, 0.0]), 0.0);
        assert!(sq.minkowski_functional(&[-1.0, 0.0]).is_infinite());
        assert_relative_eq!(sq.minkowski_functional(&[0.5, 0.0]), 0.5);
    }

    #[test]
    fn ball_gauge_off_center() {
        let b = ConvexBody::ball(vec![0.5, 0.0], 1.0).unwrap();
        assert_relative_eq!(b.minkowski_functional(&[1.5, 0.0]), 1.0, max_relative = 1e-14);
        assert_relative_eq!(b.minkowski_functional(&[-0.5, 0.0]), 1.0, max_relative = 1e-14);
        let far = ConvexBody::ball(vec![3.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(far.minkowski_functional(&[4.0, 0.0]), 1.0, max_relative = 1e-14);
        assert!(far.minkowski_functional(&[0.0, 1.0]).is_infinite());
    }

    #[test]
    fn volumes() {
        assert_relative_eq!(square().volume(), 1.0);
        let tri = ConvexBody::standard_simplex(2).unwrap();
        assert_relative_eq!(tri.volume(), 0.5);
        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(disk.volume(), std::f64::consts::PI, max_relative = 1e-15);
        let s3 = ConvexBody::standard_simplex(3).unwrap();
        assert_relative_eq!(s3.volume(), 1.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn halfspace_polytopes() {
        let hs = vec![
            HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(vec![0.0, 1.0], 1.0).unwrap(),
            HalfSpace::new(vec![-1.0, -1.0], 0.0).unwrap(),
        ];
        let k = ConvexBody::from_halfspaces(hs).unwrap();
        assert_relative_eq!(k.volume(), 2.0, max_relative = 1e-12);
        let open = vec![
            HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(vec![0.0, 1.0], 1.0).unwrap(),
        ];
        assert!(matches!(ConvexBody::from_halfspaces(open), Err(Error::UnboundedBody)));
        let slab3 = vec![
            HalfSpace::new(vec![0.0, 0.0, 1.0], 1.0).unwrap(),
            HalfSpace::new(vec![0.0, 0.0, -1.0], 1.0).unwrap(),
            HalfSpace::new(vec![1.0, 0.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(vec![-1.0, 0.0, 0.0], 1.0).unwrap(),
        ];
        assert!(matches!(ConvexBody::from_halfspaces(slab3), Err(Error::UnboundedBody)));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(ConvexBody::from_vertices(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        assert!(ConvexBody::ball(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn projections() {
        let sq = square();
        assert_relative_eq!(sq.projection_volume(&[1.0, 0.0]), 1.0, max_relative = 1e-14);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(sq.projection_volume(&[d, d]), 2f64.sqrt(), max_relative = 1e-14);
        let disk = ConvexBody::ball(vec![0.3, 0.1], 1.0).unwrap();
        assert_relative_eq!(disk.projection_volume(&[0.6, 0.8]), 2.0, max_relative = 1e-14);
        let cube = ConvexBody::unit_cube(3);
        let poly_cube = ConvexBody::from_vertices(&cube.polytope().unwrap().vertices).unwrap();
        let t = [0.48, 0.6, 0.64];
        assert_relative_eq!(cube.projection_volume(&t), 0.48 + 0.6 + 0.64, max_relative = 1e-13);
        assert_relative_eq!(poly_cube.projection_volume(&t), 0.48 + 0.6 + 0.64, max_relative = 1e-13);
    }

    #[test]
    fn sampling_stays_inside_and_is_centered() {
        let sq = square();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut mean = [0.0; 2];
        for _ in 0..n {
            let y = sq.sample_point(&mut rng, 100).unwrap();
            assert!(sq.contains(&y));
            mean[0] += y[0] / n as f64;
            mean[1] += y[1] / n as f64;
        }
        // sd of a uniform coordinate is 1/sqrt(12)
        let sigma = (1.0 / 12.0f64).sqrt() / (n as f64).sqrt();
        assert!((mean[0] - 0.5).abs() < 3.0 * sigma);
        assert!((mean[1] - 0.5).abs() < 3.0 * sigma);
    }

    #[test]
    fn volume_monte_carlo_for_square_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let est = square().volume_mc(1000, &mut rng).unwrap();
        // acceptance rate in its own bounding box is one
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }
}

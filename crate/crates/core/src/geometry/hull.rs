//! Convex hulls in dimensions 2 and 3.
//!
//! The 3D hull enumerates supporting planes through vertex triples. It is
//! quartic in the number of points, which is fine for the small polytopes this
//! crate works with (a few dozen vertices at most).

use crate::linalg::{add3, cross3, dot3, newell_area3, norm3, orthogonal3, scale3, sub3, V3};

/// Counter-clockwise hull of planar points (Andrew's monotone chain).
/// Collinear points on the boundary are dropped.
pub fn hull2(points: &[[f64; 2]], eps: f64) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= eps && (a[1] - b[1]).abs() <= eps);
    if pts.len() < 3 {
        return pts;
    }
    let cross =
        |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps * eps {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps * eps {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Facet description of a 3D hull.
#[derive(Debug, Clone)]
pub struct Hull3 {
    pub vertices: Vec<V3>,
    /// Outward unit normals and offsets, `n · y <= offset`.
    pub planes: Vec<(V3, f64)>,
    /// Vertex loops of each facet, counter-clockwise seen from outside.
    pub faces: Vec<Vec<usize>>,
}

impl Hull3 {
    pub fn volume(&self) -> f64 {
        let c = centroid3(&self.vertices);
        self.planes
            .iter()
            .zip(&self.faces)
            .map(|((n, off), face)| {
                let pts: Vec<V3> = face.iter().map(|&i| self.vertices[i]).collect();
                let area = norm3(&newell_area3(&pts));
                area * (off - dot3(n, &c)) / 3.0
            })
            .sum()
    }

    pub fn face_areas(&self) -> Vec<f64> {
        self.faces
            .iter()
            .map(|face| {
                let pts: Vec<V3> = face.iter().map(|&i| self.vertices[i]).collect();
                norm3(&newell_area3(&pts))
            })
            .collect()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = Vec::new();
        for face in &self.faces {
            for k in 0..face.len() {
                let a = face[k];
                let b = face[(k + 1) % face.len()];
                e.push((a.min(b), a.max(b)));
            }
        }
        e.sort_unstable();
        e.dedup();
        e
    }
}

pub fn centroid3(pts: &[V3]) -> V3 {
    let mut c = [0.0; 3];
    for p in pts {
        c = add3(&c, p);
    }
    scale3(&c, 1.0 / pts.len() as f64)
}

/// Orders coplanar points counter-clockwise around `normal`.
pub fn order_loop(points: &[V3], idx: &mut [usize], normal: &V3) {
    let sel: Vec<V3> = idx.iter().map(|&i| points[i]).collect();
    let c = centroid3(&sel);
    let u = orthogonal3(normal);
    let w = cross3(normal, &u);
    idx.sort_by(|&a, &b| {
        let da = sub3(&points[a], &c);
        let db = sub3(&points[b], &c);
        let ta = dot3(&da, &w).atan2(dot3(&da, &u));
        let tb = dot3(&db, &w).atan2(dot3(&db, &u));
        ta.total_cmp(&tb)
    });
}

/// Hull of a 3D point cloud; `None` when the points are (numerically) coplanar.
pub fn hull3(points: &[V3], eps: f64) -> Option<Hull3> {
    let mut pts: Vec<V3> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| norm3(&sub3(p, q)) <= eps) {
            pts.push(*p);
        }
    }
    let m = pts.len();
    if m < 4 {
        return None;
    }
    let spread = pts.iter().map(|p| norm3(&sub3(p, &pts[0]))).fold(0.0f64, f64::max);
    let mut planes: Vec<(V3, f64)> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let c = cross3(&sub3(&pts[j], &pts[i]), &sub3(&pts[k], &pts[i]));
                let len = norm3(&c);
                if len <= 1e-12 * spread * spread {
                    continue;
                }
                let n = scale3(&c, 1.0 / len);
                let off = dot3(&n, &pts[i]);
                let (mut lo, mut hi) = (0.0f64, 0.0f64);
                for p in &pts {
                    let d = dot3(&n, p) - off;
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                let plane = if hi <= eps {
                    (n, off)
                } else if lo >= -eps {
                    (scale3(&n, -1.0), -off)
                } else {
                    continue;
                };
                if hi - lo <= eps {
                    // all points coplanar
                    continue;
                }
                let dup = planes
                    .iter()
                    .any(|(q, o)| norm3(&sub3(q, &plane.0)) <= 1e-9 && (o - plane.1).abs() <= eps);
                if !dup {
                    planes.push(plane);
                }
            }
        }
    }
    if planes.len() < 4 {
        return None;
    }
    // keep only extreme points: those on three planes with independent normals
    let on_plane = |p: &V3, pl: &(V3, f64)| (dot3(&pl.0, p) - pl.1).abs() <= eps;
    let mut keep = Vec::new();
    for p in &pts {
        let inc: Vec<&V3> = planes.iter().filter(|pl| on_plane(p, pl)).map(|pl| &pl.0).collect();
        let mut extreme = false;
        'outer: for a in 0..inc.len() {
            for b in (a + 1)..inc.len() {
                for c in (b + 1)..inc.len() {
                    if crate::linalg::det3(inc[a], inc[b], inc[c]).abs() > 1e-9 {
                        extreme = true;
                        break 'outer;
                    }
                }
            }
        }
        if extreme {
            keep.push(*p);
        }
    }
    let vertices = keep;
    let mut faces = Vec::with_capacity(planes.len());
    for pl in &planes {
        let mut idx: Vec<usize> = (0..vertices.len()).filter(|&i| on_plane(&vertices[i], pl)).collect();
        order_loop(&vertices, &mut idx, &pl.0);
        faces.push(idx);
    }
    Some(Hull3 {
        vertices,
        planes,
        faces,
    })
}

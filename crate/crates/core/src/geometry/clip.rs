//! Sequential half-space clipping of convex polygons and polyhedra.

use super::hull::{centroid3, order_loop};
use crate::linalg::{add3, dot3, newell_area3, norm3, scale3, sub3, V3};

/// Clips a convex polygon (counter-clockwise) to `n · y <= b`.
pub fn clip_polygon(poly: &[[f64; 2]], n: [f64; 2], b: f64, out: &mut Vec<[f64; 2]>) {
    out.clear();
    let m = poly.len();
    if m == 0 {
        return;
    }
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let dp = n[0] * p[0] + n[1] * p[1] - b;
        let dq = n[0] * q[0] + n[1] * q[1] - b;
        if dp <= 0.0 {
            out.push(p);
        }
        if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let m = poly.len();
    if m < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..m {
        let a = poly[i];
        let b = poly[(i + 1) % m];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

/// Area of `P ∩ {n_i · y <= b_i for all i}` for a convex polygon `P`.
pub fn clipped_polygon_area(poly: &[[f64; 2]], planes: &[([f64; 2], f64)]) -> f64 {
    let mut cur = poly.to_vec();
    let mut next = Vec::with_capacity(poly.len() + planes.len());
    for &(n, b) in planes {
        clip_polygon(&cur, n, b, &mut next);
        std::mem::swap(&mut cur, &mut next);
        if cur.len() < 3 {
            return 0.0;
        }
    }
    polygon_area(&cur)
}

/// Convex polyhedron as a list of planar face loops.
#[derive(Debug, Clone, Default)]
pub struct Polyhedron {
    pub faces: Vec<Vec<V3>>,
}

impl Polyhedron {
    /// Clips to `n · y <= b`, closing the cut with a cap face.
    pub fn clip(&mut self, n: &V3, b: f64, eps: f64) {
        let mut cap: Vec<V3> = Vec::new();
        let mut coplanar = false;
        let mut faces = Vec::with_capacity(self.faces.len() + 1);
        for face in &self.faces {
            let m = face.len();
            if face.iter().all(|p| (dot3(n, p) - b).abs() <= eps) {
                // the face already lies in the cutting plane and closes the cut
                coplanar = true;
                faces.push(face.clone());
                continue;
            }
            let mut out = Vec::with_capacity(m + 2);
            for i in 0..m {
                let p = face[i];
                let q = face[(i + 1) % m];
                let dp = dot3(n, &p) - b;
                let dq = dot3(n, &q) - b;
                if dp <= eps {
                    out.push(p);
                    if dp >= -eps {
                        cap.push(p);
                    }
                }
                if (dp < -eps && dq > eps) || (dp > eps && dq < -eps) {
                    let t = dp / (dp - dq);
                    let x = add3(&p, &scale3(&sub3(&q, &p), t));
                    out.push(x);
                    cap.push(x);
                }
            }
            if out.len() >= 3 {
                faces.push(out);
            }
        }
        if !cap.is_empty() && !coplanar {
            let mut uniq: Vec<V3> = Vec::with_capacity(cap.len());
            for p in cap {
                if !uniq.iter().any(|q| norm3(&sub3(&p, q)) <= 4.0 * eps) {
                    uniq.push(p);
                }
            }
            if uniq.len() >= 3 {
                let mut idx: Vec<usize> = (0..uniq.len()).collect();
                order_loop(&uniq, &mut idx, n);
                faces.push(idx.into_iter().map(|i| uniq[i]).collect());
            }
        }
        self.faces = faces;
    }

    pub fn volume(&self) -> f64 {
        if self.faces.len() < 4 {
            return 0.0;
        }
        let pts: Vec<V3> = self.faces.iter().flatten().copied().collect();
        let c = centroid3(&pts);
        let mut v = 0.0;
        for face in &self.faces {
            let area = newell_area3(face);
            let a = norm3(&area);
            if a == 0.0 {
                continue;
            }
            let nrm = scale3(&area, 1.0 / a);
            v += a * dot3(&nrm, &sub3(&face[0], &c)).abs() / 3.0;
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_cube() -> Polyhedron {
        let v = |i: usize| [(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64];
        let quads = [
            [0, 2, 6, 4],
            [1, 5, 7, 3],
            [0, 4, 5, 1],
            [2, 3, 7, 6],
            [0, 1, 3, 2],
            [4, 6, 7, 5],
        ];
        Polyhedron {
            faces: quads.iter().map(|q| q.iter().map(|&i| v(i)).collect()).collect(),
        }
    }

    #[test]
    fn cube_volume_and_half_clip() {
        let mut c = unit_cube();
        assert_relative_eq!(c.volume(), 1.0, max_relative = 1e-14);
        c.clip(&[1.0, 0.0, 0.0], 0.25, 1e-12);
        assert_relative_eq!(c.volume(), 0.25, max_relative = 1e-13);
        let s = 1.0 / 3f64.sqrt();
        c.clip(&[s, s, s], 0.0, 1e-12);
        assert!(c.volume() < 1e-12);
    }

    #[test]
    fn corner_cut_of_cube() {
        let mut c = unit_cube();
        let s = 1.0 / 3f64.sqrt();
        // x + y + z <= 1 keeps the corner simplex of volume 1/6
        c.clip(&[s, s, s], s, 1e-12);
        assert_relative_eq!(c.volume(), 1.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn polygon_clip() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let a = clipped_polygon_area(&sq, &[([1.0, 0.0], 0.5), ([0.0, -1.0], -0.5)]);
        assert_relative_eq!(a, 0.25, max_relative = 1e-14);
    }
}

//! Small dense vector helpers on `&[f64]` and `[f64; 3]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    scale(a, 1.0 / n)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub type V3 = [f64; 3];

#[inline]
pub fn to3(a: &[f64]) -> V3 {
    [a[0], a[1], a[2]]
}

#[inline]
pub fn dot3(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn sub3(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add3(a: &V3, b: &V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale3(a: &V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn cross3(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3(a: &V3) -> f64 {
    dot3(a, a).sqrt()
}

pub fn det3(a: &V3, b: &V3, c: &V3) -> f64 {
    dot3(a, &cross3(b, c))
}

/// Solves `[c0 c1 c2] x = rhs` by Cramer's rule; `None` when the columns are
/// numerically dependent relative to their lengths.
pub fn solve3_columns(c0: &V3, c1: &V3, c2: &V3, rhs: &V3) -> Option<V3> {
    let d = det3(c0, c1, c2);
    let s = norm3(c0) * norm3(c1) * norm3(c2);
    if d.abs() <= 1e-13 * s || s == 0.0 {
        return None;
    }
    Some([det3(rhs, c1, c2) / d, det3(c0, rhs, c2) / d, det3(c0, c1, rhs) / d])
}

/// Any unit vector orthogonal to the unit vector `n`.
pub fn orthogonal3(n: &V3) -> V3 {
    let a = if n[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = cross3(n, &a);
    scale3(&u, 1.0 / norm3(&u))
}

/// Area vector of a planar polygon loop (Newell's method); its length is the area.
pub fn newell_area3(loop_: &[V3]) -> V3 {
    let mut s = [0.0; 3];
    let m = loop_.len();
    for i in 0..m {
        let a = &loop_[i];
        let b = &loop_[(i + 1) % m];
        s = add3(&s, &cross3(a, b));
    }
    scale3(&s, 0.5)
}

/// Volume of the unit Euclidean ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

use crate::quadrature::gauss_legendre;

/// Collapsed (Duffy) Gauss–Legendre rule on the reference triangle
/// `{(u, v) : u, v >= 0, u + v <= 1}`: `(u, v, weight)`, weights summing to `1/2`.
pub fn triangle_rule(m: usize) -> Vec<(f64, f64, f64)> {
    let gl = gauss_legendre(m);
    let mut out = Vec::with_capacity(m * m);
    for (xi, wi) in gl.nodes.iter().zip(&gl.weights) {
        let u = 0.5 * (xi + 1.0);
        for (xj, wj) in gl.nodes.iter().zip(&gl.weights) {
            let s = 0.5 * (xj + 1.0);
            out.push((u, s * (1.0 - u), 0.25 * wi * wj * (1.0 - u)));
        }
    }
    out
}

/// `∫_P f` over a convex polygon by fan triangulation.
pub fn integrate_polygon<F: FnMut(&[f64]) -> f64>(poly: &[[f64; 2]], rule: &[(f64, f64, f64)], mut f: F) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let a = poly[0];
    let mut total = 0.0;
    let mut y = [0.0; 2];
    for k in 1..poly.len() - 1 {
        let b = poly[k];
        let c = poly[k + 1];
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - a[0], c[1] - a[1]];
        let jac = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        if jac == 0.0 {
            continue;
        }
        let mut s = 0.0;
        for &(u, v, w) in rule {
            y[0] = a[0] + u * e1[0] + v * e2[0];
            y[1] = a[1] + u * e1[1] + v * e2[1];
            s += w * f(&y);
        }
        total += jac * s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polygon_moments() {
        let rule = triangle_rule(8);
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_relative_eq!(integrate_polygon(&sq, &rule, |_| 1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            integrate_polygon(&sq, &rule, |y| y[0] * y[0] * y[1]),
            1.0 / 6.0,
            max_relative = 1e-13
        );
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        // ∫ e^{x+y} over the triangle = 1
        assert_relative_eq!(
            integrate_polygon(&tri, &rule, |y| (y[0] + y[1]).exp()),
            1.0,
            max_relative = 1e-12
        );
    }
}

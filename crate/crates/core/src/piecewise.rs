//! Piecewise polynomial ray profiles and their exact power moments.
//!
//! Along a ray the covariogram of a polytope is a polynomial of degree at most
//! `n` between consecutive combinatorial events. Each piece is stored in the
//! local variable `t = (r - a) / (b - a)` so that short pieces far from the
//! origin stay well conditioned.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, GaussRule};

/// `q(r) = Σ_k coeffs[k] t^k` with `t = (r - a) / (b - a)` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPiece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

fn legendre24() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

fn binomial(k: usize, j: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..j {
        c = c * (k - i) as f64 / (i + 1) as f64;
    }
    c
}

impl PolyPiece {
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn eval(&self, r: f64) -> f64 {
        let t = (r - self.a) / self.width();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Interpolates `f` at Chebyshev points of `[a, b]` and checks the result
    /// at one further abscissa. With `pinned = Some(v)` the constant term is
    /// fixed to `v` (the value at `a`) and only `degree` points are used.
    pub fn fit<F: FnMut(f64) -> f64>(
        a: f64,
        b: f64,
        degree: usize,
        pinned: Option<f64>,
        check_tol: f64,
        mut f: F,
    ) -> Result<Self> {
        let w = b - a;
        let free = if pinned.is_some() { degree } else { degree + 1 };
        let first = usize::from(pinned.is_some());
        let mut coeffs = vec![0.0; degree + 1];
        if free > 0 {
            let ts: Vec<f64> = (0..free)
                .map(|j| 0.5 - 0.5 * ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * free) as f64).cos())
                .collect();
            let mut m = DMatrix::<f64>::zeros(free, free);
            let mut rhs = DVector::<f64>::zeros(free);
            for (i, &t) in ts.iter().enumerate() {
                for k in 0..free {
                    m[(i, k)] = t.powi((k + first) as i32);
                }
                rhs[i] = f(a + w * t) - pinned.unwrap_or(0.0);
            }
            let sol = m
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::InvalidParameter("singular interpolation system".into()))?;
            for k in 0..free {
                coeffs[k + first] = sol[k];
            }
        }
        if let Some(v) = pinned {
            coeffs[0] = v;
        }
        let piece = Self { a, b, coeffs };
        let probe = a + 0.37 * w;
        let fv = f(probe);
        let mismatch = (piece.eval(probe) - fv).abs();
        if !(mismatch <= check_tol) {
            return Err(Error::InvalidFunction(format!(
                "profile is not polynomial of degree {degree} on [{a}, {b}] (mismatch {mismatch:e})"
            )));
        }
        Ok(piece)
    }

    /// `∫_a^b r^s (q(r) - c) dr`, which may be `+∞` in magnitude when the
    /// piece starts at the origin with `q(0) != c` and `s <= -1`.
    pub fn moment(&self, s: f64, c: f64) -> f64 {
        let w = self.width();
        if w <= 0.0 {
            return 0.0;
        }
        let a = self.a;
        let b = self.b;
        if a == 0.0 {
            // r = w t
            let mut acc = 0.0;
            let d0 = self.coeffs[0] - c;
            if d0 != 0.0 {
                if s <= -1.0 {
                    return d0.signum() * f64::INFINITY;
                }
                acc += d0 / (s + 1.0);
            }
            for (k, &dk) in self.coeffs.iter().enumerate().skip(1) {
                acc += dk / (s + k as f64 + 1.0);
            }
            return w.powf(s + 1.0) * acc;
        }
        if a >= 0.5 * w {
            // r^s is analytic well beyond the piece
            let rule = legendre24();
            let mid = 0.5 * (a + b);
            let half = 0.5 * w;
            return half
                * rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &wt)| {
                        let r = mid + half * x;
                        wt * r.powf(s) * (self.eval(r) - c)
                    })
                    .sum::<f64>();
        }
        // short distance to the origin: expand in powers of r
        let deg = self.coeffs.len() - 1;
        let mut e = vec![0.0; deg + 1];
        e[0] -= c;
        for (k, &dk) in self.coeffs.iter().enumerate() {
            let scale = dk / w.powi(k as i32);
            for (j, ej) in e.iter_mut().enumerate().take(k + 1) {
                *ej += scale * binomial(k, j) * (-a).powi((k - j) as i32);
            }
        }
        e.iter()
            .enumerate()
            .map(|(j, &ej)| {
                let m = s + j as f64 + 1.0;
                if m.abs() < 1e-14 {
                    ej * (b / a).ln()
                } else {
                    ej * (b.powf(m) - a.powf(m)) / m
                }
            })
            .sum()
    }
}

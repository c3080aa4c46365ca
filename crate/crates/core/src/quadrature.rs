//! Quadrature rules and the adaptive integrator.
//!
//! Fixed rules (Gauss–Jacobi, Gauss–Legendre, Gauss–Hermite) are built with the
//! Golub–Welsch algorithm: the nodes are the eigenvalues of the symmetric
//! tridiagonal Jacobi matrix of the three-term recurrence and the weights are
//! `mu0 * v0^2` with `v0` the first component of each normalized eigenvector.
//!
//! The adaptive integrator is a global Gauss–Kronrod (7, 15) scheme.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Nodes and weights of a Gauss rule on its reference interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn from_recurrence(diag: Vec<f64>, offdiag: Vec<f64>, mu0: f64) -> Self {
        let n = diag.len();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = offdiag[i];
                m[(i + 1, i)] = offdiag[i];
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }
}

/// Gauss–Jacobi rule for the weight `(1 - x)^alpha (1 + x)^beta` on `[-1, 1]`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Gauss–Jacobi rule needs at least one node".into(),
        ));
    }
    if !(alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "Gauss–Jacobi exponents must exceed -1 (alpha = {alpha}, beta = {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        let kf = k as f64;
        let d = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        diag.push(d);
    }
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = s * s * (s + 1.0) * (s - 1.0);
        off.push((num / den).sqrt());
    }
    let mu0 = (ab + 1.0).exp2() * (ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0) - ln_gamma(ab + 2.0)).exp();
    Ok(GaussRule::from_recurrence(diag, off, mu0))
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0).expect("Legendre parameters are valid")
}

/// Physicists' Gauss–Hermite rule for the weight `exp(-t^2)` on the real line.
pub fn gauss_hermite(n: usize) -> GaussRule {
    let diag = vec![0.0; n];
    let off = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    GaussRule::from_recurrence(diag, off, std::f64::consts::PI.sqrt())
}

/// Rule for `∫_0^eta r^beta f(r) dr`, stored on the unit interval so that it
/// can be rescaled to any `eta` without recomputing the eigenproblem.
#[derive(Debug, Clone)]
pub struct EndpointRule {
    beta: f64,
    /// Nodes in `[0, 1]`.
    nodes: Vec<f64>,
    /// Weights for `∫_0^1 u^beta f(u) du`.
    weights: Vec<f64>,
}

impl EndpointRule {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        let rule = gauss_jacobi(n, 0.0, beta)?;
        let scale = 0.5f64.powf(beta + 1.0);
        let nodes = rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let weights = rule.weights.iter().map(|w| w * scale).collect();
        Ok(Self { beta, nodes, weights })
    }

    pub fn exponent(&self) -> f64 {
        self.beta
    }

    /// `∫_0^eta r^beta f(r) dr`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, eta: f64, mut f: F) -> f64 {
        let scale = eta.powf(self.beta + 1.0);
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(eta * u))
            .sum();
        scale * s
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = resk * h;
    let abs = resabs * h.abs();
    let raw = ((resk - resg) * h).abs();
    // roundoff floor in the style of QUADPACK
    let floor = 50.0 * f64::EPSILON * abs;
    Segment {
        a,
        b,
        value,
        error: raw.max(floor),
        abs,
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol * |I|)`
/// or when the subdivision budget is exhausted, in which case the achieved bound
/// is returned as an error.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut segs = vec![kronrod15(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let abs: f64 = segs.iter().map(|s| s.abs).sum();
        let target = abs_tol.max(rel_tol * total.abs()).max(50.0 * f64::EPSILON * abs);
        if !total.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                target,
            });
        }
        if err <= target {
            return Ok(Integral {
                value: total,
                error: err,
                evaluations,
            });
        }
        if segs.len() >= max_segments {
            return Err(Error::Quadrature { achieved: err, target });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(idx);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // interval cannot be split further in floating point
            return Err(Error::Quadrature { achieved: err, target });
        }
        segs.push(kronrod15(&mut f, s.a, mid));
        segs.push(kronrod15(&mut f, mid, s.b));
        evaluations += 30;
    }
}

/// `∫_0^∞ r^beta h(r) dr` for `h` smooth on `[0, ∞)` and decaying: a
/// Gauss–Jacobi rule on `[0, eta]`, then adaptive Gauss–Kronrod on doubling
/// intervals until two consecutive ones are negligible.
pub fn integrate_power_weight<F: FnMut(f64) -> f64>(mut h: F, beta: f64, eta: f64, rel_tol: f64) -> Result<f64> {
    let rule = EndpointRule::new(48, beta)?;
    let mut acc = rule.integrate(eta, &mut h);
    let mut mag = rule.integrate(eta, |r| h(r).abs());
    let (mut lo, mut hi) = (eta, 2.0 * eta);
    let mut quiet = 0;
    for _ in 0..200 {
        let part = integrate_adaptive(|r| r.powf(beta) * h(r), lo, hi, 1e-3 * rel_tol * mag, rel_tol, 4000)?;
        acc += part.value;
        mag += part.value.abs();
        if part.value.abs() <= 1e-3 * rel_tol * mag {
            quiet += 1;
            if quiet == 2 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Divergent(format!(
        "power-weighted integral with exponent {beta} did not settle"
    )))
}

/// Natural logarithm of the gamma function for positive arguments
/// (Lanczos approximation, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

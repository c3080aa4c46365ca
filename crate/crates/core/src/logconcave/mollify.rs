//! Gaussian mollification `g_k(x) = (g ∗ γ_k)(x + x(k))`, where `γ_k` is the
//! centered Gaussian density with variance `2/k` per coordinate and `x(k)`
//! maximizes `g ∗ γ_k`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Evaluator, LogConcaveFn, Support};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite, integrate_adaptive};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifySpec {
    /// Gauss–Hermite nodes per axis in dimension 2.
    pub hermite_nodes: usize,
    /// Antithetic Monte Carlo pairs in dimension 3 and above.
    pub mc_samples: usize,
    pub seed: u64,
    /// The argmax search stops once a sweep raises `log(g ∗ γ_k)` by less than this.
    pub argmax_tol: f64,
    pub max_sweeps: usize,
}

impl Default for MollifySpec {
    fn default() -> Self {
        Self {
            hermite_nodes: 64,
            mc_samples: 200_000,
            seed: 0,
            argmax_tol: 1e-9,
            max_sweeps: 200,
        }
    }
}

/// `y ↦ (g ∗ γ_k)(y)`.
///
/// In 1D the integral `π^{-1/2} ∫ g(y - s t) e^{-t²} dt` (`s = 2/√k`) is done
/// adaptively so that jumps of `g` are resolved; in 2D with a tensor
/// Gauss–Hermite rule; beyond that with a fixed seeded antithetic sample.
pub fn convolve_gaussian(g: &LogConcaveFn, k: f64, spec: &MollifySpec) -> Result<Evaluator> {
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mollification index must be positive, got {k}"
        )));
    }
    let n = g.dim();
    let s = 2.0 / k.sqrt();
    let g = g.clone();
    let scale = g.origin_value();
    match n {
        1 => {
            // the support ends and kinks of g on both half-lines, split out so
            // that each piece of the convolution integrand is smooth
            let (hi, lo) = (g.ray_end(&[1.0]), -g.ray_end(&[-1.0]));
            let mut kinks = vec![0.0, lo, hi];
            kinks.extend(g.ray_breakpoints(&[1.0]));
            kinks.extend(g.ray_breakpoints(&[-1.0]).into_iter().map(|b| -b));
            kinks.retain(|z| z.is_finite());
            Ok(Arc::new(move |y: &[f64]| {
                let y0 = y[0];
                let f = |t: f64| g.eval(&[y0 - s * t]) * (-t * t).exp();
                // y0 - s t lies in [lo, hi] for t in [(y0 - hi)/s, (y0 - lo)/s]; e^{-81}
                // is far below double precision relative to the peak
                let (a, b) = (((y0 - hi) / s).max(-9.0), ((y0 - lo) / s).min(9.0));
                if !(a < b) {
                    return 0.0;
                }
                let mut cuts: Vec<f64> = kinks
                    .iter()
                    .map(|z| (y0 - z) / s)
                    .filter(|t| *t > a && *t < b)
                    .collect();
                cuts.push(a);
                cuts.push(b);
                cuts.sort_by(f64::total_cmp);
                let mut v = 0.0;
                for w in cuts.windows(2) {
                    let r = integrate_adaptive(f, w[0], w[1], 1e-15 * scale, 1e-13, 4000)
                        .or_else(|_| integrate_adaptive(f, w[0], w[1], 1e-13 * scale, 1e-10, 20_000));
                    match r {
                        Ok(i) => v += i.value,
                        Err(_) => return f64::NAN,
                    }
                }
                (v / std::f64::consts::PI.sqrt()).max(0.0)
            }))
        }
        2 => {
            let rule = gauss_hermite(spec.hermite_nodes);
            let mut pts = Vec::new();
            for (ti, wi) in rule.nodes.iter().zip(&rule.weights) {
                for (tj, wj) in rule.nodes.iter().zip(&rule.weights) {
                    let w = wi * wj / std::f64::consts::PI;
                    if w > 1e-300 {
                        pts.push((s * ti, s * tj, w));
                    }
                }
            }
            Ok(Arc::new(move |y: &[f64]| {
                let mut acc = 0.0;
                let mut z = [0.0; 2];
                for &(a, b, w) in &pts {
                    z[0] = y[0] - a;
                    z[1] = y[1] - b;
                    acc += w * g.eval(&z);
                }
                acc
            }))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let sd = (2.0 / k).sqrt();
            let m = spec.mc_samples.max(1);
            let zs: Vec<f64> = (0..m * n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    sd * z
                })
                .collect();
            Ok(Arc::new(move |y: &[f64]| {
                let mut acc = 0.0;
                let mut a = vec![0.0; n];
                let mut b = vec![0.0; n];
                for z in zs.chunks_exact(n) {
                    for i in 0..n {
                        a[i] = y[i] - z[i];
                        b[i] = y[i] + z[i];
                    }
                    acc += 0.5 * (g.eval(&a) + g.eval(&b));
                }
                acc / m as f64
            }))
        }
    }
}

/// Mollified function together with the recentering shift `x(k)`.
#[derive(Debug, Clone)]
pub struct Mollified {
    pub function: LogConcaveFn,
    pub shift: Vec<f64>,
    pub k: f64,
}

/// Maximizes `φ(t)` for a unimodal `φ` near `t = 0` with initial step `h`:
/// brackets by doubling, then golden-section search to width `tol`.
fn line_max<F: FnMut(f64) -> f64>(mut phi: F, h: f64, tol: f64) -> f64 {
    let f0 = phi(0.0);
    let (fp, fm) = (phi(h), phi(-h));
    let (mut a, mut b) = if f0 >= fp && f0 >= fm {
        (-h, h)
    } else {
        let dir = if fp > fm { 1.0 } else { -1.0 };
        let mut prev = 0.0;
        let mut cur = dir * h;
        let mut fcur = if dir > 0.0 { fp } else { fm };
        let mut step = h;
        loop {
            step *= 2.0;
            let next = cur + dir * step;
            let fnext = phi(next);
            if fnext <= fcur || step > 1e12 * h {
                break if dir > 0.0 { (prev, next) } else { (next, prev) };
            }
            prev = cur;
            cur = next;
            fcur = fnext;
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    0.5 * (a + b)
}

/// `g_k` with `x(k)` found by coordinate search with golden-section line
/// maximization of `log(g ∗ γ_k)`. A vanishing quadratic penalty breaks ties
/// toward the smallest-norm maximizer.
pub fn mollify(g: &LogConcaveFn, k: f64, spec: &MollifySpec) -> Result<Mollified> {
    let n = g.dim();
    let conv = convolve_gaussian(g, k, spec)?;
    let s = 2.0 / k.sqrt();
    let penalty = 1e-12 / (s * s);
    let objective = |y: &[f64]| {
        let v = conv(y);
        if v > 0.0 {
            v.ln() - penalty * y.iter().map(|t| t * t).sum::<f64>()
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut y = vec![0.0; n];
    let mut best = objective(&y);
    let mut converged = false;
    for _ in 0..spec.max_sweeps {
        let start = best;
        for i in 0..n {
            let base = y.clone();
            let t = line_max(
                |t| {
                    let mut z = base.clone();
                    z[i] += t;
                    objective(&z)
                },
                0.25 * s,
                1e-10 * s,
            );
            let mut cand = base.clone();
            cand[i] += t;
            let v = objective(&cand);
            if v > best {
                best = v;
                y = cand;
            }
        }
        if best - start < spec.argmax_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ArgmaxNotConverged {
            iterations: spec.max_sweeps,
            best: y,
            value: best,
        });
    }
    let origin = objective(&vec![0.0; n]);
    if origin >= best - 1e-14 * best.abs().max(1.0) {
        y = vec![0.0; n];
    }
    let shift = y.clone();
    let conv2 = conv.clone();
    let eval: Evaluator = Arc::new(move |x: &[f64]| {
        let z: Vec<f64> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
        conv2(&z)
    });
    let function = LogConcaveFn::custom(
        n,
        eval,
        Support::AllSpace,
        true,
        None,
        &format!("{} mollified k={k}", g.label()),
    )?;
    Ok(Mollified { function, shift: y, k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_convolution_closed_form() {
        // e^{-x²/2} ∗ γ_k = (1 + 2/k)^{-1/2} e^{-x²/(2(1 + 2/k))}
        let g = LogConcaveFn::isotropic_gaussian(1, 1.0).unwrap();
        for k in [4.0, 64.0] {
            let m = mollify(&g, k, &MollifySpec::default()).unwrap();
            assert_eq!(m.shift, vec![0.0]);
            let v = 1.0 + 2.0 / k;
            for x in [0.0, 0.5, 2.0] {
                let exact = v.powf(-0.5) * (-x * x / (2.0 * v)).exp();
                assert_relative_eq!(m.function.eval(&[x]), exact, max_relative = 1e-10);
            }
        }
        let g2 = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
        let m2 = mollify(&g2, 16.0, &MollifySpec::default()).unwrap();
        let v = 1.0 + 2.0 / 16.0;
        let exact = (1.0 / v) * (-(0.25f64 + 0.49) / (2.0 * v)).exp();
        assert_relative_eq!(m2.function.eval(&[0.5, -0.7]), exact, max_relative = 1e-10);
    }

    #[test]
    fn one_sided_exponential_is_recentered() {
        // g = e^{-|x|} χ_{[-1, ∞)}: the convolution peaks off the origin
        let half = ConvexBody::from_vertices(&[vec![-1.0], vec![1e6]]).unwrap();
        let g = LogConcaveFn::restrict(LogConcaveFn::exp_norm(1, 1.0).unwrap(), half).unwrap();
        let m = mollify(&g, 4.0, &MollifySpec::default()).unwrap();
        assert!(m.shift[0].abs() > 1e-3, "shift {:?}", m.shift);
        let f0 = m.function.eval(&[0.0]);
        for t in [-0.1, -1e-3, 1e-3, 0.1] {
            assert!(m.function.eval(&[t]) <= f0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn pointwise_convergence_inside_support() {
        let seg = ConvexBody::from_vertices(&[vec![-1.0], vec![1.0]]).unwrap();
        let g = LogConcaveFn::indicator(seg).unwrap();
        let mut last = f64::INFINITY;
        for k in [4.0, 16.0, 64.0, 256.0] {
            let m = mollify(&g, k, &MollifySpec::default()).unwrap();
            let err = (m.function.eval(&[0.5]) - 1.0).abs();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn three_dimensional_monte_carlo_path() {
        let g = LogConcaveFn::isotropic_gaussian(3, 1.0).unwrap();
        let spec = MollifySpec {
            mc_samples: 20_000,
            ..MollifySpec::default()
        };
        let conv = convolve_gaussian(&g, 8.0, &spec).unwrap();
        let v: f64 = 1.0 + 0.25;
        let exact = v.powf(-1.5);
        assert!((conv(&[0.0, 0.0, 0.0]) - exact).abs() < 5e-3);
    }
}

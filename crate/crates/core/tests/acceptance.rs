//! Acceptance criteria, one PASS/FAIL line each. Runs without the test
//! harness so that every line is printed; exits non-zero if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use radial_bodies::ballbody::{ball_gauge, i_p, radial_values, PIndex, QuadratureSpec};
use radial_bodies::geometry::{ConvexBody, DirectionGrid};
use radial_bodies::linalg::norm;
use radial_bodies::logconcave::{mollify, LogConcaveFn, MollifySpec, RayProfile};
use radial_bodies::radialmean::{radial_mean_direct_mc, radial_mean_gauge, RadialMean};
use radial_bodies::verify::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn p(v: f64) -> PIndex {
    PIndex::new(v).unwrap()
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn square() -> ConvexBody {
    ConvexBody::unit_cube(2)
}

fn triangle() -> ConvexBody {
    ConvexBody::from_vertices(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

/// Star-shaped polygon around the origin with `m` seeded vertices.
fn random_polygon(m: usize, seed: u64) -> ConvexBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angles: Vec<f64> = (0..m)
        .map(|i| (i as f64 + rng.gen_range(0.1..0.9)) * std::f64::consts::TAU / m as f64)
        .collect();
    angles.sort_by(f64::total_cmp);
    let pts: Vec<Vec<f64>> = angles
        .iter()
        .map(|a| {
            let r = rng.gen_range(0.5..1.5);
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    ConvexBody::from_vertices(&pts).unwrap()
}

fn unit_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    radial_bodies::geometry::random_unit(dim, rng)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn segment_closed_form() -> Outcome {
    let t = Instant::now();
    let seg = ConvexBody::axis_box(vec![0.0], vec![1.0]).unwrap();
    let ps = [-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 5.0];
    let rm = RadialMean::new(&seg).unwrap();
    let grid = DirectionGrid::standard(1, 2, 0).unwrap();
    let pis: Vec<PIndex> = ps.iter().map(|&v| p(v)).collect();
    let radii = rm.radii(&pis, &grid, &q()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &radii {
        for (&v, &r) in ps.iter().zip(row) {
            let exact = if v == 0.0 {
                (-1.0f64).exp()
            } else {
                (1.0 + v).powf(-1.0 / v)
            };
            worst = worst.max(rel(r, exact));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("worst relative error {worst:.2e}, {secs:.3} s");
    if worst <= 1e-6 && secs < 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn indicator_fixed_point() -> Outcome {
    let k = random_polygon(7, 2024);
    let g = LogConcaveFn::indicator(k.clone()).unwrap();
    let grid = DirectionGrid::standard(2, 64, 0).unwrap();
    let ps = [p(-0.5), p(0.0), p(1.0)];
    let radii = radial_values(&g, &ps, &grid, &q()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (theta, row) in grid.directions.iter().zip(&radii) {
        let exact = k.minkowski_functional(theta);
        for r in row {
            worst = worst.max(rel(1.0 / r, exact));
        }
    }
    let msg = format!("worst relative deviation from the polygon's gauge {worst:.2e}");
    if worst <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn gaussian_radii() -> Outcome {
    let g = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
    let grid = DirectionGrid::standard(2, 64, 0).unwrap();
    let ps = [-0.5, 1.0, 2.0];
    let pis: Vec<PIndex> = ps.iter().map(|&v| p(v)).collect();
    let radii = radial_values(&g, &pis, &grid, &q()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &radii {
        for (&v, &r) in ps.iter().zip(row) {
            let exact = (v * 2f64.powf(v / 2.0 - 1.0) * gamma(v / 2.0)).powf(1.0 / v);
            worst = worst.max(rel(r, exact));
        }
    }
    let msg = format!("worst relative error {worst:.2e} against (p 2^(p/2-1) Gamma(p/2))^(1/p)");
    if worst <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn negative_p_convexity() -> Outcome {
    let t = Instant::now();
    let bodies = [
        ("square", square()),
        ("triangle", triangle()),
        ("random hexagon", random_polygon(6, 77)),
        ("3D cube", ConvexBody::unit_cube(3)),
        ("3D simplex", ConvexBody::standard_simplex(3).unwrap()),
    ];
    let ps = [p(-0.75), p(-0.5), p(-0.25)];
    let mut worst = 0.0f64;
    let mut failed = Vec::new();
    for (i, (name, k)) in bodies.iter().enumerate() {
        let g = LogConcaveFn::covariogram(k).unwrap();
        let reps =
            check_subadditivity_ball(&g, &ps, &q(), 10_000, 100 + i as u64, 1e-5, name).map_err(|e| e.to_string())?;
        for r in reps {
            worst = worst.max(r.worst_violation);
            if !r.pass {
                failed.push(r.instance.clone());
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("worst violation {worst:.2e} over 5 bodies x 3 p x 10^4 pairs, {secs:.1} s");
    if failed.is_empty() && secs < 120.0 {
        Ok(msg)
    } else {
        Err(format!("{msg}; failing: {failed:?}"))
    }
}

fn determinant_inequality() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut failed = 0;
    for f in seeded_quadratic_exponentials(20, 5) {
        for pv in [-0.5, 0.5, 1.0, 2.0] {
            let r = check_det_inequality(&f, pv, 1e-6).map_err(|e| e.to_string())?;
            let scale = r.details["scale"].as_f64().unwrap();
            worst = worst.max(r.details["det"].as_f64().unwrap() / (scale * scale));
            if !r.pass {
                failed += 1;
            }
        }
    }
    let r = check_det_inequality(&Smooth2DFn::gaussian(), 1.0, 1e-6).map_err(|e| e.to_string())?;
    let det = r.details["det"].as_f64().unwrap();
    let err = (det + std::f64::consts::FRAC_PI_2).abs();
    let msg = format!("max det/scale^2 = {worst:.3e} over 80 instances, gaussian det error {err:.1e}");
    if failed == 0 && worst <= 1e-6 && r.pass && err <= 1e-6 {
        Ok(msg)
    } else {
        Err(format!("{msg}; {failed} failing"))
    }
}

fn fubini_equivalence() -> Outcome {
    let bodies = [
        square(),
        triangle(),
        random_polygon(6, 77),
        ConvexBody::unit_cube(3),
        ConvexBody::standard_simplex(3).unwrap(),
    ];
    let ps = [-0.25, 0.0, 0.5, 1.0, 2.0];
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    for i in 0..32 {
        let k = &bodies[i % bodies.len()];
        let pv = p(ps[(i / bodies.len() + i) % ps.len()]);
        let len = rng.gen_range(0.3..1.5);
        let x: Vec<f64> = unit_vec(&mut rng, k.dim()).iter().map(|t| t * len).collect();
        let exact = radial_mean_gauge(k, pv, &x, &q()).map_err(|e| e.to_string())?;
        let mc = radial_mean_direct_mc(k, pv, &x, 1_000_000, 1000 + i as u64).map_err(|e| e.to_string())?;
        worst = worst.max((mc.value - exact).abs() / mc.std_error);
    }
    let msg = format!("largest |MC - quadrature| is {worst:.2} standard errors over 32 instances");
    if worst <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn limits() -> Outcome {
    let grid = DirectionGrid::standard(2, 64, 0).unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, k) in [("square", square()), ("triangle", triangle())] {
        let r = check_limits(&k, &grid, &q(), 0.01, name).map_err(|e| e.to_string())?;
        pass &= r.pass;
        parts.push(format!(
            "{name}: p = 200 vs DK {:.2}%, p = -0.999 vs Vol(K) polar projection body {:.3}%",
            100.0 * r.details["difference_body_deviation"].as_f64().unwrap(),
            100.0 * r.details["polar_projection_deviation"].as_f64().unwrap()
        ));
    }
    let msg = parts.join("; ");
    if pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn monotonicity_and_continuity() -> Outcome {
    let grid = DirectionGrid::standard(2, 64, 0).unwrap();
    let ps: Vec<PIndex> = [-0.9, -0.75, -0.5, -0.25, 0.0, 0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&v| p(v))
        .collect();
    let fns = [
        ("square", LogConcaveFn::covariogram(&square()).unwrap()),
        ("triangle", LogConcaveFn::covariogram(&triangle()).unwrap()),
        (
            "gaussian",
            LogConcaveFn::gaussian(&[vec![1.0, 0.3], vec![0.3, 0.5]]).unwrap(),
        ),
    ];
    let (mut mono, mut zero) = (0.0f64, 0.0f64);
    let mut pass = true;
    for (name, g) in &fns {
        let r = check_monotonicity(g, &ps, &grid, &q(), 1e-7, name).map_err(|e| e.to_string())?;
        mono = mono.max(r.worst_violation);
        pass &= r.pass;
        let r = check_zero_continuity(g, &grid, &q(), 5e-3, name).map_err(|e| e.to_string())?;
        zero = zero.max(r.worst_violation);
        pass &= r.pass;
    }
    let msg = format!("monotonicity violation {mono:.1e}, zero-branch deviation {zero:.2e}");
    if pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn mollification() -> Outcome {
    let ks = [4.0, 16.0, 64.0, 256.0];
    let ps = [p(-0.5), p(1.0)];
    let spec = MollifySpec::default();
    let cases: Vec<(&str, LogConcaveFn, Vec<Vec<f64>>)> = vec![
        (
            "gaussian",
            LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap(),
            vec![vec![1.0, 0.0], vec![0.6, 0.8]],
        ),
        (
            "square covariogram",
            LogConcaveFn::covariogram(&square()).unwrap(),
            vec![vec![1.0, 0.0], vec![0.6, 0.8]],
        ),
        (
            "interval indicator",
            LogConcaveFn::indicator(ConvexBody::axis_box(vec![-1.0], vec![1.0]).unwrap()).unwrap(),
            vec![vec![1.0], vec![-1.0]],
        ),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, g, probes) in &cases {
        let r = check_mollify_convergence(g, &ps, &ks, probes, &q(), &spec, 1e6, name).map_err(|e| e.to_string())?;
        let mut strict = true;
        for per_probe in r.details["errors"].as_array().unwrap() {
            for seq in per_probe.as_array().unwrap() {
                let s = seq.as_array().unwrap();
                strict &= s[s.len() - 1].as_f64().unwrap() < s[0].as_f64().unwrap();
            }
        }
        pass &= r.pass && strict;
        parts.push(format!(
            "{name}: e_256 < e_4 {}",
            if strict { "everywhere" } else { "NOT everywhere" }
        ));
    }
    // closed form: mollifying the variance-1 gaussian gives variance 1 + 2/k
    let g = LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap();
    let mut worst = 0.0f64;
    for &k in &ks {
        let m = mollify(&g, k, &spec).map_err(|e| e.to_string())?;
        for &pv in &[-0.5, 1.0] {
            let c = (pv * 2f64.powf(pv / 2.0 - 1.0) * gamma(pv / 2.0)).powf(1.0 / pv);
            let x = [0.6, 0.8];
            let exact = norm(&x) / ((1.0 + 2.0 / k).sqrt() * c);
            let got = ball_gauge(&m.function, p(pv), &x, &q()).map_err(|e| e.to_string())?;
            worst = worst.max(rel(got, exact));
        }
    }
    pass &= worst <= 1e-4;
    parts.push(format!("gaussian closed form within {worst:.1e}"));
    let msg = parts.join("; ");
    if pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn h_inequality() -> Outcome {
    let fns = [
        LogConcaveFn::gaussian(&[vec![1.0, 0.3], vec![0.3, 0.5]]).unwrap(),
        LogConcaveFn::covariogram(&square()).unwrap(),
        LogConcaveFn::covariogram(&triangle()).unwrap(),
        LogConcaveFn::covariogram(&random_polygon(6, 77)).unwrap(),
        LogConcaveFn::exp_norm(2, 1.5).unwrap(),
    ];
    let ps = [-0.75, -0.5, -0.25, 0.5, 1.0, 2.0, 5.0];
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut failed = Vec::new();
    let mut min_margin = f64::INFINITY;
    for i in 0..100 {
        let g = &fns[i % fns.len()];
        let pv = ps[rng.gen_range(0..ps.len())];
        let len = rng.gen_range(0.2..0.8);
        let u: Vec<f64> = unit_vec(&mut rng, 2).iter().map(|t| t * len).collect();
        let theta = unit_vec(&mut rng, 2);
        let r = check_h_inequality(g, p(pv), &u, &theta, None, &q(), 1e-9, &format!("instance {i}"))
            .map_err(|e| e.to_string())?;
        min_margin = min_margin.min(r.details["margin"].as_f64().unwrap() + r.tolerance);
        if !r.pass {
            failed.push(i);
        }
    }
    let mut collinear_ok = true;
    for (i, g) in fns.iter().enumerate() {
        let u = unit_vec(&mut rng, 2);
        let pv = ps[i % ps.len()];
        let r = check_h_inequality(g, p(pv), &u, &u, None, &q(), 1e-9, "collinear").map_err(|e| e.to_string())?;
        let gap = (r.details["lhs"].as_f64().unwrap() - r.details["rhs"].as_f64().unwrap()).abs();
        collinear_ok &= gap <= r.tolerance;
    }
    let msg = format!(
        "{} of 100 instances pass, collinear equality within stencil error: {collinear_ok}",
        100 - failed.len()
    );
    if failed.is_empty() && collinear_ok {
        Ok(msg)
    } else {
        Err(format!("{msg}; failing {failed:?}"))
    }
}

fn ip_properties() -> Outcome {
    let ps = [-0.9, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0];
    let step = RayProfile::step(1.0, 0.7);
    let r = check_ip_properties(&step, &ps, 10.0, 1e-9, "step").map_err(|e| e.to_string())?;
    let vals: Vec<f64> = r.details["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let constant = vals.iter().all(|v| (v - 0.7).abs() <= 1e-12);
    let i200 = r.details["i_200"].as_f64().unwrap();
    let e = RayProfile::from_fn(|t: f64| (-t).exp(), f64::INFINITY, vec![], Some((1.0, 1.0)));
    let re = check_ip_properties(&e, &ps, 10.0, 1e-9, "exponential").map_err(|e| e.to_string())?;
    // (1 - r)₊ has I_p = (1+p)^{-1/p}, increasing in p across both regimes
    let lin = RayProfile::from_fn(|t: f64| (1.0 - t).max(0.0), 1.0, vec![1.0], None);
    let mut lin_vals = Vec::new();
    for &pv in &ps {
        lin_vals.push(i_p(&lin, pv).map_err(|e| e.to_string())?);
    }
    let lin_ok = lin_vals.windows(2).all(|w| w[0] < w[1])
        && ps
            .iter()
            .zip(&lin_vals)
            .all(|(&pv, v)| rel(*v, (1.0 + pv).powf(-1.0 / pv)) < 1e-9);
    let msg = format!(
        "indicator constant: {constant}, I_200(indicator of [0, 0.7]) = {i200:.12}, exponential escapes: {}, linear increasing: {lin_ok}",
        re.pass
    );
    if r.pass && constant && re.pass && lin_ok && rel(i200, 0.7) <= 0.01 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("segment closed form", segment_closed_form),
        ("indicator fixed point", indicator_fixed_point),
        ("gaussian ball radii", gaussian_radii),
        ("convexity at negative p", negative_p_convexity),
        ("determinant inequality", determinant_inequality),
        ("Fubini equivalence", fubini_equivalence),
        ("limits", limits),
        ("monotonicity and continuity in p", monotonicity_and_continuity),
        ("mollification convergence", mollification),
        ("H-inequality", h_inequality),
        ("I_p properties", ip_properties),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {}: {name} ({msg}) [{secs:.2} s]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({msg}) [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

use std::sync::Arc;

use radial_bodies::ballbody::{PIndex, QuadratureSpec, StarGauge};
use radial_bodies::geometry::{ConvexBody, DirectionGrid, GridScheme};
use radial_bodies::linalg::norm;
use radial_bodies::logconcave::{LogConcaveFn, MollifySpec, RayProfile};
use radial_bodies::verify::*;

fn p(v: f64) -> PIndex {
    PIndex::new(v).unwrap()
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn euclid(dim: usize) -> StarGauge {
    StarGauge::new(dim, Arc::new(|x: &[f64]| Ok(norm(x))))
}

fn square_cov() -> LogConcaveFn {
    LogConcaveFn::covariogram(&ConvexBody::unit_cube(2)).unwrap()
}

fn gauss2() -> LogConcaveFn {
    LogConcaveFn::isotropic_gaussian(2, 1.0).unwrap()
}

#[test]
fn subadditivity_of_euclidean_norm() {
    let r = check_subadditivity(&euclid(3), 5000, 1, 1e-12, "euclidean").unwrap();
    assert!(r.pass);
    assert!(r.worst_violation <= 1e-15);
}

#[test]
fn subadditivity_detects_a_non_convex_gauge() {
    // l^{1/2} quasi-norm: its unit ball is a non-convex astroid-like star body.
    let g = StarGauge::new(
        2,
        Arc::new(|x: &[f64]| Ok((x[0].abs().sqrt() + x[1].abs().sqrt()).powi(2))),
    );
    let r = check_subadditivity(&g, 2000, 3, 1e-6, "l-half").unwrap();
    assert!(!r.pass);
    assert!(!r.witnesses.is_empty());
    assert!(r.worst_violation > 0.1);
}

#[test]
fn subadditivity_reports_non_finite_probes() {
    let g = StarGauge::new(
        2,
        Arc::new(|x: &[f64]| Ok(if x[0] < 0.0 { f64::INFINITY } else { norm(x) })),
    );
    let e = check_subadditivity(&g, 100, 0, 1e-9, "half").unwrap_err();
    assert!(e.to_string().contains("direction"), "{e}");
}

#[test]
fn subadditivity_of_square_ball_body() {
    let g = square_cov();
    let reps = check_subadditivity_ball(&g, &[p(1.0), p(-0.5)], &q(), 2000, 11, 1e-6, "square").unwrap();
    for r in reps {
        assert!(r.pass, "{r:?}");
        assert!(r.worst_violation <= 1e-6);
    }
}

#[test]
fn reports_are_reproducible() {
    let g = square_cov();
    let a = check_subadditivity_ball(&g, &[p(0.5)], &q(), 300, 5, 1e-6, "square").unwrap();
    let b = check_subadditivity_ball(&g, &[p(0.5)], &q(), 300, 5, 1e-6, "square").unwrap();
    assert_eq!(a[0].clone().without_runtime(), b[0].clone().without_runtime());
}

#[test]
fn directional_convexity_examples() {
    let r = check_directional_convexity(&euclid(2), &[1.0, 0.0], &[0.0, 1.0], 1e-3, 1e-16, "euclidean").unwrap();
    let d2 = r.details["second_difference"].as_f64().unwrap();
    assert!((d2 - 1.0).abs() < 1e-5 && r.pass);
    let r = check_directional_convexity(&euclid(2), &[1.0, 1.0], &[0.6, 0.8], 1e-3, 1e-16, "euclidean").unwrap();
    assert!(r.pass);
    let s = 0.5f64.sqrt();
    let r = check_directional_convexity(&euclid(2), &[1.0, 1.0], &[s, s], 1e-3, 1e-16, "collinear").unwrap();
    assert!(r.details["second_difference"].as_f64().unwrap().abs() < 1e-8);
    let g = StarGauge::of_ball_body(&gauss2(), p(-0.5), q());
    let r = check_directional_convexity(&g, &[0.7, -0.2], &[0.6, 0.8], 1e-3, 1e-10, "gaussian").unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn h_inequality_examples() {
    let g = gauss2();
    let r = check_h_inequality(&g, p(2.0), &[1.0, 0.0], &[0.0, 1.0], None, &q(), 1e-9, "gaussian").unwrap();
    assert!(r.pass);
    // H(t) = ρ² / (1 + t²): LHS = -4, RHS = 0.
    let lhs = r.details["lhs"].as_f64().unwrap();
    assert!((lhs + 4.0).abs() < 1e-4, "{lhs}");
    assert!(r.details["margin"].as_f64().unwrap() > 3.9);

    let r = check_h_inequality(&g, p(2.0), &[1.0, 0.0], &[1.0, 0.0], None, &q(), 1e-9, "collinear").unwrap();
    let (lhs, rhs) = (r.details["lhs"].as_f64().unwrap(), r.details["rhs"].as_f64().unwrap());
    // Both sides equal p²(p+1)/|u|² = 12.
    assert!((lhs - 12.0).abs() < 1e-4 && (rhs - 12.0).abs() < 1e-4);
    assert!((lhs - rhs).abs() <= r.tolerance, "{r:?}");

    let sq = square_cov();
    for (u, t) in [([0.3, 0.2], [-0.4, 0.9]), ([-0.5, 0.1], [0.2, 0.3])] {
        let tn = norm(&t);
        let t: Vec<f64> = t.iter().map(|x| x / tn).collect();
        let r = check_h_inequality(&sq, p(-0.5), &u, &t, None, &q(), 1e-9, "square").unwrap();
        assert!(r.pass, "{r:?}");
    }
    assert!(check_h_inequality(&g, p(0.0), &[1.0, 0.0], &[0.0, 1.0], None, &q(), 1e-9, "zero").is_err());
}

#[test]
fn h_inequality_leaving_the_support() {
    let g = LogConcaveFn::indicator(ConvexBody::unit_cube(2)).unwrap();
    // the stencil crosses into directions where the gauge is infinite
    assert!(check_h_inequality(&g, p(1.0), &[1.0, 0.0], &[0.0, 1.0], Some(0.1), &q(), 1e-9, "corner").is_err());
}

#[test]
fn monotonicity_examples() {
    let seg = LogConcaveFn::covariogram(&ConvexBody::axis_box(vec![0.0], vec![1.0]).unwrap()).unwrap();
    let grid = DirectionGrid::new(1, GridScheme::UniformAngle, 2, 0).unwrap();
    let ps: Vec<PIndex> = [5.0, -0.5, 1.0, 0.0, -0.9].iter().map(|&v| p(v)).collect();
    let r = check_monotonicity(&seg, &ps, &grid, &q(), 1e-9, "segment").unwrap();
    assert!(r.pass, "{r:?}");
    let r = check_monotonicity(
        &gauss2(),
        &[p(1.0), p(2.0)],
        &DirectionGrid::standard(2, 16, 0).unwrap(),
        &q(),
        1e-9,
        "gaussian",
    )
    .unwrap();
    assert!(r.pass);
    let ind = LogConcaveFn::indicator(ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap()).unwrap();
    let r = check_monotonicity(
        &ind,
        &[p(-0.5), p(1.0), p(3.0)],
        &DirectionGrid::standard(2, 16, 0).unwrap(),
        &q(),
        1e-9,
        "disc",
    )
    .unwrap();
    assert!(r.pass && r.worst_violation <= 1e-12);
}

#[test]
fn zero_continuity_on_square() {
    let grid = DirectionGrid::standard(2, 32, 0).unwrap();
    let r = check_zero_continuity(&square_cov(), &grid, &q(), 5e-3, "square").unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn limits_on_a_segment() {
    let seg = ConvexBody::axis_box(vec![0.0], vec![1.0]).unwrap();
    let grid = DirectionGrid::new(1, GridScheme::UniformAngle, 2, 0).unwrap();
    let r = check_limits(&seg, &grid, &q(), 0.01, "segment").unwrap();
    // (1+p)^{-1/p} at p = 200 is 0.9738, so the upper limit is still 2.6% short of DK.
    let up = r.details["difference_body_deviation"].as_f64().unwrap();
    assert!((up - (1.0 - 201f64.powf(-1.0 / 200.0))).abs() < 1e-6, "{up}");
    let low = r.details["polar_projection_deviation"].as_f64().unwrap();
    assert!(low < 1e-3, "{low}");
    assert_eq!(r.pass, up <= 0.01 && low <= 0.01);
}

#[test]
fn ip_properties_examples() {
    let r = check_ip_properties(&RayProfile::step(1.0, 0.7), &[-0.5, 0.5, 1.0, 2.0], 10.0, 1e-9, "step").unwrap();
    assert!(r.pass, "{r:?}");
    let e = RayProfile::from_fn(|r: f64| (-r).exp(), f64::INFINITY, vec![], Some((1.0, 1.0)));
    let r = check_ip_properties(&e, &[-0.5, 1.0, 2.0, 5.0], 10.0, 1e-9, "exp").unwrap();
    assert!(r.pass, "{r:?}");
    let vals = r.details["values"].as_array().unwrap();
    assert!((vals[1].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((vals[2].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
    // (1 - r)₊: I_200 = 201^{-1/200} is 2.6% below the support end.
    let lin = RayProfile::from_fn(|r: f64| (1.0 - r).max(0.0), 1.0, vec![1.0], None);
    let r = check_ip_properties(&lin, &[-0.5, 1.0, 2.0], 10.0, 1e-9, "linear").unwrap();
    assert!(!r.pass);
    assert!((r.details["i_200"].as_f64().unwrap() - 201f64.powf(-1.0 / 200.0)).abs() < 1e-6);
}

#[test]
fn boundary_infinity_at_a_vertex() {
    let g = LogConcaveFn::indicator(ConvexBody::unit_cube(2)).unwrap();
    let dirs = vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
    let r = check_boundary_infinity(&g, &dirs, &[p(-0.5), p(1.0)], &q(), "corner").unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.witnesses.len(), 2);
    assert_eq!(r.details["not_asserted"].as_array().unwrap().len(), 4);
}

#[test]
fn mollification_of_an_interval() {
    let g = LogConcaveFn::indicator(ConvexBody::axis_box(vec![-1.0], vec![1.0]).unwrap()).unwrap();
    let r = check_mollify_convergence(
        &g,
        &[p(-0.5)],
        &[4.0, 16.0, 64.0, 256.0],
        &[vec![1.0]],
        &q(),
        &MollifySpec::default(),
        1e6,
        "interval",
    )
    .unwrap();
    assert!(r.pass, "{r:?}");
    let seq: Vec<f64> = r.details["errors"][0][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    // closed-form erf profile integrated with an independent quadrature; the
    // error rises between k = 4 and k = 16 before decaying
    let oracle = [0.093435042, 0.127906846, 0.025460875, 0.005971791];
    for (e, o) in seq.iter().zip(oracle) {
        assert!((e - o).abs() < 1e-5, "{seq:?}");
    }
    assert!(seq[1..].windows(2).all(|w| w[1] < w[0]), "{seq:?}");
}

#[test]
fn suite_round_trip_and_errors() {
    let suite = default_suite();
    let text = serde_json::to_string(&suite).unwrap();
    assert_eq!(parse_suite(&text).unwrap(), suite);
    let bad = SuiteEntry {
        check: "nope".into(),
        instance: serde_json::json!({}),
        tolerance: None,
        seed: None,
    };
    assert!(run_entry(&bad, 0).is_err());
    let e = SuiteEntry {
        check: "ip-properties".into(),
        instance: serde_json::json!({ "profile": { "kind": "step", "height": 1.0, "end": 0.7 }, "p": [1.0, 2.0] }),
        tolerance: None,
        seed: Some(9),
    };
    let r = run_entry(&e, 0).unwrap();
    assert_eq!(r[0].seed, 9);
    assert!(r[0].pass);
}

#[test]
fn shipped_default_suite_file_matches() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../default.json")).unwrap();
    assert_eq!(parse_suite(&text).unwrap(), default_suite());
}

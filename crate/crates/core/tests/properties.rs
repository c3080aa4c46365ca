use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use radial_bodies::ballbody::{ball_gauge, i_p, PIndex, QuadratureSpec};
use radial_bodies::geometry::{ConvexBody, Covariogram};
use radial_bodies::logconcave::{LogConcaveFn, RayProfile};
use radial_bodies::radialmean::radial_mean_gauge;

fn polygon(seed: u64) -> ConvexBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(3..9);
    let pts: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let a = (i as f64 + rng.gen_range(0.1..0.9)) * std::f64::consts::TAU / m as f64;
            let r = rng.gen_range(0.5..1.5);
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    ConvexBody::from_vertices(&pts).unwrap()
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::TAU, 0.05f64..2.0).prop_map(|(a, r)| vec![r * a.cos(), r * a.sin()])
}

fn p_value() -> impl Strategy<Value = f64> {
    prop_oneof![-0.9f64..-0.01, 0.01f64..8.0, Just(0.0)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauge_is_homogeneous(seed in any::<u64>(), x in point(), p in p_value(), lambda in 0.1f64..10.0) {
        let g = LogConcaveFn::covariogram(&polygon(seed)).unwrap();
        let p = PIndex::new(p).unwrap();
        let q = QuadratureSpec::default();
        let a = ball_gauge(&g, p, &x, &q).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let b = ball_gauge(&g, p, &xs, &q).unwrap();
        prop_assert!((b - lambda * a).abs() <= 1e-10 * b);
    }

    #[test]
    fn gaussian_gauge_is_homogeneous(x in point(), p in p_value(), lambda in 0.1f64..10.0) {
        let g = LogConcaveFn::gaussian(&[vec![1.0, 0.4], vec![0.4, 0.7]]).unwrap();
        let p = PIndex::new(p).unwrap();
        let q = QuadratureSpec::default();
        let a = ball_gauge(&g, p, &x, &q).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let b = ball_gauge(&g, p, &xs, &q).unwrap();
        prop_assert!((b - lambda * a).abs() <= 1e-9 * b);
    }

    #[test]
    fn gauge_decreases_in_p(seed in any::<u64>(), x in point(), p in -0.9f64..5.0, dp in 0.05f64..3.0) {
        let g = LogConcaveFn::covariogram(&polygon(seed)).unwrap();
        let q = QuadratureSpec::default();
        let lo = ball_gauge(&g, PIndex::new(p).unwrap(), &x, &q).unwrap();
        let hi = ball_gauge(&g, PIndex::new(p + dp).unwrap(), &x, &q).unwrap();
        prop_assert!(lo >= hi * (1.0 - 1e-9));
        prop_assert!(hi > 0.0 && lo.is_finite());
    }

    #[test]
    fn covariogram_is_even(seed in any::<u64>(), x in point()) {
        let cov = Covariogram::new(&polygon(seed)).unwrap();
        let mx: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((cov.eval(&x) - cov.eval(&mx)).abs() <= 1e-10 * cov.volume());
    }

    #[test]
    fn covariogram_is_log_concave(seed in any::<u64>(), x in point(), y in point()) {
        let cov = Covariogram::new(&polygon(seed)).unwrap();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let v = cov.volume();
        let lhs = cov.eval(&mid).powi(2) / (v * v);
        let rhs = cov.eval(&x) * cov.eval(&y) / (v * v);
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn radial_mean_body_is_symmetric(seed in any::<u64>(), x in point(), p in p_value()) {
        let k = polygon(seed);
        let p = PIndex::new(p).unwrap();
        let q = QuadratureSpec::default();
        let a = radial_mean_gauge(&k, p, &x, &q).unwrap();
        let mx: Vec<f64> = x.iter().map(|v| -v).collect();
        let b = radial_mean_gauge(&k, p, &mx, &q).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn i_p_increases_for_power_profiles(m in 1u32..5, p in -0.9f64..6.0, dp in 0.05f64..2.0) {
        prop_assume!(p.abs() > 1e-2 && (p + dp).abs() > 1e-2);
        let psi = RayProfile::from_fn(move |r: f64| (1.0 - r).max(0.0).powi(m as i32), 1.0, vec![], None);
        let lo = i_p(&psi, p).unwrap();
        let hi = i_p(&psi, p + dp).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-9));
    }
}

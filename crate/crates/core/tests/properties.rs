use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

mod common;
use common::{close, config, fd1, oracle_errors, positive_profile, profile};

use warpbench::catalog;
use warpbench::geometry::{warped_scalar, BaseAnsatz, FiberData};
use warpbench::oracle::FdOracle;
use warpbench::profiles::{CompositeOp, Profile};
use warpbench::system::{
    classify_degeneracy, full_metric, residual_ode1, residual_ode2, residual_ode3, Params,
    WarpedAnsatz,
};
use warpbench::Result;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn jets_match_central_differences(kind in 0u8..9, a in -2.0f64..2.0, k in -1.5f64..1.5, x in -1.2f64..1.2) {
        let p = profile(kind, a, k);
        let j = p.eval_jet2(x).unwrap();
        let (d1, d2) = fd1(&p, x);
        prop_assert!(close(j.d1, d1, 1e-6), "d1 {} vs {}", j.d1, d1);
        prop_assert!(close(j.d2, d2, 1e-6), "d2 {} vs {}", j.d2, d2);
    }

    #[test]
    fn composite_jets_match_central_differences(
        k1 in 0u8..9, k2 in 0u8..4, a in -2.0f64..2.0, b in -1.0f64..1.0, x in -1.2f64..1.2, e in -1.5f64..2.5,
    ) {
        let p = profile(k1, a, b);
        let q = positive_profile(k2, a, b);
        for c in [
            Profile::composite(CompositeOp::Quotient(Box::new(p.clone()), Box::new(q.clone()))).unwrap(),
            q.pow(e),
            q.ln(),
            p.exp_of(),
            p.plus(&q).scaled(-0.7),
        ] {
            let j = c.eval_jet2(x).unwrap();
            let (d1, d2) = fd1(&c, x);
            prop_assert!(close(j.d1, d1, 1e-6));
            prop_assert!(close(j.d2, d2, 1e-6));
        }
    }

    #[test]
    fn leibniz_rule(k1 in 0u8..9, k2 in 0u8..9, a in -2.0f64..2.0, b in -1.5f64..1.5, x in -1.2f64..1.2) {
        let p = profile(k1, a, b);
        let q = profile(k2, b, a.clamp(-1.5, 1.5));
        let (jp, jq) = (p.eval_jet2(x).unwrap(), q.eval_jet2(x).unwrap());
        let j = p.times(&q).eval_jet2(x).unwrap();
        prop_assert!(close(j.value, jp.value * jq.value, 1e-12));
        prop_assert!(close(j.d1, jp.d1 * jq.value + jp.value * jq.d1, 1e-12));
        prop_assert!(close(j.d2, jp.d2 * jq.value + 2.0 * jp.d1 * jq.d1 + jp.value * jq.d2, 1e-12));
    }

    #[test]
    fn lambda_shift_covariance(idx in 0usize..7, c in -3.0f64..3.0, t in 0.0f64..1.0) {
        let e = catalog::entry(catalog::IDS[idx]).unwrap();
        let a = &e.ansatz;
        let x = e.grid.min + t * (e.grid.max - e.grid.min);
        let shifted = a.with_lambda(a.lambda.plus(&Profile::constant(c)));
        let ab = a.base.alpha_bar_norm_sq;
        prop_assert_eq!(residual_ode1(&shifted, x).unwrap(), residual_ode1(a, x).unwrap());
        for fis in [true, false] {
            let d2 = residual_ode2(&shifted, x, fis).unwrap() - residual_ode2(a, x, fis).unwrap();
            let d3 = residual_ode3(&shifted, x, fis).unwrap() - residual_ode3(a, x, fis).unwrap();
            prop_assert!((d2 + c / ab).abs() < 1e-12 * (1.0 + c.abs()));
            prop_assert!((d3 + c / ab).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn degeneracy_is_scale_and_sign_invariant(
        alpha in -4i32..5, beta in -4i32..5, mu in -4i32..5, rho in -3.0f64..3.0, d in 3usize..8, s in -6i32..7,
    ) {
        prop_assume!(alpha != 0 || beta != 0 || mu != 0);
        let p = Params::new(alpha as f64, beta as f64, mu as f64, rho).unwrap();
        let t = 2f64.powi(s);
        let scaled = Params::new(t * p.alpha, t * p.beta, t * p.mu, rho).unwrap();
        let flipped = Params::new(p.alpha, -p.beta, p.mu, rho + 1.0).unwrap();
        let label = classify_degeneracy(&p, d);
        prop_assert_eq!(classify_degeneracy(&scaled, d), label);
        prop_assert_eq!(classify_degeneracy(&flipped, d), label);
        let expected_degenerate = beta != 0 && beta * beta == (d as i32 - 2) * alpha * mu;
        prop_assert_eq!(label == warpbench::system::Degeneracy::Degenerate, expected_degenerate);
    }
}

#[test]
fn geometry_matches_oracle_on_random_configurations() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..50 {
        let c = config(&mut rng);
        for (op, err) in oracle_errors(&c) {
            assert!(err < 1e-4, "case {case}: {op} off by {err}");
        }
    }
}

#[test]
fn warped_scalar_matches_oracle_on_random_configurations() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xface);
    for case in 0..50 {
        let n = rng.gen_range(2..=3);
        let m = rng.gen_range(1..=2);
        let base = BaseAnsatz::new(
            n,
            rng.gen_range(0.5..2.0),
            positive_profile(
                rng.gen_range(0..4),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.8..0.8),
            ),
        )
        .unwrap();
        let fiber = match (m, rng.gen_range(0..3)) {
            (_, 0) | (1, _) => FiberData::euclidean(m),
            (_, 1) => FiberData::sphere(m),
            _ => FiberData::hyperbolic(m),
        }
        .unwrap();
        let f = positive_profile(
            rng.gen_range(0..4),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.8..0.8),
        );
        let a = WarpedAnsatz::new(
            base,
            fiber,
            f,
            Profile::constant(0.0),
            Profile::constant(0.0),
            Params::new(1.0, 1.0, 0.0, 0.0).unwrap(),
        )
        .unwrap();
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        x.extend((0..m).map(|_| rng.gen_range(-0.3..0.3)));
        let metric = |p: &[f64]| full_metric(&a, p);
        let oracle = FdOracle::new(&metric, n + m);
        let s = a.base.alpha_bar_norm_sq.sqrt() * x[n - 1];
        let err = (warped_scalar(&a, s, true).unwrap() - oracle.scalar(&x).unwrap()).abs();
        assert!(err < 1e-4, "case {case}: scalar {err}");
    }
}

#[test]
fn oracle_gradient_is_consistent() {
    // sanity for the oracle itself on a flat metric
    let metric = |_: &[f64]| -> Result<DMatrix<f64>> { Ok(DMatrix::identity(2, 2)) };
    let o = FdOracle::new(&metric, 2);
    let phi = |x: &[f64]| -> Result<f64> { Ok(x[0] * x[0] + 3.0 * x[1]) };
    let g = o.gradient(&phi, &[1.0, 0.0]).unwrap();
    assert!((g - DVector::from_vec(vec![2.0, 3.0])).abs().max() < 1e-8);
}

use logsmooth::logarithm::{
    default_schedule, log_apply, log_apply_diagonal, make_mixed_smooth_element,
    rescale_for_unshifted, shifted_log_resolvent_power, LaplaceQuadrature, SourceCondition,
};
use logsmooth::loworder::{sample_u_log, LogExampleParams};
use logsmooth::{DiscreteOperator, GridFunction, NormKind};
use proptest::prelude::*;

fn exp_model(modes: usize) -> DiscreteOperator {
    let sigma = (0..modes).map(|k| (-(k as f64)).exp()).collect();
    DiscreteOperator::diagonal(sigma, NormKind::Sup).unwrap()
}

fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    a.distance(b).unwrap() / b.norm()
}

#[test]
fn diagonal_resolvent_powers_match_closed_form() {
    let op = exp_model(60);
    let w = op.vector(vec![1.0; 60]).unwrap();
    for (lambda, nu) in [(1.0, 1), (1.0, 2), (0.25, 3), (3.0, 1)] {
        let quad = LaplaceQuadrature::new(lambda, op.omega()).unwrap();
        let v = shifted_log_resolvent_power(&op, lambda, nu, &w, &quad).unwrap();
        let oracle = op
            .vector(
                (0..60)
                    .map(|k| (lambda + k as f64).powi(-(nu as i32)))
                    .collect(),
            )
            .unwrap();
        assert!(
            rel(&v, &oracle) <= 1e-8,
            "lambda {lambda} nu {nu}: {:e}",
            rel(&v, &oracle)
        );
    }
}

#[test]
fn unit_vector_maps_to_scaled_unit_vector() {
    let op = exp_model(30);
    for k in [0usize, 3, 17] {
        let mut e = vec![0.0; 30];
        e[k] = 1.0;
        let e = op.vector(e).unwrap();
        let quad = LaplaceQuadrature::new(1.0, op.omega()).unwrap();
        let v = shifted_log_resolvent_power(&op, 1.0, 1, &e, &quad).unwrap();
        let expected = 1.0 / (1.0 + k as f64);
        for (j, x) in v.values().iter().enumerate() {
            let target = if j == k { expected } else { 0.0 };
            assert!((x - target).abs() <= 1e-10 * expected);
        }
    }
}

#[test]
fn second_power_is_first_power_twice_on_diagonal() {
    let op = exp_model(60);
    let w = op
        .vector((0..60).map(|k| (k as f64 * 0.4).cos()).collect())
        .unwrap();
    let quad = LaplaceQuadrature::new(1.5, op.omega()).unwrap();
    let two = shifted_log_resolvent_power(&op, 1.5, 2, &w, &quad).unwrap();
    let once = shifted_log_resolvent_power(&op, 1.5, 1, &w, &quad).unwrap();
    let twice = shifted_log_resolvent_power(&op, 1.5, 1, &once, &quad).unwrap();
    assert!(rel(&twice, &two) <= 1e-8);
}

#[test]
fn composition_defect_shrinks_under_refinement_on_integration_kind() {
    let defect = |n: usize| {
        let op = DiscreteOperator::integration(n, NormKind::Sup).unwrap();
        let lambda = op.omega() + 1.0;
        let quad = LaplaceQuadrature::new(lambda, op.omega()).unwrap();
        let w = op.sample(|x| x);
        let two = shifted_log_resolvent_power(&op, lambda, 2, &w, &quad).unwrap();
        let once = shifted_log_resolvent_power(&op, lambda, 1, &w, &quad).unwrap();
        let twice = shifted_log_resolvent_power(&op, lambda, 1, &once, &quad).unwrap();
        rel(&twice, &two)
    };
    let (coarse, fine) = (defect(64), defect(256));
    assert!(fine < coarse, "{coarse:e} {fine:e}");
    assert!(fine <= 1e-3);
}

#[test]
fn inverse_consistency_on_diagonal() {
    let op = exp_model(40);
    let w = op
        .vector((0..40).map(|k| 1.0 / (k as f64 + 1.0)).collect())
        .unwrap();
    let lambda = 0.7;
    let quad = LaplaceQuadrature::new(lambda, op.omega()).unwrap();
    let v = shifted_log_resolvent_power(&op, lambda, 1, &w, &quad).unwrap();
    let back = v
        .scale(lambda)
        .sub(&log_apply_diagonal(&op, &v).unwrap())
        .unwrap();
    assert!(rel(&back, &w) <= 1e-8);
}

#[test]
fn mixed_element_matches_closed_form() {
    let op = exp_model(60);
    let w = op.vector(vec![1.0; 60]).unwrap();
    for (p, nu) in [(0.5, 1), (0.0, 2), (1.5, 1)] {
        let sc = SourceCondition::new(&op, p, nu, 1.0, w.clone()).unwrap();
        let u = make_mixed_smooth_element(&op, &sc).unwrap();
        let oracle = op
            .vector(
                (0..60)
                    .map(|k| {
                        let k = k as f64;
                        (-k * p).exp() * (1.0 + k).powi(-(nu as i32))
                    })
                    .collect(),
            )
            .unwrap();
        assert!(rel(&u, &oracle) <= 1e-8, "p {p} nu {nu}");
    }
}

#[test]
fn source_condition_validation() {
    let op = exp_model(4);
    let w = op.vector(vec![1.0; 4]).unwrap();
    assert!(SourceCondition::new(&op, -0.1, 1, 1.0, w.clone()).is_err());
    assert!(SourceCondition::new(&op, 0.0, 0, 1.0, w.clone()).is_err());
    assert!(SourceCondition::new(&op, 0.0, 1, 0.0, w.clone()).is_err());
    assert!(SourceCondition::new(&op, 0.0, 1, 0.5, w).is_ok());
    assert!(LaplaceQuadrature::new(0.0, 0.0).is_err());
}

#[test]
fn log_apply_recovers_diagonal_logarithm() {
    let op = exp_model(20);
    let u = op
        .vector((0..20).map(|k| 0.5f64.powi(k)).collect())
        .unwrap();
    let (v, rep) = log_apply(&op, &u, &default_schedule()).unwrap();
    let exact = log_apply_diagonal(&op, &u).unwrap();
    assert!(rel(&v, &exact) <= 1e-4);
    assert!(rep.cauchy);
}

#[test]
fn constant_function_is_not_in_the_domain() {
    let op = DiscreteOperator::integration(256, NormKind::Sup).unwrap();
    let (_, rep) = log_apply(&op, &op.sample(|_| 1.0), &default_schedule()).unwrap();
    assert!(!rep.cauchy, "{rep:?}");
}

#[test]
fn smooth_element_vanishing_at_zero_is_in_the_domain() {
    let op = DiscreteOperator::integration(256, NormKind::Sup).unwrap();
    let (_, rep) = log_apply(&op, &op.sample(|x| x), &default_schedule()).unwrap();
    assert!(rep.cauchy, "{rep:?}");
    let params = LogExampleParams::new(0.5, 2.0).unwrap();
    let u = sample_u_log(&params, 256).unwrap();
    let (_, rep) = log_apply(&op, &u, &default_schedule()).unwrap();
    assert!(rep.cauchy, "{rep:?}");
}

#[test]
fn rescaling_shifts_logarithm_by_constant() {
    let op = exp_model(30);
    let (scaled, a) = rescale_for_unshifted(&op).unwrap();
    assert!((scaled.op_norm() - 0.5).abs() <= 1e-15);
    assert!(scaled.omega() < 0.0);
    let u = op
        .vector((0..30).map(|k| (k as f64).sin() + 2.0).collect())
        .unwrap();
    let lhs = log_apply_diagonal(&scaled, &u).unwrap();
    let rhs = log_apply_diagonal(&op, &u)
        .unwrap()
        .lincomb(1.0, &u, a.ln())
        .unwrap();
    assert!(lhs.distance(&rhs).unwrap() <= 1e-10 * rhs.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scalar_resolvent_power_closed_form(
        log_s in -20.0f64..0.0,
        offset in 0.1f64..5.0,
        nu in 1u32..4,
    ) {
        let op = DiscreteOperator::diagonal(vec![log_s.exp()], NormKind::Sup).unwrap();
        let lambda = op.omega() + offset;
        let w = op.vector(vec![1.0]).unwrap();
        let quad = LaplaceQuadrature::new(lambda, op.omega()).unwrap();
        let v = shifted_log_resolvent_power(&op, lambda, nu, &w, &quad).unwrap();
        let exact = (lambda - log_s).powi(-(nu as i32));
        prop_assert!((v.values()[0] - exact).abs() <= 1e-8 * exact);
    }

    #[test]
    fn resolvent_power_is_linear(
        w1 in prop::collection::vec(-1.0f64..1.0, 33),
        w2 in prop::collection::vec(-1.0f64..1.0, 33),
        b in -2.0f64..2.0,
    ) {
        let op = DiscreteOperator::integration(32, NormKind::Sup).unwrap();
        let lambda = op.omega() + 1.0;
        let quad = LaplaceQuadrature::new(lambda, op.omega()).unwrap();
        let w1 = op.vector(w1).unwrap();
        let w2 = op.vector(w2).unwrap();
        let lhs = shifted_log_resolvent_power(&op, lambda, 1, &w1.lincomb(1.0, &w2, b).unwrap(), &quad).unwrap();
        let rhs = shifted_log_resolvent_power(&op, lambda, 1, &w1, &quad).unwrap()
            .lincomb(1.0, &shifted_log_resolvent_power(&op, lambda, 1, &w2, &quad).unwrap(), b).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * (1.0 + lhs.norm()));
    }
}

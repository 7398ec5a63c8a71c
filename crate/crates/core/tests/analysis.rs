use friendly_core::analysis::{condensation_verdict, layer_mass_profile, Method};
use friendly_core::ifs::systems;
use friendly_core::{
    classify_sum, cover_cost, dimension_bound, hs_upper_bound, predict_hausdorff_null, predict_measure_zero, Prediction,
    PsiFunction, SumKind, SumSpec, Trivalent,
};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = u8> {
    0u8..3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn closed_form_and_condensation_agree_away_from_the_boundary(
        d in 1usize..=2,
        tau in 0.0f64..4.0,
        beta in 0.0f64..4.0,
        alpha_frac in 0.05f64..1.0,
        delta_frac in 0.05f64..1.0,
        s_frac in 0.0f64..1.0,
        kind in kind_strategy(),
    ) {
        let delta = delta_frac * d as f64;
        let alpha = alpha_frac * d as f64;
        let kind = match kind {
            0 => SumKind::Lebesgue,
            1 => SumKind::Theorem1,
            _ => SumKind::Theorem2 { s: s_frac * delta },
        };
        let psi = PsiFunction::generic_power_log(tau, beta, d).unwrap();
        let spec = SumSpec::new(kind, psi, alpha, delta, d).unwrap();
        let closed = classify_sum(&spec);
        prop_assume!(closed.margin.unwrap() > 0.05);
        let numeric = condensation_verdict(&spec);
        prop_assert_eq!(closed.converges, numeric.converges, "closed {:?} numeric {:?}", closed.method, numeric.method);
    }

    #[test]
    fn theorem1_term_is_the_lebesgue_term_on_the_line(tau in 0.5f64..5.0, beta in 0.0f64..3.0, r in 1.0f64..1e6) {
        let psi = PsiFunction::generic_power_log(tau, beta, 1).unwrap();
        let t1 = SumSpec::new(SumKind::Theorem1, psi.clone(), 1.0, 1.0, 1).unwrap();
        let leb = SumSpec::new(SumKind::Lebesgue, psi.clone(), 1.0, 1.0, 1).unwrap();
        let direct = r * psi.eval(r);
        prop_assert!((t1.term(r) - leb.term(r)).abs() <= 1e-12 * direct.max(f64::MIN_POSITIVE));
        prop_assert!((t1.term(r) - direct).abs() <= 1e-9 * direct.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn cover_cost_is_monotone_in_s(radii in prop::collection::vec(1e-6f64..0.1, 1..50), s1 in 0.0f64..1.0, ds in 0.0f64..1.0) {
        let a = cover_cost(s1, 0.1, radii.clone()).unwrap();
        let b = cover_cost(s1 + ds, 0.1, radii).unwrap();
        prop_assert!(b.cost <= a.cost * (1.0 + 1e-12));
    }
}

#[test]
fn the_two_worked_examples_converge() {
    let sys = systems::cantor();
    let (delta, d) = (sys.delta(), 1);
    // tau above (d+1)/d
    let psi = PsiFunction::power(2.2, d).unwrap();
    let spec = SumSpec::new(SumKind::Theorem1, psi, delta, delta, d).unwrap();
    assert_eq!(classify_sum(&spec).converges, Trivalent::Yes);
    assert_eq!(predict_measure_zero(&spec).unwrap(), Prediction::Null);
    // Dirichlet exponent with a log factor, beta above 1/alpha
    let psi = PsiFunction::power_log(1.1 / delta, d).unwrap();
    let spec = SumSpec::new(SumKind::Theorem1, psi, delta, delta, d).unwrap();
    let v = classify_sum(&spec);
    assert_eq!(v.converges, Trivalent::Yes);
    assert!(matches!(v.method, Method::ClosedForm { a, .. } if (a + 1.0).abs() < 1e-12));
    // and just below 1/alpha it diverges
    let psi = PsiFunction::power_log(0.9 / delta, d).unwrap();
    let spec = SumSpec::new(SumKind::Theorem1, psi, delta, delta, d).unwrap();
    assert_eq!(classify_sum(&spec).converges, Trivalent::No);
    assert_eq!(predict_measure_zero(&spec).unwrap(), Prediction::NoConclusion);
}

#[test]
fn hausdorff_prediction_at_the_dimension_bound() {
    let sys = systems::cantor();
    let delta = sys.delta();
    for tau in [3.0, 4.0] {
        let bound = dimension_bound(delta, delta, 1, tau).unwrap();
        let psi = PsiFunction::power(tau, 1).unwrap();
        let above = SumSpec::new(SumKind::Theorem2 { s: bound + 0.01 }, psi.clone(), delta, delta, 1).unwrap();
        let below = SumSpec::new(SumKind::Theorem2 { s: bound - 0.01 }, psi, delta, delta, 1).unwrap();
        assert_eq!(predict_hausdorff_null(&above).unwrap(), Prediction::Null);
        assert_eq!(predict_hausdorff_null(&below).unwrap(), Prediction::NoConclusion);
    }
}

#[test]
fn cover_cost_tail_decreases_when_the_sum_converges() {
    let sys = systems::cantor();
    let delta = sys.delta();
    let psi = PsiFunction::power(3.0, 1).unwrap();
    let spec = SumSpec::new(SumKind::Theorem2 { s: delta }, psi.clone(), delta, delta, 1).unwrap();
    assert_eq!(classify_sum(&spec).converges, Trivalent::Yes);
    let hs = hs_upper_bound(&sys, &psi, delta, 1, 10).unwrap();
    assert!(hs.tails.len() >= 4, "{:?}", hs.below_threshold);
    for w in hs.tails.windows(2) {
        assert!(w[1].1 < w[0].1, "tail not decreasing: {:?}", hs.tails);
    }
    let (first, last) = (hs.tails[0].1, hs.tails.last().unwrap().1);
    assert!(last < first / 2.0, "first {first} last {last}");
}

#[test]
fn layer_masses_stay_under_the_envelope_on_the_gasket() {
    let sys = systems::sierpinski_gasket();
    let alpha = sys.delta() - 1.0;
    let psi = PsiFunction::power(2.5, 2).unwrap();
    let p = layer_mass_profile(&sys, &psi, alpha, (1, 6), 20_000, 3).unwrap();
    assert!(p.predicted_slope < 0.0);
    for row in &p.rows {
        assert!(row.mass <= 10.0 * row.envelope, "{row:?}");
    }
}

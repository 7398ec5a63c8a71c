use friendly_core::{is_psi_approximable, layer_membership, ApproxLayer, AxisBox, PsiFunction, Window};
use proptest::prelude::*;

fn unit_layer(n: u32, psi: &PsiFunction) -> ApproxLayer {
    ApproxLayer::new(n, Window::Box(AxisBox::unit(psi.d())), psi.clone()).unwrap()
}

/// Brute force over every numerator: is some `p/q`, `q` in block `n`,
/// within `radius(q)` of `x`?
fn brute_1d(x: f64, n: u32, radius: impl Fn(f64) -> f64) -> bool {
    (1u64 << n..2u64 << n).any(|q| (0..=q).any(|p| (x - p as f64 / q as f64).abs() <= radius(q as f64)))
}

#[test]
fn rounding_finds_the_nearest_numerator() {
    // blocks 0..=7 cover q <= 255; one more block reaches 256
    let psi = PsiFunction::power(1.2, 1).unwrap();
    for n in 0..=8u32 {
        let layer = unit_layer(n, &psi);
        for i in 0..10_000 {
            let x = (i as f64 + 0.5) / 10_000.0;
            let fast = layer_membership(&[x], &layer).unwrap().is_some();
            assert_eq!(fast, brute_1d(x, n, |q| psi.eval(q)), "x={x} n={n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sup_norm_hits_and_layers_nest(
        x in prop::collection::vec(0.0f64..1.0, 2),
        tau in 1.5f64..3.0,
        big_n in 2u32..=7,
    ) {
        let d = 2;
        let psi = PsiFunction::power(tau, d).unwrap();
        let inflated = psi.scaled((d as f64).sqrt()).unwrap();
        let q_max = (2u64 << big_n) - 1;
        let in_some_layer = |p: &PsiFunction| (0..=big_n).any(|n| layer_membership(&x, &unit_layer(n, p)).unwrap().is_some());
        // sup-norm hit within psi => Euclidean hit within sqrt(d) psi
        if is_psi_approximable(&x, &psi, q_max).unwrap().hit_count > 0 {
            prop_assert!(in_some_layer(&psi));
        }
        // Euclidean hit within sqrt(d) psi => sup-norm hit within sqrt(d) psi
        if in_some_layer(&psi) {
            prop_assert!(is_psi_approximable(&x, &inflated, q_max).unwrap().hit_count > 0);
        }
    }

    #[test]
    fn layers_grow_with_psi(
        x in prop::collection::vec(0.0f64..1.0, 2),
        tau in 1.5f64..4.0,
        k in 1.0f64..5.0,
        n in 0u32..=7,
    ) {
        let psi = PsiFunction::power(tau, 2).unwrap();
        let bigger = psi.scaled(k).unwrap();
        if layer_membership(&x, &unit_layer(n, &psi)).unwrap().is_some() {
            prop_assert!(layer_membership(&x, &unit_layer(n, &bigger)).unwrap().is_some());
        }
    }

    #[test]
    fn dirichlet_exponent_always_hits(x in prop::collection::vec(0.0f64..1.0, 2), d in 1usize..=2) {
        let psi = PsiFunction::power((d as f64 + 1.0) / d as f64, d).unwrap();
        let report = is_psi_approximable(&x[..d], &psi, 1000).unwrap();
        prop_assert!(report.hit_count > 0);
    }
}

#[test]
fn witnesses_satisfy_the_sup_norm_condition() {
    let psi = PsiFunction::power(2.0, 2).unwrap();
    let x = [0.412_345_678, 0.771_234_567];
    let report = is_psi_approximable(&x, &psi, 2000).unwrap();
    assert_eq!(report.hit_count, report.witnesses.len());
    for w in &report.witnesses {
        let q = w.denominator_u64().unwrap() as f64;
        let p = w.to_f64();
        assert!(x.iter().zip(&p).all(|(a, b)| (a - b).abs() <= psi.eval(q)));
    }
}

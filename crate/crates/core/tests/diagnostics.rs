use friendly_core::ifs::systems;
use friendly_core::{certify_decay, certify_doubling, certify_regularity, decay_alpha_from_regularity};

const TRIALS: usize = 200;

#[test]
fn cantor_certificates_revalidate_on_the_next_seed() {
    let sys = systems::cantor();
    let r0 = sys.default_r0();
    let alpha = sys.delta();
    let mut failures = [0; 3];
    for s in 0..20u64 {
        let dbl = certify_doubling(&sys, TRIALS, r0, s).unwrap();
        failures[0] += usize::from(!dbl.validate(&sys, TRIALS, s + 1).unwrap().passed());
        let dec = certify_decay(&sys, alpha, TRIALS, r0, s).unwrap();
        failures[1] += usize::from(!dec.validate(&sys, TRIALS, s + 1).unwrap().passed());
        let reg = certify_regularity(&sys, TRIALS, r0, s).unwrap();
        failures[2] += usize::from(!reg.validate(&sys, TRIALS, s + 1).unwrap().passed());
    }
    assert!(failures.iter().all(|&f| f <= 1), "failures (doubling, decay, regularity) = {failures:?}");
}

#[test]
fn small_ball_corollary_holds_on_decay_samples() {
    for (sys, seed) in [(systems::cantor(), 3), (systems::sierpinski_gasket(), 4), (systems::von_koch(), 5)] {
        let alpha = decay_alpha_from_regularity(sys.delta(), sys.dim()).unwrap();
        let cert = certify_decay(&sys, alpha, 100, sys.default_r0(), seed).unwrap();
        assert!(cert.corollary_holds, "corollary_max {} vs C 2^alpha {}", cert.corollary_max, cert.corollary_constant);
        assert!(cert.corollary_max <= cert.corollary_constant);
    }
}

#[test]
fn gasket_regularity_implies_decay() {
    let sys = systems::sierpinski_gasket();
    let r0 = sys.default_r0();
    let reg = certify_regularity(&sys, 100, r0, 21).unwrap();
    assert!(reg.a > 0.0 && reg.b.is_finite());
    assert!(reg.delta > (sys.dim() - 1) as f64);
    let alpha = decay_alpha_from_regularity(reg.delta, sys.dim()).unwrap();
    assert!((alpha - (3f64.log2() - 1.0)).abs() < 1e-10);
    let dec = certify_decay(&sys, alpha, 100, r0, 22).unwrap();
    assert!(dec.constant.is_finite() && dec.constant > 0.0);
}

#[test]
fn certificate_ratios_are_ordered() {
    let sys = systems::cantor();
    let cert = certify_doubling(&sys, 50, sys.default_r0(), 8).unwrap();
    for s in &cert.samples {
        assert!(s.ratio_lo <= s.ratio_hi);
        assert!(s.ratio_lo >= 1.0 - 1e-9, "mu(2B) < mu(B): {s:?}");
        assert!(s.ratio_hi <= cert.observed);
    }
    assert!(cert.constant >= cert.observed);
}

//! Empirical certificates for the hypotheses on `mu`: doubling, absolute
//! `alpha`-decay (with the small-ball inequality it implies) and Ahlfors
//! regularity.
//!
//! Certificates are spot checks, not proofs. Each trial draws a centre from
//! `mu` and a radius log-uniform in `[r0/100, r0)`; masses are rigorous
//! intervals, and constants are fitted from the conservative end of each
//! ratio interval (`hi / lo`) and widened by [`HEADROOM`], since the
//! extreme of a finite batch is itself random. Re-validation on fresh
//! trials uses the optimistic end (`lo / hi`).

mod csv_out;

pub use csv_out::{write_certificate_csv, Certificate};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance, Ball, Hyperplane, Slab};
use crate::ifs::{
    measure_of_ball_relative, measure_of_slab_in_ball_relative, sample_in_cylinder, sample_rng,
    sample_with_words, IteratedFunctionSystem, MassInterval,
};

/// Relative width requested for ball masses.
pub const BALL_PRECISION: f64 = 0.02;
/// More than this fraction of discarded trials fails a certification.
pub const MAX_DISCARD_FRACTION: f64 = 0.2;
/// Factor between the observed extreme and the reported constant. Batches
/// of 500 trials on the Cantor measure disagree by up to about 15%.
pub const HEADROOM: f64 = 1.25;
const ABS_FLOOR: f64 = 1e-15;
const RADIUS_SPAN: f64 = 100.0;
const EPS_SPAN: (f64, f64) = (1e-4, 0.25);
const STREAM_SALT: u64 = 0x5eed_d1a6_0000_0001;

/// One trial: ball `B(center, radius)`, slab half-width for decay trials,
/// and the enclosure `[ratio_lo, ratio_hi]` of the tested ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CertSample {
    pub center: Vec<f64>,
    pub radius: f64,
    pub epsilon: Option<f64>,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingCertificate {
    /// `D`: [`HEADROOM`] times `observed`.
    pub constant: f64,
    /// Largest conservative `mu(2B)/mu(B)` over the trials.
    pub observed: f64,
    pub r0: f64,
    pub samples: Vec<CertSample>,
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCertificate {
    pub alpha: f64,
    /// `C`: [`HEADROOM`] times `observed`.
    pub constant: f64,
    /// Largest conservative `mu(B ∩ L^eps) / ((eps/r)^alpha mu(B))`.
    pub observed: f64,
    pub r0: f64,
    /// `C 2^alpha`, the constant in the small-ball inequality.
    pub corollary_constant: f64,
    /// Largest conservative `mu(B(a, eps)) / ((eps/r)^alpha mu(B(a, r)))`.
    pub corollary_max: f64,
    /// No trial refutes `mu(B(a, eps)) <= C 2^alpha (eps/r)^alpha mu(B(a, r))`.
    pub corollary_holds: bool,
    pub samples: Vec<CertSample>,
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityCertificate {
    /// Smallest conservative `mu(B)/r^delta`, divided by [`HEADROOM`].
    pub a: f64,
    /// Largest conservative `mu(B)/r^delta`, times [`HEADROOM`].
    pub b: f64,
    pub observed_a: f64,
    pub observed_b: f64,
    pub delta: f64,
    pub r0: f64,
    pub samples: Vec<CertSample>,
    pub discarded: usize,
}

/// Result of checking a certificate on fresh trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Validation {
    pub checked: usize,
    pub violations: usize,
    pub discarded: usize,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `delta - (d - 1)` when positive: the decay exponent implied by
/// regularity of dimension `delta`.
pub fn decay_alpha_from_regularity(delta: f64, d: usize) -> Option<f64> {
    let alpha = delta - (d as f64 - 1.0);
    (alpha > 0.0).then_some(alpha)
}

struct Trial {
    center: Vec<f64>,
    word: Vec<u8>,
    radius: f64,
    rng: ChaCha8Rng,
}

fn check_args(trials: usize, r0: f64) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::invalid(format!("r0 must be positive, got {r0}")));
    }
    Ok(())
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

fn trials(sys: &IteratedFunctionSystem, count: usize, r0: f64, seed: u64) -> Result<Vec<Trial>> {
    let centers = sample_with_words(sys, count, seed)?;
    Ok(centers
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = sample_rng(seed ^ STREAM_SALT, i as u64);
            let radius = log_uniform(&mut rng, r0 / RADIUS_SPAN, r0);
            Trial {
                center: c.point,
                word: c.word,
                radius,
                rng,
            }
        })
        .collect())
}

fn ball_mass(sys: &IteratedFunctionSystem, b: &Ball) -> Option<MassInterval> {
    measure_of_ball_relative(sys, b, BALL_PRECISION, ABS_FLOOR)
        .ok()
        .filter(|m| m.lo > 0.0)
}

fn ball(center: &[f64], radius: f64) -> Ball {
    Ball::new(center.to_vec(), radius).expect("positive radius")
}

fn finish<T>(outcomes: Vec<Option<T>>, what: &str) -> Result<(Vec<T>, usize)> {
    let total = outcomes.len();
    let kept: Vec<T> = outcomes.into_iter().flatten().collect();
    let discarded = total - kept.len();
    if kept.is_empty() || discarded as f64 > MAX_DISCARD_FRACTION * total as f64 {
        return Err(Error::CertificationFailed(format!(
            "{what}: {discarded} of {total} trials discarded (mass interval contains 0 or did not converge)"
        )));
    }
    Ok((kept, discarded))
}

fn doubling_trials(sys: &IteratedFunctionSystem, count: usize, r0: f64, seed: u64) -> Result<Vec<Option<CertSample>>> {
    let trials = trials(sys, count, r0, seed)?;
    Ok(trials
        .into_par_iter()
        .map(|t| {
            let small = ball_mass(sys, &ball(&t.center, t.radius))?;
            let big = ball_mass(sys, &ball(&t.center, 2.0 * t.radius))?;
            Some(CertSample {
                ratio_lo: big.lo / small.hi,
                ratio_hi: big.hi / small.lo,
                center: t.center,
                radius: t.radius,
                epsilon: None,
            })
        })
        .collect())
}

/// `D = max hi(mu(2B)) / lo(mu(B))` over `trials` random balls.
pub fn certify_doubling(sys: &IteratedFunctionSystem, trials: usize, r0: f64, seed: u64) -> Result<DoublingCertificate> {
    check_args(trials, r0)?;
    let (samples, discarded) = finish(doubling_trials(sys, trials, r0, seed)?, "doubling")?;
    let observed = samples.iter().map(|s| s.ratio_hi).fold(0.0, f64::max);
    Ok(DoublingCertificate {
        constant: HEADROOM * observed,
        observed,
        r0,
        samples,
        discarded,
    })
}

fn tally(outcomes: Vec<Option<bool>>) -> Validation {
    let checked = outcomes.iter().flatten().count();
    Validation {
        checked,
        violations: outcomes.iter().flatten().filter(|ok| !**ok).count(),
        discarded: outcomes.len() - checked,
    }
}

impl DoublingCertificate {
    /// Checks `D` against fresh trials drawn with `seed`.
    pub fn validate(&self, sys: &IteratedFunctionSystem, trials: usize, seed: u64) -> Result<Validation> {
        check_args(trials, self.r0)?;
        let outcomes = doubling_trials(sys, trials, self.r0, seed)?;
        Ok(tally(outcomes.into_iter().map(|s| s.map(|s| s.ratio_lo <= self.constant)).collect()))
    }
}

struct DecayTrial {
    sample: CertSample,
    // (t, mu(B(a, eps)), mu(B(a, r))) for the small-ball inequality
    corollary: Option<(f64, MassInterval, MassInterval)>,
}

fn random_normal(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Prefix of `word` whose cylinder has diameter at most `r`.
fn prefix_within(sys: &IteratedFunctionSystem, word: &[u8], r: f64) -> usize {
    let diam = sys.diameter_bound();
    let mut scale = 1.0;
    for (k, &i) in word.iter().enumerate() {
        if diam * scale <= r {
            return k;
        }
        scale *= sys.maps()[i as usize].ratio();
    }
    word.len()
}

fn decay_trials(
    sys: &IteratedFunctionSystem,
    alpha: f64,
    count: usize,
    r0: f64,
    seed: u64,
) -> Result<Vec<Option<DecayTrial>>> {
    let trials = trials(sys, count, r0, seed)?;
    let d = sys.dim();
    Ok(trials
        .into_par_iter()
        .map(|mut t| {
            let r = t.radius;
            // plane through a point of K near the centre, so it meets mass
            let k = prefix_within(sys, &t.word, r);
            let anchor = sample_in_cylinder(sys, &t.word[..k], &mut t.rng);
            let normal = random_normal(&mut t.rng, d);
            let eps = log_uniform(&mut t.rng, EPS_SPAN.0 * r, EPS_SPAN.1 * r);
            let scale = (eps / r).powf(alpha);
            let b = ball(&t.center, r);
            let den = ball_mass(sys, &b)?;
            let slab = Slab::new(Hyperplane::through(&anchor, normal).expect("unit normal"), eps).expect("eps > 0");
            let num = measure_of_slab_in_ball_relative(sys, &b, &slab, 0.05, 0.05 * scale * den.lo).ok()?;
            let corollary = (|| {
                let small = measure_of_ball_relative(sys, &ball(&anchor, eps), 0.05, 0.05 * scale * den.lo).ok()?;
                let big = ball_mass(sys, &ball(&anchor, r))?;
                Some((eps / r, small, big))
            })();
            debug_assert!(distance(&anchor, &t.center) <= r * (1.0 + 1e-9));
            Some(DecayTrial {
                sample: CertSample {
                    ratio_lo: num.lo / (scale * den.hi),
                    ratio_hi: num.hi / (scale * den.lo),
                    center: t.center,
                    radius: r,
                    epsilon: Some(eps),
                },
                corollary,
            })
        })
        .collect())
}

/// `C = max` conservative decay ratio over `trials` random balls and
/// hyperplanes through points of `K` inside each ball, with `eps`
/// log-uniform in `[r/10^4, r/4]`.
pub fn certify_decay(
    sys: &IteratedFunctionSystem,
    alpha: f64,
    trials: usize,
    r0: f64,
    seed: u64,
) -> Result<DecayCertificate> {
    check_args(trials, r0)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let (kept, discarded) = finish(decay_trials(sys, alpha, trials, r0, seed)?, "decay")?;
    let observed = kept.iter().map(|t| t.sample.ratio_hi).fold(0.0, f64::max);
    let constant = HEADROOM * observed;
    let corollary_constant = constant * 2f64.powf(alpha);
    let mut corollary_max: f64 = 0.0;
    let mut corollary_holds = true;
    for (t, small, big) in kept.iter().filter_map(|t| t.corollary) {
        let s = t.powf(alpha);
        corollary_max = corollary_max.max(small.hi / (s * big.lo));
        if small.lo > corollary_constant * s * big.hi {
            corollary_holds = false;
        }
    }
    Ok(DecayCertificate {
        alpha,
        constant,
        observed,
        r0,
        corollary_constant,
        corollary_max,
        corollary_holds,
        samples: kept.into_iter().map(|t| t.sample).collect(),
        discarded,
    })
}

impl DecayCertificate {
    pub fn validate(&self, sys: &IteratedFunctionSystem, trials: usize, seed: u64) -> Result<Validation> {
        check_args(trials, self.r0)?;
        let outcomes = decay_trials(sys, self.alpha, trials, self.r0, seed)?;
        Ok(tally(
            outcomes
                .into_iter()
                .map(|t| t.map(|t| t.sample.ratio_lo <= self.constant))
                .collect(),
        ))
    }
}

fn regularity_trials(
    sys: &IteratedFunctionSystem,
    count: usize,
    r0: f64,
    seed: u64,
) -> Result<Vec<Option<CertSample>>> {
    let trials = trials(sys, count, r0, seed)?;
    let delta = sys.delta();
    Ok(trials
        .into_par_iter()
        .map(|t| {
            let m = ball_mass(sys, &ball(&t.center, t.radius))?;
            let v = t.radius.powf(delta);
            Some(CertSample {
                ratio_lo: m.lo / v,
                ratio_hi: m.hi / v,
                center: t.center,
                radius: t.radius,
                epsilon: None,
            })
        })
        .collect())
}

/// `a = min lo(mu(B))/r^delta`, `b = max hi(mu(B))/r^delta`.
pub fn certify_regularity(
    sys: &IteratedFunctionSystem,
    trials: usize,
    r0: f64,
    seed: u64,
) -> Result<RegularityCertificate> {
    check_args(trials, r0)?;
    let (samples, discarded) = finish(regularity_trials(sys, trials, r0, seed)?, "regularity")?;
    let observed_a = samples.iter().map(|s| s.ratio_lo).fold(f64::INFINITY, f64::min);
    let observed_b = samples.iter().map(|s| s.ratio_hi).fold(0.0, f64::max);
    Ok(RegularityCertificate {
        a: observed_a / HEADROOM,
        b: observed_b * HEADROOM,
        observed_a,
        observed_b,
        delta: sys.delta(),
        r0,
        samples,
        discarded,
    })
}

impl RegularityCertificate {
    pub fn validate(&self, sys: &IteratedFunctionSystem, trials: usize, seed: u64) -> Result<Validation> {
        check_args(trials, self.r0)?;
        let outcomes = regularity_trials(sys, trials, self.r0, seed)?;
        Ok(tally(
            outcomes
                .into_iter()
                .map(|s| s.map(|s| s.ratio_hi >= self.a && s.ratio_lo <= self.b))
                .collect(),
        ))
    }
}

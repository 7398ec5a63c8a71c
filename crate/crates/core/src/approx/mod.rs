//! Approximation functions, rational points grouped by dyadic denominator
//! block, and the layers
//! `A_n = union over 2^n <= q < 2^{n+1} of B(p/q, sqrt(d) psi(q))`.

mod psi;

pub use psi::{PsiFamily, PsiFunction};

use std::collections::HashSet;

use num_integer::Integer;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{AxisBox, Ball, DyadicScale, RationalPoint};

/// Refusal threshold for `volume * 2^{(d+1)(n+1)}` in an enumeration.
pub const ENUMERATION_LIMIT: f64 = 1e8;

/// Restriction window of a layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    Ball(Ball),
    Box(AxisBox),
}

impl Window {
    pub fn dim(&self) -> usize {
        match self {
            Window::Ball(b) => b.dim(),
            Window::Box(b) => b.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Window::Ball(b) => b.contains(x),
            Window::Box(b) => b.contains(x),
        }
    }
}

/// The layer `A_n` for `psi`, restricted to `region`.
#[derive(Debug, Clone)]
pub struct ApproxLayer {
    pub n: u32,
    pub d: usize,
    pub region: Window,
    pub psi: PsiFunction,
}

impl ApproxLayer {
    pub fn new(n: u32, region: Window, psi: PsiFunction) -> Result<Self> {
        let d = region.dim();
        check_dim(d, psi.d())?;
        DyadicScale::new(n, d)?;
        Ok(ApproxLayer { n, d, region, psi })
    }
}

/// Numerators with `lo <= p/q <= hi`, comparing the correctly rounded
/// quotient so that a window edge written as `0.1` admits `1/10`.
fn p_range(lo: f64, hi: f64, q: i64) -> (i64, i64) {
    let inside = |p: i64| {
        let v = p as f64 / q as f64;
        lo <= v && v <= hi
    };
    let mut a = (lo * q as f64).ceil() as i64;
    while inside(a - 1) {
        a -= 1;
    }
    while a as f64 / (q as f64) < lo {
        a += 1;
    }
    let mut b = (hi * q as f64).floor() as i64;
    while inside(b + 1) {
        b += 1;
    }
    while b as f64 / (q as f64) > hi {
        b -= 1;
    }
    (a, b)
}

/// All values `p/q` in the closed `window` with `q` in block `n`, each value
/// once, represented with the smallest `q` of the block that yields it.
/// Ordered by `q`, then lexicographically by `p`.
pub fn enumerate_rationals(d: usize, n: u32, window: &AxisBox) -> Result<Vec<RationalPoint>> {
    check_dim(d, window.dim())?;
    let block = DyadicScale::new(n, d)?;
    let (q0, q1) = (block.q_min() as i64, block.q_end() as i64);
    let density = 2f64.powf(((d + 1) as f64) * (n as f64 + 1.0));
    let estimate = window.volume() * density;
    let ranges: Vec<Vec<(i64, i64)>> = (q0..q1)
        .map(|q| (0..d).map(|i| p_range(window.min()[i], window.max()[i], q)).collect())
        .collect();
    let count: f64 = ranges
        .iter()
        .map(|r| r.iter().map(|(a, b)| (b - a + 1).max(0) as f64).product::<f64>())
        .sum();
    if estimate.max(count) > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(estimate.max(count)));
    }
    let mut seen: HashSet<(Vec<i64>, i64)> = HashSet::new();
    let mut out = Vec::new();
    for (q, ranges) in (q0..q1).zip(&ranges) {
        if ranges.iter().any(|(a, b)| a > b) {
            continue;
        }
        let mut p: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        loop {
            let g = p.iter().fold(q, |g, &x| g.gcd(&x));
            let key = (p.iter().map(|x| x / g).collect::<Vec<_>>(), q / g);
            if seen.insert(key) {
                out.push(RationalPoint::from_i64(&p, q)?);
            }
            // odometer over the box of numerators, last coordinate fastest
            let mut i = d;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if p[i] < ranges[i].1 {
                    p[i] += 1;
                    for (j, pj) in p.iter_mut().enumerate().skip(i + 1) {
                        *pj = ranges[j].0;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    Ok(out)
}

/// Outcome of a scan for good rational approximations.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxReport {
    pub hit_count: usize,
    pub witnesses: Vec<RationalPoint>,
}

fn nearest(x: &[f64], q: u64) -> Vec<i64> {
    x.iter().map(|xi| (xi * q as f64).round() as i64).collect()
}

fn sup_error(x: &[f64], p: &[i64], q: u64) -> f64 {
    x.iter()
        .zip(p)
        .map(|(xi, pi)| (xi - *pi as f64 / q as f64).abs())
        .fold(0.0, f64::max)
}

fn euclid_error(x: &[f64], p: &[i64], q: u64) -> f64 {
    x.iter()
        .zip(p)
        .map(|(xi, pi)| (xi - *pi as f64 / q as f64).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Counts `q <= q_max` with `max_i |x_i - p_i/q| <= psi(q)`, taking
/// `p_i = round(x_i q)`, the nearest numerator in every coordinate.
pub fn is_psi_approximable(x: &[f64], psi: &PsiFunction, q_max: u64) -> Result<ApproxReport> {
    check_dim(psi.d(), x.len())?;
    if q_max == 0 {
        return Err(Error::invalid("q_max must be at least 1"));
    }
    let mut witnesses = Vec::new();
    for q in 1..=q_max {
        let p = nearest(x, q);
        if sup_error(x, &p, q) <= psi.eval(q as f64) {
            witnesses.push(RationalPoint::from_i64(&p, q as i64)?);
        }
    }
    Ok(ApproxReport {
        hit_count: witnesses.len(),
        witnesses,
    })
}

/// Whether `x` lies in `A_n`: some `p/q` with `q` in block `n` within
/// Euclidean distance `sqrt(d) psi(q)`. Coordinate-wise rounding gives the
/// Euclidean-nearest `p` for each `q`, so one candidate per `q` suffices.
pub fn layer_membership(x: &[f64], layer: &ApproxLayer) -> Result<Option<RationalPoint>> {
    check_dim(layer.d, x.len())?;
    if !layer.region.contains(x) {
        return Err(Error::precondition("point lies outside the layer's region"));
    }
    let block = DyadicScale::new(layer.n, layer.d)?;
    let sd = (layer.d as f64).sqrt();
    for q in block.q_min()..block.q_end() {
        let p = nearest(x, q);
        if euclid_error(x, &p, q) <= sd * layer.psi.eval(q as f64) {
            return Ok(Some(RationalPoint::from_i64(&p, q as i64)?));
        }
    }
    Ok(None)
}

/// Layer test without window bookkeeping, for bulk scans.
pub(crate) fn in_layer(x: &[f64], n: u32, psi: &PsiFunction) -> bool {
    let sd = (x.len() as f64).sqrt();
    (1u64 << n..2u64 << n).any(|q| euclid_error(x, &nearest(x, q), q) <= sd * psi.eval(q as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(v: &[RationalPoint]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = v.iter().map(|p| p.to_f64()).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn enumerate_small_blocks() {
        let unit = AxisBox::unit(1);
        assert_eq!(values(&enumerate_rationals(1, 0, &unit).unwrap()), vec![vec![0.0], vec![1.0]]);
        let v = values(&enumerate_rationals(1, 1, &unit).unwrap());
        assert_eq!(v, vec![vec![0.0], vec![1.0 / 3.0], vec![0.5], vec![2.0 / 3.0], vec![1.0]]);
        assert_eq!(enumerate_rationals(2, 0, &AxisBox::unit(2)).unwrap().len(), 4);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        // oracle: every (p, q) pair, deduplicated by exact cross-multiplication
        let w = AxisBox::new(vec![0.1, -0.3], vec![0.45, 0.2]).unwrap();
        let got = enumerate_rationals(2, 3, &w).unwrap();
        let mut oracle: Vec<RationalPoint> = Vec::new();
        for q in 8..16i64 {
            for a in -20..20i64 {
                for b in -20..20i64 {
                    let (x, y) = (a as f64 / q as f64, b as f64 / q as f64);
                    if w.contains(&[x, y]) {
                        let p = RationalPoint::from_i64(&[a, b], q).unwrap();
                        if !oracle.iter().any(|o| o.value_eq(&p)) {
                            oracle.push(p);
                        }
                    }
                }
            }
        }
        assert_eq!(got.len(), oracle.len());
        assert!(oracle.iter().all(|o| got.iter().any(|g| g.value_eq(o))));
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(enumerate_rationals(2, 12, &AxisBox::unit(2)), Err(Error::TooLarge(_))));
    }

    #[test]
    fn rational_point_hits_every_q() {
        let psi = PsiFunction::power(2.0, 1).unwrap();
        assert_eq!(is_psi_approximable(&[0.0], &psi, 10).unwrap().hit_count, 10);
    }

    #[test]
    fn golden_section_is_badly_approximable() {
        let x = (5f64.sqrt() - 1.0) / 2.0;
        let psi = PsiFunction::power(3.0, 1).unwrap();
        assert!(is_psi_approximable(&[x], &psi, 10_000).unwrap().hit_count <= 3);
    }

    #[test]
    fn half_is_in_first_layer() {
        let psi = PsiFunction::power(5.0, 1).unwrap();
        let layer = ApproxLayer::new(1, Window::Box(AxisBox::unit(1)), psi).unwrap();
        let w = layer_membership(&[0.5], &layer).unwrap().unwrap();
        assert_eq!(w.to_f64(), vec![0.5]);
    }

    #[test]
    fn exhaustive_layer_oracle() {
        // q in 8..16, every p: |x - p/q| <= q^-2
        let psi = PsiFunction::power(2.0, 1).unwrap();
        let layer = ApproxLayer::new(3, Window::Box(AxisBox::unit(1)), psi).unwrap();
        for x in [0.123456789, 0.3, 0.71, 0.0421, 0.9999] {
            let oracle = (8..16).any(|q| (0..=q).any(|p| (x - p as f64 / q as f64).abs() <= (q as f64).powi(-2)));
            assert_eq!(layer_membership(&[x], &layer).unwrap().is_some(), oracle, "{x}");
        }
        // 1/8 is within 1/64 of 0.123456789
        let w = layer_membership(&[0.123456789], &layer).unwrap().unwrap();
        assert_eq!(w.to_f64(), vec![0.125]);
    }

    #[test]
    fn outside_region_is_precondition() {
        let psi = PsiFunction::power(2.0, 1).unwrap();
        let layer = ApproxLayer::new(3, Window::Box(AxisBox::unit(1)), psi).unwrap();
        assert!(matches!(layer_membership(&[2.0], &layer), Err(Error::Precondition(_))));
    }
}

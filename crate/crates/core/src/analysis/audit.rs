use rand::Rng;
use rayon::prelude::*;

use crate::approx::enumerate_rationals;
use crate::error::{Error, Result};
use crate::geometry::{distance, hyperplane_witness, AxisBox, Ball, DyadicScale, HyperplaneWitness, RationalPoint};
use crate::ifs::sample_rng;

/// Every rational with denominator in block `n` lying in the closed ball
/// `6 container`.
pub fn rationals_in_six_dilate(container: &Ball, n: u32) -> Result<Vec<RationalPoint>> {
    let outer = 6.0 * container.radius();
    let c = container.center();
    let window = AxisBox::new(c.iter().map(|x| x - outer).collect(), c.iter().map(|x| x + outer).collect())?;
    Ok(enumerate_rationals(container.dim(), n, &window)?
        .into_iter()
        .filter(|p| distance(&p.to_f64(), c) <= outer)
        .collect())
}

/// Result of auditing one `(d, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub d: usize,
    pub n: u32,
    pub balls: usize,
    /// Largest number of block-`n` rationals found in one `6 D`.
    pub max_rationals: usize,
    /// Balls whose rationals were affinely independent.
    pub simplices: usize,
}

/// Runs [`hyperplane_witness`] on `balls` balls of radius `r_n` with centres
/// uniform in `[0, 1]^d`, feeding each all rationals of block `n` in its
/// 6-dilate. Deterministic in `seed`.
pub fn lemma_audit(d: usize, n: u32, balls: usize, seed: u64) -> Result<AuditRow> {
    if balls == 0 {
        return Err(Error::invalid("ball count must be at least 1"));
    }
    let scale = DyadicScale::new(n, d)?;
    let stream_base = ((d as u64) << 40) | ((n as u64) << 32);
    let outcomes: Vec<(usize, bool)> = (0..balls)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, stream_base | i as u64);
            let center: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let ball = scale.ball(center)?;
            let pts = rationals_in_six_dilate(&ball, n)?;
            let w = hyperplane_witness(&pts, &ball, &scale)?;
            Ok((pts.len(), matches!(w, HyperplaneWitness::Simplex(_))))
        })
        .collect::<Result<_>>()?;
    Ok(AuditRow {
        d,
        n,
        balls,
        max_rationals: outcomes.iter().map(|o| o.0).max().unwrap_or(0),
        simplices: outcomes.iter().filter(|o| o.1).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_audit_finds_planes() {
        for d in 1..=2 {
            for n in 1..=3 {
                let row = lemma_audit(d, n, 20, 7).unwrap();
                assert_eq!(row.simplices, 0, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn audit_is_deterministic() {
        assert_eq!(lemma_audit(2, 4, 30, 1).unwrap(), lemma_audit(2, 4, 30, 1).unwrap());
    }

    #[test]
    fn six_dilate_matches_brute_force() {
        let scale = DyadicScale::new(2, 1).unwrap();
        let ball = scale.ball(vec![0.4]).unwrap();
        let got: Vec<f64> = rationals_in_six_dilate(&ball, 2).unwrap().iter().map(|p| p.to_f64()[0]).collect();
        let mut want = Vec::new();
        for q in 4..8 {
            for p in 0..=q {
                let x = p as f64 / q as f64;
                if (x - 0.4).abs() <= 6.0 * scale.r_n() && !want.iter().any(|w: &f64| (w - x).abs() < 1e-12) {
                    want.push(x);
                }
            }
        }
        let mut got_sorted = got.clone();
        got_sorted.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        assert_eq!(got_sorted, want);
    }
}

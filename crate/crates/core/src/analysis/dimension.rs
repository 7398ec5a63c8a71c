use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use super::covers::{build_dn_cover, nearby_rationals};
use crate::approx::{in_layer, PsiFunction};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{distance, Ball};
use crate::ifs::{moran_cut_in, sample_measure, BallRegion, IteratedFunctionSystem, Region};

/// Least-squares slope of `ln N(g)` against `ln(1/g)` with a 95% band.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimension {
    pub slope: f64,
    pub stderr: f64,
    pub lo: f64,
    pub hi: f64,
    /// `(grid size, occupied cells)`.
    pub counts: Vec<(f64, usize)>,
}

fn occupied(points: &[Vec<f64>], g: f64) -> usize {
    points
        .iter()
        .map(|p| p.iter().map(|x| (x / g).floor() as i64).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

/// Slope and standard error of the least-squares line through `(x, y)`.
fn regress(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xy.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = if xy.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, stderr)
}

fn from_counts(counts: Vec<(f64, usize)>) -> Result<BoxDimension> {
    let xy: Vec<(f64, f64)> = counts
        .iter()
        .filter(|c| c.1 > 0)
        .map(|&(g, n)| ((1.0 / g).ln(), (n as f64).ln()))
        .collect();
    if xy.len() < 2 {
        return Err(Error::invalid("need at least two nonempty scales"));
    }
    let (slope, stderr) = regress(&xy);
    let band = if stderr.is_finite() { 1.96 * stderr } else { 0.0 };
    Ok(BoxDimension {
        slope,
        stderr,
        lo: slope - band,
        hi: slope + band,
        counts,
    })
}

/// Box-counting estimate on grids of the given sizes.
pub fn box_dimension(points: &[Vec<f64>], scales: &[f64]) -> Result<BoxDimension> {
    if points.len() < 1000 {
        return Err(Error::invalid(format!("need at least 1000 points, got {}", points.len())));
    }
    if scales.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 scales, got {}", scales.len())));
    }
    if let Some(g) = scales.iter().find(|g| !(**g > 0.0)) {
        return Err(Error::invalid(format!("grid sizes must be positive, got {g}")));
    }
    from_counts(scales.iter().map(|&g| (g, occupied(points, g))).collect())
}

/// Per-block line of [`layer_mass_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayerRow {
    pub n: u32,
    pub hits: usize,
    /// Fraction of samples in `A_n`.
    pub mass: f64,
    /// `(2^{n(d+1)/d} psi(2^n))^alpha`.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerProfile {
    pub samples: usize,
    pub rows: Vec<LayerRow>,
    /// Least-squares slope of `log2 mass` per block over rows with hits.
    pub empirical_slope: Option<f64>,
    /// Same slope for the envelope.
    pub predicted_slope: f64,
}

/// Monte-Carlo estimate of `mu(A_n)` for `n` in `blocks`, next to the
/// envelope that bounds it up to a constant.
pub fn layer_mass_profile(
    sys: &IteratedFunctionSystem,
    psi: &PsiFunction,
    alpha: f64,
    blocks: (u32, u32),
    samples: usize,
    seed: u64,
) -> Result<LayerProfile> {
    check_dim(sys.dim(), psi.d())?;
    let (lo, hi) = blocks;
    if lo > hi || hi > 40 {
        return Err(Error::invalid(format!("block range {lo}..={hi} must be nonempty and at most 40")));
    }
    let pts = sample_measure(sys, samples, seed)?;
    let dirichlet = psi.dirichlet_exponent();
    let rows: Vec<LayerRow> = (lo..=hi)
        .map(|n| {
            let hits = pts.par_iter().filter(|p| in_layer(p, n, psi)).count();
            let r = 2f64.powi(n as i32);
            LayerRow {
                n,
                hits,
                mass: hits as f64 / samples as f64,
                envelope: (alpha * (dirichlet * r.ln() + psi.ln_eval(r))).exp(),
            }
        })
        .collect();
    let fit = |f: &dyn Fn(&LayerRow) -> Option<f64>| {
        let xy: Vec<(f64, f64)> = rows.iter().filter_map(|r| f(r).map(|y| (r.n as f64, y))).collect();
        (xy.len() >= 2).then(|| regress(&xy).0)
    };
    let empirical_slope = fit(&|r| (r.hits > 0).then(|| r.mass.log2()));
    let predicted_slope = fit(&|r| Some(r.envelope.log2())).unwrap_or(f64::NAN);
    Ok(LayerProfile {
        samples,
        rows,
        empirical_slope,
        predicted_slope,
    })
}

/// Box-counting estimate for the finite-scale approximant of `W_K(psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximantDimension {
    /// `(n, number of rationals of block n whose ball meets K)`.
    pub rationals: Vec<(u32, usize)>,
    pub estimate: BoxDimension,
}

/// Scale-matched box counting of `K ∩ A_n`, `n` in `blocks`: at block `n`
/// the set is covered by grid cells of side `g_n = psi(2^n)`, using points
/// of `K` (one per cylinder of diameter `g_n / 4`) that lie in some ball
/// `B(p/q, sqrt(d) psi(q))`. The slope of `ln N_n` against `ln(1/g_n)`
/// estimates the dimension of the limsup set.
pub fn approximant_dimension(
    sys: &IteratedFunctionSystem,
    psi: &PsiFunction,
    blocks: (u32, u32),
) -> Result<ApproximantDimension> {
    check_dim(sys.dim(), psi.d())?;
    let (lo, hi) = blocks;
    if lo > hi || hi - lo < 3 {
        return Err(Error::invalid(format!("need at least 4 blocks, got {lo}..={hi}")));
    }
    let sd = (sys.dim() as f64).sqrt();
    let mut counts = Vec::new();
    let mut rationals = Vec::new();
    for n in lo..=hi {
        let g = psi.eval(2f64.powi(n as i32));
        let dn = build_dn_cover(sys, n)?;
        let found: Vec<Vec<_>> = dn
            .balls
            .par_iter()
            .map(|b| nearby_rationals(b, psi, n))
            .collect::<Result<_>>()?;
        let mut distinct = BTreeSet::new();
        for p in found.into_iter().flatten() {
            distinct.insert((p.numerators().to_vec(), p.denominator().clone()));
        }
        let per_rational: Vec<Vec<Vec<i64>>> = distinct
            .par_iter()
            .map(|(num, den)| {
                let q = num_traits::ToPrimitive::to_f64(den).expect("finite");
                let center: Vec<f64> = num.iter().map(|x| num_traits::ToPrimitive::to_f64(x).expect("finite") / q).collect();
                let radius = sd * psi.eval(q);
                let ball = Ball::new(center, radius)?;
                let region = BallRegion::new(&ball);
                let cut = moran_cut_in(sys, g / 4.0, Some(&region as &dyn Region), super::covers::CANDIDATE_BUDGET)?;
                Ok(cut
                    .into_iter()
                    .filter(|c| distance(&c.point, ball.center()) <= radius)
                    .map(|c| c.point.iter().map(|x| (x / g).floor() as i64).collect())
                    .collect())
            })
            .collect::<Result<_>>()?;
        let hit = per_rational.iter().filter(|c| !c.is_empty()).count();
        let cells: HashSet<Vec<i64>> = per_rational.into_iter().flatten().collect();
        rationals.push((n, hit));
        counts.push((g, cells.len()));
    }
    Ok(ApproximantDimension {
        rationals,
        estimate: from_counts(counts)?,
    })
}

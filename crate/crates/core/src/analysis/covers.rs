use rayon::prelude::*;

use crate::approx::{enumerate_rationals, PsiFunction};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{
    distance, greedy_cover, hyperplane_witness, AxisBox, Ball, DyadicScale, HyperplaneWitness, RationalPoint, Slab,
};
use crate::ifs::{moran_cut_in, BallSlabRegion, IteratedFunctionSystem, MAX_DEPTH};

/// Largest candidate net built for one cover.
pub const CANDIDATE_BUDGET: usize = 2_000_000;

/// The collection `D_n`: disjoint balls of radius `r_n` centred in `K`
/// whose 3-dilates cover `K`.
#[derive(Debug, Clone)]
pub struct DnCover {
    pub scale: DyadicScale,
    pub balls: Vec<Ball>,
    /// Size of the candidate net the greedy selection ran over.
    pub candidates: usize,
}

fn net_balls(sys: &IteratedFunctionSystem, diam: f64, radius: f64, region: Option<&BallSlabRegion>) -> Result<Vec<Ball>> {
    let region = region.map(|r| r as &dyn crate::ifs::Region);
    let cut = moran_cut_in(sys, diam, region, CANDIDATE_BUDGET)?;
    cut.into_iter()
        .map(|c| Ball::new(c.point, radius))
        .collect()
}

fn depth_feasible(sys: &IteratedFunctionSystem, diam: f64) -> bool {
    sys.diameter_bound() * sys.max_ratio().powi(MAX_DEPTH as i32) <= diam
}

/// Greedy selection over the net of points `S_w(p)`, one per cylinder of
/// diameter at most `r_n`. Each point of `K` is within `r_n` of a net point
/// and each net point within `2 r_n` of a chosen centre, so the 3-dilates
/// cover `K`.
pub fn build_dn_cover(sys: &IteratedFunctionSystem, n: u32) -> Result<DnCover> {
    let scale = DyadicScale::new(n, sys.dim())?;
    let attempt = |m: u32| -> Result<Vec<Ball>> {
        let r = DyadicScale::new(m, sys.dim())?.r_n();
        if !depth_feasible(sys, r) {
            return Err(Error::TooLarge(f64::INFINITY));
        }
        net_balls(sys, r, r, None)
    };
    let net = match attempt(n) {
        Ok(net) => net,
        Err(Error::TooLarge(_)) => {
            let max_feasible = (0..n).rev().find(|&m| attempt(m).is_ok());
            return Err(Error::Infeasible {
                requested: n,
                max_feasible,
            });
        }
        Err(e) => return Err(e),
    };
    let cover = greedy_cover(&net)?;
    Ok(DnCover {
        scale,
        balls: cover.chosen,
        candidates: net.len(),
    })
}

/// The collection `C(D_n)`: disjoint balls of radius `psi(2^n)` centred in
/// `K` whose 3-dilates cover `3 D_n ∩ slab ∩ K`.
///
/// Candidate centres are the net points, one per cylinder of diameter at
/// most `rho = psi(2^n)`, lying within `rho` of `3 D_n ∩ slab`.
pub fn build_cdn_cover(
    sys: &IteratedFunctionSystem,
    dn: &Ball,
    slab: &Slab,
    psi: &PsiFunction,
    n: u32,
) -> Result<Vec<Ball>> {
    check_dim(sys.dim(), dn.dim())?;
    check_dim(sys.dim(), slab.plane().dim())?;
    let rho = psi.eval(2f64.powi(n as i32));
    if !depth_feasible(sys, rho) {
        return Err(Error::Infeasible {
            requested: n,
            max_feasible: None,
        });
    }
    let reach = Ball::new(dn.center().to_vec(), 3.0 * dn.radius() + rho)?;
    let band = Slab::new(slab.plane().clone(), slab.epsilon() + rho)?;
    let region = BallSlabRegion::new(&reach, &band);
    let net: Vec<Ball> = net_balls(sys, rho, rho, Some(&region))?
        .into_iter()
        .filter(|b| reach.contains(b.center()) && band.contains(b.center()))
        .collect();
    Ok(greedy_cover(&net)?.chosen)
}

/// Rationals with `q` in block `n` whose ball `B(p/q, sqrt(d) psi(q))`
/// meets `3 ball`.
pub fn nearby_rationals(ball: &Ball, psi: &PsiFunction, n: u32) -> Result<Vec<RationalPoint>> {
    let d = ball.dim();
    let sd = (d as f64).sqrt();
    let reach = 3.0 * ball.radius() + sd * psi.eval(2f64.powi(n as i32));
    let c = ball.center();
    let window = AxisBox::new(c.iter().map(|x| x - reach).collect(), c.iter().map(|x| x + reach).collect())?;
    Ok(enumerate_rationals(d, n, &window)?
        .into_iter()
        .filter(|p| {
            let q = p.denominator_u64().expect("block denominators fit") as f64;
            distance(&p.to_f64(), c) <= 3.0 * ball.radius() + sd * psi.eval(q)
        })
        .collect())
}

/// One ball of `D_n` with its rationals, hyperplane slab and `C(D_n)`.
#[derive(Debug, Clone)]
pub struct BallCensus {
    pub ball: Ball,
    pub rationals: Vec<RationalPoint>,
    pub slab: Slab,
    pub cdn: Vec<Ball>,
}

/// Both covers for block `n`.
#[derive(Debug, Clone)]
pub struct BlockCensus {
    pub n: u32,
    /// `psi(2^n)`, the radius of the `C(D_n)` balls.
    pub rho: f64,
    pub dn: DnCover,
    pub balls: Vec<BallCensus>,
}

impl BlockCensus {
    pub fn total_c(&self) -> usize {
        self.balls.iter().map(|b| b.cdn.len()).sum()
    }

    pub fn max_c(&self) -> usize {
        self.balls.iter().map(|b| b.cdn.len()).max().unwrap_or(0)
    }
}

/// Runs the cover construction for block `n`: `D_n`, the hyperplane of
/// each ball's rationals, and `C(D_n)` with `eps = sqrt(d) psi(2^n)`.
///
/// Fails with `Precondition` when some rational escapes `6 D_n` (the block
/// is below the smallness threshold for `psi`).
pub fn block_census(sys: &IteratedFunctionSystem, psi: &PsiFunction, n: u32) -> Result<BlockCensus> {
    check_dim(sys.dim(), psi.d())?;
    let dn = build_dn_cover(sys, n)?;
    let rho = psi.eval(2f64.powi(n as i32));
    let eps = (sys.dim() as f64).sqrt() * rho;
    let balls = dn
        .balls
        .par_iter()
        .map(|ball| {
            let rationals = nearby_rationals(ball, psi, n)?;
            let plane = match hyperplane_witness(&rationals, ball, &dn.scale)? {
                HyperplaneWitness::Plane(p) => p,
                HyperplaneWitness::Simplex(s) => {
                    return Err(Error::CertificationFailed(format!(
                        "affinely independent rationals near a ball of block {n}: {:?}",
                        s.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>()
                    )))
                }
            };
            let slab = Slab::new(plane, eps)?;
            let cdn = build_cdn_cover(sys, ball, &slab, psi, n)?;
            Ok(BallCensus {
                ball: ball.clone(),
                rationals,
                slab,
                cdn,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockCensus { n, rho, dn, balls })
}

/// `sum r_i^s` for a cover by balls of radius at most `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCost {
    pub s: f64,
    pub rho: f64,
    pub radii: Vec<f64>,
    pub cost: f64,
}

pub fn cover_cost(s: f64, rho: f64, radii: Vec<f64>) -> Result<CoverCost> {
    if !(s >= 0.0) {
        return Err(Error::invalid(format!("s must be nonnegative, got {s}")));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= rho)) {
        return Err(Error::invalid(format!("radius {r} is not in (0, rho = {rho}]")));
    }
    let cost = radii.iter().map(|r| r.powf(s)).sum();
    Ok(CoverCost { s, rho, radii, cost })
}

/// Per-block line of [`hs_upper_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCost {
    pub n: u32,
    pub dn_count: usize,
    pub c_total: usize,
    pub c_max: usize,
    /// `c_total (3 psi(2^n))^s`.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsBound {
    pub s: f64,
    pub blocks: Vec<BlockCost>,
    /// `(k, sum over computed n >= k of cost_n)`.
    pub tails: Vec<(u32, f64)>,
    /// Blocks skipped because rationals escape `6 D_n`.
    pub below_threshold: Vec<u32>,
    /// First block that could not be built, if the range was cut short.
    pub truncated_at: Option<u32>,
}

/// Cost of the cover `{3B : B in C(D_n), D_n in D_n, n >= k}` of
/// `W_K(psi)`, summed over the computable blocks in `k_min..=k_max`.
pub fn hs_upper_bound(
    sys: &IteratedFunctionSystem,
    psi: &PsiFunction,
    s: f64,
    k_min: u32,
    k_max: u32,
) -> Result<HsBound> {
    if !(s >= 0.0 && s <= sys.delta()) {
        return Err(Error::invalid(format!("need 0 <= s <= delta = {}, got {s}", sys.delta())));
    }
    if k_min > k_max {
        return Err(Error::invalid(format!("empty block range {k_min}..={k_max}")));
    }
    let mut blocks = Vec::new();
    let mut below_threshold = Vec::new();
    let mut truncated_at = None;
    for n in k_min..=k_max {
        match block_census(sys, psi, n) {
            Ok(c) => {
                let c_total = c.total_c();
                blocks.push(BlockCost {
                    n,
                    dn_count: c.dn.balls.len(),
                    c_total,
                    c_max: c.max_c(),
                    cost: c_total as f64 * (3.0 * c.rho).powf(s),
                });
            }
            Err(Error::Precondition(_)) if blocks.is_empty() => below_threshold.push(n),
            Err(Error::Infeasible { .. }) | Err(Error::TooLarge(_)) => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut tails = Vec::with_capacity(blocks.len());
    let mut acc = 0.0;
    for b in blocks.iter().rev() {
        acc += b.cost;
        tails.push((b.n, acc));
    }
    tails.reverse();
    Ok(HsBound {
        s,
        blocks,
        tails,
        below_threshold,
        truncated_at,
    })
}

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::affine::{dist, dot, pad, Affine, Point};
use super::IteratedFunctionSystem;
use crate::error::{check_dim, Error, Result};
use crate::geometry::{Ball, Slab};

/// Straddling cylinders are never refined past this word length.
pub const MAX_DEPTH: u32 = 64;
const NODE_BUDGET: usize = 20_000_000;
const OUTWARD_SLACK: f64 = 1e-12;

/// Closed interval `[lo, hi]` known to contain a mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassInterval {
    pub lo: f64,
    pub hi: f64,
}

impl MassInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Intervals overlap (both may contain the true value).
    pub fn meets(&self, other: &MassInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Placement {
    Inside,
    Outside,
    Straddle,
}

/// A closed region tested against the enclosing ball of a cylinder.
pub(crate) trait Region {
    fn place(&self, center: &Point, radius: f64) -> Placement;
}

pub(crate) struct BallRegion {
    center: Point,
    radius: f64,
    margin: f64,
}

impl BallRegion {
    pub(crate) fn new(b: &Ball) -> Self {
        let scale = b.radius() + b.center().iter().map(|x| x.abs()).fold(0.0, f64::max);
        BallRegion {
            center: pad(b.center()),
            radius: b.radius(),
            margin: 1e-13 * scale,
        }
    }
}

impl Region for BallRegion {
    fn place(&self, c: &Point, r: f64) -> Placement {
        let d = dist(&self.center, c);
        if d + r <= self.radius - self.margin {
            Placement::Inside
        } else if d - r > self.radius + self.margin {
            Placement::Outside
        } else {
            Placement::Straddle
        }
    }
}

pub(crate) struct BallSlabRegion {
    ball: BallRegion,
    normal: Point,
    offset: f64,
    epsilon: f64,
}

impl BallSlabRegion {
    pub(crate) fn new(b: &Ball, s: &Slab) -> Self {
        BallSlabRegion {
            ball: BallRegion::new(b),
            normal: pad(s.plane().normal()),
            offset: s.plane().offset(),
            epsilon: s.epsilon(),
        }
    }
}

impl Region for BallSlabRegion {
    fn place(&self, c: &Point, r: f64) -> Placement {
        let ball = self.ball.place(c, r);
        if ball == Placement::Outside {
            return Placement::Outside;
        }
        let h = (dot(&self.normal, c) - self.offset).abs();
        let m = self.ball.margin + 1e-13 * self.offset.abs();
        if h - r > self.epsilon + m {
            Placement::Outside
        } else if ball == Placement::Inside && h + r <= self.epsilon - m {
            Placement::Inside
        } else {
            Placement::Straddle
        }
    }
}

struct Node {
    weight: f64,
    seq: u64,
    depth: u32,
    map: Affine,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // heaviest first, earliest-pushed first among equals
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy)]
struct Stop {
    abs: f64,
    rel: f64,
}

fn enclose(sys: &IteratedFunctionSystem, region: &dyn Region, stop: Stop) -> Result<MassInterval> {
    let hc = *sys.hull_center_padded();
    let hr = sys.hull_radius_raw();
    let floor = stop.abs / 1024.0;
    let finish = |lo: f64, pending: f64| {
        let slack = if lo + pending > 0.0 { OUTWARD_SLACK } else { 0.0 };
        MassInterval {
            lo: (lo - slack).max(0.0),
            hi: (lo + pending + slack).min(1.0),
        }
    };
    let done = |lo: f64, pending: f64| pending <= 0.999 * stop.abs || pending <= stop.rel * lo;

    let root = Affine::identity();
    let mut lo = 0.0;
    let mut pending = 0.0;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    match region.place(&root.apply(&hc), hr) {
        Placement::Inside => lo = 1.0,
        Placement::Outside => {}
        Placement::Straddle => {
            pending = 1.0;
            heap.push(Node {
                weight: 1.0,
                seq,
                depth: 0,
                map: root,
            });
        }
    }
    let mut pops = 0usize;
    let mut deepest = 0u32;
    while !done(lo, pending) {
        let Some(node) = heap.pop() else { break };
        pops += 1;
        if node.weight < floor || pops > NODE_BUDGET {
            heap.push(node);
            break;
        }
        if node.depth >= MAX_DEPTH {
            continue;
        }
        pending -= node.weight;
        for (i, a) in sys.affines().iter().enumerate() {
            let w = node.weight * sys.weights()[i];
            let map = node.map.compose(a);
            match region.place(&map.apply(&hc), hr * map.scale()) {
                Placement::Inside => lo += w,
                Placement::Outside => {}
                Placement::Straddle => {
                    pending += w;
                    seq += 1;
                    heap.push(Node {
                        weight: w,
                        seq,
                        depth: node.depth + 1,
                        map,
                    });
                    deepest = deepest.max(node.depth + 1);
                }
            }
        }
    }
    // Guard against drift in the running sum.
    let pending = pending.max(0.0);
    let out = finish(lo, pending);
    if done(lo, pending) {
        Ok(out)
    } else {
        Err(Error::NonConvergence {
            lo: out.lo,
            hi: out.hi,
            depth: deepest,
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive, got {tol}")))
    }
}

/// Encloses `mu(b)` in an interval of width at most `tol`.
///
/// Cylinders whose enclosing ball lies inside `b` count fully, those outside
/// count zero, and straddling ones are split heaviest first until their
/// total weight drops below `tol`.
pub fn measure_of_ball(sys: &IteratedFunctionSystem, b: &Ball, tol: f64) -> Result<MassInterval> {
    check_dim(sys.dim(), b.dim())?;
    check_tol(tol)?;
    enclose(sys, &BallRegion::new(b), Stop { abs: tol, rel: 0.0 })
}

/// Stops once the width is at most `rel * lo` or `abs`, whichever comes
/// first. Suited to small balls whose mass is far below any fixed `tol`.
pub fn measure_of_ball_relative(
    sys: &IteratedFunctionSystem,
    b: &Ball,
    rel: f64,
    abs: f64,
) -> Result<MassInterval> {
    check_dim(sys.dim(), b.dim())?;
    check_tol(rel)?;
    check_tol(abs)?;
    enclose(sys, &BallRegion::new(b), Stop { abs, rel })
}

/// Encloses `mu(b ∩ s)` in an interval of width at most `tol`.
pub fn measure_of_slab_in_ball(
    sys: &IteratedFunctionSystem,
    b: &Ball,
    s: &Slab,
    tol: f64,
) -> Result<MassInterval> {
    check_dim(sys.dim(), b.dim())?;
    check_dim(sys.dim(), s.plane().dim())?;
    check_tol(tol)?;
    enclose(sys, &BallSlabRegion::new(b, s), Stop { abs: tol, rel: 0.0 })
}

pub fn measure_of_slab_in_ball_relative(
    sys: &IteratedFunctionSystem,
    b: &Ball,
    s: &Slab,
    rel: f64,
    abs: f64,
) -> Result<MassInterval> {
    check_dim(sys.dim(), b.dim())?;
    check_dim(sys.dim(), s.plane().dim())?;
    check_tol(rel)?;
    check_tol(abs)?;
    enclose(sys, &BallSlabRegion::new(b, s), Stop { abs, rel })
}

/// A cylinder `S_w(K)` from a Moran cut.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub word: Vec<u8>,
    /// `S_w(anchor)`, a point of `K` inside the cylinder.
    pub point: Vec<f64>,
    /// Radius of the ball `S_w(hull)` containing the cylinder.
    pub radius: f64,
    pub weight: f64,
}

/// Moran cut at diameter `diam`: the words `w` with `diam S_w(hull) <= diam`
/// whose parent is larger. Branches whose enclosing ball misses `region`
/// are pruned. Fails with `TooLarge` past `budget` cylinders.
pub(crate) fn moran_cut_in(
    sys: &IteratedFunctionSystem,
    diam: f64,
    region: Option<&dyn Region>,
    budget: usize,
) -> Result<Vec<Cylinder>> {
    if !(diam > 0.0) {
        return Err(Error::invalid(format!("cut diameter must be positive, got {diam}")));
    }
    let hc = *sys.hull_center_padded();
    let hr = sys.hull_radius_raw();
    let anchor = *sys.anchor_padded();
    let mut out = Vec::new();
    // depth-first in lexicographic word order
    let mut stack: Vec<(Vec<u8>, Affine, f64)> = vec![(Vec::new(), Affine::identity(), 1.0)];
    while let Some((word, map, weight)) = stack.pop() {
        if let Some(reg) = region {
            if reg.place(&map.apply(&hc), hr * map.scale()) == Placement::Outside {
                continue;
            }
        }
        if 2.0 * hr * map.scale() <= diam {
            if out.len() >= budget {
                return Err(Error::TooLarge(budget as f64));
            }
            let p = map.apply(&anchor);
            out.push(Cylinder {
                word,
                point: p[..sys.dim()].to_vec(),
                radius: hr * map.scale(),
                weight,
            });
            continue;
        }
        for (i, a) in sys.affines().iter().enumerate().rev() {
            let mut w = word.clone();
            w.push(i as u8);
            stack.push((w, map.compose(a), weight * sys.weights()[i]));
        }
    }
    Ok(out)
}

/// Moran cut of the whole attractor at diameter `diam`.
pub fn cylinder_nets(sys: &IteratedFunctionSystem, diam: f64, budget: usize) -> Result<Vec<Cylinder>> {
    moran_cut_in(sys, diam, None, budget)
}

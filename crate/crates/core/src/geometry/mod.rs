//! Euclidean primitives: balls, boxes, hyperplanes and their slabs, exact
//! rational points and simplices, the dyadic scales `r_n`, and the greedy
//! 3r covering lemma.

mod cover;
mod rational;
mod witness;

pub use cover::{greedy_cover, Cover, COVER_EXPANSION};
pub use rational::{
    affine_basis, integer_determinant, simplex_volume_times_dfact, RationalPoint, Simplex,
};
pub use witness::{hyperplane_witness, slab_of, HyperplaneWitness};

use crate::error::{check_dim, Error, Result};

/// Tolerance on `|normal| = 1` for hyperplanes.
pub const UNIT_NORMAL_TOL: f64 = 1e-12;

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Closed Euclidean ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("ball center must have at least one coordinate"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("ball center must be finite"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Same center, radius multiplied by `k`. `3B` and `6B` in the covering
    /// arguments are `dilate(3.0)` and `dilate(6.0)`.
    pub fn dilate(&self, k: f64) -> Ball {
        assert!(k > 0.0 && k.is_finite(), "dilation factor must be positive");
        Ball {
            center: self.center.clone(),
            radius: self.radius * k,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        distance(&self.center, x) <= self.radius
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        distance(&self.center, &other.center) + other.radius <= self.radius
    }

    /// Axis-aligned bounding box of the ball.
    pub fn bounding_box(&self) -> AxisBox {
        AxisBox {
            min: self.center.iter().map(|c| c - self.radius).collect(),
            max: self.center.iter().map(|c| c + self.radius).collect(),
        }
    }
}

/// Closed axis-aligned box `[min_0, max_0] x ... x [min_{d-1}, max_{d-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl AxisBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        check_dim(min.len(), max.len())?;
        if min.is_empty() {
            return Err(Error::invalid("box must have at least one coordinate"));
        }
        for (lo, hi) in min.iter().zip(&max) {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::invalid(format!("box side [{lo}, {hi}] is not a bounded interval")));
            }
        }
        Ok(AxisBox { min, max })
    }

    pub fn unit(d: usize) -> AxisBox {
        AxisBox {
            min: vec![0.0; d],
            max: vec![1.0; d],
        }
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn volume(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn diameter(&self) -> f64 {
        distance(&self.min, &self.max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| if mask >> i & 1 == 1 { self.max[i] } else { self.min[i] })
                    .collect()
            })
            .collect()
    }
}

/// Affine hyperplane `{x : normal . x = offset}` with a unit normal.
///
/// For `d = 1` this is the single point `offset * normal[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

impl Hyperplane {
    /// Builds the plane from any nonzero normal; both normal and offset are
    /// rescaled so the stored normal has unit length.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let len = norm(&normal);
        if normal.is_empty() || !(len > 0.0 && len.is_finite()) || !offset.is_finite() {
            return Err(Error::invalid("hyperplane needs a finite nonzero normal and finite offset"));
        }
        Ok(Hyperplane {
            normal: normal.iter().map(|c| c / len).collect(),
            offset: offset / len,
        })
    }

    /// Plane through `point` with the given normal.
    pub fn through(point: &[f64], normal: Vec<f64>) -> Result<Self> {
        check_dim(normal.len(), point.len())?;
        let len = norm(&normal);
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::invalid("hyperplane normal must be nonzero"));
        }
        let unit: Vec<f64> = normal.iter().map(|c| c / len).collect();
        let offset = dot(&unit, point);
        Ok(Hyperplane { normal: unit, offset })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// Closed `epsilon`-neighbourhood of a hyperplane. `epsilon = 0` is the
/// plane itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Slab {
    plane: Hyperplane,
    epsilon: f64,
}

impl Slab {
    pub fn new(plane: Hyperplane, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!("slab half-width must be >= 0, got {epsilon}")));
        }
        Ok(Slab { plane, epsilon })
    }

    pub fn plane(&self) -> &Hyperplane {
        &self.plane
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.plane.signed_distance(x).abs() <= self.epsilon
    }

    pub fn widen(&self, k: f64) -> Slab {
        Slab {
            plane: self.plane.clone(),
            epsilon: self.epsilon * k,
        }
    }
}

/// Lebesgue measure of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // kappa(d) = kappa(d - 2) * 2 pi / d
    let mut even = 1.0;
    let mut odd = 2.0;
    if d == 0 {
        return even;
    }
    let mut k = 1;
    while k < d {
        k += 1;
        if k % 2 == 0 {
            even *= 2.0 * std::f64::consts::PI / k as f64;
        } else {
            odd *= 2.0 * std::f64::consts::PI / k as f64;
        }
    }
    if d % 2 == 0 {
        even
    } else {
        odd
    }
}

pub fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// The radius attached to the dyadic denominator block `2^n <= q < 2^{n+1}`:
/// `r_n = (1/6) (1/(kappa d!))^{1/d} 2^{-(d+1)(n+1)/d}`, chosen so that the
/// 6-dilate of a ball of radius `r_n` has volume exactly
/// `2^{-(d+1)(n+1)} / d!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicScale {
    n: u32,
    d: usize,
    r_n: f64,
    kappa: f64,
}

impl DyadicScale {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if n > 60 {
            return Err(Error::invalid(format!("block index {n} overflows 64-bit denominators")));
        }
        let kappa = unit_ball_volume(d);
        let df = d as f64;
        let r_n = (1.0 / 6.0)
            * (1.0 / (kappa * factorial(d))).powf(1.0 / df)
            * 2f64.powf(-(df + 1.0) * (n as f64 + 1.0) / df);
        Ok(DyadicScale { n, d, r_n, kappa })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r_n(&self) -> f64 {
        self.r_n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Smallest denominator of the block, `2^n`.
    pub fn q_min(&self) -> u64 {
        1u64 << self.n
    }

    /// One past the largest denominator, `2^{n+1}`.
    pub fn q_end(&self) -> u64 {
        1u64 << (self.n + 1)
    }

    pub fn contains_denominator(&self, q: u64) -> bool {
        q >= self.q_min() && q < self.q_end()
    }

    /// `kappa (6 r_n)^d`, the volume of `6 D_n`.
    pub fn six_dilate_volume(&self) -> f64 {
        self.kappa * (6.0 * self.r_n).powi(self.d as i32)
    }

    /// `2^{-(d+1)(n+1)} / d!`, which the 6-dilate volume equals identically.
    pub fn volume_ceiling(&self) -> f64 {
        2f64.powi(-((self.d as i32 + 1) * (self.n as i32 + 1))) / factorial(self.d)
    }

    pub fn ball(&self, center: Vec<f64>) -> Result<Ball> {
        check_dim(self.d, center.len())?;
        Ball::new(center, self.r_n)
    }
}

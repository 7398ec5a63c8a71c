//! Self-similar iterated function systems under the open set condition and
//! their natural measure `mu`, the normalised restriction of `H^delta` to the
//! attractor `K`.
//!
//! Every cylinder `S_w(K)` has mass `prod ratio_i^delta` and sits inside the
//! ball `S_w(hull)`, where `hull` is a ball mapped into itself by every map.
//! Ball and slab masses are enclosed by refining cylinders that straddle the
//! region (see [`measure_of_ball`]).

mod affine;
mod file;
mod measure;
mod osc;
mod sample;
pub mod systems;

pub(crate) use affine::{Affine, Point, MAX_DIM};
pub use file::{parse_system, read_system};
pub use measure::{
    cylinder_nets, measure_of_ball, measure_of_ball_relative, measure_of_slab_in_ball,
    measure_of_slab_in_ball_relative, Cylinder, MassInterval, MAX_DEPTH,
};
pub(crate) use measure::{moran_cut_in, BallRegion, BallSlabRegion, Region};
pub use sample::{sample_measure, sample_with_words, CodedSample, SAMPLE_DEPTH};
pub(crate) use sample::{sample_in_cylinder, sample_rng};

use log::warn;

use crate::error::{check_dim, Error, Result};
use crate::geometry::{AxisBox, Ball};

/// Tolerance for `R R^T = I`.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Tolerance for `sum ratio_i^delta = 1`.
pub const MORAN_TOL: f64 = 1e-10;

/// `x -> ratio * R x + t` with `R` orthogonal and `0 < ratio < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMap {
    ratio: f64,
    rotation: Vec<f64>,
    translation: Vec<f64>,
}

impl SimilarityMap {
    /// `rotation` is row-major `d x d`.
    pub fn new(ratio: f64, rotation: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::invalid(format!("dimension must be in 1..={MAX_DIM}, got {d}")));
        }
        check_dim(d * d, rotation.len())?;
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid(format!("similarity ratio must lie in (0, 1), got {ratio}")));
        }
        if rotation.iter().chain(&translation).any(|v| !v.is_finite()) {
            return Err(Error::invalid("rotation and translation must be finite"));
        }
        for i in 0..d {
            for j in 0..d {
                let rr: f64 = (0..d).map(|k| rotation[i * d + k] * rotation[j * d + k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (rr - target).abs() > ORTHOGONALITY_TOL {
                    return Err(Error::invalid(format!(
                        "rotation is not orthogonal: (R R^T)[{i}][{j}] = {rr}"
                    )));
                }
            }
        }
        Ok(SimilarityMap {
            ratio,
            rotation,
            translation,
        })
    }

    /// Pure scaling plus translation.
    pub fn homothety(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        let mut rotation = vec![0.0; d * d];
        for i in 0..d {
            rotation[i * d + i] = 1.0;
        }
        SimilarityMap::new(ratio, rotation, translation)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                self.ratio * (0..d).map(|k| self.rotation[i * d + k] * x[k]).sum::<f64>()
                    + self.translation[i]
            })
            .collect()
    }

    pub(crate) fn affine(&self) -> Affine {
        Affine::from_parts(self.ratio, &self.rotation, &self.translation)
    }

    /// Unique fixed point, solving `(I - ratio R) x = t`.
    pub fn fixed_point(&self) -> Vec<f64> {
        let d = self.dim();
        let mut a: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut row: Vec<f64> = (0..d)
                    .map(|k| {
                        let id = if i == k { 1.0 } else { 0.0 };
                        id - self.ratio * self.rotation[i * d + k]
                    })
                    .collect();
                row.push(self.translation[i]);
                row
            })
            .collect();
        // Gaussian elimination with partial pivoting; I - ratio R is
        // nonsingular because ratio < 1.
        for col in 0..d {
            let pivot = (col..d)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .expect("nonempty");
            a.swap(col, pivot);
            for row in 0..d {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..=d {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                    }
                }
            }
        }
        (0..d).map(|i| a[i][d] / a[i][i]).collect()
    }
}

/// Witness for the open set condition. `Polygon` is a convex polygon in the
/// plane, needed for systems such as the von Koch curve whose natural open
/// set is a triangle.
#[derive(Debug, Clone, PartialEq)]
pub enum OpenSet {
    Ball(Ball),
    Box(AxisBox),
    Polygon(Vec<[f64; 2]>),
}

impl OpenSet {
    pub fn dim(&self) -> usize {
        match self {
            OpenSet::Ball(b) => b.dim(),
            OpenSet::Box(b) => b.dim(),
            OpenSet::Polygon(_) => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            OpenSet::Ball(b) => 2.0 * b.radius(),
            OpenSet::Box(b) => b.diameter(),
            OpenSet::Polygon(v) => v
                .iter()
                .flat_map(|a| v.iter().map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()))
                .fold(0.0, f64::max),
        }
    }
}

/// Root of `sum_i ratio_i^s = 1` by bisection on `[0, d]`.
pub fn similarity_dimension(maps: &[SimilarityMap]) -> Result<f64> {
    if maps.len() < 2 {
        return Err(Error::invalid(format!("a system needs at least two maps, got {}", maps.len())));
    }
    let d = maps[0].dim();
    for m in maps {
        check_dim(d, m.dim())?;
    }
    let moran = |s: f64| maps.iter().map(|m| m.ratio.powf(s)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, d as f64);
    if moran(hi) > 0.0 {
        return Err(Error::invalid(format!(
            "similarity dimension exceeds the ambient dimension {d}; the system cannot satisfy the open set condition in R^{d}"
        )));
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if moran(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A validated system with its similarity dimension and natural weights.
#[derive(Debug, Clone)]
pub struct IteratedFunctionSystem {
    dim: usize,
    maps: Vec<SimilarityMap>,
    open_set: OpenSet,
    delta: f64,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    affines: Vec<Affine>,
    hull_center: Point,
    hull_radius: f64,
    anchor: Point,
    spans: bool,
}

impl IteratedFunctionSystem {
    /// Validates the maps, solves the Moran equation and checks the open
    /// set condition for the supplied witness.
    pub fn new(maps: Vec<SimilarityMap>, open_set: OpenSet) -> Result<Self> {
        let delta = similarity_dimension(&maps)?;
        let dim = maps[0].dim();
        check_dim(dim, open_set.dim())?;
        let raw: Vec<f64> = maps.iter().map(|m| m.ratio.powf(delta)).collect();
        let residual = raw.iter().sum::<f64>() - 1.0;
        if residual.abs() > MORAN_TOL {
            return Err(Error::invalid(format!("Moran residual {residual:e} exceeds {MORAN_TOL:e}")));
        }
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        *cumulative.last_mut().expect("k >= 2") = 1.0;

        osc::check(&maps, &open_set)?;

        let affines: Vec<Affine> = maps.iter().map(SimilarityMap::affine).collect();
        let fixed: Vec<Vec<f64>> = maps.iter().map(SimilarityMap::fixed_point).collect();
        let mut center = [0.0; MAX_DIM];
        for p in &fixed {
            for (c, v) in center.iter_mut().zip(p) {
                *c += v / fixed.len() as f64;
            }
        }
        // Smallest radius with S_i(B(c, R)) inside B(c, R) for every i.
        let hull_radius = affines
            .iter()
            .map(|a| affine::dist(&a.apply(&center), &center) / (1.0 - a.scale()))
            .fold(0.0, f64::max);
        let hull_radius = if hull_radius > 0.0 { hull_radius } else { f64::MIN_POSITIVE };
        let anchor = affine::pad(&fixed[0]);
        let spans = affinely_spans(&fixed, dim);
        if !spans {
            warn!("fixed points of the maps do not affinely span R^{dim}; the system may be reducible");
        }
        Ok(IteratedFunctionSystem {
            dim,
            maps,
            open_set,
            delta,
            weights,
            cumulative,
            affines,
            hull_center: center,
            hull_radius,
            anchor,
            spans,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maps(&self) -> &[SimilarityMap] {
        &self.maps
    }

    pub fn open_set(&self) -> &OpenSet {
        &self.open_set
    }

    /// Similarity dimension, equal to `dim K` under the open set condition.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `ratio_i^delta`, normalised to sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn moran_residual(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio.powf(self.delta)).sum::<f64>() - 1.0
    }

    /// A ball containing `K` that every map sends into itself.
    pub fn hull(&self) -> Ball {
        Ball::new(self.hull_center[..self.dim].to_vec(), self.hull_radius).expect("positive radius")
    }

    /// Upper bound on `diam K`.
    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.hull_radius
    }

    /// Fixed point of the first map, a point of `K`.
    pub fn anchor(&self) -> Vec<f64> {
        self.anchor[..self.dim].to_vec()
    }

    pub fn fixed_points(&self) -> Vec<Vec<f64>> {
        self.maps.iter().map(SimilarityMap::fixed_point).collect()
    }

    /// Sufficient stand-in for irreducibility: the fixed points affinely span
    /// `R^d`.
    pub fn fixed_points_span(&self) -> bool {
        self.spans
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio).fold(0.0, f64::max)
    }

    /// `diam(open_set) / 10`, the default scale below which hypotheses are
    /// tested.
    pub fn default_r0(&self) -> f64 {
        self.open_set.diameter() / 10.0
    }

    pub(crate) fn affines(&self) -> &[Affine] {
        &self.affines
    }

    pub(crate) fn hull_center_padded(&self) -> &Point {
        &self.hull_center
    }

    pub(crate) fn hull_radius_raw(&self) -> f64 {
        self.hull_radius
    }

    pub(crate) fn anchor_padded(&self) -> &Point {
        &self.anchor
    }

    pub(crate) fn cumulative_weights(&self) -> &[f64] {
        &self.cumulative
    }

    /// Composition `S_{w_1} o ... o S_{w_m}`.
    pub(crate) fn word_map(&self, word: &[u8]) -> Affine {
        word.iter()
            .fold(Affine::identity(), |acc, &i| acc.compose(&self.affines[i as usize]))
    }

    /// Cylinder weight `prod ratio_{w_i}^delta`.
    pub fn word_weight(&self, word: &[u8]) -> f64 {
        word.iter().map(|&i| self.weights[i as usize]).product()
    }

    /// Ball `S_w(hull)`, which contains the cylinder `S_w(K)`.
    pub fn cylinder_ball(&self, word: &[u8]) -> Ball {
        let a = self.word_map(word);
        let c = a.apply(&self.hull_center);
        Ball::new(c[..self.dim].to_vec(), self.hull_radius * a.scale()).expect("positive radius")
    }
}

fn affinely_spans(points: &[Vec<f64>], d: usize) -> bool {
    let base = &points[0];
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for p in &points[1..] {
        let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
        for u in &frame {
            let c: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 {
            frame.push(v.iter().map(|x| x / len).collect());
        }
    }
    frame.len() == d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_dimension_matches_closed_form() {
        let sys = systems::cantor();
        let closed = 2f64.ln() / 3f64.ln();
        assert!((sys.delta() - closed).abs() < 1e-12);
        assert!(sys.moran_residual().abs() <= MORAN_TOL);
    }

    #[test]
    fn gasket_dimension_matches_closed_form() {
        let sys = systems::sierpinski_gasket();
        let closed = 3f64.ln() / 2f64.ln();
        assert!((sys.delta() - closed).abs() < 1e-12);
    }

    #[test]
    fn single_map_is_rejected() {
        let m = SimilarityMap::homothety(0.5, vec![0.0]).unwrap();
        assert!(similarity_dimension(&[m]).is_err());
    }

    #[test]
    fn overfull_system_is_rejected() {
        // three maps of ratio 1/2 on the line: Moran root log 3 / log 2 > 1
        let maps: Vec<_> = [0.0, 0.25, 0.5]
            .iter()
            .map(|&t| SimilarityMap::homothety(0.5, vec![t]).unwrap())
            .collect();
        assert!(similarity_dimension(&maps).is_err());
    }

    #[test]
    fn ratio_bounds() {
        assert!(SimilarityMap::homothety(1.0, vec![0.0]).is_err());
        assert!(SimilarityMap::homothety(0.0, vec![0.0]).is_err());
        assert!(SimilarityMap::new(0.5, vec![1.0, 0.1, 0.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn fixed_point_of_rotated_map() {
        let (s, c) = (60f64.to_radians().sin(), 0.5);
        let m = SimilarityMap::new(1.0 / 3.0, vec![c, -s, s, c], vec![1.0 / 3.0, 0.0]).unwrap();
        let p = m.fixed_point();
        let q = m.apply(&p);
        assert!(affine::dist(&affine::pad(&p), &affine::pad(&q)) < 1e-14);
    }

    #[test]
    fn hull_is_invariant() {
        for sys in systems::all() {
            let hull = sys.hull();
            for m in sys.maps() {
                let image = Ball::new(m.apply(hull.center()), m.ratio() * hull.radius()).unwrap();
                let slack = 1e-12 * hull.radius();
                let reach = crate::geometry::distance(image.center(), hull.center()) + image.radius();
                assert!(reach <= hull.radius() + slack);
            }
            assert!(sys.fixed_points_span());
        }
    }

    #[test]
    fn cantor_hull_is_unit_interval() {
        let sys = systems::cantor();
        let hull = sys.hull();
        assert!((hull.center()[0] - 0.5).abs() < 1e-15);
        assert!((hull.radius() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collinear_fixed_points_do_not_span() {
        let maps = vec![
            SimilarityMap::homothety(1.0 / 3.0, vec![0.0, 0.0]).unwrap(),
            SimilarityMap::homothety(1.0 / 3.0, vec![2.0 / 3.0, 0.0]).unwrap(),
        ];
        let open = OpenSet::Box(AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap());
        let sys = IteratedFunctionSystem::new(maps, open).unwrap();
        assert!(!sys.fixed_points_span());
    }
}

use num_traits::ToPrimitive;

use super::rational::{affine_basis, RationalPoint, Simplex};
use super::{dot, norm, Ball, DyadicScale, Hyperplane, Slab};
use crate::error::{check_dim, Error, Result};

/// Relative slack on the `6 D_n` containment test, absorbing the rounding
/// of `p/q` to `f64`.
const CONTAINMENT_SLACK: f64 = 1e-12;

/// Outcome of [`hyperplane_witness`].
#[derive(Debug, Clone, PartialEq)]
pub enum HyperplaneWitness {
    /// A hyperplane through every input point.
    Plane(Hyperplane),
    /// `d + 1` affinely independent inputs. Under the preconditions this
    /// cannot happen; a `Simplex` is a counterexample.
    Simplex(Simplex),
}

impl HyperplaneWitness {
    pub fn is_plane(&self) -> bool {
        matches!(self, HyperplaneWitness::Plane(_))
    }

    pub fn plane(&self) -> Option<&Hyperplane> {
        match self {
            HyperplaneWitness::Plane(h) => Some(h),
            HyperplaneWitness::Simplex(_) => None,
        }
    }
}

/// Finds the hyperplane carrying all rational points with denominators in the
/// block of `block` that lie in `6 * container`.
///
/// Fails with [`Error::Precondition`] when a denominator is outside
/// `[2^n, 2^{n+1})`, a point is outside the 6-dilate, or the container radius
/// is not `r_n`.
pub fn hyperplane_witness(
    points: &[RationalPoint],
    container: &Ball,
    block: &DyadicScale,
) -> Result<HyperplaneWitness> {
    let d = block.d();
    check_dim(d, container.dim())?;
    let rel = (container.radius() - block.r_n()).abs() / block.r_n();
    if rel > 1e-9 {
        return Err(Error::precondition(format!(
            "container radius {} is not r_{} = {}",
            container.radius(),
            block.n(),
            block.r_n()
        )));
    }
    let outer = 6.0 * container.radius() * (1.0 + CONTAINMENT_SLACK);
    for p in points {
        check_dim(d, p.dim())?;
        match p.denominator_u64() {
            Some(q) if block.contains_denominator(q) => {}
            _ => {
                return Err(Error::precondition(format!(
                    "denominator of {p} outside block [{}, {})",
                    block.q_min(),
                    block.q_end()
                )))
            }
        }
        if super::distance(&p.to_f64(), container.center()) > outer {
            return Err(Error::precondition(format!("{p} lies outside the 6-dilate of the container")));
        }
    }

    let basis = affine_basis(points)?;
    if basis.len() == d + 1 {
        let vertices = basis.iter().map(|&i| points[i].clone()).collect();
        return Ok(HyperplaneWitness::Simplex(Simplex::new(vertices)?));
    }
    let plane = plane_through_basis(points, &basis, container.center())?;
    Ok(HyperplaneWitness::Plane(plane))
}

/// The `epsilon`-neighbourhood of the hyperplane through `points`.
pub fn slab_of(points: &[RationalPoint], epsilon: f64) -> Result<Slab> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("slab_of needs at least one point"))?;
    let d = first.dim();
    let basis = affine_basis(points)?;
    if basis.len() == d + 1 {
        return Err(Error::precondition("points are affinely independent, no hyperplane contains them"));
    }
    let anchor = first.to_f64();
    let plane = plane_through_basis(points, &basis, &anchor)?;
    Slab::new(plane, epsilon)
}

/// Hyperplane whose normal is the last vector of the Gram-Schmidt completion
/// of the basis differences by the standard basis `e_1, ..., e_d`, with its
/// first nonzero component made positive. `fallback_anchor` positions the
/// plane when there are no points.
fn plane_through_basis(
    points: &[RationalPoint],
    basis: &[usize],
    fallback_anchor: &[f64],
) -> Result<Hyperplane> {
    let d = fallback_anchor.len();
    let anchor = match basis.first() {
        Some(&i) => points[i].to_f64(),
        None => fallback_anchor.to_vec(),
    };
    let base = basis.first().map(|&i| &points[i]);
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    for &i in basis.iter().skip(1) {
        let base = base.expect("basis has a first element");
        // exact difference, then rounded
        let diff: Vec<f64> = (0..d)
            .map(|k| {
                (points[i].coordinate(k) - base.coordinate(k))
                    .to_f64()
                    .unwrap_or(f64::NAN)
            })
            .collect();
        push_orthonormal(&mut frame, diff, 0.0);
    }
    let mut normal = None;
    for axis in 0..d {
        if frame.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        if push_orthonormal(&mut frame, e, 1e-8) {
            normal = frame.last().cloned();
        }
    }
    let mut normal = normal.ok_or_else(|| Error::precondition("could not complete the point differences"))?;
    if let Some(lead) = normal.iter().copied().find(|c| c.abs() > 1e-12) {
        if lead < 0.0 {
            normal.iter_mut().for_each(|c| *c = -*c);
        }
    }
    Hyperplane::through(&anchor, normal)
}

/// Twice-orthogonalized Gram-Schmidt step. Returns whether `v` was added.
fn push_orthonormal(frame: &mut Vec<Vec<f64>>, mut v: Vec<f64>, min_norm: f64) -> bool {
    for _ in 0..2 {
        for u in frame.iter() {
            let c = dot(u, &v);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
    }
    let len = norm(&v);
    if len > min_norm && len > 0.0 {
        v.iter_mut().for_each(|x| *x /= len);
        frame.push(v);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(p: &[i64], q: i64) -> RationalPoint {
        RationalPoint::from_i64(p, q).unwrap()
    }

    #[test]
    fn single_point_in_one_dimension() {
        let block = DyadicScale::new(1, 1).unwrap();
        let container = block.ball(vec![0.5]).unwrap();
        let w = hyperplane_witness(&[rp(&[1], 2)], &container, &block).unwrap();
        let plane = w.plane().unwrap();
        assert_eq!(plane.normal(), &[1.0]);
        assert_eq!(plane.offset(), 0.5);
    }

    #[test]
    fn denominator_outside_block_is_rejected() {
        let block = DyadicScale::new(1, 1).unwrap();
        let container = block.ball(vec![0.25]).unwrap();
        let err = hyperplane_witness(&[rp(&[1], 4)], &container, &block).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn point_outside_six_dilate_is_rejected() {
        let block = DyadicScale::new(1, 1).unwrap();
        let container = block.ball(vec![0.0]).unwrap();
        let err = hyperplane_witness(&[rp(&[1], 2)], &container, &block).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn container_radius_must_be_r_n() {
        let block = DyadicScale::new(1, 1).unwrap();
        let container = Ball::new(vec![0.5], 0.1).unwrap();
        assert!(hyperplane_witness(&[rp(&[1], 2)], &container, &block).is_err());
    }

    #[test]
    fn distinct_points_have_full_affine_rank() {
        let basis = affine_basis(&[rp(&[1], 2), rp(&[1], 3)]).unwrap();
        assert_eq!(basis, vec![0, 1]);
    }

    #[test]
    fn empty_point_set_gets_a_plane_through_the_center() {
        let block = DyadicScale::new(2, 2).unwrap();
        let container = block.ball(vec![0.3, 0.7]).unwrap();
        let w = hyperplane_witness(&[], &container, &block).unwrap();
        let plane = w.plane().unwrap();
        assert!(plane.signed_distance(&[0.3, 0.7]).abs() < 1e-15);
        assert_eq!(plane.normal(), &[0.0, 1.0]);
    }

    #[test]
    fn slab_around_x_axis() {
        let s = slab_of(&[rp(&[0, 0], 1), rp(&[1, 0], 1)], 0.1).unwrap();
        assert!((s.plane().normal()[0]).abs() < 1e-15);
        assert!((s.plane().normal()[1] - 1.0).abs() < 1e-15);
        assert!(s.plane().offset().abs() < 1e-15);
        assert_eq!(s.epsilon(), 0.1);
        assert!(s.contains(&[0.3, 0.099]));
        assert!(!s.contains(&[0.3, 0.101]));
    }

    #[test]
    fn slab_around_a_point() {
        let s = slab_of(&[rp(&[1], 2)], 0.01).unwrap();
        assert_eq!(s.plane().offset(), 0.5);
        assert_eq!(s.plane().normal(), &[1.0]);
    }

    #[test]
    fn slab_of_rejects_empty_and_independent_inputs() {
        assert!(slab_of(&[], 0.1).is_err());
        assert!(slab_of(&[rp(&[0, 0], 1), rp(&[1, 0], 1), rp(&[0, 1], 1)], 0.1).is_err());
    }

    #[test]
    fn slab_contains_its_points_with_zero_margin() {
        let pts = vec![rp(&[1, 3], 7), rp(&[2, 5], 7), rp(&[3, 7], 7)];
        let s = slab_of(&pts, 0.0).unwrap();
        for p in &pts {
            assert!(s.plane().signed_distance(&p.to_f64()).abs() < 1e-14);
        }
    }
}

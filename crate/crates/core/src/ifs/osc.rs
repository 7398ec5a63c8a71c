//! Open set condition for a supplied witness `U`: every image `S_i(U)` lies
//! in `U` and distinct images have disjoint interiors.

use super::affine::{dist, dot, pad, Affine, Point};
use super::{OpenSet, SimilarityMap};
use crate::error::{Error, Result};

pub(super) fn check(maps: &[SimilarityMap], open: &OpenSet) -> Result<()> {
    let affines: Vec<Affine> = maps.iter().map(SimilarityMap::affine).collect();
    let tol = 1e-9 * open.diameter().max(f64::MIN_POSITIVE);
    match open {
        OpenSet::Ball(b) => {
            let c = pad(b.center());
            let r = b.radius();
            let images: Vec<(Point, f64)> = affines.iter().map(|a| (a.apply(&c), a.scale() * r)).collect();
            for (i, (ci, ri)) in images.iter().enumerate() {
                if dist(ci, &c) + ri > r + tol {
                    return Err(not_contained(i));
                }
                for (j, (cj, rj)) in images.iter().enumerate().skip(i + 1) {
                    if dist(ci, cj) < ri + rj - tol {
                        return Err(overlapping(i, j));
                    }
                }
            }
            Ok(())
        }
        OpenSet::Box(bx) => polytope_check(&affines, &ConvexBody::from_box(bx.min(), bx.max()), tol),
        OpenSet::Polygon(v) => polytope_check(&affines, &ConvexBody::from_polygon(v)?, tol),
    }
}

fn not_contained(i: usize) -> Error {
    Error::invalid(format!("open set condition fails: image of the witness under map {i} leaves the witness"))
}

fn overlapping(i: usize, j: usize) -> Error {
    Error::invalid(format!("open set condition fails: images under maps {i} and {j} overlap"))
}

fn polytope_check(affines: &[Affine], body: &ConvexBody, tol: f64) -> Result<()> {
    let images: Vec<ConvexBody> = affines.iter().map(|a| body.image(a)).collect();
    for (i, img) in images.iter().enumerate() {
        if !img.vertices.iter().all(|v| body.contains(v, tol)) {
            return Err(not_contained(i));
        }
        for (j, other) in images.iter().enumerate().skip(i + 1) {
            if !separated(img, other, tol) {
                return Err(overlapping(i, j));
            }
        }
    }
    Ok(())
}

/// Bounded convex polytope: `normal . x <= offset` for each face, plus the
/// edge directions needed for separating-axis tests in three dimensions.
#[derive(Debug, Clone)]
struct ConvexBody {
    vertices: Vec<Point>,
    faces: Vec<(Point, f64)>,
    edges: Vec<Point>,
}

impl ConvexBody {
    fn from_box(min: &[f64], max: &[f64]) -> ConvexBody {
        let d = min.len();
        let mut vertices = Vec::with_capacity(1 << d);
        for mask in 0..(1usize << d) {
            let v: Vec<f64> = (0..d).map(|i| if mask >> i & 1 == 1 { max[i] } else { min[i] }).collect();
            vertices.push(pad(&v));
        }
        let mut faces = Vec::with_capacity(2 * d);
        let mut edges = Vec::with_capacity(d);
        for i in 0..d {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            faces.push((e, max[i]));
            faces.push(([-e[0], -e[1], -e[2]], -min[i]));
            edges.push(e);
        }
        ConvexBody { vertices, faces, edges }
    }

    fn from_polygon(v: &[[f64; 2]]) -> Result<ConvexBody> {
        if v.len() < 3 {
            return Err(Error::invalid("polygon witness needs at least three vertices"));
        }
        let n = v.len();
        let cross = |i: usize| {
            let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
            (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        };
        let orientation = cross(0).signum();
        if orientation == 0.0 || (0..n).any(|i| cross(i) * orientation <= 0.0) {
            return Err(Error::invalid("polygon witness must be strictly convex"));
        }
        let mut faces = Vec::with_capacity(n);
        let mut edges = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
            let len = (ex * ex + ey * ey).sqrt();
            // outward normal: right of the edge for counter-clockwise order
            let normal = [orientation * ey / len, -orientation * ex / len, 0.0];
            faces.push((normal, normal[0] * a[0] + normal[1] * a[1]));
            edges.push([ex / len, ey / len, 0.0]);
        }
        Ok(ConvexBody {
            vertices: v.iter().map(|p| [p[0], p[1], 0.0]).collect(),
            faces,
            edges,
        })
    }

    fn image(&self, a: &Affine) -> ConvexBody {
        let origin = a.apply(&[0.0; 3]);
        ConvexBody {
            vertices: self.vertices.iter().map(|v| a.apply(v)).collect(),
            faces: self
                .faces
                .iter()
                .map(|(n, o)| {
                    let rn = a.rotate(n);
                    (rn, a.scale() * o + dot(&rn, &origin))
                })
                .collect(),
            edges: self.edges.iter().map(|e| a.rotate(e)).collect(),
        }
    }

    fn contains(&self, x: &Point, tol: f64) -> bool {
        self.faces.iter().all(|(n, o)| dot(n, x) <= o + tol)
    }

    fn project(&self, axis: &Point) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let p = dot(axis, v);
            (lo.min(p), hi.max(p))
        })
    }
}

/// Interiors disjoint, allowing contact up to `tol`.
fn separated(a: &ConvexBody, b: &ConvexBody, tol: f64) -> bool {
    let mut axes: Vec<Point> = a.faces.iter().chain(&b.faces).map(|(n, _)| *n).collect();
    for u in &a.edges {
        for v in &b.edges {
            let c = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            let len = dot(&c, &c).sqrt();
            if len > 1e-9 {
                axes.push([c[0] / len, c[1] / len, c[2] / len]);
            }
        }
    }
    axes.iter().any(|axis| {
        let (alo, ahi) = a.project(axis);
        let (blo, bhi) = b.project(axis);
        ahi <= blo + tol || bhi <= alo + tol
    })
}

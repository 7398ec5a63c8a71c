/// Systems live in `R^1..=R^3`; points are padded with zeros to three
/// coordinates so cylinder maps compose without allocation.
pub const MAX_DIM: usize = 3;

pub type Point = [f64; MAX_DIM];

pub fn pad(x: &[f64]) -> Point {
    let mut p = [0.0; MAX_DIM];
    p[..x.len()].copy_from_slice(x);
    p
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `x -> scale * lin x + shift` with `lin` orthogonal on the active block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    scale: f64,
    lin: [[f64; MAX_DIM]; MAX_DIM],
    shift: Point,
}

impl Affine {
    pub fn identity() -> Affine {
        let mut lin = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in lin.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Affine {
            scale: 1.0,
            lin,
            shift: [0.0; MAX_DIM],
        }
    }

    pub fn from_parts(scale: f64, rotation: &[f64], translation: &[f64]) -> Affine {
        let d = translation.len();
        let mut lin = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            for k in 0..d {
                lin[i][k] = rotation[i * d + k];
            }
        }
        Affine {
            scale,
            lin,
            shift: pad(translation),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, x: &Point) -> Point {
        let mut y = self.shift;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += self.scale * dot(&self.lin[i], x);
        }
        y
    }

    /// Orthogonal part applied to a direction (no scaling, no shift).
    pub fn rotate(&self, v: &Point) -> Point {
        let mut y = [0.0; MAX_DIM];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(&self.lin[i], v);
        }
        y
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        let mut lin = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in lin.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..MAX_DIM).map(|k| self.lin[i][k] * inner.lin[k][j]).sum();
            }
        }
        Affine {
            scale: self.scale * inner.scale,
            lin,
            shift: self.apply(&inner.shift),
        }
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_dim, Error, Result};

/// A point `p / q` of `Q^d` with integer numerators and one shared positive
/// denominator. The pair `(p, q)` is kept as given; `2/4` and `1/2` are
/// different representations of the same value (see [`RationalPoint::value_eq`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    numerators: Vec<BigInt>,
    denominator: BigInt,
}

impl RationalPoint {
    pub fn new(numerators: Vec<BigInt>, denominator: BigInt) -> Result<Self> {
        if numerators.is_empty() {
            return Err(Error::invalid("rational point needs at least one coordinate"));
        }
        if denominator < BigInt::one() {
            return Err(Error::invalid(format!("denominator must be >= 1, got {denominator}")));
        }
        Ok(RationalPoint {
            numerators,
            denominator,
        })
    }

    pub fn from_i64(numerators: &[i64], denominator: i64) -> Result<Self> {
        RationalPoint::new(
            numerators.iter().map(|&p| BigInt::from(p)).collect(),
            BigInt::from(denominator),
        )
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.numerators
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn denominator_u64(&self) -> Option<u64> {
        self.denominator.to_u64()
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn coordinate(&self, i: usize) -> BigRational {
        BigRational::new(self.numerators[i].clone(), self.denominator.clone())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.coordinate(i).to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Exact equality of values by cross-multiplication.
    pub fn value_eq(&self, other: &RationalPoint) -> bool {
        self.dim() == other.dim()
            && self
                .numerators
                .iter()
                .zip(&other.numerators)
                .all(|(a, b)| a * &other.denominator == b * &self.denominator)
    }

    /// Lowest-terms representation, usable as a hash key for value equality.
    pub fn reduced(&self) -> RationalPoint {
        let g = self
            .numerators
            .iter()
            .fold(self.denominator.clone(), |g, p| g.gcd(p));
        RationalPoint {
            numerators: self.numerators.iter().map(|p| p / &g).collect(),
            denominator: &self.denominator / &g,
        }
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.numerators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")/{}", self.denominator)
    }
}

/// `d + 1` rational vertices in `R^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<RationalPoint>,
}

impl Simplex {
    pub fn new(vertices: Vec<RationalPoint>) -> Result<Self> {
        let d = vertices
            .first()
            .map(RationalPoint::dim)
            .ok_or_else(|| Error::invalid("simplex needs vertices"))?;
        check_dim(d + 1, vertices.len())?;
        for v in &vertices {
            check_dim(d, v.dim())?;
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination. Every intermediate division is exact.
pub fn integer_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// `d! |Delta|_d`: absolute value of the determinant of the rows
/// `(1, p_i / q_i)`, computed exactly. Row `i` is scaled by `q_i` to clear
/// denominators and the product of the `q_i` is divided back out.
pub fn simplex_volume_times_dfact(s: &Simplex) -> BigRational {
    let rows: Vec<Vec<BigInt>> = s
        .vertices()
        .iter()
        .map(|v| {
            std::iter::once(v.denominator().clone())
                .chain(v.numerators().iter().cloned())
                .collect()
        })
        .collect();
    let scale = s
        .vertices()
        .iter()
        .fold(BigInt::one(), |acc, v| acc * v.denominator());
    BigRational::new(integer_determinant(rows).abs(), scale)
}

/// Indices of a maximal affinely independent subset, chosen greedily in
/// input order (index 0 is always included when the input is nonempty).
/// The affine rank is `len - 1` of the result.
pub fn affine_basis(points: &[RationalPoint]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let d = first.dim();
    for p in points {
        check_dim(d, p.dim())?;
    }
    let mut chosen = vec![0];
    // Echelon rows: (pivot column, integer row).
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::with_capacity(d);
    for (i, p) in points.iter().enumerate().skip(1) {
        if echelon.len() == d {
            break;
        }
        // q_0 q_i (p_i/q_i - p_0/q_0), an integer multiple of the difference.
        let mut v: Vec<BigInt> = (0..d)
            .map(|k| &p.numerators[k] * &first.denominator - &first.numerators[k] * &p.denominator)
            .collect();
        for (col, row) in &echelon {
            if v[*col].is_zero() {
                continue;
            }
            let a = row[*col].clone();
            let b = v[*col].clone();
            for k in 0..d {
                v[k] = &a * &v[k] - &b * &row[k];
            }
            strip_content(&mut v);
        }
        if let Some(col) = v.iter().position(|x| !x.is_zero()) {
            echelon.push((col, v));
            chosen.push(i);
        }
    }
    Ok(chosen)
}

fn strip_content(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

use crate::approx::PsiFunction;
use crate::error::{check_dim, Error, Result};

/// Which series is being classified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SumKind {
    /// `sum (r psi(r))^d`, the Lebesgue case.
    Lebesgue,
    /// `sum r^{alpha (d+1)/d - 1} psi(r)^alpha`.
    Theorem1,
    /// `sum r^{alpha (d+1)/d - 1} psi(r)^{alpha + s - delta}`.
    Theorem2 { s: f64 },
}

#[derive(Debug, Clone)]
pub struct SumSpec {
    pub kind: SumKind,
    pub psi: PsiFunction,
    pub alpha: f64,
    pub delta: f64,
    pub d: usize,
}

impl SumSpec {
    pub fn new(kind: SumKind, psi: PsiFunction, alpha: f64, delta: f64, d: usize) -> Result<Self> {
        check_dim(d, psi.d())?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(delta >= 0.0 && delta <= d as f64) {
            return Err(Error::invalid(format!("delta must lie in [0, {d}], got {delta}")));
        }
        if let SumKind::Theorem2 { s } = kind {
            if !(s >= 0.0 && s <= delta) {
                return Err(Error::invalid(format!("need 0 <= s <= delta, got s = {s}, delta = {delta}")));
            }
        }
        Ok(SumSpec {
            kind,
            psi,
            alpha,
            delta,
            d,
        })
    }

    /// `(c, e)` with term `r^c psi(r)^e`.
    fn powers(&self) -> (f64, f64) {
        let d = self.d as f64;
        let c = self.alpha * (d + 1.0) / d - 1.0;
        match self.kind {
            SumKind::Lebesgue => (d, d),
            SumKind::Theorem1 => (c, self.alpha),
            SumKind::Theorem2 { s } => (c, self.alpha + s - self.delta),
        }
    }

    pub fn ln_term(&self, r: f64) -> f64 {
        let (c, e) = self.powers();
        c * r.ln() + e * self.psi.ln_eval(r)
    }

    pub fn term(&self, r: f64) -> f64 {
        self.ln_term(r).exp()
    }

    /// `(A, B)` with term `~ r^A (ln r)^B` for symbolic `psi`.
    pub fn reduced_exponents(&self) -> Option<(f64, f64)> {
        let (tau, beta) = self.psi.exponents()?;
        let (c, e) = self.powers();
        Some((c - e * tau, -e * beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trivalent {
    Yes,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// Term `~ r^A (ln r)^B`; converges iff `A < -1`, or `A = -1` and `B < -1`.
    ClosedForm { a: f64, b: f64 },
    /// Fit of `ln c_n = k + slope n ln 2 + log_power ln n` to the condensed
    /// terms `c_n = 2^n term(2^n)`.
    Condensation {
        slope: f64,
        log_power: f64,
        max_residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumVerdict {
    pub converges: Trivalent,
    pub method: Method,
    /// Distance of the deciding exponent from its threshold (closed form).
    pub margin: Option<f64>,
    pub partial_sums: Vec<(u64, f64)>,
    /// `(n, 2^n term(2^n))`.
    pub condensed_terms: Vec<(u32, f64)>,
    pub note: Option<String>,
}

/// Number of dyadic terms used by the condensation route.
pub const CONDENSED_TERMS: u32 = 48;
const FIT_FROM: u32 = 12;
const SLOPE_BAND: f64 = 0.02;
const LOG_BAND: f64 = 0.02;
const RESIDUAL_LIMIT: f64 = 0.5;
const MIN_TABLE_BLOCKS: u32 = 8;
const EXACT: f64 = 1e-12;

fn condensed(spec: &SumSpec, n_max: u32) -> Vec<(u32, f64)> {
    (1..=n_max)
        .map(|n| {
            let r = 2f64.powi(n as i32);
            (n, (r.ln() + spec.ln_term(r)).exp())
        })
        .collect()
}

fn partial_sums(spec: &SumSpec) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut next = 10u64;
    for r in 1..=100_000u64 {
        acc += spec.term(r as f64);
        if r == next {
            out.push((r, acc));
            next *= 10;
        }
    }
    out
}

/// Least squares for `y = k + s x + b ln x`.
fn fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let rows: Vec<[f64; 3]> = points.iter().map(|&(x, _)| [1.0, x, x.ln()]).collect();
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (row, &(_, y)) in rows.iter().zip(points) {
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve3(ata, aty);
    let max_residual = rows
        .iter()
        .zip(points)
        .map(|(row, &(_, y))| (coef[0] * row[0] + coef[1] * row[1] + coef[2] * row[2] - y).abs())
        .fold(0.0, f64::max);
    (coef[1], coef[2], max_residual)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).expect("rows");
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        x[i] = (b[i] - (i + 1..3).map(|k| a[i][k] * x[k]).sum::<f64>()) / a[i][i];
    }
    x
}

/// Numeric route through Cauchy condensation, available for every `psi`.
/// Only decisive when the fitted geometric rate or log power is clearly
/// away from the threshold.
pub fn condensation_verdict(spec: &SumSpec) -> SumVerdict {
    let mut note = None;
    let n_max = match spec.psi.table_end() {
        Some(end) => {
            let blocks = end.log2().floor().max(0.0) as u32;
            if blocks < MIN_TABLE_BLOCKS {
                return SumVerdict {
                    converges: Trivalent::Undetermined,
                    method: Method::Condensation {
                        slope: f64::NAN,
                        log_power: f64::NAN,
                        max_residual: f64::NAN,
                    },
                    margin: None,
                    partial_sums: partial_sums(spec),
                    condensed_terms: condensed(spec, blocks.max(1)),
                    note: Some(format!("table spans only {blocks} dyadic blocks; need {MIN_TABLE_BLOCKS}")),
                };
            }
            blocks.min(CONDENSED_TERMS)
        }
        None => CONDENSED_TERMS,
    };
    let terms = condensed(spec, n_max);
    let from = if n_max >= 2 * FIT_FROM { FIT_FROM } else { n_max / 4 + 1 };
    let pts: Vec<(f64, f64)> = (from..=n_max)
        .map(|n| {
            let r = 2f64.powi(n as i32);
            (n as f64, r.ln() + spec.ln_term(r))
        })
        .collect();
    let (slope, log_power, max_residual) = fit(&pts);
    let rate = slope / std::f64::consts::LN_2;
    let converges = if max_residual > RESIDUAL_LIMIT {
        note = Some(format!("condensed terms are not log-linear (residual {max_residual:.3})"));
        Trivalent::Undetermined
    } else if rate < -SLOPE_BAND {
        Trivalent::Yes
    } else if rate > SLOPE_BAND {
        Trivalent::No
    } else if log_power < -1.0 - LOG_BAND {
        Trivalent::Yes
    } else if log_power > -1.0 + LOG_BAND {
        Trivalent::No
    } else {
        Trivalent::Undetermined
    };
    SumVerdict {
        converges,
        method: Method::Condensation {
            slope: rate,
            log_power,
            max_residual,
        },
        margin: None,
        partial_sums: partial_sums(spec),
        condensed_terms: terms,
        note,
    }
}

/// Closed form for symbolic `psi`, condensation heuristic for tables.
pub fn classify_sum(spec: &SumSpec) -> SumVerdict {
    let Some((a, b)) = spec.reduced_exponents() else {
        return condensation_verdict(spec);
    };
    let (converges, margin) = if (a + 1.0).abs() > EXACT {
        (if a < -1.0 { Trivalent::Yes } else { Trivalent::No }, (a + 1.0).abs())
    } else {
        (if b < -1.0 - EXACT { Trivalent::Yes } else { Trivalent::No }, (b + 1.0).abs())
    };
    SumVerdict {
        converges,
        method: Method::ClosedForm { a, b },
        margin: Some(margin),
        partial_sums: partial_sums(spec),
        condensed_terms: condensed(spec, CONDENSED_TERMS),
        note: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    /// The sum converges, so the theorem gives measure (or `H^s`) zero.
    Null,
    NoConclusion,
}

/// `mu(W_K(psi)) = 0` when the `Theorem1` sum converges; no statement
/// otherwise. Assumes `mu` is absolutely `alpha`-friendly.
pub fn predict_measure_zero(spec: &SumSpec) -> Result<Prediction> {
    if spec.kind != SumKind::Theorem1 {
        return Err(Error::invalid("measure-zero prediction needs the Theorem1 sum"));
    }
    Ok(match classify_sum(spec).converges {
        Trivalent::Yes => Prediction::Null,
        _ => Prediction::NoConclusion,
    })
}

/// `H^s(W_K(psi)) = 0` when the `Theorem2` sum converges.
pub fn predict_hausdorff_null(spec: &SumSpec) -> Result<Prediction> {
    if !matches!(spec.kind, SumKind::Theorem2 { .. }) {
        return Err(Error::invalid("Hausdorff-null prediction needs the Theorem2 sum"));
    }
    Ok(match classify_sum(spec).converges {
        Trivalent::Yes => Prediction::Null,
        _ => Prediction::NoConclusion,
    })
}

/// `delta - alpha (1 - (d+1)/(lambda d))`, an upper bound for
/// `dim W_K(psi)` when `psi` has lower order `lambda >= (d+1)/d`.
pub fn dimension_bound(delta: f64, alpha: f64, d: usize, lambda: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let dirichlet = (d as f64 + 1.0) / d as f64;
    if !(lambda >= dirichlet) {
        return Err(Error::invalid(format!("need lambda >= (d+1)/d = {dirichlet}, got {lambda}")));
    }
    Ok(delta - alpha * (1.0 - dirichlet / lambda))
}

use std::path::Path;

use crate::error::{Error, Result};

/// Shape of an approximation function.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiFamily {
    /// `r^-tau`.
    Power { tau: f64 },
    /// `r^-(d+1)/d (log r)^-beta`.
    PowerLog { beta: f64 },
    /// `r^-tau (log r)^-beta`.
    GenericPowerLog { tau: f64, beta: f64 },
    /// Samples `(r, psi(r))`, `r` strictly ascending, interpolated in
    /// log-log coordinates.
    Table(Vec<(f64, f64)>),
}

/// A positive non-increasing function `psi: R+ -> R+`, times a constant.
///
/// The logarithm in the log families is evaluated as `ln max(r, e)` so that
/// `psi` stays positive and monotone below `r = e`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiFunction {
    family: PsiFamily,
    d: usize,
    scale: f64,
}

const GRID: usize = 1000;

impl PsiFunction {
    pub fn new(family: PsiFamily, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        match &family {
            PsiFamily::Power { tau } => nonneg("tau", *tau)?,
            PsiFamily::PowerLog { beta } => nonneg("beta", *beta)?,
            PsiFamily::GenericPowerLog { tau, beta } => {
                nonneg("tau", *tau)?;
                nonneg("beta", *beta)?;
            }
            PsiFamily::Table(rows) => validate_table(rows)?,
        }
        let psi = PsiFunction { family, d, scale: 1.0 };
        psi.check_grid()?;
        Ok(psi)
    }

    pub fn power(tau: f64, d: usize) -> Result<Self> {
        PsiFunction::new(PsiFamily::Power { tau }, d)
    }

    pub fn power_log(beta: f64, d: usize) -> Result<Self> {
        PsiFunction::new(PsiFamily::PowerLog { beta }, d)
    }

    pub fn generic_power_log(tau: f64, beta: f64, d: usize) -> Result<Self> {
        PsiFunction::new(PsiFamily::GenericPowerLog { tau, beta }, d)
    }

    pub fn table(rows: Vec<(f64, f64)>, d: usize) -> Result<Self> {
        PsiFunction::new(PsiFamily::Table(rows), d)
    }

    /// `k * psi`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("scale must be positive, got {k}")));
        }
        Ok(PsiFunction {
            scale: self.scale * k,
            ..self.clone()
        })
    }

    pub fn family(&self) -> &PsiFamily {
        &self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `(d+1)/d`, the Dirichlet exponent.
    pub fn dirichlet_exponent(&self) -> f64 {
        (self.d as f64 + 1.0) / self.d as f64
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.ln_eval(r).exp()
    }

    /// `ln psi(r)`, finite even where `psi(r)` underflows.
    pub fn ln_eval(&self, r: f64) -> f64 {
        let lr = r.ln();
        let ll = r.max(std::f64::consts::E).ln().ln();
        let core = match &self.family {
            PsiFamily::Power { tau } => -tau * lr,
            PsiFamily::PowerLog { beta } => -self.dirichlet_exponent() * lr - beta * ll,
            PsiFamily::GenericPowerLog { tau, beta } => -tau * lr - beta * ll,
            PsiFamily::Table(rows) => table_ln(rows, lr),
        };
        core + self.scale.ln()
    }

    /// For symbolic families, `(tau, beta)` such that `psi(r) = scale * r^-tau (ln r)^-beta`
    /// for `r >= e`.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match &self.family {
            PsiFamily::Power { tau } => Some((*tau, 0.0)),
            PsiFamily::PowerLog { beta } => Some((self.dirichlet_exponent(), *beta)),
            PsiFamily::GenericPowerLog { tau, beta } => Some((*tau, *beta)),
            PsiFamily::Table(_) => None,
        }
    }

    /// Lower order `liminf -log psi(r) / log r`. Closed form for the
    /// symbolic families; for tables the minimum of the ratio over the upper
    /// half (in `log r`) of the samples with `r > 1`.
    pub fn lower_order(&self) -> Result<f64> {
        match &self.family {
            PsiFamily::Table(rows) => {
                if rows.len() < 10 {
                    return Err(Error::invalid(format!(
                        "lower order needs at least 10 table points, got {}",
                        rows.len()
                    )));
                }
                let last = rows.last().expect("nonempty").0.ln();
                let tail: Vec<f64> = rows
                    .iter()
                    .filter(|(r, _)| *r > 1.0 && r.ln() >= 0.5 * last)
                    .map(|(r, _)| -self.ln_eval(*r) / r.ln())
                    .collect();
                if tail.is_empty() {
                    return Err(Error::invalid("table has no samples with r > 1"));
                }
                Ok(tail.iter().copied().fold(f64::INFINITY, f64::min).max(0.0))
            }
            _ => Ok(self.exponents().expect("symbolic").0),
        }
    }

    /// Slope of `-ln psi` against `ln r` over the last decade of a table.
    pub fn last_decade_slope(&self) -> Option<f64> {
        match &self.family {
            PsiFamily::Table(rows) => {
                let hi = rows.last()?.0;
                let lo = (hi / 10.0).max(rows[0].0);
                if hi <= lo {
                    return None;
                }
                Some(-(self.ln_eval(hi) - self.ln_eval(lo)) / (hi.ln() - lo.ln()))
            }
            _ => None,
        }
    }

    /// Largest `r` covered by data (tables) or `None` (symbolic families).
    pub fn table_end(&self) -> Option<f64> {
        match &self.family {
            PsiFamily::Table(rows) => rows.last().map(|p| p.0),
            _ => None,
        }
    }

    /// Smallest `N <= n_max` with `psi(2^n) < c 2^{-n (d+1)/d}` for every
    /// `n` in `N..=n_max`, if any.
    pub fn smallness_onset(&self, c: f64, n_max: u32) -> Option<u32> {
        let holds = |n: u32| {
            let r = 2f64.powi(n as i32);
            self.ln_eval(r) < c.ln() - self.dirichlet_exponent() * r.ln()
        };
        let mut onset = None;
        for n in (0..=n_max).rev() {
            if holds(n) {
                onset = Some(n);
            } else {
                break;
            }
        }
        onset
    }

    fn check_grid(&self) -> Result<()> {
        let (lo, hi) = match &self.family {
            PsiFamily::Table(rows) => (rows[0].0.ln(), rows.last().expect("nonempty").0.ln() + 1.0),
            _ => (0.0, 1e6f64.ln()),
        };
        let mut prev = f64::INFINITY;
        for i in 0..GRID {
            let r = (lo + (hi - lo) * i as f64 / (GRID - 1) as f64).exp();
            let v = self.ln_eval(r);
            if !v.is_finite() || v > prev + 1e-12 * prev.abs().max(1.0) {
                return Err(Error::invalid(format!("psi must be positive and non-increasing; fails near r = {r}")));
            }
            prev = v;
        }
        Ok(())
    }

    /// Parses `power:tau=2.0`, `powerlog:beta=3.0`, `gpl:tau=2.0,beta=1.0`
    /// or `table:<path>` (two-column CSV, `r` ascending; relative paths are
    /// resolved against `base`).
    pub fn parse(spec: &str, d: usize, base: Option<&Path>) -> Result<Self> {
        let (kind, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("psi spec `{spec}` lacks a `family:` prefix")))?;
        if kind == "table" {
            let path = Path::new(rest);
            let path = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path.to_path_buf(),
            };
            return PsiFunction::table(read_table(&path)?, d);
        }
        let mut tau = None;
        let mut beta = None;
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number in `{kv}`")))?;
            match k.trim() {
                "tau" => tau = Some(v),
                "beta" => beta = Some(v),
                other => return Err(Error::Parse(format!("unknown psi parameter `{other}`"))),
            }
        }
        let need = |x: Option<f64>, name: &str| x.ok_or_else(|| Error::Parse(format!("`{kind}` needs {name}=")));
        match kind {
            "power" if beta.is_none() => PsiFunction::power(need(tau, "tau")?, d),
            "powerlog" if tau.is_none() => PsiFunction::power_log(need(beta, "beta")?, d),
            "gpl" => PsiFunction::generic_power_log(need(tau, "tau")?, need(beta, "beta")?, d),
            _ => Err(Error::Parse(format!("unrecognised psi spec `{spec}`"))),
        }
    }
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")))
    }
}

fn validate_table(rows: &[(f64, f64)]) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::invalid("table needs at least two rows"));
    }
    for (i, &(r, v)) in rows.iter().enumerate() {
        if !(r > 0.0 && r.is_finite() && v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("table row {i}: r and psi must be positive")));
        }
        if i > 0 {
            let (pr, pv) = rows[i - 1];
            if r <= pr {
                return Err(Error::invalid(format!("table row {i}: r must be strictly ascending")));
            }
            if v > pv {
                return Err(Error::invalid(format!("table row {i}: psi must be non-increasing")));
            }
        }
    }
    Ok(())
}

/// Log-log interpolation; constant left of the data, last slope to the right.
fn table_ln(rows: &[(f64, f64)], lr: f64) -> f64 {
    let first = rows[0];
    if lr <= first.0.ln() {
        return first.1.ln();
    }
    let idx = rows.partition_point(|(r, _)| r.ln() < lr);
    let (a, b) = if idx >= rows.len() {
        (rows[rows.len() - 2], rows[rows.len() - 1])
    } else {
        (rows[idx - 1], rows[idx])
    };
    let (x0, y0, x1, y1) = (a.0.ln(), a.1.ln(), b.0.ln(), b.1.ln());
    y0 + (y1 - y0) * (lr - x0) / (x1 - x0)
}

fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!("{}: row {i} needs two columns", path.display())));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(r), Ok(v)) => rows.push((r, v)),
            // a header line
            _ if i == 0 => continue,
            _ => return Err(Error::Parse(format!("{}: row {i} is not numeric", path.display()))),
        }
    }
    Ok(rows)
}

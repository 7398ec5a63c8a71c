use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use friendly_core::analysis::{
    approximant_dimension, hs_upper_bound, layer_mass_profile, lemma_audit, Method, SumVerdict,
};
use friendly_core::diagnostics::{write_certificate_csv, Certificate, Validation};
use friendly_core::ifs::sample_with_words;
use friendly_core::{
    certify_decay, certify_doubling, certify_regularity, classify_sum, decay_alpha_from_regularity, dimension_bound,
    measure_of_ball, predict_hausdorff_null, predict_measure_zero, Ball, Error as CoreError, IteratedFunctionSystem,
    PsiFunction, SumKind, SumSpec, Trivalent,
};

use crate::config::ExperimentConfig;
use crate::output::{header, num, Table};

/// A run that completed but found a violation; exits with status 2.
#[derive(Debug)]
pub struct ScientificFailure(pub String);

impl std::fmt::Display for ScientificFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ScientificFailure {}

pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    header: String,
}

impl Run {
    pub fn new(config: ExperimentConfig, out: PathBuf) -> Self {
        let header = header(&config.hash(), config.seed);
        Run { config, out, header }
    }

    fn table(&self) -> Table {
        Table::new(&self.header)
    }

    fn save(&self, t: Table, name: &str) -> Result<()> {
        let path = t.save(&self.out, name)?;
        log::info!("wrote {}", path.display());
        Ok(())
    }

    fn alpha(&self, sys: &IteratedFunctionSystem) -> Result<f64> {
        match self.config.alpha {
            Some(a) => Ok(a),
            None => decay_alpha_from_regularity(sys.delta(), sys.dim()).with_context(|| {
                format!(
                    "alpha: delta = {} gives no decay exponent in dimension {}; set alpha explicitly",
                    sys.delta(),
                    sys.dim()
                )
            }),
        }
    }

    fn s(&self, sys: &IteratedFunctionSystem) -> f64 {
        self.config.s.unwrap_or(sys.delta())
    }
}

fn validation_line<C: Certificate>(t: &mut Table, cert: &C, v: &Validation) -> Result<()> {
    write_certificate_csv(t.raw(), cert)?;
    t.comment(&[
        ("validation_checked", &v.checked),
        ("validation_violations", &v.violations),
        ("validation_discarded", &v.discarded),
    ]);
    Ok(())
}

pub fn certify(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let sys = c.system()?;
    let r0 = c.r0.unwrap_or(sys.default_r0());
    let alpha = cx.alpha(&sys)?;
    // re-validation draws fresh balls
    let vseed = c.seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut failures = Vec::new();
    let mut record = |what: &str, e: anyhow::Error| -> Result<()> {
        match e.downcast_ref::<CoreError>() {
            Some(CoreError::CertificationFailed(m)) => {
                eprintln!("{what}: {m}");
                failures.push(what.to_string());
                Ok(())
            }
            _ => Err(e),
        }
    };

    match certify_doubling(&sys, c.trials, r0, c.seed).map_err(anyhow::Error::from).and_then(|cert| {
        let v = cert.validate(&sys, c.trials, vseed)?;
        let mut t = cx.table();
        validation_line(&mut t, &cert, &v)?;
        Ok(t)
    }) {
        Ok(t) => cx.save(t, "doubling.csv")?,
        Err(e) => record("doubling", e)?,
    }
    match certify_decay(&sys, alpha, c.trials, r0, c.seed).map_err(anyhow::Error::from).and_then(|cert| {
        let v = cert.validate(&sys, c.trials, vseed)?;
        let mut t = cx.table();
        validation_line(&mut t, &cert, &v)?;
        Ok(t)
    }) {
        Ok(t) => cx.save(t, "decay.csv")?,
        Err(e) => record("decay", e)?,
    }
    match certify_regularity(&sys, c.trials, r0, c.seed).map_err(anyhow::Error::from).and_then(|cert| {
        let v = cert.validate(&sys, c.trials, vseed)?;
        let mut t = cx.table();
        validation_line(&mut t, &cert, &v)?;
        Ok(t)
    }) {
        Ok(t) => cx.save(t, "regularity.csv")?,
        Err(e) => record("regularity", e)?,
    }
    if !failures.is_empty() {
        return Err(ScientificFailure(format!("certification failed: {}", failures.join(", "))).into());
    }
    Ok(())
}

pub fn decay(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let sys = c.system()?;
    let psi = c.psi(sys.dim())?;
    let alpha = cx.alpha(&sys)?;
    let p = layer_mass_profile(&sys, &psi, alpha, (c.blocks[0], c.blocks[1]), c.samples, c.seed)?;
    let mut t = cx.table();
    t.rows(
        &["n", "hits", "mass", "envelope", "ratio"],
        p.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.hits.to_string(),
                num(r.mass),
                num(r.envelope),
                num(r.mass / r.envelope),
            ]
        }),
    )?;
    let max_ratio = p.rows.iter().map(|r| r.mass / r.envelope).fold(0.0, f64::max);
    let ln2 = std::f64::consts::LN_2;
    match p.empirical_slope {
        Some(e) => {
            t.comment(&[
                ("slope_log2_empirical", &e),
                ("slope_log2_predicted", &p.predicted_slope),
                ("slope_log2_diff", &(e - p.predicted_slope).abs()),
            ]);
            t.comment(&[
                ("slope_ln_empirical", &(e * ln2)),
                ("slope_ln_predicted", &(p.predicted_slope * ln2)),
                ("slope_ln_diff", &((e - p.predicted_slope).abs() * ln2)),
            ]);
        }
        None => t.comment(&[("slope_log2_empirical", &"none"), ("slope_log2_predicted", &p.predicted_slope)]),
    }
    t.comment(&[("alpha", &alpha), ("samples", &p.samples), ("max_ratio", &max_ratio)]);
    cx.save(t, "layers.csv")
}

pub fn lemma_audit_cmd(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let mut rows = Vec::new();
    for &d in &c.dims {
        for n in c.blocks[0]..=c.blocks[1] {
            rows.push(lemma_audit(d, n, c.balls, c.seed).with_context(|| format!("audit d={d} n={n}"))?);
        }
    }
    let simplices: usize = rows.iter().map(|r| r.simplices).sum();
    let mut t = cx.table();
    t.rows(
        &["d", "n", "balls", "max_rationals", "simplices"],
        rows.iter().map(|r| {
            vec![
                r.d.to_string(),
                r.n.to_string(),
                r.balls.to_string(),
                r.max_rationals.to_string(),
                r.simplices.to_string(),
            ]
        }),
    )?;
    t.comment(&[("total_simplices", &simplices)]);
    cx.save(t, "audit.csv")?;
    if simplices > 0 {
        return Err(ScientificFailure(format!("{simplices} simplex counterexamples found")).into());
    }
    Ok(())
}

pub fn dim_report(cx: &Run) -> Result<()> {
    let c = &cx.config;
    if c.taus.is_empty() {
        bail!("taus must not be empty");
    }
    let sys = c.system()?;
    let d = sys.dim();
    let alpha = cx.alpha(&sys)?;
    let dirichlet = (d as f64 + 1.0) / d as f64;
    let mut rows = Vec::new();
    for &tau in &c.taus {
        if !(tau >= dirichlet) {
            eprintln!("tau = {tau} rejected: the bound needs tau >= (d+1)/d = {dirichlet}");
            continue;
        }
        let bound = dimension_bound(sys.delta(), alpha, d, tau)?;
        let psi = PsiFunction::power(tau, d)?;
        let (estimate, stderr) = match approximant_dimension(&sys, &psi, (c.blocks[0], c.blocks[1])) {
            Ok(a) => (num(a.estimate.slope), num(a.estimate.stderr)),
            Err(e @ (CoreError::Infeasible { .. } | CoreError::TooLarge(_) | CoreError::InvalidArgument(_))) => {
                eprintln!("tau = {tau}: no estimate ({e})");
                (String::new(), String::new())
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(vec![num(tau), num(bound), estimate, stderr]);
    }
    let mut t = cx.table();
    t.rows(&["tau", "bound", "estimate", "stderr"], rows)?;
    t.comment(&[("delta", &sys.delta()), ("alpha", &alpha), ("blocks", &format!("{}..{}", c.blocks[0], c.blocks[1]))]);
    cx.save(t, "dim_report.csv")
}

fn trivalent(t: Trivalent) -> &'static str {
    match t {
        Trivalent::Yes => "yes",
        Trivalent::No => "no",
        Trivalent::Undetermined => "undetermined",
    }
}

fn verdict_comment(t: &mut Table, kind: &str, v: &SumVerdict) {
    let converges = trivalent(v.converges);
    match v.method {
        Method::ClosedForm { a, b } => t.comment(&[
            ("kind", &kind),
            ("converges", &converges),
            ("method", &"closed-form"),
            ("a", &a),
            ("b", &b),
            ("margin", &v.margin.unwrap_or(f64::NAN)),
        ]),
        Method::Condensation {
            slope,
            log_power,
            max_residual,
        } => t.comment(&[
            ("kind", &kind),
            ("converges", &converges),
            ("method", &"condensation"),
            ("slope_log2", &slope),
            ("log_power", &log_power),
            ("max_residual", &max_residual),
        ]),
    }
    if let Some(n) = &v.note {
        t.comment(&[("note", &n.replace('\n', " "))]);
    }
}

pub fn sums(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let sys = c.system()?;
    let d = sys.dim();
    let psi = c.psi(d)?;
    let alpha = cx.alpha(&sys)?;
    let delta = sys.delta();
    let kinds = [
        ("lebesgue", SumKind::Lebesgue),
        ("theorem1", SumKind::Theorem1),
        ("theorem2", SumKind::Theorem2 { s: cx.s(&sys) }),
    ];
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for (name, kind) in kinds {
        let spec = SumSpec::new(kind, psi.clone(), alpha, delta, d)?;
        let v = classify_sum(&spec);
        for &(n, s) in &v.partial_sums {
            rows.push(vec![name.to_string(), n.to_string(), num(spec.term(n as f64)), num(s)]);
        }
        let prediction = match kind {
            SumKind::Theorem1 => Some(("measure_zero", predict_measure_zero(&spec)?)),
            SumKind::Theorem2 { .. } => Some(("hausdorff_null", predict_hausdorff_null(&spec)?)),
            SumKind::Lebesgue => None,
        };
        verdicts.push((name, v, prediction));
    }
    let mut t = cx.table();
    t.rows(&["kind", "n", "term", "partial_sum"], rows)?;
    for (name, v, prediction) in &verdicts {
        verdict_comment(&mut t, name, v);
        if let Some((what, p)) = prediction {
            t.comment(&[("kind", name), (what, &format!("{p:?}").to_lowercase())]);
        }
    }
    t.comment(&[("alpha", &alpha), ("delta", &delta), ("s", &cx.s(&sys))]);
    cx.save(t, "sums.csv")
}

pub fn cover_cost(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let sys = c.system()?;
    let psi = c.psi(sys.dim())?;
    let s = cx.s(&sys);
    let bound = hs_upper_bound(&sys, &psi, s, c.blocks[0], c.blocks[1])?;
    let mut t = cx.table();
    t.rows(
        &["n", "dn_count", "c_total", "c_max", "cost", "cost_tail"],
        bound.blocks.iter().zip(&bound.tails).map(|(b, (_, tail))| {
            vec![
                b.n.to_string(),
                b.dn_count.to_string(),
                b.c_total.to_string(),
                b.c_max.to_string(),
                num(b.cost),
                num(*tail),
            ]
        }),
    )?;
    let below: Vec<String> = bound.below_threshold.iter().map(u32::to_string).collect();
    let truncated = bound.truncated_at.map_or("none".to_string(), |n| n.to_string());
    t.comment(&[("s", &s), ("below_threshold", &below.join(";")), ("truncated_at", &truncated)]);
    cx.save(t, "cover_cost.csv")
}

pub fn sample(cx: &Run) -> Result<()> {
    let c = &cx.config;
    let sys = c.system()?;
    let d = sys.dim();
    let pts = sample_with_words(&sys, c.samples, c.seed)?;
    let r = c.r0.unwrap_or(sys.default_r0());
    let ball = Ball::new(sys.anchor(), r)?;
    let mass = measure_of_ball(&sys, &ball, c.tolerance)?;
    let inside = pts.iter().filter(|p| ball.contains(&p.point)).count();
    let mut columns: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
    columns.push("word_prefix".into());
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = cx.table();
    t.rows(
        &columns,
        pts.iter().map(|p| {
            let mut row: Vec<String> = p.point.iter().map(|&x| num(x)).collect();
            row.push(p.word.iter().take(8).map(|i| i.to_string()).collect());
            row
        }),
    )?;
    let center: Vec<String> = ball.center().iter().map(|&x| num(x)).collect();
    t.comment(&[
        ("ball_center", &center.join(";")),
        ("ball_radius", &r),
        ("mass_lo", &mass.lo),
        ("mass_hi", &mass.hi),
        ("empirical", &(inside as f64 / pts.len() as f64)),
    ]);
    cx.save(t, "samples.csv")
}

/// Resolves the output directory: `--out` wins over the config.
pub fn output_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir.clone())
}

use std::io::Write;

use super::{CertSample, DecayCertificate, DoublingCertificate, RegularityCertificate};
use crate::error::Result;

/// Common view of the three certificates for export.
pub trait Certificate {
    fn samples(&self) -> &[CertSample];
    /// Constants, written as a trailing `# key=value ...` line.
    fn constants(&self) -> Vec<(&'static str, f64)>;
}

impl Certificate for DoublingCertificate {
    fn samples(&self) -> &[CertSample] {
        &self.samples
    }
    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("D", self.constant),
            ("observed", self.observed),
            ("r0", self.r0),
            ("discarded", self.discarded as f64),
        ]
    }
}

impl Certificate for DecayCertificate {
    fn samples(&self) -> &[CertSample] {
        &self.samples
    }
    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("C", self.constant),
            ("observed", self.observed),
            ("alpha", self.alpha),
            ("r0", self.r0),
            ("C2^alpha", self.corollary_constant),
            ("corollary_max", self.corollary_max),
            ("corollary_holds", if self.corollary_holds { 1.0 } else { 0.0 }),
            ("discarded", self.discarded as f64),
        ]
    }
}

impl Certificate for RegularityCertificate {
    fn samples(&self) -> &[CertSample] {
        &self.samples
    }
    fn constants(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("a", self.a),
            ("b", self.b),
            ("observed_a", self.observed_a),
            ("observed_b", self.observed_b),
            ("delta", self.delta),
            ("r0", self.r0),
            ("discarded", self.discarded as f64),
        ]
    }
}

/// One row per sample (`x0.., radius, epsilon, ratio_lo, ratio_hi`, epsilon
/// blank for ball-only tests), then the constants line.
pub fn write_certificate_csv<W: Write, C: Certificate>(out: &mut W, cert: &C) -> Result<()> {
    let d = cert.samples().first().map_or(1, |s| s.center.len());
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut *out);
        let mut header: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        header.extend(["radius", "epsilon", "ratio_lo", "ratio_hi"].map(String::from));
        w.write_record(&header)?;
        for s in cert.samples() {
            let mut row: Vec<String> = s.center.iter().map(|x| x.to_string()).collect();
            row.push(s.radius.to_string());
            row.push(s.epsilon.map(|e| e.to_string()).unwrap_or_default());
            row.push(s.ratio_lo.to_string());
            row.push(s.ratio_hi.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    let line: Vec<String> = cert.constants().iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(out, "# {}", line.join(" "))?;
    Ok(())
}

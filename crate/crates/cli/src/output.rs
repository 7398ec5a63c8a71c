use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Buffered CSV file: the provenance header, a table, then `# ` comment
/// lines. Nothing touches disk until [`Table::save`].
pub struct Table {
    buf: Vec<u8>,
}

impl Table {
    pub fn new(header: &str) -> Self {
        Table {
            buf: format!("{header}\n").into_bytes(),
        }
    }

    pub fn rows<I, R, S>(&mut self, columns: &[&str], rows: I) -> Result<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut self.buf);
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn raw(&mut self) -> &mut Vec<u8> {
        &mut self.buf
    }

    pub fn comment(&mut self, pairs: &[(&str, &dyn Field)]) {
        let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={}", v.render())).collect();
        self.buf.extend_from_slice(format!("# {}\n", body.join(" ")).as_bytes());
    }

    pub fn save(self, dir: &Path, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, &self.buf).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

pub fn header(config_hash: &str, seed: u64) -> String {
    format!("# friendly-cli {} config={config_hash} seed={seed}", env!("CARGO_PKG_VERSION"))
}

/// Shortest round-trip representation, exponent form outside
/// `[1e-5, 1e16)`, no negative zero.
pub fn num(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

pub trait Field {
    fn render(&self) -> String;
}

impl Field for f64 {
    fn render(&self) -> String {
        num(*self)
    }
}

macro_rules! plain_field {
    ($($t:ty),*) => {$(
        impl Field for $t {
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

plain_field!(usize, u32, u64, &str, String);

//! Result files, number formatting and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use chrono::{DateTime, SecondsFormat, Utc};
use gl_kramers::rates::RateBreakdown;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const RATE_HEADER: &str =
    "bc,L,eps,regime,m,deltaW,gamma0_classical,correction_factor,gamma0_corrected,eps_exponent,rate";

/// 17 significant digits, enough to round-trip any double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Like [`num`], but infinities become an empty field.
fn finite_or_empty(x: f64) -> String {
    if x.is_finite() {
        num(x)
    } else {
        String::new()
    }
}

pub fn rate_row(b: &RateBreakdown) -> String {
    [
        b.bc.as_str().to_string(),
        num(b.length),
        num(b.eps),
        b.regime.as_str().to_string(),
        b.m.map(num).unwrap_or_default(),
        num(b.delta_w),
        finite_or_empty(b.gamma0_classical),
        num(b.correction_factor),
        num(b.gamma0_corrected),
        num(b.eps_exponent),
        num(b.rate),
    ]
    .join(",")
}

/// Collects the files written by one command.
pub struct Outputs {
    primary: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(primary: Option<PathBuf>) -> Self {
        Self { primary, written: Vec::new() }
    }

    /// Writes `text` to the primary output path, or to stdout when there is none.
    pub fn emit_primary(&mut self, text: &str) -> anyhow::Result<()> {
        match self.primary.clone() {
            Some(path) => self.write_file(&path, text),
            None => {
                std::io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    /// Writes a companion file `<primary>.<suffix>` if there is a primary path.
    pub fn emit_companion(&mut self, suffix: &str, text: &str) -> anyhow::Result<Option<PathBuf>> {
        match &self.primary {
            Some(primary) => {
                let path = companion(primary, suffix);
                self.write_file(&path, text)?;
                Ok(Some(path))
            }
            None => Ok(None),
        }
    }

    fn write_file(&mut self, path: &Path, text: &str) -> anyhow::Result<()> {
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    /// Writes `<primary>.manifest.json` describing this run.
    pub fn write_manifest<P: Serialize>(&self, run: ManifestInput<'_, P>) -> anyhow::Result<()> {
        let Some(primary) = &self.primary else {
            return Ok(());
        };
        let mut outputs = serde_json::Map::new();
        for path in &self.written {
            let bytes = std::fs::read(path).with_context(|| format!("cannot read back {}", path.display()))?;
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            outputs.insert(path.display().to_string(), serde_json::Value::String(hex));
        }
        let manifest = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": run.command,
            "params": run.params,
            "seed": run.seed,
            "started": timestamp(run.started),
            "finished": timestamp(Utc::now()),
            "outputs": outputs,
        });
        let path = companion(primary, "manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }
}

pub struct ManifestInput<'a, P: Serialize> {
    pub command: &'a str,
    pub params: &'a P,
    pub seed: Option<u64>,
    pub started: DateTime<Utc>,
}

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn companion(primary: &Path, suffix: &str) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 6.02e23] {
            let text = num(x);
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(finite_or_empty(f64::INFINITY), "");
    }

    #[test]
    fn companion_paths() {
        assert_eq!(
            companion(Path::new("out/sweep.csv"), "manifest.json"),
            PathBuf::from("out/sweep.csv.manifest.json")
        );
    }
}

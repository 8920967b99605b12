//! CSV and manifest serialization. Floating-point CSV cells use fixed
//! 17-significant-digit scientific notation so doubles round-trip exactly and
//! identical runs produce byte-identical files.

use anyhow::{Context, Result};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// 17 significant digits: 1 leading + 16 fractional.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_usize(x: usize) -> String {
    x.to_string()
}

pub struct OutputDir {
    pub dir: PathBuf,
    started: Instant,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            started: Instant::now(),
        })
    }

    pub fn write_csv(
        &self,
        name: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<PathBuf> {
        let mut s = String::new();
        writeln!(s, "{}", header.join(",")).unwrap();
        for row in rows {
            writeln!(s, "{}", row.join(",")).unwrap();
        }
        let path = self.dir.join(name);
        std::fs::write(&path, s).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    /// Manifest with the config echo, version, seed and wall time.
    pub fn write_manifest(
        &self,
        command: &str,
        config_echo: serde_json::Value,
        seed: Option<u64>,
        extra: serde_json::Value,
    ) -> Result<PathBuf> {
        let manifest = serde_json::json!({
            "command": command,
            "config": config_echo,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "wall_time_seconds": self.started.elapsed().as_secs_f64(),
            "report": extra,
        });
        self.write_json("manifest.json", &manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_cells_round_trip_exactly() {
        for &x in &[
            0.1,
            -3.0,
            std::f64::consts::PI,
            1.0 / 3.0,
            6.02e23,
            -1.6e-35,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "round trip failed for {s}");
        }
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::create(dir.path()).unwrap();
        let path = out
            .write_csv("t.csv", &["a", "b"], &[vec!["1".into(), "2".into()]])
            .unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), "a,b\n1,2\n");
    }
}

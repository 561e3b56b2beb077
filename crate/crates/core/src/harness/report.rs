//! CSV reports and the JSON sidecar.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::simulate::SimulationReport;

/// Serializes rows to CSV with a header. Identical rows give identical bytes.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

#[derive(Debug, Serialize)]
pub struct Fingerprint {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
    pub available_parallelism: Option<usize>,
}

impl Fingerprint {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            available_parallelism: std::thread::available_parallelism().ok().map(|n| n.get()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub config: &'a ExperimentConfig,
    pub environment: Fingerprint,
    pub wall_time_seconds: f64,
    pub horizon: u64,
    pub gamma_star: Option<f64>,
    pub failures: &'a [(usize, String)],
}

pub fn sidecar_json(config: &ExperimentConfig, report: &SimulationReport, wall_time_seconds: f64) -> Result<String> {
    let sidecar = Sidecar {
        config,
        environment: Fingerprint::current(),
        wall_time_seconds,
        horizon: report.horizon,
        gamma_star: report.gamma_star,
        failures: &report.failure_messages,
    };
    Ok(serde_json::to_string_pretty(&sidecar)?)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Sidecar path next to a report: `report.csv` becomes `report.json`.
pub fn default_sidecar_path(report: &Path) -> std::path::PathBuf {
    report.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: f64,
        b: Option<f64>,
        c: String,
    }

    #[test]
    fn csv_layout() {
        let bytes = to_csv(&[
            Row {
                a: 0.1,
                b: None,
                c: "censored".into(),
            },
            Row {
                a: 0.01,
                b: Some(2.5),
                c: String::new(),
            },
        ])
        .unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b,c\n0.1,,censored\n0.01,2.5,\n");
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(default_sidecar_path(Path::new("out/r.csv")), Path::new("out/r.json"));
    }
}

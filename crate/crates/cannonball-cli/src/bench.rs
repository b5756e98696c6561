//! Batch benchmarking over a directory of instance files, reported as CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cannonball::multicolor;
use cannonball::verify::{self, OracleOutcome};

use crate::files::{FileError, InstanceFile};

/// Oracle attempt thresholds: beyond these the exact search is not tried.
const ORACLE_MAX_SUPPORT: usize = 10;
const ORACLE_MAX_TOTAL_DEMAND: u64 = 30;

pub const CSV_HEADER: &str = "file,status,omega,colors_used,colors_naive,chi_m,ratio,bound_ok,bound_risk_events,wall_ms,message";

#[derive(Debug)]
pub struct BenchRow {
    pub file: String,
    pub status: String,
    pub omega: Option<u64>,
    pub colors_used: Option<u64>,
    pub colors_naive: Option<u64>,
    pub chi_m: Option<u64>,
    pub ratio: Option<f64>,
    pub bound_ok: Option<bool>,
    pub bound_risk_events: Option<u32>,
    pub wall_ms: u128,
    pub message: String,
}

impl BenchRow {
    fn csv(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        let ratio = self
            .ratio
            .map(|r| format!("{r:.4}"))
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_escape(&self.file),
            self.status,
            opt(&self.omega),
            opt(&self.colors_used),
            opt(&self.colors_naive),
            opt(&self.chi_m),
            ratio,
            opt(&self.bound_ok),
            opt(&self.bound_risk_events),
            self.wall_ms,
            csv_escape(&self.message),
        )
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs every `*.json` instance under `dir` and returns rows ordered by file
/// name. Failures become rows; the run continues.
pub fn bench_directory(dir: &Path) -> Result<Vec<BenchRow>, FileError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| FileError::Io {
            path: dir.display().to_string(),
            source: e,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    Ok(paths.iter().map(|p| bench_one(p)).collect())
}

fn bench_one(path: &Path) -> BenchRow {
    let file = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let started = Instant::now();
    match run_instance(path) {
        Ok(mut row) => {
            row.file = file;
            row.wall_ms = started.elapsed().as_millis();
            row
        }
        Err(e) => BenchRow {
            file,
            status: "error".into(),
            omega: None,
            colors_used: None,
            colors_naive: None,
            chi_m: None,
            ratio: None,
            bound_ok: None,
            bound_risk_events: None,
            wall_ms: started.elapsed().as_millis(),
            message: e.to_string(),
        },
    }
}

fn run_instance(path: &Path) -> Result<BenchRow, anyhow::Error> {
    let inst = InstanceFile::read(path)?;
    let g = inst.to_graph()?;
    let sol = multicolor::solve(&g)?;
    let naive = multicolor::naive_solve(&g)?;
    let report = verify::verify(&g, &sol.assignment);
    if !report.ok() {
        anyhow::bail!("verification failed with {} violations", report.violations.len());
    }

    let omega = sol.stats.omega.omega();
    let total_demand: u64 = g.support().map(|v| g.demand(v) as u64).sum();
    let chi_m = if g.support_len() <= ORACLE_MAX_SUPPORT && total_demand <= ORACLE_MAX_TOTAL_DEMAND
    {
        match verify::exact_multichromatic(&g, sol.stats.colors_used as u64) {
            OracleOutcome::Exact(chi) => Some(chi),
            OracleOutcome::ExceedsLimit => None,
        }
    } else {
        None
    };
    let ratio = if omega > 0 {
        Some(sol.stats.colors_used as f64 / omega as f64)
    } else {
        None
    };

    Ok(BenchRow {
        file: String::new(),
        status: "ok".into(),
        omega: Some(omega),
        colors_used: Some(sol.stats.colors_used as u64),
        colors_naive: Some(naive.stats.colors_used as u64),
        chi_m,
        ratio,
        bound_ok: Some(sol.stats.within_bound()),
        bound_risk_events: Some(sol.stats.bound_risk_events),
        wall_ms: 0,
        message: String::new(),
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.csv());
    }
    out
}

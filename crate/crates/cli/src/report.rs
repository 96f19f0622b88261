//! CSV and JSON output of a run.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::runner::{DecayRow, Row, SlopeRow};
use crate::scenario::Scenario;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slopes: Vec<SlopeRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decay: Vec<DecayRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(sc: &Scenario) -> Self {
        Self {
            scenario: sc.clone(),
            rows: Vec::new(),
            slopes: Vec::new(),
            decay: Vec::new(),
            warnings: Vec::new(),
            passed: false,
        }
    }

    pub(crate) fn finish(&mut self) {
        self.passed = !self.rows.is_empty()
            && self.warnings.is_empty()
            && self.rows.iter().all(|r| r.pass)
            && self.slopes.iter().all(|s| s.pass)
            && self.decay.iter().all(|d| d.below_closed_form && d.below_cap.unwrap_or(true) && d.decreasing);
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count() + self.slopes.iter().filter(|s| !s.pass).count()
    }

    /// Writes `<id>.csv`, `<id>.json` and, when present, `<id>_slopes.csv` or `<id>_decay.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let id = &self.scenario.id;
        let mut written = Vec::new();
        let csv_path = dir.join(format!("{id}.csv"));
        write_csv(&csv_path, &self.rows)?;
        written.push(csv_path);
        if !self.slopes.is_empty() {
            let p = dir.join(format!("{id}_slopes.csv"));
            write_csv(&p, &self.slopes)?;
            written.push(p);
        }
        if !self.decay.is_empty() {
            let p = dir.join(format!("{id}_decay.csv"));
            write_csv(&p, &self.decay)?;
            written.push(p);
        }
        let json_path = dir.join(format!("{id}.json"));
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        fs::write(&json_path, text + "\n")?;
        written.push(json_path);
        Ok(written)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Schema { file: path.display().to_string(), msg: e.to_string() })
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

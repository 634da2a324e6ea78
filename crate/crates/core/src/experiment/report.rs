//! Experiment reports: scalars, distributions and tables, written as JSON or
//! as a directory of CSV files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::stats::{Histogram, Summary};

/// A summarised sample with its histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub summary: Summary,
    pub histogram: Histogram,
}

impl Distribution {
    /// Percent-valued samples binned over [0, 100].
    pub fn of_percentages(xs: &[f64], bins: usize) -> Self {
        Self {
            summary: Summary::of(xs),
            histogram: Histogram::new(xs, 0.0, 100.0, bins),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub scalars: BTreeMap<String, f64>,
    pub distributions: BTreeMap<String, Distribution>,
    pub tables: BTreeMap<String, Table>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::invalid(format!("unknown report format {other:?}"))),
        }
    }
}

impl Report {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            kind: config.kind,
            config: config.clone(),
            scalars: BTreeMap::new(),
            distributions: BTreeMap::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.get(name).copied()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the report into `dir` and returns the files created.
    ///
    /// JSON: `report.json`. CSV: `config.json`, `scalars.csv`,
    /// `distributions.csv` and one `<table>.csv` per table.
    pub fn write(&self, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            ReportFormat::Json => {
                let path = dir.join("report.json");
                fs::write(&path, self.to_json())?;
                written.push(path);
            }
            ReportFormat::Csv => {
                let path = dir.join("config.json");
                fs::write(&path, self.config.to_json() + "\n")?;
                written.push(path);

                let path = dir.join("scalars.csv");
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(["name", "value"])?;
                for (k, v) in &self.scalars {
                    w.write_record([k.as_str(), &v.to_string()])?;
                }
                w.flush()?;
                written.push(path);

                let path = dir.join("distributions.csv");
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(["name", "mean", "std_dev", "count"])?;
                for (k, d) in &self.distributions {
                    w.write_record([
                        k.clone(),
                        d.summary.mean.to_string(),
                        d.summary.std_dev.to_string(),
                        d.summary.count.to_string(),
                    ])?;
                }
                w.flush()?;
                written.push(path);

                for (name, table) in &self.tables {
                    let path = dir.join(format!("{name}.csv"));
                    let mut w = csv::Writer::from_path(&path)?;
                    w.write_record(&table.columns)?;
                    for row in &table.rows {
                        w.write_record(row.iter().map(|v| v.to_string()))?;
                    }
                    w.flush()?;
                    written.push(path);
                }
            }
        }
        Ok(written)
    }
}

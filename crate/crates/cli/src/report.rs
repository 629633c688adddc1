//! Results of a run: checked identities, tables and metadata, and how they are
//! written out.

use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

/// One asserted identity: `passed` is decided by the command, `value` and
/// `tolerance` say by how much.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, tolerance: threshold, passed: value > threshold }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Shortest round-trip form of a real number.
pub fn real(x: f64) -> String {
    x.to_string()
}

/// A complex number as its real part when the imaginary part vanishes, else `a+bi`.
pub fn complex(z: Complex64) -> String {
    if z.im == 0.0 {
        real(z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub params: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            command: config.command.name(),
            config: config.clone(),
            checks: Vec::new(),
            params: Value::Object(Default::default()),
            tables: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("results serialize to JSON");
        if let Value::Object(map) = &mut self.params {
            map.insert(key.to_string(), value);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn json(&self, embed_tables: bool) -> Value {
        let mut record = serde_json::to_value(self).expect("report serializes to JSON");
        let tables: Value = if embed_tables {
            serde_json::to_value(&self.tables).expect("tables serialize to JSON")
        } else {
            self.tables.iter().map(|t| Value::String(self.csv_name(t))).collect()
        };
        record["tables"] = tables;
        record
    }

    fn csv_name(&self, table: &Table) -> String {
        format!("{}_{}.csv", self.command, table.name)
    }

    /// Writes `<command>.json` plus one CSV per table into `dir`, or embeds the
    /// tables in the JSON record when the format is JSON.
    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let embed = self.config.format == Format::Json;
        let record = serde_json::to_string_pretty(&self.json(embed))?;
        std::fs::write(dir.join(format!("{}.json", self.command)), record + "\n")?;
        if !embed {
            for table in &self.tables {
                let file = std::fs::File::create(dir.join(self.csv_name(table)))?;
                table.write_csv(file)?;
            }
        }
        Ok(())
    }

    /// Without an output directory: the full JSON record, or the first table as CSV.
    pub fn write_stdout(&self) -> io::Result<()> {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        match self.config.format {
            Format::Json => writeln!(lock, "{}", serde_json::to_string_pretty(&self.json(true))?),
            Format::Csv => match self.tables.first() {
                Some(t) => Ok(t.write_csv(&mut lock)?),
                None => Ok(()),
            },
        }
    }

    /// One line per check on stderr.
    pub fn print_checks(&self) {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            eprintln!("{status} {}: {:.3e} (tolerance {:.3e})", c.name, c.value, c.tolerance);
        }
    }
}

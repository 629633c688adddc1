//! Run configuration: defaults per subcommand, then the config file, then flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fractal_spectra::measure::{ParameterError, SlConstants};
use fractal_spectra::sg::{BoundaryCondition, MAX_GRAPH_LEVEL};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gasket graph spectra: direct eigensolve against spectral decimation.
    SgSpectrum,
    /// Gasket zeta function: factorized form against direct sums.
    SgZeta,
    /// Infinite gasket: scaling window and hyperfunction factors.
    SgInfinite,
    /// Generating set and spectra of the string operators.
    SlSpectrum,
    /// Zeta functions of the string operators.
    SlZeta,
    /// Riemann zeta function recovered from the alpha = 1/2 string.
    RiemannCheck,
    /// Fractal string factorization.
    StringZeta,
    /// Partial sums of the bilateral geometric series.
    HyperfunctionDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SgSpectrum => "sg-spectrum",
            Command::SgZeta => "sg-zeta",
            Command::SgInfinite => "sg-infinite",
            Command::SlSpectrum => "sl-spectrum",
            Command::SlZeta => "sl-zeta",
            Command::RiemannCheck => "riemann-check",
            Command::StringZeta => "string-zeta",
            Command::HyperfunctionDemo => "hyperfunction-demo",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

impl From<Boundary> for BoundaryCondition {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Dirichlet => BoundaryCondition::Dirichlet,
            Boundary::Neumann => BoundaryCondition::Neumann,
        }
    }
}

/// Tolerances a run can override with `--tol NAME=VAL`.
pub const TOLERANCES: [(&str, f64); 7] = [
    ("spectrum", 1e-9),
    ("closure", 1e-10),
    ("oracle", 5e-3),
    ("riemann", 1e-4),
    ("defining", 1e-6),
    ("slack", 1e-15),
    ("divergence", 1e6),
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("--tol expects NAME=VALUE, got '{0}'")]
    TolSyntax(String),
    #[error("unknown tolerance '{0}' (known: spectrum, closure, oracle, riemann, defining, slack, divergence)")]
    UnknownTol(String),
    #[error("tolerance {name} must be positive, got {value}")]
    NonpositiveTol { name: String, value: f64 },
    #[error("cannot parse '{0}' as a number")]
    Number(String),
    #[error("invalid alpha: {0}")]
    Alpha(#[from] ParameterError),
    #[error("{0}")]
    Invalid(String),
}

/// One entry of an `s` list: a number, or a string such as `"2+1i"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SValue {
    Real(f64),
    Text(String),
}

impl SValue {
    fn parse(&self) -> Result<Complex64, ConfigError> {
        match self {
            SValue::Real(x) => Ok(Complex64::new(*x, 0.0)),
            SValue::Text(t) => parse_complex(t),
        }
    }
}

fn parse_complex(text: &str) -> Result<Complex64, ConfigError> {
    text.trim().parse().map_err(|_| ConfigError::Number(text.to_string()))
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Vec<T>, ConfigError> {
    text.split(',').filter(|t| !t.trim().is_empty()).map(item).collect()
}

fn parse_real(text: &str) -> Result<f64, ConfigError> {
    text.trim().parse().map_err(|_| ConfigError::Number(text.to_string()))
}

/// Settings read from a TOML file. Every key is optional; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    alpha: Option<f64>,
    level: Option<u32>,
    terms: Option<u32>,
    count: Option<usize>,
    depth: Option<u32>,
    n: Option<u32>,
    n_min: Option<i32>,
    n_max: Option<i32>,
    z0: Option<f64>,
    boundary: Option<Boundary>,
    s: Option<Vec<SValue>>,
    w: Option<Vec<f64>>,
    lengths: Option<Vec<f64>>,
    bound: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol: Option<BTreeMap<String, f64>>,
}

/// Command-line overrides.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML file with any of the settings below (flags take precedence).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Similarity ratio of the string measure, in (0, 1/2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Refinement level of the graph or grid.
    #[arg(long)]
    pub level: Option<u32>,
    /// Terms of each partial sum.
    #[arg(long)]
    pub terms: Option<u32>,
    /// Number of generating-set values to compute.
    #[arg(long)]
    pub count: Option<usize>,
    /// Preimage depth of the infinite-gasket window.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Index of the string operator H_<n>.
    #[arg(long)]
    pub n: Option<u32>,
    /// Smallest scaling exponent of the infinite-gasket window.
    #[arg(long, allow_hyphen_values = true)]
    pub n_min: Option<i32>,
    /// Largest scaling exponent of the infinite-gasket window.
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<i32>,
    /// Seed of the infinite-gasket window (3/4 or 5/4).
    #[arg(long)]
    pub z0: Option<f64>,
    #[arg(long, value_enum)]
    pub boundary: Option<Boundary>,
    /// Comma-separated values of s, complex allowed ("2,3,4" or "2+1i").
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// Comma-separated arguments of the bilateral series.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Comma-separated string lengths (the Cantor string when absent).
    #[arg(long)]
    pub lengths: Option<String>,
    /// Eigenvalue cutoff for string spectra.
    #[arg(long)]
    pub bound: Option<f64>,
    /// Directory for the JSON record and CSV tables (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Tolerance override NAME=VALUE, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

/// Fully resolved settings of a run, recorded with every result.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: f64,
    pub level: u32,
    pub terms: u32,
    pub count: usize,
    pub depth: u32,
    pub n: u32,
    pub n_min: i32,
    pub n_max: i32,
    pub z0: f64,
    pub boundary: Boundary,
    pub s: Vec<Complex64>,
    pub w: Vec<f64>,
    pub lengths: Vec<f64>,
    pub bound: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: BTreeMap<String, f64>,
}

impl RunConfig {
    fn defaults(command: Command) -> Self {
        use Command::*;
        let level = match command {
            SgSpectrum => 3,
            SgZeta => 8,
            SlSpectrum | SlZeta => 12,
            RiemannCheck => 14,
            _ => 0,
        };
        let count = match command {
            SlSpectrum => 20,
            SlZeta => 500,
            RiemannCheck => 2000,
            _ => 0,
        };
        let s: &[f64] = match command {
            SgZeta => &[3.0, 4.0, 5.0],
            SgInfinite | SlZeta | RiemannCheck => &[2.0, 3.0, 4.0],
            StringZeta => &[2.0, 3.0],
            _ => &[],
        };
        Self {
            command,
            alpha: 0.5,
            level,
            terms: 60,
            count,
            depth: 4,
            n: 0,
            n_min: -2,
            n_max: 3,
            z0: 0.75,
            boundary: Boundary::Dirichlet,
            s: s.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            w: vec![0.3, 0.7, 1.5, 4.0],
            lengths: Vec::new(),
            bound: 1e10,
            out: None,
            format: Format::Csv,
            tol: TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }

    /// Defaults, overlaid by the config file, overlaid by flags, then validated.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self, ConfigError> {
        let file = match &flags.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.clone(), source })?;
                toml::from_str(&text)?
            }
            None => FileConfig::default(),
        };
        let mut cfg = Self::defaults(command);
        cfg.apply_file(file)?;
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn set_tol(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        if !self.tol.contains_key(name) {
            return Err(ConfigError::UnknownTol(name.to_string()));
        }
        if value.is_nan() || value <= 0.0 {
            return Err(ConfigError::NonpositiveTol { name: name.to_string(), value });
        }
        self.tol.insert(name.to_string(), value);
        Ok(())
    }

    fn apply_file(&mut self, f: FileConfig) -> Result<(), ConfigError> {
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = f.$field { self.$field = v; })* };
        }
        take!(alpha, level, terms, count, depth, n, n_min, n_max, z0, boundary, w, lengths, bound, format);
        if let Some(out) = f.out {
            self.out = Some(out);
        }
        if let Some(s) = f.s {
            self.s = s.iter().map(SValue::parse).collect::<Result<_, _>>()?;
        }
        for (name, value) in f.tol.unwrap_or_default() {
            self.set_tol(&name, value)?;
        }
        Ok(())
    }

    fn apply_flags(&mut self, f: &Flags) -> Result<(), ConfigError> {
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = f.$field.clone() { self.$field = v; })* };
        }
        take!(alpha, level, terms, count, depth, n, n_min, n_max, z0, boundary, bound, format);
        if let Some(out) = &f.out {
            self.out = Some(out.clone());
        }
        if let Some(s) = &f.s {
            self.s = parse_list(s, parse_complex)?;
        }
        if let Some(w) = &f.w {
            self.w = parse_list(w, parse_real)?;
        }
        if let Some(l) = &f.lengths {
            self.lengths = parse_list(l, parse_real)?;
        }
        for item in &f.tol {
            let (name, value) = item.split_once('=').ok_or_else(|| ConfigError::TolSyntax(item.clone()))?;
            self.set_tol(name.trim(), parse_real(value)?)?;
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        use Command::*;
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if matches!(self.command, SlSpectrum | SlZeta | RiemannCheck) {
            SlConstants::new(self.alpha)?;
            if self.count == 0 {
                return invalid("--count must be at least 1".into());
            }
        }
        if self.command == RiemannCheck && self.alpha != 0.5 {
            return invalid(format!("riemann-check runs at alpha = 0.5, got {}", self.alpha));
        }
        if self.command == SlSpectrum && self.level < 8 {
            return invalid(format!("sl-spectrum compares against an oracle that needs --level >= 8, got {}", self.level));
        }
        if matches!(self.command, SgSpectrum | SgZeta) && self.level > MAX_GRAPH_LEVEL {
            return invalid(format!("--level {} exceeds the graph cap {MAX_GRAPH_LEVEL}", self.level));
        }
        if self.command == SgSpectrum && self.level == 0 && self.boundary == Boundary::Dirichlet {
            return invalid("the level-0 graph has no interior vertices; use --level >= 1".into());
        }
        if self.command == SgInfinite && self.n_min > self.n_max {
            return invalid(format!("--n-min {} exceeds --n-max {}", self.n_min, self.n_max));
        }
        if matches!(self.command, SgZeta | SgInfinite | SlZeta | RiemannCheck | StringZeta) && self.s.is_empty() {
            return invalid("--s needs at least one value".into());
        }
        if self.command == HyperfunctionDemo {
            if self.terms == 0 {
                return invalid("--terms must be at least 1".into());
            }
            if let Some(w) = self.w.iter().find(|w| (w.abs() - 1.0).abs() < 1e-14) {
                return invalid(format!("w = {w} lies on the unit circle, where neither series converges"));
            }
        }
        if self.command == StringZeta {
            if self.bound.is_nan() || self.bound <= 0.0 {
                return invalid("--bound must be positive".into());
            }
            if self.lengths.iter().any(|&l| l.is_nan() || l <= 0.0) {
                return invalid("string lengths must be positive".into());
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tol[name]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("fs-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "alpha = 0.25\nlevel = 9\ns = [2.0, \"3+1i\"]\n[tol]\noracle = 0.01\n").unwrap();
        let flags = Flags { config: Some(path), level: Some(10), tol: vec!["defining=1e-5".into()], ..Default::default() };
        let cfg = RunConfig::resolve(Command::SlZeta, &flags).unwrap();
        assert_eq!(cfg.alpha, 0.25);
        assert_eq!(cfg.level, 10);
        assert_eq!(cfg.s, vec![Complex64::new(2.0, 0.0), Complex64::new(3.0, 1.0)]);
        assert_eq!(cfg.tolerance("oracle"), 0.01);
        assert_eq!(cfg.tolerance("defining"), 1e-5);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn rejects_bad_settings() {
        let alpha = Flags { alpha: Some(0.7), ..Default::default() };
        let err = RunConfig::resolve(Command::SlSpectrum, &alpha).unwrap_err();
        assert!(err.to_string().contains("delta <= 1"), "{err}");
        let tol = Flags { tol: vec!["nonsense=1".into()], ..Default::default() };
        assert!(matches!(RunConfig::resolve(Command::SgZeta, &tol), Err(ConfigError::UnknownTol(_))));
        let tol = Flags { tol: vec!["riemann=-1".into()], ..Default::default() };
        assert!(matches!(RunConfig::resolve(Command::RiemannCheck, &tol), Err(ConfigError::NonpositiveTol { .. })));
        let s = Flags { s: Some("2,x".into()), ..Default::default() };
        assert!(matches!(RunConfig::resolve(Command::SgZeta, &s), Err(ConfigError::Number(_))));
    }

    #[test]
    fn negative_s_parses() {
        let flags = Flags { s: Some("-2, 4".into()), ..Default::default() };
        let cfg = RunConfig::resolve(Command::SgInfinite, &flags).unwrap();
        assert_eq!(cfg.s[0], Complex64::new(-2.0, 0.0));
    }
}

//! One function per subcommand. Each computes its results, records the identities it
//! checks, and leaves writing to the caller.

use fractal_spectra::hyperfunction::{bilateral_partial, delta_t, geometric_tail_bound, HyperfunctionError, Side};
use fractal_spectra::measure::{MeasureGrid, ParameterError, SlConstants};
use fractal_spectra::sg::{
    decimation_spectrum, eigensolve_direct, forward_check, infinite_sg_spectrum, SgError, MAX_DENSE_LEVEL,
};
use fractal_spectra::sturm_liouville::{eigensolve_oracle, generating_set, spectrum_hn, HnIndex, SlError};
use fractal_spectra::zeta::{
    calibrate_sg_normalization, cantor_string_lengths, cantor_string_zeta, defining_condition_residuals,
    infinite_sg_zeta, riemann_identity_check, sg_zeta_direct, sg_zeta_factorized, string_factorization,
    string_spectrum, zeta_hinf, zeta_rho, zeta_rho_direct, zeta_s, ZetaError, ZetaValue,
};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::{Command, RunConfig};
use crate::report::{complex, real, Check, Report, Table};

/// Generating-set values whose orbits are tested against the defining condition.
const DEFINING_SAMPLE: usize = 20;
/// Iterates of `rho` covered by that test.
const DEFINING_DEPTH: u32 = 4;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Parameter(#[from] ParameterError),
    #[error(transparent)]
    Sg(#[from] SgError),
    #[error(transparent)]
    Sl(#[from] SlError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Hyperfunction(#[from] HyperfunctionError),
}

/// A zeta evaluation tagged with what it evaluates.
#[derive(Serialize)]
struct ZetaRecord {
    object: String,
    #[serde(flatten)]
    zeta: ZetaValue,
}

fn record(object: &str, zeta: &ZetaValue) -> ZetaRecord {
    ZetaRecord { object: object.to_string(), zeta: *zeta }
}

pub fn run(cfg: &RunConfig) -> Result<Report, CommandError> {
    let mut report = Report::new(cfg);
    match cfg.command {
        Command::SgSpectrum => sg_spectrum(cfg, &mut report)?,
        Command::SgZeta => sg_zeta(cfg, &mut report)?,
        Command::SgInfinite => sg_infinite(cfg, &mut report)?,
        Command::SlSpectrum => sl_spectrum(cfg, &mut report)?,
        Command::SlZeta => sl_zeta(cfg, &mut report)?,
        Command::RiemannCheck => riemann_check(cfg, &mut report)?,
        Command::StringZeta => string_zeta(cfg, &mut report)?,
        Command::HyperfunctionDemo => hyperfunction_demo(cfg, &mut report)?,
    }
    Ok(report)
}

fn sg_spectrum(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let bc = cfg.boundary.into();
    let tol = cfg.tolerance("spectrum");
    let dec = decimation_spectrum(cfg.level, bc)?;
    let oracle = if cfg.level <= MAX_DENSE_LEVEL { Some(eigensolve_direct(cfg.level, bc)?) } else { None };
    let mut table = Table::new("spectrum", &["value", "decimation_multiplicity", "oracle_multiplicity", "match"]);
    for e in dec.entries() {
        let (oracle_mult, matched) = match &oracle {
            Some(o) => {
                let m = o.multiplicity_of(e.value, tol);
                (m.to_string(), (m == e.multiplicity).to_string())
            }
            None => (String::new(), String::new()),
        };
        table.push(vec![real(e.value), e.multiplicity.to_string(), oracle_mult, matched]);
    }
    report.tables.push(table);
    if let Some(o) = &oracle {
        let mismatch = dec.first_mismatch(o, tol);
        report.param("first_mismatch", mismatch);
        report.checks.push(Check::at_most("decimation_vs_oracle", f64::from(u8::from(mismatch.is_some())), 0.0));
    }
    let (failures, checked) = match forward_check(cfg.level, bc) {
        Ok(n) => (0.0, n),
        Err(SgError::ForwardMismatch { value, .. }) => {
            report.param("forward_mismatch", value);
            (1.0, 0)
        }
        Err(e) => return Err(e.into()),
    };
    report.param("forward_checked", checked);
    report.param("decimation_count", dec.total_count());
    report.checks.push(Check::at_most("forward_map", failures, 0.0));
    Ok(())
}

fn sg_zeta(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let cal = calibrate_sg_normalization(cfg.level)?;
    let mut table = Table::new("zeta", &["s", "factorized", "direct", "discrepancy", "bound", "passed"]);
    let mut records = Vec::new();
    for &s in &cfg.s {
        let f = sg_zeta_factorized(s)?;
        let d = sg_zeta_direct(s, cfg.level, cal.chosen)?;
        let check = Check::at_most(format!("factorization s={}", complex(s)), f.discrepancy(&d), f.tail_estimate + d.tail_estimate);
        table.push(vec![
            complex(s),
            complex(f.estimate()),
            complex(d.estimate()),
            real(check.value),
            real(check.tolerance),
            check.passed.to_string(),
        ]);
        records.push(record("gasket-factorized", &f));
        records.push(record("gasket-direct", &d));
        report.checks.push(check);
    }
    report.param("calibration", &cal);
    report.param("records", records);
    report.tables.push(table);
    Ok(())
}

fn sg_infinite(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let window = infinite_sg_spectrum(cfg.n_min, cfg.n_max, cfg.depth, cfg.z0)?;
    let shifted = infinite_sg_spectrum(cfg.n_min + 1, cfg.n_max + 1, cfg.depth, cfg.z0)?;
    let closure = if window.len() == shifted.len() {
        window
            .values()
            .zip(shifted.values())
            .map(|(x, y)| (5.0 * x - y).abs() / y.max(1.0))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    report.checks.push(Check::at_most("scaling_closure", closure, cfg.tolerance("closure")));
    let mut spectrum = Table::new("spectrum", &["value"]);
    for v in window.values() {
        spectrum.push(vec![real(v)]);
    }

    let mut factors = Table::new(
        "factors",
        &["s", "side", "factor", "partial_sum", "error", "bound", "value", "formal"],
    );
    for &s in &cfg.s {
        let v = infinite_sg_zeta(s)?;
        let w = (-s / 2.0 * 5f64.ln()).exp();
        let partial = bilateral_partial(w, cfg.terms, v.side)?;
        let check = Check::at_most(
            format!("geometric_factor s={}", complex(s)),
            (partial - v.factor).norm(),
            geometric_tail_bound(w, cfg.terms, v.side) + cfg.tolerance("slack"),
        );
        factors.push(vec![
            complex(s),
            v.side.to_string(),
            complex(v.factor),
            complex(partial),
            real(check.value),
            real(check.tolerance),
            v.value.map(complex).unwrap_or_default(),
            v.formal.to_string(),
        ]);
        report.checks.push(check);
    }
    report.param("window_size", window.len());
    report.tables.push(spectrum);
    report.tables.push(factors);
    Ok(())
}

fn sl_spectrum(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let consts = SlConstants::new(cfg.alpha)?;
    let set = generating_set(cfg.count, &consts, cfg.level)?;
    let gamma = consts.gamma();
    let n = cfg.n as i32;
    let (first, last) = (set.values[0], set.values[set.len() - 1]);
    let bound = last * gamma.powi(-n);
    let p_max = ((bound / first).ln() / gamma.ln()).ceil() as i32;
    let union = spectrum_hn(HnIndex::Finite(cfg.n), -n, p_max, &set)?.below(bound);
    let grid = MeasureGrid::build(cfg.level, &consts).blow_up(n);
    let k = union.len().min(cfg.count);
    let oracle = eigensolve_oracle(k, &grid)?;

    let mut s_table = Table::new("generating_set", &["index", "value"]);
    for (i, v) in set.values.iter().enumerate() {
        s_table.push(vec![(i + 1).to_string(), real(*v)]);
    }
    let mut table = Table::new("spectrum", &["index", "from_generating_set", "oracle", "relative_error"]);
    let mut worst: f64 = 0.0;
    for (i, (u, o)) in union.values().zip(oracle.expanded()).enumerate().take(k) {
        let rel = (o - u).abs() / u;
        worst = worst.max(rel);
        table.push(vec![(i + 1).to_string(), real(u), real(o), real(rel)]);
    }
    let clustered = oracle.entries().iter().filter(|e| e.multiplicity > 1 || e.value <= 0.0).count();
    report.checks.push(Check::at_most("oracle_agreement", worst, cfg.tolerance("oracle")));
    report.checks.push(Check::at_most("simple_positive", clustered as f64, 0.0));
    report.param("constants", consts);
    report.tables.push(s_table);
    report.tables.push(table);
    Ok(())
}

fn sl_zeta(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let consts = SlConstants::new(cfg.alpha)?;
    let set = generating_set(cfg.count, &consts, cfg.level)?;
    let mut table = Table::new(
        "zeta",
        &["s", "zeta_s", "zeta_rho", "zeta_rho_direct", "discrepancy", "bound", "hinf_side", "hinf_factor", "hinf_value"],
    );
    let mut records = Vec::new();
    for &s in &cfg.s {
        let hinf = zeta_hinf(&set, s)?;
        let mut row = vec![complex(s), String::new(), String::new(), String::new(), String::new(), String::new()];
        if s.re > 0.0 {
            let zs = zeta_s(&set, s)?;
            let closed = zeta_rho(&set, s)?;
            let direct = zeta_rho_direct(&set, s)?;
            let check = Check::at_most(
                format!("closed_vs_direct s={}", complex(s)),
                closed.discrepancy(&direct),
                closed.tail_estimate + direct.tail_estimate,
            );
            row = vec![
                complex(s),
                complex(zs.estimate()),
                complex(closed.estimate()),
                complex(direct.estimate()),
                real(check.value),
                real(check.tolerance),
            ];
            records.push(record("zeta-s", &zs));
            records.push(record("zeta-rho", &closed));
            records.push(record("zeta-rho-direct", &direct));
            report.checks.push(check);
        }
        row.extend([hinf.side.to_string(), complex(hinf.factor), hinf.value.map(complex).unwrap_or_default()]);
        table.push(row);
    }
    let sample = set.truncated(DEFINING_SAMPLE);
    let residuals = defining_condition_residuals(&sample, DEFINING_DEPTH)?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    report.checks.push(Check::at_most("defining_condition", worst, cfg.tolerance("defining")));
    report.param("defining_residuals", residuals);
    report.param("constants", consts);
    report.param("records", records);
    report.tables.push(table);
    Ok(())
}

fn riemann_check(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let set = generating_set(cfg.count, &SlConstants::new(cfg.alpha)?, cfg.level)?;
    let mut table = Table::new("residuals", &["s", "pi_s_zeta_rho", "riemann_zeta", "residual"]);
    let mut records = Vec::new();
    for &s in &cfg.s {
        let check = riemann_identity_check(&set, s)?;
        table.push(vec![complex(s), complex(check.scaled), complex(check.reference), real(check.residual)]);
        report.checks.push(Check::at_most(format!("riemann s={}", complex(s)), check.residual, cfg.tolerance("riemann")));
        records.push(record("zeta-rho", &check.zeta_rho));
    }
    report.param("records", records);
    report.tables.push(table);
    Ok(())
}

fn string_zeta(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let cantor = cfg.lengths.is_empty();
    let lengths: Vec<(f64, u64)> =
        if cantor { cantor_string_lengths(cfg.bound) } else { cfg.lengths.iter().map(|&l| (l, 1)).collect() };
    let spec = string_spectrum(&lengths, cfg.bound);
    let mut table = Table::new("zeta", &["s", "direct", "tail_estimate", "factorized", "residual"]);
    let mut records = Vec::new();
    for &s in &cfg.s {
        let string_zeta = if cantor {
            cantor_string_zeta(s)?
        } else {
            lengths.iter().map(|&(l, m)| m as f64 * (s * l.ln()).exp()).sum::<Complex64>()
        };
        let check = string_factorization(&spec, string_zeta, s)?;
        table.push(vec![
            complex(s),
            complex(check.direct.estimate()),
            real(check.direct.tail_estimate),
            complex(check.factorized),
            real(check.residual),
        ]);
        report.checks.push(Check::at_most(format!("string s={}", complex(s)), check.residual, check.direct.tail_estimate));
        records.push(record("string-direct", &check.direct));
    }
    report.param("string", if cantor { "cantor" } else { "lengths" });
    report.param("records", records);
    report.tables.push(table);
    Ok(())
}

fn hyperfunction_demo(cfg: &RunConfig, report: &mut Report) -> Result<(), CommandError> {
    let d = delta_t();
    let mut table = Table::new("partial_sums", &["w", "side", "partial_sum", "branch_value", "error", "bound", "other_side_modulus"]);
    for &w in &cfg.w {
        let z = Complex64::new(w, 0.0);
        let (side, other) = if w.abs() < 1.0 { (Side::Inside, Side::Outside) } else { (Side::Outside, Side::Inside) };
        let partial = bilateral_partial(z, cfg.terms, side)?;
        let target = d.eval(side, z)?;
        let wrong = bilateral_partial(z, cfg.terms, other)?.norm();
        let check = Check::at_most(
            format!("partial_sum w={w}"),
            (partial - target).norm(),
            geometric_tail_bound(z, cfg.terms, side) + cfg.tolerance("slack"),
        );
        table.push(vec![
            real(w),
            side.to_string(),
            complex(partial),
            complex(target),
            real(check.value),
            real(check.tolerance),
            real(wrong),
        ]);
        report.checks.push(check);
        report.checks.push(Check::above(format!("divergence w={w}"), wrong, cfg.tolerance("divergence")));
    }
    report.param("reference", "delta_T = [1/(1-z), 1/(z-1)]");
    report.tables.push(table);
    Ok(())
}

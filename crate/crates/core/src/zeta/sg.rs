//! The gasket zeta function through polynomial zeta functions, checked against direct
//! sums over renormalized decimation eigenvalues.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{zeta_spectral, Method, TailModel, ZetaError, ZetaValue, POLE_TOL};
use crate::hyperfunction::{HalfPlaneFactorization, SidedValue};
use crate::poly_zeta::{zeta_poly, Poly1, INCREMENT_TOL, MAX_ZETA_LEVEL};
use crate::sg::{renormalized_spectrum, BoundaryCondition};

/// Real `s` at which the eigenvalue normalization is chosen.
pub const SG_CALIBRATION_S: f64 = 4.0;

/// Eigenvalue convention for the gasket Laplacian: graph spectra with the given
/// boundary condition, renormalized and multiplied by `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgNormalization {
    pub boundary: BoundaryCondition,
    pub kappa: f64,
}

impl SgNormalization {
    /// All conventions tried by [`calibrate_sg_normalization`].
    pub const CANDIDATES: [SgNormalization; 4] = [
        SgNormalization { boundary: BoundaryCondition::Dirichlet, kappa: 1.0 },
        SgNormalization { boundary: BoundaryCondition::Dirichlet, kappa: 1.5 },
        SgNormalization { boundary: BoundaryCondition::Neumann, kappa: 1.0 },
        SgNormalization { boundary: BoundaryCondition::Neumann, kappa: 1.5 },
    ];
}

/// Outcome of matching direct sums to the factorized form at [`SG_CALIBRATION_S`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SgCalibration {
    pub chosen: SgNormalization,
    pub level: u32,
    pub factorized: ZetaValue,
    /// Relative discrepancy per candidate, in [`SgNormalization::CANDIDATES`] order.
    pub residuals: Vec<(SgNormalization, f64)>,
}

/// Convergence abscissa `log 9 / log 5` of the constituent series.
pub fn sg_abscissa() -> f64 {
    9f64.ln() / 5f64.ln()
}

/// The gasket zeta function as two polynomial zeta functions of `z(5 - 4z)`, at
/// `3/4` and `5/4`, times geometric factors in `q = 5^{-s/2}`:
///
/// `zeta_{3/4} q/2 (1/(1-3q) + 3/(1-q)) + zeta_{5/4} q^2/2 (3/(1-3q) - 1/(1-q))`.
pub fn sg_zeta_factorized(s: Complex64) -> Result<ZetaValue, ZetaError> {
    let q = (-s / 2.0 * 5f64.ln()).exp();
    let one = Complex64::new(1.0, 0.0);
    if (one - 3.0 * q).norm() < POLE_TOL || (one - q).norm() < POLE_TOL {
        return Err(ZetaError::Pole { s });
    }
    if s.re <= sg_abscissa() {
        return Err(ZetaError::Domain { s, reason: "constituent series converge only for Re(s) > log 9 / log 5" });
    }
    let p = Poly1::sierpinski();
    let z34 = zeta_poly(&p, Complex64::new(0.75, 0.0), s, INCREMENT_TOL, MAX_ZETA_LEVEL)?;
    let z54 = zeta_poly(&p, Complex64::new(1.25, 0.0), s, INCREMENT_TOL, MAX_ZETA_LEVEL)?;
    let a = q / 2.0 * ((one - 3.0 * q).inv() + 3.0 / (one - q));
    let b = q * q / 2.0 * (3.0 / (one - 3.0 * q) - (one - q).inv());
    Ok(ZetaValue {
        s,
        value: a * z34.value + b * z54.value,
        tail: a * z34.tail + b * z54.tail,
        terms_used: z34.terms_used + z54.terms_used,
        tail_estimate: a.norm() * z34.tail_estimate + b.norm() * z54.tail_estimate,
        method: Method::Factorized,
    })
}

/// Direct sum over the renormalized level-`level` spectrum, cut at its completeness
/// bound, with a fitted tail.
pub fn sg_zeta_direct(s: Complex64, level: u32, norm: SgNormalization) -> Result<ZetaValue, ZetaError> {
    let renormalized = renormalized_spectrum(level, norm.boundary, norm.kappa)?;
    let spec = renormalized.spectrum.below(renormalized.completeness_bound);
    zeta_spectral(&spec, s, None, TailModel::PowerLaw)
}

/// Picks the eigenvalue convention whose direct sum best matches the factorized form
/// at [`SG_CALIBRATION_S`].
pub fn calibrate_sg_normalization(level: u32) -> Result<SgCalibration, ZetaError> {
    let s = Complex64::new(SG_CALIBRATION_S, 0.0);
    let factorized = sg_zeta_factorized(s)?;
    let target = factorized.estimate();
    let mut residuals = Vec::with_capacity(SgNormalization::CANDIDATES.len());
    for norm in SgNormalization::CANDIDATES {
        let direct = sg_zeta_direct(s, level, norm)?;
        residuals.push((norm, (direct.estimate() - target).norm() / target.norm()));
    }
    let chosen = residuals
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|r| r.0)
        .expect("candidate list is not empty");
    log::info!("gasket normalization: {:?} with kappa {}", chosen.boundary, chosen.kappa);
    Ok(SgCalibration { chosen, level, factorized, residuals })
}

/// `delta_T(5^{-s/2})` times the gasket zeta function: the zeta function of the
/// infinite gasket. Formal for `Re(s) <= log 9 / log 5`.
pub fn infinite_sg_zeta(s: Complex64) -> Result<SidedValue, ZetaError> {
    let scalar = if s.re > sg_abscissa() { Some(sg_zeta_factorized(s)?) } else { None };
    Ok(HalfPlaneFactorization::dirac(5.0).evaluate(s, scalar)?)
}

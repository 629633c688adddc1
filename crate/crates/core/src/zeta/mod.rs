//! Spectral zeta functions, their closed forms, and the factorization identities
//! that tie them together.

mod riemann;
mod sg;
mod sl;
mod value;

use num_complex::Complex64;
use thiserror::Error;

pub use riemann::{
    cantor_string_lengths, cantor_string_zeta, riemann_identity_check, riemann_reference, string_factorization,
    string_spectrum, RiemannCheck, StringCheck,
};
pub use sg::{
    calibrate_sg_normalization, infinite_sg_zeta, sg_zeta_direct, sg_zeta_factorized, SgCalibration,
    SgNormalization, SG_CALIBRATION_S,
};
pub use sl::{
    defining_condition_residuals, zeta_hinf, zeta_hn_closed, zeta_hn_direct, zeta_rho, zeta_rho_direct, zeta_s,
};
pub use value::{Method, ZetaValue};

use crate::hyperfunction::HyperfunctionError;
use crate::poly_zeta::PolyZetaError;
use crate::sg::SgError;
use crate::spectrum::SpectrumList;
use crate::sturm_liouville::SlError;

/// Eigenvalues of the last decade (`[Lambda/10, Lambda]`) feed the tail fit.
pub const FIT_DECADE: f64 = 10.0;
/// Fewest entries a tail fit accepts.
pub const MIN_FIT_POINTS: usize = 8;
/// Below this modulus a geometric factor's denominator counts as a pole.
const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("eigenvalue {value} is not positive")]
    NonpositiveEigenvalue { value: f64 },
    #[error("series diverges at Re(s) = {re}: fitted counting exponent {exponent} needs Re(s) > {}", 2.0 * exponent)]
    Divergent { re: f64, exponent: f64 },
    #[error("tail fit needs {needed} entries in the last decade, found {found}")]
    Truncation { found: usize, needed: usize },
    #[error("geometric factor has a pole at s = {s}")]
    Pole { s: Complex64 },
    #[error("the identity holds at alpha = 1/2, got {alpha}")]
    Alpha { alpha: f64 },
    #[error("s = {s} is outside the implemented region: {reason}")]
    Domain { s: Complex64, reason: &'static str },
    #[error(transparent)]
    Poly(#[from] PolyZetaError),
    #[error(transparent)]
    Sg(#[from] SgError),
    #[error(transparent)]
    Sl(#[from] SlError),
    #[error(transparent)]
    Hyperfunction(#[from] HyperfunctionError),
}

/// How the part of the spectrum beyond the cutoff is accounted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailModel {
    /// The list is the whole spectrum.
    Finite,
    /// Fit `N(lambda) ~ A lambda^beta` on the last decade and integrate it.
    PowerLaw,
}

/// Fit `N(lambda) ~ A lambda^beta + C` of a counting function. Only `A` and `beta`
/// enter the tail; the offset `C` absorbs the lower-order part of the count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingFit {
    pub amplitude: f64,
    pub exponent: f64,
    pub offset: f64,
}

/// Least-squares fit of the counting function over the last decade.
///
/// The counting function is sampled at the middle of each jump (`N_j - m_j / 2`),
/// which is where a smooth interpolant of a staircase passes. For fixed `beta` the
/// fit is linear in `A` and `C`; `beta` is found by golden-section search.
pub fn fit_counting(spec: &SpectrumList) -> Result<CountingFit, ZetaError> {
    let entries = spec.entries();
    let top = entries.last().map_or(0.0, |e| e.value);
    let mut cumulative = 0u64;
    let mut points = Vec::new();
    for e in entries {
        cumulative += e.multiplicity;
        if e.value >= top / FIT_DECADE {
            // Scaled by the top value so the powers stay of order one.
            points.push((e.value / top, cumulative as f64 - 0.5 * e.multiplicity as f64));
        }
    }
    if points.len() < MIN_FIT_POINTS {
        return Err(ZetaError::Truncation { found: points.len(), needed: MIN_FIT_POINTS });
    }
    let solve = |beta: f64| {
        let k = points.len() as f64;
        let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.powf(beta) / k, b + y / k));
        let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
            let u = x.powf(beta) - mx;
            (a + u * (y - my), b + u * u)
        });
        let amp = sxy / sxx;
        let offset = my - amp * mx;
        let sse: f64 = points.iter().map(|(x, y)| (y - amp * x.powf(beta) - offset).powi(2)).sum();
        (amp, offset, sse)
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.02, 4.0);
    for _ in 0..80 {
        let a = hi - ratio * (hi - lo);
        let b = lo + ratio * (hi - lo);
        if solve(a).2 < solve(b).2 {
            hi = b;
        } else {
            lo = a;
        }
    }
    let exponent = 0.5 * (lo + hi);
    let (amp, offset, _) = solve(exponent);
    Ok(CountingFit { amplitude: amp * top.powf(-exponent), exponent, offset })
}

/// `sum_j m_j kappa_j^{-s/2}` over the first `cutoff` entries (all when `None`).
///
/// With [`TailModel::PowerLaw`] the remainder is the integral of `lambda^{-s/2}`
/// against the fitted counting function beyond the last eigenvalue `Lambda`, less the
/// half jump at `Lambda` the fit already covers. `tail_estimate` is the size of that
/// correction plus the rounding of the partial sum.
pub fn zeta_spectral(
    spec: &SpectrumList,
    s: Complex64,
    cutoff: Option<usize>,
    tail: TailModel,
) -> Result<ZetaValue, ZetaError> {
    let spec = match cutoff {
        Some(c) => spec.truncated(c),
        None => spec.clone(),
    };
    if let Some(bad) = spec.entries().iter().find(|e| e.value <= 0.0) {
        return Err(ZetaError::NonpositiveEigenvalue { value: bad.value });
    }
    let half = s / 2.0;
    let value: Complex64 = spec
        .entries()
        .iter()
        .map(|e| e.multiplicity as f64 * (-half * e.value.ln()).exp())
        .sum();
    let terms_used = spec.total_count();
    let rounding = terms_used as f64 * f64::EPSILON * value.norm();
    let tail = match (tail, spec.entries().last()) {
        (TailModel::Finite, _) | (_, None) => Complex64::new(0.0, 0.0),
        (TailModel::PowerLaw, Some(last)) => {
            let fit = fit_counting(&spec)?;
            if half.re <= fit.exponent {
                return Err(ZetaError::Divergent { re: s.re, exponent: fit.exponent });
            }
            let big = last.value.ln();
            let integral = fit.amplitude * fit.exponent * ((fit.exponent - half) * big).exp() / (half - fit.exponent);
            integral - 0.5 * last.multiplicity as f64 * (-half * big).exp()
        }
    };
    Ok(ZetaValue {
        s,
        value,
        tail,
        terms_used,
        tail_estimate: tail.norm() + rounding,
        method: Method::DirectSum,
    })
}

/// `1 / (1 - gamma^{-s/2})`, the sum of `gamma^{-ps/2}` over `p >= 0`.
pub fn geometric_factor(gamma: f64, s: Complex64) -> Result<Complex64, ZetaError> {
    let den = 1.0 - (-s / 2.0 * gamma.ln()).exp();
    if den.norm() < POLE_TOL {
        return Err(ZetaError::Pole { s });
    }
    Ok(den.inv())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectrum::Provenance;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_examples() {
        let one = SpectrumList::from_values([4.0], 0.0, Provenance::Oracle);
        let z = zeta_spectral(&one, c(2.0), None, TailModel::Finite).unwrap();
        assert!((z.value.re - 0.25).abs() < 1e-15);
        assert_eq!(z.terms_used, 1);
        let twice = SpectrumList::from_weighted([(9.0, 2)], 0.0, Provenance::Oracle);
        let z = zeta_spectral(&twice, c(2.0), None, TailModel::Finite).unwrap();
        assert!((z.value.re - 2.0 / 9.0).abs() < 1e-15);
        let bad = SpectrumList::from_values([-1.0, 2.0], 0.0, Provenance::Oracle);
        assert_eq!(
            zeta_spectral(&bad, c(2.0), None, TailModel::Finite),
            Err(ZetaError::NonpositiveEigenvalue { value: -1.0 })
        );
    }

    #[test]
    fn squares_with_tail() {
        let spec = SpectrumList::from_values((1..=1000).map(|j| PI * PI * (j * j) as f64), 0.0, Provenance::Oracle);
        let z = zeta_spectral(&spec, c(2.0), None, TailModel::PowerLaw).unwrap();
        let truth = 1.0 / 6.0;
        assert!((z.value.re - truth).abs() > 1e-5);
        assert!((z.estimate().re - truth).abs() < 1e-9);
        assert!((z.estimate().re - truth).abs() <= z.tail_estimate);
        let fit = fit_counting(&spec).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-3);
        assert!(matches!(
            zeta_spectral(&spec, c(1.0), None, TailModel::PowerLaw),
            Err(ZetaError::Divergent { .. })
        ));
    }

    #[test]
    fn truncation_is_monotone() {
        let spec = SpectrumList::from_weighted((1..=200).map(|j| (j as f64 * 1.7, 1 + j % 3)), 0.0, Provenance::Oracle);
        let mut previous = 0.0;
        for cutoff in [1, 5, 20, 100, 200] {
            let z = zeta_spectral(&spec, c(3.0), Some(cutoff), TailModel::Finite).unwrap();
            assert!(z.value.re > previous);
            previous = z.value.re;
        }
        assert!(matches!(
            zeta_spectral(&spec, c(3.0), Some(3), TailModel::PowerLaw),
            Err(ZetaError::Truncation { .. })
        ));
    }

    #[test]
    fn geometric_factor_tail_is_exact() {
        for (gamma, s) in [(4.0, 2.0), (4.5, 3.0), (25.0, 8.0)] {
            let closed = geometric_factor(gamma, c(s)).unwrap().re;
            let r = gamma.powf(-s / 2.0);
            for p in [0, 3, 10] {
                let partial: f64 = (0..=p).map(|k| r.powi(k)).sum();
                let bound = r.powi(p + 1) / (1.0 - r);
                assert!((closed - partial - bound).abs() <= 1e-15 * closed);
            }
        }
        assert!(matches!(geometric_factor(4.0, c(0.0)), Err(ZetaError::Pole { .. })));
    }
}

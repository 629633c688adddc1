//! The Riemann zeta function as a reference, the identity that recovers it from the
//! `alpha = 1/2` string, and factorizations over fractal strings.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{zeta_rho, zeta_spectral, TailModel, ZetaError, ZetaValue, POLE_TOL};
use crate::spectrum::{Provenance, SpectrumList};
use crate::sturm_liouville::GeneratingSet;

/// Terms summed directly before the Euler-Maclaurin correction.
const EM_TERMS: u32 = 16;
/// `B_{2k} / (2k)!` for `k = 1..=10`.
const EM_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

/// `zeta(s)` for `Re(s) > 1` by Euler-Maclaurin summation: the first terms directly,
/// then the integral, the half end term and ten Bernoulli corrections.
pub fn riemann_reference(s: Complex64) -> Result<Complex64, ZetaError> {
    if s.re <= 1.0 {
        return Err(ZetaError::Domain { s, reason: "the reference is implemented for Re(s) > 1" });
    }
    let n = EM_TERMS as f64;
    let power = |x: f64, e: Complex64| (e * x.ln()).exp();
    let mut sum: Complex64 = (1..EM_TERMS).map(|k| power(k as f64, -s)).sum();
    sum += power(n, Complex64::new(1.0, 0.0) - s) / (s - 1.0);
    sum += 0.5 * power(n, -s);
    // Rising factorial s (s+1) ... (s+2k-2), times n^{-s-2k+1}.
    let mut rising = s;
    let mut term_power = power(n, -s - 1.0);
    for (k, coeff) in EM_COEFFS.iter().enumerate() {
        sum += coeff * rising * term_power;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        term_power /= n * n;
    }
    Ok(sum)
}

/// `pi^s zeta_rho(s)` against `zeta(s)` at `alpha = 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiemannCheck {
    pub s: Complex64,
    pub zeta_rho: ZetaValue,
    pub scaled: Complex64,
    pub reference: Complex64,
    pub residual: f64,
}

/// Recovers `zeta(s)` as `pi^s zeta_rho(s)` from a computed generating set at
/// `alpha = 1/2`.
pub fn riemann_identity_check(set: &GeneratingSet, s: Complex64) -> Result<RiemannCheck, ZetaError> {
    let alpha = set.constants.alpha();
    if alpha != 0.5 {
        return Err(ZetaError::Alpha { alpha });
    }
    if s.re < 2.0 {
        return Err(ZetaError::Domain { s, reason: "the identity check runs at Re(s) >= 2" });
    }
    let zeta_rho = zeta_rho(set, s)?;
    let scaled = (s * PI.ln()).exp() * zeta_rho.estimate();
    let reference = riemann_reference(s)?;
    Ok(RiemannCheck { s, zeta_rho, scaled, reference, residual: (scaled - reference).norm() })
}

/// Dirichlet spectrum `{(pi j / l)^2}` of a string with lengths `l` (each with a
/// multiplicity), restricted to values below `bound`.
pub fn string_spectrum(lengths: &[(f64, u64)], bound: f64) -> SpectrumList {
    let mut pairs = Vec::new();
    for &(l, m) in lengths {
        let step = PI / l;
        let mut j = 1.0;
        while (step * j).powi(2) < bound {
            pairs.push(((step * j).powi(2), m));
            j += 1.0;
        }
    }
    SpectrumList::from_weighted(pairs, 1e-12, Provenance::Renormalized)
}

/// Lengths `3^{-k}` with multiplicity `2^{k-1}` of the Cantor string, for every `k`
/// whose first eigenvalue `(pi 3^k)^2` lies below `bound`.
pub fn cantor_string_lengths(bound: f64) -> Vec<(f64, u64)> {
    (1..)
        .map(|k| (3f64.powi(-k), 1u64 << (k - 1)))
        .take_while(|&(l, _)| (PI / l).powi(2) < bound)
        .collect()
}

/// Geometric zeta function `1 / (3^s - 2)` of the Cantor string.
pub fn cantor_string_zeta(s: Complex64) -> Result<Complex64, ZetaError> {
    let den = (s * 3f64.ln()).exp() - 2.0;
    if den.norm() < POLE_TOL {
        return Err(ZetaError::Pole { s });
    }
    Ok(den.inv())
}

/// Direct spectral sum of a string against `pi^{-s} zeta(s)` times its geometric zeta.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StringCheck {
    pub s: Complex64,
    pub direct: ZetaValue,
    pub factorized: Complex64,
    pub residual: f64,
    pub within_bound: bool,
}

/// Compares the direct sum over `spec` with `pi^{-s} zeta(s) string_zeta`.
pub fn string_factorization(spec: &SpectrumList, string_zeta: Complex64, s: Complex64) -> Result<StringCheck, ZetaError> {
    let direct = zeta_spectral(spec, s, None, TailModel::PowerLaw)?;
    let factorized = (-s * PI.ln()).exp() * riemann_reference(s)? * string_zeta;
    let residual = (direct.estimate() - factorized).norm();
    Ok(StringCheck { s, direct, factorized, residual, within_bound: residual <= direct.tail_estimate })
}

//! Zeta functions of the self-similar string operators `H_<n>`.

use num_complex::Complex64;

use super::{geometric_factor, zeta_spectral, Method, TailModel, ZetaError, ZetaValue};
use crate::hyperfunction::{HalfPlaneFactorization, SidedValue};
use crate::measure::MeasureGrid;
use crate::renorm::RenormMap;
use crate::spectrum::{Provenance, SpectrumList};
use crate::sturm_liouville::{phi, spectrum_hn, GeneratingSet, HnIndex};

/// Geometric zeta function of the generating set, `sum_j lambda_j^{-s/2}`, with a
/// fitted tail.
pub fn zeta_s(set: &GeneratingSet, s: Complex64) -> Result<ZetaValue, ZetaError> {
    let spec = SpectrumList::from_values(set.values.iter().copied(), 0.0, Provenance::Renormalized);
    zeta_spectral(&spec, s, None, TailModel::PowerLaw)
}

/// `zeta_S(s) / (1 - gamma^{-s/2})`, the zeta function of `rho`.
pub fn zeta_rho(set: &GeneratingSet, s: Complex64) -> Result<ZetaValue, ZetaError> {
    if s.re <= 0.0 {
        return Err(ZetaError::Domain { s, reason: "the geometric sum over p >= 0 needs Re(s) > 0" });
    }
    let factor = geometric_factor(set.constants.gamma(), s)?;
    Ok(zeta_s(set, s)?.scaled(factor, Method::ClosedForm))
}

/// `gamma^{ns/2} zeta_rho(s)`, the zeta function of `H_<n>`.
pub fn zeta_hn_closed(set: &GeneratingSet, n: u32, s: Complex64) -> Result<ZetaValue, ZetaError> {
    let shift = (s / 2.0 * (n as f64 * set.constants.gamma().ln())).exp();
    Ok(zeta_rho(set, s)?.scaled(shift, Method::ClosedForm))
}

/// Direct sum over the eigenvalues `gamma^p lambda` (`p >= -n`, `lambda` in `S`) of
/// `H_<n>`.
///
/// The union is complete only below `gamma^{-n}` times the largest value of `S`, so
/// the sum stops there and the rest is a fitted tail.
pub fn zeta_hn_direct(set: &GeneratingSet, n: u32, s: Complex64) -> Result<ZetaValue, ZetaError> {
    let gamma = set.constants.gamma();
    let (Some(&first), Some(&last)) = (set.values.first(), set.values.last()) else {
        return Err(ZetaError::Truncation { found: 0, needed: super::MIN_FIT_POINTS });
    };
    let bound = last * gamma.powi(-(n as i32));
    let p_max = ((bound / first).ln() / gamma.ln()).ceil() as i32;
    let spec = spectrum_hn(HnIndex::Finite(n), -(n as i32), p_max, set)?.below(bound);
    zeta_spectral(&spec, s, None, TailModel::PowerLaw)
}

/// [`zeta_hn_direct`] at `n = 0`, the double sum defining `zeta_rho`.
pub fn zeta_rho_direct(set: &GeneratingSet, s: Complex64) -> Result<ZetaValue, ZetaError> {
    zeta_hn_direct(set, 0, s)
}

/// `delta_T(gamma^{-s/2}) zeta_S(s)`, the zeta function of `H_<inf>`. Where `zeta_S`
/// diverges only the hyperfunction factor is returned and the value is tagged formal.
pub fn zeta_hinf(set: &GeneratingSet, s: Complex64) -> Result<SidedValue, ZetaError> {
    let scalar = match zeta_s(set, s) {
        Ok(z) => Some(z),
        Err(ZetaError::Divergent { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(HalfPlaneFactorization::dirac(set.constants.gamma()).evaluate(s, scalar)?)
}

/// For each `p <= p_max` (at most the level of `S`), the largest distance from `D` of
/// `rho^p(phi(gamma^{-(p+1)} lambda))` over `lambda` in `S`.
///
/// The zeta function of `rho` sums, for each `p`, over the `lambda` whose orbit point
/// lands in `D`; the closed forms take that set to be `S` for every `p`. Small
/// residuals confirm this on the computed values. The distance is `|x + y/delta|` on
/// the point normalized to max modulus 1.
///
/// `rho` carries the level-`n` curve onto the level-`n+1` one, so the orbit starts on
/// the grid `p` levels below the one that produced `S`.
pub fn defining_condition_residuals(set: &GeneratingSet, p_max: u32) -> Result<Vec<f64>, ZetaError> {
    let c = &set.constants;
    let map = RenormMap::new(c);
    let p_max = p_max.min(set.level);
    let mut worst = vec![0.0f64; p_max as usize + 1];
    for p in 0..=p_max {
        let grid = MeasureGrid::build(set.level - p, c);
        for &lambda in &set.values {
            let start = phi(Complex64::new(lambda * c.gamma().powi(-(p as i32 + 1)), 0.0), &grid)?;
            let pt = map.iterate(&start, p as usize).map_err(crate::sturm_liouville::SlError::from)?;
            let residual = (pt.x() + pt.y() / c.delta()).norm();
            worst[p as usize] = worst[p as usize].max(residual);
        }
    }
    Ok(worst)
}

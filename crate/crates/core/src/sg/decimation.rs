//! Spectra generated by decimation, checked against the direct eigensolve.

use serde::Serialize;

use super::{
    decimation_poly, eigensolve_direct, is_forbidden, minus_branch, plus_branch,
    scaled_branch_limit, BoundaryCondition, SgError, MULTIPLICITY_TOL,
};
use crate::spectrum::{Provenance, SpectrumList};

/// Multiplicities of the forbidden values `5/4` and `3/2` that appear fresh at `level`.
///
/// These counts were read off the direct eigensolve at small levels; the unit tests
/// re-check them against it.
fn born_multiplicities(level: u32, bc: BoundaryCondition) -> [(f64, u64); 2] {
    let p = 3u64.pow(level);
    let q = 3u64.pow(level - 1);
    match bc {
        BoundaryCondition::Dirichlet => [(1.25, (q + 3) / 2), (1.5, (p - 3) / 2)],
        BoundaryCondition::Neumann => [(1.25, (q - 1) / 2), (1.5, (p + 3) / 2)],
    }
}

/// Level-`m` graph spectrum built from the base level by taking both preimages under
/// `R` of every eigenvalue, dropping forbidden preimages and adding the forbidden
/// eigenvalues born at each level.
pub fn decimation_spectrum(m: u32, bc: BoundaryCondition) -> Result<SpectrumList, SgError> {
    let (mut pairs, start): (Vec<(f64, u64)>, u32) = match bc {
        BoundaryCondition::Dirichlet if m == 0 => return Err(SgError::EmptyInterior),
        BoundaryCondition::Dirichlet => (vec![(0.5, 1), (1.25, 2)], 1),
        BoundaryCondition::Neumann => (vec![(0.0, 1), (1.5, 2)], 0),
    };
    for level in start + 1..=m {
        let mut next: Vec<(f64, u64)> = pairs
            .iter()
            .flat_map(|&(v, mult)| [(minus_branch(v), mult), (plus_branch(v), mult)])
            .filter(|&(w, _)| !is_forbidden(w))
            .collect();
        next.extend(born_multiplicities(level, bc).into_iter().filter(|&(_, mult)| mult > 0));
        pairs = next;
    }
    Ok(SpectrumList::from_weighted(pairs, MULTIPLICITY_TOL, Provenance::Decimation).with_level(m))
}

/// [`decimation_spectrum`] compared entry by entry against [`eigensolve_direct`].
pub fn verified_decimation_spectrum(m: u32, bc: BoundaryCondition) -> Result<SpectrumList, SgError> {
    let decimated = decimation_spectrum(m, bc)?;
    let oracle = eigensolve_direct(m, bc)?;
    match decimated.first_mismatch(&oracle, MULTIPLICITY_TOL) {
        Some(value) => Err(SgError::Consistency { level: m, value }),
        None => Ok(decimated),
    }
}

/// Checks that `R` maps every non-forbidden level-`(m+1)` eigenvalue onto a level-`m`
/// eigenvalue. Returns how many eigenvalues were checked.
pub fn forward_check(m: u32, bc: BoundaryCondition) -> Result<usize, SgError> {
    let coarse = eigensolve_direct(m, bc)?;
    let fine = eigensolve_direct(m + 1, bc)?;
    let mut checked = 0;
    for value in fine.values().filter(|&v| !is_forbidden(v)) {
        if !coarse.contains(decimation_poly(value), MULTIPLICITY_TOL) {
            return Err(SgError::ForwardMismatch { level: m + 1, value });
        }
        checked += 1;
    }
    Ok(checked)
}

/// Renormalized eigenvalues of the gasket Laplacian obtained from one graph level.
#[derive(Clone, Debug, Serialize)]
pub struct RenormalizedSpectrum {
    pub spectrum: SpectrumList,
    /// Every eigenvalue of the limit operator below this bound is in `spectrum`.
    pub completeness_bound: f64,
    pub kappa: f64,
    pub boundary: BoundaryCondition,
}

/// `kappa * 5^m * R(lambda)` over the level-`m` decimation spectrum, with `R` the scaled
/// branch limit. The value `3/2` (and `0` for Neumann) has no continuation along the
/// minus branch and is skipped.
pub fn renormalized_spectrum(
    m: u32,
    bc: BoundaryCondition,
    kappa: f64,
) -> Result<RenormalizedSpectrum, SgError> {
    let graph = decimation_spectrum(m, bc)?;
    let scale = kappa * 5f64.powi(m as i32);
    let mut pairs = Vec::with_capacity(graph.len());
    for e in graph.entries() {
        if (e.value - 1.5).abs() <= MULTIPLICITY_TOL || e.value.abs() <= MULTIPLICITY_TOL {
            continue;
        }
        pairs.push((scale * scaled_branch_limit(e.value)?, e.multiplicity));
    }
    let spectrum = SpectrumList::from_weighted(pairs, 1e-12, Provenance::Renormalized).with_level(m);
    let completeness_bound = 5.0 * scale * scaled_branch_limit(0.75)?;
    Ok(RenormalizedSpectrum { spectrum, completeness_bound, kappa, boundary: bc })
}

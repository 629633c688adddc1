//! Sierpinski gasket spectra: direct eigensolves of the pre-gasket Laplacians,
//! spectral decimation through `R(z) = z(5 - 4z)`, and the infinite gasket.

mod branch;
mod decimation;
mod gasket;

pub use branch::{branch_inverse, minus_branch, plus_branch, scaled_branch_limit};
pub use decimation::{
    decimation_spectrum, forward_check, renormalized_spectrum, verified_decimation_spectrum,
    RenormalizedSpectrum,
};
pub use gasket::{eigensolve_direct, PreGasket, MAX_DENSE_LEVEL, MAX_GRAPH_LEVEL};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::{Provenance, SpectrumList};

/// Grouping tolerance for eigenvalue multiplicities.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

/// Forbidden eigenvalues of the decimation correspondence.
pub const FORBIDDEN: [f64; 3] = [0.5, 1.25, 1.5];

/// Largest argument for which both inverse branches of `R` are real.
pub const BRANCH_DOMAIN_MAX: f64 = 25.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SgError {
    #[error("level {level} is too large: the Laplacian would have dimension {dimension}")]
    TooLarge { level: u32, dimension: usize },
    #[error("the level-0 gasket has no interior vertices")]
    EmptyInterior,
    #[error("symmetric eigensolver did not converge at level {level}")]
    NoConvergence { level: u32 },
    #[error("z = {z} is outside the real domain of the inverse branches (z <= 25/16)")]
    Domain { z: f64 },
    #[error("scaled branch limit at z = {z} did not converge within {iterations} iterations")]
    BranchNoConvergence { z: f64, iterations: u32 },
    #[error("decimation and direct spectra disagree at level {level} near eigenvalue {value}")]
    Consistency { level: u32, value: f64 },
    #[error("forward map sends level-{level} eigenvalue {value} outside the next coarser spectrum")]
    ForwardMismatch { level: u32, value: f64 },
    #[error("seed z0 = {z0} is not one of 3/4, 5/4")]
    BadSeed { z0: f64 },
    #[error("empty scale window: n_min = {n_min} exceeds n_max = {n_max}")]
    BadWindow { n_min: i32, n_max: i32 },
}

/// The decimation polynomial `R(z) = z (5 - 4z)`.
pub fn decimation_poly(z: f64) -> f64 {
    z * (5.0 - 4.0 * z)
}

pub fn is_forbidden(z: f64) -> bool {
    FORBIDDEN.iter().any(|&b| (z - b).abs() <= MULTIPLICITY_TOL)
}

/// Truncation of the infinite-gasket spectrum: `5^n R(w)` (with `R` the scaled branch
/// limit) for `w` in `R^{-j}(z0)`, `j <= j_max`, and `n_min <= n <= n_max`.
pub fn infinite_sg_spectrum(
    n_min: i32,
    n_max: i32,
    j_max: u32,
    z0: f64,
) -> Result<SpectrumList, SgError> {
    if z0 != 0.75 && z0 != 1.25 {
        return Err(SgError::BadSeed { z0 });
    }
    if n_min > n_max {
        return Err(SgError::BadWindow { n_min, n_max });
    }
    // 5^n R(R_-^{-1}(w)) = 5^(n-1) R(w), so a preimage reached through a final minus
    // step only repeats a value of a shallower preimage. Enumerating the seed and the
    // preimages whose last step is the plus branch, each with its widened n-range,
    // visits every value of the window exactly once.
    let mut values = Vec::new();
    let mut level = vec![z0];
    for depth in 0..=j_max {
        let n_lo = n_min - (j_max - depth) as i32;
        let canonical: Vec<f64> = if depth == 0 {
            vec![z0]
        } else {
            let prev = std::mem::take(&mut level);
            level = prev.iter().flat_map(|&w| [minus_branch(w), plus_branch(w)]).collect();
            prev.iter().map(|&w| plus_branch(w)).collect()
        };
        for w in canonical {
            let base = scaled_branch_limit(w)?;
            values.extend((n_lo..=n_max).map(|n| 5f64.powi(n) * base));
        }
    }
    Ok(SpectrumList::from_values(values, 0.0, Provenance::Renormalized))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_values() {
        assert_eq!(decimation_poly(1.25), 0.0);
        assert_eq!(decimation_poly(1.5), -1.5);
        assert_eq!(decimation_poly(0.0), 0.0);
    }

    #[test]
    fn infinite_single_term() {
        let s = infinite_sg_spectrum(0, 0, 0, 0.75).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.entries()[0].value, scaled_branch_limit(0.75).unwrap());
    }

    #[test]
    fn infinite_scaling_closure() {
        for z0 in [0.75, 1.25] {
            let a = infinite_sg_spectrum(-2, 3, 4, z0).unwrap();
            let b = infinite_sg_spectrum(-1, 4, 4, z0).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.values().zip(b.values()) {
                assert!((5.0 * x - y).abs() <= 1e-10 * y.max(1.0), "{x} {y}");
            }
        }
    }

    #[test]
    fn infinite_matches_naive_enumeration() {
        let (n_min, n_max, j_max) = (-1, 2, 3);
        let mut naive = Vec::new();
        let mut level = vec![0.75];
        for _ in 0..=j_max {
            for &w in &level {
                let base = scaled_branch_limit(w).unwrap();
                naive.extend((n_min..=n_max).map(|n| 5f64.powi(n) * base));
            }
            level = level.iter().flat_map(|&w| [minus_branch(w), plus_branch(w)]).collect();
        }
        let naive = SpectrumList::from_values(naive, 1e-9, Provenance::Renormalized);
        let fast = infinite_sg_spectrum(n_min, n_max, j_max as u32, 0.75).unwrap();
        assert_eq!(fast.total_count(), fast.len() as u64);
        assert_eq!(naive.len(), fast.len());
        for (a, b) in naive.values().zip(fast.values()) {
            assert!((a - b).abs() < 1e-9 * b);
        }
    }

    #[test]
    fn infinite_rejects_bad_input() {
        assert_eq!(infinite_sg_spectrum(0, 1, 1, 0.5), Err(SgError::BadSeed { z0: 0.5 }));
        assert_eq!(
            infinite_sg_spectrum(2, 1, 1, 0.75),
            Err(SgError::BadWindow { n_min: 2, n_max: 1 })
        );
    }
}

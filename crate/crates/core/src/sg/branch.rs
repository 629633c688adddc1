//! Inverse branches of `R` and the scaled branch limit.

use super::{SgError, BRANCH_DOMAIN_MAX};

const LIMIT_MAX_ITER: u32 = 200;
const LIMIT_TOL: f64 = 1e-12;

/// The inverse branch through the origin, `(5 - sqrt(25 - 16z)) / 8`.
///
/// Written as `2z / (5 + sqrt(25 - 16z))` so small arguments don't cancel.
pub fn minus_branch(z: f64) -> f64 {
    2.0 * z / (5.0 + (25.0 - 16.0 * z).sqrt())
}

/// The other inverse branch, `(5 + sqrt(25 - 16z)) / 8`.
pub fn plus_branch(z: f64) -> f64 {
    (5.0 + (25.0 - 16.0 * z).sqrt()) / 8.0
}

fn check_domain(z: f64) -> Result<(), SgError> {
    if z.is_nan() || z > BRANCH_DOMAIN_MAX {
        return Err(SgError::Domain { z });
    }
    Ok(())
}

/// `m`-fold composition of [`minus_branch`].
pub fn branch_inverse(z: f64, m: u32) -> Result<f64, SgError> {
    check_domain(z)?;
    Ok((0..m).fold(z, |w, _| minus_branch(w)))
}

/// `lim 5^m R_-^{-m}(z)`, stopped once the increment drops below `1e-12` relative to
/// the current value.
pub fn scaled_branch_limit(z: f64) -> Result<f64, SgError> {
    check_domain(z)?;
    let mut w = z;
    let mut scale = 1.0;
    let mut value = z;
    for _ in 0..LIMIT_MAX_ITER {
        w = minus_branch(w);
        scale *= 5.0;
        let next = scale * w;
        let done = (next - value).abs() <= LIMIT_TOL * next.abs();
        value = next;
        if done {
            return Ok(value);
        }
    }
    Err(SgError::BranchNoConvergence { z, iterations: LIMIT_MAX_ITER })
}

#[cfg(test)]
mod tests {
    use super::super::decimation_poly;
    use super::*;

    #[test]
    fn branches_invert_r() {
        for z in [0.0, 0.3, 0.75, 1.25, 1.5] {
            assert!((decimation_poly(minus_branch(z)) - z).abs() < 1e-14);
            assert!((decimation_poly(plus_branch(z)) - z).abs() < 1e-14);
        }
        let r13 = 13f64.sqrt();
        assert!((minus_branch(0.75) - (5.0 - r13) / 8.0).abs() < 1e-15);
        assert!((plus_branch(0.75) - (5.0 + r13) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn branch_inverse_examples() {
        assert_eq!(branch_inverse(0.0, 17).unwrap(), 0.0);
        assert!((branch_inverse(0.75, 1).unwrap() - 0.174_30).abs() < 1e-5);
        assert_eq!(branch_inverse(2.0, 1), Err(SgError::Domain { z: 2.0 }));
        let mut prev = 0.0;
        for m in 1..=40 {
            let v = 5f64.powi(m as i32) * branch_inverse(0.75, m).unwrap();
            assert!(v >= prev * (1.0 - 1e-14), "not increasing at m = {m}");
            prev = v;
        }
        assert!((prev - scaled_branch_limit(0.75).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn branch_inverse_increasing_in_z() {
        let vals: Vec<f64> = (0..=20).map(|i| branch_inverse(i as f64 * 0.06, 3).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn limit_normalization() {
        assert_eq!(scaled_branch_limit(0.0).unwrap(), 0.0);
        let z = 1e-6;
        assert!((scaled_branch_limit(z).unwrap() / z - 1.0).abs() < 1e-4);
        assert!(scaled_branch_limit(0.3).unwrap() < scaled_branch_limit(0.8).unwrap());
    }

    #[test]
    fn limit_semiconjugacy() {
        for i in 0..25 {
            let z = i as f64 * 0.05;
            let lhs = 5.0 * scaled_branch_limit(minus_branch(z)).unwrap();
            let rhs = scaled_branch_limit(z).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0), "z = {z}");
        }
    }
}

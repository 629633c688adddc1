//! Zeta functions of a polynomial through its backward orbit.
//!
//! For `R` with `R(0) = 0` and `c = R'(0) > 1`,
//! `zeta_{R,z0}(s) = lim_n sum_{z in R^{-n}(z0)} (c^n z)^{-s/2}`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::zeta::{Method, ZetaValue};

/// Leaves whose rescaled value `c^n z` is closer to zero than this are left out of
/// the sums. Genuine leaves shrink like `c^{-n}`, so the raw value is no test.
pub const ZERO_LEAF_TOL: f64 = 1e-14;
/// Default stopping threshold for successive partial sums.
pub const INCREMENT_TOL: f64 = 1e-10;
/// Deepest tree level evaluated by [`zeta_poly`]. Each level doubles the work.
pub const MAX_ZETA_LEVEL: u32 = 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyZetaError {
    #[error("polynomial must vanish at 0 (constant coefficient {0})")]
    NonzeroConstant(f64),
    #[error("multiplier R'(0) = {0} must exceed 1")]
    WeakMultiplier(f64),
    #[error("only quadratic polynomials are supported (degree {0})")]
    UnsupportedDegree(usize),
    #[error("Re(s) = {re} is not above the convergence abscissa d_R = {d_r}")]
    BelowAbscissa { re: f64, d_r: f64 },
    #[error("partial sums did not settle below {tol} by level {level} (last increment {increment})")]
    NotConverged { level: u32, increment: f64, tol: f64 },
}

/// A polynomial `sum a_k z^k` with `a_0 = 0` and `a_1 > 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Poly1 {
    coefficients: Vec<f64>,
}

impl Poly1 {
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self, PolyZetaError> {
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        let constant = coefficients.first().copied().unwrap_or(0.0);
        if constant != 0.0 {
            return Err(PolyZetaError::NonzeroConstant(constant));
        }
        let c = coefficients.get(1).copied().unwrap_or(0.0);
        if c <= 1.0 {
            return Err(PolyZetaError::WeakMultiplier(c));
        }
        Ok(Self { coefficients })
    }

    /// The gasket decimation polynomial `z (5 - 4z)`.
    pub fn sierpinski() -> Self {
        Self { coefficients: vec![0.0, 5.0, -4.0] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn multiplier(&self) -> f64 {
        self.coefficients[1]
    }

    /// `d_R = 2 log N / log c`.
    pub fn abscissa(&self) -> f64 {
        2.0 * (self.degree() as f64).ln() / self.multiplier().ln()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    fn quadratic(&self) -> Result<(f64, f64), PolyZetaError> {
        match self.coefficients.as_slice() {
            [_, b, a] => Ok((*a, *b)),
            _ => Err(PolyZetaError::UnsupportedDegree(self.degree())),
        }
    }
}

/// Both solutions of `a z^2 + b z = w`, smaller real part first.
fn solve_quadratic(a: f64, b: f64, w: Complex64) -> [Complex64; 2] {
    let root = Complex64::new(b * b, 0.0) + 4.0 * a * w;
    let mut sq = root.sqrt();
    if (sq * b).re < 0.0 {
        sq = -sq;
    }
    // q is the large-magnitude root combination; the other root follows from the
    // product of roots, -w / a, without cancellation.
    let q = -(sq + b) / 2.0;
    let (z1, z2) = if q.norm() == 0.0 {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    } else {
        (q / a, -w / q)
    };
    if (z1.re, z1.im) <= (z2.re, z2.im) {
        [z1, z2]
    } else {
        [z2, z1]
    }
}

/// All points of `R^{-n}(z0)` (with multiplicity).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreimageLevel {
    pub level: u32,
    pub points: Vec<Complex64>,
}

/// The depth-`n` preimage tree of `z0`, ordered so that the first point of every
/// sibling pair has the smaller real part. The first leaf is the all-minus branch.
pub fn preimages(p: &Poly1, z0: Complex64, n: u32) -> Result<PreimageLevel, PolyZetaError> {
    let (a, b) = p.quadratic()?;
    let mut points = vec![z0];
    for _ in 0..n {
        points = points.iter().flat_map(|&w| solve_quadratic(a, b, w)).collect();
    }
    Ok(PreimageLevel { level: n, points })
}

/// Per-level sums `S_k = sum_{z in R^{-k}(z0)} (c^k z)^{-s/2}` for `k = 0..=depth`,
/// and the number of leaves skipped for being at the origin.
fn level_sums(p: &Poly1, z0: Complex64, s: Complex64, depth: u32) -> Result<(Vec<Complex64>, u64), PolyZetaError> {
    let (a, b) = p.quadratic()?;
    let c = p.multiplier();
    let exponent = -s / 2.0;
    let scale: Vec<Complex64> =
        (0..=depth).map(|k| (exponent * (k as f64) * c.ln()).exp()).collect();
    let zero_tol: Vec<f64> = (0..=depth).map(|k| ZERO_LEAF_TOL * c.powi(-(k as i32))).collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); depth as usize + 1];
    let mut zero_leaves = 0u64;
    let real_s = s.im == 0.0;
    let real_tree = z0.im == 0.0 && (b * b + 4.0 * a * z0.re) >= 0.0 && a < 0.0 && z0.re >= 0.0;
    if real_tree && real_s {
        // Fast path: with a < 0 and 0 <= z0 <= -b^2/(4a) the whole tree stays in that
        // real interval, so everything can be done in f64.
        let e = exponent.re;
        let mut stack = vec![(z0.re, 0u32)];
        while let Some((z, k)) = stack.pop() {
            if z.abs() < zero_tol[k as usize] {
                zero_leaves += 1;
            } else {
                sums[k as usize].re += scale[k as usize].re * z.powf(e);
            }
            if k < depth {
                let sq = (b * b + 4.0 * a * z).max(0.0).sqrt();
                let q = -(b + sq) / 2.0;
                stack.push((q / a, k + 1));
                stack.push((-z / q, k + 1));
            }
        }
    } else {
        let mut stack = vec![(z0, 0u32)];
        while let Some((z, k)) = stack.pop() {
            if z.norm() < zero_tol[k as usize] {
                zero_leaves += 1;
            } else {
                sums[k as usize] += scale[k as usize] * (exponent * z.ln()).exp();
            }
            if k < depth {
                for w in solve_quadratic(a, b, z) {
                    stack.push((w, k + 1));
                }
            }
        }
    }
    if zero_leaves > 0 {
        log::debug!("skipped {zero_leaves} preimages at the origin");
    }
    Ok((sums, zero_leaves))
}

fn check_abscissa(p: &Poly1, s: Complex64) -> Result<(), PolyZetaError> {
    let d_r = p.abscissa();
    if s.re <= d_r {
        return Err(PolyZetaError::BelowAbscissa { re: s.re, d_r });
    }
    Ok(())
}

/// Builds the value for level `n` out of the per-level sums.
fn value_at(s: Complex64, sums: &[Complex64], n: usize, leaves: u64) -> ZetaValue {
    let value = sums[n];
    let (tail, tail_estimate) = match n {
        0 => (Complex64::new(0.0, 0.0), value.norm()),
        1 => (Complex64::new(0.0, 0.0), (sums[1] - sums[0]).norm()),
        _ => {
            let d1 = sums[n] - sums[n - 1];
            let d0 = sums[n - 1] - sums[n - 2];
            let r = if d0.norm() > 0.0 { d1.norm() / d0.norm() } else { 0.0 };
            let tail = if r < 1.0 { d1 * (r / (1.0 - r)) } else { Complex64::new(0.0, 0.0) };
            // The last increment bounds the geometric remainder whenever r <= 1/2.
            (tail, d1.norm().max(tail.norm()))
        }
    };
    ZetaValue { s, value, tail, terms_used: leaves, tail_estimate, method: Method::DirectSum }
}

/// Level-`n` partial sum, with the last increment `|S_n - S_{n-1}|` as the error
/// estimate and a geometric extrapolation of the remaining increments as the tail.
pub fn zeta_poly_truncated(p: &Poly1, z0: Complex64, s: Complex64, n: u32) -> Result<ZetaValue, PolyZetaError> {
    check_abscissa(p, s)?;
    let (sums, _) = level_sums(p, z0, s, n)?;
    let leaves = (p.degree() as u64).pow(n);
    Ok(value_at(s, &sums, n as usize, leaves))
}

/// Partial sums to the first level whose increment is below `tol`, deepening the tree
/// up to `max_level`.
pub fn zeta_poly(p: &Poly1, z0: Complex64, s: Complex64, tol: f64, max_level: u32) -> Result<ZetaValue, PolyZetaError> {
    check_abscissa(p, s)?;
    let max_level = max_level.max(2);
    let mut depth = max_level.min(8);
    loop {
        let (sums, _) = level_sums(p, z0, s, depth)?;
        // Start at level 2 so the increment ratio is available for the tail.
        let hit = (2..=depth as usize).find(|&k| (sums[k] - sums[k - 1]).norm() < tol);
        if let Some(k) = hit {
            let leaves = (p.degree() as u64).pow(k as u32);
            return Ok(value_at(s, &sums, k, leaves));
        }
        if depth >= max_level {
            let increment = (sums[depth as usize] - sums[depth as usize - 1]).norm();
            return Err(PolyZetaError::NotConverged { level: depth, increment, tol });
        }
        depth = (depth + 4).min(max_level);
    }
}

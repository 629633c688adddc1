//! Hyperfunctions on the unit circle as pairs of rational representatives, and the
//! half-plane factorizations built from the Dirac hyperfunction.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zeta::ZetaValue;

/// Distance from the unit circle (or from a pole) treated as lying on it.
const BOUNDARY_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperfunctionError {
    #[error("z = {z} is outside the {side} region of the {label} representative")]
    OutsideRegion { z: Complex64, side: Side, label: String },
    #[error("representative has a pole at z = {z}")]
    Pole { z: Complex64 },
    #[error("|w| = 1 at w = {w}: the bilateral series diverges on both sides")]
    UnitCircle { w: Complex64 },
    #[error("Re(s) = 0 at s = {s}: the factorization is only defined on the open half-planes")]
    ImaginaryAxis { s: Complex64 },
    #[error("gamma = {gamma} must exceed 1")]
    BadGamma { gamma: f64 },
    #[error("partial sums need P >= 1")]
    NoTerms,
}

/// Which of the two representatives applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `|z| < 1`, reached for `Re(s) > 0`.
    Inside,
    /// `|z| > 1`, reached for `Re(s) < 0`.
    Outside,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Inside => "inside",
            Side::Outside => "outside",
        })
    }
}

impl Side {
    pub fn contains(self, z: Complex64) -> bool {
        let r = z.norm();
        match self {
            Side::Inside => r < 1.0 - BOUNDARY_TOL,
            Side::Outside => r > 1.0 + BOUNDARY_TOL,
        }
    }
}

/// Ratio of two polynomials with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: Vec<Complex64>,
    pub denominator: Vec<Complex64>,
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

impl Rational {
    pub fn new(numerator: &[f64], denominator: &[f64]) -> Self {
        let lift = |c: &[f64]| c.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self { numerator: lift(numerator), denominator: lift(denominator) }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, HyperfunctionError> {
        let den = horner(&self.denominator, z);
        if den.norm() <= BOUNDARY_TOL {
            return Err(HyperfunctionError::Pole { z });
        }
        Ok(horner(&self.numerator, z) / den)
    }
}

/// A pair of representatives `[F_inside, F_outside]`, each evaluated only on its side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperfunction {
    pub inside: Rational,
    pub outside: Rational,
    pub label: String,
}

impl Hyperfunction {
    pub fn eval(&self, side: Side, z: Complex64) -> Result<Complex64, HyperfunctionError> {
        if !side.contains(z) {
            return Err(HyperfunctionError::OutsideRegion { z, side, label: self.label.clone() });
        }
        match side {
            Side::Inside => self.inside.eval(z),
            Side::Outside => self.outside.eval(z),
        }
    }
}

/// The Dirac hyperfunction on the circle, `[1/(1 - z), 1/(z - 1)]`.
pub fn delta_t() -> Hyperfunction {
    Hyperfunction {
        inside: Rational::new(&[1.0], &[1.0, -1.0]),
        outside: Rational::new(&[1.0], &[-1.0, 1.0]),
        label: "delta_T".to_string(),
    }
}

/// Partial sums of the bilateral geometric series `sum_p w^p`: `p = 0..=P` inside
/// and `p = -P..=-1` outside.
pub fn bilateral_partial(w: Complex64, terms: u32, side: Side) -> Result<Complex64, HyperfunctionError> {
    if terms == 0 {
        return Err(HyperfunctionError::NoTerms);
    }
    if (w.norm() - 1.0).abs() <= BOUNDARY_TOL {
        return Err(HyperfunctionError::UnitCircle { w });
    }
    let (base, range) = match side {
        Side::Inside => (w, 0..=terms),
        Side::Outside => (w.inv(), 1..=terms),
    };
    let mut power = base.powu(*range.start());
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in range {
        sum += power;
        power *= base;
    }
    Ok(sum)
}

/// Exact remainder bound of [`bilateral_partial`] on the side where it converges:
/// `|w|^{P+1} / (1 - |w|)` inside, `|w|^{-(P+1)} / (1 - |w|^{-1})` outside.
pub fn geometric_tail_bound(w: Complex64, terms: u32, side: Side) -> f64 {
    let r = match side {
        Side::Inside => w.norm(),
        Side::Outside => 1.0 / w.norm(),
    };
    if r >= 1.0 {
        return f64::INFINITY;
    }
    r.powi(terms as i32 + 1) / (1.0 - r)
}

/// Side selected by the sign of `Re(s)`.
pub fn side_of(s: Complex64) -> Result<Side, HyperfunctionError> {
    if s.re > 0.0 {
        Ok(Side::Inside)
    } else if s.re < 0.0 {
        Ok(Side::Outside)
    } else {
        Err(HyperfunctionError::ImaginaryAxis { s })
    }
}

/// Evaluates `h` at `w = gamma^{-s/2}` on the side picked by `Re(s)`.
pub fn substitute_gamma(h: &Hyperfunction, gamma: f64, s: Complex64) -> Result<(Side, Complex64), HyperfunctionError> {
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(HyperfunctionError::BadGamma { gamma });
    }
    let side = side_of(s)?;
    let w = (-s / 2.0 * gamma.ln()).exp();
    Ok((side, h.eval(side, w)?))
}

/// `h(gamma^{-s/2}) * scalar(s)`, the scalar being a zeta value computed elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneFactorization {
    pub hyper: Hyperfunction,
    pub gamma: f64,
}

/// One side-tagged evaluation of a [`HalfPlaneFactorization`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidedValue {
    pub s: Complex64,
    pub side: Side,
    pub factor: Complex64,
    /// The scalar zeta value, absent where its series diverges.
    pub scalar: Option<ZetaValue>,
    /// `factor * scalar`, absent when the scalar is.
    pub value: Option<Complex64>,
    pub tail_estimate: f64,
    /// Set when only the hyperfunction factor has a numerical meaning at `s`.
    pub formal: bool,
}

impl HalfPlaneFactorization {
    pub fn dirac(gamma: f64) -> Self {
        Self { hyper: delta_t(), gamma }
    }

    pub fn factor(&self, s: Complex64) -> Result<(Side, Complex64), HyperfunctionError> {
        substitute_gamma(&self.hyper, self.gamma, s)
    }

    pub fn evaluate(&self, s: Complex64, scalar: Option<ZetaValue>) -> Result<SidedValue, HyperfunctionError> {
        let (side, factor) = self.factor(s)?;
        let value = scalar.map(|z| factor * z.estimate());
        let tail_estimate = scalar.map_or(f64::INFINITY, |z| factor.norm() * z.tail_estimate);
        Ok(SidedValue { s, side, factor, scalar, value, tail_estimate, formal: scalar.is_none() })
    }
}

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a zeta value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DirectSum,
    ClosedForm,
    Factorized,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DirectSum => "direct-sum",
            Method::ClosedForm => "closed-form",
            Method::Factorized => "factorized",
        })
    }
}

/// A truncated or closed-form zeta evaluation.
///
/// `value` is the computed partial sum (or closed form). `tail` is the estimated
/// contribution of everything left out, and `tail_estimate` bounds the error of
/// [`ZetaValue::estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub s: Complex64,
    pub value: Complex64,
    pub tail: Complex64,
    pub terms_used: u64,
    pub tail_estimate: f64,
    pub method: Method,
}

impl ZetaValue {
    pub fn closed_form(s: Complex64, value: Complex64, tail_estimate: f64) -> Self {
        Self {
            s,
            value,
            tail: Complex64::new(0.0, 0.0),
            terms_used: 0,
            tail_estimate,
            method: Method::ClosedForm,
        }
    }

    /// Partial sum plus the tail correction.
    pub fn estimate(&self) -> Complex64 {
        self.value + self.tail
    }

    /// Distance between the two estimates.
    pub fn discrepancy(&self, other: &ZetaValue) -> f64 {
        (self.estimate() - other.estimate()).norm()
    }

    /// Whether the estimates agree within the sum of both tail estimates.
    pub fn agrees_with(&self, other: &ZetaValue) -> bool {
        self.discrepancy(other) <= self.tail_estimate + other.tail_estimate
    }

    /// Multiplies value, tail and error bound by a known scalar.
    pub fn scaled(mut self, factor: Complex64, method: Method) -> Self {
        self.value *= factor;
        self.tail *= factor;
        self.tail_estimate *= factor.norm();
        self.method = method;
        self
    }
}

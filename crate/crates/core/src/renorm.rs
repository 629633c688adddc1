//! The renormalization map on the complex projective plane.
//!
//! `rho([x, y, z]) = [x (x + y/delta) - z^2/delta, delta y (x + y/delta) - delta z^2, z^2]`

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::SlConstants;

/// Images smaller than this (the input being normalized to max modulus 1) count as
/// the zero vector.
const INDETERMINACY_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormError {
    #[error("[0, 0, 0] is not a projective point")]
    ZeroPoint,
    #[error("{point} is a point of indeterminacy of rho (step {step})")]
    Indeterminate { point: ProjPoint, step: usize },
    #[error("delta = {0} must be positive and finite")]
    BadDelta(f64),
}

/// A point `[x, y, z]`, stored scaled so its largest-modulus coordinate equals 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: [Complex64; 3],
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.coords;
        write!(f, "[{x}, {y}, {z}]")
    }
}

impl ProjPoint {
    pub fn new(coords: [Complex64; 3]) -> Result<Self, RenormError> {
        let lead = coords
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |best, c| if c.norm() > best.norm() { c } else { best });
        if lead.norm() == 0.0 || !lead.norm().is_finite() {
            return Err(RenormError::ZeroPoint);
        }
        Ok(Self { coords: coords.map(|c| c / lead) })
    }

    pub fn real(x: f64, y: f64, z: f64) -> Result<Self, RenormError> {
        Self::new([x, y, z].map(|v| Complex64::new(v, 0.0)))
    }

    pub fn coords(&self) -> [Complex64; 3] {
        self.coords
    }

    pub fn x(&self) -> Complex64 {
        self.coords[0]
    }

    pub fn y(&self) -> Complex64 {
        self.coords[1]
    }

    pub fn z(&self) -> Complex64 {
        self.coords[2]
    }

    /// Fubini-Study chordal distance `|p ^ q| / (|p| |q|)`, in `[0, 1]`.
    ///
    /// The wedge form keeps full relative accuracy for nearby points, unlike
    /// `sqrt(1 - cos^2)`.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let (p, q) = (self.coords, other.coords);
        let norm2 = |v: [Complex64; 3]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let wedge: f64 = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| (p[i] * q[j] - p[j] * q[i]).norm_sqr())
            .sum();
        (wedge / (norm2(p) * norm2(q))).sqrt()
    }
}

/// `rho` for a given `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormMap {
    delta: f64,
}

/// How an orbit under `rho` ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitOutcome {
    /// Within `1e-8` of `[0, 1, 0]` after `step` applications.
    Converged { step: usize },
    /// Returned within `1e-8` of the point `period` steps earlier.
    Cycle { step: usize, period: usize },
    /// Neither within the iteration budget.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub delta: f64,
    pub start: ProjPoint,
    pub steps: usize,
    pub outcome: OrbitOutcome,
    pub last: ProjPoint,
    /// Distance from the last point to `[0, 1, 0]`.
    pub distance_to_x0: f64,
}

pub const BASIN_TOL: f64 = 1e-8;

impl RenormMap {
    pub fn new(c: &SlConstants) -> Self {
        Self { delta: c.delta() }
    }

    /// A map for any `delta > 0`, including the `delta > 1` regime the spectral
    /// modules refuse. Meant for orbit diagnostics.
    pub fn diagnostic(delta: f64) -> Result<Self, RenormError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(RenormError::BadDelta(delta));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Raw homogeneous image, without normalization.
    pub fn apply_coords(&self, [x, y, z]: [Complex64; 3]) -> [Complex64; 3] {
        let d = self.delta;
        let s = x + y / d;
        let z2 = z * z;
        [x * s - z2 / d, y * s * d - z2 * d, z2]
    }

    pub fn apply(&self, pt: &ProjPoint) -> Result<ProjPoint, RenormError> {
        self.apply_at(pt, 1)
    }

    fn apply_at(&self, pt: &ProjPoint, step: usize) -> Result<ProjPoint, RenormError> {
        let image = self.apply_coords(pt.coords);
        if image.iter().all(|c| c.norm() < INDETERMINACY_TOL) {
            return Err(RenormError::Indeterminate { point: *pt, step });
        }
        ProjPoint::new(image)
    }

    /// `p`-fold composition, renormalizing after each step.
    pub fn iterate(&self, pt: &ProjPoint, p: usize) -> Result<ProjPoint, RenormError> {
        (1..=p).try_fold(*pt, |q, step| self.apply_at(&q, step))
    }

    /// Whether `x + y/delta` vanishes to within `tol` on the normalized point.
    pub fn in_d(&self, pt: &ProjPoint, tol: f64) -> bool {
        (pt.x() + pt.y() / self.delta).norm() < tol
    }

    /// Iterates `rho` up to `max_iter` times and classifies the orbit.
    pub fn basin_probe(&self, start: &ProjPoint, max_iter: usize) -> Result<OrbitReport, RenormError> {
        let x0 = ProjPoint::real(0.0, 1.0, 0.0)?;
        let mut orbit = vec![*start];
        let mut outcome = OrbitOutcome::Exhausted;
        for step in 0..=max_iter {
            let current = orbit[step];
            if current.distance(&x0) < BASIN_TOL {
                outcome = OrbitOutcome::Converged { step };
                break;
            }
            if let Some(period) = (1..=step).find(|&k| orbit[step - k].distance(&current) < BASIN_TOL) {
                outcome = OrbitOutcome::Cycle { step, period };
                break;
            }
            if step == max_iter {
                break;
            }
            orbit.push(self.apply_at(&current, step + 1)?);
        }
        let last = *orbit.last().expect("orbit starts non-empty");
        Ok(OrbitReport {
            delta: self.delta,
            start: *start,
            steps: orbit.len() - 1,
            outcome,
            last,
            distance_to_x0: last.distance(&x0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> [Complex64; 3] {
        [(); 3].map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
    }

    #[test]
    fn normalization_and_distance() {
        let p = ProjPoint::real(2.0, -4.0, 1.0).unwrap();
        assert_eq!(p.coords()[1], Complex64::new(1.0, 0.0));
        let q = ProjPoint::new([1.0, -2.0, 0.5].map(|v| Complex64::new(0.0, -3.0 * v))).unwrap();
        assert!(p.distance(&q) < 1e-15);
        let a = ProjPoint::real(1.0, 0.0, 0.0).unwrap();
        let b = ProjPoint::real(0.0, 1.0, 0.0).unwrap();
        assert!((a.distance(&b) - 1.0).abs() < 1e-15);
        let c = ProjPoint::real(1.0, 1e-10, 0.0).unwrap();
        assert!((a.distance(&c) - 1e-10).abs() < 1e-20);
        assert_eq!(ProjPoint::real(0.0, 0.0, 0.0), Err(RenormError::ZeroPoint));
    }

    #[test]
    fn fixed_points() {
        let one = RenormMap::diagnostic(1.0).unwrap();
        let p = ProjPoint::real(1.0, 1.0, 1.0).unwrap();
        assert!(one.apply(&p).unwrap().distance(&p) == 0.0);
        for delta in [0.1, 0.5, 0.8, 1.0] {
            let map = RenormMap::diagnostic(delta).unwrap();
            for pt in [ProjPoint::real(0.0, 1.0, 0.0).unwrap(), ProjPoint::real(1.0, 0.0, 0.0).unwrap()] {
                assert_eq!(map.apply(&pt).unwrap(), pt);
            }
        }
    }

    #[test]
    fn matches_delta_one_specialization() {
        let map = RenormMap::diagnostic(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let [x, y, z] = random_point(&mut rng);
            let expected = [x * (x + y) - z * z, y * (x + y) - z * z, z * z];
            let got = map.apply_coords([x, y, z]);
            for (g, e) in got.iter().zip(expected) {
                assert!((g - e).norm() < 1e-14 * e.norm().max(1.0));
            }
        }
    }

    #[test]
    fn homogeneity() {
        let map = RenormMap::new(&SlConstants::new(1.0 / 3.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let v = random_point(&mut rng);
            let base = map.apply(&ProjPoint::new(v).unwrap()).unwrap();
            for beta in [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-3.0, 0.0)] {
                let scaled = ProjPoint::new(v.map(|c| c * beta)).unwrap();
                assert!(map.apply(&scaled).unwrap().distance(&base) < 1e-14);
                let raw = map.apply_coords(v.map(|c| c * beta));
                let expected = map.apply_coords(v).map(|c| c * beta * beta);
                for (r, e) in raw.iter().zip(expected) {
                    assert!((r - e).norm() < 1e-12 * e.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn membership_in_d() {
        let one = RenormMap::diagnostic(1.0).unwrap();
        assert!(one.in_d(&ProjPoint::real(1.0, -1.0, 0.0).unwrap(), 1e-8));
        assert!(!one.in_d(&ProjPoint::real(1.0, 1.0, 1.0).unwrap(), 1e-8));
        let half = RenormMap::diagnostic(0.5).unwrap();
        assert!(half.in_d(&ProjPoint::real(1.0, -0.5, 3.0).unwrap(), 1e-8));
    }

    #[test]
    fn iteration_and_indeterminacy() {
        let map = RenormMap::diagnostic(2.0).unwrap();
        let p = ProjPoint::real(0.3, 0.2, 0.9).unwrap();
        assert_eq!(map.iterate(&p, 0).unwrap(), p);
        let bad = ProjPoint::real(1.0, -2.0, 0.0).unwrap();
        assert!(matches!(map.iterate(&bad, 3), Err(RenormError::Indeterminate { step: 1, .. })));
        assert_eq!(RenormMap::diagnostic(-1.0), Err(RenormError::BadDelta(-1.0)));
    }

    #[test]
    fn basin_examples() {
        let x0 = ProjPoint::real(0.0, 1.0, 0.0).unwrap();
        let map = RenormMap::diagnostic(1.0).unwrap();
        let r = map.basin_probe(&x0, 10).unwrap();
        assert_eq!(r.outcome, OrbitOutcome::Converged { step: 0 });
        let r = map.basin_probe(&ProjPoint::real(1.0, 1.0, 1.0).unwrap(), 50).unwrap();
        assert_eq!(r.outcome, OrbitOutcome::Cycle { step: 1, period: 1 });
        let strong = RenormMap::diagnostic(2.0).unwrap();
        let r = strong.basin_probe(&ProjPoint::real(1.0, -2.0, 1.0).unwrap(), 200).unwrap();
        assert!(matches!(r.outcome, OrbitOutcome::Converged { .. }), "{r:?}");
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"kind\":\"converged\""));
    }
}

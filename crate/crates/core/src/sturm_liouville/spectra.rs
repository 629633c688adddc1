//! Dirichlet spectra: Sturm counts for the discrete pencil, the generating set,
//! the spectra of `H_<n>` and rescaled eigenfunctions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{propagate, SlError};
use crate::measure::{MeasureGrid, SlConstants};
use crate::spectrum::{Provenance, SpectrumList};

/// Relative accuracy of generating-set roots.
pub const ROOT_TOL: f64 = 1e-12;
/// Scan density of the generating-set search.
pub const POINTS_PER_DECADE: f64 = 400.0;
/// Smallest grid level accepted by [`eigensolve_h0_oracle`].
pub const ORACLE_MIN_LEVEL: u32 = 8;
/// Relative window used to group oracle eigenvalues into multiplicities.
pub const SIMPLICITY_TOL: f64 = 1e-9;

/// Eigenvalue counts for the pencil `K u = lambda M u` of a grid: `K` the
/// second-difference stiffness matrix on the interior points, `M` the diagonal of
/// interior masses, Dirichlet conditions at both ends.
#[derive(Clone, Debug)]
pub struct SturmCounter {
    diag: Vec<f64>,
    off2: Vec<f64>,
    mass: Vec<f64>,
}

impl SturmCounter {
    pub fn new(grid: &MeasureGrid) -> Self {
        let inv_h: Vec<f64> = grid.spacings().iter().map(|h| 1.0 / h).collect();
        let n = inv_h.len() - 1;
        let diag = (0..n).map(|i| inv_h[i] + inv_h[i + 1]).collect();
        // off2[i] couples interior points i - 1 and i.
        let off2 = (0..n).map(|i| if i == 0 { 0.0 } else { inv_h[i] * inv_h[i] }).collect();
        Self { diag, off2, mass: grid.interior_masses().to_vec() }
    }

    /// Number of interior unknowns, which is also the number of eigenvalues.
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `lambda` (negative pivots of the
    /// `LDL^T` factorization of `K - lambda M`).
    pub fn count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..self.diag.len() {
            let d = self.diag[i] - lambda * self.mass[i];
            pivot = d - self.off2[i] / pivot;
            if pivot == 0.0 {
                pivot = -f64::EPSILON * d.abs().max(f64::MIN_POSITIVE);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Upper bound on all eigenvalues (Gershgorin on `M^{-1} K`).
    pub fn upper_bound(&self) -> f64 {
        (0..self.diag.len())
            .map(|i| 2.0 * self.diag[i] / self.mass[i])
            .fold(0.0, f64::max)
    }

    /// The `k`-th smallest eigenvalue (1-based), by bisection on the count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = (0.0, self.upper_bound());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The `k` smallest Dirichlet eigenvalues of the discrete operator on `grid`, each
/// with the multiplicity counted in a relative window of [`SIMPLICITY_TOL`].
pub fn eigensolve_oracle(k: usize, grid: &MeasureGrid) -> Result<SpectrumList, SlError> {
    let counter = SturmCounter::new(grid);
    if k > counter.dimension() {
        return Err(SlError::TooFewEigenvalues { requested: k, available: counter.dimension() });
    }
    let mut pairs: Vec<(f64, u64)> = Vec::with_capacity(k);
    let mut j = 1;
    while j <= k {
        let value = counter.eigenvalue(j);
        let mult = counter.count(value * (1.0 + SIMPLICITY_TOL)) - counter.count(value * (1.0 - SIMPLICITY_TOL));
        let mult = mult.max(1);
        pairs.push((value, mult as u64));
        j += mult;
    }
    Ok(SpectrumList::from_weighted(pairs, 0.0, Provenance::Oracle).with_level(grid.level()))
}

/// [`eigensolve_oracle`] on a grid of `[0, 1]` that is fine enough to be meaningful.
pub fn eigensolve_h0_oracle(k: usize, grid: &MeasureGrid) -> Result<SpectrumList, SlError> {
    if grid.level() < ORACLE_MIN_LEVEL {
        return Err(SlError::CoarseGrid { level: grid.level(), min: ORACLE_MIN_LEVEL });
    }
    eigensolve_oracle(k, grid)
}

/// The first values of the generating set `S`, the zeros of
/// `g(lambda) = A(lambda/gamma) + D(lambda/gamma)/delta`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratingSet {
    pub values: Vec<f64>,
    pub constants: SlConstants,
    /// Level of the grid that evaluates `A` and `D` at `lambda/gamma`.
    pub level: u32,
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `k` values.
    pub fn truncated(&self, k: usize) -> GeneratingSet {
        GeneratingSet { values: self.values[..k.min(self.len())].to_vec(), ..self.clone() }
    }

    /// Writes `index,value` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["index", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            writer.write_record([(i + 1).to_string(), v.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

struct RootFinder<'a> {
    coarse: &'a MeasureGrid,
    coarse_count: SturmCounter,
    fine_count: SturmCounter,
    gamma: f64,
    inv_delta: f64,
}

impl RootFinder<'_> {
    fn g(&self, lambda: f64) -> f64 {
        let p = propagate(lambda / self.gamma, self.coarse.points(), self.coarse.masses());
        p.a + self.inv_delta * p.d
    }

    /// Number of generating-set values below `lambda`.
    ///
    /// `B` on the level-`n+1` grid factors as `alpha B_n(lambda/gamma) g(lambda)`, so the
    /// zeros of `g` below `lambda` are the level-`n+1` Dirichlet eigenvalues minus
    /// the rescaled level-`n` ones.
    fn count(&self, lambda: f64) -> usize {
        let fine = self.fine_count.count(lambda);
        let coarse = self.coarse_count.count(lambda / self.gamma);
        fine.saturating_sub(coarse)
    }

    /// Appends the `expected` roots lying in `(lo, hi]`.
    fn isolate(&self, lo: f64, hi: f64, expected: usize, roots: &mut Vec<f64>) {
        match expected {
            0 => {}
            1 => roots.push(self.refine(lo, hi)),
            _ if hi - lo <= ROOT_TOL * hi => {
                log::warn!("{expected} generating-set values coincide near {hi}");
                roots.extend(std::iter::repeat_n(0.5 * (lo + hi), expected));
            }
            _ => {
                let mid = (lo * hi).sqrt();
                let below = self.count(mid) - self.count(lo).min(self.count(mid));
                let below = below.min(expected);
                self.isolate(lo, mid, below, roots);
                self.isolate(mid, hi, expected - below, roots);
            }
        }
    }

    /// The single root in `(lo, hi]`: Illinois iteration on `g` when it changes sign,
    /// bisection on the count otherwise.
    fn refine(&self, mut lo: f64, mut hi: f64) -> f64 {
        let (mut g_lo, mut g_hi) = (self.g(lo), self.g(hi));
        if g_hi == 0.0 {
            return hi;
        }
        if g_lo * g_hi > 0.0 {
            let base = self.count(lo);
            while hi - lo > ROOT_TOL * hi {
                let mid = 0.5 * (lo + hi);
                if self.count(mid) > base {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= ROOT_TOL * hi {
                break;
            }
            let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let gx = self.g(x);
            if gx == 0.0 {
                return x;
            }
            if (gx < 0.0) == (g_lo < 0.0) {
                lo = x;
                g_lo = gx;
                if side == -1 {
                    g_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = x;
                g_hi = gx;
                if side == 1 {
                    g_lo *= 0.5;
                }
                side = 1;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The first `k` values of the generating set, with `A` and `D` computed on the
/// level-`level` grid.
///
/// The scan walks a geometric grid of [`POINTS_PER_DECADE`] points per decade upward
/// from 1 (every Dirichlet eigenvalue of a probability measure on `[0, 1]` is at least
/// 4). In each scan cell the exact root count from [`SturmCounter`] decides whether
/// the cell is skipped, refined directly, or split further, so close roots are never
/// missed. The scan stops at `gamma^(level+1)`, beyond which the discretization no
/// longer resolves the spectrum.
pub fn generating_set(k: usize, c: &SlConstants, level: u32) -> Result<GeneratingSet, SlError> {
    let coarse = MeasureGrid::build(level, c);
    let fine = MeasureGrid::build(level + 1, c);
    let finder = RootFinder {
        coarse: &coarse,
        coarse_count: SturmCounter::new(&coarse),
        fine_count: SturmCounter::new(&fine),
        gamma: c.gamma(),
        inv_delta: 1.0 / c.delta(),
    };
    let bound = c.gamma().powi(level as i32 + 1);
    let step = 10f64.powf(1.0 / POINTS_PER_DECADE);
    let mut roots = Vec::with_capacity(k);
    let mut lo = 1.0;
    let mut n_lo = finder.count(lo);
    while roots.len() < k {
        if lo >= bound {
            return Err(SlError::Exhausted { found: roots.len(), requested: k, bound });
        }
        let hi = (lo * step).min(bound);
        let n_hi = finder.count(hi);
        finder.isolate(lo, hi, n_hi.saturating_sub(n_lo), &mut roots);
        lo = hi;
        n_lo = n_hi.max(n_lo);
    }
    roots.truncate(k);
    Ok(GeneratingSet { values: roots, constants: *c, level })
}

/// Which operator `H_<n>` a spectrum belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HnIndex {
    Finite(u32),
    Infinite,
}

/// `gamma^p lambda` for `lambda` in `s` and `p_min <= p <= p_max`. For finite `n` the
/// spectrum of `H_<n>` starts at `p = -n`, so `p_min` may not go below it.
pub fn spectrum_hn(n: HnIndex, p_min: i32, p_max: i32, s: &GeneratingSet) -> Result<SpectrumList, SlError> {
    if let HnIndex::Finite(n) = n {
        if p_min < -(n as i32) {
            return Err(SlError::Window { p_min, n });
        }
    }
    let gamma = s.constants.gamma();
    let values = (p_min..=p_max).flat_map(|p| s.values.iter().map(move |l| gamma.powi(p) * l));
    Ok(SpectrumList::from_values(values, 1e-12, Provenance::Renormalized))
}

/// Point values of a function on the points of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteFunction {
    pub grid: MeasureGrid,
    pub values: Vec<f64>,
}

impl DiscreteFunction {
    /// `int (f')^2 dx / int f^2 dm` for the piecewise-linear interpolant and the
    /// atomic measure.
    pub fn rayleigh_quotient(&self) -> f64 {
        let v = &self.values;
        let energy: f64 = self
            .grid
            .spacings()
            .iter()
            .enumerate()
            .map(|(i, h)| (v[i + 1] - v[i]).powi(2) / h)
            .sum();
        let mass: f64 = v.iter().zip(self.grid.masses()).map(|(f, m)| f * f * m).sum();
        energy / mass
    }

    /// The discrete operator `-(1/m_i) (f'_{i+1/2} - f'_{i-1/2})` at interior points.
    pub fn apply_operator(&self) -> Vec<f64> {
        let x = self.grid.points();
        let v = &self.values;
        let m = self.grid.masses();
        (1..x.len() - 1)
            .map(|i| {
                let right = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
                let left = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
                -(right - left) / m[i]
            })
            .collect()
    }
}

/// Solution of the discrete equation with `f(0) = 0`, `f'(0) = 1`, sampled at the
/// grid points.
pub fn shoot(lambda: f64, grid: &MeasureGrid) -> DiscreteFunction {
    let x = grid.points();
    let m = grid.masses();
    let mut values = Vec::with_capacity(x.len());
    let (mut f, mut df) = (0.0, 1.0);
    for i in 0..x.len() {
        values.push(f);
        df -= lambda * m[i] * f;
        if i + 1 < x.len() {
            f += (x[i + 1] - x[i]) * df;
        }
    }
    DiscreteFunction { grid: grid.clone(), values }
}

/// `f o Psi_1^{-p}`: the function `y -> f(alpha^{-p} y)` on the grid carried to
/// `[0, alpha^p L]`, with the measure rescaled to match. An eigenfunction with
/// eigenvalue `lambda` becomes one with eigenvalue `gamma^p lambda`. Negative `p`
/// stretches the support, e.g. `p = -1` at `alpha = 1/2` sends `sin(pi x)` on `[0, 1]`
/// to `sin(pi y / 2)` on `[0, 2]`.
pub fn eigenfunction_extend(f: &DiscreteFunction, p: i32) -> DiscreteFunction {
    DiscreteFunction { grid: f.grid.blow_up(-p), values: f.values.clone() }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn counts_match_dense_eigensolve() {
        let c = SlConstants::new(0.3).unwrap();
        let grid = MeasureGrid::build(6, &c);
        let counter = SturmCounter::new(&grid);
        let n = counter.dimension();
        let h: Vec<f64> = grid.spacings();
        let m = grid.interior_masses();
        // Symmetric form M^{-1/2} K M^{-1/2}.
        let mut k = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            k[(i, i)] = (1.0 / h[i] + 1.0 / h[i + 1]) / m[i];
            if i + 1 < n {
                let v = -1.0 / h[i + 1] / (m[i] * m[i + 1]).sqrt();
                k[(i, i + 1)] = v;
                k[(i + 1, i)] = v;
            }
        }
        let mut dense: Vec<f64> = k.symmetric_eigenvalues().iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for (j, &d) in dense.iter().enumerate() {
            assert!((counter.eigenvalue(j + 1) - d).abs() < 1e-9 * d, "eigenvalue {j}");
            assert_eq!(counter.count(d * (1.0 - 1e-9)), j);
        }
    }

    #[test]
    fn oracle_recovers_dirichlet_squares() {
        let grid = MeasureGrid::build(12, &SlConstants::new(0.5).unwrap());
        let s = eigensolve_h0_oracle(5, &grid).unwrap();
        for (j, v) in s.values().enumerate() {
            let exact = PI * PI * ((j + 1) * (j + 1)) as f64;
            assert!((v - exact).abs() < 5e-3 * exact);
        }
        assert!(s.entries().iter().all(|e| e.multiplicity == 1 && e.value > 0.0));
        let coarse = MeasureGrid::build(4, &SlConstants::new(0.5).unwrap());
        assert_eq!(eigensolve_h0_oracle(3, &coarse), Err(SlError::CoarseGrid { level: 4, min: 8 }));
    }

    #[test]
    fn generating_set_at_half_is_odd_squares() {
        let s = generating_set(4, &SlConstants::new(0.5).unwrap(), 12).unwrap();
        for (j, v) in s.values.iter().enumerate() {
            let exact = PI * PI * ((2 * j + 1) * (2 * j + 1)) as f64;
            assert!((v - exact).abs() < 1e-5 * exact, "{v} vs {exact}");
        }
    }

    #[test]
    fn generating_set_third_is_simple_and_positive() {
        let c = SlConstants::new(1.0 / 3.0).unwrap();
        let s = generating_set(5, &c, 10).unwrap();
        assert!(s.values[0] > 0.0);
        assert!(s.values.windows(2).all(|w| w[0] < w[1]));
        let finder_grid = MeasureGrid::build(10, &c);
        for &v in &s.values {
            let g = |l: f64| {
                let p = propagate(l / c.gamma(), finder_grid.points(), finder_grid.masses());
                p.a + p.d / c.delta()
            };
            assert!(g(v * (1.0 - 1e-6)) * g(v * (1.0 + 1e-6)) < 0.0);
        }
    }

    #[test]
    fn exhaustion_is_reported() {
        let err = generating_set(50, &SlConstants::new(0.5).unwrap(), 3).unwrap_err();
        assert!(matches!(err, SlError::Exhausted { requested: 50, .. }));
    }

    #[test]
    fn hn_spectrum_windows() {
        let s = GeneratingSet {
            values: vec![PI * PI, 9.0 * PI * PI],
            constants: SlConstants::new(0.5).unwrap(),
            level: 0,
        };
        let spec = spectrum_hn(HnIndex::Finite(0), 0, 2, &s).unwrap();
        let expected = [1.0, 4.0, 9.0, 16.0, 36.0, 144.0].map(|v| v * PI * PI);
        assert_eq!(spec.len(), 6);
        for (v, e) in spec.values().zip(expected) {
            assert!((v - e).abs() < 1e-12 * e);
        }
        assert!(spec.entries().iter().all(|e| e.multiplicity == 1));
        assert_eq!(spectrum_hn(HnIndex::Finite(1), -2, 2, &s), Err(SlError::Window { p_min: -2, n: 1 }));
        let h1 = spectrum_hn(HnIndex::Finite(1), -1, 1, &s).unwrap();
        for (a, b) in h1.values().zip(spec.values()) {
            assert!((4.0 * a - b).abs() < 1e-12 * b);
        }
        assert!(spectrum_hn(HnIndex::Infinite, -5, 0, &s).is_ok());
    }

    #[test]
    fn extension_scales_eigenvalue() {
        let c = SlConstants::new(1.0 / 3.0).unwrap();
        let grid = MeasureGrid::build(10, &c);
        let counter = SturmCounter::new(&grid);
        let lambda = counter.eigenvalue(2);
        let f = shoot(lambda, &grid);
        assert!(f.values.last().unwrap().abs() < 1e-8 * f.values.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        let rq = f.rayleigh_quotient();
        assert_eq!(eigenfunction_extend(&f, 0), f);
        for p in [-2, -1, 1, 3] {
            let g = eigenfunction_extend(&f, p);
            let scale = c.gamma().powi(p);
            assert!((g.rayleigh_quotient() - scale * rq).abs() < 1e-9 * scale * rq);
            for (hv, v) in g.apply_operator().iter().zip(&g.values[1..]) {
                assert!((hv - scale * lambda * v).abs() < 1e-6 * scale * lambda);
            }
        }
    }

    #[test]
    fn extension_of_sine_at_half() {
        let grid = MeasureGrid::build(12, &SlConstants::new(0.5).unwrap());
        let values = grid.points().iter().map(|x| (PI * x).sin()).collect();
        let f = DiscreteFunction { grid, values };
        let g = eigenfunction_extend(&f, -1);
        assert!((g.grid.length() - 2.0).abs() < 1e-15);
        for (y, v) in g.grid.points().iter().zip(&g.values) {
            assert!((v - (PI * y / 2.0).sin()).abs() < 1e-12);
        }
        assert!((g.rayleigh_quotient() - PI * PI / 4.0).abs() < 1e-4);
    }
}

//! The two-map iterated function system on `[0, 1]`, its parameter pack and
//! atomic approximations of the self-similar measure.
//!
//! The contractions are `x -> alpha x` and `x -> 1 - (1 - alpha)(1 - x)`; the
//! measure gives weight `b = 1 - alpha` to the first image and `alpha` to the
//! second.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParameterError {
    #[error("alpha = {0} must be strictly positive")]
    AlphaNotPositive(f64),
    #[error("alpha = {0} exceeds 1/2: delta = alpha/(1-alpha) would exceed 1 and the spectrum is no longer discrete (need delta <= 1)")]
    AlphaAboveHalf(f64),
    #[error("cell word letters must be 1 or 2, got {0}")]
    BadLetter(u8),
}

/// `alpha` together with the derived constants `b`, `delta` and `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlConstants {
    alpha: f64,
    b: f64,
    delta: f64,
    gamma: f64,
}

impl SlConstants {
    pub fn new(alpha: f64) -> Result<Self, ParameterError> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(ParameterError::AlphaNotPositive(alpha));
        }
        if alpha > 0.5 {
            return Err(ParameterError::AlphaAboveHalf(alpha));
        }
        let b = 1.0 - alpha;
        Ok(Self { alpha, b, delta: alpha / b, gamma: 1.0 / (alpha * b) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Weight of the left cell, `1 - alpha`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Spectral scaling factor `1 / (alpha (1 - alpha))`; at least 4.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Normalized barycenter of the measure on its support, `alpha^2 / (alpha^2 + (1-alpha)^2)`.
    ///
    /// Follows from the self-similarity relation applied to `f(x) = x`; it is the
    /// same for every cell after affine normalization.
    pub fn barycenter(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        a2 / (a2 + self.b * self.b)
    }

    pub fn psi1(&self, x: f64) -> f64 {
        self.alpha * x
    }

    pub fn psi2(&self, x: f64) -> f64 {
        1.0 - self.b * (1.0 - x)
    }
}

/// A finite word over `{1, 2}` naming the cell `Psi_{i_n} o ... o Psi_{i_1}([0, 1])`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CellWord(Vec<u8>);

impl CellWord {
    pub fn new(letters: impl Into<Vec<u8>>) -> Result<Self, ParameterError> {
        let letters = letters.into();
        if let Some(&bad) = letters.iter().find(|&&l| l != 1 && l != 2) {
            return Err(ParameterError::BadLetter(bad));
        }
        Ok(Self(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> Vec<CellWord> {
        (0..1usize << n)
            .map(|bits| {
                CellWord((0..n).map(|i| if bits >> (n - 1 - i) & 1 == 0 { 1 } else { 2 }).collect())
            })
            .collect()
    }

    /// Endpoints of the cell, applying `Psi_{i_1}` first.
    pub fn interval(&self, c: &SlConstants) -> (f64, f64) {
        let apply = |x: f64| {
            self.0.iter().fold(x, |x, &l| if l == 1 { c.psi1(x) } else { c.psi2(x) })
        };
        let (lo, hi) = (apply(0.0), apply(1.0));
        (lo.min(hi), lo.max(hi))
    }
}

/// Measure of the cell named by `word`: `b` per letter 1, `1 - b` per letter 2.
pub fn cell_mass(word: &CellWord, c: &SlConstants) -> f64 {
    word.letters().iter().map(|&l| if l == 1 { c.b() } else { 1.0 - c.b() }).product()
}

/// Atomic approximation of the self-similar measure at refinement level `n`.
///
/// `points` are the sorted endpoints of the `2^n` level-`n` cells. Each cell's
/// mass is split between its two endpoints so that the first moment of the cell
/// is preserved (the left endpoint receives `1 - t`, the right `t`, with `t` the
/// normalized barycenter). The shared endpoint of neighbouring cells carries the
/// sum of both contributions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureGrid {
    level: u32,
    constants: SlConstants,
    points: Vec<f64>,
    masses: Vec<f64>,
}

impl MeasureGrid {
    pub fn build(level: u32, c: &SlConstants) -> Self {
        let mut cells = vec![(0.0_f64, 1.0_f64, 1.0_f64)];
        for _ in 0..level {
            cells = cells
                .iter()
                .flat_map(|&(left, len, mass)| {
                    let split = c.alpha() * len;
                    [(left, split, c.b() * mass), (left + split, len - split, (1.0 - c.b()) * mass)]
                })
                .collect();
        }
        let t = c.barycenter();
        let mut points = Vec::with_capacity(cells.len() + 1);
        let mut masses = vec![0.0; cells.len() + 1];
        for (i, &(left, _, mass)) in cells.iter().enumerate() {
            points.push(left);
            masses[i] += (1.0 - t) * mass;
            masses[i + 1] += t * mass;
        }
        points.push(1.0);
        Self { level, constants: *c, points, masses }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn constants(&self) -> &SlConstants {
        &self.constants
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Lumped mass at every point, endpoints included.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn interior_masses(&self) -> &[f64] {
        &self.masses[1..self.masses.len() - 1]
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Right endpoint of the support.
    pub fn length(&self) -> f64 {
        *self.points.last().expect("grid has at least two points")
    }

    /// Cell lengths `x_{i+1} - x_i`.
    pub fn spacings(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The same grid transported by `x -> alpha^{-q} x` with masses scaled by
    /// `b^{-q}`, i.e. the approximation of the blown-up measure on
    /// `[0, alpha^{-q}]`. Negative `q` contracts.
    pub fn blow_up(&self, q: i32) -> Self {
        let stretch = self.constants.alpha().powi(-q);
        let weight = self.constants.b().powi(-q);
        Self {
            level: self.level,
            constants: self.constants,
            points: self.points.iter().map(|x| x * stretch).collect(),
            masses: self.masses.iter().map(|m| m * weight).collect(),
        }
    }

    /// The grid pushed forward by `x -> offset + scale x`, masses multiplied by `weight`.
    pub fn affine_image(&self, offset: f64, scale: f64, weight: f64) -> Self {
        Self {
            level: self.level,
            constants: self.constants,
            points: self.points.iter().map(|x| offset + scale * x).collect(),
            masses: self.masses.iter().map(|m| m * weight).collect(),
        }
    }

    /// Joins grids whose supports abut; masses at the shared point add.
    pub fn concat(pieces: &[MeasureGrid]) -> Option<Self> {
        let (first, rest) = pieces.split_first()?;
        let mut out = first.clone();
        for piece in rest {
            let join = *out.points.last()?;
            debug_assert!((piece.points[0] - join).abs() <= 1e-12 * join.abs().max(1.0));
            *out.masses.last_mut()? += piece.masses[0];
            out.points.extend_from_slice(&piece.points[1..]);
            out.masses.extend_from_slice(&piece.masses[1..]);
        }
        Some(out)
    }

    /// Writes `point,mass` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["point", "mass"])?;
        for (x, m) in self.points.iter().zip(&self.masses) {
            writer.write_record([x.to_string(), m.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    }
}

//! Sorted eigenvalue lists with multiplicities.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Where a list of eigenvalues came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Direct matrix eigensolve.
    Oracle,
    /// Recursive preimage construction through the decimation polynomial.
    Decimation,
    /// Limits of rescaled graph eigenvalues, or other renormalized values.
    Renormalized,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Provenance::Oracle => "oracle",
            Provenance::Decimation => "decimation",
            Provenance::Renormalized => "renormalized",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub value: f64,
    pub multiplicity: u64,
}

/// Strictly increasing eigenvalues, each with a multiplicity of at least one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumList {
    entries: Vec<Eigenvalue>,
    provenance: Provenance,
    /// Refinement level the list belongs to, when that notion applies.
    level: Option<u32>,
}

impl SpectrumList {
    /// Builds a list from unsorted raw values (each counted once), grouping values
    /// closer than `tol` (relative to `max(1, |value|)`) into one entry.
    pub fn from_values(values: impl IntoIterator<Item = f64>, tol: f64, provenance: Provenance) -> Self {
        Self::from_weighted(values.into_iter().map(|v| (v, 1)), tol, provenance)
    }

    /// Builds a list from `(value, multiplicity)` pairs, merging near-equal values.
    pub fn from_weighted(
        pairs: impl IntoIterator<Item = (f64, u64)>,
        tol: f64,
        provenance: Provenance,
    ) -> Self {
        let mut pairs: Vec<(f64, u64)> = pairs.into_iter().filter(|&(_, m)| m > 0).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<Eigenvalue> = Vec::with_capacity(pairs.len());
        // Anchor each group at its first member so chains of small gaps don't drift.
        let mut anchor = f64::NAN;
        for (value, multiplicity) in pairs {
            match entries.last_mut() {
                Some(last) if (value - anchor).abs() <= tol * anchor.abs().max(1.0) => {
                    last.multiplicity += multiplicity;
                }
                _ => {
                    anchor = value;
                    entries.push(Eigenvalue { value, multiplicity });
                }
            }
        }
        Self { entries, provenance, level: None }
    }

    /// The entries strictly below `bound`.
    pub fn below(&self, bound: f64) -> SpectrumList {
        let entries = self.entries.iter().copied().take_while(|e| e.value < bound).collect();
        Self { entries, ..self.clone() }
    }

    /// The first `count` entries.
    pub fn truncated(&self, count: usize) -> SpectrumList {
        let entries = self.entries[..count.min(self.entries.len())].to_vec();
        Self { entries, ..self.clone() }
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = Some(level);
        self
    }

    pub fn entries(&self) -> &[Eigenvalue] {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.value)
    }

    /// Every eigenvalue repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity as usize))
            .collect()
    }

    /// Multiplicity of the entry within `tol` of `value`, or zero.
    pub fn multiplicity_of(&self, value: f64, tol: f64) -> u64 {
        self.entries
            .iter()
            .filter(|e| (e.value - value).abs() <= tol)
            .map(|e| e.multiplicity)
            .sum()
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        let idx = self.entries.partition_point(|e| e.value < value - tol);
        self.entries.get(idx).is_some_and(|e| (e.value - value).abs() <= tol)
    }

    /// First entry whose value or multiplicity disagrees with `other`.
    pub fn first_mismatch(&self, other: &SpectrumList, tol: f64) -> Option<f64> {
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if (a.value - b.value).abs() > tol || a.multiplicity != b.multiplicity {
                return Some(a.value);
            }
        }
        match self.len().cmp(&other.len()) {
            std::cmp::Ordering::Less => Some(other.entries[self.len()].value),
            std::cmp::Ordering::Greater => Some(self.entries[other.len()].value),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Writes `value,multiplicity,level,provenance` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            value: f64,
            multiplicity: u64,
            level: Option<u32>,
            provenance: &'a str,
        }
        let provenance = self.provenance.to_string();
        let mut writer = csv::Writer::from_writer(out);
        for e in &self.entries {
            writer.serialize(Row {
                value: e.value,
                multiplicity: e.multiplicity,
                level: self.level,
                provenance: &provenance,
            })?;
        }
        writer.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_close_values() {
        let s = SpectrumList::from_values([1.25, 0.5, 1.25 + 1e-12], 1e-9, Provenance::Oracle);
        assert_eq!(s.len(), 2);
        assert_eq!(s.entries()[1].multiplicity, 2);
        assert_eq!(s.total_count(), 3);
    }

    #[test]
    fn csv_has_expected_columns() {
        let s = SpectrumList::from_weighted([(0.5, 1), (1.25, 2)], 1e-9, Provenance::Decimation)
            .with_level(1);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "value,multiplicity,level,provenance\n0.5,1,1,decimation\n1.25,2,1,decimation\n");
    }

    #[test]
    fn mismatch_reports_offending_value() {
        let a = SpectrumList::from_weighted([(0.5, 1), (1.25, 2)], 1e-9, Provenance::Oracle);
        let b = SpectrumList::from_weighted([(0.5, 1), (1.25, 1)], 1e-9, Provenance::Decimation);
        assert_eq!(a.first_mismatch(&b, 1e-9), Some(1.25));
        assert_eq!(a.first_mismatch(&a, 1e-9), None);
    }
}

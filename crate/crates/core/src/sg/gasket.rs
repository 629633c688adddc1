//! Sierpinski pre-gasket graphs and their probabilistic graph Laplacians.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{BoundaryCondition, SgError, MULTIPLICITY_TOL};
use crate::spectrum::{Provenance, SpectrumList};

/// Largest level accepted by [`PreGasket::build`].
pub const MAX_GRAPH_LEVEL: u32 = 8;
/// Largest level for which the dense eigensolve is attempted.
pub const MAX_DENSE_LEVEL: u32 = 7;

/// The graph `Gamma_m` on the vertex set `V_m`.
#[derive(Clone, Debug)]
pub struct PreGasket {
    level: u32,
    vertices: Vec<[f64; 2]>,
    adjacency: Vec<Vec<usize>>,
}

impl PreGasket {
    /// Vertex count `3 (3^m + 1) / 2`.
    pub fn vertex_count(level: u32) -> usize {
        3 * (3usize.pow(level) + 1) / 2
    }

    pub fn build(level: u32) -> Result<Self, SgError> {
        if level > MAX_GRAPH_LEVEL {
            return Err(SgError::TooLarge { level, dimension: Self::vertex_count(level) });
        }
        // Triangular lattice coordinates scaled by 2^m: (i, j) -> i e1 + j e2.
        let side = 1u32 << level;
        let corners = [(0, 0), (side, 0), (0, side)];
        let mut index: HashMap<(u32, u32), usize> = HashMap::new();
        let mut lattice: Vec<(u32, u32)> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut id = |p: (u32, u32)| {
            *index.entry(p).or_insert_with(|| {
                lattice.push(p);
                lattice.len() - 1
            })
        };
        for c in corners {
            id(c);
        }
        let mut stack = vec![(corners, level)];
        while let Some((tri, k)) = stack.pop() {
            if k == 0 {
                let ids = tri.map(&mut id);
                edges.extend([(ids[0], ids[1]), (ids[1], ids[2]), (ids[0], ids[2])]);
                continue;
            }
            let mid = |p: (u32, u32), q: (u32, u32)| ((p.0 + q.0) / 2, (p.1 + q.1) / 2);
            let [a, b, c] = tri;
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            stack.push(([ca, bc, c], k - 1));
            stack.push(([ab, b, bc], k - 1));
            stack.push(([a, ab, ca], k - 1));
        }
        let mut adjacency = vec![Vec::new(); lattice.len()];
        for (u, v) in edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        let scale = f64::from(side);
        let vertices = lattice
            .iter()
            .map(|&(i, j)| {
                let (i, j) = (f64::from(i) / scale, f64::from(j) / scale);
                [i + 0.5 * j, 0.75f64.sqrt() * j]
            })
            .collect();
        Ok(Self { level, vertices, adjacency })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// The three corner vertices.
    pub fn boundary(&self) -> [usize; 3] {
        [0, 1, 2]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn interior_count(&self) -> usize {
        self.vertices.len() - 3
    }

    /// Dense symmetric matrix of the probabilistic Laplacian.
    ///
    /// Dirichlet: `I - A/4` on the interior vertices. Neumann: the symmetrized
    /// random-walk Laplacian `I - D^{-1/2} A D^{-1/2}` on all vertices, which has the
    /// same spectrum as `I - D^{-1} A`.
    pub fn laplacian(&self, bc: BoundaryCondition) -> DMatrix<f64> {
        match bc {
            BoundaryCondition::Dirichlet => {
                let n = self.interior_count();
                let mut m = DMatrix::identity(n, n);
                for v in 3..self.vertices.len() {
                    for &w in self.neighbors(v).iter().filter(|&&w| w >= 3) {
                        m[(v - 3, w - 3)] = -0.25;
                    }
                }
                m
            }
            BoundaryCondition::Neumann => {
                let n = self.vertices.len();
                let mut m = DMatrix::identity(n, n);
                for v in 0..n {
                    let dv = self.neighbors(v).len() as f64;
                    for &w in self.neighbors(v) {
                        let dw = self.neighbors(w).len() as f64;
                        m[(v, w)] = -1.0 / (dv * dw).sqrt();
                    }
                }
                m
            }
        }
    }
}

/// Full spectrum of the level-`m` graph Laplacian by dense symmetric eigensolve.
pub fn eigensolve_direct(level: u32, bc: BoundaryCondition) -> Result<SpectrumList, SgError> {
    if bc == BoundaryCondition::Dirichlet && level == 0 {
        return Err(SgError::EmptyInterior);
    }
    if level > MAX_DENSE_LEVEL {
        let dimension = match bc {
            BoundaryCondition::Dirichlet => PreGasket::vertex_count(level) - 3,
            BoundaryCondition::Neumann => PreGasket::vertex_count(level),
        };
        return Err(SgError::TooLarge { level, dimension });
    }
    let g = PreGasket::build(level)?;
    let lap = g.laplacian(bc);
    let dim = lap.nrows();
    let eig = SymmetricEigen::try_new(lap, 1e-14, 200 * dim.max(10))
        .ok_or(SgError::NoConvergence { level })?;
    Ok(SpectrumList::from_values(eig.eigenvalues.iter().copied(), MULTIPLICITY_TOL, Provenance::Oracle)
        .with_level(level))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        let g0 = PreGasket::build(0).unwrap();
        assert_eq!(g0.vertices().len(), 3);
        assert_eq!(g0.interior_count(), 0);
        assert!(g0.boundary().iter().all(|&v| g0.neighbors(v).len() == 2));
        let g1 = PreGasket::build(1).unwrap();
        assert_eq!((g1.vertices().len(), g1.interior_count()), (6, 3));
        let g2 = PreGasket::build(2).unwrap();
        assert_eq!((g2.vertices().len(), g2.interior_count()), (15, 12));
    }

    #[test]
    fn level_one_interior_are_midpoints() {
        let g = PreGasket::build(1).unwrap();
        let h = 0.75f64.sqrt();
        let mut mids: Vec<[f64; 2]> = g.vertices()[3..].to_vec();
        mids.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let expected = [[0.25, h / 2.0], [0.5, 0.0], [0.75, h / 2.0]];
        for (m, e) in mids.iter().zip(expected) {
            assert!((m[0] - e[0]).abs() < 1e-15 && (m[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn degrees_and_counts() {
        for m in 0..=5 {
            let g = PreGasket::build(m).unwrap();
            assert_eq!(g.vertices().len(), PreGasket::vertex_count(m));
            for v in 0..g.vertices().len() {
                let expected = if v < 3 { 2 } else { 4 };
                assert_eq!(g.neighbors(v).len(), expected, "level {m} vertex {v}");
            }
        }
    }

    #[test]
    fn too_large_reports_dimension() {
        assert_eq!(
            PreGasket::build(9).unwrap_err(),
            SgError::TooLarge { level: 9, dimension: PreGasket::vertex_count(9) }
        );
        assert!(matches!(
            eigensolve_direct(8, BoundaryCondition::Dirichlet),
            Err(SgError::TooLarge { dimension: 9840, .. })
        ));
    }

    #[test]
    fn level_one_dirichlet_spectrum() {
        let s = eigensolve_direct(1, BoundaryCondition::Dirichlet).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.entries()[0].value - 0.5).abs() < 1e-12);
        assert_eq!(s.entries()[0].multiplicity, 1);
        assert!((s.entries()[1].value - 1.25).abs() < 1e-12);
        assert_eq!(s.entries()[1].multiplicity, 2);
    }

    #[test]
    fn eigenvalue_count_and_range() {
        for m in 1..=4u32 {
            let s = eigensolve_direct(m, BoundaryCondition::Dirichlet).unwrap();
            assert_eq!(s.total_count() as usize, (3usize.pow(m + 1) - 3) / 2);
            assert!(s.values().all(|v| (0.0..=2.0).contains(&v)));
        }
    }

    #[test]
    fn dirichlet_matrix_is_identity_minus_quarter_adjacency() {
        let g = PreGasket::build(2).unwrap();
        let l = g.laplacian(BoundaryCondition::Dirichlet);
        assert_eq!(l, l.transpose());
        for i in 0..l.nrows() {
            assert_eq!(l[(i, i)], 1.0);
            let off: f64 = (0..l.ncols()).filter(|&j| j != i).map(|j| l[(i, j)]).sum();
            let interior_nbrs = g.neighbors(i + 3).iter().filter(|&&w| w >= 3).count();
            assert_eq!(off, -0.25 * interior_nbrs as f64);
        }
    }
}

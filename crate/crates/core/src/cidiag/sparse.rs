use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::SymmetricOperator;
use crate::determinants::{diagonal_element, slater_condon_element, DeterminantSpace};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

/// Symmetric matrix stored as its lower triangle, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    /// Row `i` holds `(j, value)` with `j < i`, ascending in `j`.
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
}

impl SparseSymmetricMatrix {
    /// Builds from lower-or-upper triangle triplets; `(i, j)` and `(j, i)`
    /// denote the same entry and are summed. Missing diagonal entries are zero.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut diag = vec![0.0; dim];
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite entry at ({i}, {j})")));
            }
            if i == j {
                diag[i] += v;
            } else {
                let (r, c) = (i.max(j), i.min(j));
                rows[r].push((c as u32, v));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            row.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
        }
        Ok(SparseSymmetricMatrix { rows, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Stored entries, diagonal included.
    pub fn nnz(&self) -> usize {
        self.diag.len() + self.rows.iter().map(Vec::len).sum::<usize>()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (r, c) = (i.max(j), i.min(j) as u32);
        self.rows[r]
            .binary_search_by_key(&c, |&(k, _)| k)
            .map_or(0.0, |k| self.rows[r][k].1)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j as usize)] = v;
                m[(j as usize, i)] = v;
            }
        }
        debug_assert_eq!(m.nrows(), n);
        m
    }

    /// Coordinate text: `dim` on the first line, then `i j value` (0-based,
    /// lower triangle including the diagonal).
    pub fn to_dump_string(&self) -> String {
        let mut out = format!("{}\n", self.dim());
        for i in 0..self.dim() {
            for &(j, v) in &self.rows[i] {
                writeln!(out, "{i} {j} {v:.17e}").unwrap();
            }
            writeln!(out, "{i} {i} {:.17e}", self.diag[i]).unwrap();
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let dim: usize = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| Error::Parse("matrix dump must start with the dimension".into()))?;
        let mut triplets = Vec::new();
        for line in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let parsed = (f.len() == 3)
                .then(|| Some((f[0].parse().ok()?, f[1].parse().ok()?, f[2].parse().ok()?)))
                .flatten();
            triplets.push(parsed.ok_or_else(|| Error::Parse(format!("bad matrix line `{line}`")))?);
        }
        Self::from_triplets(dim, &triplets)
    }
}

impl SymmetricOperator for SparseSymmetricMatrix {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.dim() {
            y[i] = self.diag[i] * x[i];
        }
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = 0.0;
            for &(j, v) in row {
                acc += v * x[j as usize];
                y[j as usize] += v * x[i];
            }
            y[i] += acc;
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        SparseSymmetricMatrix::to_dense(self)
    }
}

/// Pairwise scanning is used up to this dimension; above it, connected
/// determinants are enumerated and looked up.
const PAIRWISE_LIMIT: usize = 3000;

/// `H[i][j] = ⟨d_i|Ĥ|d_j⟩` over the space; pairs beyond double excitations
/// are not stored.
pub fn build_subspace_hamiltonian(
    space: &DeterminantSpace,
    ints: &IntegralSet,
) -> Result<SparseSymmetricMatrix> {
    space.sector()?;
    let n = space.len();
    let dets = space.dets();
    let diag: Vec<f64> = dets.iter().map(|d| diagonal_element(d, ints)).collect();
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    if n <= PAIRWISE_LIMIT {
        for i in 0..n {
            for j in 0..i {
                if dets[i].excitation_degree(&dets[j]) <= 2 {
                    let v = slater_condon_element(&dets[i], &dets[j], ints);
                    if v != 0.0 {
                        rows[i].push((j as u32, v));
                    }
                }
            }
        }
    } else {
        for i in 0..n {
            let mut row = Vec::new();
            crate::determinants::for_each_connected(&dets[i], ints.n_orb(), |d| {
                if let Some(j) = space.index_of(&d) {
                    if j < i {
                        let v = slater_condon_element(&dets[i], &d, ints);
                        if v != 0.0 {
                            row.push((j as u32, v));
                        }
                    }
                }
            });
            row.sort_by_key(|&(j, _)| j);
            rows[i] = row;
        }
    }
    Ok(SparseSymmetricMatrix { rows, diag })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_and_dump() {
        let m = SparseSymmetricMatrix::from_triplets(
            3,
            &[(0, 0, 1.0), (2, 0, 0.5), (0, 2, 0.25), (1, 1, -2.0)],
        )
        .unwrap();
        assert_eq!(m.get(0, 2), 0.75);
        assert_eq!(m.get(2, 0), 0.75);
        assert_eq!(m.get(2, 2), 0.0);
        assert_eq!(m.nnz(), 4);
        let back = SparseSymmetricMatrix::parse_dump(&m.to_dump_string()).unwrap();
        assert_eq!(back, m);
        assert!(m.to_dump_string().starts_with("3\n"));
    }

    #[test]
    fn matvec_matches_dense() {
        let m = SparseSymmetricMatrix::from_triplets(
            3,
            &[(0, 0, 1.0), (1, 0, 0.3), (2, 1, -0.7), (2, 2, 4.0)],
        )
        .unwrap();
        let x = [0.5, -1.0, 2.0];
        let mut y = [0.0; 3];
        m.apply(&x, &mut y);
        let d = m.to_dense() * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert!((y[i] - d[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn bad_dump() {
        assert!(SparseSymmetricMatrix::parse_dump("").is_err());
        assert!(SparseSymmetricMatrix::parse_dump("2\n0 0\n").is_err());
        assert!(SparseSymmetricMatrix::parse_dump("2\n0 5 1.0\n").is_err());
    }
}

//! Subspace Hamiltonians and lowest-eigenpair solvers.

mod davidson;
mod sparse;

pub use davidson::{davidson, DavidsonOptions};
pub use sparse::{build_subspace_hamiltonian, SparseSymmetricMatrix};

use nalgebra::DMatrix;

use crate::determinants::{
    diagonal_element, for_each_connected, hf_reference, slater_condon_element, Determinant,
    DeterminantSpace,
};
use crate::error::{Error, Result};
use crate::hamsim::Sector;
use crate::integrals::IntegralSet;
use crate::linalg::sorted_symmetric_eigen;

/// Dimension up to which the dense eigensolver is used.
pub const DENSE_LIMIT: usize = 2000;

/// Two lowest eigenvalues closer than this are flagged as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Default cap on the full-CI sector dimension.
pub const DEFAULT_FULL_CI_BUDGET: usize = 2_000_000;

/// Real symmetric linear operator.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn diagonal(&self) -> Vec<f64>;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            m.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub energy: f64,
    /// Unit-norm eigenvector; the largest-magnitude component is positive.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl SpectrumResult {
    pub(crate) fn new(energy: f64, mut vector: Vec<f64>, residual: f64, iterations: usize) -> Self {
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        let pivot = vector
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let scale = if pivot < 0.0 { -1.0 } else { 1.0 } / norm;
        vector.iter_mut().for_each(|x| *x *= scale);
        SpectrumResult {
            energy,
            vector,
            residual,
            iterations,
        }
    }
}

fn residual(op: &dyn SymmetricOperator, energy: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    op.apply(v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(h, x)| (h - energy * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Lowest eigenpair by full diagonalization.
pub fn dense_ground_state(op: &dyn SymmetricOperator) -> Result<SpectrumResult> {
    if op.dim() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let m = op.to_dense();
    let (vals, vecs) = sorted_symmetric_eigen(&m);
    let v: Vec<f64> = vecs.column(0).iter().copied().collect();
    let r = residual(op, vals[0], &v);
    Ok(SpectrumResult::new(vals[0], v, r, 1))
}

/// Lowest eigenpair: dense for `dim ≤ DENSE_LIMIT`, otherwise Davidson
/// started from the unit vector on `start`.
pub fn ground_state(op: &dyn SymmetricOperator, start: usize) -> Result<SpectrumResult> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if start >= n {
        return Err(Error::DimensionMismatch(format!(
            "start index {start} outside dimension {n}"
        )));
    }
    if n <= DENSE_LIMIT {
        return dense_ground_state(op);
    }
    let mut e = vec![0.0; n];
    e[start] = 1.0;
    davidson(op, &e, &[], &DavidsonOptions::default())
}

/// Whether the second-lowest eigenvalue lies within
/// [`DEGENERACY_THRESHOLD`] of the ground energy.
pub fn is_degenerate(op: &dyn SymmetricOperator, ground: &SpectrumResult) -> Result<bool> {
    let n = op.dim();
    if n < 2 {
        return Ok(false);
    }
    let second = if n <= DENSE_LIMIT {
        sorted_symmetric_eigen(&op.to_dense()).0[1]
    } else {
        // deflate the ground state and start from the lowest other diagonal
        let diag = op.diagonal();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        let mut start = vec![0.0; n];
        for &i in order.iter().take(2) {
            start[i] = 1.0;
        }
        davidson(
            op,
            &start,
            std::slice::from_ref(&ground.vector),
            &DavidsonOptions::default(),
        )?
        .energy
    };
    Ok(second - ground.energy < DEGENERACY_THRESHOLD)
}

/// Ground state of the Hamiltonian over a determinant space, started from
/// the Hartree-Fock determinant when it is present.
pub fn subspace_ground_state(
    space: &DeterminantSpace,
    ints: &IntegralSet,
) -> Result<SpectrumResult> {
    let h = build_subspace_hamiltonian(space, ints)?;
    let start = hf_reference(ints.n_alpha(), ints.n_beta(), ints.n_orb())
        .ok()
        .and_then(|hf| space.index_of(&hf))
        .unwrap_or_else(|| {
            let d = h.diagonal();
            (0..d.len())
                .min_by(|&a, &b| d[a].total_cmp(&d[b]))
                .unwrap_or(0)
        });
    ground_state(&h, start)
}

/// Full sector Hamiltonian applied on the fly from Slater-Condon connections.
pub struct FullCiOperator<'a> {
    ints: &'a IntegralSet,
    sector: std::sync::Arc<Sector>,
    diag: Vec<f64>,
}

impl<'a> FullCiOperator<'a> {
    pub fn new(ints: &'a IntegralSet, n_alpha: usize, n_beta: usize) -> Result<Self> {
        let sector = Sector::new(ints.n_orb(), n_alpha, n_beta)?;
        let diag = (0..sector.dim())
            .map(|i| diagonal_element(&sector.determinant(i), ints))
            .collect();
        Ok(FullCiOperator { ints, sector, diag })
    }

    pub fn determinant(&self, i: usize) -> Determinant {
        self.sector.determinant(i)
    }

    pub fn index(&self, d: &Determinant) -> Option<usize> {
        self.sector.index(d)
    }
}

impl SymmetricOperator for FullCiOperator<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_orb = self.ints.n_orb();
        for (i, yi) in y.iter_mut().enumerate() {
            let d = self.sector.determinant(i);
            let mut acc = self.diag[i] * x[i];
            for_each_connected(&d, n_orb, |e| {
                let j = self
                    .sector
                    .index(&e)
                    .expect("connected determinant in sector");
                if x[j] != 0.0 {
                    acc += slater_condon_element(&d, &e, self.ints) * x[j];
                }
            });
            *yi = acc;
        }
    }
}

/// Ground state over the complete `(n_alpha, n_beta)` sector.
pub fn full_ci(ints: &IntegralSet, n_alpha: usize, n_beta: usize) -> Result<SpectrumResult> {
    full_ci_with_budget(ints, n_alpha, n_beta, DEFAULT_FULL_CI_BUDGET)
}

pub fn full_ci_with_budget(
    ints: &IntegralSet,
    n_alpha: usize,
    n_beta: usize,
    budget: usize,
) -> Result<SpectrumResult> {
    let m = ints.n_orb();
    if n_alpha > m || n_beta > m {
        return Err(Error::TooManyElectrons {
            n_electrons: n_alpha.max(n_beta),
            n_orbitals: m,
        });
    }
    let dimension = binomial(m, n_alpha) * binomial(m, n_beta);
    if dimension > budget {
        return Err(Error::BudgetExceeded { dimension, budget });
    }
    let op = FullCiOperator::new(ints, n_alpha, n_beta)?;
    let hf = hf_reference(n_alpha, n_beta, m)?;
    ground_state(&op, op.index(&hf).unwrap_or(0))
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> SparseSymmetricMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + (i as f64) * 0.01));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
        }
        SparseSymmetricMatrix::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn one_by_one() {
        let m = SparseSymmetricMatrix::from_triplets(1, &[(0, 0, -3.5)]).unwrap();
        let r = ground_state(&m, 0).unwrap();
        assert_eq!(r.energy, -3.5);
        assert_eq!(r.vector, vec![1.0]);
    }

    #[test]
    fn davidson_matches_dense() {
        let m = tridiagonal(400);
        let dense = dense_ground_state(&m).unwrap();
        let mut start = vec![0.0; 400];
        start[0] = 1.0;
        let dav = davidson(&m, &start, &[], &DavidsonOptions::default()).unwrap();
        assert!((dense.energy - dav.energy).abs() < 1e-9);
        assert!(dav.residual < 1e-9);
        let overlap: f64 = dense
            .vector
            .iter()
            .zip(&dav.vector)
            .map(|(a, b)| a * b)
            .sum();
        assert!((overlap.abs() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn degeneracy_probe() {
        let m = SparseSymmetricMatrix::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 2.0)])
            .unwrap();
        let g = ground_state(&m, 0).unwrap();
        assert!(is_degenerate(&m, &g).unwrap());
        let m = tridiagonal(10);
        let g = ground_state(&m, 0).unwrap();
        assert!(!is_degenerate(&m, &g).unwrap());
    }

    #[test]
    fn zero_hamiltonian_full_ci_is_core_energy() {
        let ints = IntegralSet::zeros(3, 1, 1, -1.25).unwrap();
        let r = full_ci(&ints, 1, 1).unwrap();
        assert!((r.energy + 1.25).abs() < 1e-14);
        assert!(matches!(
            full_ci_with_budget(&ints, 1, 1, 8),
            Err(Error::BudgetExceeded { dimension: 9, .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 8), 45);
        assert_eq!(binomial(11, 8), 165);
        assert_eq!(binomial(4, 5), 0);
    }
}

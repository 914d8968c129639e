//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use scqsci::cidiag::{FullCiOperator, SymmetricOperator};
use scqsci::determinants::{
    diagonal_element, for_each_connected, hf_reference, slater_condon_element,
};
use scqsci::hamsim::{jordan_wigner, Sector, Statevector};
use scqsci::integrals::{Geometry, IntegralSet};
use scqsci::workflow::{load_system, DimerInputs, IntegralSource};

pub fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(rel)
}

/// Canonical RHF integrals of a hydrogen cluster.
pub fn hydrogen(geom: Geometry) -> IntegralSet {
    load_system(&IntegralSource::Hydrogen(geom))
        .unwrap()
        .integrals
}

pub fn h4() -> IntegralSet {
    hydrogen(Geometry::h4_square(2.0, [0.0; 3]))
}

/// Checked-in FCIDUMP set `tests/data/fh/<name>`.
pub fn fh_inputs(name: &str) -> DimerInputs {
    let file = |f: &str| data(&format!("fh/{name}/{f}"));
    DimerInputs {
        dimer: IntegralSource::Fcidump(file("dimer.fcidump")),
        monomer_a: Some(IntegralSource::Fcidump(file("monomer_a.fcidump"))),
        monomer_b: Some(IntegralSource::Fcidump(file("monomer_b.fcidump"))),
        orbital_map: Some(file("orbital_map.txt")),
        far_dimer: None,
    }
}

/// Dense sector Hamiltonian assembled row by row from connected determinants.
pub fn dense_sector(op: &FullCiOperator<'_>, ints: &IntegralSet) -> DMatrix<f64> {
    let n = op.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = op.determinant(i);
        m[(i, i)] = diagonal_element(&d, ints);
        for_each_connected(&d, ints.n_orb(), |e| {
            m[(i, op.index(&e).unwrap())] = slater_condon_element(&d, &e, ints);
        });
    }
    m
}

/// Exact propagator restricted to the sector, in the qubit basis.
pub struct ExactOracle {
    qubits: Vec<usize>,
    vals: DVector<f64>,
    vecs: DMatrix<f64>,
}

impl ExactOracle {
    pub fn new(ints: &IntegralSet) -> Self {
        let dense = jordan_wigner(ints).unwrap().dense_matrix().unwrap();
        let sector = Sector::new(ints.n_orb(), ints.n_alpha(), ints.n_beta()).unwrap();
        let qubits: Vec<usize> = (0..sector.dim())
            .map(|i| sector.determinant(i).to_qubits() as usize)
            .collect();
        let n = qubits.len();
        let h = DMatrix::from_fn(n, n, |i, j| {
            let v = dense[(qubits[i], qubits[j])];
            assert!(v.im.abs() < 1e-12);
            v.re
        });
        let eig = h.symmetric_eigen();
        ExactOracle {
            qubits,
            vals: eig.eigenvalues,
            vecs: eig.eigenvectors,
        }
    }

    /// `e^{−iHt} ψ₀` on the full register.
    pub fn evolve(&self, psi0: &[Complex64], t: f64) -> Vec<Complex64> {
        let n = self.qubits.len();
        let local: Vec<Complex64> = self.qubits.iter().map(|&q| psi0[q]).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); psi0.len()];
        for k in 0..n {
            let overlap: Complex64 = (0..n).map(|i| local[i] * self.vecs[(i, k)]).sum();
            let phase = Complex64::from_polar(1.0, -self.vals[k] * t) * overlap;
            for i in 0..n {
                out[self.qubits[i]] += phase * self.vecs[(i, k)];
            }
        }
        out
    }
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn hf_state(ints: &IntegralSet) -> Statevector {
    let sector = Sector::new(ints.n_orb(), ints.n_alpha(), ints.n_beta()).unwrap();
    let hf = hf_reference(ints.n_alpha(), ints.n_beta(), ints.n_orb()).unwrap();
    Statevector::basis(sector, &hf).unwrap()
}

/// Pearson chi-square p-value of sampled counts against `probs`, pooling
/// bins expected below 5 counts. `None` if fewer than five bins remain.
pub fn chi_square_p(probs: &[f64], counts: &[usize], shots: usize) -> Option<f64> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut rest_obs, mut rest_exp) = (0.0, 0.0);
    for (p, &c) in probs.iter().zip(counts) {
        let expected = p * shots as f64;
        if expected < 5.0 {
            rest_obs += c as f64;
            rest_exp += expected;
        } else {
            stat += (c as f64 - expected).powi(2) / expected;
            bins += 1;
        }
    }
    if rest_exp >= 5.0 {
        stat += (rest_obs - rest_exp).powi(2) / rest_exp;
        bins += 1;
    } else if rest_obs > 5.0 + 10.0 * rest_exp {
        return Some(0.0);
    }
    if bins < 5 {
        return None;
    }
    Some(1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat))
}

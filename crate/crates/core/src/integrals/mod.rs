//! Second-quantized Hamiltonian data.
//!
//! Integrals are either computed in-repo for hydrogen clusters (STO-3G,
//! restricted Hartree-Fock, block-localized dimer orbitals) or read from
//! FCIDUMP files produced by external quantum-chemistry packages.

mod fcidump;
mod geometry;
mod localize;
mod partition;
mod rhf;
mod sto3g;
mod transform;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump, write_fcidump_string};
pub use geometry::{Atom, Geometry, ANGSTROM_PER_BOHR};
pub use localize::{localize_block_rhf, LocalizedOrbitals, DEFAULT_OVERLAP_THRESHOLD};
pub use partition::{Fragment, OrbitalPartition};
pub use rhf::{run_rhf, run_rhf_with, RhfOptions, RhfSolution};
pub use sto3g::{
    boys_f0, compute_sto3g_integrals, sto3g_basis, AoIntegrals, ContractedS, STO3G_H_COEFFICIENTS,
    STO3G_H_EXPONENTS,
};
pub use transform::transform_to_mo;

use crate::error::{Error, Result};

/// One- and two-electron integrals over `n_orb` real orthonormal orbitals.
///
/// `g` is stored densely in chemist notation, `g[p][q][r][s] = (pq|rs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    e_core: f64,
    h: Vec<f64>,
    g: Vec<f64>,
}

const SYMMETRY_TOLERANCE: f64 = 1e-12;

impl IntegralSet {
    /// Validates shapes, electron counts and permutational symmetry.
    pub fn new(
        n_orb: usize,
        n_alpha: usize,
        n_beta: usize,
        e_core: f64,
        h: Vec<f64>,
        g: Vec<f64>,
    ) -> Result<Self> {
        if n_orb == 0 {
            return Err(Error::DimensionMismatch(
                "at least one orbital is required".into(),
            ));
        }
        if h.len() != n_orb * n_orb || g.len() != n_orb.pow(4) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} one-electron and {} two-electron values for {n_orb} orbitals, got {} and {}",
                n_orb * n_orb,
                n_orb.pow(4),
                h.len(),
                g.len()
            )));
        }
        if n_alpha > n_orb || n_beta > n_orb {
            return Err(Error::TooManyElectrons {
                n_electrons: n_alpha.max(n_beta),
                n_orbitals: n_orb,
            });
        }
        let ints = IntegralSet {
            n_orb,
            n_alpha,
            n_beta,
            e_core,
            h,
            g,
        };
        let violation = ints.symmetry_violation();
        if violation.is_nan() || violation > SYMMETRY_TOLERANCE {
            return Err(Error::DimensionMismatch(format!(
                "integrals violate permutational symmetry by {violation:.3e}"
            )));
        }
        Ok(ints)
    }

    /// A Hamiltonian whose only content is the constant `e_core`.
    pub fn zeros(n_orb: usize, n_alpha: usize, n_beta: usize, e_core: f64) -> Result<Self> {
        Self::new(
            n_orb,
            n_alpha,
            n_beta,
            e_core,
            vec![0.0; n_orb * n_orb],
            vec![0.0; n_orb.pow(4)],
        )
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_orb + q]
    }

    #[inline]
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orb;
        self.g[((p * n + q) * n + r) * n + s]
    }

    pub fn h_slice(&self) -> &[f64] {
        &self.h
    }

    pub fn g_slice(&self) -> &[f64] {
        &self.g
    }

    /// Same integrals with different electron counts (e.g. a monomer sector).
    pub fn with_electrons(&self, n_alpha: usize, n_beta: usize) -> Result<Self> {
        Self::new(
            self.n_orb,
            n_alpha,
            n_beta,
            self.e_core,
            self.h.clone(),
            self.g.clone(),
        )
    }

    /// Largest deviation from `h = hᵀ` and the 8-fold symmetry of `g`.
    pub fn symmetry_violation(&self) -> f64 {
        let n = self.n_orb;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                worst = worst.max((self.h(p, q) - self.h(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        for w in [self.g(q, p, r, s), self.g(p, q, s, r), self.g(r, s, p, q)] {
                            let d = (v - w).abs();
                            if d.is_nan() {
                                return f64::NAN;
                            }
                            worst = worst.max(d);
                        }
                    }
                }
            }
        }
        worst
    }

    pub(crate) fn from_parts_unchecked(
        n_orb: usize,
        n_alpha: usize,
        n_beta: usize,
        e_core: f64,
        h: Vec<f64>,
        g: Vec<f64>,
    ) -> Self {
        IntegralSet {
            n_orb,
            n_alpha,
            n_beta,
            e_core,
            h,
            g,
        }
    }
}

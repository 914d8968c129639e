//! Size-consistent quantum-selected configuration interaction driven by
//! simulated Hamiltonian dynamics.
//!
//! The pipeline samples Slater determinants from Trotterized real-time
//! evolution of the Hartree-Fock state of a dimer, routes each sample either
//! into per-monomer subspaces (intra-monomer excitations) or into a dimer-only
//! charge-transfer set, and diagonalizes the monomer subspaces and the full
//! product dimer subspace. The product construction makes the dimer energy
//! exactly additive for non-interacting monomers.

pub mod cidiag;
pub mod determinants;
pub mod error;
pub mod hamsim;
pub mod integrals;
pub(crate) mod linalg;
pub mod subspace;
pub mod workflow;

pub use error::{Error, Result};

//! Jordan-Wigner encoding, Trotterized real-time evolution and shot sampling.
//!
//! Qubit `2p` is orbital `p` with α spin, qubit `2p + 1` the β spin orbital;
//! bitstrings are little-endian (qubit 0 is the first character).
//!
//! The Hamiltonian is grouped into number-conserving Hermitian generators
//! (number terms, number pairs, hoppings with number dependence, double
//! excitations). Each generator is a sum of mutually commuting Pauli strings,
//! so its exponential is applied exactly, and the particle sector of the
//! state never leaks.

mod jw;
mod sampling;
mod state;
mod trotter;

pub use jw::{
    jordan_wigner, jordan_wigner_with_limit, Generator, PauliString, PauliTerm, QubitHamiltonian,
    DEFAULT_MAX_QUBITS,
};
pub use sampling::{sample, SamplePool};
pub use state::{Sector, Statevector};
pub use trotter::{build_first_order_schedule, build_trotter_schedule, evolve, TrotterSchedule};

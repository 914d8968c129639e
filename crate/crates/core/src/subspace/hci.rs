use std::collections::BTreeSet;

use crate::cidiag::{subspace_ground_state, SpectrumResult};
use crate::determinants::{
    for_each_connected, hf_reference, slater_condon_element, Determinant, DeterminantSpace,
};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

#[derive(Debug, Clone)]
pub struct HciResult {
    pub space: DeterminantSpace,
    pub ground: SpectrumResult,
    pub rounds: usize,
}

/// Variational heat-bath selection: starting from the Hartree-Fock
/// determinant, repeatedly add every connected determinant `a` with
/// `max_i |H_ai c_i| ≥ eps` and re-diagonalize until nothing is added.
pub fn hci_select(ints: &IntegralSet, eps: f64) -> Result<HciResult> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidThreshold(eps));
    }
    let hf = hf_reference(ints.n_alpha(), ints.n_beta(), ints.n_orb())?;
    let mut space: DeterminantSpace = std::iter::once(hf).collect();
    let mut rounds = 0;
    loop {
        let ground = subspace_ground_state(&space, ints)?;
        rounds += 1;
        let mut added: BTreeSet<Determinant> = BTreeSet::new();
        for (d, &c) in space.iter().zip(&ground.vector) {
            if c.abs() * max_coupling_bound(ints) < eps {
                continue;
            }
            for_each_connected(d, ints.n_orb(), |a| {
                if !space.contains(&a)
                    && !added.contains(&a)
                    && (slater_condon_element(&a, d, ints) * c).abs() >= eps
                {
                    added.insert(a);
                }
            });
        }
        if added.is_empty() {
            return Ok(HciResult {
                space,
                ground,
                rounds,
            });
        }
        space = space.iter().copied().chain(added).collect();
    }
}

/// Loose upper bound on any off-diagonal element, used to skip small
/// coefficients early.
fn max_coupling_bound(ints: &IntegralSet) -> f64 {
    let n = ints.n_orb();
    let hmax = ints.h_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gmax = ints.g_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    hmax + 2.0 * n as f64 * gmax * 2.0 + 2.0 * gmax
}

use nalgebra::DMatrix;

use super::{sto3g_basis, Fragment, Geometry, OrbitalPartition, RhfSolution};
use crate::error::{Error, Result};
use crate::linalg::inverse_sqrt;

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 1e-6;

/// Minimum Mulliken weight of every localized orbital on its home fragment.
const LOCALITY: f64 = 0.9999;

#[derive(Debug, Clone)]
pub struct LocalizedOrbitals {
    /// Dimer MO coefficients. Columns: occupied orbitals of each fragment in
    /// fragment order, then virtual orbitals of each fragment.
    pub coefficients: DMatrix<f64>,
    /// Present for two-fragment systems.
    pub partition: Option<OrbitalPartition>,
    /// Largest elementwise change made by the symmetric re-orthonormalization.
    pub max_reorthonormalization_change: f64,
}

/// Direct sum of per-fragment RHF orbitals, Löwdin-orthonormalized against
/// the dimer overlap.
///
/// `fragments[f]` must be the RHF solution of `dimer.fragment(f)`. Only valid
/// for non-interacting fragments: refuses when any inter-fragment AO overlap
/// exceeds `threshold`.
pub fn localize_block_rhf(
    dimer: &Geometry,
    overlap: &DMatrix<f64>,
    fragments: &[RhfSolution],
    threshold: f64,
) -> Result<LocalizedOrbitals> {
    let basis = sto3g_basis(dimer)?;
    let n_ao = basis.len();
    if overlap.nrows() != n_ao || overlap.ncols() != n_ao {
        return Err(Error::DimensionMismatch(format!(
            "overlap is {}x{} for {n_ao} basis functions",
            overlap.nrows(),
            overlap.ncols()
        )));
    }
    let n_frag = dimer.n_fragments();
    if fragments.len() != n_frag {
        return Err(Error::DimensionMismatch(format!(
            "{} fragment solutions for {n_frag} fragments",
            fragments.len()
        )));
    }
    let ao_fragment: Vec<usize> = basis
        .iter()
        .map(|b| dimer.atoms()[b.atom].fragment)
        .collect();
    let fragment_aos: Vec<Vec<usize>> = (0..n_frag)
        .map(|f| (0..n_ao).filter(|&mu| ao_fragment[mu] == f).collect())
        .collect();

    let mut worst: f64 = 0.0;
    for mu in 0..n_ao {
        for nu in 0..mu {
            if ao_fragment[mu] != ao_fragment[nu] {
                worst = worst.max(overlap[(mu, nu)].abs());
            }
        }
    }
    if worst > threshold {
        return Err(Error::FragmentsOverlap {
            overlap: worst,
            threshold,
        });
    }

    for (f, sol) in fragments.iter().enumerate() {
        if sol.coefficients.nrows() != fragment_aos[f].len() {
            return Err(Error::DimensionMismatch(format!(
                "fragment {f} solution has {} basis functions, geometry has {}",
                sol.coefficients.nrows(),
                fragment_aos[f].len()
            )));
        }
    }

    let n_mo: usize = fragments.iter().map(|s| s.coefficients.ncols()).sum();
    let mut c = DMatrix::zeros(n_ao, n_mo);
    let mut home = Vec::with_capacity(n_mo);
    let mut col = 0;
    for occupied in [true, false] {
        for (f, sol) in fragments.iter().enumerate() {
            let range = if occupied {
                0..sol.n_occ
            } else {
                sol.n_occ..sol.coefficients.ncols()
            };
            for k in range {
                for (local, &mu) in fragment_aos[f].iter().enumerate() {
                    c[(mu, col)] = sol.coefficients[(local, k)];
                }
                home.push((f, k));
                col += 1;
            }
        }
    }

    let metric = c.transpose() * overlap * &c;
    let c_orth = &c * inverse_sqrt(&metric);
    let change = (&c_orth - &c).abs().max();

    let sc = overlap * &c_orth;
    for (k, &(f, _)) in home.iter().enumerate() {
        let weight: f64 = fragment_aos[f]
            .iter()
            .map(|&mu| c_orth[(mu, k)] * sc[(mu, k)])
            .sum();
        if weight < LOCALITY {
            return Err(Error::FragmentsOverlap {
                overlap: 1.0 - weight,
                threshold: 1.0 - LOCALITY,
            });
        }
    }

    let partition = if n_frag == 2 {
        let assignment = home
            .iter()
            .map(|&(f, k)| (Fragment::from_index(f).unwrap(), k))
            .collect();
        Some(OrbitalPartition::new(
            assignment,
            [
                (fragments[0].n_occ, fragments[0].n_occ),
                (fragments[1].n_occ, fragments[1].n_occ),
            ],
        )?)
    } else {
        None
    };

    Ok(LocalizedOrbitals {
        coefficients: c_orth,
        partition,
        max_reorthonormalization_change: change,
    })
}

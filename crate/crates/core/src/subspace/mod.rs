//! Determinant subspaces built from samples.
//!
//! The size-consistent construction splits every intra-monomer sample into
//! its two fragment configurations, completes each monomer set over spin
//! recouplings, and rebuilds the dimer space as the full product of the
//! monomer sets plus the charge-transfer samples.

mod hci;

pub use hci::{hci_select, HciResult};

use crate::determinants::{bits, hf_reference, symmetry_complete, Determinant, DeterminantSpace};
use crate::error::{Error, Result};
use crate::hamsim::SamplePool;
use crate::integrals::{Fragment, OrbitalPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleClass {
    IntraMonomer,
    ChargeTransfer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedSample {
    pub determinant: Determinant,
    pub class: SampleClass,
    /// `(n_alpha, n_beta)` on fragments A and B.
    pub counts: [(usize, usize); 2],
}

/// Intra-monomer iff every fragment holds its reference `(n_alpha, n_beta)`.
pub fn classify(d: &Determinant, part: &OrbitalPartition) -> ClassifiedSample {
    let counts = Fragment::ALL.map(|f| {
        let m = part.mask(f);
        (
            (d.alpha & m).count_ones() as usize,
            (d.beta & m).count_ones() as usize,
        )
    });
    let intra = Fragment::ALL
        .iter()
        .all(|&f| counts[f.index()] == part.ref_counts(f));
    ClassifiedSample {
        determinant: *d,
        class: if intra {
            SampleClass::IntraMonomer
        } else {
            SampleClass::ChargeTransfer
        },
        counts,
    }
}

fn to_local(mask: u64, part: &OrbitalPartition, f: Fragment) -> u64 {
    part.fragment_orbitals(f)
        .iter()
        .enumerate()
        .filter(|&(_, &p)| mask >> p & 1 == 1)
        .fold(0, |m, (local, _)| m | 1 << local)
}

fn to_dimer(mask: u64, part: &OrbitalPartition, f: Fragment) -> u64 {
    let orbitals = part.fragment_orbitals(f);
    bits(mask).fold(0, |m, local| m | 1 << orbitals[local])
}

/// Fragment-local determinants of an intra-monomer dimer determinant.
pub fn split(d: &Determinant, part: &OrbitalPartition) -> Result<(Determinant, Determinant)> {
    let c = classify(d, part);
    if c.class != SampleClass::IntraMonomer {
        return Err(Error::NotIntraMonomer(format!(
            "{} has fragment populations {:?}, reference {:?}",
            d.to_text(part.n_orb()),
            c.counts,
            [part.ref_counts(Fragment::A), part.ref_counts(Fragment::B)]
        )));
    }
    let local = |f| Determinant::new(to_local(d.alpha, part, f), to_local(d.beta, part, f));
    Ok((local(Fragment::A), local(Fragment::B)))
}

/// Inverse of [`split`].
pub fn join(a: &Determinant, b: &Determinant, part: &OrbitalPartition) -> Determinant {
    Determinant::new(
        to_dimer(a.alpha, part, Fragment::A) | to_dimer(b.alpha, part, Fragment::B),
        to_dimer(a.beta, part, Fragment::A) | to_dimer(b.beta, part, Fragment::B),
    )
}

/// Hartree-Fock reference of fragment `f` in its local orbital order.
pub fn fragment_reference(part: &OrbitalPartition, f: Fragment) -> Result<Determinant> {
    let (na, nb) = part.ref_counts(f);
    hf_reference(na, nb, part.n_fragment_orbitals(f))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScSubspaces {
    /// Monomer spaces in fragment-local orbital indexing.
    pub s_a: DeterminantSpace,
    pub s_b: DeterminantSpace,
    /// Charge-transfer determinants in dimer indexing.
    pub ct: DeterminantSpace,
    /// Distinct sampled determinants of each class.
    pub intra_sampled: usize,
    pub ct_sampled: usize,
}

/// Size-consistent monomer and charge-transfer sets from all samples in
/// the pool. The fragment references are always included.
pub fn build_sc_subspaces(pool: &SamplePool, part: &OrbitalPartition) -> Result<ScSubspaces> {
    if pool.n_orb != part.n_orb() || (pool.n_alpha, pool.n_beta) != part.total_counts() {
        return Err(Error::MixedSectors(format!(
            "pool has {} orbitals in sector ({}, {}), partition has {} orbitals in {:?}",
            pool.n_orb,
            pool.n_alpha,
            pool.n_beta,
            part.n_orb(),
            part.total_counts()
        )));
    }
    sc_subspaces_from(&pool.distinct(), part)
}

/// Same construction from an arbitrary set of dimer determinants.
pub fn sc_subspaces_from(dets: &[Determinant], part: &OrbitalPartition) -> Result<ScSubspaces> {
    let mut a = vec![fragment_reference(part, Fragment::A)?];
    let mut b = vec![fragment_reference(part, Fragment::B)?];
    let mut ct = Vec::new();
    let (mut intra_sampled, mut ct_sampled) = (0, 0);
    let mut distinct = dets.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for d in &distinct {
        if (d.n_alpha(), d.n_beta()) != part.total_counts() {
            return Err(Error::MixedSectors(format!(
                "{} is outside the dimer sector {:?}",
                d.to_text(part.n_orb()),
                part.total_counts()
            )));
        }
        match classify(d, part).class {
            SampleClass::IntraMonomer => {
                intra_sampled += 1;
                let (da, db) = split(d, part)?;
                a.push(da);
                b.push(db);
            }
            SampleClass::ChargeTransfer => {
                ct_sampled += 1;
                ct.push(*d);
            }
        }
    }
    Ok(ScSubspaces {
        s_a: symmetry_complete(&a.into_iter().collect())?,
        s_b: symmetry_complete(&b.into_iter().collect())?,
        ct: ct.into_iter().collect(),
        intra_sampled,
        ct_sampled,
    })
}

/// `symmetry_complete({join(a, b) : a ∈ S_A, b ∈ S_B} ∪ CT)`.
pub fn assemble_dimer_space(sc: &ScSubspaces, part: &OrbitalPartition) -> Result<DeterminantSpace> {
    let mut all = Vec::with_capacity(sc.s_a.len() * sc.s_b.len() + sc.ct.len());
    for a in &sc.s_a {
        for b in &sc.s_b {
            all.push(join(a, b, part));
        }
    }
    all.extend(sc.ct.iter().copied());
    symmetry_complete(&all.into_iter().collect())
}

/// Conventional construction: symmetry-completed distinct samples plus the
/// Hartree-Fock reference.
pub fn build_org_subspace(pool: &SamplePool) -> Result<DeterminantSpace> {
    let hf = hf_reference(pool.n_alpha, pool.n_beta, pool.n_orb)?;
    let mut dets = pool.distinct();
    dets.push(hf);
    symmetry_complete(&dets.into_iter().collect())
}

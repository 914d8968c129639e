use std::collections::{BTreeSet, HashMap};

use super::{bits, Determinant};
use crate::error::{Error, Result};

/// Ordered set of unique determinants, sorted by `(alpha, beta)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeterminantSpace {
    dets: Vec<Determinant>,
    index: HashMap<Determinant, usize>,
}

impl FromIterator<Determinant> for DeterminantSpace {
    fn from_iter<I: IntoIterator<Item = Determinant>>(iter: I) -> Self {
        let set: BTreeSet<Determinant> = iter.into_iter().collect();
        let dets: Vec<Determinant> = set.into_iter().collect();
        let index = dets.iter().enumerate().map(|(i, d)| (*d, i)).collect();
        DeterminantSpace { dets, index }
    }
}

impl DeterminantSpace {
    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Determinant> {
        self.dets.iter()
    }

    pub fn dets(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn get(&self, i: usize) -> Determinant {
        self.dets[i]
    }

    pub fn index_of(&self, d: &Determinant) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn contains(&self, d: &Determinant) -> bool {
        self.index.contains_key(d)
    }

    pub fn is_subset_of(&self, other: &DeterminantSpace) -> bool {
        self.dets.iter().all(|d| other.contains(d))
    }

    pub fn union(&self, other: &DeterminantSpace) -> DeterminantSpace {
        self.iter().chain(other.iter()).copied().collect()
    }

    /// The common `(n_alpha, n_beta)`, or an error if determinants disagree.
    /// `None` for an empty space.
    pub fn sector(&self) -> Result<Option<(usize, usize)>> {
        let mut it = self.dets.iter();
        let Some(first) = it.next() else {
            return Ok(None);
        };
        let s = first.sector();
        for d in it {
            if d.sector() != s {
                return Err(Error::MixedSectors(format!(
                    "{} has {:?}, {} has {:?}",
                    first,
                    s,
                    d,
                    d.sector()
                )));
            }
        }
        Ok(Some(s))
    }
}

impl<'a> IntoIterator for &'a DeterminantSpace {
    type Item = &'a Determinant;
    type IntoIter = std::slice::Iter<'a, Determinant>;

    fn into_iter(self) -> Self::IntoIter {
        self.dets.iter()
    }
}

/// Adds every spin recoupling of each determinant: same doubly occupied
/// orbitals, same singly occupied orbitals, all placements of the same
/// number of α and β electrons on the singly occupied ones.
pub fn symmetry_complete(space: &DeterminantSpace) -> Result<DeterminantSpace> {
    space.sector()?;
    let mut out: BTreeSet<Determinant> = BTreeSet::new();
    for d in space {
        if out.contains(d) {
            continue;
        }
        let doubly = d.alpha & d.beta;
        let singly = d.alpha ^ d.beta;
        let n_open_alpha = (d.alpha & !d.beta).count_ones() as usize;
        let open: Vec<usize> = bits(singly).collect();
        for_each_subset(open.len(), n_open_alpha, |sel| {
            let alpha_open = bits(sel).fold(0u64, |m, k| m | (1 << open[k]));
            out.insert(Determinant::new(
                doubly | alpha_open,
                doubly | (singly & !alpha_open),
            ));
        });
    }
    Ok(out.into_iter().collect())
}

/// Visits every `k`-subset of `0..n` as a bitmask (Gosper's hack).
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let mut s: u64 = (1u64 << k) - 1;
    let limit = 1u64 << n;
    while s < limit {
        f(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

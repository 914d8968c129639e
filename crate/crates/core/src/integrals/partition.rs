use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Fragment {
    A,
    B,
}

impl Fragment {
    pub const ALL: [Fragment; 2] = [Fragment::A, Fragment::B];

    pub fn index(self) -> usize {
        match self {
            Fragment::A => 0,
            Fragment::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Fragment> {
        match i {
            0 => Some(Fragment::A),
            1 => Some(Fragment::B),
            _ => None,
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::A => "A",
            Fragment::B => "B",
        })
    }
}

impl FromStr for Fragment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "0" => Ok(Fragment::A),
            "B" | "b" | "1" => Ok(Fragment::B),
            _ => Err(Error::InvalidPartition(format!("unknown fragment `{s}`"))),
        }
    }
}

/// Assignment of every dimer orbital to a fragment-local orbital, plus the
/// per-fragment `(n_alpha, n_beta)` of the Hartree-Fock reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalPartition {
    assignment: Vec<(Fragment, usize)>,
    fragment_orbitals: [Vec<usize>; 2],
    ref_counts: [(usize, usize); 2],
}

impl OrbitalPartition {
    /// `assignment[p]` is the fragment and fragment-local index of dimer
    /// orbital `p`. Local indices of each fragment must cover `0..n_F` exactly.
    pub fn new(
        assignment: Vec<(Fragment, usize)>,
        ref_counts: [(usize, usize); 2],
    ) -> Result<Self> {
        if assignment.len() > 64 {
            return Err(Error::InvalidPartition(
                "at most 64 orbitals are supported".into(),
            ));
        }
        let mut fragment_orbitals: [Vec<Option<usize>>; 2] = [Vec::new(), Vec::new()];
        for (p, &(f, local)) in assignment.iter().enumerate() {
            let slots = &mut fragment_orbitals[f.index()];
            if slots.len() <= local {
                slots.resize(local + 1, None);
            }
            if let Some(prev) = slots[local] {
                return Err(Error::InvalidPartition(format!(
                    "dimer orbitals {prev} and {p} both map to {f}{local}"
                )));
            }
            slots[local] = Some(p);
        }
        let mut resolved: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for f in Fragment::ALL {
            for (local, slot) in fragment_orbitals[f.index()].iter().enumerate() {
                match slot {
                    Some(p) => resolved[f.index()].push(*p),
                    None => {
                        return Err(Error::InvalidPartition(format!(
                            "fragment orbital {f}{local} has no dimer orbital"
                        )))
                    }
                }
            }
            let n = resolved[f.index()].len();
            let (na, nb) = ref_counts[f.index()];
            if na > n || nb > n {
                return Err(Error::InvalidPartition(format!(
                    "fragment {f} reference ({na}, {nb}) does not fit in {n} orbitals"
                )));
            }
        }
        Ok(OrbitalPartition {
            assignment,
            fragment_orbitals: resolved,
            ref_counts,
        })
    }

    /// Parses the `dimer_orbital fragment fragment_orbital` table (0-based).
    pub fn parse_table(text: &str, ref_counts: [(usize, usize); 2]) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || {
                Error::InvalidPartition(format!(
                    "line {}: expected `dimer_orbital fragment fragment_orbital`",
                    lineno + 1
                ))
            };
            if f.len() != 3 {
                return Err(bad());
            }
            let p: usize = f[0].parse().map_err(|_| bad())?;
            let frag: Fragment = f[1].parse()?;
            let local: usize = f[2].parse().map_err(|_| bad())?;
            rows.push((p, frag, local));
        }
        rows.sort();
        for (expected, &(p, _, _)) in rows.iter().enumerate() {
            if p != expected {
                return Err(Error::InvalidPartition(format!(
                    "dimer orbitals must be listed exactly once from 0; found {p} at position {expected}"
                )));
            }
        }
        Self::new(
            rows.into_iter().map(|(_, f, l)| (f, l)).collect(),
            ref_counts,
        )
    }

    pub fn to_table(&self) -> String {
        self.assignment
            .iter()
            .enumerate()
            .map(|(p, (f, l))| format!("{p} {f} {l}\n"))
            .collect()
    }

    /// Orbitals `0..n_a` on A followed by `0..n_b` on B.
    pub fn contiguous(n_a: usize, n_b: usize, ref_counts: [(usize, usize); 2]) -> Result<Self> {
        let assignment = (0..n_a)
            .map(|l| (Fragment::A, l))
            .chain((0..n_b).map(|l| (Fragment::B, l)))
            .collect();
        Self::new(assignment, ref_counts)
    }

    pub fn n_orb(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self, p: usize) -> (Fragment, usize) {
        self.assignment[p]
    }

    /// Dimer orbital indices of a fragment, in fragment-local order.
    pub fn fragment_orbitals(&self, f: Fragment) -> &[usize] {
        &self.fragment_orbitals[f.index()]
    }

    pub fn n_fragment_orbitals(&self, f: Fragment) -> usize {
        self.fragment_orbitals[f.index()].len()
    }

    pub fn ref_counts(&self, f: Fragment) -> (usize, usize) {
        self.ref_counts[f.index()]
    }

    pub fn total_counts(&self) -> (usize, usize) {
        (
            self.ref_counts[0].0 + self.ref_counts[1].0,
            self.ref_counts[0].1 + self.ref_counts[1].1,
        )
    }

    /// Bitmask of dimer orbitals on a fragment.
    pub fn mask(&self, f: Fragment) -> u64 {
        self.fragment_orbitals(f)
            .iter()
            .fold(0u64, |m, &p| m | (1 << p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_roundtrip() {
        let p = OrbitalPartition::new(
            vec![
                (Fragment::A, 0),
                (Fragment::A, 1),
                (Fragment::B, 0),
                (Fragment::B, 1),
                (Fragment::A, 2),
                (Fragment::B, 2),
            ],
            [(2, 2), (2, 2)],
        )
        .unwrap();
        let back = OrbitalPartition::parse_table(&p.to_table(), [(2, 2), (2, 2)]).unwrap();
        assert_eq!(p, back);
        assert_eq!(p.fragment_orbitals(Fragment::B), &[2, 3, 5]);
        assert_eq!(p.mask(Fragment::A), 0b010011);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(
            OrbitalPartition::new(vec![(Fragment::A, 0), (Fragment::A, 0)], [(1, 1), (0, 0)])
                .is_err()
        );
        assert!(OrbitalPartition::new(vec![(Fragment::A, 1)], [(0, 0), (0, 0)]).is_err());
        assert!(OrbitalPartition::parse_table("0 A 0\n2 B 0\n", [(0, 0), (0, 0)]).is_err());
        assert!(OrbitalPartition::parse_table("0 C 0\n", [(0, 0), (0, 0)]).is_err());
        assert!(OrbitalPartition::contiguous(1, 1, [(2, 0), (0, 0)]).is_err());
    }
}

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_trotter_schedule, evolve, jordan_wigner, Sector, Statevector};
use crate::determinants::{hf_reference, Determinant};
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

/// Draws `shots` determinants i.i.d. from `|amplitude|²`.
///
/// Shot `i` uses words `[2i, 2i + 2)` of ChaCha stream `stream` seeded by
/// `seed`, so any split of the shot range over workers gives the same draws.
pub fn sample(state: &Statevector, shots: usize, seed: u64, stream: u64) -> Vec<Determinant> {
    sample_range(state, 0..shots, seed, stream)
}

pub(crate) fn sample_range(
    state: &Statevector,
    shots: std::ops::Range<usize>,
    seed: u64,
    stream: u64,
) -> Vec<Determinant> {
    let mut cdf = Vec::with_capacity(state.amplitudes().len());
    let mut acc = 0.0;
    for p in state.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * shots.start as u128);
    let sector = state.sector();
    shots
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            // first index whose cumulative weight exceeds u, skipping
            // zero-probability entries
            let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            let d = sector.determinant(i);
            debug_assert_eq!(d.sector(), (sector.n_alpha(), sector.n_beta()));
            d
        })
        .collect()
}

/// Per-evolution-time multisets of sampled determinants.
///
/// Entry `k` holds the samples drawn from the state at time `k Δt`. The
/// Hartree-Fock reference is not injected here; subspace builders add it.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool {
    pub system: String,
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub dt: f64,
    pub shots: usize,
    pub seed: u64,
    per_k: BTreeMap<usize, BTreeMap<Determinant, usize>>,
}

impl SamplePool {
    pub fn new(
        system: &str,
        n_orb: usize,
        n_alpha: usize,
        n_beta: usize,
        dt: f64,
        shots: usize,
        seed: u64,
    ) -> Self {
        SamplePool {
            system: system.to_string(),
            n_orb,
            n_alpha,
            n_beta,
            dt,
            shots,
            seed,
            per_k: BTreeMap::new(),
        }
    }

    /// Evolves the Hartree-Fock state with the second-order schedule and
    /// samples `shots` determinants at each of `k = 1..=k_max`.
    pub fn generate(
        system: &str,
        ints: &IntegralSet,
        dt: f64,
        k_max: usize,
        shots: usize,
        seed: u64,
    ) -> Result<SamplePool> {
        if shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        let h = jordan_wigner(ints)?;
        let schedule = build_trotter_schedule(&h, dt);
        let sector = Sector::new(ints.n_orb(), ints.n_alpha(), ints.n_beta())?;
        let hf = hf_reference(ints.n_alpha(), ints.n_beta(), ints.n_orb())?;
        let mut state = Statevector::basis(sector, &hf)?;
        let mut pool = SamplePool::new(
            system,
            ints.n_orb(),
            ints.n_alpha(),
            ints.n_beta(),
            dt,
            shots,
            seed,
        );
        for k in 1..=k_max {
            evolve(&mut state, &schedule, 1);
            pool.insert(k, &sample(&state, shots, seed, k as u64))?;
        }
        Ok(pool)
    }

    /// Adds the samples for evolution step `k`, replacing any existing entry.
    pub fn insert(&mut self, k: usize, samples: &[Determinant]) -> Result<()> {
        let mut counts = BTreeMap::new();
        for d in samples {
            self.check(d)?;
            *counts.entry(*d).or_insert(0) += 1;
        }
        self.per_k.insert(k, counts);
        Ok(())
    }

    fn check(&self, d: &Determinant) -> Result<()> {
        let full = crate::determinants::low_bits(self.n_orb);
        if d.sector() != (self.n_alpha, self.n_beta) || (d.alpha | d.beta) & !full != 0 {
            return Err(Error::MixedSectors(format!(
                "sample {} outside the ({}, {}) sector of {} orbitals",
                d.to_text(self.n_orb),
                self.n_alpha,
                self.n_beta,
                self.n_orb
            )));
        }
        Ok(())
    }

    pub fn k_values(&self) -> Vec<usize> {
        self.per_k.keys().copied().collect()
    }

    pub fn k_max(&self) -> usize {
        self.per_k.keys().next_back().copied().unwrap_or(0)
    }

    pub fn counts(&self, k: usize) -> Option<&BTreeMap<Determinant, usize>> {
        self.per_k.get(&k)
    }

    /// Pool restricted to `k ≤ k_max`.
    pub fn truncated(&self, k_max: usize) -> SamplePool {
        SamplePool {
            per_k: self
                .per_k
                .range(..=k_max)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            ..self.clone()
        }
    }

    /// Distinct determinants over all stored `k`, sorted.
    pub fn distinct(&self) -> Vec<Determinant> {
        let mut all: Vec<Determinant> = self
            .per_k
            .values()
            .flat_map(|m| m.keys().copied())
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("pool serializes")
    }

    pub fn from_json(text: &str) -> Result<SamplePool> {
        let f: PoolFile = serde_json::from_str(text)?;
        let mut pool = SamplePool::new(&f.system, f.m, f.n_alpha, f.n_beta, f.dt, f.shots, f.seed);
        for (k, entries) in f.per_k {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad evolution step `{k}`")))?;
            let mut counts = BTreeMap::new();
            let mut total = 0;
            for e in entries {
                if e.bits.len() != 2 * f.m {
                    return Err(Error::Parse(format!(
                        "bitstring `{}` has {} qubits, expected {}",
                        e.bits,
                        e.bits.len(),
                        2 * f.m
                    )));
                }
                let q = e
                    .bits
                    .chars()
                    .enumerate()
                    .try_fold(0u64, |m, (i, c)| match c {
                        '0' => Ok(m),
                        '1' => Ok(m | 1 << i),
                        _ => Err(Error::Parse(format!("bad bitstring `{}`", e.bits))),
                    })?;
                let d = Determinant::from_qubits(q);
                pool.check(&d)?;
                *counts.entry(d).or_insert(0) += e.count;
                total += e.count;
            }
            if total != f.shots {
                return Err(Error::Parse(format!(
                    "step {k} has {total} shots, header says {}",
                    f.shots
                )));
            }
            pool.per_k.insert(k, counts);
        }
        Ok(pool)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<SamplePool> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn to_file(&self) -> PoolFile {
        let n_qubits = 2 * self.n_orb;
        PoolFile {
            system: self.system.clone(),
            m: self.n_orb,
            n_alpha: self.n_alpha,
            n_beta: self.n_beta,
            dt: self.dt,
            shots: self.shots,
            seed: self.seed,
            per_k: self
                .per_k
                .iter()
                .map(|(k, counts)| {
                    let entries = counts
                        .iter()
                        .map(|(d, &count)| {
                            let q = d.to_qubits();
                            PoolEntry {
                                bits: (0..n_qubits)
                                    .map(|i| if q >> i & 1 == 1 { '1' } else { '0' })
                                    .collect(),
                                count,
                            }
                        })
                        .collect();
                    (k.to_string(), entries)
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PoolFile {
    system: String,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N_alpha")]
    n_alpha: usize,
    #[serde(rename = "N_beta")]
    n_beta: usize,
    dt: f64,
    shots: usize,
    seed: u64,
    per_k: BTreeMap<String, Vec<PoolEntry>>,
}

#[derive(Serialize, Deserialize)]
struct PoolEntry {
    bits: String,
    count: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_is_delta() {
        let sector = Sector::new(4, 2, 2).unwrap();
        let hf = hf_reference(2, 2, 4).unwrap();
        let psi = Statevector::basis(sector, &hf).unwrap();
        assert!(sample(&psi, 500, 7, 1).iter().all(|d| *d == hf));
    }

    #[test]
    fn shot_ranges_are_schedule_independent() {
        let sector = Sector::new(3, 1, 1).unwrap();
        let n = sector.dim();
        let amps = (0..n)
            .map(|i| num_complex::Complex64::new(1.0 + i as f64, 0.5))
            .collect::<Vec<_>>();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi =
            Statevector::from_amplitudes(sector, amps.iter().map(|a| a / norm).collect()).unwrap();
        let all = sample(&psi, 100, 11, 3);
        let mut parts = sample_range(&psi, 0..37, 11, 3);
        parts.extend(sample_range(&psi, 37..100, 11, 3));
        assert_eq!(all, parts);
        assert_ne!(all, sample(&psi, 100, 11, 4));
    }

    #[test]
    fn json_roundtrip() {
        let mut pool = SamplePool::new("toy", 2, 1, 1, 1.0, 3, 5);
        pool.insert(
            1,
            &[
                Determinant::new(1, 1),
                Determinant::new(1, 1),
                Determinant::new(2, 1),
            ],
        )
        .unwrap();
        pool.insert(2, &[Determinant::new(2, 2); 3]).unwrap();
        let text = pool.to_json();
        assert!(text.contains("\"N_alpha\""));
        assert!(text.contains("\"bits\": \"1100\""));
        let back = SamplePool::from_json(&text).unwrap();
        assert_eq!(back, pool);
        assert_eq!(back.truncated(1).k_values(), vec![1]);
        assert_eq!(pool.distinct().len(), 3);
    }

    #[test]
    fn rejects_foreign_sector() {
        let mut pool = SamplePool::new("toy", 2, 1, 1, 1.0, 1, 5);
        assert!(pool.insert(1, &[Determinant::new(3, 0)]).is_err());
        let bad = r#"{"system":"x","M":2,"N_alpha":1,"N_beta":1,"dt":1.0,"shots":1,"seed":0,
            "per_k":{"1":[{"bits":"1111","count":1}]}}"#;
        assert!(SamplePool::from_json(bad).is_err());
    }
}

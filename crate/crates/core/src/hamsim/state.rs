use std::sync::Arc;

use num_complex::Complex64;

use crate::determinants::Determinant;
use crate::error::{Error, Result};

/// Largest qubit count for which [`Statevector::to_dense`] materializes the
/// full register.
const DENSE_MAX_QUBITS: usize = 24;

/// All α and β strings of one `(n_alpha, n_beta)` sector, with rank tables.
#[derive(Debug)]
pub struct Sector {
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    alpha: Vec<u64>,
    beta: Vec<u64>,
    alpha_rank: Vec<u32>,
    beta_rank: Vec<u32>,
}

impl Sector {
    pub fn new(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<Arc<Sector>> {
        if n_orb > 16 {
            return Err(Error::SystemTooLarge {
                n_qubits: 2 * n_orb,
                limit: 32,
            });
        }
        for n in [n_alpha, n_beta] {
            if n > n_orb {
                return Err(Error::TooManyElectrons {
                    n_electrons: n,
                    n_orbitals: n_orb,
                });
            }
        }
        let (alpha, alpha_rank) = strings(n_orb, n_alpha);
        let (beta, beta_rank) = strings(n_orb, n_beta);
        Ok(Arc::new(Sector {
            n_orb,
            n_alpha,
            n_beta,
            alpha,
            beta,
            alpha_rank,
            beta_rank,
        }))
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

    pub fn dim(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn alpha_strings(&self) -> &[u64] {
        &self.alpha
    }

    pub fn beta_strings(&self) -> &[u64] {
        &self.beta
    }

    #[inline]
    pub(crate) fn alpha_rank(&self, s: u64) -> usize {
        self.alpha_rank[s as usize] as usize
    }

    #[inline]
    pub(crate) fn beta_rank(&self, s: u64) -> usize {
        self.beta_rank[s as usize] as usize
    }

    /// Position of a determinant of this sector (α-major order).
    pub fn index(&self, d: &Determinant) -> Option<usize> {
        let full = (1u64 << self.n_orb) - 1;
        if d.alpha & !full != 0
            || d.beta & !full != 0
            || d.n_alpha() != self.n_alpha
            || d.n_beta() != self.n_beta
        {
            return None;
        }
        Some(self.alpha_rank(d.alpha) * self.beta.len() + self.beta_rank(d.beta))
    }

    pub fn determinant(&self, i: usize) -> Determinant {
        let nb = self.beta.len();
        Determinant::new(self.alpha[i / nb], self.beta[i % nb])
    }
}

/// Strings with `k` of `n` bits set, ascending, and the inverse table.
fn strings(n: usize, k: usize) -> (Vec<u64>, Vec<u32>) {
    let mut list = Vec::new();
    let mut rank = vec![u32::MAX; 1 << n];
    for s in 0..(1u64 << n) {
        if s.count_ones() as usize == k {
            rank[s as usize] = list.len() as u32;
            list.push(s);
        }
    }
    (list, rank)
}

/// Quantum state restricted to one particle sector.
///
/// Amplitudes are stored over the sector's determinants in the α-block /
/// β-block phase convention; [`Statevector::to_dense`] produces the full
/// `2^(2M)` Jordan-Wigner register, where every amplitude outside the sector
/// is zero.
#[derive(Debug, Clone)]
pub struct Statevector {
    sector: Arc<Sector>,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// Basis state on a single determinant.
    pub fn basis(sector: Arc<Sector>, d: &Determinant) -> Result<Statevector> {
        let i = sector.index(d).ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "{} is not in the ({}, {}) sector of {} orbitals",
                d.to_text(sector.n_orb()),
                sector.n_alpha(),
                sector.n_beta(),
                sector.n_orb()
            ))
        })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); sector.dim()];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(Statevector { sector, amps })
    }

    pub fn from_amplitudes(sector: Arc<Sector>, amps: Vec<Complex64>) -> Result<Statevector> {
        if amps.len() != sector.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for sector dimension {}",
                amps.len(),
                sector.dim()
            )));
        }
        Ok(Statevector { sector, amps })
    }

    pub fn sector(&self) -> &Arc<Sector> {
        &self.sector
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitude(&self, d: &Determinant) -> Complex64 {
        self.sector
            .index(d)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amps[i])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Full register, indexed by the little-endian qubit bitstring.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        let n_qubits = 2 * self.sector.n_orb();
        if n_qubits > DENSE_MAX_QUBITS {
            return Err(Error::SystemTooLarge {
                n_qubits,
                limit: DENSE_MAX_QUBITS,
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        for (i, a) in self.amps.iter().enumerate() {
            let d = self.sector.determinant(i);
            out[d.to_qubits() as usize] = a * d.jw_sign();
        }
        Ok(out)
    }
}

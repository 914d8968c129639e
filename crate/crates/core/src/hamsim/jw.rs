use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;

/// Default cap on the qubit count accepted for simulation.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Terms with smaller coefficients are dropped from the generator list.
const DROP_TOLERANCE: f64 = 1e-13;

/// Dense matrices are only built up to this many qubits.
const DENSE_MAX_QUBITS: usize = 14;

/// Pauli string in symplectic form: qubit `j` carries `X` if bit `j` of `x`
/// is set and only that, `Z` if only `z`, `Y` if both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn support(&self) -> Vec<usize> {
        crate::determinants::bits(self.x | self.z).collect()
    }

    /// One character per qubit, qubit 0 first.
    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|j| match (self.x >> j & 1, self.z >> j & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    }

    /// `⟨row| P |col⟩` for computational basis states.
    pub fn element(&self, row: u64, col: u64) -> Complex64 {
        if row != col ^ self.x {
            return Complex64::new(0.0, 0.0);
        }
        // P = i^{n_y} X^x Z^z
        let n_y = (self.x & self.z).count_ones();
        let sign = if (self.z & col).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        Complex64::new(sign, 0.0) * Complex64::i().powu(n_y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: f64,
}

/// Number-conserving Hermitian generator. Indices are qubits
/// (spin-orbitals `2p + σ`).
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// `c n_p`
    Number { p: usize, c: f64 },
    /// `c n_p n_q`, `p > q`
    NumberPair { p: usize, q: usize, c: f64 },
    /// `(t + Σ u_s n_s)(a†_p a_q + h.c.)`, `p > q`
    Hopping {
        p: usize,
        q: usize,
        t: f64,
        dependence: Vec<(usize, f64)>,
    },
    /// `c (a†_c0 a†_c1 a_a0 a_a1 + h.c.)`, creators descending, annihilators ascending
    Double {
        creators: [usize; 2],
        annihilators: [usize; 2],
        c: f64,
    },
}

impl Generator {
    /// Sorted qubits the generator acts on (including number dependence).
    pub fn support(&self) -> Vec<usize> {
        let mut v = match self {
            Generator::Number { p, .. } => vec![*p],
            Generator::NumberPair { p, q, .. } => vec![*p, *q],
            Generator::Hopping {
                p, q, dependence, ..
            } => {
                let mut v = vec![*p, *q];
                v.extend(dependence.iter().map(|&(s, _)| s));
                v
            }
            Generator::Double {
                creators,
                annihilators,
                ..
            } => vec![creators[0], creators[1], annihilators[0], annihilators[1]],
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Ladder-operator products (with coefficients) whose sum is the generator.
    /// Each entry lists `(qubit, is_creation)` in operator order.
    fn monomials(&self) -> Vec<(f64, Vec<(usize, bool)>)> {
        match self {
            Generator::Number { p, c } => vec![(*c, vec![(*p, true), (*p, false)])],
            Generator::NumberPair { p, q, c } => {
                vec![(*c, vec![(*p, true), (*q, true), (*q, false), (*p, false)])]
            }
            Generator::Hopping {
                p,
                q,
                t,
                dependence,
            } => {
                let mut out = vec![
                    (*t, vec![(*p, true), (*q, false)]),
                    (*t, vec![(*q, true), (*p, false)]),
                ];
                for &(s, u) in dependence {
                    out.push((u, vec![(s, true), (s, false), (*p, true), (*q, false)]));
                    out.push((u, vec![(s, true), (s, false), (*q, true), (*p, false)]));
                }
                out
            }
            Generator::Double {
                creators: [c0, c1],
                annihilators: [a0, a1],
                c,
            } => vec![
                (
                    *c,
                    vec![(*c0, true), (*c1, true), (*a0, false), (*a1, false)],
                ),
                (
                    *c,
                    vec![(*a1, true), (*a0, true), (*c1, false), (*c0, false)],
                ),
            ],
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Number { p, .. } => write!(f, "N{p}"),
            Generator::NumberPair { p, q, .. } => write!(f, "NN{p},{q}"),
            Generator::Hopping { p, q, .. } => write!(f, "H{p},{q}"),
            Generator::Double {
                creators,
                annihilators,
                ..
            } => write!(
                f,
                "D{},{};{},{}",
                creators[0], creators[1], annihilators[0], annihilators[1]
            ),
        }
    }
}

/// Jordan-Wigner encoded Hamiltonian.
///
/// Holds the number-conserving generators used for time evolution; the
/// explicit Pauli expansion is computed on first request.
#[derive(Debug)]
pub struct QubitHamiltonian {
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    e_core: f64,
    generators: Vec<Generator>,
    terms: OnceLock<Vec<PauliTerm>>,
}

pub fn jordan_wigner(ints: &IntegralSet) -> Result<QubitHamiltonian> {
    jordan_wigner_with_limit(ints, DEFAULT_MAX_QUBITS)
}

pub fn jordan_wigner_with_limit(ints: &IntegralSet, max_qubits: usize) -> Result<QubitHamiltonian> {
    let n = ints.n_orb();
    if 2 * n > max_qubits {
        return Err(Error::SystemTooLarge {
            n_qubits: 2 * n,
            limit: max_qubits,
        });
    }
    let mut generators = collect_generators(ints);
    generators.sort_by_cached_key(|g| (g.support(), g.label()));
    Ok(QubitHamiltonian {
        n_orb: n,
        n_alpha: ints.n_alpha(),
        n_beta: ints.n_beta(),
        e_core: ints.e_core(),
        generators,
        terms: OnceLock::new(),
    })
}

type Key = (Vec<usize>, Vec<usize>);
/// `(p, q)` -> bare hopping and the number-dressed parts by spectator orbital.
type Hopping = BTreeMap<(usize, usize), (f64, Vec<(usize, f64)>)>;

/// Second-quantized Hamiltonian in canonical monomials
/// (creators descending, annihilators ascending), then grouped into
/// Hermitian generators.
fn collect_generators(ints: &IntegralSet) -> Vec<Generator> {
    let n = ints.n_orb();
    let mut mono: BTreeMap<Key, f64> = BTreeMap::new();
    let qubit = |p: usize, spin: usize| 2 * p + spin;
    for spin in 0..2 {
        for p in 0..n {
            for q in 0..n {
                let v = ints.h(p, q);
                if v != 0.0 {
                    *mono
                        .entry((vec![qubit(p, spin)], vec![qubit(q, spin)]))
                        .or_default() += v;
                }
            }
        }
    }
    // ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = 0.5 * ints.g(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (cp, cr) = (qubit(p, sigma), qubit(r, tau));
                            let (as_, aq) = (qubit(s, tau), qubit(q, sigma));
                            if cp == cr || as_ == aq {
                                continue;
                            }
                            let mut sign = 1.0;
                            let creators = if cp > cr {
                                vec![cp, cr]
                            } else {
                                sign = -sign;
                                vec![cr, cp]
                            };
                            let annihilators = if as_ < aq {
                                vec![as_, aq]
                            } else {
                                sign = -sign;
                                vec![aq, as_]
                            };
                            *mono.entry((creators, annihilators)).or_default() += sign * v;
                        }
                    }
                }
            }
        }
    }

    let conj = |k: &Key| -> Key {
        let mut c = k.1.clone();
        c.reverse();
        let mut a = k.0.clone();
        a.reverse();
        (c, a)
    };
    let hermitian =
        |k: &Key, v: f64| -> f64 { 0.5 * (v + mono.get(&conj(k)).copied().unwrap_or(0.0)) };

    let mut out = Vec::new();
    let mut hopping: Hopping = BTreeMap::new();
    for (key, &v) in &mono {
        let (cr, an) = key;
        match cr.len() {
            1 => {
                let (p, q) = (cr[0], an[0]);
                if p == q {
                    out.push(Generator::Number { p, c: v });
                } else if p > q {
                    hopping.entry((p, q)).or_default().0 = hermitian(key, v);
                }
            }
            _ => {
                let (c0, c1, a0, a1) = (cr[0], cr[1], an[0], an[1]);
                if c0 == a1 && c1 == a0 {
                    out.push(Generator::NumberPair { p: c0, q: c1, c: v });
                    continue;
                }
                let shared = [c0, c1].into_iter().find(|x| *x == a0 || *x == a1);
                if let Some(s) = shared {
                    // rewrite as ± n_s a†_p a_q
                    let p = if c0 == s { c1 } else { c0 };
                    let q = if a0 == s { a1 } else { a0 };
                    if p < q {
                        continue;
                    }
                    let sign = if c0 == s { -1.0 } else { 1.0 } * if a1 == s { -1.0 } else { 1.0 };
                    hopping
                        .entry((p, q))
                        .or_default()
                        .1
                        .push((s, sign * hermitian(key, v)));
                } else if cr
                    > &{
                        let mut a = an.clone();
                        a.reverse();
                        a
                    }
                {
                    out.push(Generator::Double {
                        creators: [c0, c1],
                        annihilators: [a0, a1],
                        c: hermitian(key, v),
                    });
                }
            }
        }
    }
    for ((p, q), (t, mut dependence)) in hopping {
        dependence.retain(|&(_, u)| u.abs() >= DROP_TOLERANCE);
        dependence.sort_by_key(|&(s, _)| s);
        if t.abs() >= DROP_TOLERANCE || !dependence.is_empty() {
            out.push(Generator::Hopping {
                p,
                q,
                t,
                dependence,
            });
        }
    }
    out.retain(|g| match g {
        Generator::Number { c, .. }
        | Generator::NumberPair { c, .. }
        | Generator::Double { c, .. } => c.abs() >= DROP_TOLERANCE,
        Generator::Hopping { .. } => true,
    });
    out
}

impl QubitHamiltonian {
    pub fn n_qubits(&self) -> usize {
        2 * self.n_orb
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

    /// Generators in canonical order (support, then label).
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Pauli expansion with real coefficients, sorted by (support, label).
    /// The identity term carries the core energy plus normal-ordering constants.
    pub fn pauli_terms(&self) -> &[PauliTerm] {
        self.terms.get_or_init(|| self.expand())
    }

    fn expand(&self) -> Vec<PauliTerm> {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        acc.insert(PauliString::IDENTITY, Complex64::new(self.e_core, 0.0));
        for g in &self.generators {
            for (c, ops) in g.monomials() {
                for (s, v) in ladder_product(&ops) {
                    *acc.entry(s).or_default() += v * c;
                }
            }
        }
        let n = self.n_qubits();
        let mut terms: Vec<PauliTerm> = acc
            .into_iter()
            .filter_map(|(s, v)| {
                // XZ-form to Pauli form: each Y contributes a factor -i
                let v = v * (-Complex64::i()).powu((s.x & s.z).count_ones());
                debug_assert!(
                    v.im.abs() < 1e-10,
                    "complex coefficient {v} on {}",
                    s.label(n)
                );
                (v.re.abs() > 1e-15).then_some(PauliTerm {
                    string: s,
                    coefficient: v.re,
                })
            })
            .collect();
        terms.sort_by_cached_key(|t| (t.string.support(), t.string.label(n)));
        terms
    }

    /// Full `2^n × 2^n` matrix in the computational basis (little-endian:
    /// bit `j` of the row index is qubit `j`).
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        let n = self.n_qubits();
        if n > DENSE_MAX_QUBITS {
            return Err(Error::SystemTooLarge {
                n_qubits: n,
                limit: DENSE_MAX_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut m = DMatrix::zeros(dim, dim);
        for t in self.pauli_terms() {
            for col in 0..dim as u64 {
                let row = col ^ t.string.x;
                m[(row as usize, col as usize)] += t.string.element(row, col) * t.coefficient;
            }
        }
        Ok(m)
    }
}

/// Product of ladder operators as a sum of XZ-form strings
/// (`X^x Z^z` on each qubit, in that order).
fn ladder_product(ops: &[(usize, bool)]) -> Vec<(PauliString, Complex64)> {
    let mut acc: Vec<(PauliString, Complex64)> =
        vec![(PauliString::IDENTITY, Complex64::new(1.0, 0.0))];
    for &(j, create) in ops {
        // a†_j = Z_{<j} (X_j + X_j Z_j)/2, a_j = Z_{<j} (X_j - X_j Z_j)/2
        let low = (1u64 << j) - 1;
        let parts = [
            (PauliString { x: 1 << j, z: low }, 0.5),
            (
                PauliString {
                    x: 1 << j,
                    z: low | (1 << j),
                },
                if create { 0.5 } else { -0.5 },
            ),
        ];
        let mut next: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for (s1, c1) in &acc {
            for (s2, c2) in &parts {
                let sign = if (s1.z & s2.x).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                let s = PauliString {
                    x: s1.x ^ s2.x,
                    z: s1.z ^ s2.z,
                };
                *next.entry(s).or_default() += c1 * (sign * c2);
            }
        }
        acc = next.into_iter().filter(|(_, c)| c.norm() > 0.0).collect();
    }
    acc
}

use std::sync::Arc;

use num_complex::Complex64;

use super::{Generator, QubitHamiltonian, Statevector};

/// One generator prepared for application in the α-block / β-block
/// determinant representation.
#[derive(Debug, Clone)]
struct Compiled {
    /// Orbitals that must be occupied (α, β) for the state to be acted on.
    need: (u64, u64),
    /// Orbitals that must be empty.
    forbid: (u64, u64),
    /// Partner state is obtained by toggling these.
    flip: (u64, u64),
    /// Operators of the representative monomial in application order
    /// (rightmost first): (block position, is_creation).
    ops: Vec<(u32, bool)>,
    coefficient: f64,
    /// Number dependence: coefficient added when the orbital is occupied.
    dependence: Vec<((u64, u64), f64)>,
    diagonal: bool,
}

/// Qubit `2p + σ` as an (α, β) mask pair and a block position
/// (α block first, β block offset by 64).
fn split_qubit(j: usize) -> ((u64, u64), u32) {
    let p = j / 2;
    if j.is_multiple_of(2) {
        ((1 << p, 0), p as u32)
    } else {
        ((0, 1 << p), 64 + p as u32)
    }
}

fn or(a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    (a.0 | b.0, a.1 | b.1)
}

fn compile(g: &Generator) -> Compiled {
    let mask = |qs: &[usize]| qs.iter().fold((0, 0), |m, &q| or(m, split_qubit(q).0));
    match g {
        Generator::Number { p, c } => Compiled {
            need: mask(&[*p]),
            forbid: (0, 0),
            flip: (0, 0),
            ops: Vec::new(),
            coefficient: *c,
            dependence: Vec::new(),
            diagonal: true,
        },
        Generator::NumberPair { p, q, c } => Compiled {
            need: mask(&[*p, *q]),
            forbid: (0, 0),
            flip: (0, 0),
            ops: Vec::new(),
            coefficient: *c,
            dependence: Vec::new(),
            diagonal: true,
        },
        Generator::Hopping {
            p,
            q,
            t,
            dependence,
        } => Compiled {
            // a†_p a_q acts on states with q occupied and p empty
            need: mask(&[*q]),
            forbid: mask(&[*p]),
            flip: mask(&[*p, *q]),
            ops: vec![(split_qubit(*q).1, false), (split_qubit(*p).1, true)],
            coefficient: *t,
            dependence: dependence
                .iter()
                .map(|&(s, u)| (split_qubit(s).0, u))
                .collect(),
            diagonal: false,
        },
        Generator::Double {
            creators,
            annihilators,
            c,
        } => Compiled {
            need: mask(annihilators),
            forbid: mask(creators),
            flip: mask(&[creators[0], creators[1], annihilators[0], annihilators[1]]),
            ops: vec![
                (split_qubit(annihilators[1]).1, false),
                (split_qubit(annihilators[0]).1, false),
                (split_qubit(creators[1]).1, true),
                (split_qubit(creators[0]).1, true),
            ],
            coefficient: *c,
            dependence: Vec::new(),
            diagonal: false,
        },
    }
}

/// Sign of applying `ops` to the occupation `(alpha, beta)`.
#[inline]
fn ops_sign(alpha: u64, beta: u64, ops: &[(u32, bool)]) -> f64 {
    let mut occ = (alpha as u128) | ((beta as u128) << 64);
    let mut parity = 0;
    for &(pos, _) in ops {
        parity += (occ & ((1u128 << pos) - 1)).count_ones();
        occ ^= 1u128 << pos;
    }
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Ordered product of generator exponentials `Π exp(-i τ_j G_j)` plus the
/// core-energy phase, approximating `exp(-i H Δt)`.
#[derive(Debug, Clone)]
pub struct TrotterSchedule {
    compiled: Arc<Vec<Compiled>>,
    labels: Arc<Vec<String>>,
    /// `(generator index, time)` in application order.
    steps: Vec<(usize, f64)>,
    e_core: f64,
    dt: f64,
}

/// Symmetric second-order splitting: half-step sweep over the generators in
/// canonical order, then the reversed sweep.
pub fn build_trotter_schedule(h: &QubitHamiltonian, dt: f64) -> TrotterSchedule {
    let n = h.generators().len();
    let mut steps: Vec<(usize, f64)> = (0..n).map(|i| (i, 0.5 * dt)).collect();
    steps.extend((0..n).rev().map(|i| (i, 0.5 * dt)));
    schedule(h, dt, steps)
}

/// First-order (Lie) splitting: one full-step sweep in canonical order.
pub fn build_first_order_schedule(h: &QubitHamiltonian, dt: f64) -> TrotterSchedule {
    let steps = (0..h.generators().len()).map(|i| (i, dt)).collect();
    schedule(h, dt, steps)
}

fn schedule(h: &QubitHamiltonian, dt: f64, steps: Vec<(usize, f64)>) -> TrotterSchedule {
    TrotterSchedule {
        compiled: Arc::new(h.generators().iter().map(compile).collect()),
        labels: Arc::new(h.generators().iter().map(|g| g.label()).collect()),
        steps,
        e_core: h.e_core(),
        dt,
    }
}

impl TrotterSchedule {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `(generator label, time)` in application order.
    pub fn steps(&self) -> Vec<(&str, f64)> {
        self.steps
            .iter()
            .map(|&(i, t)| (self.labels[i].as_str(), t))
            .collect()
    }

    /// True when the step sequence reads the same reversed.
    pub fn is_palindromic(&self) -> bool {
        self.steps.iter().eq(self.steps.iter().rev())
    }

    /// Applies one step of the schedule.
    pub fn apply(&self, state: &mut Statevector) {
        let sector = state.sector().clone();
        let (alpha, beta) = (sector.alpha_strings(), sector.beta_strings());
        let nb = beta.len();
        let amps = state.amplitudes_mut();
        for &(gi, tau) in &self.steps {
            let g = &self.compiled[gi];
            if g.diagonal {
                let phase = Complex64::from_polar(1.0, -tau * g.coefficient);
                for (ia, &a) in alpha.iter().enumerate() {
                    if a & g.need.0 != g.need.0 {
                        continue;
                    }
                    for (ib, &b) in beta.iter().enumerate() {
                        if b & g.need.1 == g.need.1 {
                            amps[ia * nb + ib] *= phase;
                        }
                    }
                }
                continue;
            }
            for (ia, &a) in alpha.iter().enumerate() {
                if a & g.need.0 != g.need.0 || a & g.forbid.0 != 0 {
                    continue;
                }
                let ja = sector.alpha_rank(a ^ g.flip.0);
                for (ib, &b) in beta.iter().enumerate() {
                    if b & g.need.1 != g.need.1 || b & g.forbid.1 != 0 {
                        continue;
                    }
                    let jb = sector.beta_rank(b ^ g.flip.1);
                    let mut c = g.coefficient;
                    for &((ma, mb), u) in &g.dependence {
                        if a & ma != 0 || b & mb != 0 {
                            c += u;
                        }
                    }
                    let s = ops_sign(a, b, &g.ops);
                    let (sin, cos) = (tau * c).sin_cos();
                    let (i, j) = (ia * nb + ib, ja * nb + jb);
                    let (v, w) = (amps[i], amps[j]);
                    let rot = Complex64::new(0.0, -s * sin);
                    amps[i] = v * cos + w * rot;
                    amps[j] = w * cos + v * rot;
                }
            }
        }
        let phase = Complex64::from_polar(1.0, -self.e_core * self.dt);
        for a in amps.iter_mut() {
            *a *= phase;
        }
    }
}

/// Applies the schedule `k` times, giving the state at time `k Δt`.
pub fn evolve(state: &mut Statevector, schedule: &TrotterSchedule, k: usize) {
    for _ in 0..k {
        schedule.apply(state);
    }
}

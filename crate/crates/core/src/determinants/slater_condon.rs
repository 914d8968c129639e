use super::{bits, Determinant};
use crate::integrals::IntegralSet;

#[inline]
fn parity_below(mask: u64, p: usize) -> u32 {
    (mask & ((1u64 << p) - 1)).count_ones()
}

/// Parity of the occupied orbitals strictly between `i` and `a`.
#[inline]
fn single_sign(mask: u64, i: usize, a: usize) -> f64 {
    let (lo, hi) = if i < a { (i, a) } else { (a, i) };
    let between = mask & ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    if between.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of `a†a a†b aj ai` applied to `mask` (all four in one spin block).
#[inline]
fn double_sign(mask: u64, i: usize, j: usize, a: usize, b: usize) -> f64 {
    let mut m = mask;
    let mut par = parity_below(m, i);
    m &= !(1 << i);
    par += parity_below(m, j);
    m &= !(1 << j);
    par += parity_below(m, b);
    m |= 1 << b;
    par += parity_below(m, a);
    if par.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `⟨d|Ĥ|d⟩`, including the core energy.
pub fn diagonal_element(d: &Determinant, ints: &IntegralSet) -> f64 {
    let mut e = ints.e_core();
    let occ_a: Vec<usize> = bits(d.alpha).collect();
    let occ_b: Vec<usize> = bits(d.beta).collect();
    for occ in [&occ_a, &occ_b] {
        for (x, &i) in occ.iter().enumerate() {
            e += ints.h(i, i);
            for &j in &occ[..x] {
                e += ints.g(i, i, j, j) - ints.g(i, j, j, i);
            }
        }
    }
    for &i in &occ_a {
        for &j in &occ_b {
            e += ints.g(i, i, j, j);
        }
    }
    e
}

/// Single excitation `i → a` within one spin block: `same` is the occupation
/// of that block in the ket, `other` the opposite-spin occupation.
fn single_element(ints: &IntegralSet, same: u64, other: u64, i: usize, a: usize) -> f64 {
    let mut v = ints.h(a, i);
    for k in bits(same & !(1 << i)) {
        v += ints.g(a, i, k, k) - ints.g(a, k, k, i);
    }
    for k in bits(other) {
        v += ints.g(a, i, k, k);
    }
    single_sign(same, i, a) * v
}

/// `⟨bra|Ĥ|ket⟩` by the Slater-Condon rules. Zero beyond double excitations.
///
/// Evaluated in a canonical argument order so the result is exactly
/// symmetric under exchange of the two determinants.
pub fn slater_condon_element(d1: &Determinant, d2: &Determinant, ints: &IntegralSet) -> f64 {
    let (bra, ket) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
    element(bra, ket, ints)
}

fn element(bra: &Determinant, ket: &Determinant, ints: &IntegralSet) -> f64 {
    let da = bra.alpha ^ ket.alpha;
    let db = bra.beta ^ ket.beta;
    let na = da.count_ones();
    let nb = db.count_ones();
    if na + nb > 4 || bra.n_alpha() != ket.n_alpha() || bra.n_beta() != ket.n_beta() {
        return 0.0;
    }
    match (na, nb) {
        (0, 0) => diagonal_element(ket, ints),
        (2, 0) => {
            let i = (da & ket.alpha).trailing_zeros() as usize;
            let a = (da & bra.alpha).trailing_zeros() as usize;
            single_element(ints, ket.alpha, ket.beta, i, a)
        }
        (0, 2) => {
            let i = (db & ket.beta).trailing_zeros() as usize;
            let a = (db & bra.beta).trailing_zeros() as usize;
            single_element(ints, ket.beta, ket.alpha, i, a)
        }
        (4, 0) | (0, 4) => {
            let (diff, k, b) = if na == 4 {
                (da, ket.alpha, bra.alpha)
            } else {
                (db, ket.beta, bra.beta)
            };
            let mut holes = bits(diff & k);
            let (i, j) = (holes.next().unwrap(), holes.next().unwrap());
            let mut parts = bits(diff & b);
            let (a, bb) = (parts.next().unwrap(), parts.next().unwrap());
            double_sign(k, i, j, a, bb) * (ints.g(a, i, bb, j) - ints.g(a, j, bb, i))
        }
        (2, 2) => {
            let i = (da & ket.alpha).trailing_zeros() as usize;
            let a = (da & bra.alpha).trailing_zeros() as usize;
            let j = (db & ket.beta).trailing_zeros() as usize;
            let b = (db & bra.beta).trailing_zeros() as usize;
            single_sign(ket.alpha, i, a) * single_sign(ket.beta, j, b) * ints.g(a, i, b, j)
        }
        _ => 0.0,
    }
}

/// Calls `f` for every determinant reachable from `d` by one single or
/// double excitation within `n_orb` orbitals, conserving `(n_alpha, n_beta)`.
pub fn for_each_connected(d: &Determinant, n_orb: usize, mut f: impl FnMut(Determinant)) {
    let full = super::low_bits(n_orb);
    let va = full & !d.alpha;
    let vb = full & !d.beta;
    for i in bits(d.alpha) {
        for a in bits(va) {
            f(Determinant::new(d.alpha ^ (1 << i) ^ (1 << a), d.beta));
        }
    }
    for i in bits(d.beta) {
        for a in bits(vb) {
            f(Determinant::new(d.alpha, d.beta ^ (1 << i) ^ (1 << a)));
        }
    }
    for (spin_alpha, occ, virt) in [(true, d.alpha, va), (false, d.beta, vb)] {
        for i in bits(occ) {
            for j in bits(occ & !((2u64 << i) - 1)) {
                for a in bits(virt) {
                    for b in bits(virt & !((2u64 << a) - 1)) {
                        let flip = (1 << i) ^ (1 << j) ^ (1 << a) ^ (1 << b);
                        if spin_alpha {
                            f(Determinant::new(d.alpha ^ flip, d.beta));
                        } else {
                            f(Determinant::new(d.alpha, d.beta ^ flip));
                        }
                    }
                }
            }
        }
    }
    for i in bits(d.alpha) {
        for a in bits(va) {
            let alpha = d.alpha ^ (1 << i) ^ (1 << a);
            for j in bits(d.beta) {
                for b in bits(vb) {
                    f(Determinant::new(alpha, d.beta ^ (1 << j) ^ (1 << b)));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::hf_reference;

    fn toy() -> IntegralSet {
        // deterministic pseudo-random symmetric integrals
        let n = 4;
        let mut h = vec![0.0; n * n];
        let mut g = vec![0.0; n.pow(4)];
        let val = |x: usize| ((x as f64 * 0.618_033_988_7).fract() - 0.5) * 0.4;
        for p in 0..n {
            for q in 0..=p {
                let v = val(p * 7 + q * 3 + 1) - if p == q { 1.0 } else { 0.0 };
                h[p * n + q] = v;
                h[q * n + p] = v;
            }
        }
        let at = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let (a, b) = (p.max(q), p.min(q));
                        let (c, d) = (r.max(s), r.min(s));
                        let (x, y) = ((a * (a + 1) / 2 + b), (c * (c + 1) / 2 + d));
                        let key = x.max(y) * 100 + x.min(y);
                        g[at(p, q, r, s)] = val(key) + if p == q && r == s { 0.6 } else { 0.0 };
                    }
                }
            }
        }
        IntegralSet::new(n, 2, 2, 0.7, h, g).unwrap()
    }

    #[test]
    fn beyond_doubles_vanish() {
        let ints = toy();
        let hf = hf_reference(2, 2, 4).unwrap();
        let triple = Determinant::new(0b1100, 0b1010);
        let quadruple = Determinant::new(0b1100, 0b1100);
        assert_eq!(hf.excitation_degree(&triple), 3);
        assert_eq!(hf.excitation_degree(&quadruple), 4);
        assert_eq!(slater_condon_element(&hf, &triple, &ints), 0.0);
        assert_eq!(slater_condon_element(&hf, &quadruple, &ints), 0.0);
    }

    #[test]
    fn exact_symmetry() {
        let ints = toy();
        let mut dets = Vec::new();
        for a in 0u64..16 {
            for b in 0u64..16 {
                if a.count_ones() == 2 && b.count_ones() == 2 {
                    dets.push(Determinant::new(a, b));
                }
            }
        }
        assert_eq!(dets.len(), 36);
        for x in &dets {
            for y in &dets {
                assert_eq!(
                    slater_condon_element(x, y, &ints).to_bits(),
                    slater_condon_element(y, x, &ints).to_bits()
                );
            }
        }
    }

    #[test]
    fn connected_count() {
        let hf = hf_reference(2, 2, 4).unwrap();
        let mut n = 0;
        let mut seen = std::collections::HashSet::new();
        for_each_connected(&hf, 4, |d| {
            n += 1;
            assert_eq!(d.sector(), (2, 2));
            assert!(seen.insert(d));
        });
        // singles 4+4, same-spin doubles 1+1, opposite-spin 4*4
        assert_eq!(n, 26);
    }
}

mod common;

use std::collections::BTreeMap;

use common::{data, dense_sector, hydrogen};

use nalgebra::DMatrix;
use scqsci::cidiag::{
    build_subspace_hamiltonian, davidson, full_ci, DavidsonOptions, FullCiOperator,
    SymmetricOperator,
};
use scqsci::determinants::{
    diagonal_element, hf_reference, slater_condon_element, symmetry_complete, Determinant,
    DeterminantSpace,
};
use scqsci::hamsim::SamplePool;
use scqsci::integrals::{read_fcidump, Geometry, IntegralSet};
use scqsci::subspace::hci_select;

#[test]
fn davidson_matches_dense_on_fh_dimer_sector() {
    let ints = read_fcidump(&data("fh/fh_dimer/dimer.fcidump")).unwrap();
    let op = FullCiOperator::new(&ints, 8, 8).unwrap();
    assert_eq!(op.dim(), 2025);
    let dense = dense_sector(&op, &ints);
    assert!((&dense - dense.transpose()).abs().max() == 0.0);
    let lowest = dense.symmetric_eigenvalues().min();
    let hf = hf_reference(8, 8, 10).unwrap();
    let mut start = vec![0.0; op.dim()];
    start[op.index(&hf).unwrap()] = 1.0;
    let dav = davidson(&op, &start, &[], &DavidsonOptions::default()).unwrap();
    assert!(
        (dav.energy - lowest).abs() < 1e-9,
        "{} vs {lowest}",
        dav.energy
    );
    assert!(dav.residual < 1e-9);
    let norm: f64 = dav.vector.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn davidson_matches_dense_on_sampled_subspace() {
    let ints = hydrogen(Geometry::h8_cuboid(2.0, 100.0));
    let pool = SamplePool::generate("h8", &ints, 1.0, 5, 300, 4).unwrap();
    let hf = hf_reference(4, 4, 8).unwrap();
    let space: DeterminantSpace = pool.distinct().into_iter().chain([hf]).collect();
    let space = symmetry_complete(&space).unwrap();
    let h = build_subspace_hamiltonian(&space, &ints).unwrap();
    let lowest = h.to_dense().symmetric_eigenvalues().min();
    let mut start = vec![0.0; space.len()];
    start[space.index_of(&hf).unwrap()] = 1.0;
    let dav = davidson(&h, &start, &[], &DavidsonOptions::default()).unwrap();
    assert!((dav.energy - lowest).abs() < 1e-9);
}

#[test]
fn separable_full_ci() {
    let e4 = full_ci(&hydrogen(Geometry::h4_square(2.0, [0.0; 3])), 2, 2)
        .unwrap()
        .energy;
    let e8 = full_ci(&hydrogen(Geometry::h8_cuboid(2.0, 100.0)), 4, 4)
        .unwrap()
        .energy;
    assert!((e8 - 2.0 * e4).abs() < 1e-7, "{e8} vs 2 x {e4}");
}

/// Spin-orbital `p` for α, `n + p` for β; the α block precedes the β block.
fn ladder(occ: u128, create: bool, so: usize) -> Option<(u128, f64)> {
    let bit = 1u128 << so;
    if (occ & bit != 0) == create {
        return None;
    }
    let sign = if (occ & (bit - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((occ ^ bit, sign))
}

fn to_occ(d: &Determinant, n: usize) -> u128 {
    d.alpha as u128 | ((d.beta as u128) << n)
}

fn from_occ(occ: u128, n: usize) -> Determinant {
    let mask = (1u128 << n) - 1;
    Determinant::new((occ & mask) as u64, ((occ >> n) & mask) as u64)
}

/// `S² = S₋S₊ + S_z² + S_z` applied to one determinant.
fn s2_column(d: &Determinant, n: usize) -> BTreeMap<Determinant, f64> {
    let mut out = BTreeMap::new();
    let sz = 0.5 * (d.n_alpha() as f64 - d.n_beta() as f64);
    *out.entry(*d).or_insert(0.0) += sz * sz + sz;
    let occ = to_occ(d, n);
    for p in 0..n {
        // S₊ term a†_pα a_pβ
        let Some((o1, s1)) = ladder(occ, false, n + p) else {
            continue;
        };
        let Some((o2, s2)) = ladder(o1, true, p) else {
            continue;
        };
        for q in 0..n {
            // S₋ term a†_qβ a_qα
            let Some((o3, s3)) = ladder(o2, false, q) else {
                continue;
            };
            let Some((o4, s4)) = ladder(o3, true, n + q) else {
                continue;
            };
            *out.entry(from_occ(o4, n)).or_insert(0.0) += s1 * s2 * s3 * s4;
        }
    }
    out
}

fn commutator_norm(space: &DeterminantSpace, ints: &IntegralSet) -> f64 {
    let n = space.len();
    let h = build_subspace_hamiltonian(space, ints).unwrap().to_dense();
    let mut s2 = DMatrix::zeros(n, n);
    for (j, d) in space.iter().enumerate() {
        for (e, v) in s2_column(d, ints.n_orb()) {
            if let Some(i) = space.index_of(&e) {
                s2[(i, j)] += v;
            }
        }
    }
    (&h * &s2 - &s2 * &h).abs().max()
}

#[test]
fn spin_squared_commutes_on_completed_spaces() {
    let ints = hydrogen(Geometry::h4_square(2.0, [0.0; 3]));
    let op = FullCiOperator::new(&ints, 2, 2).unwrap();
    let full: DeterminantSpace = (0..op.dim()).map(|i| op.determinant(i)).collect();
    assert!(commutator_norm(&full, &ints) < 1e-9);

    let pool = SamplePool::generate("h4", &ints, 1.0, 2, 8, 5).unwrap();
    let sampled: DeterminantSpace = pool.distinct().into_iter().collect();
    let completed = symmetry_complete(&sampled).unwrap();
    assert!(commutator_norm(&completed, &ints) < 1e-9);

    // ⟨S²⟩ of the full-CI ground state is a singlet
    let gs = full_ci(&ints, 2, 2).unwrap();
    let mut s2 = 0.0;
    for (j, d) in full.iter().enumerate() {
        for (e, v) in s2_column(d, 4) {
            s2 += gs.vector[full.index_of(&e).unwrap()] * v * gs.vector[j];
        }
    }
    assert!(s2.abs() < 1e-8, "{s2}");
}

#[test]
fn hci_limits() {
    let ints = hydrogen(Geometry::h4_square(2.0, [0.0; 3]));
    let e_fci = full_ci(&ints, 2, 2).unwrap().energy;
    let tight = hci_select(&ints, 1e-10).unwrap();
    assert!((tight.ground.energy - e_fci).abs() < 1e-9);
    // the selection stops once no outside determinant is coupled above ε;
    // on the square that is the ground-state symmetry block, not all 36
    let op = FullCiOperator::new(&ints, 2, 2).unwrap();
    for a in (0..op.dim()).map(|i| op.determinant(i)) {
        if tight.space.contains(&a) {
            continue;
        }
        for (i, d) in tight.space.iter().enumerate() {
            assert!((slater_condon_element(&a, d, &ints) * tight.ground.vector[i]).abs() < 1e-10);
        }
    }
    let loose = hci_select(&ints, 1e3).unwrap();
    assert_eq!(loose.space.len(), 1);
    let hf = hf_reference(2, 2, 4).unwrap();
    assert!((loose.ground.energy - diagonal_element(&hf, &ints)).abs() < 1e-12);

    for ints in [
        hydrogen(Geometry::h8_cuboid(2.0, 100.0)),
        read_fcidump(&data("fh/fh_dimer/dimer.fcidump")).unwrap(),
    ] {
        let mut last = f64::INFINITY;
        let mut last_space: Option<DeterminantSpace> = None;
        for eps in [5e-3, 1e-3, 5e-4, 1e-4] {
            let r = hci_select(&ints, eps).unwrap();
            assert!(r.ground.energy <= last + 1e-12, "eps {eps}");
            if let Some(prev) = &last_space {
                assert!(prev.len() <= r.space.len());
            }
            last = r.ground.energy;
            last_space = Some(r.space);
        }
    }
}

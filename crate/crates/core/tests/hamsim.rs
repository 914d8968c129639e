mod common;

use std::collections::BTreeMap;

use common::{chi_square_p, distance, h4, hf_state, ExactOracle};
use num_complex::Complex64;
use scqsci::determinants::{hf_reference, slater_condon_element, Determinant};
use scqsci::hamsim::{
    build_first_order_schedule, build_trotter_schedule, evolve, jordan_wigner, sample, SamplePool,
    Sector,
};

/// |⟨exact|Trotter⟩|² for 4H after one second-order step of Δt = 1.
const FIDELITY_K1_DT1: f64 = 0.998_268_992_693;

#[test]
fn slater_condon_equals_restricted_jw_matrix() {
    let ints = h4();
    let dense = jordan_wigner(&ints).unwrap().dense_matrix().unwrap();
    let sector = Sector::new(4, 2, 2).unwrap();
    assert_eq!(sector.dim(), 36);
    let mut worst: f64 = 0.0;
    for i in 0..36 {
        for j in 0..36 {
            let (di, dj) = (sector.determinant(i), sector.determinant(j));
            let jw = dense[(di.to_qubits() as usize, dj.to_qubits() as usize)]
                * di.jw_sign()
                * dj.jw_sign();
            assert!(jw.im.abs() < 1e-12);
            worst = worst.max((jw.re - slater_condon_element(&di, &dj, &ints)).abs());
        }
    }
    assert!(worst < 1e-10, "{worst:e}");
    // Hermiticity of the assembled register matrix
    let skew = (&dense - dense.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    assert!(skew < 1e-12);
}

#[test]
fn second_order_beats_first_order() {
    let ints = h4();
    let h = jordan_wigner(&ints).unwrap();
    let oracle = ExactOracle::new(&ints);
    let psi0 = hf_state(&ints).to_dense().unwrap();
    let exact = oracle.evolve(&psi0, 1.0);
    let mut s2 = hf_state(&ints);
    evolve(&mut s2, &build_trotter_schedule(&h, 1.0), 1);
    let mut s1 = hf_state(&ints);
    evolve(&mut s1, &build_first_order_schedule(&h, 1.0), 1);
    let e2 = distance(&s2.to_dense().unwrap(), &exact);
    let e1 = distance(&s1.to_dense().unwrap(), &exact);
    assert!(e2 < e1, "second order {e2:e}, first order {e1:e}");
}

#[test]
fn single_step_fidelity_fixture() {
    let ints = h4();
    let h = jordan_wigner(&ints).unwrap();
    let exact = ExactOracle::new(&ints).evolve(&hf_state(&ints).to_dense().unwrap(), 1.0);
    let mut s = hf_state(&ints);
    evolve(&mut s, &build_trotter_schedule(&h, 1.0), 1);
    let overlap: Complex64 = exact
        .iter()
        .zip(s.to_dense().unwrap())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let fidelity = overlap.norm_sqr();
    assert!((fidelity - FIDELITY_K1_DT1).abs() < 1e-11, "{fidelity:.12}");
}

#[test]
fn halving_step_quarters_the_error() {
    let ints = h4();
    let h = jordan_wigner(&ints).unwrap();
    let oracle = ExactOracle::new(&ints);
    let t = 1.0;
    let exact = oracle.evolve(&hf_state(&ints).to_dense().unwrap(), t);
    let error = |steps: usize| {
        let mut s = hf_state(&ints);
        evolve(&mut s, &build_trotter_schedule(&h, t / steps as f64), steps);
        distance(&s.to_dense().unwrap(), &exact)
    };
    let (coarse, fine, finer) = (error(4), error(8), error(16));
    let r1 = coarse / fine;
    let r2 = fine / finer;
    assert!((3.5..4.5).contains(&r1), "{coarse:e} {fine:e} ratio {r1}");
    assert!((3.5..4.5).contains(&r2), "{fine:e} {finer:e} ratio {r2}");
}

#[test]
fn evolution_keeps_norm_and_sector() {
    let ints = h4();
    let schedule = build_trotter_schedule(&jordan_wigner(&ints).unwrap(), 1.0);
    let mut s = hf_state(&ints);
    for _ in 1..=10 {
        evolve(&mut s, &schedule, 1);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let dense = s.to_dense().unwrap();
        for (q, a) in dense.iter().enumerate() {
            let d = Determinant::from_qubits(q as u64);
            if d.sector() != (2, 2) {
                assert_eq!(*a, Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn sampling_matches_born_distribution() {
    let ints = h4();
    let mut s = hf_state(&ints);
    evolve(
        &mut s,
        &build_trotter_schedule(&jordan_wigner(&ints).unwrap(), 1.0),
        1,
    );
    let shots = 100_000;
    let draws = sample(&s, shots, 20_240_613, 1);
    assert_eq!(draws.len(), shots);
    let sector = s.sector().clone();
    let mut counts = vec![0usize; sector.dim()];
    for d in &draws {
        assert_eq!(d.sector(), (2, 2));
        counts[sector.index(d).unwrap()] += 1;
    }
    let p = chi_square_p(&s.probabilities(), &counts, shots).expect("enough bins");
    assert!(p > 0.001, "chi-square p = {p}");
}

#[test]
fn reference_state_samples_only_reference() {
    let ints = h4();
    let s = hf_state(&ints);
    let hf = hf_reference(2, 2, 4).unwrap();
    assert!(sample(&s, 1000, 3, 0).iter().all(|d| *d == hf));
}

#[test]
fn pool_is_a_pure_function_of_its_inputs() {
    let ints = h4();
    let a = SamplePool::generate("h4", &ints, 1.0, 4, 200, 9).unwrap();
    let b = SamplePool::generate("h4", &ints, 1.0, 4, 200, 9).unwrap();
    assert_eq!(a, b);
    let c = SamplePool::generate("h4", &ints, 1.0, 4, 200, 10).unwrap();
    assert_ne!(a, c);
    for k in a.k_values() {
        let per_k: &BTreeMap<Determinant, usize> = a.counts(k).unwrap();
        assert_eq!(per_k.values().sum::<usize>(), 200);
        assert!(per_k.keys().all(|d| d.sector() == (2, 2)));
    }
}

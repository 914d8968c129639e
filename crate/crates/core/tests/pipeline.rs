mod common;

use std::sync::OnceLock;

use common::{data, fh_inputs};

use scqsci::cidiag::full_ci;
use scqsci::determinants::hf_reference;
use scqsci::error::Error;
use scqsci::hamsim::SamplePool;
use scqsci::integrals::Geometry;
use scqsci::workflow::{
    prepare_dimer, run_prepared, size_consistency_check_prepared, DimerInputs, IntegralSource,
    Method, MonomerSampling, PreparedDimer, Report, RunConfig, KCAL_PER_HARTREE,
};

fn h8_far() -> &'static PreparedDimer {
    static PREP: OnceLock<PreparedDimer> = OnceLock::new();
    PREP.get_or_init(|| {
        prepare_dimer(&DimerInputs::hydrogen(Geometry::h8_cuboid(2.0, 100.0))).unwrap()
    })
}

/// Closest 8H that still passes the fragment-overlap check.
fn h8_near() -> &'static PreparedDimer {
    static PREP: OnceLock<PreparedDimer> = OnceLock::new();
    PREP.get_or_init(|| {
        prepare_dimer(&DimerInputs::hydrogen(Geometry::h8_cuboid(2.0, 7.0))).unwrap()
    })
}

fn fh_dimer() -> &'static PreparedDimer {
    static PREP: OnceLock<PreparedDimer> = OnceLock::new();
    PREP.get_or_init(|| prepare_dimer(&fh_inputs("fh_dimer")).unwrap())
}

fn config(method: Method, k_max: usize, shots: usize, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new("h8", DimerInputs::hydrogen(Geometry::h8_cuboid(2.0, 100.0)));
    cfg.method = method;
    cfg.k_max = k_max;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg
}

fn fci_energy(ints: &scqsci::integrals::IntegralSet) -> f64 {
    full_ci(ints, ints.n_alpha(), ints.n_beta()).unwrap().energy
}

/// E(K+1) ≤ E(K) ≤ E_RHF and E(K) ≥ E_fullCI for every tracked energy.
fn assert_variational_chain(report: &Report, prep: &PreparedDimer) {
    let frag = prep.fragments().unwrap();
    let bounds = [
        (
            prep.dimer.reference_energy,
            fci_energy(&prep.dimer.integrals),
        ),
        (
            frag.monomers[0].reference_energy,
            fci_energy(&frag.monomers[0].integrals),
        ),
        (
            frag.monomers[1].reference_energy,
            fci_energy(&frag.monomers[1].integrals),
        ),
    ];
    let mut last = [f64::INFINITY; 3];
    for row in &report.rows {
        let e = [row.e_dimer, row.e_a.unwrap(), row.e_b.unwrap()];
        for i in 0..3 {
            let (rhf, fci) = bounds[i];
            assert!(
                e[i] <= rhf + 1e-10,
                "{} term {i}: {} above RHF {rhf}",
                row.label,
                e[i]
            );
            assert!(
                e[i] >= fci - 1e-10,
                "{} term {i}: {} below full-CI {fci}",
                row.label,
                e[i]
            );
            assert!(e[i] <= last[i] + 1e-10, "{} term {i} rose", row.label);
            last[i] = e[i];
        }
    }
}

#[test]
fn energies_are_monotone_and_variational() {
    for prep in [h8_far(), h8_near(), fh_dimer()] {
        for method in [Method::Sc, Method::Org] {
            for seed in [1, 2] {
                let cfg = config(method, 5, 20, seed);
                let report = run_prepared(prep, &cfg, None).unwrap().report;
                assert_eq!(report.rows.len(), 5);
                assert_variational_chain(&report, prep);
            }
        }
    }
}

#[test]
fn sc_is_never_above_org_on_the_same_pool() {
    let prep = fh_dimer();
    let dimer = &prep.dimer.integrals;
    for seed in 0..4 {
        let pool = SamplePool::generate("fh", dimer, 1.0, 5, 15, seed).unwrap();
        let sc = run_prepared(prep, &config(Method::Sc, 5, 15, seed), Some(pool.clone()))
            .unwrap()
            .report;
        let org = run_prepared(prep, &config(Method::Org, 5, 15, seed), Some(pool))
            .unwrap()
            .report;
        assert_eq!(sc.provenance.pool, "loaded");
        for (s, o) in sc.rows.iter().zip(&org.rows) {
            assert!(s.dim_dimer >= o.dim_dimer);
            assert!(
                s.e_dimer <= o.e_dimer + 1e-12,
                "{}: {} vs {}",
                s.label,
                s.e_dimer,
                o.e_dimer
            );
        }
    }
}

#[test]
fn org_is_not_size_consistent_with_independent_monomers() {
    let prep = h8_far();
    let mut worst: f64 = 0.0;
    for seed in 1..=5 {
        let mut cfg = config(Method::Org, 5, 10, seed);
        cfg.monomer_sampling = MonomerSampling::Independent;
        let report = run_prepared(prep, &cfg, None).unwrap().report;
        for row in &report.rows {
            worst = worst.max(row.e_int_hartree.unwrap().abs());
        }
    }
    assert!(worst > 1e-5, "largest org |E_int| {worst:e}");
}

#[test]
fn reference_only_pool_gives_rhf() {
    let prep = h8_far();
    let hf = hf_reference(4, 4, 8).unwrap();
    let mut pool = SamplePool::new("h8", 8, 4, 4, 1.0, 3, 0);
    pool.insert(1, &[hf, hf, hf]).unwrap();
    let report = run_prepared(prep, &config(Method::Sc, 1, 3, 0), Some(pool))
        .unwrap()
        .report;
    let row = &report.rows[0];
    assert_eq!(row.dim_dimer, 1);
    assert!((row.e_dimer - prep.dimer.reference_energy).abs() < 1e-12);
    let frag = prep.fragments().unwrap();
    assert!((row.e_a.unwrap() - frag.monomers[0].reference_energy).abs() < 1e-12);
    assert!((row.e_b.unwrap() - frag.monomers[1].reference_energy).abs() < 1e-12);
}

#[test]
fn loaded_pool_must_cover_every_k() {
    let prep = h8_far();
    let pool = SamplePool::generate("h8", &prep.dimer.integrals, 1.0, 2, 5, 0).unwrap();
    assert!(run_prepared(prep, &config(Method::Sc, 3, 5, 0), Some(pool)).is_err());
}

#[test]
fn size_consistency_check_refuses_interacting_fragments() {
    for prep in [h8_near(), fh_dimer()] {
        let err = size_consistency_check_prepared(prep, &config(Method::Sc, 2, 10, 0)).unwrap_err();
        assert!(matches!(err, Error::InteractingFragments { .. }), "{err}");
    }

    let check = size_consistency_check_prepared(h8_far(), &config(Method::Sc, 5, 10, 7)).unwrap();
    assert!(check.pass, "{:e}", check.max_abs_e_int);
    assert!(check.coupling < 1e-10);

    let dimer_approach = config(Method::OrgDimerApproach, 1, 10, 0);
    assert!(size_consistency_check_prepared(h8_far(), &dimer_approach).is_err());
}

#[test]
fn report_arithmetic_and_json_roundtrip() {
    let mut cfg = config(Method::Sc, 3, 10, 11);
    cfg.full_ci = true;
    let report = run_prepared(h8_near(), &cfg, None).unwrap().report;
    report.check_arithmetic().unwrap();
    for row in report.references.iter().chain(&report.rows) {
        let e = row.e_dimer - row.e_a.unwrap() - row.e_b.unwrap();
        assert_eq!(row.e_int_hartree, Some(e));
        assert_eq!(row.e_int_kcal, Some(e * KCAL_PER_HARTREE));
    }
    assert_eq!(report.references[0].label, "RHF");
    assert_eq!(report.references[1].dim_dimer, 4900);
    let back = Report::from_json(&report.to_json()).unwrap();
    assert_eq!(back, report);

    let mut tampered = report.clone();
    tampered.rows[0].e_int_kcal = tampered.rows[0].e_int_kcal.map(|e| e + 1e-9);
    assert!(tampered.check_arithmetic().is_err());

    let table = report.to_table();
    assert!(table.contains("K=3"));
    assert!(table.contains("full-CI"));
}

#[test]
fn sc_hci_runs_on_thresholds() {
    let mut cfg = config(Method::ScHci, 1, 1, 0);
    cfg.epsilon = vec![1e-2, 1e-3];
    let report = run_prepared(h8_near(), &cfg, None).unwrap().report;
    assert_eq!(report.rows.len(), 2);
    for row in &report.rows {
        // the product space contains the selected one
        assert!(row.e_dimer <= row.e_dimer_hci.unwrap() + 1e-12);
    }
    assert!(report.rows[1].e_dimer <= report.rows[0].e_dimer + 1e-12);
    cfg.epsilon = vec![-1.0];
    assert!(run_prepared(h8_near(), &cfg, None).is_err());
}

#[test]
fn dimer_approach_uses_the_separated_dimer() {
    let mut inputs = DimerInputs::hydrogen(Geometry::h8_cuboid(2.0, 7.0));
    inputs.far_dimer = Some(IntegralSource::Hydrogen(Geometry::h8_cuboid(2.0, 100.0)));
    let prep = prepare_dimer(&inputs).unwrap();
    let report = run_prepared(&prep, &config(Method::OrgDimerApproach, 2, 10, 3), None)
        .unwrap()
        .report;
    for row in &report.rows {
        assert_eq!(
            row.e_int_hartree,
            Some(row.e_dimer - row.e_far_dimer.unwrap())
        );
    }
    let rhf = &report.references[0];
    assert!(rhf.e_far_dimer.is_some());
}

#[test]
fn fh_fcidumps_match_the_generator() {
    let reference: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("fh/pyscf_reference.json")).unwrap())
            .unwrap();
    // the 27225-determinant FH-H2O sectors are left to the acceptance suite
    for name in ["fh_dimer", "fh_dimer_100"] {
        let prep = prepare_dimer(&fh_inputs(name)).unwrap();
        let casci = &reference[name]["casci"];
        let rhf = &reference[name]["rhf"];
        let frag = prep.fragments().unwrap();
        let systems = [
            ("dimer", &prep.dimer),
            ("monomer_a", &frag.monomers[0]),
            ("monomer_b", &frag.monomers[1]),
        ];
        for (key, sys) in systems {
            let e = fci_energy(&sys.integrals);
            let want = casci[key].as_f64().unwrap();
            assert!((e - want).abs() < 1e-8, "{name} {key}: {e} vs {want}");
            let want = rhf[key].as_f64().unwrap();
            assert!(
                (sys.reference_energy - want).abs() < 1e-8,
                "{name} {key} RHF"
            );
        }
    }
}

#[test]
fn sampled_subspace_sizes_are_reported() {
    let report = run_prepared(h8_far(), &config(Method::Sc, 2, 10, 1), None)
        .unwrap()
        .report;
    for row in &report.rows {
        let (a, b) = (row.dim_a.unwrap(), row.dim_b.unwrap());
        assert!((1..=36).contains(&a) && (1..=36).contains(&b));
        assert!(row.dim_dimer >= a * b);
        assert_eq!(row.ct_sampled, Some(0));
        assert!(row.intra_sampled.unwrap() >= 1);
    }
}

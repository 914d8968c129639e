use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use scqsci_ffi::*;

fn data(rel: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(rel);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = scqsci_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

const H4: &str = "H 0 0 0 0\nH 1.0583544 0 0 0\nH 1.0583544 1.0583544 0 0\nH 0 1.0583544 0 0\n";

fn h8(distance: f64) -> CString {
    let mut text = String::from(H4);
    for line in H4.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        text += &format!("H {} {} {distance} 1\n", f[1], f[2]);
    }
    CString::new(text).unwrap()
}

#[test]
fn system_energies() {
    let text = CString::new(H4).unwrap();
    let mut sys = ptr::null_mut();
    unsafe {
        assert_eq!(
            scqsci_system_from_geometry(text.as_ptr(), &mut sys),
            ScqsciStatus::Ok
        );
        assert!(scqsci_last_error().is_null());
        let mut info = ScqsciSystemInfo {
            n_orb: 0,
            n_alpha: 0,
            n_beta: 0,
            reference_energy: 0.0,
        };
        assert_eq!(scqsci_system_info(sys, &mut info), ScqsciStatus::Ok);
        assert_eq!((info.n_orb, info.n_alpha, info.n_beta), (4, 2, 2));
        assert!((info.reference_energy + 1.776770).abs() < 2e-6);
        let mut e = 0.0;
        assert_eq!(scqsci_system_full_ci(sys, &mut e), ScqsciStatus::Ok);
        assert!((e + 1.939432).abs() < 2e-6);
        scqsci_system_free(sys);
    }
}

#[test]
fn run_and_read_report() {
    let text = h8(100.0);
    let mut dimer = ptr::null_mut();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(
            scqsci_dimer_from_geometry(text.as_ptr(), &mut dimer),
            ScqsciStatus::Ok
        );
        let mut opts = scqsci_run_options_default();
        opts.k_max = 3;
        opts.shots = 10;
        opts.full_ci = true;
        assert_eq!(scqsci_run(dimer, &opts, &mut report), ScqsciStatus::Ok);
        assert_eq!(scqsci_report_row_count(report), 3);
        assert_eq!(scqsci_report_reference_count(report), 2);
        let mut row = std::mem::zeroed::<ScqsciEnergyRow>();
        for i in 0..3 {
            assert_eq!(scqsci_report_row(report, i, &mut row), ScqsciStatus::Ok);
            assert_eq!(row.k, i + 1);
            assert!(row.epsilon.is_nan() && row.e_far_dimer.is_nan());
            assert_eq!(row.e_int_hartree, row.e_dimer - row.e_a - row.e_b);
            assert!(row.e_int_hartree.abs() < 1e-7);
        }
        assert_eq!(
            scqsci_report_reference(report, 1, &mut row),
            ScqsciStatus::Ok
        );
        assert_eq!(row.dim_dimer, 4900);
        assert_eq!(
            scqsci_report_row(report, 3, &mut row),
            ScqsciStatus::OutOfRange
        );
        assert!(last_error().contains("row 3"));

        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(scqsci_report_to_json(report, &mut json), ScqsciStatus::Ok);
        let parsed =
            scqsci::workflow::Report::from_json(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(parsed.rows.len(), 3);
        scqsci_string_free(json);
        scqsci_report_free(report);
        scqsci_dimer_free(dimer);
    }
}

#[test]
fn size_consistency_and_refusal() {
    let mut far = ptr::null_mut();
    let mut fh = ptr::null_mut();
    let opts = ScqsciRunOptions {
        shots: 10,
        seed: 2,
        ..scqsci_run_options_default()
    };
    unsafe {
        assert_eq!(
            scqsci_dimer_from_geometry(h8(100.0).as_ptr(), &mut far),
            ScqsciStatus::Ok
        );
        let (mut worst, mut pass) = (f64::NAN, false);
        assert_eq!(
            scqsci_check_size_consistency(far, &opts, &mut worst, &mut pass),
            ScqsciStatus::Ok
        );
        assert!(pass && worst < 1e-7);

        let status = scqsci_dimer_load(
            data("fh/fh_dimer/dimer.fcidump").as_ptr(),
            data("fh/fh_dimer/monomer_a.fcidump").as_ptr(),
            data("fh/fh_dimer/monomer_b.fcidump").as_ptr(),
            data("fh/fh_dimer/orbital_map.txt").as_ptr(),
            ptr::null(),
            &mut fh,
        );
        assert_eq!(status, ScqsciStatus::Ok);
        assert_eq!(
            scqsci_check_size_consistency(fh, &opts, &mut worst, &mut pass),
            ScqsciStatus::Interacting
        );
        assert!(last_error().contains("interacting"));
        scqsci_dimer_free(far);
        scqsci_dimer_free(fh);
    }
}

#[test]
fn errors_and_null_handling() {
    let mut sys = ptr::null_mut();
    let mut dimer = ptr::null_mut();
    unsafe {
        assert_eq!(
            scqsci_system_load(ptr::null(), &mut sys),
            ScqsciStatus::NullPointer
        );
        assert!(sys.is_null());
        let missing = CString::new("/nonexistent/system.fcidump").unwrap();
        assert_eq!(
            scqsci_system_load(missing.as_ptr(), &mut sys),
            ScqsciStatus::Io
        );
        let bad = CString::new("He 0 0 0 0\nHe 1 0 0 0\n").unwrap();
        assert_eq!(
            scqsci_system_from_geometry(bad.as_ptr(), &mut sys),
            ScqsciStatus::InvalidInput
        );
        assert!(last_error().contains("hydrogen"));
        let invalid = [0xffu8, 0];
        assert_eq!(
            scqsci_system_from_geometry(invalid.as_ptr().cast(), &mut sys),
            ScqsciStatus::InvalidString
        );
        // overlapping fragments
        assert_eq!(
            scqsci_dimer_from_geometry(h8(1.5).as_ptr(), &mut dimer),
            ScqsciStatus::InvalidInput
        );
        assert!(dimer.is_null());
        let mut report = ptr::null_mut();
        let opts = scqsci_run_options_default();
        assert_eq!(
            scqsci_run(ptr::null(), &opts, &mut report),
            ScqsciStatus::NullPointer
        );
        assert_eq!(scqsci_report_row_count(ptr::null()), 0);
        scqsci_system_free(ptr::null_mut());
        scqsci_dimer_free(ptr::null_mut());
        scqsci_report_free(ptr::null_mut());
        scqsci_string_free(ptr::null_mut());
    }
}

#[test]
fn shot_scaling_arrays() {
    let c = [0.99f64.sqrt(), 0.1, 0.0];
    let (mut mono, mut dimer) = ([0.0; 3], [0.0; 3]);
    unsafe {
        let s = scqsci_shot_scaling(c.as_ptr(), 3, mono.as_mut_ptr(), dimer.as_mut_ptr());
        assert_eq!(s, ScqsciStatus::Ok);
        assert!((mono[1] - 100.0).abs() < 1e-9 && (dimer[1] - 1e4).abs() < 1e-7);
        assert!(mono[2].is_infinite());
        let bad = [0.5];
        let s = scqsci_shot_scaling(bad.as_ptr(), 1, mono.as_mut_ptr(), dimer.as_mut_ptr());
        assert_eq!(s, ScqsciStatus::InvalidInput);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(scqsci_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// `target/<profile>` holding the static library built with this test.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let lib = artifact_dir().join("libscqsci_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let build = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(
        build.status.success(),
        "{}",
        String::from_utf8_lossy(&build.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "exit {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

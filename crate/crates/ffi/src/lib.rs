//! C interface to the interaction-energy pipeline.
//!
//! Every fallible call returns a [`ScqsciStatus`]; on failure the message is
//! kept per thread and read with [`scqsci_last_error`]. Objects are opaque
//! handles released by their `_free` function. Absent optional energies are
//! reported as NaN, absent dimensions and steps as 0.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use scqsci::cidiag::full_ci;
use scqsci::integrals::Geometry;
use scqsci::workflow::{
    load_system, prepare_dimer, run_prepared, shot_scaling_estimate,
    size_consistency_check_prepared, DimerInputs, EnergyRow, IntegralSource, Method, PreparedDimer,
    PreparedSystem, Report, RunConfig,
};
use scqsci::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScqsciStatus {
    Ok = 0,
    NullPointer = 1,
    /// A string argument is not valid UTF-8.
    InvalidString = 2,
    Io = 3,
    Parse = 4,
    InvalidInput = 5,
    NotConverged = 6,
    /// The size-consistency check was given coupled fragments.
    Interacting = 7,
    TooLarge = 8,
    OutOfRange = 9,
    /// A Rust panic was caught at the boundary.
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScqsciMethod {
    Sc = 0,
    Org = 1,
    ScHci = 2,
    OrgDimerApproach = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScqsciRunOptions {
    pub method: ScqsciMethod,
    /// Rows are reported for K = 1..k_max.
    pub k_max: usize,
    pub shots: usize,
    pub seed: u64,
    pub dt: f64,
    /// HCI threshold, used by `SCQSCI_METHOD_SC_HCI` only.
    pub epsilon: f64,
    /// Add a full-CI reference row.
    pub full_ci: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScqsciSystemInfo {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Hartree-Fock determinant energy, Hartree.
    pub reference_energy: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScqsciEnergyRow {
    pub k: usize,
    pub epsilon: f64,
    pub e_dimer: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_far_dimer: f64,
    pub e_int_hartree: f64,
    pub e_int_kcal: f64,
    pub dim_dimer: usize,
    pub dim_a: usize,
    pub dim_b: usize,
}

pub struct ScqsciSystem {
    inner: PreparedSystem,
}

pub struct ScqsciDimer {
    inner: PreparedDimer,
}

pub struct ScqsciReport {
    inner: Report,
}

struct Failure {
    status: ScqsciStatus,
    message: String,
}

impl Failure {
    fn new(status: ScqsciStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

fn status_of(e: &Error) -> ScqsciStatus {
    match e {
        Error::Context { source, .. } => status_of(source),
        Error::Io(_) => ScqsciStatus::Io,
        Error::Fcidump { .. } | Error::Parse(_) | Error::Json(_) => ScqsciStatus::Parse,
        Error::ScfNotConverged { .. } | Error::DavidsonNotConverged { .. } => {
            ScqsciStatus::NotConverged
        }
        Error::InteractingFragments { .. } => ScqsciStatus::Interacting,
        Error::SystemTooLarge { .. } | Error::BudgetExceeded { .. } => ScqsciStatus::TooLarge,
        _ => ScqsciStatus::InvalidInput,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(status_of(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Runs `f`, records its failure and converts panics.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScqsciStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let what = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Err(Failure::new(ScqsciStatus::Panic, format!("panic: {what}")))
    });
    match outcome {
        Ok(()) => {
            set_last_error(None);
            ScqsciStatus::Ok
        }
        Err(f) => {
            set_last_error(Some(f.message));
            f.status
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass pointers obtained from this library or to live C objects
    unsafe { p.as_ref() }
        .ok_or_else(|| Failure::new(ScqsciStatus::NullPointer, format!("{what} is NULL")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: as above; the caller owns the output slot
    unsafe { p.as_mut() }
        .ok_or_else(|| Failure::new(ScqsciStatus::NullPointer, format!("{what} is NULL")))
}

fn string_arg(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::new(
            ScqsciStatus::NullPointer,
            format!("{what} is NULL"),
        ));
    }
    // SAFETY: non-null and NUL-terminated per the API contract
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::new(ScqsciStatus::InvalidString, format!("{what} is not UTF-8")))
}

fn optional_path(p: *const c_char, what: &str) -> Result<Option<IntegralSource>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    let path = PathBuf::from(string_arg(p, what)?);
    Ok(Some(IntegralSource::from_path(&path)?))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn scqsci_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn scqsci_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn scqsci_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub extern "C" fn scqsci_run_options_default() -> ScqsciRunOptions {
    ScqsciRunOptions {
        method: ScqsciMethod::Sc,
        k_max: 5,
        shots: 10_000,
        seed: 0,
        dt: 1.0,
        epsilon: 1e-3,
        full_ci: false,
    }
}

/// Loads an FCIDUMP file or a hydrogen geometry file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_system_load(
    path: *const c_char,
    out: *mut *mut ScqsciSystem,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let source = IntegralSource::from_path(&PathBuf::from(string_arg(path, "path")?))?;
        *out = boxed(ScqsciSystem {
            inner: load_system(&source)?,
        });
        Ok(())
    })
}

/// Builds a hydrogen cluster from geometry text (`element x y z fragment`, Å).
///
/// # Safety
/// `text` is a NUL-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_system_from_geometry(
    text: *const c_char,
    out: *mut *mut ScqsciSystem,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let geometry = Geometry::parse(&string_arg(text, "text")?)?;
        *out = boxed(ScqsciSystem {
            inner: load_system(&IntegralSource::Hydrogen(geometry))?,
        });
        Ok(())
    })
}

/// # Safety
/// `system` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn scqsci_system_free(system: *mut ScqsciSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// # Safety
/// `system` is a live handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_system_info(
    system: *const ScqsciSystem,
    out: *mut ScqsciSystemInfo,
) -> ScqsciStatus {
    guard(|| {
        let sys = &non_null(system, "system")?.inner;
        *out_ptr(out, "out")? = ScqsciSystemInfo {
            n_orb: sys.integrals.n_orb(),
            n_alpha: sys.integrals.n_alpha(),
            n_beta: sys.integrals.n_beta(),
            reference_energy: sys.reference_energy,
        };
        Ok(())
    })
}

/// Full-CI ground-state energy in the system's own particle sector.
///
/// # Safety
/// `system` is a live handle; `energy` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_system_full_ci(
    system: *const ScqsciSystem,
    energy: *mut f64,
) -> ScqsciStatus {
    guard(|| {
        let ints = &non_null(system, "system")?.inner.integrals;
        let energy = out_ptr(energy, "energy")?;
        *energy = full_ci(ints, ints.n_alpha(), ints.n_beta())?.energy;
        Ok(())
    })
}

/// Dimer from integral files. `monomer_a`, `monomer_b` and `orbital_map`
/// are required for the supramolecular methods; `far_dimer` only for the
/// dimer approach. Any of them may be NULL.
///
/// # Safety
/// String arguments are NULL or NUL-terminated; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_dimer_load(
    dimer: *const c_char,
    monomer_a: *const c_char,
    monomer_b: *const c_char,
    orbital_map: *const c_char,
    far_dimer: *const c_char,
    out: *mut *mut ScqsciDimer,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let inputs = DimerInputs {
            dimer: IntegralSource::from_path(&PathBuf::from(string_arg(dimer, "dimer")?))?,
            monomer_a: optional_path(monomer_a, "monomer_a")?,
            monomer_b: optional_path(monomer_b, "monomer_b")?,
            orbital_map: if orbital_map.is_null() {
                None
            } else {
                Some(PathBuf::from(string_arg(orbital_map, "orbital_map")?))
            },
            far_dimer: optional_path(far_dimer, "far_dimer")?,
        };
        *out = boxed(ScqsciDimer {
            inner: prepare_dimer(&inputs)?,
        });
        Ok(())
    })
}

/// Two-fragment hydrogen dimer from geometry text; fragments, monomers and
/// the orbital map are derived from the fragment column.
///
/// # Safety
/// `text` is NUL-terminated; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_dimer_from_geometry(
    text: *const c_char,
    out: *mut *mut ScqsciDimer,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let geometry = Geometry::parse(&string_arg(text, "text")?)?;
        *out = boxed(ScqsciDimer {
            inner: prepare_dimer(&DimerInputs::hydrogen(geometry))?,
        });
        Ok(())
    })
}

/// # Safety
/// `dimer` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn scqsci_dimer_free(dimer: *mut ScqsciDimer) {
    if !dimer.is_null() {
        drop(Box::from_raw(dimer));
    }
}

fn run_config(opts: &ScqsciRunOptions) -> RunConfig {
    // the inputs field is unused by run_prepared
    let mut cfg = RunConfig::new(
        "ffi",
        DimerInputs::hydrogen(Geometry::h4_square(2.0, [0.0; 3])),
    );
    cfg.method = match opts.method {
        ScqsciMethod::Sc => Method::Sc,
        ScqsciMethod::Org => Method::Org,
        ScqsciMethod::ScHci => Method::ScHci,
        ScqsciMethod::OrgDimerApproach => Method::OrgDimerApproach,
    };
    cfg.k_max = opts.k_max;
    cfg.shots = opts.shots;
    cfg.seed = opts.seed;
    cfg.dt = opts.dt;
    cfg.epsilon = vec![opts.epsilon];
    cfg.full_ci = opts.full_ci;
    cfg
}

/// Runs the configured method and returns its report.
///
/// # Safety
/// `dimer` is a live handle, `options` points to a valid struct and `out`
/// to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_run(
    dimer: *const ScqsciDimer,
    options: *const ScqsciRunOptions,
    out: *mut *mut ScqsciReport,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let prep = &non_null(dimer, "dimer")?.inner;
        let cfg = run_config(non_null(options, "options")?);
        let outcome = run_prepared(prep, &cfg, None)?;
        *out = boxed(ScqsciReport {
            inner: outcome.report,
        });
        Ok(())
    })
}

/// Size-consistency check on a non-interacting dimer. Returns
/// `SCQSCI_STATUS_INTERACTING` if the fragments are coupled.
///
/// # Safety
/// `dimer` is a live handle, `options` valid, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn scqsci_check_size_consistency(
    dimer: *const ScqsciDimer,
    options: *const ScqsciRunOptions,
    max_abs_e_int: *mut f64,
    pass: *mut bool,
) -> ScqsciStatus {
    guard(|| {
        let prep = &non_null(dimer, "dimer")?.inner;
        let cfg = run_config(non_null(options, "options")?);
        let max_abs_e_int = out_ptr(max_abs_e_int, "max_abs_e_int")?;
        let pass = out_ptr(pass, "pass")?;
        let check = size_consistency_check_prepared(prep, &cfg)?;
        *max_abs_e_int = check.max_abs_e_int;
        *pass = check.pass;
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_free(report: *mut ScqsciReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of per-K (or per-threshold) rows; 0 for a NULL report.
///
/// # Safety
/// `report` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_row_count(report: *const ScqsciReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.rows.len())
}

/// Number of reference rows (RHF, then full-CI when requested).
///
/// # Safety
/// `report` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_reference_count(report: *const ScqsciReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.references.len())
}

fn c_row(row: &EnergyRow) -> ScqsciEnergyRow {
    let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
    ScqsciEnergyRow {
        k: row.k.unwrap_or(0),
        epsilon: nan(row.epsilon),
        e_dimer: row.e_dimer,
        e_a: nan(row.e_a),
        e_b: nan(row.e_b),
        e_far_dimer: nan(row.e_far_dimer),
        e_int_hartree: nan(row.e_int_hartree),
        e_int_kcal: nan(row.e_int_kcal),
        dim_dimer: row.dim_dimer,
        dim_a: row.dim_a.unwrap_or(0),
        dim_b: row.dim_b.unwrap_or(0),
    }
}

fn report_row(
    report: *const ScqsciReport,
    index: usize,
    out: *mut ScqsciEnergyRow,
    references: bool,
) -> ScqsciStatus {
    guard(|| {
        let r = &non_null(report, "report")?.inner;
        let rows = if references { &r.references } else { &r.rows };
        let row = rows.get(index).ok_or_else(|| {
            Failure::new(
                ScqsciStatus::OutOfRange,
                format!("row {index} of {}", rows.len()),
            )
        })?;
        *out_ptr(out, "out")? = c_row(row);
        Ok(())
    })
}

/// # Safety
/// `report` is a live handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_row(
    report: *const ScqsciReport,
    index: usize,
    out: *mut ScqsciEnergyRow,
) -> ScqsciStatus {
    report_row(report, index, out, false)
}

/// # Safety
/// `report` is a live handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_reference(
    report: *const ScqsciReport,
    index: usize,
    out: *mut ScqsciEnergyRow,
) -> ScqsciStatus {
    report_row(report, index, out, true)
}

/// Report as JSON; release with `scqsci_string_free`.
///
/// # Safety
/// `report` is a live handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn scqsci_report_to_json(
    report: *const ScqsciReport,
    out: *mut *mut c_char,
) -> ScqsciStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let json = non_null(report, "report")?.inner.to_json();
        *out = CString::new(json).unwrap().into_raw();
        Ok(())
    })
}

/// Expected shots `1/c²` (monomer) and `1/c⁴` (dimer) for `n` normalized
/// coefficients. Zero coefficients give infinity.
///
/// # Safety
/// `coefficients` holds `n` values; both outputs have room for `n`.
#[no_mangle]
pub unsafe extern "C" fn scqsci_shot_scaling(
    coefficients: *const f64,
    n: usize,
    monomer_shots: *mut f64,
    dimer_shots: *mut f64,
) -> ScqsciStatus {
    guard(|| {
        if coefficients.is_null() || monomer_shots.is_null() || dimer_shots.is_null() {
            return Err(Failure::new(ScqsciStatus::NullPointer, "NULL array"));
        }
        let c = std::slice::from_raw_parts(coefficients, n);
        let rows = shot_scaling_estimate(c)?;
        let mono = std::slice::from_raw_parts_mut(monomer_shots, n);
        let dimer = std::slice::from_raw_parts_mut(dimer_shots, n);
        for (i, r) in rows.iter().enumerate() {
            mono[i] = r.monomer_shots;
            dimer[i] = r.dimer_shots;
        }
        Ok(())
    })
}

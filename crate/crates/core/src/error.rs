use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported element `{0}`: the built-in STO-3G engine handles hydrogen only; supply an FCIDUMP file instead")]
    UnsupportedElement(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("SCF did not converge in {iterations} iterations (last RMS density change {last_density_change:.3e})")]
    ScfNotConverged {
        iterations: usize,
        last_density_change: f64,
    },

    #[error("RHF requires a closed-shell system (n_alpha = {n_alpha}, n_beta = {n_beta})")]
    OpenShell { n_alpha: usize, n_beta: usize },

    #[error("fragments overlap: largest inter-fragment AO overlap {overlap:.3e} exceeds {threshold:.1e}")]
    FragmentsOverlap { overlap: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("FCIDUMP {path}: line {line}: {msg}")]
    Fcidump {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{n_electrons} electrons of one spin do not fit in {n_orbitals} orbitals")]
    TooManyElectrons {
        n_electrons: usize,
        n_orbitals: usize,
    },

    #[error("determinants from different particle sectors: {0}")]
    MixedSectors(String),

    #[error("{n_qubits} qubits exceeds the statevector limit of {limit}")]
    SystemTooLarge { n_qubits: usize, limit: usize },

    #[error("cannot split a charge-transfer determinant {0}")]
    NotIntraMonomer(String),

    #[error("invalid orbital partition: {0}")]
    InvalidPartition(String),

    #[error("HCI threshold must be positive, got {0}")]
    InvalidThreshold(f64),

    #[error("Davidson did not converge in {iterations} iterations (best residual {residual:.3e})")]
    DavidsonNotConverged { iterations: usize, residual: f64 },

    #[error("sector dimension {dimension} exceeds the configured budget {budget}")]
    BudgetExceeded { dimension: usize, budget: usize },

    #[error("inputs are interacting: largest cross-fragment coupling {coupling:.3e} exceeds {threshold:.1e}")]
    InteractingFragments { coupling: f64, threshold: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.context(context()))
    }
}

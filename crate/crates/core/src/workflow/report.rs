use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "scqsci-report/1";

/// One line of a results table: a sampled subspace at step `k`, an HCI
/// threshold, or a reference method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub label: String,
    pub k: Option<usize>,
    pub epsilon: Option<f64>,
    pub e_dimer: f64,
    pub e_a: Option<f64>,
    pub e_b: Option<f64>,
    /// `E_A···B` for the dimer approach.
    pub e_far_dimer: Option<f64>,
    pub dim_dimer: usize,
    pub dim_a: Option<usize>,
    pub dim_b: Option<usize>,
    pub dim_far_dimer: Option<usize>,
    /// Distinct sampled determinants routed to the monomers / the CT set.
    pub intra_sampled: Option<usize>,
    pub ct_sampled: Option<usize>,
    /// Energy of the selected dimer space before product assembly (sc-hci).
    pub e_dimer_hci: Option<f64>,
    /// Absent when the row has neither monomer nor separated-dimer energies.
    pub e_int_hartree: Option<f64>,
    pub e_int_kcal: Option<f64>,
}

impl EnergyRow {
    pub fn new(label: impl Into<String>, e_dimer: f64, dim_dimer: usize) -> Self {
        EnergyRow {
            label: label.into(),
            k: None,
            epsilon: None,
            e_dimer,
            e_a: None,
            e_b: None,
            e_far_dimer: None,
            dim_dimer,
            dim_a: None,
            dim_b: None,
            dim_far_dimer: None,
            intra_sampled: None,
            ct_sampled: None,
            e_dimer_hci: None,
            e_int_hartree: None,
            e_int_kcal: None,
        }
    }

    /// Interaction energy in Hartree from the stored energies: dimer
    /// approach if `e_far_dimer` is set, supramolecular otherwise.
    pub fn interaction_hartree(&self) -> Option<f64> {
        match (self.e_far_dimer, self.e_a, self.e_b) {
            (Some(far), _, _) => Some(self.e_dimer - far),
            (None, Some(a), Some(b)) => Some(self.e_dimer - a - b),
            _ => None,
        }
    }

    pub(crate) fn finish(mut self, kcal_per_hartree: f64) -> Self {
        self.e_int_hartree = self.interaction_hartree();
        self.e_int_kcal = self.e_int_hartree.map(|e| e * kcal_per_hartree);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub method: String,
    pub seed: u64,
    pub shots: usize,
    pub dt: f64,
    pub k_values: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub monomer_sampling: String,
    pub trotter: String,
    pub kcal_per_hartree: f64,
    /// `generated`, or `loaded` for a pool supplied by the caller.
    pub pool: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub system: String,
    pub provenance: Provenance,
    pub references: Vec<EnergyRow>,
    pub rows: Vec<EnergyRow>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::from(e).context(format!("writing {}", path.display())))
    }

    /// Recomputes every interaction energy from the stored energies and
    /// the stored conversion constant; any bitwise difference is an error.
    pub fn check_arithmetic(&self) -> Result<()> {
        let factor = self.provenance.kcal_per_hartree;
        for row in self.references.iter().chain(&self.rows) {
            let e = row.interaction_hartree();
            let bits = |x: Option<f64>| x.map(f64::to_bits);
            let kcal = e.map(|e| e * factor);
            if bits(e) != bits(row.e_int_hartree) || bits(kcal) != bits(row.e_int_kcal) {
                return Err(Error::Config(format!(
                    "row `{}`: stored interaction energy {:?} Ha / {:?} kcal/mol, recomputed {:?} / {:?}",
                    row.label, row.e_int_hartree, row.e_int_kcal, e, kcal
                )));
            }
        }
        Ok(())
    }

    /// Fixed-width table in the layout of the published result tables.
    pub fn to_table(&self) -> String {
        let p = &self.provenance;
        let mut out = String::new();
        writeln!(
            out,
            "{}  method={}  shots={}  dt={}  seed={}",
            self.system, p.method, p.shots, p.dt, p.seed
        )
        .unwrap();
        let far = self
            .rows
            .iter()
            .chain(&self.references)
            .any(|r| r.e_far_dimer.is_some());
        let (ea, eb, dims) = if far {
            ("E(A...B)", "", "dim far/AB")
        } else {
            ("E(A)", "E(B)", "dim A/B/AB")
        };
        writeln!(
            out,
            "{:<10} {:>15} {:>15} {:>15} {:>20} {:>7} {:>6} {:>14} {:>11}",
            "", ea, eb, "E(AB)", dims, "intra", "CT", "E_int/Ha", "kcal/mol"
        )
        .unwrap();
        let fmt_e = |e: Option<f64>| e.map_or(String::new(), |e| format!("{e:.6}"));
        let fmt_i = |e: Option<f64>, w: &str| {
            e.map_or("-".to_string(), |e| {
                if w == "ha" {
                    format!("{e:.3e}")
                } else {
                    // no "-0.000" for values that round to zero
                    let s = format!("{e:.3}");
                    if s == "-0.000" {
                        s[1..].to_string()
                    } else {
                        s
                    }
                }
            })
        };
        let fmt_n = |n: Option<usize>| n.map_or("-".to_string(), |n| n.to_string());
        let line = |out: &mut String, r: &EnergyRow| {
            let (first, second, dims) = if far {
                (
                    fmt_e(r.e_far_dimer),
                    String::new(),
                    format!("{}/{}", fmt_n(r.dim_far_dimer), r.dim_dimer),
                )
            } else {
                (
                    fmt_e(r.e_a),
                    fmt_e(r.e_b),
                    format!("{}/{}/{}", fmt_n(r.dim_a), fmt_n(r.dim_b), r.dim_dimer),
                )
            };
            writeln!(
                out,
                "{:<10} {:>15} {:>15} {:>15.6} {:>20} {:>7} {:>6} {:>14} {:>11}",
                r.label,
                first,
                second,
                r.e_dimer,
                dims,
                fmt_n(r.intra_sampled),
                fmt_n(r.ct_sampled),
                fmt_i(r.e_int_hartree, "ha"),
                fmt_i(r.e_int_kcal, "kcal")
            )
            .unwrap();
        };
        for r in &self.rows {
            line(&mut out, r);
        }
        if !self.references.is_empty() {
            writeln!(out, "{}", "-".repeat(122)).unwrap();
            for r in &self.references {
                line(&mut out, r);
            }
        }
        out
    }
}

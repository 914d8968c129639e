//! Interaction-energy pipelines, size-consistency checks and reports.

mod pipeline;
mod report;
mod system;

pub use pipeline::{
    run_pipeline, run_prepared, size_consistency_check, size_consistency_check_prepared, Method,
    MonomerSampling, RunConfig, RunOutcome, SizeConsistencyCheck, COUPLING_TOLERANCE,
    SIZE_CONSISTENCY_TOLERANCE,
};
pub use report::{EnergyRow, Provenance, Report, REPORT_SCHEMA};
pub use system::{
    cross_fragment_coupling, load_system, prepare_dimer, DimerInputs, FragmentSystems,
    IntegralSource, PreparedDimer, PreparedSystem,
};

use crate::error::{Error, Result};

/// kcal mol⁻¹ per Hartree.
pub const KCAL_PER_HARTREE: f64 = 627.509474;

/// `E_AB − E_A − E_B` in kcal mol⁻¹.
pub fn supramolecular_interaction(e_ab: f64, e_a: f64, e_b: f64) -> f64 {
    (e_ab - e_a - e_b) * KCAL_PER_HARTREE
}

/// `E_AB − E_A···B` in kcal mol⁻¹.
pub fn dimer_approach_interaction(e_ab: f64, e_far: f64) -> f64 {
    (e_ab - e_far) * KCAL_PER_HARTREE
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotScalingRow {
    pub index: usize,
    pub coefficient: f64,
    /// `1/|c|²`; infinite for a zero coefficient.
    pub monomer_shots: f64,
    /// `1/|c|⁴`, the square of `monomer_shots`.
    pub dimer_shots: f64,
}

/// Expected repetitions before a determinant with coefficient `c_j` is
/// observed once, for a monomer and for a dimer whose coefficient is the
/// product `c_j · c_j`.
pub fn shot_scaling_estimate(coefficients: &[f64]) -> Result<Vec<ShotScalingRow>> {
    let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Config(format!(
            "coefficients must be normalized, norm is {norm}"
        )));
    }
    Ok(coefficients
        .iter()
        .enumerate()
        .map(|(index, &c)| {
            let monomer_shots = 1.0 / (c * c);
            ShotScalingRow {
                index,
                coefficient: c,
                monomer_shots,
                dimer_shots: monomer_shots * monomer_shots,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interaction_examples() {
        let e = supramolecular_interaction(-200.103681, -100.048655, -100.048558);
        assert_eq!(format!("{e:.3}"), "-4.059");
        let e = supramolecular_interaction(-176.142652, -76.080688, -100.048023);
        assert_eq!(format!("{e:.3}"), "-8.748");
        assert_eq!(supramolecular_interaction(-3.0, -1.0, -2.0), 0.0);
        let e = dimer_approach_interaction(-200.103653, -200.097202);
        assert_eq!(format!("{e:.3}"), "-4.048");
        let e = dimer_approach_interaction(-176.142533, -176.128661);
        assert_eq!(format!("{e:.3}"), "-8.705");
        assert_eq!(dimer_approach_interaction(-1.5, -1.5), 0.0);
    }

    #[test]
    fn shot_scaling() {
        let c = [0.99f64.sqrt(), 0.1, 0.0];
        let rows = shot_scaling_estimate(&c).unwrap();
        assert!((rows[1].monomer_shots - 100.0).abs() < 1e-9);
        assert!((rows[1].dimer_shots - 1e4).abs() < 1e-7);
        assert!(rows[2].monomer_shots.is_infinite());
        for r in &rows {
            assert_eq!(r.dimer_shots, r.monomer_shots * r.monomer_shots);
        }
        assert_eq!(shot_scaling_estimate(&[1.0]).unwrap()[0].dimer_shots, 1.0);
        assert!(shot_scaling_estimate(&[0.5]).is_err());
    }
}

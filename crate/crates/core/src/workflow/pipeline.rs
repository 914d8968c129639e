use std::fmt;
use std::str::FromStr;

use super::report::{EnergyRow, Provenance, Report, REPORT_SCHEMA};
use super::system::{cross_fragment_coupling, prepare_dimer, DimerInputs, PreparedDimer};
use super::KCAL_PER_HARTREE;
use crate::cidiag::{binomial, full_ci, subspace_ground_state};
use crate::determinants::DeterminantSpace;
use crate::error::{Error, Result, ResultExt};
use crate::hamsim::SamplePool;
use crate::integrals::IntegralSet;
use crate::subspace::{
    assemble_dimer_space, build_org_subspace, build_sc_subspaces, hci_select, sc_subspaces_from,
};

/// Largest cross-fragment coupling accepted as non-interacting.
pub const COUPLING_TOLERANCE: f64 = 1e-10;

/// `|E_AB − E_A − E_B|` allowed by the size-consistency check, Hartree.
pub const SIZE_CONSISTENCY_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Product of split monomer subspaces plus charge-transfer samples.
    Sc,
    /// Symmetry-completed distinct samples of the dimer.
    Org,
    /// HCI-selected dimer determinants fed through the sc construction.
    ScHci,
    /// Org dimer energy against an org calculation on the separated dimer.
    OrgDimerApproach,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sc => "sc",
            Method::Org => "org",
            Method::ScHci => "sc-hci",
            Method::OrgDimerApproach => "org-dimer-approach",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sc" => Ok(Method::Sc),
            "org" => Ok(Method::Org),
            "sc-hci" => Ok(Method::ScHci),
            "org-dimer-approach" => Ok(Method::OrgDimerApproach),
            _ => Err(Error::Config(format!(
                "unknown method `{s}` (expected sc, org, sc-hci or org-dimer-approach)"
            ))),
        }
    }
}

/// Where org monomer energies come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomerSampling {
    /// Split intra-monomer samples of the dimer pool (same monomer spaces as sc).
    Split,
    /// Separate pools sampled from each monomer Hamiltonian.
    Independent,
}

impl fmt::Display for MonomerSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonomerSampling::Split => "split",
            MonomerSampling::Independent => "independent",
        })
    }
}

impl FromStr for MonomerSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(MonomerSampling::Split),
            "independent" => Ok(MonomerSampling::Independent),
            _ => Err(Error::Config(format!(
                "unknown monomer sampling `{s}` (expected split or independent)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: String,
    pub inputs: DimerInputs,
    pub method: Method,
    pub dt: f64,
    pub k_max: usize,
    /// Additional evolution steps reported after `1..=k_max`.
    pub extra_k: Vec<usize>,
    pub shots: usize,
    pub seed: u64,
    pub epsilon: Vec<f64>,
    pub monomer_sampling: MonomerSampling,
    /// Also compute full-CI reference rows.
    pub full_ci: bool,
    pub kcal_per_hartree: f64,
}

impl RunConfig {
    pub fn new(system: &str, inputs: DimerInputs) -> Self {
        RunConfig {
            system: system.to_string(),
            inputs,
            method: Method::Sc,
            dt: 1.0,
            k_max: 5,
            extra_k: Vec::new(),
            shots: 10_000,
            seed: 0,
            epsilon: vec![1e-3],
            monomer_sampling: MonomerSampling::Split,
            full_ci: false,
            kcal_per_hartree: KCAL_PER_HARTREE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 || self.extra_k.contains(&0) {
            return Err(Error::Config("evolution steps K must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if !self.dt.is_finite() {
            return Err(Error::Config(format!(
                "time step {} is not finite",
                self.dt
            )));
        }
        if self.method == Method::ScHci {
            if self.epsilon.is_empty() {
                return Err(Error::Config("sc-hci needs at least one threshold".into()));
            }
            if let Some(&e) = self.epsilon.iter().find(|&&e| !(e.is_finite() && e > 0.0)) {
                return Err(Error::InvalidThreshold(e));
            }
        }
        Ok(())
    }

    /// `1..=k_max` followed by any larger extra steps, ascending.
    pub fn k_values(&self) -> Vec<usize> {
        let mut k: Vec<usize> = (1..=self.k_max)
            .chain(self.extra_k.iter().copied())
            .collect();
        k.sort_unstable();
        k.dedup();
        k
    }
}

/// Report plus the artifacts of the last row, for dumps.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    /// Dimer sample pool (absent for sc-hci).
    pub pool: Option<SamplePool>,
    pub final_space: Option<DeterminantSpace>,
}

fn ground(space: &DeterminantSpace, ints: &IntegralSet) -> Result<f64> {
    Ok(subspace_ground_state(space, ints)?.energy)
}

fn check_pool(pool: &SamplePool, ints: &IntegralSet, ks: &[usize]) -> Result<()> {
    if (pool.n_orb, pool.n_alpha, pool.n_beta) != (ints.n_orb(), ints.n_alpha(), ints.n_beta()) {
        return Err(Error::MixedSectors(format!(
            "pool has {} orbitals in sector ({}, {}), dimer has {} in ({}, {})",
            pool.n_orb,
            pool.n_alpha,
            pool.n_beta,
            ints.n_orb(),
            ints.n_alpha(),
            ints.n_beta()
        )));
    }
    if let Some(k) = ks.iter().find(|&&k| pool.counts(k).is_none()) {
        return Err(Error::Config(format!("pool has no samples for K = {k}")));
    }
    Ok(())
}

/// Prepares the inputs and runs the configured method.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let prepared = prepare_dimer(&cfg.inputs)?;
    Ok(run_prepared(&prepared, cfg, None)?.report)
}

/// Runs on already prepared systems. `pool` replaces sampling of the dimer
/// (e.g. counts from hardware); it must hold every requested `K`.
pub fn run_prepared(
    prep: &PreparedDimer,
    cfg: &RunConfig,
    pool: Option<SamplePool>,
) -> Result<RunOutcome> {
    cfg.validate()?;
    let dimer = &prep.dimer.integrals;
    let ks = cfg.k_values();
    let k_top = *ks.last().unwrap();
    let sample = |name: &str, ints: &IntegralSet| {
        SamplePool::generate(name, ints, cfg.dt, k_top, cfg.shots, cfg.seed)
            .context(|| format!("sampling {name}"))
    };

    let loaded = pool.is_some();
    let pool = match (cfg.method, pool) {
        (Method::ScHci, _) => None,
        (_, Some(p)) => {
            check_pool(&p, dimer, &ks)?;
            Some(p)
        }
        (_, None) => Some(sample(&cfg.system, dimer)?),
    };
    let (shots, dt, seed) = pool
        .as_ref()
        .map_or((cfg.shots, cfg.dt, cfg.seed), |p| (p.shots, p.dt, p.seed));

    let mut rows = Vec::new();
    let mut final_space = None;
    match cfg.method {
        Method::Sc | Method::Org => {
            let frag = prep.fragments()?;
            let part = &frag.partition;
            let pool = pool.as_ref().unwrap();
            let monomer_pools = if cfg.method == Method::Org
                && cfg.monomer_sampling == MonomerSampling::Independent
            {
                Some([
                    sample("monomer A", &frag.monomers[0].integrals)?,
                    sample("monomer B", &frag.monomers[1].integrals)?,
                ])
            } else {
                None
            };
            for &k in &ks {
                let pk = pool.truncated(k);
                let sc = build_sc_subspaces(&pk, part).context(|| format!("K = {k}"))?;
                let (space, ea, eb, dim_a, dim_b) = match (&monomer_pools, cfg.method) {
                    (Some(mp), _) => {
                        let sa = build_org_subspace(&mp[0].truncated(k))?;
                        let sb = build_org_subspace(&mp[1].truncated(k))?;
                        (
                            build_org_subspace(&pk)?,
                            ground(&sa, &frag.monomers[0].integrals),
                            ground(&sb, &frag.monomers[1].integrals),
                            sa.len(),
                            sb.len(),
                        )
                    }
                    (None, m) => (
                        if m == Method::Sc {
                            assemble_dimer_space(&sc, part)?
                        } else {
                            build_org_subspace(&pk)?
                        },
                        ground(&sc.s_a, &frag.monomers[0].integrals),
                        ground(&sc.s_b, &frag.monomers[1].integrals),
                        sc.s_a.len(),
                        sc.s_b.len(),
                    ),
                };
                let eab = ground(&space, dimer).context(|| format!("dimer, K = {k}"))?;
                let mut row = EnergyRow::new(format!("K={k}"), eab, space.len());
                row.k = Some(k);
                row.e_a = Some(ea.context(|| format!("monomer A, K = {k}"))?);
                row.e_b = Some(eb.context(|| format!("monomer B, K = {k}"))?);
                row.dim_a = Some(dim_a);
                row.dim_b = Some(dim_b);
                row.intra_sampled = Some(sc.intra_sampled);
                row.ct_sampled = Some(sc.ct_sampled);
                rows.push(row.finish(cfg.kcal_per_hartree));
                final_space = Some(space);
            }
        }
        Method::OrgDimerApproach => {
            let far = prep.far_dimer.as_ref().ok_or_else(|| {
                Error::Config("org-dimer-approach needs a separated dimer input".into())
            })?;
            let pool = pool.as_ref().unwrap();
            let far_pool = sample("far dimer", &far.integrals)?;
            for &k in &ks {
                let pk = pool.truncated(k);
                let space = build_org_subspace(&pk)?;
                let far_space = build_org_subspace(&far_pool.truncated(k))?;
                let eab = ground(&space, dimer).context(|| format!("dimer, K = {k}"))?;
                let efar =
                    ground(&far_space, &far.integrals).context(|| format!("far dimer, K = {k}"))?;
                let mut row = EnergyRow::new(format!("K={k}"), eab, space.len());
                row.k = Some(k);
                row.e_far_dimer = Some(efar);
                row.dim_far_dimer = Some(far_space.len());
                if let Some(frag) = &prep.fragments {
                    let sc = build_sc_subspaces(&pk, &frag.partition)?;
                    row.intra_sampled = Some(sc.intra_sampled);
                    row.ct_sampled = Some(sc.ct_sampled);
                }
                rows.push(row.finish(cfg.kcal_per_hartree));
                final_space = Some(space);
            }
        }
        Method::ScHci => {
            let frag = prep.fragments()?;
            let part = &frag.partition;
            for &eps in &cfg.epsilon {
                let hci = hci_select(dimer, eps).context(|| format!("HCI, epsilon = {eps:e}"))?;
                let sc = sc_subspaces_from(hci.space.dets(), part)?;
                let space = assemble_dimer_space(&sc, part)?;
                let mut row = EnergyRow::new(
                    format!("eps={eps:.1e}"),
                    ground(&space, dimer)?,
                    space.len(),
                );
                row.epsilon = Some(eps);
                row.e_a = Some(ground(&sc.s_a, &frag.monomers[0].integrals)?);
                row.e_b = Some(ground(&sc.s_b, &frag.monomers[1].integrals)?);
                row.dim_a = Some(sc.s_a.len());
                row.dim_b = Some(sc.s_b.len());
                row.intra_sampled = Some(sc.intra_sampled);
                row.ct_sampled = Some(sc.ct_sampled);
                row.e_dimer_hci = Some(hci.ground.energy);
                rows.push(row.finish(cfg.kcal_per_hartree));
                final_space = Some(space);
            }
        }
    }

    let references = reference_rows(prep, cfg)?;
    let report = Report {
        schema: REPORT_SCHEMA.to_string(),
        system: cfg.system.clone(),
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            method: cfg.method.to_string(),
            seed,
            shots,
            dt,
            k_values: if cfg.method == Method::ScHci {
                Vec::new()
            } else {
                ks
            },
            epsilon: if cfg.method == Method::ScHci {
                cfg.epsilon.clone()
            } else {
                Vec::new()
            },
            monomer_sampling: cfg.monomer_sampling.to_string(),
            trotter: "second-order, one step per K".to_string(),
            kcal_per_hartree: cfg.kcal_per_hartree,
            pool: if loaded { "loaded" } else { "generated" }.to_string(),
        },
        references,
        rows,
    };
    Ok(RunOutcome {
        report,
        pool,
        final_space,
    })
}

fn sector_dim(ints: &IntegralSet) -> usize {
    binomial(ints.n_orb(), ints.n_alpha()) * binomial(ints.n_orb(), ints.n_beta())
}

fn reference_rows(prep: &PreparedDimer, cfg: &RunConfig) -> Result<Vec<EnergyRow>> {
    let dimer = &prep.dimer;
    let far = prep
        .far_dimer
        .as_ref()
        .filter(|_| cfg.method == Method::OrgDimerApproach);
    let monomers = prep.fragments.as_ref().map(|f| &f.monomers);

    let mut rhf = EnergyRow::new("RHF", dimer.reference_energy, 1);
    if let Some(far) = far {
        rhf.e_far_dimer = Some(far.reference_energy);
        rhf.dim_far_dimer = Some(1);
    } else if let Some(m) = monomers {
        rhf.e_a = Some(m[0].reference_energy);
        rhf.e_b = Some(m[1].reference_energy);
        rhf.dim_a = Some(1);
        rhf.dim_b = Some(1);
    }
    let mut rows = vec![rhf.finish(cfg.kcal_per_hartree)];

    if cfg.full_ci {
        let fci = |ints: &IntegralSet, what: &str| -> Result<f64> {
            Ok(full_ci(ints, ints.n_alpha(), ints.n_beta())
                .context(|| format!("full-CI of {what}"))?
                .energy)
        };
        let d = &dimer.integrals;
        let mut row = EnergyRow::new("full-CI", fci(d, "dimer")?, sector_dim(d));
        if let Some(far) = far {
            row.e_far_dimer = Some(fci(&far.integrals, "far dimer")?);
            row.dim_far_dimer = Some(sector_dim(&far.integrals));
        } else if let Some(m) = monomers {
            row.e_a = Some(fci(&m[0].integrals, "monomer A")?);
            row.e_b = Some(fci(&m[1].integrals, "monomer B")?);
            row.dim_a = Some(sector_dim(&m[0].integrals));
            row.dim_b = Some(sector_dim(&m[1].integrals));
        }
        rows.push(row.finish(cfg.kcal_per_hartree));
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SizeConsistencyCheck {
    pub pass: bool,
    /// Largest `|E_int|` over all rows, Hartree.
    pub max_abs_e_int: f64,
    pub coupling: f64,
    pub report: Report,
}

/// Runs the pipeline on a non-interacting dimer and checks that every row
/// satisfies `|E_AB − E_A − E_B| ≤ SIZE_CONSISTENCY_TOLERANCE`.
pub fn size_consistency_check(cfg: &RunConfig) -> Result<SizeConsistencyCheck> {
    cfg.validate()?;
    let prep = prepare_dimer(&cfg.inputs)?;
    size_consistency_check_prepared(&prep, cfg)
}

pub fn size_consistency_check_prepared(
    prep: &PreparedDimer,
    cfg: &RunConfig,
) -> Result<SizeConsistencyCheck> {
    if cfg.method == Method::OrgDimerApproach {
        return Err(Error::Config(
            "the size-consistency check uses the supramolecular interaction energy".into(),
        ));
    }
    let frag = prep.fragments()?;
    let coupling = cross_fragment_coupling(&prep.dimer.integrals, &frag.partition);
    if coupling > COUPLING_TOLERANCE {
        return Err(Error::InteractingFragments {
            coupling,
            threshold: COUPLING_TOLERANCE,
        });
    }
    let report = run_prepared(prep, cfg, None)?.report;
    let max_abs_e_int = report
        .rows
        .iter()
        .map(|r| r.e_int_hartree.map_or(f64::INFINITY, f64::abs))
        .fold(0.0, f64::max);
    Ok(SizeConsistencyCheck {
        pass: max_abs_e_int <= SIZE_CONSISTENCY_TOLERANCE,
        max_abs_e_int,
        coupling,
        report,
    })
}

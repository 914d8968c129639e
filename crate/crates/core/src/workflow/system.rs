use std::path::{Path, PathBuf};

use crate::determinants::{diagonal_element, hf_reference};
use crate::error::{Error, Result, ResultExt};
use crate::integrals::{
    compute_sto3g_integrals, localize_block_rhf, read_fcidump, run_rhf, transform_to_mo, Fragment,
    Geometry, IntegralSet, OrbitalPartition, RhfSolution, DEFAULT_OVERLAP_THRESHOLD,
};

/// Where one system's Hamiltonian comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum IntegralSource {
    Fcidump(PathBuf),
    /// All-hydrogen geometry, integrals computed in STO-3G.
    Hydrogen(Geometry),
}

impl IntegralSource {
    /// FCIDUMP if the file carries an `&FCI` header, geometry text otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
        if text.to_ascii_uppercase().contains("&FCI") {
            Ok(IntegralSource::Fcidump(path.to_path_buf()))
        } else {
            Geometry::parse(&text)
                .map(IntegralSource::Hydrogen)
                .context(|| format!("reading {}", path.display()))
        }
    }

    fn describe(&self) -> String {
        match self {
            IntegralSource::Fcidump(p) => p.display().to_string(),
            IntegralSource::Hydrogen(g) => format!("H{} geometry", g.atoms().len()),
        }
    }
}

/// Integrals of one system plus its Hartree-Fock reference energy
/// `⟨HF|Ĥ|HF⟩` in the returned orbital basis.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub integrals: IntegralSet,
    pub reference_energy: f64,
}

impl PreparedSystem {
    fn new(integrals: IntegralSet) -> Result<Self> {
        let hf = hf_reference(integrals.n_alpha(), integrals.n_beta(), integrals.n_orb())?;
        Ok(PreparedSystem {
            reference_energy: diagonal_element(&hf, &integrals),
            integrals,
        })
    }
}

fn canonical_hydrogen(geometry: &Geometry) -> Result<(IntegralSet, RhfSolution)> {
    let ao = compute_sto3g_integrals(geometry)?;
    let rhf = run_rhf(&ao)?;
    Ok((transform_to_mo(&ao.integrals, &rhf.coefficients)?, rhf))
}

/// Integrals over canonical RHF orbitals (geometry) or as stored (FCIDUMP).
pub fn load_system(source: &IntegralSource) -> Result<PreparedSystem> {
    let ints = match source {
        IntegralSource::Fcidump(p) => read_fcidump(p)?,
        IntegralSource::Hydrogen(g) => canonical_hydrogen(g)?.0,
    };
    PreparedSystem::new(ints).context(|| source.describe())
}

/// A dimer with two monomers and the map between their orbitals.
#[derive(Debug, Clone)]
pub struct FragmentSystems {
    pub monomers: [PreparedSystem; 2],
    pub partition: OrbitalPartition,
}

#[derive(Debug, Clone)]
pub struct DimerInputs {
    pub dimer: IntegralSource,
    pub monomer_a: Option<IntegralSource>,
    pub monomer_b: Option<IntegralSource>,
    /// `dimer_orbital fragment fragment_orbital` table; required with FCIDUMP inputs.
    pub orbital_map: Option<PathBuf>,
    /// Separated dimer for the dimer-approach interaction energy.
    pub far_dimer: Option<IntegralSource>,
}

impl DimerInputs {
    pub fn hydrogen(dimer: Geometry) -> Self {
        DimerInputs {
            dimer: IntegralSource::Hydrogen(dimer),
            monomer_a: None,
            monomer_b: None,
            orbital_map: None,
            far_dimer: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PreparedDimer {
    pub dimer: PreparedSystem,
    pub fragments: Option<FragmentSystems>,
    pub far_dimer: Option<PreparedSystem>,
}

impl PreparedDimer {
    pub fn fragments(&self) -> Result<&FragmentSystems> {
        self.fragments.as_ref().ok_or_else(|| {
            Error::Config("monomer inputs and an orbital correspondence are required".into())
        })
    }
}

/// Hydrogen dimer in block-localized orbitals, monomers in their own
/// canonical RHF orbitals. `monomers[f]` overrides `dimer.fragment(f)`.
fn hydrogen_dimer(
    dimer: &Geometry,
    monomers: [Option<&Geometry>; 2],
) -> Result<(PreparedSystem, FragmentSystems)> {
    if dimer.n_fragments() != 2 {
        return Err(Error::Config(format!(
            "dimer geometry has {} fragments, expected 2",
            dimer.n_fragments()
        )));
    }
    let ao = compute_sto3g_integrals(dimer)?;
    let mut solutions = Vec::with_capacity(2);
    let mut prepared = Vec::with_capacity(2);
    for (f, given) in monomers.into_iter().enumerate() {
        let own = dimer.fragment(f)?;
        let geometry = given.unwrap_or(&own);
        if geometry.atoms().len() != own.atoms().len() {
            return Err(Error::Config(format!(
                "monomer {} has {} atoms but dimer fragment {f} has {}",
                Fragment::from_index(f).unwrap(),
                geometry.atoms().len(),
                own.atoms().len()
            )));
        }
        let (ints, rhf) = canonical_hydrogen(geometry)
            .context(|| format!("monomer {}", Fragment::from_index(f).unwrap()))?;
        prepared.push(PreparedSystem::new(ints)?);
        solutions.push(rhf);
    }
    let loc = localize_block_rhf(dimer, &ao.overlap, &solutions, DEFAULT_OVERLAP_THRESHOLD)?;
    let dimer_ints = transform_to_mo(&ao.integrals, &loc.coefficients)?;
    let partition = loc.partition.expect("two fragments");
    let b = prepared.pop().unwrap();
    let a = prepared.pop().unwrap();
    Ok((
        PreparedSystem::new(dimer_ints)?,
        FragmentSystems {
            monomers: [a, b],
            partition,
        },
    ))
}

fn check_fragments(dimer: &IntegralSet, frag: &FragmentSystems) -> Result<()> {
    let part = &frag.partition;
    if part.n_orb() != dimer.n_orb() {
        return Err(Error::InvalidPartition(format!(
            "orbital map covers {} orbitals, dimer has {}",
            part.n_orb(),
            dimer.n_orb()
        )));
    }
    if part.total_counts() != (dimer.n_alpha(), dimer.n_beta()) {
        return Err(Error::InvalidPartition(format!(
            "monomer electrons {:?} do not add up to the dimer's ({}, {})",
            part.total_counts(),
            dimer.n_alpha(),
            dimer.n_beta()
        )));
    }
    for f in Fragment::ALL {
        let m = &frag.monomers[f.index()].integrals;
        if part.n_fragment_orbitals(f) != m.n_orb() {
            return Err(Error::InvalidPartition(format!(
                "orbital map assigns {} orbitals to fragment {f}, monomer has {}",
                part.n_fragment_orbitals(f),
                m.n_orb()
            )));
        }
    }
    Ok(())
}

pub fn prepare_dimer(inputs: &DimerInputs) -> Result<PreparedDimer> {
    let (dimer, fragments) = match &inputs.dimer {
        IntegralSource::Hydrogen(g) => {
            if inputs.orbital_map.is_some() {
                return Err(Error::Config(
                    "the orbital map of a hydrogen geometry is derived from its fragments".into(),
                ));
            }
            let geometry = |s: &Option<IntegralSource>| match s {
                None => Ok(None),
                Some(IntegralSource::Hydrogen(m)) => Ok(Some(m.clone())),
                Some(IntegralSource::Fcidump(p)) => Err(Error::Config(format!(
                    "monomer {} is an FCIDUMP but the dimer is a geometry",
                    p.display()
                ))),
            };
            let (a, b) = (geometry(&inputs.monomer_a)?, geometry(&inputs.monomer_b)?);
            if g.n_fragments() == 2 {
                let (d, f) =
                    hydrogen_dimer(g, [a.as_ref(), b.as_ref()]).context(|| "dimer".into())?;
                (d, Some(f))
            } else {
                (load_system(&inputs.dimer)?, None)
            }
        }
        IntegralSource::Fcidump(path) => {
            let dimer = load_system(&inputs.dimer).context(|| "dimer".into())?;
            let fragments = match (&inputs.monomer_a, &inputs.monomer_b, &inputs.orbital_map) {
                (Some(a), Some(b), Some(map)) => {
                    let a = load_system(a).context(|| "monomer A".into())?;
                    let b = load_system(b).context(|| "monomer B".into())?;
                    let counts = |s: &PreparedSystem| (s.integrals.n_alpha(), s.integrals.n_beta());
                    let text = std::fs::read_to_string(map).map_err(|e| {
                        Error::from(e).context(format!("reading {}", map.display()))
                    })?;
                    let partition = OrbitalPartition::parse_table(&text, [counts(&a), counts(&b)])
                        .context(|| format!("reading {}", map.display()))?;
                    Some(FragmentSystems {
                        monomers: [a, b],
                        partition,
                    })
                }
                (None, None, None) => None,
                _ => {
                    return Err(Error::Config(format!(
                        "dimer {} needs --monomer-a, --monomer-b and --orbital-map together",
                        path.display()
                    )))
                }
            };
            (dimer, fragments)
        }
    };
    if let Some(f) = &fragments {
        check_fragments(&dimer.integrals, f)?;
    }
    let far_dimer = match &inputs.far_dimer {
        None => None,
        Some(IntegralSource::Hydrogen(g)) if g.n_fragments() == 2 => Some(
            hydrogen_dimer(g, [None, None])
                .context(|| "far dimer".into())?
                .0,
        ),
        Some(s) => Some(load_system(s).context(|| "far dimer".into())?),
    };
    if let Some(far) = &far_dimer {
        let (d, f) = (&dimer.integrals, &far.integrals);
        if (d.n_orb(), d.n_alpha(), d.n_beta()) != (f.n_orb(), f.n_alpha(), f.n_beta()) {
            return Err(Error::Config(
                "far dimer must have the dimer's orbital count and electron numbers".into(),
            ));
        }
    }
    Ok(PreparedDimer {
        dimer,
        fragments,
        far_dimer,
    })
}

/// Largest integral that couples the fragments through a charge
/// distribution spanning both: `h_pq` and `(pq|rs)` with `p`, `q` on
/// different fragments. Coulomb-type `(pp'|qq')` across fragments is not
/// counted.
pub fn cross_fragment_coupling(ints: &IntegralSet, part: &OrbitalPartition) -> f64 {
    let n = ints.n_orb();
    let frag: Vec<Fragment> = (0..n).map(|p| part.assignment(p).0).collect();
    let mut worst: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            if frag[p] == frag[q] {
                continue;
            }
            worst = worst.max(ints.h(p, q).abs());
            for r in 0..n {
                for s in 0..n {
                    worst = worst.max(ints.g(p, q, r, s).abs());
                }
            }
        }
    }
    worst
}

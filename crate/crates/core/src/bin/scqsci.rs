use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use scqsci::cidiag::{
    build_subspace_hamiltonian, full_ci_with_budget, is_degenerate, FullCiOperator,
    DEFAULT_FULL_CI_BUDGET,
};
use scqsci::determinants::Determinant;
use scqsci::hamsim::{SamplePool, Sector};
use scqsci::integrals::{write_fcidump, Geometry};
use scqsci::workflow::{
    load_system, prepare_dimer, run_prepared, shot_scaling_estimate,
    size_consistency_check_prepared, DimerInputs, IntegralSource, Method, MonomerSampling,
    RunConfig,
};
use scqsci::{Error, Result};

#[derive(Parser)]
#[command(
    name = "scqsci",
    version,
    about = "Size-consistent sampled configuration interaction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute STO-3G integrals of a hydrogen cluster and write FCIDUMP files.
    Integrals(IntegralsArgs),
    /// Full-CI ground state of one system.
    Fullci(FullciArgs),
    /// Sample, build subspaces and report interaction energies.
    Run(RunArgs),
    /// Size-consistency check on a non-interacting dimer.
    CheckSc(CheckScArgs),
    /// Shots needed to observe each determinant, monomer vs dimer.
    ShotScaling(ShotScalingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Square H4, side 2.0 Bohr.
    H4,
    /// Two stacked H4 squares.
    H8,
}

#[derive(Args)]
struct PresetArgs {
    /// Built-in hydrogen cluster instead of input files.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// H8 separation between the two squares, Å.
    #[arg(long, default_value_t = 100.0)]
    distance: f64,
    /// Square side, Bohr.
    #[arg(long, default_value_t = 2.0)]
    side: f64,
}

impl PresetArgs {
    fn geometry(&self) -> Option<Geometry> {
        self.preset.map(|p| match p {
            Preset::H4 => Geometry::h4_square(self.side, [0.0; 3]),
            Preset::H8 => Geometry::h8_cuboid(self.side, self.distance),
        })
    }
}

#[derive(Args)]
struct IntegralsArgs {
    /// Geometry file: `element x y z fragment` per line, Å.
    #[arg(long, conflicts_with = "preset")]
    geometry: Option<PathBuf>,
    #[command(flatten)]
    preset: PresetArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct FullciArgs {
    /// FCIDUMP or hydrogen geometry file.
    #[arg(long, conflicts_with = "preset")]
    system: Option<PathBuf>,
    #[command(flatten)]
    preset: PresetArgs,
    /// Largest sector dimension to attempt.
    #[arg(long, default_value_t = DEFAULT_FULL_CI_BUDGET)]
    budget: usize,
    /// Also report whether the ground state is degenerate.
    #[arg(long)]
    degeneracy: bool,
    /// Write the sector Hamiltonian in coordinate text form.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Dimer FCIDUMP or two-fragment hydrogen geometry.
    #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
    dimer: Option<PathBuf>,
    #[arg(long)]
    monomer_a: Option<PathBuf>,
    #[arg(long)]
    monomer_b: Option<PathBuf>,
    /// `dimer_orbital fragment fragment_orbital` table (0-based).
    #[arg(long)]
    orbital_map: Option<PathBuf>,
    /// Separated dimer, for org-dimer-approach.
    #[arg(long)]
    far_dimer: Option<PathBuf>,
    #[command(flatten)]
    preset: PresetArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sc,
    Org,
    ScHci,
    OrgDimerApproach,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sc => Method::Sc,
            MethodArg::Org => Method::Org,
            MethodArg::ScHci => Method::ScHci,
            MethodArg::OrgDimerApproach => Method::OrgDimerApproach,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Split,
    Independent,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, value_enum, default_value = "sc")]
    method: MethodArg,
    #[arg(long, default_value_t = 5)]
    kmax: usize,
    /// Extra evolution steps beyond --kmax (repeatable), e.g. 10.
    #[arg(long)]
    extra_k: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// HCI thresholds for sc-hci (comma separated or repeated).
    #[arg(long, value_delimiter = ',', default_value = "1e-3")]
    epsilon: Vec<f64>,
    /// Source of org monomer subspaces.
    #[arg(long, value_enum, default_value = "split")]
    monomer_sampling: SamplingArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Add full-CI reference rows.
    #[arg(long)]
    full_ci: bool,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Use this sample pool (JSON) instead of simulating the dimer.
    #[arg(long)]
    pool_in: Option<PathBuf>,
    /// Save the dimer sample pool (JSON).
    #[arg(long)]
    pool_out: Option<PathBuf>,
    /// Write the last dimer subspace, one determinant per line.
    #[arg(long)]
    dump_subspace: Option<PathBuf>,
    /// Write the last dimer subspace Hamiltonian.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct CheckScArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Seeds to check (comma separated); overrides --seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
}

#[derive(Args)]
struct ShotScalingArgs {
    /// FCIDUMP or hydrogen geometry of a monomer; uses its full-CI vector.
    #[arg(long, conflicts_with_all = ["coefficients", "preset"])]
    system: Option<PathBuf>,
    #[command(flatten)]
    preset: PresetArgs,
    /// Explicit normalized coefficients (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coefficients: Vec<f64>,
    /// Number of largest coefficients to list.
    #[arg(long, default_value_t = 10)]
    top: usize,
}

fn source(path: &Path) -> Result<IntegralSource> {
    IntegralSource::from_path(path)
}

fn system_source(path: &Option<PathBuf>, preset: &PresetArgs) -> Result<IntegralSource> {
    match (path, preset.geometry()) {
        (Some(p), _) => source(p),
        (None, Some(g)) => Ok(IntegralSource::Hydrogen(g)),
        (None, None) => Err(Error::Config("give an input file or --preset".into())),
    }
}

fn dimer_inputs(a: &InputArgs) -> Result<(String, DimerInputs)> {
    let opt = |p: &Option<PathBuf>| p.as_deref().map(source).transpose();
    let (name, dimer) = match (&a.dimer, a.preset.geometry()) {
        (Some(p), _) => (p.display().to_string(), source(p)?),
        (None, Some(g)) => (
            format!("H{} at {} A", g.atoms().len(), a.preset.distance),
            IntegralSource::Hydrogen(g),
        ),
        (None, None) => return Err(Error::Config("give --dimer or --preset".into())),
    };
    Ok((
        name,
        DimerInputs {
            dimer,
            monomer_a: opt(&a.monomer_a)?,
            monomer_b: opt(&a.monomer_b)?,
            orbital_map: a.orbital_map.clone(),
            far_dimer: opt(&a.far_dimer)?,
        },
    ))
}

fn run_config(name: String, inputs: DimerInputs, s: &SamplingArgs) -> RunConfig {
    let mut cfg = RunConfig::new(&name, inputs);
    cfg.method = s.method.into();
    cfg.k_max = s.kmax;
    cfg.extra_k = s.extra_k.clone();
    cfg.shots = s.shots;
    cfg.dt = s.dt;
    cfg.seed = s.seed;
    cfg.epsilon = s.epsilon.clone();
    cfg.monomer_sampling = match s.monomer_sampling {
        SamplingArg::Split => MonomerSampling::Split,
        SamplingArg::Independent => MonomerSampling::Independent,
    };
    cfg
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::from(e).context(format!("writing {}", path.display())))
}

fn integrals(a: IntegralsArgs) -> Result<()> {
    let geometry = match (&a.geometry, a.preset.geometry()) {
        (Some(p), _) => Geometry::read(p)?,
        (None, Some(g)) => g,
        (None, None) => return Err(Error::Config("give --geometry or --preset".into())),
    };
    std::fs::create_dir_all(&a.out)?;
    let src = IntegralSource::Hydrogen(geometry.clone());
    if geometry.n_fragments() == 1 {
        let sys = load_system(&src)?;
        let path = a.out.join("system.fcidump");
        write_fcidump(&sys.integrals, &path)?;
        println!("RHF energy {:.8} Ha", sys.reference_energy);
        println!("wrote {}", path.display());
        return Ok(());
    }
    let prep = prepare_dimer(&DimerInputs::hydrogen(geometry))?;
    let frag = prep.fragments()?;
    let files = [
        ("dimer.fcidump", &prep.dimer),
        ("monomer_a.fcidump", &frag.monomers[0]),
        ("monomer_b.fcidump", &frag.monomers[1]),
    ];
    for (name, sys) in files {
        let path = a.out.join(name);
        write_fcidump(&sys.integrals, &path)?;
        println!(
            "{:<18} RHF {:.8} Ha  -> {}",
            name.trim_end_matches(".fcidump"),
            sys.reference_energy,
            path.display()
        );
    }
    let map = a.out.join("orbital_map.txt");
    write(&map, &frag.partition.to_table())?;
    println!("orbital map -> {}", map.display());
    Ok(())
}

fn fullci(a: FullciArgs) -> Result<()> {
    let sys = load_system(&system_source(&a.system, &a.preset)?)?;
    let ints = &sys.integrals;
    let result = full_ci_with_budget(ints, ints.n_alpha(), ints.n_beta(), a.budget)?;
    let op = FullCiOperator::new(ints, ints.n_alpha(), ints.n_beta())?;
    println!(
        "orbitals {}  electrons ({}, {})  sector dimension {}",
        ints.n_orb(),
        ints.n_alpha(),
        ints.n_beta(),
        result.vector.len()
    );
    println!("reference energy {:.10} Ha", sys.reference_energy);
    println!("full-CI energy   {:.10} Ha", result.energy);
    println!(
        "residual {:.2e}, iterations {}",
        result.residual, result.iterations
    );
    if a.degeneracy {
        println!("degenerate: {}", is_degenerate(&op, &result)?);
    }
    if let Some(path) = &a.dump_matrix {
        let space = (0..result.vector.len())
            .map(|i| op.determinant(i))
            .collect();
        write(
            path,
            &build_subspace_hamiltonian(&space, ints)?.to_dump_string(),
        )?;
    }
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let (name, inputs) = dimer_inputs(&a.inputs)?;
    let mut cfg = run_config(name, inputs, &a.sampling);
    cfg.full_ci = a.full_ci;
    let pool = a.pool_in.as_deref().map(SamplePool::read).transpose()?;
    cfg.validate()?;
    let prep = prepare_dimer(&cfg.inputs)?;
    let outcome = run_prepared(&prep, &cfg, pool)?;
    print!("{}", outcome.report.to_table());
    if let Some(path) = &a.report {
        outcome.report.write(path)?;
    }
    if let (Some(path), Some(pool)) = (&a.pool_out, &outcome.pool) {
        pool.write(path)?;
    }
    if let Some(space) = &outcome.final_space {
        let n = prep.dimer.integrals.n_orb();
        if let Some(path) = &a.dump_subspace {
            let text: String = space.iter().map(|d| d.to_text(n) + "\n").collect();
            write(path, &text)?;
        }
        if let Some(path) = &a.dump_matrix {
            let h = build_subspace_hamiltonian(space, &prep.dimer.integrals)?;
            write(path, &h.to_dump_string())?;
        }
    }
    Ok(())
}

fn check_sc(a: CheckScArgs) -> Result<bool> {
    let (name, inputs) = dimer_inputs(&a.inputs)?;
    let mut cfg = run_config(name, inputs, &a.sampling);
    cfg.validate()?;
    let prep = prepare_dimer(&cfg.inputs)?;
    let seeds = if a.seeds.is_empty() {
        vec![cfg.seed]
    } else {
        a.seeds.clone()
    };
    let mut all = true;
    for seed in seeds {
        cfg.seed = seed;
        let check = size_consistency_check_prepared(&prep, &cfg)?;
        println!(
            "seed {seed:>6}: max |E_int| = {:.3e} Ha  (coupling {:.1e})  {}",
            check.max_abs_e_int,
            check.coupling,
            if check.pass { "PASS" } else { "FAIL" }
        );
        all &= check.pass;
    }
    Ok(all)
}

fn shot_scaling(a: ShotScalingArgs) -> Result<()> {
    let (coefficients, labels): (Vec<f64>, Vec<String>) = if !a.coefficients.is_empty() {
        let labels = (0..a.coefficients.len()).map(|j| j.to_string()).collect();
        (a.coefficients.clone(), labels)
    } else {
        let sys = load_system(&system_source(&a.system, &a.preset)?)?;
        let ints = &sys.integrals;
        let result =
            full_ci_with_budget(ints, ints.n_alpha(), ints.n_beta(), DEFAULT_FULL_CI_BUDGET)?;
        let sector = Sector::new(ints.n_orb(), ints.n_alpha(), ints.n_beta())?;
        let labels = (0..sector.dim())
            .map(|i| Determinant::to_text(&sector.determinant(i), ints.n_orb()))
            .collect();
        (result.vector, labels)
    };
    let mut rows = shot_scaling_estimate(&coefficients)?;
    rows.sort_by(|x, y| y.coefficient.abs().total_cmp(&x.coefficient.abs()));
    println!(
        "{:<24} {:>12} {:>14} {:>14}",
        "determinant", "c_j", "monomer 1/c^2", "dimer 1/c^4"
    );
    for r in rows.iter().take(a.top) {
        println!(
            "{:<24} {:>12.6} {:>14.4e} {:>14.4e}",
            labels[r.index], r.coefficient, r.monomer_shots, r.dimer_shots
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Integrals(a) => integrals(a).map(|_| true),
        Command::Fullci(a) => fullci(a).map(|_| true),
        Command::Run(a) => run(a).map(|_| true),
        Command::CheckSc(a) => check_sc(a),
        Command::ShotScaling(a) => shot_scaling(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

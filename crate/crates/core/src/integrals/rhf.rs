//! Closed-shell restricted Hartree-Fock with DIIS and internal-stability
//! following.
//!
//! Square H4 has a degenerate HOMO pair at the symmetric geometry and the
//! core-Hamiltonian guess converges to a saddle point of the RHF energy. After
//! each converged SCF the real RHF→RHF orbital Hessian is diagonalized; if it
//! has a negative mode the orbitals are rotated along it and the SCF restarts.

use nalgebra::{DMatrix, DVector};

use super::{transform_to_mo, AoIntegrals, IntegralSet};
use crate::error::{Error, Result};
use crate::linalg::{expm, inverse_sqrt, sorted_symmetric_eigen};

#[derive(Debug, Clone)]
pub struct RhfOptions {
    pub max_iterations: usize,
    pub density_tolerance: f64,
    pub energy_tolerance: f64,
    pub diis_size: usize,
    /// Maximum number of instability-following restarts.
    pub stability_rounds: usize,
    /// Lowest orbital-Hessian eigenvalue treated as an instability.
    pub stability_threshold: f64,
    /// Rotation angle (radians) applied along an unstable mode.
    pub rotation_step: f64,
}

impl Default for RhfOptions {
    fn default() -> Self {
        RhfOptions {
            max_iterations: 200,
            density_tolerance: 1e-10,
            energy_tolerance: 1e-11,
            diis_size: 8,
            stability_rounds: 8,
            stability_threshold: -1e-6,
            rotation_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RhfSolution {
    pub energy: f64,
    /// MO coefficients, columns ordered by orbital energy.
    pub coefficients: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    pub n_occ: usize,
    /// Total SCF iterations over all restarts.
    pub iterations: usize,
    /// Energies of the final SCF run, one per iteration.
    pub energy_history: Vec<f64>,
    /// Index into `energy_history` from which damping replaced DIIS, set
    /// when the energy first rose; the history is non-increasing from there.
    pub damping_start: Option<usize>,
    pub stability_restarts: usize,
    /// Lowest eigenvalue of the orbital Hessian at the returned solution.
    pub lowest_hessian_eigenvalue: f64,
}

pub fn run_rhf(ao: &AoIntegrals) -> Result<RhfSolution> {
    run_rhf_with(ao, &RhfOptions::default())
}

pub fn run_rhf_with(ao: &AoIntegrals, opts: &RhfOptions) -> Result<RhfSolution> {
    let ints = &ao.integrals;
    if ints.n_alpha() != ints.n_beta() {
        return Err(Error::OpenShell {
            n_alpha: ints.n_alpha(),
            n_beta: ints.n_beta(),
        });
    }
    let n_occ = ints.n_alpha();
    let scf = Scf::new(ao, n_occ);
    let mut total_iterations = 0;
    let mut guess: Option<DMatrix<f64>> = None;
    for round in 0..=opts.stability_rounds {
        let run = scf.run(guess.as_ref(), opts)?;
        total_iterations += run.iterations;
        let (lowest, mode) = if n_occ == 0 || n_occ == ints.n_orb() {
            (0.0, None)
        } else {
            stability(ints, &run.coefficients, &run.orbital_energies, n_occ)?
        };
        let unstable = lowest < opts.stability_threshold;
        if !unstable || round == opts.stability_rounds {
            return Ok(RhfSolution {
                energy: run.energy,
                coefficients: run.coefficients,
                orbital_energies: run.orbital_energies,
                n_occ,
                iterations: total_iterations,
                energy_history: run.history,
                damping_start: run.damping_start,
                stability_restarts: round,
                lowest_hessian_eigenvalue: lowest,
            });
        }
        let mode = mode.expect("unstable mode");
        let n = ints.n_orb();
        let mut kappa = DMatrix::zeros(n, n);
        for (x, (i, a)) in ov_pairs(n_occ, n).enumerate() {
            kappa[(a, i)] = opts.rotation_step * mode[x];
            kappa[(i, a)] = -opts.rotation_step * mode[x];
        }
        guess = Some(&run.coefficients * expm(&kappa));
    }
    unreachable!()
}

/// Energy changes below this are treated as rounding noise by the damped step.
const STEP_NOISE: f64 = 1e-13;

struct ScfRun {
    energy: f64,
    coefficients: DMatrix<f64>,
    orbital_energies: DVector<f64>,
    iterations: usize,
    history: Vec<f64>,
    damping_start: Option<usize>,
}

struct Scf<'a> {
    ints: &'a IntegralSet,
    overlap: &'a DMatrix<f64>,
    hcore: DMatrix<f64>,
    x: DMatrix<f64>,
    n_occ: usize,
}

impl<'a> Scf<'a> {
    fn new(ao: &'a AoIntegrals, n_occ: usize) -> Self {
        let n = ao.integrals.n_orb();
        Scf {
            ints: &ao.integrals,
            overlap: &ao.overlap,
            hcore: DMatrix::from_row_slice(n, n, ao.integrals.h_slice()),
            x: inverse_sqrt(&ao.overlap),
            n_occ,
        }
    }

    fn density(&self, c: &DMatrix<f64>) -> DMatrix<f64> {
        let occ = c.columns(0, self.n_occ);
        occ * occ.transpose() * 2.0
    }

    fn fock(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.ints.n_orb();
        let mut f = self.hcore.clone();
        for p in 0..n {
            for q in 0..=p {
                let mut v = 0.0;
                for r in 0..n {
                    for s in 0..n {
                        v += d[(r, s)] * (self.ints.g(p, q, r, s) - 0.5 * self.ints.g(p, r, q, s));
                    }
                }
                f[(p, q)] += v;
                if p != q {
                    f[(q, p)] += v;
                }
            }
        }
        f
    }

    fn energy(&self, d: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
        0.5 * d.component_mul(&(&self.hcore + f)).sum() + self.ints.e_core()
    }

    /// Step length in `[0, 1]` minimizing the energy along `d + λ·step`.
    /// The energy is quadratic in λ, so the damped step never raises it by
    /// more than `STEP_NOISE`.
    fn optimal_damping(&self, step: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
        let slope = step.component_mul(f).sum();
        let curvature = step.component_mul(&(self.fock(step) - &self.hcore)).sum();
        // near convergence both terms sink into rounding noise
        if slope + 0.5 * curvature <= STEP_NOISE {
            let full = slope + 0.5 * curvature;
            if full.abs() <= STEP_NOISE || curvature <= 0.0 {
                return 1.0;
            }
        }
        if curvature > 0.0 {
            (-slope / curvature).clamp(0.0, 1.0)
        } else if slope + 0.5 * curvature < 0.0 {
            1.0
        } else {
            0.0
        }
    }

    fn diagonalize(&self, f: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let fp = self.x.transpose() * f * &self.x;
        let (e, cp) = sorted_symmetric_eigen(&fp);
        (e, &self.x * cp)
    }

    fn run(&self, guess: Option<&DMatrix<f64>>, opts: &RhfOptions) -> Result<ScfRun> {
        let mut c = match guess {
            Some(c) => c.clone(),
            None => self.diagonalize(&self.hcore).1,
        };
        let mut d = self.density(&c);
        let mut diis = Diis::new(opts.diis_size);
        let mut history = Vec::new();
        let mut e_prev = f64::INFINITY;
        let mut last_change = f64::INFINITY;
        let mut damping_start = None;
        for iter in 1..=opts.max_iterations {
            let f = self.fock(&d);
            let e = self.energy(&d, &f);
            history.push(e);
            if damping_start.is_none() && e > e_prev {
                damping_start = Some(history.len() - 1);
            }
            let de = (e - e_prev).abs();
            let err =
                self.x.transpose() * (&f * &d * self.overlap - self.overlap * &d * &f) * &self.x;
            diis.push(f.clone(), err);
            let (c_new, d_new) = if damping_start.is_some() {
                // line search from d towards the DIIS density, or towards the
                // aufbau density of f when the DIIS direction is uphill
                let (_, c_plain) = self.diagonalize(&f);
                let plain = &self.density(&c_plain) - &d;
                last_change = (plain.norm_squared() / plain.len() as f64).sqrt();
                let (c_new, step) = match diis.extrapolate() {
                    Some(f_ext) => {
                        let (_, c_ext) = self.diagonalize(&f_ext);
                        let step = &self.density(&c_ext) - &d;
                        if step.component_mul(&f).sum() < 0.0 {
                            (c_ext, step)
                        } else {
                            (c_plain, plain)
                        }
                    }
                    None => (c_plain, plain),
                };
                let lambda = self.optimal_damping(&step, &f);
                (c_new, &d + step * lambda)
            } else {
                let f_ext = diis.extrapolate().unwrap_or(f);
                let (_, c_new) = self.diagonalize(&f_ext);
                let d_new = self.density(&c_new);
                let diff = &d_new - &d;
                last_change = (diff.norm_squared() / diff.len() as f64).sqrt();
                (c_new, d_new)
            };
            c = c_new;
            d = d_new;
            e_prev = e;
            if last_change < opts.density_tolerance && de < opts.energy_tolerance {
                let f = self.fock(&d);
                let energy = self.energy(&d, &f);
                let (eps, c_final) = self.diagonalize(&f);
                // keep the converged occupied space if the final diagonalization
                // would reorder nearly degenerate frontier orbitals
                let d_final = self.density(&c_final);
                if (&d_final - &d).abs().max() > 1e-6 {
                    c = project_fock_basis(self, &c, &f);
                    let eps = DVector::from_iterator(
                        c.ncols(),
                        (0..c.ncols()).map(|k| (c.column(k).transpose() * &f * c.column(k))[0]),
                    );
                    return Ok(ScfRun {
                        energy,
                        coefficients: c,
                        orbital_energies: eps,
                        iterations: iter,
                        history,
                        damping_start,
                    });
                }
                return Ok(ScfRun {
                    energy,
                    coefficients: c_final,
                    orbital_energies: eps,
                    iterations: iter,
                    history,
                    damping_start,
                });
            }
        }
        Err(Error::ScfNotConverged {
            iterations: opts.max_iterations,
            last_density_change: last_change,
        })
    }
}

/// Canonicalize occupied and virtual blocks separately.
fn project_fock_basis(scf: &Scf<'_>, c: &DMatrix<f64>, f: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let mut out = c.clone();
    for (start, len) in [(0, scf.n_occ), (scf.n_occ, n - scf.n_occ)] {
        if len == 0 {
            continue;
        }
        let block = c.columns(start, len).into_owned();
        let fb = block.transpose() * f * &block;
        let (_, u) = sorted_symmetric_eigen(&fb);
        out.columns_mut(start, len).copy_from(&(block * u));
    }
    out
}

struct Diis {
    capacity: usize,
    focks: Vec<DMatrix<f64>>,
    errors: Vec<DMatrix<f64>>,
}

impl Diis {
    fn new(capacity: usize) -> Self {
        Diis {
            capacity,
            focks: Vec::new(),
            errors: Vec::new(),
        }
    }

    fn push(&mut self, f: DMatrix<f64>, e: DMatrix<f64>) {
        if self.focks.len() == self.capacity {
            self.focks.remove(0);
            self.errors.remove(0);
        }
        self.focks.push(f);
        self.errors.push(e);
    }

    fn extrapolate(&self) -> Option<DMatrix<f64>> {
        let m = self.focks.len();
        if m < 2 {
            return None;
        }
        let mut b = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let v = self.errors[i].dot(&self.errors[j]);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::zeros(m + 1);
        rhs[m] = -1.0;
        let coef = b.lu().solve(&rhs)?;
        if coef.iter().any(|x| !x.is_finite()) {
            return None;
        }
        let mut f = self.focks[0].clone() * coef[0];
        for i in 1..m {
            f += &self.focks[i] * coef[i];
        }
        Some(f)
    }
}

fn ov_pairs(n_occ: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_occ).flat_map(move |i| (n_occ..n).map(move |a| (i, a)))
}

/// Lowest eigenpair of the real singlet RHF orbital Hessian (A + B).
fn stability(
    ints: &IntegralSet,
    c: &DMatrix<f64>,
    eps: &DVector<f64>,
    n_occ: usize,
) -> Result<(f64, Option<DVector<f64>>)> {
    let n = ints.n_orb();
    let mo = transform_to_mo(ints, c)?;
    let pairs: Vec<(usize, usize)> = ov_pairs(n_occ, n).collect();
    let dim = pairs.len();
    let mut hess = DMatrix::zeros(dim, dim);
    for (x, &(i, a)) in pairs.iter().enumerate() {
        for (y, &(j, b)) in pairs.iter().enumerate() {
            let mut v = 4.0 * mo.g(i, a, j, b) - mo.g(i, b, j, a) - mo.g(i, j, a, b);
            if x == y {
                v += eps[a] - eps[i];
            }
            hess[(x, y)] = v;
        }
    }
    let (w, v) = sorted_symmetric_eigen(&hess);
    Ok((w[0], Some(v.column(0).into_owned())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{compute_sto3g_integrals, Geometry};

    #[test]
    fn h4_square_reaches_broken_symmetry_minimum() {
        let ao = compute_sto3g_integrals(&Geometry::h4_square(2.0, [0.0; 3])).unwrap();
        let sol = run_rhf(&ao).unwrap();
        assert!((sol.energy - (-1.776_770)).abs() < 2e-6, "{}", sol.energy);
        assert!(sol.stability_restarts >= 1);
        assert!(sol.lowest_hessian_eigenvalue > 0.0);
        let ctsc = sol.coefficients.transpose() * &ao.overlap * &sol.coefficients;
        assert!((ctsc - DMatrix::<f64>::identity(4, 4)).abs().max() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let ao = compute_sto3g_integrals(&Geometry::h4_square(2.0, [0.0; 3])).unwrap();
        let a = run_rhf(&ao).unwrap();
        let b = run_rhf(&ao).unwrap();
        assert_eq!(a.energy, b.energy);
        assert_eq!(a.coefficients, b.coefficients);
    }

    #[test]
    fn open_shell_rejected() {
        let g = Geometry::new(vec![
            crate::integrals::Atom::new("H", [0.0; 3], 0).unwrap(),
            crate::integrals::Atom::new("H", [1.4, 0.0, 0.0], 0).unwrap(),
            crate::integrals::Atom::new("H", [2.8, 0.0, 0.0], 0).unwrap(),
        ])
        .unwrap();
        let ao = compute_sto3g_integrals(&g).unwrap();
        assert!(matches!(run_rhf(&ao), Err(Error::OpenShell { .. })));
    }

    #[test]
    fn convergence_failure_reports_density_change() {
        let ao = compute_sto3g_integrals(&Geometry::h4_square(2.0, [0.0; 3])).unwrap();
        let opts = RhfOptions {
            max_iterations: 1,
            ..Default::default()
        };
        match run_rhf_with(&ao, &opts) {
            Err(Error::ScfNotConverged {
                iterations,
                last_density_change,
            }) => {
                assert_eq!(iterations, 1);
                assert!(last_density_change > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }
}

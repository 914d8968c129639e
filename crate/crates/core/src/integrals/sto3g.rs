//! Contracted s-Gaussian integrals for hydrogen in the STO-3G basis.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::geometry::squared_distance;
use super::{Geometry, IntegralSet};
use crate::error::{Error, Result};

/// Standard STO-3G hydrogen 1s exponents (ζ = 1.24).
pub const STO3G_H_EXPONENTS: [f64; 3] = [3.425_250_91, 0.623_913_73, 0.168_855_40];
/// Contraction coefficients over normalized primitives.
pub const STO3G_H_COEFFICIENTS: [f64; 3] = [0.154_328_97, 0.535_328_14, 0.444_634_54];

/// A normalized contraction of three s-type primitives.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractedS {
    pub center: [f64; 3],
    pub atom: usize,
    pub exponents: [f64; 3],
    /// Coefficients multiplying *unnormalized* primitives `exp(-a r²)`;
    /// primitive and contraction normalization are folded in.
    pub coefficients: [f64; 3],
}

impl ContractedS {
    fn new(center: [f64; 3], atom: usize, exponents: [f64; 3], contraction: [f64; 3]) -> Self {
        let mut coefficients = [0.0; 3];
        for k in 0..3 {
            coefficients[k] = contraction[k] * (2.0 * exponents[k] / PI).powf(0.75);
        }
        let mut f = ContractedS {
            center,
            atom,
            exponents,
            coefficients,
        };
        let norm = overlap(&f, &f).sqrt();
        for c in &mut f.coefficients {
            *c /= norm;
        }
        f
    }

    fn primitives(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.exponents
            .iter()
            .copied()
            .zip(self.coefficients.iter().copied())
    }
}

/// Hydrogen-only basis, one function per atom in atom order.
pub fn sto3g_basis(geometry: &Geometry) -> Result<Vec<ContractedS>> {
    geometry
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if a.charge != 1 {
                return Err(Error::UnsupportedElement(a.symbol.clone()));
            }
            Ok(ContractedS::new(
                a.position,
                i,
                STO3G_H_EXPONENTS,
                STO3G_H_COEFFICIENTS,
            ))
        })
        .collect()
}

/// Boys function of order zero, `F₀(t) = ∫₀¹ exp(-t u²) du`.
pub fn boys_f0(t: f64) -> f64 {
    if t < 1e-12 {
        1.0 - t / 3.0
    } else {
        let st = t.sqrt();
        0.5 * (PI / t).sqrt() * libm::erf(st)
    }
}

/// Integrals over the AO basis together with its overlap metric.
#[derive(Debug, Clone)]
pub struct AoIntegrals {
    pub integrals: IntegralSet,
    pub overlap: DMatrix<f64>,
    pub basis: Vec<ContractedS>,
}

fn overlap(a: &ContractedS, b: &ContractedS) -> f64 {
    let r2 = squared_distance(&a.center, &b.center);
    let mut s = 0.0;
    for (ea, ca) in a.primitives() {
        for (eb, cb) in b.primitives() {
            let p = ea + eb;
            s += ca * cb * (PI / p).powf(1.5) * (-ea * eb / p * r2).exp();
        }
    }
    s
}

fn kinetic(a: &ContractedS, b: &ContractedS) -> f64 {
    let r2 = squared_distance(&a.center, &b.center);
    let mut t = 0.0;
    for (ea, ca) in a.primitives() {
        for (eb, cb) in b.primitives() {
            let p = ea + eb;
            let mu = ea * eb / p;
            t += ca * cb * mu * (3.0 - 2.0 * mu * r2) * (PI / p).powf(1.5) * (-mu * r2).exp();
        }
    }
    t
}

fn gaussian_product(ea: f64, a: &[f64; 3], eb: f64, b: &[f64; 3]) -> [f64; 3] {
    let p = ea + eb;
    [
        (ea * a[0] + eb * b[0]) / p,
        (ea * a[1] + eb * b[1]) / p,
        (ea * a[2] + eb * b[2]) / p,
    ]
}

fn nuclear(a: &ContractedS, b: &ContractedS, geometry: &Geometry) -> f64 {
    let r2 = squared_distance(&a.center, &b.center);
    let mut v = 0.0;
    for (ea, ca) in a.primitives() {
        for (eb, cb) in b.primitives() {
            let p = ea + eb;
            let centre = gaussian_product(ea, &a.center, eb, &b.center);
            let pre = ca * cb * 2.0 * PI / p * (-ea * eb / p * r2).exp();
            for atom in geometry.atoms() {
                let pc2 = squared_distance(&centre, &atom.position);
                v -= pre * atom.charge as f64 * boys_f0(p * pc2);
            }
        }
    }
    v
}

fn repulsion(a: &ContractedS, b: &ContractedS, c: &ContractedS, d: &ContractedS) -> f64 {
    let ab2 = squared_distance(&a.center, &b.center);
    let cd2 = squared_distance(&c.center, &d.center);
    let mut v = 0.0;
    for (ea, ca) in a.primitives() {
        for (eb, cb) in b.primitives() {
            let p = ea + eb;
            let pc = gaussian_product(ea, &a.center, eb, &b.center);
            let kab = ca * cb * (-ea * eb / p * ab2).exp();
            for (ec, cc) in c.primitives() {
                for (ed, cd) in d.primitives() {
                    let q = ec + ed;
                    let qc = gaussian_product(ec, &c.center, ed, &d.center);
                    let kcd = cc * cd * (-ec * ed / q * cd2).exp();
                    let alpha = p * q / (p + q);
                    v += kab * kcd * 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt())
                        * boys_f0(alpha * squared_distance(&pc, &qc));
                }
            }
        }
    }
    v
}

/// Overlap, core Hamiltonian and electron-repulsion integrals over the
/// STO-3G basis of an all-hydrogen geometry. `e_core` is the nuclear repulsion.
pub fn compute_sto3g_integrals(geometry: &Geometry) -> Result<AoIntegrals> {
    let basis = sto3g_basis(geometry)?;
    let n = basis.len();
    let overlap_m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            overlap(&basis[i], &basis[j])
        }
    });
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kinetic(&basis[i], &basis[j]) + nuclear(&basis[i], &basis[j], geometry);
            h[i * n + j] = v;
            h[j * n + i] = v;
        }
    }
    let mut g = vec![0.0; n.pow(4)];
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
    for p in 0..n {
        for q in 0..=p {
            let pq = p * (p + 1) / 2 + q;
            for r in 0..n {
                for s in 0..=r {
                    let rs = r * (r + 1) / 2 + s;
                    if rs > pq {
                        continue;
                    }
                    let v = repulsion(&basis[p], &basis[q], &basis[r], &basis[s]);
                    for (a, b, c, d) in [
                        (p, q, r, s),
                        (q, p, r, s),
                        (p, q, s, r),
                        (q, p, s, r),
                        (r, s, p, q),
                        (s, r, p, q),
                        (r, s, q, p),
                        (s, r, q, p),
                    ] {
                        g[idx(a, b, c, d)] = v;
                    }
                }
            }
        }
    }
    let n_elec = geometry.n_electrons();
    let n_alpha = n_elec.div_ceil(2);
    let n_beta = n_elec / 2;
    let integrals = IntegralSet::new(n, n_alpha, n_beta, geometry.nuclear_repulsion(), h, g)?;
    Ok(AoIntegrals {
        integrals,
        overlap: overlap_m,
        basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::Atom;

    #[test]
    fn boys_small_argument_branch_is_continuous() {
        let below = boys_f0(0.5e-12);
        let above = boys_f0(2e-12);
        assert!((below - 1.0).abs() < 1e-12);
        assert!((above - 1.0).abs() < 1e-12);
        assert_eq!(boys_f0(0.0), 1.0);
        // large-t asymptote ½√(π/t)
        let t = 400.0;
        assert!((boys_f0(t) - 0.5 * (PI / t).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn contracted_functions_are_normalized() {
        let g = Geometry::h8_cuboid(2.0, 100.0);
        let basis = sto3g_basis(&g).unwrap();
        for f in &basis {
            assert!((overlap(f, f) - 1.0).abs() < 1e-14);
        }
        let ao = compute_sto3g_integrals(&g).unwrap();
        for i in 0..8 {
            assert_eq!(ao.overlap[(i, i)], 1.0);
        }
    }

    #[test]
    fn square_core_energy() {
        let ao = compute_sto3g_integrals(&Geometry::h4_square(2.0, [0.0; 3])).unwrap();
        assert!((ao.integrals.e_core() - 2.707_106_781_186_547_5).abs() < 1e-12);
        assert_eq!(ao.integrals.n_alpha(), 2);
        assert_eq!(ao.integrals.n_beta(), 2);
    }

    #[test]
    fn rejects_heavier_elements() {
        let g = Geometry::new(vec![
            Atom::new("F", [0.0; 3], 0).unwrap(),
            Atom::new("H", [0.0, 0.0, 1.7], 0).unwrap(),
        ])
        .unwrap();
        let err = compute_sto3g_integrals(&g).unwrap_err();
        assert!(err.to_string().contains("FCIDUMP"));
    }

    #[test]
    fn h2_textbook_values() {
        // Szabo & Ostlund, H2 at 1.4 Bohr, STO-3G.
        let g = Geometry::new(vec![
            Atom::new("H", [0.0; 3], 0).unwrap(),
            Atom::new("H", [1.4, 0.0, 0.0], 0).unwrap(),
        ])
        .unwrap();
        let ao = compute_sto3g_integrals(&g).unwrap();
        assert!((ao.overlap[(0, 1)] - 0.6593).abs() < 1e-4);
        assert!((ao.integrals.h(0, 0) - (-1.1204)).abs() < 1e-4);
        assert!((ao.integrals.h(0, 1) - (-0.9584)).abs() < 1e-4);
        assert!((ao.integrals.g(0, 0, 0, 0) - 0.7746).abs() < 1e-4);
        assert!((ao.integrals.g(0, 0, 1, 1) - 0.5697).abs() < 1e-4);
        assert!((ao.integrals.g(1, 0, 0, 0) - 0.4441).abs() < 1e-4);
        assert!((ao.integrals.g(1, 0, 1, 0) - 0.2970).abs() < 1e-4);
    }
}

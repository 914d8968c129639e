use nalgebra::DMatrix;

use super::IntegralSet;
use crate::error::{Error, Result};

/// Four-index transformation to the orbitals given by the columns of `c`.
///
/// Runs as four quarter-transformations (O(n⁵)). Electron counts and
/// `e_core` are carried over unchanged.
pub fn transform_to_mo(ao: &IntegralSet, c: &DMatrix<f64>) -> Result<IntegralSet> {
    let n = ao.n_orb();
    if c.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "coefficient matrix has {} rows for {n} basis functions",
            c.nrows()
        )));
    }
    let m = c.ncols();
    if m == 0 || m > n {
        return Err(Error::DimensionMismatch(format!(
            "cannot transform {n} basis functions into {m} orbitals"
        )));
    }
    if ao.n_alpha() > m || ao.n_beta() > m {
        return Err(Error::TooManyElectrons {
            n_electrons: ao.n_alpha().max(ao.n_beta()),
            n_orbitals: m,
        });
    }

    let h_ao = DMatrix::from_row_slice(n, n, ao.h_slice());
    let h_mo = c.transpose() * h_ao * c;
    let mut h = vec![0.0; m * m];
    for p in 0..m {
        for q in 0..m {
            // symmetrize away rounding asymmetry
            h[p * m + q] = 0.5 * (h_mo[(p, q)] + h_mo[(q, p)]);
        }
    }

    // (μν|λσ) -> (iν|λσ) -> (ij|λσ) -> (ij|kσ) -> (ij|kl), always contracting
    // the leading index and rotating it to the back.
    let g = ao.g_slice();
    let step = |src: &[f64], dims: [usize; 4]| -> (Vec<f64>, [usize; 4]) {
        let [d0, d1, d2, d3] = dims;
        let rest = d1 * d2 * d3;
        let mut out = vec![0.0; rest * m];
        for i in 0..m {
            for mu in 0..d0 {
                let cm = c[(mu, i)];
                if cm == 0.0 {
                    continue;
                }
                let row = &src[mu * rest..(mu + 1) * rest];
                // out[(b, c, d, i)] layout: index rotates leading axis to the back
                for (k, &v) in row.iter().enumerate() {
                    out[k * m + i] += cm * v;
                }
            }
        }
        (out, [d1, d2, d3, m])
    };
    let (t1, d) = step(g, [n, n, n, n]);
    let (t2, d) = step(&t1, d);
    let (t3, d) = step(&t2, d);
    let (mut t4, _) = step(&t3, d);

    // enforce exact 8-fold symmetry on the result
    let idx = |p: usize, q: usize, r: usize, s: usize| ((p * m + q) * m + r) * m + s;
    for p in 0..m {
        for q in 0..=p {
            for r in 0..m {
                for s in 0..=r {
                    if r * (r + 1) / 2 + s > p * (p + 1) / 2 + q {
                        continue;
                    }
                    let perms = [
                        (p, q, r, s),
                        (q, p, r, s),
                        (p, q, s, r),
                        (q, p, s, r),
                        (r, s, p, q),
                        (s, r, p, q),
                        (r, s, q, p),
                        (s, r, q, p),
                    ];
                    let mean = perms
                        .iter()
                        .map(|&(a, b, c, d)| t4[idx(a, b, c, d)])
                        .sum::<f64>()
                        / 8.0;
                    for (a, b, c, d) in perms {
                        t4[idx(a, b, c, d)] = mean;
                    }
                }
            }
        }
    }

    Ok(IntegralSet::from_parts_unchecked(
        m,
        ao.n_alpha(),
        ao.n_beta(),
        ao.e_core(),
        h,
        t4,
    ))
}

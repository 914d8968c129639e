use nalgebra::{DMatrix, DVector};

use super::{SpectrumResult, SymmetricOperator};
use crate::error::{Error, Result};
use crate::linalg::sorted_symmetric_eigen;

#[derive(Debug, Clone)]
pub struct DavidsonOptions {
    pub tolerance: f64,
    pub max_subspace: usize,
    pub max_iterations: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions {
            tolerance: 1e-9,
            max_subspace: 30,
            max_iterations: 1000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthogonalizes `v` against `fixed` and `basis` (two passes) and
/// normalizes it. Returns false if nothing is left.
fn orthonormalize(v: &mut [f64], fixed: &[Vec<f64>], basis: &[Vec<f64>]) -> bool {
    let before = dot(v, v).sqrt();
    for _ in 0..2 {
        for b in fixed.iter().chain(basis) {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    let norm = dot(v, v).sqrt();
    if norm <= 1e-10 * before.max(1e-300) || norm == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Lowest eigenpair by Davidson iteration with a diagonal preconditioner.
///
/// `start` is the initial guess; `deflate` vectors (orthonormal) are
/// projected out of every search direction.
pub fn davidson(
    op: &dyn SymmetricOperator,
    start: &[f64],
    deflate: &[Vec<f64>],
    opts: &DavidsonOptions,
) -> Result<SpectrumResult> {
    let n = op.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "start vector of length {} for dimension {n}",
            start.len()
        )));
    }
    let available = n - deflate.len().min(n);
    let diag = op.diagonal();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut sigma: Vec<Vec<f64>> = Vec::new();
    let mut previous: Option<Vec<f64>> = None;
    let mut best_residual = f64::INFINITY;

    let mut v = start.to_vec();
    if !orthonormalize(&mut v, deflate, &[]) {
        return Err(Error::DimensionMismatch(
            "start vector lies in the deflated space".into(),
        ));
    }
    for iteration in 1..=opts.max_iterations {
        let mut av = vec![0.0; n];
        op.apply(&v, &mut av);
        basis.push(v);
        sigma.push(av);

        let m = basis.len();
        let proj = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &sigma[j]));
        let proj = (&proj + proj.transpose()) * 0.5;
        let (vals, vecs) = sorted_symmetric_eigen(&proj);
        let theta = vals[0];
        let s: DVector<f64> = vecs.column(0).into();
        let mut x = vec![0.0; n];
        let mut r = vec![0.0; n];
        for k in 0..m {
            axpy(s[k], &basis[k], &mut x);
            axpy(s[k], &sigma[k], &mut r);
        }
        axpy(-theta, &x, &mut r);
        let rnorm = dot(&r, &r).sqrt();
        best_residual = best_residual.min(rnorm);
        if rnorm < opts.tolerance || m >= available {
            return Ok(SpectrumResult::new(theta, x, rnorm, iteration));
        }

        let mut t: Vec<f64> = r
            .iter()
            .zip(&diag)
            .map(|(ri, di)| {
                let d = theta - di;
                ri / if d.abs() < 1e-8 {
                    1e-8f64.copysign(d)
                } else {
                    d
                }
            })
            .collect();

        if m >= opts.max_subspace {
            // restart on the current and previous Ritz vectors
            basis.clear();
            sigma.clear();
            for mut k in std::iter::once(x.clone()).chain(previous.take()) {
                if orthonormalize(&mut k, deflate, &basis) {
                    let mut ak = vec![0.0; n];
                    op.apply(&k, &mut ak);
                    basis.push(k);
                    sigma.push(ak);
                }
            }
        }
        previous = Some(x);

        if !orthonormalize(&mut t, deflate, &basis) {
            t = r;
            if !orthonormalize(&mut t, deflate, &basis) {
                break;
            }
        }
        v = t;
    }
    Err(Error::DavidsonNotConverged {
        iterations: opts.max_iterations,
        residual: best_residual,
    })
}

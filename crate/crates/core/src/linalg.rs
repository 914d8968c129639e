//! Small dense helpers shared by the SCF and eigensolver code.

use nalgebra::{DMatrix, DVector};

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending and
/// each eigenvector's largest-magnitude component made positive.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let pivot =
            v.iter().copied().fold(
                0.0f64,
                |acc, x| if x.abs() > acc.abs() + 1e-12 { x } else { acc },
            );
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(col, &(v * sign));
    }
    (values, vectors)
}

/// `M^{-1/2}` for a symmetric positive-definite matrix.
pub fn inverse_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (w, v) = sorted_symmetric_eigen(m);
    let d = DMatrix::from_diagonal(&w.map(|x| 1.0 / x.sqrt()));
    &v * d * v.transpose()
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
/// Only used for small orbital-rotation generators.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * scale;
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=16 {
        term = &term * &a / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

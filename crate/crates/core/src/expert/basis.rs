use nalgebra::DMatrix;

use super::ExpertError;

/// Orthonormal basis of the complement of the all-ones vector in `R^n`,
/// returned as the `n × (n-1)` matrix `P` with `PᵀP = I` and `Pᵀ1 = 0`.
///
/// Built from the Householder reflection that maps `e_1` onto `1/√n`; the
/// remaining columns of the reflector span `1⊥`. Deterministic in `n`.
pub fn orthonormal_complement_basis(n: usize) -> Result<DMatrix<f64>, ExpertError> {
    if n < 2 {
        return Err(ExpertError::InvalidArgument(format!(
            "complement basis needs n >= 2, got {n}"
        )));
    }
    let a = 1.0 / (n as f64).sqrt();
    // u = e_1 - a·1
    let mut u = vec![-a; n];
    u[0] += 1.0;
    let uu: f64 = u.iter().map(|v| v * v).sum();
    Ok(DMatrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let identity = if i == col { 1.0 } else { 0.0 };
        identity - 2.0 * u[i] * u[col] / uu
    }))
}

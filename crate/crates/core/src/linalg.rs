//! Dense complex linear algebra used across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::par;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative threshold on singular values for numerical rank and kernels.
pub const RANK_TOL: f64 = 1e-9;

/// Gram matrices up to this side length are diagonalised densely; larger
/// ones go through power iteration.
pub const DENSE_LIMIT: usize = 2048;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 20_000;

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank: singular values above `RANK_TOL` times the largest one.
pub fn numerical_rank(m: &CMatrix) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > RANK_TOL * top).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the numerical kernel, one vector per column.
///
/// `scale` fixes the reference for the relative rank threshold; pass `None`
/// to use the matrix's own largest singular value.
pub fn null_space(m: &CMatrix, scale: Option<f64>) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMatrix::identity(cols, cols);
    }
    // Pad wide matrices to square so the SVD returns a full right basis.
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let reference = scale.unwrap_or(top);
    let kernel: Vec<usize> =
        (0..cols).filter(|&i| reference == 0.0 || svd.singular_values[i] <= RANK_TOL * reference).collect();
    let mut basis = CMatrix::zeros(cols, kernel.len());
    for (j, &i) in kernel.iter().enumerate() {
        for r in 0..cols {
            basis[(r, j)] = v_t[(i, r)].conj();
        }
    }
    basis
}

/// Largest singular value (the 2→2 operator norm).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows.min(cols) <= DENSE_LIMIT {
        let gram = if rows >= cols { m.adjoint() * m } else { m * m.adjoint() };
        let eig = nalgebra::linalg::SymmetricEigen::new(gram);
        eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt()
    } else {
        power_iteration_norm(m)
    }
}

/// Power iteration on the Gram operator `AᴴA`, applied matrix-free.
pub fn power_iteration_norm(m: &CMatrix) -> f64 {
    let cols = m.ncols();
    if cols == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic, generic start vector.
    let mut v = CVector::from_fn(cols, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_033_988_7).fract(), 0.25));
    v /= Complex64::from(v.norm());
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = matvec(m, &v);
        let z = adjoint_matvec(m, &w);
        let next = z.dotc(&v).re;
        let nz = z.norm();
        if nz == 0.0 {
            return 0.0;
        }
        v = z / Complex64::from(nz);
        if (next - lambda).abs() <= POWER_TOL * next.abs().max(f64::MIN_POSITIVE) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.max(0.0).sqrt()
}

fn matvec(m: &CMatrix, v: &CVector) -> CVector {
    let rows = par::map_range(m.nrows(), |r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum::<Complex64>());
    CVector::from_vec(rows)
}

fn adjoint_matvec(m: &CMatrix, w: &CVector) -> CVector {
    let cols = par::map_range(m.ncols(), |c| (0..m.nrows()).map(|r| m[(r, c)].conj() * w[r]).sum::<Complex64>());
    CVector::from_vec(cols)
}

/// All eigenvalues of a square matrix via the complex Schur form, sorted by
/// decreasing magnitude.
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    assert!(m.is_square(), "eigenvalues need a square matrix");
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let mut ev: Vec<Complex64> =
        schur.eigenvalues().expect("complex Schur form is triangular").iter().copied().collect();
    sort_by_magnitude(&mut ev);
    ev
}

pub fn sort_by_magnitude(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)).then(b.im.total_cmp(&a.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        })
    }

    #[test]
    fn dense_and_power_norms_agree() {
        let m = sample(12, 7);
        let dense = spectral_norm(&m);
        let power = power_iteration_norm(&m);
        assert!((dense - power).abs() < 1e-9 * dense, "{dense} vs {power}");
        assert!((dense - singular_values(&m)[0]).abs() < 1e-10 * dense);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let m = sample(3, 5);
        let ker = null_space(&m, None);
        assert_eq!(ker.ncols(), 5 - numerical_rank(&m));
        let residual = &m * &ker;
        assert!(residual.norm() < 1e-10);
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(spectral_norm(&CMatrix::zeros(0, 3)), 0.0);
        assert_eq!(numerical_rank(&CMatrix::zeros(2, 2)), 0);
        assert_eq!(null_space(&CMatrix::zeros(0, 2), None).ncols(), 2);
    }

    #[test]
    fn eigenvalues_sum_to_trace() {
        let m = sample(9, 9);
        let ev = eigenvalues(&m);
        let sum: Complex64 = ev.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-9);
        assert!(ev.windows(2).all(|w| w[0].norm() >= w[1].norm()));
    }
}

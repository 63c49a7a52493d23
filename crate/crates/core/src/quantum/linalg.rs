//! Dense complex matrix helpers.
//!
//! Kronecker products use the row-major convention: basis index `(i_a, i_b)` of
//! `A (x) B` is `i_a * dim_b + i_b`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{dim_err, invalid, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigenvalues below this are treated as zero inside entropies.
pub const EIGEN_CLAMP: f64 = 1e-12;
/// Eigenvalues above this define the support of a state.
pub const SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `|v><v|`
pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect_ok(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= tol
}

/// Spectral decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(m.nrows(), order.len(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// `V f(L) V^dagger` for the Hermitian part of `m`.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for k in 0..n {
        let fk = f(vals[k]);
        for r in 0..n {
            scaled[(r, k)] *= fk;
        }
    }
    scaled * vecs.adjoint()
}

/// Square root of a positive semidefinite matrix (negative eigenvalues clamped).
pub fn sqrt_psd(m: &CMat) -> CMat {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Projector onto the eigenspace of eigenvalues `>= cut`.
pub fn spectral_projector(m: &CMat, cut: f64) -> CMat {
    hermitian_fn(m, |x| if x >= cut { 1.0 } else { 0.0 })
}

/// Reduced matrix on the kept side of a `dim_a * dim_b` operator.
pub fn partial_trace(m: &CMat, dim_a: usize, dim_b: usize, keep: Side) -> Result<CMat> {
    if m.nrows() != dim_a * dim_b || m.ncols() != dim_a * dim_b {
        return Err(dim_err(format!(
            "matrix is {}x{}, expected {}",
            m.nrows(),
            m.ncols(),
            dim_a * dim_b
        )));
    }
    Ok(match keep {
        Side::A => CMat::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Side::B => CMat::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// Reads a matrix from row-major `[re, im]` pairs.
pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let nr = rows.len();
    if nr == 0 {
        return Err(dim_err("empty matrix"));
    }
    let nc = rows[0].len();
    if nc == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(dim_err("ragged or empty matrix rows"));
    }
    if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("matrix entries must be finite"));
    }
    Ok(CMat::from_fn(nr, nc, |i, j| {
        c(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

//! Entropic quantities, all in bits.

use super::linalg::{eigh, eigvalsh, partial_trace, CMat, Side, EIGEN_CLAMP, SUPPORT_TOL};
use super::state::DensityMatrix;
use crate::error::{dim_err, Result};

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(dim_err(format!(
            "dimensions {} and {} differ",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Shannon entropy of a probability vector, in bits, entries below the clamp ignored.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > EIGEN_CLAMP)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// `h(p) = -p log p - (1-p) log(1-p)`
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues()).max(0.0)
}

/// Entropy of an arbitrary PSD matrix (used for unnormalized blocks).
pub(crate) fn matrix_entropy(m: &CMat) -> f64 {
    shannon_entropy(&eigvalsh(m))
}

/// Splits `sigma` into eigenpairs, returning `(support eigenpairs, weight of rho on the kernel)`.
fn support_split(rho: &DensityMatrix, sigma: &DensityMatrix) -> (Vec<(f64, usize)>, CMat, f64) {
    let (vals, vecs) = eigh(sigma.matrix());
    let mut support = Vec::new();
    let mut kernel_weight = 0.0;
    for (k, &l) in vals.iter().enumerate() {
        let v = vecs.column(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if l > SUPPORT_TOL {
            support.push((l, k));
        } else {
            kernel_weight += w;
        }
    }
    (support, vecs, kernel_weight)
}

/// `D(rho || sigma) = Tr rho (log rho - log sigma)`, `+inf` when `rho` is not
/// supported inside `sigma`'s support.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (support, vecs, kernel_weight) = support_split(rho, sigma);
    if kernel_weight > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let mut cross = 0.0;
    for (l, k) in support {
        let v = vecs.column(k);
        let w = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        cross += w * l.log2();
    }
    Ok((-von_neumann_entropy(rho) - cross).max(0.0))
}

/// `D_inf(rho || sigma) = min { lambda : rho <= 2^lambda sigma }`.
pub fn relative_min_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (support, vecs, kernel_weight) = support_split(rho, sigma);
    if kernel_weight > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    // sigma^{-1/2} rho sigma^{-1/2} expressed in sigma's support eigenbasis
    let r = support.len();
    let m = CMat::from_fn(r, r, |i, j| {
        let (li, ki) = support[i];
        let (lj, kj) = support[j];
        let vi = vecs.column(ki);
        let vj = vecs.column(kj);
        (vi.adjoint() * rho.matrix() * vj)[(0, 0)] / (li.sqrt() * lj.sqrt())
    });
    let top = eigvalsh(&m).last().copied().unwrap_or(0.0);
    Ok(top.log2())
}

/// `I(A:B) = D(rho_AB || rho_A (x) rho_B)`
pub fn mutual_information(rho: &DensityMatrix, dim_a: usize, dim_b: usize) -> Result<f64> {
    let ra = rho.partial_trace(dim_a, dim_b, Side::A)?;
    let rb = rho.partial_trace(dim_a, dim_b, Side::B)?;
    relative_entropy(rho, &ra.tensor(&rb))
}

/// `H(A) + H(B) - H(AB)` on an arbitrary PSD bipartite matrix of unit trace.
pub(crate) fn mutual_information_matrix(m: &CMat, dim_a: usize, dim_b: usize) -> Result<f64> {
    let ha = matrix_entropy(&partial_trace(m, dim_a, dim_b, Side::A)?);
    let hb = matrix_entropy(&partial_trace(m, dim_a, dim_b, Side::B)?);
    Ok((ha + hb - matrix_entropy(m)).max(0.0))
}

/// `(1/2) ||rho - sigma||_1`, from the singular values of the difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    let sv = diff.singular_values();
    Ok((0.5 * sv.iter().sum::<f64>()).min(1.0))
}

/// Squared Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`. For a pure
/// `rho = |psi><psi|` this is `<psi|sigma|psi>`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let s = super::linalg::sqrt_psd(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let root_trace: f64 = eigvalsh(&inner).iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((root_trace * root_trace).min(1.0))
}

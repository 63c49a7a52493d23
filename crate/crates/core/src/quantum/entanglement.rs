use super::info::{binary_entropy, von_neumann_entropy};
use super::linalg::{c, hermitian_fn, kron, CMat, Side, EIGEN_CLAMP};
use super::state::{BipartitePureState, DensityMatrix};
use crate::error::{dim_err, Result};

/// `E(psi)`: entropy of the reduced state on the B side.
pub fn entanglement_entropy(psi: &BipartitePureState) -> f64 {
    entanglement_entropy_side(psi, Side::B)
}

pub fn entanglement_entropy_side(psi: &BipartitePureState, keep: Side) -> f64 {
    von_neumann_entropy(&psi.reduced(keep))
}

fn sigma_y_sigma_y() -> CMat {
    let sy = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    kron(&sy, &sy)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(dim_err(format!(
            "concurrence needs a 2x2 system, got dimension {}",
            rho.dim()
        )));
    }
    let yy = sigma_y_sigma_y();
    let tilde = &yy * rho.matrix().conjugate() * &yy;
    // lambda_i are the singular values of sqrt(rho) sqrt(tilde); taking them
    // directly avoids square roots of near-zero eigenvalues of rho * tilde
    let root = |m: &CMat| hermitian_fn(m, |x| if x > EIGEN_CLAMP { x.sqrt() } else { 0.0 });
    let prod = root(rho.matrix()) * root(&tilde);
    let mut lambdas: Vec<f64> = prod.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state, in bits.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let cc = concurrence(rho)?.min(1.0);
    Ok(binary_entropy(
        (1.0 + (1.0 - cc * cc).max(0.0).sqrt()) / 2.0,
    ))
}

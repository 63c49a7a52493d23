//! Both sides of the quantum Raz inequality `sum_i I(X_i : A)_rho <= D(rho || sigma)`
//! for classical `X_1..X_n` and a quantum register `A`.

use serde::Serialize;

use super::info::{mutual_information_matrix, relative_entropy};
use super::state::{CqState, DensityMatrix};
use crate::error::{dim_err, invalid, Result};

const PRODUCT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RazAudit {
    pub lhs: f64,
    pub rhs: f64,
}

impl RazAudit {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// Checks that `sigma = (sigma_X1 (x) ... (x) sigma_Xn) (x) sigma_A`.
pub fn check_product_form(sigma: &CqState) -> Result<()> {
    let n = sigma.arity();
    let marginals: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for (lab, &w) in sigma.labels().iter().zip(sigma.weights()) {
                match acc.iter_mut().find(|(v, _)| *v == lab[i]) {
                    Some(e) => e.1 += w,
                    None => acc.push((lab[i], w)),
                }
            }
            acc
        })
        .collect();
    for (lab, &w) in sigma.labels().iter().zip(sigma.weights()) {
        let prod: f64 = (0..n)
            .map(|i| {
                marginals[i]
                    .iter()
                    .find(|(v, _)| *v == lab[i])
                    .map_or(0.0, |e| e.1)
            })
            .product();
        if (prod - w).abs() > PRODUCT_TOL {
            return Err(invalid("sigma is not a product distribution over X_1..X_n"));
        }
    }
    let reference = sigma
        .weights()
        .iter()
        .position(|&w| w > 0.0)
        .map(|i| &sigma.states()[i])
        .ok_or_else(|| invalid("sigma has no weight"))?;
    for (s, &w) in sigma.states().iter().zip(sigma.weights()) {
        if w > 0.0 && (s.matrix() - reference.matrix()).norm() > PRODUCT_TOL {
            return Err(invalid(
                "sigma's quantum part depends on the classical label",
            ));
        }
    }
    Ok(())
}

pub fn quantum_raz_audit(rho: &CqState, sigma: &CqState) -> Result<RazAudit> {
    if rho.arity() != sigma.arity() || rho.quantum_dim() != sigma.quantum_dim() {
        return Err(dim_err(
            "rho and sigma must share arity and quantum dimension",
        ));
    }
    check_product_form(sigma)?;

    let d = rho.quantum_dim();
    let mut lhs = 0.0;
    for i in 0..rho.arity() {
        let m = rho.marginal(&[i])?;
        let block = m.block_matrix(m.labels());
        lhs += mutual_information_matrix(&block, m.labels().len(), d)?;
    }

    let mut union: Vec<Vec<usize>> = rho.labels().iter().chain(sigma.labels()).cloned().collect();
    union.sort();
    union.dedup();
    let full_rho = DensityMatrix::new(rho.block_matrix(&union))?;
    let full_sigma = DensityMatrix::new(sigma.block_matrix(&union))?;
    let rhs = relative_entropy(&full_rho, &full_sigma)?;
    Ok(RazAudit { lhs, rhs })
}

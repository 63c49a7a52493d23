//! Chain rules for relative entropy and mutual information on cq-states.

use serde::Serialize;

use super::info::{mutual_information_matrix, relative_entropy};
use super::state::{CqState, DensityMatrix};
use crate::error::{dim_err, invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainRuleAudit {
    pub lhs: f64,
    pub rhs: f64,
}

impl ChainRuleAudit {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

fn union_labels(a: &CqState, b: &CqState) -> Vec<Vec<usize>> {
    let mut u: Vec<Vec<usize>> = a.labels().iter().chain(b.labels()).cloned().collect();
    u.sort();
    u.dedup();
    u
}

/// Classical relative entropy in bits, `+inf` when `q` charges a zero of `p`.
pub fn classical_relative_entropy(q: &[f64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi > 0.0 {
            if pi <= 0.0 {
                return f64::INFINITY;
            }
            acc += qi * (qi / pi).log2();
        }
    }
    acc.max(0.0)
}

/// For labeled mixtures `rho' = sum_z Q(z) |z><z| (x) rho'_z` and
/// `rho = sum_z P(z) |z><z| (x) rho_z`: `lhs = D(rho' || rho)` computed on the
/// block matrices, `rhs = D(Q || P) + E_{z ~ Q} D(rho'_z || rho_z)`.
pub fn relative_entropy_chain(rho_prime: &CqState, rho: &CqState) -> Result<ChainRuleAudit> {
    if rho_prime.arity() != rho.arity() || rho_prime.quantum_dim() != rho.quantum_dim() {
        return Err(dim_err("states must share arity and quantum dimension"));
    }
    let union = union_labels(rho_prime, rho);
    let lhs = relative_entropy(
        &DensityMatrix::new(rho_prime.block_matrix(&union))?,
        &DensityMatrix::new(rho.block_matrix(&union))?,
    )?;
    let q: Vec<f64> = union.iter().map(|z| rho_prime.weight_of(z)).collect();
    let p: Vec<f64> = union.iter().map(|z| rho.weight_of(z)).collect();
    let mut rhs = classical_relative_entropy(&q, &p);
    for (i, z) in rho_prime.labels().iter().enumerate() {
        let w = rho_prime.weights()[i];
        if w == 0.0 || rhs.is_infinite() {
            continue;
        }
        let k = rho
            .labels()
            .iter()
            .position(|l| l == z)
            .expect("support checked by the classical term");
        rhs += w * relative_entropy(&rho_prime.states()[i], &rho.states()[k])?;
    }
    Ok(ChainRuleAudit { lhs, rhs })
}

/// `I(X_i : A | X_cond)`, conditioning explicitly on each value of `X_cond`.
pub fn conditional_mutual_information_cq(state: &CqState, i: usize, cond: &[usize]) -> Result<f64> {
    if i >= state.arity() || cond.iter().any(|&c| c >= state.arity() || c == i) {
        return Err(invalid("bad coordinates"));
    }
    let d = state.quantum_dim();
    let mut coords = cond.to_vec();
    coords.push(i);
    let joint = state.marginal(&coords)?;
    let mut prefixes: Vec<Vec<usize>> = joint
        .labels()
        .iter()
        .map(|l| l[..cond.len()].to_vec())
        .collect();
    prefixes.sort();
    prefixes.dedup();
    let mut acc = 0.0;
    for pre in prefixes {
        let picked: Vec<usize> = (0..joint.labels().len())
            .filter(|&k| joint.labels()[k][..cond.len()] == pre[..])
            .collect();
        let mass: f64 = picked.iter().map(|&k| joint.weights()[k]).sum();
        if mass <= 0.0 {
            continue;
        }
        let labels: Vec<Vec<usize>> = picked
            .iter()
            .map(|&k| vec![joint.labels()[k][cond.len()]])
            .collect();
        let weights: Vec<f64> = picked.iter().map(|&k| joint.weights()[k] / mass).collect();
        let states: Vec<DensityMatrix> =
            picked.iter().map(|&k| joint.states()[k].clone()).collect();
        let slice = CqState::new(labels.clone(), weights, states)?;
        acc += mass * mutual_information_matrix(&slice.block_matrix(&labels), labels.len(), d)?;
    }
    Ok(acc)
}

/// `I(X_1..X_n : A) = D(rho_XA || rho_X (x) rho_A)`.
pub fn total_mutual_information_cq(state: &CqState) -> Result<f64> {
    let labels = state.labels().to_vec();
    let product = CqState::new(
        labels.clone(),
        state.weights().to_vec(),
        vec![state.quantum_marginal(); labels.len()],
    )?;
    relative_entropy(
        &DensityMatrix::new(state.block_matrix(&labels))?,
        &DensityMatrix::new(product.block_matrix(&labels))?,
    )
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// Randomized chain rule: `lhs` averages `sum_i I(X_pi(i) : A | X_pi(<i))` over
/// all `n!` orderings, `rhs = I(X_1..X_n : A)`.
pub fn randomized_chain_rule(state: &CqState) -> Result<ChainRuleAudit> {
    let n = state.arity();
    if n > 6 {
        return Err(invalid(
            "randomized chain rule is enumerated exactly only for n <= 6",
        ));
    }
    let perms = permutations(n);
    let mut lhs = 0.0;
    for p in &perms {
        for k in 0..n {
            lhs += conditional_mutual_information_cq(state, p[k], &p[..k])?;
        }
    }
    lhs /= perms.len() as f64;
    Ok(ChainRuleAudit {
        lhs,
        rhs: total_mutual_information_cq(state)?,
    })
}

//! Exact i.i.d. threshold probabilities and the completeness bound.

use crate::error::{invalid, Result};
use crate::min_wins;

/// `P[Bin(n, p) >= ceil(threshold * n)]`, accumulated in log space.
pub fn iid_threshold_win_prob(p: f64, n: usize, threshold: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} is not a probability")));
    }
    let k0 = min_wins(threshold, n);
    if k0 == 0 {
        return Ok(1.0);
    }
    if k0 > n {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    // ln C(n, k) built up incrementally from ln C(n, 0) = 0
    let mut ln_choose = 0.0;
    let mut terms = Vec::with_capacity(n - k0 + 1);
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= k0 {
            terms.push(ln_choose + k as f64 * lp + (n - k) as f64 * lq);
        }
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    Ok((top + sum.ln()).exp().min(1.0))
}

/// `1 - exp(-(nu - eta)^2 n / 3)`: the probability lower bound for winning at
/// threshold `qval - nu` with per-round win probability `qval - eta`.
/// `eta == nu` gives the vacuous bound 0; `eta > nu` is an error.
pub fn hoeffding_completeness_bound(nu: f64, eta: f64, n: usize) -> Result<f64> {
    if !(eta >= 0.0) || eta > nu {
        return Err(invalid(format!(
            "need 0 <= eta <= nu, got eta = {eta}, nu = {nu}"
        )));
    }
    let d = nu - eta;
    Ok(-(-(d * d) * n as f64 / 3.0).exp_m1())
}

//! Closed-form soundness constants, entanglement lower bounds and the
//! proof-parameter ledger.
//!
//! Logarithms are base 2 unless a formula is written with `exp`/`ln`, in which
//! case the natural base is used exactly there (the kappa gates of the
//! soundness statement and the subset-size parameter `t`).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `C = log2 |A x B|`
pub fn log_answer_pairs(answer_pairs: usize) -> Result<f64> {
    if answer_pairs < 2 {
        return Err(invalid(format!(
            "answer_pairs = {answer_pairs} must be at least 2"
        )));
    }
    Ok((answer_pairs as f64).log2())
}

fn gap(delta: f64, nu: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid(format!("delta = {delta} must lie in (0, 1]")));
    }
    if !(nu >= 0.0) {
        return Err(invalid(format!("nu = {nu} must be non-negative")));
    }
    if nu >= delta {
        return Err(Error::NoMargin { nu, delta });
    }
    Ok(delta - nu)
}

/// Pure-state constants `(c1', c2') = ((D-nu)^3 / (2000 C), (D-nu)^5 / (10 * 90^2 C))`.
pub fn constants_pure(delta: f64, nu: f64, answer_pairs: usize) -> Result<(f64, f64)> {
    let g = gap(delta, nu)?;
    let c = log_answer_pairs(answer_pairs)?;
    Ok((g.powi(3) / (2000.0 * c), g.powi(5) / (81000.0 * c)))
}

/// Mixed-state constants `(c1, c2) = ((D-nu)^3 / (1000 C), (D-nu)^5 / (10 * 180^2 C))`.
/// The denominators differ from the pure ones by exact powers of two, so
/// `c1 = 2 c1'` and `c2 = c2' / 4` hold bit for bit.
pub fn constants_mixed(delta: f64, nu: f64, answer_pairs: usize) -> Result<(f64, f64)> {
    let g = gap(delta, nu)?;
    let c = log_answer_pairs(answer_pairs)?;
    Ok((g.powi(3) / (1000.0 * c), g.powi(5) / (324000.0 * c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertInput {
    pub delta: f64,
    pub nu: f64,
    pub answer_pairs: usize,
    pub n: u64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub passed: bool,
    /// The quantity compared against the threshold (`n` or `kappa`).
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateFailure {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gates {
    /// `n > 1 / c1`
    pub n_gate: Gate,
    /// `kappa >= exp(-c1 n)`; the binding kappa gate.
    pub kappa_gate: Gate,
    /// `kappa >= 2^(-alpha^3 n / (1000 C))`, reported only.
    pub kappa_gate_proof: Gate,
    /// `kappa >= (16 / alpha) 2^(-alpha^3 n / 384)`, reported only.
    pub kappa_gate_subset: Gate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub input: CertInput,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c1_prime: f64,
    pub c2_prime: f64,
    pub gates: Gates,
    pub gates_passed: bool,
    pub failures: Vec<GateFailure>,
    /// `c2 kappa^2 n`, present only when both binding gates pass.
    pub ef_lower_bound_bits: Option<f64>,
    /// `c2 / 4`
    pub ec_lower_bound_bits: f64,
    /// Pure-state bound on `E(psi)` as stated in the soundness theorem: `c2' kappa n`.
    pub pure_theorem_statement_form: f64,
    /// Pure-state bound from the end of the proof chain:
    /// `kappa alpha^5 n / (2 * 5 * 90^2 * C)`.
    pub pure_proof_chain_form: f64,
}

pub fn certify_eof(input: &CertInput) -> Result<CertReport> {
    let (c1, c2) = constants_mixed(input.delta, input.nu, input.answer_pairs)?;
    let (c1_prime, c2_prime) = constants_pure(input.delta, input.nu, input.answer_pairs)?;
    if !(input.kappa > 0.0 && input.kappa <= 1.0) {
        return Err(invalid(format!(
            "kappa = {} must lie in (0, 1]",
            input.kappa
        )));
    }
    if input.n == 0 {
        return Err(invalid("n must be positive"));
    }
    let alpha = input.delta - input.nu;
    let c = log_answer_pairs(input.answer_pairs)?;
    let n = input.n as f64;
    let kappa = input.kappa;

    let n_gate = Gate {
        passed: n > 1.0 / c1,
        value: n,
        threshold: 1.0 / c1,
    };
    let kappa_gate = {
        let th = (-c1 * n).exp();
        Gate {
            passed: kappa >= th,
            value: kappa,
            threshold: th,
        }
    };
    let kappa_gate_proof = {
        let th = (-(alpha.powi(3)) * n / (1000.0 * c)).exp2();
        Gate {
            passed: kappa >= th,
            value: kappa,
            threshold: th,
        }
    };
    let kappa_gate_subset = {
        let th = 16.0 / alpha * (-(alpha.powi(3)) * n / 384.0).exp2();
        Gate {
            passed: kappa >= th,
            value: kappa,
            threshold: th,
        }
    };

    let mut failures = Vec::new();
    if !n_gate.passed {
        failures.push(GateFailure {
            code: "n_below_inverse_c1",
            message: format!("n below 1/c1 ({} <= {:.6e})", input.n, 1.0 / c1),
        });
    }
    if !kappa_gate.passed {
        failures.push(GateFailure {
            code: "kappa_below_exp_neg_c1_n",
            message: format!(
                "kappa below exp(-c1 n) ({kappa} < {:.6e})",
                kappa_gate.threshold
            ),
        });
    }
    let gates_passed = failures.is_empty();
    // grouped as (c2 kappa^2) n so that doubling kappa or n scales the bound exactly
    let ef = gates_passed.then(|| c2 * kappa.powi(2) * n);

    Ok(CertReport {
        input: *input,
        alpha,
        c,
        c1,
        c2,
        c1_prime,
        c2_prime,
        gates: Gates {
            n_gate,
            kappa_gate,
            kappa_gate_proof,
            kappa_gate_subset,
        },
        gates_passed,
        failures,
        ef_lower_bound_bits: ef,
        ec_lower_bound_bits: c2 / 4.0,
        pure_theorem_statement_form: c2_prime * kappa * n,
        pure_proof_chain_form: kappa * alpha.powi(5) * n / (2.0 * 5.0 * 90.0 * 90.0 * c),
    })
}

/// Parameters of the subset-conditioning step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop32Ledger {
    pub epsilon: f64,
    pub gamma: f64,
    pub n: u64,
    pub kappa: f64,
    pub alpha: f64,
    pub tau: f64,
    /// `alpha / 4`
    pub delta_cap: f64,
    /// `(6 / delta_cap^2) (ln(2 / kappa) + ln(8 / alpha))`
    pub t: f64,
    /// `(96 / alpha^2) ln(16 / (alpha kappa))`
    pub s_size_bound: f64,
    pub prop_gate_threshold: f64,
    pub prop_gate: bool,
    /// `epsilon - alpha / 4 - t / n`
    pub delta_prop: f64,
    pub t_over_n: f64,
    /// `t / n <= alpha / 4`
    pub t_over_n_ok: bool,
    /// Guaranteed `Ex_j P(W_j | W_S)`: `1 - epsilon + alpha`.
    pub conclusion: f64,
    pub flags: Vec<String>,
}

pub fn prop32_ledger(epsilon: f64, gamma: f64, n: u64, kappa: f64) -> Result<Prop32Ledger> {
    if !(gamma > 0.0 && epsilon < 1.0) {
        return Err(invalid("need 0 < gamma and epsilon < 1"));
    }
    if gamma >= epsilon {
        return Err(invalid(format!(
            "gamma = {gamma} must be below epsilon = {epsilon}"
        )));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(invalid(format!("kappa = {kappa} must lie in (0, 1]")));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let alpha = epsilon - gamma;
    let tau = epsilon - 0.75 * alpha;
    let delta_cap = alpha / 4.0;
    let t = 6.0 / (delta_cap * delta_cap) * ((2.0 / kappa).ln() + (8.0 / alpha).ln());
    let s_size_bound = 96.0 / (alpha * alpha) * (16.0 / (alpha * kappa)).ln();
    let nf = n as f64;
    let prop_gate_threshold = 16.0 / alpha * (-(alpha.powi(3)) * nf / 384.0).exp2();
    let prop_gate = kappa >= prop_gate_threshold;
    let t_over_n = t / nf;
    let t_over_n_ok = t_over_n <= alpha / 4.0;
    let mut flags = Vec::new();
    if prop_gate && !t_over_n_ok {
        flags.push(format!(
            "t/n = {t_over_n} exceeds alpha/4 although the gate passes"
        ));
    }
    if !prop_gate {
        flags.push("subset gate fails: kappa below (16/alpha) 2^(-alpha^3 n/384)".to_string());
    }
    Ok(Prop32Ledger {
        epsilon,
        gamma,
        n,
        kappa,
        alpha,
        tau,
        delta_cap,
        t,
        s_size_bound,
        prop_gate_threshold,
        prop_gate,
        delta_prop: epsilon - alpha / 4.0 - t_over_n,
        t_over_n,
        t_over_n_ok,
        conclusion: 1.0 - epsilon + alpha,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorParams {
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
    pub m: usize,
    pub delta: f64,
    pub delta_prime: f64,
    pub delta_dblprime: f64,
    /// `sqrt(delta) + 8 sqrt(delta') + sqrt(2 delta'')`
    pub accrued: f64,
}

impl ErrorParams {
    pub fn bound_input(&self) -> f64 {
        self.delta.sqrt()
    }
    pub fn bound_sampling(&self) -> f64 {
        self.delta_prime.sqrt()
    }
    pub fn bound_bob(&self) -> f64 {
        (2.0 * self.delta_dblprime).sqrt()
    }
    pub fn bound_alice(&self) -> f64 {
        (2.0 * self.delta_prime).sqrt()
    }
}

/// Error parameters with `beta = alpha^2 / (1000 C)`.
pub fn error_params(
    alpha: f64,
    answer_pairs: usize,
    n: usize,
    s_size: usize,
    p_ws: f64,
    ent_bits: f64,
) -> Result<ErrorParams> {
    let c = log_answer_pairs(answer_pairs)?;
    error_params_with_beta(
        alpha * alpha / (1000.0 * c),
        answer_pairs,
        n,
        s_size,
        p_ws,
        ent_bits,
    )
}

pub fn error_params_with_beta(
    beta: f64,
    answer_pairs: usize,
    n: usize,
    s_size: usize,
    p_ws: f64,
    ent_bits: f64,
) -> Result<ErrorParams> {
    let c = log_answer_pairs(answer_pairs)?;
    if !(beta > 0.0) {
        return Err(invalid(format!("beta = {beta} must be positive")));
    }
    if beta >= 1.0 {
        return Err(invalid(format!("beta = {beta} must be below 1")));
    }
    if s_size >= n {
        return Err(invalid(format!(
            "m = n - |S| = {} must be positive",
            n as i64 - s_size as i64
        )));
    }
    if !(p_ws > 0.0 && p_ws <= 1.0) {
        return Err(invalid(format!("P(W_S) = {p_ws} must lie in (0, 1]")));
    }
    if !(ent_bits >= 0.0) {
        return Err(invalid("entanglement must be non-negative"));
    }
    let m = n - s_size;
    let mf = m as f64;
    let surprisal = -p_ws.log2();
    let delta = surprisal / ((1.0 - beta) * mf);
    let delta_prime = (surprisal + (2.0 * s_size as f64 + beta * mf) * c) / ((1.0 - beta) * mf);
    let delta_dblprime = ent_bits / (beta * mf * p_ws);
    let accrued = delta.sqrt() + 8.0 * delta_prime.sqrt() + (2.0 * delta_dblprime).sqrt();
    Ok(ErrorParams {
        c,
        beta,
        m,
        delta,
        delta_prime,
        delta_dblprime,
        accrued,
    })
}

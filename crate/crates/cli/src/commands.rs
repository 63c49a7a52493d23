use std::path::{Path, PathBuf};

use nlg_core::certifier::{
    certify_eof, error_params, error_params_with_beta, prop32_ledger, CertInput,
};
use nlg_core::games::{classical_optimum, DEFAULT_ENUMERATION_BUDGET};
use nlg_core::repetition::{
    correlated_sample_trials, enumerate_joint, extraction_protocol_exact,
    extraction_protocol_sampled, iid_threshold_win_prob, lemma_audit, monte_carlo_threshold,
    AuditConfig, JointTable, ProtocolConfig, RoundBehavior, DEFAULT_TABLE_BUDGET,
};
use nlg_core::strategies::{
    apply_noise, behavior_of, behavior_of_strategy, seesaw_optimize, win_probability, NoiseChannel,
    NoiseKind,
};
use nlg_core::{Behavior, Game, QuantumStrategy, ThresholdGameSpec};
use serde::de::DeserializeOwned;
use serde_json::json;

use crate::args::{
    AuditCmd, AuditInput, CertifyArgs, Command, LedgerCmd, SampleCmd, SimulateCmd, StrategyInput,
    ValueCmd,
};
use crate::output::{emit, RunReport};
use crate::sweep::{n_range, sweep_csv, sweep_threshold};
use crate::{CliError, BUDGET_ENV, EXIT_GATE, EXIT_OK};

pub fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Value(v) => value(v),
        Command::Simulate(s) => simulate(s),
        Command::Certify(c) => certify(c),
        Command::Ledger(l) => ledger(l),
        Command::Audit(a) => audit(a),
        Command::Sample(s) => sample(s),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// `NLG_TABLE_BUDGET` if set, else `default`.
pub fn resolve_budget(default: f64) -> Result<f64, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(b) if b > 0.0 => Ok(b),
            _ => Err(CliError::Validation(format!(
                "{BUDGET_ENV} = {v:?} is not a positive number"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(default),
        Err(e) => Err(CliError::Validation(format!("{BUDGET_ENV}: {e}"))),
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn finish(report: RunReport, out: Option<&PathBuf>) -> Result<i32, CliError> {
    emit(&report.to_text(), out.map(|p| p.as_path()))?;
    Ok(EXIT_OK)
}

fn value(cmd: ValueCmd) -> Result<i32, CliError> {
    match cmd {
        ValueCmd::Classical { game, plain, out } => {
            let g: Game = read_json(&game)?;
            let budget = resolve_budget(DEFAULT_ENUMERATION_BUDGET)?;
            let opt = classical_optimum(&g, budget)?;
            if plain {
                emit(&format!("{}\n", opt.value), out.out.as_deref())?;
                return Ok(EXIT_OK);
            }
            let inputs = json!({ "game": path_str(&game), "budget": budget });
            finish(
                RunReport::new("value classical", 0, inputs, &opt)?,
                out.out.as_ref(),
            )
        }
        ValueCmd::QuantumSeesaw {
            game,
            dim,
            restarts,
            seed,
            plain,
            save_strategy,
            out,
        } => {
            let g: Game = read_json(&game)?;
            let res = seesaw_optimize(&g, dim, restarts, seed)?;
            if let Some(p) = &save_strategy {
                let text = serde_json::to_string_pretty(&res.strategy)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                emit(&(text + "\n"), Some(p))?;
            }
            if plain {
                emit(&format!("{}\n", res.value), out.out.as_deref())?;
                return Ok(EXIT_OK);
            }
            let inputs = json!({
                "game": path_str(&game),
                "dim": dim,
                "restarts": restarts,
                "save_strategy": save_strategy.as_deref().map(path_str),
            });
            finish(
                RunReport::new("value quantum-seesaw", seed, inputs, &res)?,
                out.out.as_ref(),
            )
        }
    }
}

fn load_behavior(input: &StrategyInput) -> Result<(Game, Behavior), CliError> {
    let g: Game = read_json(&input.game)?;
    let mut s: QuantumStrategy = read_json(&input.strategy)?;
    if input.noise != 0.0 {
        s = apply_noise(
            &s,
            &NoiseChannel::new(NoiseKind::Depolarizing, input.noise)?,
        )?;
    }
    let b = behavior_of(&s, &g)?;
    Ok((g, b))
}

fn strategy_inputs(input: &StrategyInput) -> serde_json::Value {
    json!({
        "game": path_str(&input.game),
        "strategy": path_str(&input.strategy),
        "noise": input.noise,
        "noise_kind": NoiseKind::Depolarizing,
    })
}

fn simulate(cmd: SimulateCmd) -> Result<i32, CliError> {
    match cmd {
        SimulateCmd::Threshold {
            input,
            n,
            threshold,
            trials,
            exact,
            seed,
            out,
        } => {
            let (g, b) = load_behavior(&input)?;
            let spec = ThresholdGameSpec::new(g.clone(), n, threshold)?;
            let p = win_probability(&b, &g)?;
            let tail = iid_threshold_win_prob(p, n, threshold)?;
            let mc = match (exact, trials) {
                (false, Some(t)) => Some(monte_carlo_threshold(&b, &spec, t, seed)?),
                _ => None,
            };
            let mut inputs = strategy_inputs(&input);
            inputs["n"] = json!(n);
            inputs["threshold"] = json!(threshold);
            inputs["trials"] = json!(trials);
            inputs["exact"] = json!(exact);
            let result = json!({
                "p_round": p,
                "required_wins": spec.required_wins(),
                "exact_tail": tail,
                "monte_carlo": mc,
                "ci_half_width": mc.as_ref().map(|m| m.ci_half_width()),
            });
            finish(
                RunReport::new("simulate threshold", seed, inputs, result)?,
                out.out.as_ref(),
            )
        }
        SimulateCmd::Sweep {
            input,
            n_min,
            n_max,
            n_step,
            threshold,
            trials,
            seed,
            out,
        } => {
            let ns = n_range(n_min, n_max, n_step)?;
            let (g, b) = load_behavior(&input)?;
            let rows = sweep_threshold(&b, &g, &ns, threshold, trials, seed)?;
            emit(&sweep_csv(&rows), out.out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn certify(c: CertifyArgs) -> Result<i32, CliError> {
    let input = CertInput {
        delta: c.delta,
        nu: c.nu,
        answer_pairs: c.answer_pairs,
        n: c.n,
        kappa: c.kappa,
    };
    let report = certify_eof(&input)?;
    let code = if report.gates_passed {
        EXIT_OK
    } else {
        EXIT_GATE
    };
    for f in &report.failures {
        eprintln!("gate failed: {} ({})", f.message, f.code);
    }
    let inputs = serde_json::to_value(input).map_err(|e| CliError::Validation(e.to_string()))?;
    finish(
        RunReport::new("certify", 0, inputs, &report)?,
        c.out.out.as_ref(),
    )?;
    Ok(code)
}

fn ledger(cmd: LedgerCmd) -> Result<i32, CliError> {
    match cmd {
        LedgerCmd::Prop32 {
            epsilon,
            gamma,
            n,
            kappa,
            out,
        } => {
            let l = prop32_ledger(epsilon, gamma, n, kappa)?;
            let inputs = json!({ "epsilon": epsilon, "gamma": gamma, "n": n, "kappa": kappa });
            finish(
                RunReport::new("ledger prop32", 0, inputs, &l)?,
                out.out.as_ref(),
            )
        }
        LedgerCmd::Errors {
            alpha,
            answer_pairs,
            n,
            s_size,
            p_ws,
            entanglement,
            beta,
            out,
        } => {
            let e = match beta {
                Some(b) => error_params_with_beta(b, answer_pairs, n, s_size, p_ws, entanglement)?,
                None => error_params(alpha, answer_pairs, n, s_size, p_ws, entanglement)?,
            };
            let inputs = json!({
                "alpha": alpha,
                "answer_pairs": answer_pairs,
                "n": n,
                "s_size": s_size,
                "p_ws": p_ws,
                "entanglement": entanglement,
                "beta": e.beta,
            });
            let result = json!({
                "params": e,
                "bound_input": e.bound_input(),
                "bound_sampling": e.bound_sampling(),
                "bound_bob": e.bound_bob(),
                "bound_alice": e.bound_alice(),
            });
            finish(
                RunReport::new("ledger errors", 0, inputs, result)?,
                out.out.as_ref(),
            )
        }
    }
}

pub struct AuditSetup {
    pub game: Game,
    pub table: JointTable,
    pub entanglement_bits: f64,
    pub mode: &'static str,
    pub budget: f64,
}

/// Builds the exact n-round table. A strategy whose alphabets match the game is
/// lifted i.i.d. (entanglement `n * E`); one over `n`-fold vector alphabets is
/// used as a joint n-round strategy.
pub fn audit_setup(input: &AuditInput) -> Result<AuditSetup, CliError> {
    let game: Game = read_json(&input.game)?;
    let s: QuantumStrategy = read_json(&input.strategy)?;
    let n = input.n;
    if n == 0 || n > 16 {
        return Err(CliError::Validation(format!("n = {n} must lie in 1..=16")));
    }
    let (nx, ny, na, nb) = game.dims();
    let pow = |k: usize| k.checked_pow(n as u32);
    let sizes = s.alphabet_sizes();
    let (rb, per_state, mode) = if sizes == (nx, ny, na, nb) {
        (RoundBehavior::Iid(behavior_of(&s, &game)?), n as f64, "iid")
    } else if (Some(sizes.0), Some(sizes.1), Some(sizes.2), Some(sizes.3))
        == (pow(nx), pow(ny), pow(na), pow(nb))
    {
        (
            RoundBehavior::Joint(behavior_of_strategy(&s)?),
            1.0,
            "joint",
        )
    } else {
        return Err(CliError::Validation(format!(
            "strategy alphabets {sizes:?} match neither the game {:?} nor its {n}-fold power",
            game.dims()
        )));
    };
    let entanglement_bits = match input.entanglement {
        Some(e) => e,
        None => {
            per_state
                * s.pure_state_entanglement().ok_or_else(|| {
                    CliError::Validation("strategy state is mixed: pass --entanglement".into())
                })?
        }
    };
    let budget = resolve_budget(DEFAULT_TABLE_BUDGET)?;
    let table = enumerate_joint(&rb, &game, n, budget)?;
    Ok(AuditSetup {
        game,
        table,
        entanglement_bits,
        mode,
        budget,
    })
}

fn audit_inputs(input: &AuditInput, setup: &AuditSetup) -> serde_json::Value {
    json!({
        "game": path_str(&input.game),
        "strategy": path_str(&input.strategy),
        "strategy_mode": setup.mode,
        "n": input.n,
        "s": input.s,
        "tau": input.tau,
        "beta": input.beta,
        "entanglement_bits": setup.entanglement_bits,
        "budget": setup.budget,
    })
}

fn audit(cmd: AuditCmd) -> Result<i32, CliError> {
    match cmd {
        AuditCmd::Lemmas { input, t, out } => {
            let setup = audit_setup(&input)?;
            let config = AuditConfig {
                s: input.s.clone(),
                tau: input.tau,
                beta: input.beta,
                t: t.clone(),
                entanglement_bits: setup.entanglement_bits,
            };
            let report = lemma_audit(&setup.table, &setup.game, &config)?;
            let mut inputs = audit_inputs(&input, &setup);
            inputs["t"] = json!(t);
            let result = json!({
                "all_satisfied": report.all_satisfied(),
                "max_path_gap": report.max_path_gap(),
                "audit": report,
            });
            finish(
                RunReport::new("audit lemmas", input.seed, inputs, result)?,
                out.out.as_ref(),
            )
        }
        AuditCmd::Protocol { input, trials, out } => {
            let setup = audit_setup(&input)?;
            let config = ProtocolConfig {
                s: input.s.clone(),
                tau: input.tau,
                beta: input.beta,
                entanglement_bits: setup.entanglement_bits,
            };
            let exact = extraction_protocol_exact(&setup.table, &setup.game, &config)?;
            let sampled = match trials {
                Some(t) => Some(extraction_protocol_sampled(
                    &setup.table,
                    &setup.game,
                    &config,
                    t,
                    input.seed,
                )?),
                None => None,
            };
            let mut inputs = audit_inputs(&input, &setup);
            inputs["trials"] = json!(trials);
            let result = json!({ "exact": exact, "sampled": sampled });
            finish(
                RunReport::new("audit protocol", input.seed, inputs, result)?,
                out.out.as_ref(),
            )
        }
    }
}

fn sample(cmd: SampleCmd) -> Result<i32, CliError> {
    match cmd {
        SampleCmd::Correlated {
            p,
            q,
            trials,
            seed,
            out,
        } => {
            let pv: Vec<f64> = read_json(&p)?;
            let qv: Vec<f64> = read_json(&q)?;
            let stats = correlated_sample_trials(&pv, &qv, trials, seed)?;
            let sigma = stats.agreement_std_error();
            let bound = 1.0 - 2.0 * stats.tv;
            let inputs = json!({ "p": path_str(&p), "q": path_str(&q), "trials": trials });
            let result = json!({
                "agreement_bound": bound,
                "agreement_std_error": sigma,
                "within_bound": stats.agreement_rate >= bound - 4.0 * sigma,
                "stats": stats,
            });
            finish(
                RunReport::new("sample correlated", seed, inputs, result)?,
                out.out.as_ref(),
            )
        }
    }
}

//! Threshold sweeps over the number of rounds.

use nlg_core::repetition::{
    hoeffding_completeness_bound, iid_threshold_win_prob, monte_carlo_threshold, MonteCarloResult,
};
use nlg_core::strategies::win_probability;
use nlg_core::{Behavior, Game, ThresholdGameSpec};
use serde::Serialize;

use crate::CliError;

pub const CSV_HEADER: &str =
    "n,threshold,trials,passes,ci_low,ci_high,pass_rate,p_round,exact_tail,hoeffding_bound";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub monte_carlo: MonteCarloResult,
    pub p_round: f64,
    pub exact_tail: f64,
    /// `1 - exp(-(nu - eta)^2 n / 3)` with `nu - eta = p_round - threshold`;
    /// `None` when the threshold is above `p_round`.
    pub hoeffding_bound: Option<f64>,
}

impl SweepRow {
    pub fn csv_row(&self) -> String {
        let h = self
            .hoeffding_bound
            .map(|h| h.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            self.monte_carlo.csv_row(),
            self.monte_carlo.pass_rate,
            self.p_round,
            self.exact_tail,
            h
        )
    }
}

pub fn n_range(n_min: usize, n_max: usize, n_step: usize) -> Result<Vec<usize>, CliError> {
    if n_min == 0 || n_step == 0 || n_min > n_max {
        return Err(CliError::Validation(format!(
            "empty n range: n_min = {n_min}, n_max = {n_max}, n_step = {n_step}"
        )));
    }
    Ok((n_min..=n_max).step_by(n_step).collect())
}

/// One row per `n`; every row's Monte Carlo run uses `seed`.
pub fn sweep_threshold(
    behavior: &Behavior,
    game: &Game,
    ns: &[usize],
    threshold: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, CliError> {
    if ns.is_empty() {
        return Err(CliError::Validation("empty n range".into()));
    }
    let p = win_probability(behavior, game)?;
    ns.iter()
        .map(|&n| {
            let spec = ThresholdGameSpec::new(game.clone(), n, threshold)?;
            let monte_carlo = monte_carlo_threshold(behavior, &spec, trials, seed)?;
            let exact_tail = iid_threshold_win_prob(p, n, threshold)?;
            let hoeffding_bound = if p >= threshold {
                Some(hoeffding_completeness_bound(p - threshold, 0.0, n)?)
            } else {
                None
            };
            Ok(SweepRow {
                monte_carlo,
                p_round: p,
                exact_tail,
                hoeffding_bound,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

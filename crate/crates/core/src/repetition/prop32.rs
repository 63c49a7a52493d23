//! Search for a conditioning set `S` that raises the average round-win
//! probability outside `S`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::games::Game;
use crate::min_wins;

use super::joint::RoundLayout;
use super::table::{JointTable, NULL_EVENT};

/// Per-row win masks (bit `i` set when round `i` is won) with row weights.
pub struct WinMasks {
    n: usize,
    masks: Vec<(u64, f64)>,
}

impl WinMasks {
    pub fn new(table: &JointTable, game: &Game) -> Result<Self> {
        let layout = RoundLayout::of(table)?;
        let n = layout.n();
        if n > 64 {
            return Err(invalid("at most 64 rounds"));
        }
        let masks = table
            .iter()
            .map(|(r, p)| {
                let m = (0..n).fold(0u64, |m, i| {
                    if layout.round_won(game, r, i) {
                        m | (1 << i)
                    } else {
                        m
                    }
                });
                (m, p)
            })
            .collect();
        Ok(WinMasks { n, masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn subset_wins(mask: u64, rounds: &[usize]) -> usize {
        rounds.iter().filter(|&&i| mask >> i & 1 == 1).count()
    }

    /// `P(W_S^{>= 1 - tau})` for the multiset `rounds`.
    pub fn subset_event_prob(&self, rounds: &[usize], tau: f64) -> f64 {
        let need = min_wins(1.0 - tau, rounds.len());
        self.masks
            .iter()
            .filter(|(m, _)| Self::subset_wins(*m, rounds) >= need)
            .map(|(_, p)| p)
            .sum()
    }

    /// `P(W^{>= threshold})` over all rounds.
    pub fn global_event_prob(&self, threshold: f64) -> f64 {
        let need = min_wins(threshold, self.n);
        self.masks
            .iter()
            .filter(|(m, _)| m.count_ones() as usize >= need)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn round_win_average(&self) -> f64 {
        let total: f64 = self
            .masks
            .iter()
            .map(|(m, p)| m.count_ones() as f64 * p)
            .sum();
        total / self.n as f64
    }

    /// `(Ex_{j not in S} P(W_j | W_S), P(W_S))` with `j` uniform over the rounds
    /// missing from `set(S)`.
    pub fn conditional_round_win_average(&self, rounds: &[usize], tau: f64) -> Result<(f64, f64)> {
        if let Some(&i) = rounds.iter().find(|&&i| i >= self.n) {
            return Err(invalid(format!("round {i} out of range")));
        }
        let in_s = rounds.iter().fold(0u64, |m, &i| m | (1 << i));
        let outside: Vec<usize> = (0..self.n).filter(|&i| in_s >> i & 1 == 0).collect();
        if outside.is_empty() {
            return Err(invalid("S covers every round"));
        }
        let need = min_wins(1.0 - tau, rounds.len());
        let mut p_ws = 0.0;
        let mut joint = 0.0;
        for &(m, p) in &self.masks {
            if Self::subset_wins(m, rounds) >= need {
                p_ws += p;
                joint += p * outside.iter().filter(|&&j| m >> j & 1 == 1).count() as f64;
            }
        }
        if p_ws < NULL_EVENT {
            return Err(Error::NullEvent(p_ws));
        }
        Ok((joint / (p_ws * outside.len() as f64), p_ws))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop32Search {
    /// Best multiset, sorted.
    pub s_best: Vec<usize>,
    /// Distinct rounds of `s_best`.
    pub s_distinct: Vec<usize>,
    pub conditional_win_average: f64,
    pub p_ws: f64,
    pub p_global: f64,
    pub unconditioned_win_average: f64,
    pub candidates: usize,
    pub distinct_candidates: usize,
}

/// Draws `samples` multisets of `t` indices (uniform, with replacement) and
/// keeps the one maximizing `Ex_{j not in S} P(W_j | W_S^{>= 1 - tau})`; ties go
/// to the earliest sample. `t = 0` evaluates the empty set only.
pub fn prop32_search(
    table: &JointTable,
    game: &Game,
    gamma: f64,
    tau: f64,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<Prop32Search> {
    let wm = WinMasks::new(table, game)?;
    let n = wm.n();
    if t >= n {
        return Err(invalid(format!("t = {t} must be below n = {n}")));
    }
    if !(0.0..=1.0).contains(&gamma) || !(0.0..=1.0).contains(&tau) {
        return Err(invalid("gamma and tau must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = if t == 0 { 1 } else { samples.max(1) };
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut candidates = 0;
    for _ in 0..draws {
        let mut s: Vec<usize> = (0..t).map(|_| rng.random_range(0..n)).collect();
        s.sort_unstable();
        candidates += 1;
        if !seen.contains(&s) {
            seen.push(s.clone());
        }
        let Ok((v, p)) = wm.conditional_round_win_average(&s, tau) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, p, s));
        }
    }
    let (value, p_ws, s_best) = best.ok_or(Error::NullEvent(0.0))?;
    let mut s_distinct = s_best.clone();
    s_distinct.dedup();
    Ok(Prop32Search {
        s_best,
        s_distinct,
        conditional_win_average: value,
        p_ws,
        p_global: wm.global_event_prob(1.0 - gamma),
        unconditioned_win_average: wm.round_win_average(),
        candidates,
        distinct_candidates: seen.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repetition::joint::{enumerate_joint, RoundBehavior, DEFAULT_TABLE_BUDGET};
    use crate::strategies::{
        behavior_of, behavior_of_strategy, canonical_chsh_strategy, correlated_epr_strategy,
    };

    #[test]
    fn iid_table_gives_p_for_every_s() {
        let g = Game::chsh();
        let b = behavior_of(&canonical_chsh_strategy(), &g).unwrap();
        let t = enumerate_joint(&RoundBehavior::Iid(b), &g, 4, DEFAULT_TABLE_BUDGET).unwrap();
        let p = (std::f64::consts::PI / 8.0).cos().powi(2);
        let wm = WinMasks::new(&t, &g).unwrap();
        for s in [vec![0], vec![1, 3], vec![2, 2, 0]] {
            let (v, _) = wm.conditional_round_win_average(&s, 0.3).unwrap();
            assert!((v - p).abs() < 1e-12);
        }
        let r = prop32_search(&t, &g, 0.2, 0.1, 0, 10, 0).unwrap();
        assert!(r.s_best.is_empty());
        assert!((r.conditional_win_average - r.unconditioned_win_average).abs() < 1e-12);
    }

    #[test]
    fn correlated_table_beats_unconditioned_and_matches_exhaustive() {
        let g = Game::chsh();
        let n = 4;
        let b = behavior_of_strategy(&correlated_epr_strategy(n).unwrap()).unwrap();
        let t = enumerate_joint(&RoundBehavior::Joint(b), &g, n, DEFAULT_TABLE_BUDGET).unwrap();
        let tau = 0.2;
        let size = 2;
        let r = prop32_search(&t, &g, 0.3, tau, size, 200, 5).unwrap();
        let wm = WinMasks::new(&t, &g).unwrap();
        let mut exhaustive = f64::NEG_INFINITY;
        for a in 0..n {
            for b in a..n {
                if let Ok((v, _)) = wm.conditional_round_win_average(&[a, b], tau) {
                    exhaustive = exhaustive.max(v);
                }
            }
        }
        assert!((r.conditional_win_average - exhaustive).abs() < 1e-12);
        assert!(r.conditional_win_average >= r.unconditioned_win_average);
        let (v, p) = wm.conditional_round_win_average(&r.s_best, tau).unwrap();
        assert_eq!((v, p), (r.conditional_win_average, r.p_ws));
    }

    #[test]
    fn bad_inputs() {
        let g = Game::chsh();
        let b = behavior_of(&canonical_chsh_strategy(), &g).unwrap();
        let t = enumerate_joint(&RoundBehavior::Iid(b), &g, 2, DEFAULT_TABLE_BUDGET).unwrap();
        assert!(prop32_search(&t, &g, 0.2, 0.1, 2, 10, 0).is_err());
        let wm = WinMasks::new(&t, &g).unwrap();
        assert!(wm.conditional_round_win_average(&[0, 1], 0.1).is_err());
    }
}

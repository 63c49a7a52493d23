//! Monte Carlo estimate of the probability of winning a threshold game when a
//! behavior is played independently in every round.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_err, invalid, Result};
use crate::games::ThresholdGameSpec;
use crate::strategies::Behavior;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub n: usize,
    pub threshold: f64,
    pub trials: usize,
    pub passes: usize,
    pub pass_rate: f64,
    /// Wilson score 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MonteCarloResult {
    pub fn ci_half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn std_error(&self) -> f64 {
        (self.pass_rate * (1.0 - self.pass_rate) / self.trials as f64).sqrt()
    }

    pub const CSV_HEADER: &'static str = "n,threshold,trials,passes,ci_low,ci_high";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.threshold, self.trials, self.passes, self.ci_low, self.ci_high
        )
    }
}

/// Wilson score interval at z = 1.96.
pub fn wilson_interval(passes: usize, trials: usize) -> (f64, f64) {
    let z = 1.959963984540054;
    let n = trials as f64;
    let p = passes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Trial `k` uses ChaCha8 seeded with `seed` on stream `k`, so the result does
/// not depend on thread scheduling.
pub fn monte_carlo_threshold(
    behavior: &Behavior,
    spec: &ThresholdGameSpec,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let game = &spec.base;
    if behavior.dims() != game.dims() {
        return Err(dim_err("behavior does not match the game"));
    }
    let (nx, ny, na, nb) = game.dims();
    let questions = WeightedIndex::new((0..nx * ny).map(|k| game.mu(k / ny, k % ny)))
        .map_err(|e| invalid(format!("question distribution: {e}")))?;
    let answers: Vec<Option<WeightedIndex<f64>>> = (0..nx * ny)
        .map(|k| {
            let (x, y) = (k / ny, k % ny);
            WeightedIndex::new(
                (0..na * nb).map(|ab| behavior.prob(x, y, ab / nb, ab % nb).max(0.0)),
            )
            .ok()
        })
        .collect();
    let need = spec.required_wins();
    let n = spec.n;

    let passes: usize = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut wins = 0;
            for _ in 0..n {
                let q = questions.sample(&mut rng);
                let (x, y) = (q / ny, q % ny);
                let ab = answers[q]
                    .as_ref()
                    .expect("question with positive mass has answers")
                    .sample(&mut rng);
                if game.wins(x, y, ab / nb, ab % nb) {
                    wins += 1;
                }
            }
            usize::from(wins >= need)
        })
        .sum();

    let (ci_low, ci_high) = wilson_interval(passes, trials);
    Ok(MonteCarloResult {
        n,
        threshold: spec.threshold,
        trials,
        passes,
        pass_rate: passes as f64 / trials as f64,
        ci_low,
        ci_high,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::Game;
    use crate::repetition::binomial::iid_threshold_win_prob;
    use crate::strategies::{behavior_of, canonical_chsh_strategy};

    #[test]
    fn always_win_passes_everything() {
        let g = Game::chsh();
        let always = Game::from_fn(2, 2, 2, 2, |_, _| 0.25, |_, _, _, _| true).unwrap();
        let beh = behavior_of(&canonical_chsh_strategy(), &g).unwrap();
        let spec = ThresholdGameSpec::new(always, 30, 1.0).unwrap();
        let r = monte_carlo_threshold(&beh, &spec, 200, 1).unwrap();
        assert_eq!(r.pass_rate, 1.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = Game::chsh();
        let beh = behavior_of(&canonical_chsh_strategy(), &g).unwrap();
        let spec = ThresholdGameSpec::new(g, 40, 0.8).unwrap();
        let r1 = monte_carlo_threshold(&beh, &spec, 500, 42).unwrap();
        let r2 = monte_carlo_threshold(&beh, &spec, 500, 42).unwrap();
        assert_eq!(r1, r2);
        assert!(monte_carlo_threshold(&beh, &spec, 0, 42).is_err());
    }

    #[test]
    fn converges_to_binomial_tail() {
        let g = Game::chsh();
        let beh = behavior_of(&canonical_chsh_strategy(), &g).unwrap();
        let p = (std::f64::consts::PI / 8.0).cos().powi(2);
        for &(n, thr) in &[(20usize, 0.85), (60, 0.8), (100, 0.87)] {
            let spec = ThresholdGameSpec::new(g.clone(), n, thr).unwrap();
            let r = monte_carlo_threshold(&beh, &spec, 10_000, 3).unwrap();
            let exact = iid_threshold_win_prob(p, n, thr).unwrap();
            let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt();
            assert!(
                (r.pass_rate - exact).abs() <= 4.0 * sigma + 1e-12,
                "n={n}: {} vs {exact}",
                r.pass_rate
            );
        }
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100);
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo < 1.0 && hi == 1.0);
    }
}

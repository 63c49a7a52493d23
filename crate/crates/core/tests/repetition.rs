use nlg_core::games::{Game, ThresholdGameSpec};
use nlg_core::repetition::audit::{lemma_audit, AuditConfig};
use nlg_core::repetition::{
    augment_dependency_breaking, condition_on_event, correlated_sample_trials,
    dependency_breaking_deviation, enumerate_joint, iid_threshold_win_prob, monte_carlo_threshold,
    JointTable, RoundBehavior, WinEventSpec, DEFAULT_TABLE_BUDGET,
};
use nlg_core::strategies::{
    behavior_of, behavior_of_strategy, canonical_chsh_strategy, correlated_epr_strategy,
    random_strategy, Behavior,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chsh_behavior() -> Behavior {
    behavior_of(&canonical_chsh_strategy(), &Game::chsh()).unwrap()
}

#[test]
fn iid_lift_is_the_tensor_power() {
    let g = Game::chsh();
    let b = chsh_behavior();
    let single = |x: usize, y: usize, a: usize, bb: usize| g.mu(x, y) * b.prob(x, y, a, bb);
    for n in 1..=3 {
        let t =
            enumerate_joint(&RoundBehavior::Iid(b.clone()), &g, n, DEFAULT_TABLE_BUDGET).unwrap();
        let mut worst: f64 = 0.0;
        for code in 0..16usize.pow(n as u32) {
            let mut row = Vec::with_capacity(4 * n);
            let mut p = 1.0;
            for i in 0..n {
                let c = (code >> (4 * (n - 1 - i))) & 15;
                let (x, y, a, bb) = (c >> 3, (c >> 2) & 1, (c >> 1) & 1, c & 1);
                row.extend([x as u16, y as u16, a as u16, bb as u16]);
                p *= single(x, y, a, bb);
            }
            worst = worst.max((t.get(&row) - p).abs());
        }
        assert!(worst < 1e-12, "n = {n}: {worst}");
    }
}

#[test]
fn event_probabilities_match_binomial_sums() {
    let g = Game::chsh();
    let p = (std::f64::consts::PI / 8.0).cos().powi(2);
    let binom = |n: usize, k: usize| -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    for n in 1..=3 {
        let t = enumerate_joint(
            &RoundBehavior::Iid(chsh_behavior()),
            &g,
            n,
            DEFAULT_TABLE_BUDGET,
        )
        .unwrap();
        for need in 0..=n {
            let th = need as f64 / n as f64;
            let (_, prob) = condition_on_event(&t, &WinEventSpec::Global { threshold: th }, &g)
                .unwrap_or_else(|_| (t.clone(), 0.0));
            let expect: f64 = (need..=n)
                .map(|k| binom(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
                .sum();
            assert!((prob - expect).abs() < 1e-12);
            assert!((iid_threshold_win_prob(p, n, th).unwrap() - expect).abs() < 1e-12);
        }
    }
}

#[test]
fn conditioning_is_proportional_on_the_event() {
    let g = Game::chsh();
    let b = behavior_of_strategy(&correlated_epr_strategy(2).unwrap()).unwrap();
    let t = enumerate_joint(&RoundBehavior::Joint(b), &g, 2, DEFAULT_TABLE_BUDGET).unwrap();
    let ev = WinEventSpec::Round { j: 1 };
    let (c, p) = condition_on_event(&t, &ev, &g).unwrap();
    for (row, w) in c.iter() {
        assert!((w * p - t.get(row)).abs() < 1e-15);
    }
}

fn random_tables(count: usize, seed: u64) -> Vec<(JointTable, Vec<usize>)> {
    let g = Game::chsh();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = 1 + k % 3;
            let s: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
            let table = if k % 2 == 0 {
                let st = random_strategy(&mut rng, (2, 2), (2, 2, 2, 2), 2);
                enumerate_joint(
                    &RoundBehavior::Iid(behavior_of_strategy(&st).unwrap()),
                    &g,
                    n,
                    DEFAULT_TABLE_BUDGET,
                )
            } else {
                let m = 1usize << n;
                let st = random_strategy(&mut rng, (2, 2), (m, m, m, m), 2);
                enumerate_joint(
                    &RoundBehavior::Joint(behavior_of_strategy(&st).unwrap()),
                    &g,
                    n,
                    DEFAULT_TABLE_BUDGET,
                )
            };
            (table.unwrap(), s)
        })
        .collect()
}

#[test]
fn dependency_breaking_variables_decouple_questions() {
    let g = Game::chsh();
    for (t, s) in random_tables(20, 27) {
        let aug = augment_dependency_breaking(&t, &g, &s).unwrap();
        assert!(dependency_breaking_deviation(&aug, &s).unwrap() <= 1e-12);
    }
}

#[test]
fn monte_carlo_converges_to_binomial() {
    let g = Game::chsh();
    let b = chsh_behavior();
    let p = (std::f64::consts::PI / 8.0).cos().powi(2);
    for (n, th) in [(10, 0.8), (50, 0.84), (100, 0.85)] {
        let spec = ThresholdGameSpec::new(g.clone(), n, th).unwrap();
        let mc = monte_carlo_threshold(&b, &spec, 10_000, 3).unwrap();
        let exact = iid_threshold_win_prob(p, n, th).unwrap();
        let sigma = (exact * (1.0 - exact) / 10_000.0).sqrt().max(1e-4);
        assert!(
            (mc.pass_rate - exact).abs() <= 4.0 * sigma,
            "n = {n}: {} vs {exact}",
            mc.pass_rate
        );
    }
}

#[test]
fn audit_lhs_invariant_under_answer_relabeling() {
    let g = Game::chsh();
    let n = 3;
    let b = behavior_of_strategy(&correlated_epr_strategy(n).unwrap()).unwrap();
    let t = enumerate_joint(&RoundBehavior::Joint(b), &g, n, DEFAULT_TABLE_BUDGET).unwrap();
    let cfg = AuditConfig {
        s: vec![2],
        tau: 0.17,
        beta: 0.5,
        t: vec![0],
        entanglement_bits: 1.0,
    };
    let base = lemma_audit(&t, &g, &cfg).unwrap();
    // flip Alice's answers in every round, and Bob's in round 1 only through the game
    let g2 = g.relabel(&[0, 1], &[0, 1], &[1, 0], &[1, 0]).unwrap();
    let mut t2 = t.clone();
    for i in 0..n {
        t2 = t2.relabel(&format!("A{i}"), &[1, 0]).unwrap();
        t2 = t2.relabel(&format!("B{i}"), &[1, 0]).unwrap();
    }
    let flipped = lemma_audit(&t2, &g2, &cfg).unwrap();
    assert!((base.p_ws - flipped.p_ws).abs() < 1e-12);
    for (a, b) in base.checks.iter().zip(&flipped.checks) {
        assert_eq!(a.lemma, b.lemma);
        assert!((a.lhs - b.lhs).abs() < 1e-12, "{a:?} vs {b:?}");
    }
}

fn chi_square_ok(counts: &[usize], probs: &[f64], trials: usize) -> bool {
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p > 0.0 {
            let e = p * trials as f64;
            stat += (c as f64 - e).powi(2) / e;
            cells += 1;
        } else if c > 0 {
            return false;
        }
    }
    let crit = ChiSquared::new((cells - 1) as f64)
        .unwrap()
        .inverse_cdf(0.999);
    stat <= crit
}

#[test]
fn correlated_sampling_marginals_and_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..3 {
        let len = 3 + k;
        let p: Vec<f64> = nlg_core::quantum::random::random_distribution(&mut rng, len);
        let mut q = p.clone();
        // move 0.1 of mass from the largest cell to the smallest
        let (hi, _) = q
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let (lo, _) = q
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let d = 0.1f64.min(q[hi] * 0.9);
        q[hi] -= d;
        q[lo] += d;
        let st = correlated_sample_trials(&p, &q, 100_000, 40 + k as u64).unwrap();
        assert!(chi_square_ok(&st.p_counts, &p, st.trials));
        assert!(chi_square_ok(&st.q_counts, &q, st.trials));
        assert!(st.agreement_rate >= 1.0 - 2.0 * st.tv - 4.0 * st.agreement_std_error());
    }
}

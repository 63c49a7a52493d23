//! Classical correlated sampling with shared randomness and no communication.
//!
//! Both parties read the same stream of pairs `(u_k, t_k)`, `u_k` uniform on
//! the universe and `t_k` uniform on `[0, 1)`. Each outputs the first `u_k`
//! with `t_k` below its own probability of `u_k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{dim_err, invalid, Error, Result};

/// Shared random source: a ChaCha8 stream, optionally bounded in length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedStream {
    pub seed: u64,
    pub stream: u64,
    /// Maximum number of pairs a party may read.
    pub max_draws: Option<usize>,
}

impl SharedStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        SharedStream {
            seed,
            stream,
            max_draws: None,
        }
    }

    pub fn bounded(seed: u64, stream: u64, max_draws: usize) -> Self {
        SharedStream {
            seed,
            stream,
            max_draws: Some(max_draws),
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(dim_err(format!("{what} is empty")));
    }
    if let Some(&v) = p.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::NegativeProbability {
            value: v,
            location: what.to_string(),
        });
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("{what} sums to {s}")));
    }
    Ok(())
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn validate_pair(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(dim_err("P and Q live on universes of different sizes"));
    }
    check_distribution(p, "P")?;
    check_distribution(q, "Q")?;
    let tv = total_variation(p, q);
    if tv >= 1.0 - 1e-12 {
        return Err(Error::DisjointDistributions(tv));
    }
    Ok(tv)
}

fn scan(dist: &[f64], stream: &SharedStream) -> Result<usize> {
    let mut rng = stream.rng();
    let n = dist.len();
    let mut k = 0usize;
    loop {
        if stream.max_draws.is_some_and(|cap| k >= cap) {
            return Err(Error::StreamExhausted(k));
        }
        let u = rng.random_range(0..n);
        let t: f64 = rng.random();
        if t < dist[u] {
            return Ok(u);
        }
        k += 1;
    }
}

/// One run of the protocol: `(Alice's sample ~ P, Bob's sample ~ Q)`.
pub fn correlated_sample(p: &[f64], q: &[f64], stream: &SharedStream) -> Result<(usize, usize)> {
    validate_pair(p, q)?;
    Ok((scan(p, stream)?, scan(q, stream)?))
}

/// Exact output law, row-major `J[a * N + b]`. With `e = ||P - Q||`:
/// `J(a, b) = ([a = b] min(P, Q)(a) + (P - Q)^+(a) Q(b) + (Q - P)^+(b) P(a)) / (1 + e)`.
pub fn correlated_sampling_joint(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    let tv = validate_pair(p, q)?;
    let n = p.len();
    let z = 1.0 + tv;
    let mut j = vec![0.0; n * n];
    for a in 0..n {
        j[a * n + a] += p[a].min(q[a]) / z;
        let pa_excess = (p[a] - q[a]).max(0.0);
        for b in 0..n {
            let qb_excess = (q[b] - p[b]).max(0.0);
            j[a * n + b] += (pa_excess * q[b] + qb_excess * p[a]) / z;
        }
    }
    Ok(j)
}

/// Exact probability that both parties output the same element.
pub fn agreement_probability(p: &[f64], q: &[f64]) -> Result<f64> {
    let n = p.len();
    let j = correlated_sampling_joint(p, q)?;
    Ok((0..n).map(|a| j[a * n + a]).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedSampleStats {
    pub trials: usize,
    pub seed: u64,
    pub tv: f64,
    pub p_counts: Vec<usize>,
    pub q_counts: Vec<usize>,
    pub agreements: usize,
    pub agreement_rate: f64,
    pub exact_agreement: f64,
}

impl CorrelatedSampleStats {
    /// Binomial standard error of the agreement rate.
    pub fn agreement_std_error(&self) -> f64 {
        let r = self.agreement_rate;
        (r * (1.0 - r) / self.trials as f64).sqrt()
    }
}

/// Runs `trials` independent protocol instances; trial `k` uses stream `k`.
pub fn correlated_sample_trials(
    p: &[f64],
    q: &[f64],
    trials: usize,
    seed: u64,
) -> Result<CorrelatedSampleStats> {
    let tv = validate_pair(p, q)?;
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let n = p.len();
    let outcomes: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|k| correlated_sample(p, q, &SharedStream::new(seed, k as u64)))
        .collect::<Result<_>>()?;
    let mut p_counts = vec![0; n];
    let mut q_counts = vec![0; n];
    let mut agreements = 0;
    for &(a, b) in &outcomes {
        p_counts[a] += 1;
        q_counts[b] += 1;
        agreements += usize::from(a == b);
    }
    Ok(CorrelatedSampleStats {
        trials,
        seed,
        tv,
        p_counts,
        q_counts,
        agreements,
        agreement_rate: agreements as f64 / trials as f64,
        exact_agreement: agreement_probability(p, q)?,
    })
}

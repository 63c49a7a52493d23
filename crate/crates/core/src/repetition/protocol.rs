//! The classical protocol for a single round of `G` extracted from an n-round
//! strategy conditioned on winning the rounds in `S`.
//!
//! 1. Shared randomness picks `T` (uniform among subsets of the free rounds
//!    with `|T| <= floor(beta m)`) and `j` uniform among the free rounds outside `T`.
//! 2. Alice plants her question at `x_j`, Bob his at `y_j`.
//! 3. They correlatedly sample `R_{Tj}`: Alice from `P_{R | x_j, W}`, Bob from `P_{R | y_j, W}`.
//! 4. Alice answers from `P_{A_j | r^A, x_j, W}`.
//! 5. Bob answers from `P_{B_j | r^B, y_j, W}`.

use std::collections::BTreeMap;

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certifier::{error_params_with_beta, ErrorParams};
use crate::error::{invalid, Result};
use crate::games::{classical_value, Game};
use crate::strategies::Behavior;

use super::audit::{r_columns, sorted_set, t_family};
use super::corrsamp::{
    correlated_sample, correlated_sampling_joint, total_variation, SharedStream,
};
use super::events::{condition_on_event, WinEventSpec};
use super::joint::{augment_dependency_breaking, RoundLayout};
use super::table::JointTable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolConfig {
    pub s: Vec<usize>,
    pub tau: f64,
    pub beta: f64,
    pub entanglement_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPair {
    pub t: Vec<usize>,
    pub j: usize,
    pub x: usize,
    pub y: usize,
    /// Probability of this `(T, j, x, y)` in the protocol.
    pub mass: f64,
    pub reason: String,
}

/// Conditionals of one `(T, j)` branch, indexed densely by the values of `R_{Tj}`
/// seen under `W`.
struct Branch {
    t: Vec<usize>,
    j: usize,
    weight: f64,
    universe: usize,
    /// `P(R = r | X_j = x, W)` as `[x][r]`; `None` if `P(X_j = x | W) = 0`.
    r_given_x: Vec<Option<Vec<f64>>>,
    r_given_y: Vec<Option<Vec<f64>>>,
    /// `P(A_j = a | r, x_j, W)` at `[(r * nx + x) * na + a]`.
    alice: Vec<f64>,
    /// `P(B_j = b | r, y_j, W)` at `[(r * ny + y) * nb + b]`.
    bob: Vec<f64>,
    /// `P(R = r, X_j, Y_j, A_j, B_j | W)` at `[(((r * nx + x) * ny + y) * na + a) * nb + b]`.
    target: Vec<f64>,
}

fn normalize_rows(v: &mut [f64], row: usize) {
    for chunk in v.chunks_mut(row) {
        let s: f64 = chunk.iter().sum();
        if s > 0.0 {
            chunk.iter_mut().for_each(|p| *p /= s);
        }
    }
}

fn build_branch(
    cond: &JointTable,
    layout: &RoundLayout,
    game: &Game,
    s: &[usize],
    t: &[usize],
    j: usize,
    weight: f64,
) -> Branch {
    let (nx, ny, na, nb) = game.dims();
    let rc = r_columns(layout, s, t, j);
    let mut index: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    let mut keyed: Vec<(usize, usize, usize, usize, usize, f64)> = Vec::with_capacity(cond.len());
    for (row, p) in cond.iter() {
        let key: Vec<u16> = rc.iter().map(|&c| row[c]).collect();
        let next = index.len();
        let r = *index.entry(key).or_insert(next);
        keyed.push((
            r,
            row[layout.x[j]] as usize,
            row[layout.y[j]] as usize,
            row[layout.a[j]] as usize,
            row[layout.b[j]] as usize,
            p,
        ));
    }
    let u = index.len();
    let mut target = vec![0.0; u * nx * ny * na * nb];
    let mut rx = vec![0.0; nx * u];
    let mut ry = vec![0.0; ny * u];
    let mut alice = vec![0.0; u * nx * na];
    let mut bob = vec![0.0; u * ny * nb];
    for &(r, x, y, a, b, p) in &keyed {
        target[(((r * nx + x) * ny + y) * na + a) * nb + b] += p;
        rx[x * u + r] += p;
        ry[y * u + r] += p;
        alice[(r * nx + x) * na + a] += p;
        bob[(r * ny + y) * nb + b] += p;
    }
    normalize_rows(&mut alice, na);
    normalize_rows(&mut bob, nb);
    let split = |v: Vec<f64>, k: usize| -> Vec<Option<Vec<f64>>> {
        v.chunks(u)
            .take(k)
            .map(|c| {
                let s: f64 = c.iter().sum();
                (s > 0.0).then(|| c.iter().map(|p| p / s).collect())
            })
            .collect()
    };
    Branch {
        t: t.to_vec(),
        j,
        weight,
        universe: u,
        r_given_x: split(rx, nx),
        r_given_y: split(ry, ny),
        alice,
        bob,
        target,
    }
}

struct Prepared {
    n: usize,
    m: usize,
    s: Vec<usize>,
    p_ws: f64,
    params: ErrorParams,
    t_family_size: usize,
    branches: Vec<Branch>,
}

fn prepare(table: &JointTable, game: &Game, config: &ProtocolConfig) -> Result<Prepared> {
    let base = RoundLayout::of(table)?;
    let n = base.n();
    let s = sorted_set(&config.s);
    if let Some(&i) = s.iter().find(|&&i| i >= n) {
        return Err(invalid(format!("round {i} out of range for n = {n}")));
    }
    if s.len() >= n {
        return Err(invalid("S must leave at least one round free"));
    }
    let m = n - s.len();
    let augmented = if base.omega.is_some() {
        table.clone()
    } else {
        augment_dependency_breaking(table, game, &s)?
    };
    let layout = RoundLayout::of(&augmented)?;
    let (cond, p_ws) = condition_on_event(
        &augmented,
        &WinEventSpec::subset_from_tau(&s, config.tau),
        game,
    )?;
    let params = error_params_with_beta(
        config.beta,
        game.answer_pairs(),
        n,
        s.len(),
        p_ws,
        config.entanglement_bits,
    )?;
    let free: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
    let family = t_family(&free, (config.beta * m as f64 + 1e-12).floor() as usize);
    let mut branches = Vec::new();
    for t in &family {
        let js: Vec<usize> = free.iter().copied().filter(|j| !t.contains(j)).collect();
        let w = 1.0 / (family.len() * js.len()) as f64;
        for &j in &js {
            branches.push(build_branch(&cond, &layout, game, &s, t, j, w));
        }
    }
    Ok(Prepared {
        n,
        m,
        s,
        p_ws,
        params,
        t_family_size: family.len(),
        branches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub n: usize,
    pub m: usize,
    pub s: Vec<usize>,
    pub p_ws: f64,
    pub t_family_size: usize,
    pub error_params: ErrorParams,
    /// `P(x, y, a, b)` produced by the protocol, flat in `[x][y][a][b]` order.
    pub output: Vec<f64>,
    /// `Ex_{T,j} P_{X_j Y_j A_j B_j | W}` in the same layout.
    pub target_output: Vec<f64>,
    /// The protocol as a behavior for `G`; absent when some pair was skipped.
    pub behavior: Option<Behavior>,
    pub win_probability: f64,
    /// `Ex_{T,j} P(W_j | W)`.
    pub target_win_probability: f64,
    pub classical_value: f64,
    /// Distance on `(T, j, r^A, r^B, x, y, a, b)` from the target placed on `r^A = r^B`.
    pub tv_full: f64,
    pub tv_xyab: f64,
    /// Probability that both parties sample the same `R_{Tj}`.
    pub agreement: f64,
    pub accrued_error: f64,
    pub tv_within_accrued: bool,
    pub win_within_classical: bool,
    pub skipped: Vec<SkippedPair>,
    pub skipped_mass: f64,
}

/// Exact output law of the protocol, averaged over `T`, `j` and the shared
/// randomness of correlated sampling.
pub fn extraction_protocol_exact(
    table: &JointTable,
    game: &Game,
    config: &ProtocolConfig,
) -> Result<ProtocolReport> {
    let prep = prepare(table, game, config)?;
    let (nx, ny, na, nb) = game.dims();
    let ab = na * nb;
    let mut behavior = vec![0.0; nx * ny * ab];
    let mut target_output = vec![0.0; nx * ny * ab];
    let mut skipped = Vec::new();
    let mut tv_full = 0.0;
    let mut agreement = 0.0;
    for br in &prep.branches {
        let u = br.universe;
        for x in 0..nx {
            for y in 0..ny {
                let mu = game.mu(x, y);
                let xy_target = |r: usize, a: usize, b: usize| {
                    br.target[(((r * nx + x) * ny + y) * na + a) * nb + b]
                };
                let target_mass: f64 = (0..u)
                    .flat_map(|r| (0..ab).map(move |k| (r, k)))
                    .map(|(r, k)| xy_target(r, k / nb, k % nb))
                    .sum();
                for r in 0..u {
                    for a in 0..na {
                        for b in 0..nb {
                            target_output[((x * ny + y) * na + a) * nb + b] +=
                                br.weight * xy_target(r, a, b);
                        }
                    }
                }
                let (pa, pb) = match (&br.r_given_x[x], &br.r_given_y[y]) {
                    (Some(pa), Some(pb)) if total_variation(pa, pb) < 1.0 - 1e-12 => (pa, pb),
                    (pa, pb) => {
                        let reason = if pa.is_none() || pb.is_none() {
                            "question has zero probability under the conditioning event"
                        } else {
                            "conditionals of R are disjoint"
                        };
                        skipped.push(SkippedPair {
                            t: br.t.clone(),
                            j: br.j,
                            x,
                            y,
                            mass: br.weight * mu,
                            reason: reason.into(),
                        });
                        tv_full += br.weight * target_mass;
                        continue;
                    }
                };
                let joint = correlated_sampling_joint(pa, pb)?;
                let mut diag_out = vec![0.0; u * ab];
                let mut off_mass = 0.0;
                for ra in 0..u {
                    for rb in 0..u {
                        let jp = joint[ra * u + rb];
                        if jp == 0.0 {
                            continue;
                        }
                        if ra == rb {
                            agreement += br.weight * mu * jp;
                        } else {
                            off_mass += jp;
                        }
                        for a in 0..na {
                            let pa_ans = br.alice[(ra * nx + x) * na + a];
                            if pa_ans == 0.0 {
                                continue;
                            }
                            for b in 0..nb {
                                let p = jp * pa_ans * br.bob[(rb * ny + y) * nb + b];
                                behavior[((x * ny + y) * na + a) * nb + b] += br.weight * p;
                                if ra == rb {
                                    diag_out[ra * ab + a * nb + b] += p;
                                }
                            }
                        }
                    }
                }
                let mut d = off_mass * mu;
                for r in 0..u {
                    for a in 0..na {
                        for b in 0..nb {
                            d += (mu * diag_out[r * ab + a * nb + b] - xy_target(r, a, b)).abs();
                        }
                    }
                }
                tv_full += br.weight * d;
            }
        }
    }
    tv_full *= 0.5;
    let output: Vec<f64> = behavior
        .iter()
        .enumerate()
        .map(|(k, &p)| p * game.mu(k / (ny * ab), (k / ab) % ny))
        .collect();
    let tv_xyab = total_variation(&output, &target_output);
    let win = |v: &[f64]| -> f64 {
        v.iter()
            .enumerate()
            .filter(|(k, _)| game.wins(k / (ny * ab), (k / ab) % ny, (k % ab) / nb, k % nb))
            .map(|(_, p)| p)
            .sum()
    };
    let win_probability = win(&output);
    let target_win_probability = win(&target_output);
    let cval = classical_value(game)?;
    let accrued = prep.params.accrued;
    let skipped_mass = skipped.iter().map(|s| s.mass).sum();
    let behavior = if skipped.is_empty() {
        Some(Behavior::new(game.dims(), behavior)?)
    } else {
        None
    };
    Ok(ProtocolReport {
        n: prep.n,
        m: prep.m,
        s: prep.s,
        p_ws: prep.p_ws,
        t_family_size: prep.t_family_size,
        error_params: prep.params,
        output,
        target_output,
        behavior,
        win_probability,
        target_win_probability,
        classical_value: cval,
        tv_full,
        tv_xyab,
        agreement,
        accrued_error: accrued,
        tv_within_accrued: tv_full <= accrued + 1e-12,
        win_within_classical: win_probability <= cval + accrued + 1e-12,
        skipped,
        skipped_mass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolSimulation {
    pub trials: usize,
    pub seed: u64,
    pub wins: usize,
    pub agreements: usize,
    pub skipped: usize,
    pub win_rate: f64,
    pub agreement_rate: f64,
}

/// Runs the protocol `trials` times with sampled inputs. Trial `k` draws its
/// inputs, `(T, j)` and answers from stream `2k` and performs correlated
/// sampling on stream `2k + 1` of `seed`.
pub fn extraction_protocol_sampled(
    table: &JointTable,
    game: &Game,
    config: &ProtocolConfig,
    trials: usize,
    seed: u64,
) -> Result<ProtocolSimulation> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let prep = prepare(table, game, config)?;
    let (nx, ny, na, nb) = game.dims();
    let inputs = WeightedIndex::new((0..nx * ny).map(|k| game.mu(k / ny, k % ny)))
        .map_err(|e| invalid(e.to_string()))?;
    let branch_pick = WeightedIndex::new(prep.branches.iter().map(|b| b.weight))
        .map_err(|e| invalid(e.to_string()))?;
    let draw = |rng: &mut ChaCha8Rng, probs: &[f64]| -> usize {
        let t: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if t < acc {
                return i;
            }
        }
        probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    };
    let outcomes: Vec<(bool, bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<(bool, bool, bool)> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2 * k as u64);
            let xy = inputs.sample(&mut rng);
            let (x, y) = (xy / ny, xy % ny);
            let br = &prep.branches[branch_pick.sample(&mut rng)];
            let (pa, pb) = match (&br.r_given_x[x], &br.r_given_y[y]) {
                (Some(pa), Some(pb)) if total_variation(pa, pb) < 1.0 - 1e-12 => (pa, pb),
                _ => return Ok((false, false, true)),
            };
            let (ra, rb) = correlated_sample(pa, pb, &SharedStream::new(seed, 2 * k as u64 + 1))?;
            let a = draw(
                &mut rng,
                &br.alice[(ra * nx + x) * na..(ra * nx + x + 1) * na],
            );
            let b = draw(
                &mut rng,
                &br.bob[(rb * ny + y) * nb..(rb * ny + y + 1) * nb],
            );
            Ok((game.wins(x, y, a, b), ra == rb, false))
        })
        .collect::<Result<_>>()?;
    let wins = outcomes.iter().filter(|o| o.0).count();
    let agreements = outcomes.iter().filter(|o| o.1).count();
    let skipped = outcomes.iter().filter(|o| o.2).count();
    Ok(ProtocolSimulation {
        trials,
        seed,
        wins,
        agreements,
        skipped,
        win_rate: wins as f64 / trials as f64,
        agreement_rate: agreements as f64 / trials as f64,
    })
}

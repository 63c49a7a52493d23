//! Exact audits of the four approximation lemmas on small conditioned tables.
//!
//! Every left-hand side is computed twice: once from hash-grouped conditional
//! distributions, and once from dense mixed-radix arrays of the joint weights.
//! The two must agree to rounding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certifier::{error_params_with_beta, ErrorParams};
use crate::error::{invalid, Result};
use crate::games::Game;

use super::events::{condition_on_event, WinEventSpec};
use super::joint::{
    augment_dependency_breaking, dependency_breaking_deviation, omega_names, RoundLayout,
};
use super::table::JointTable;

/// Cap on the dense arrays of the second computation path.
pub const DENSE_BUDGET: usize = 50_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    /// Conditioning rounds (0-based); duplicates are ignored.
    pub s: Vec<usize>,
    pub tau: f64,
    pub beta: f64,
    /// The fixed `T` used by the lemmas stated for every `T`.
    #[serde(default)]
    pub t: Vec<usize>,
    /// Entanglement entropy of the strategy's state, in bits.
    pub entanglement_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub lhs: f64,
    /// Same quantity from the dense computation path.
    pub lhs_alt: f64,
    pub bound: f64,
    pub satisfied: bool,
    /// The bound exceeds 1, so the inequality holds trivially.
    pub vacuous: bool,
}

impl LemmaCheck {
    fn new(lemma: &str, lhs: f64, lhs_alt: f64, bound: f64) -> Self {
        LemmaCheck {
            lemma: lemma.to_string(),
            lhs,
            lhs_alt,
            bound,
            satisfied: lhs <= bound + 1e-12,
            vacuous: bound > 1.0,
        }
    }

    pub fn path_gap(&self) -> f64 {
        (self.lhs - self.lhs_alt).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub n: usize,
    pub m: usize,
    /// `P(W_S)` for the subset event with threshold `1 - tau`.
    pub p_ws: f64,
    pub error_params: ErrorParams,
    /// Number of sets `T` in the uniform average.
    pub t_family_size: usize,
    pub checks: Vec<LemmaCheck>,
    /// `max_omega || P_{XY|omega} - P_{X|omega} P_{Y|omega} ||` before conditioning.
    pub dependency_breaking_deviation: f64,
    /// `I(X ; Y | Omega)` in bits before conditioning.
    pub xy_given_omega_information: f64,
}

impl AuditReport {
    pub fn check(&self, lemma: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.lemma == lemma)
    }

    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn max_path_gap(&self) -> f64 {
        self.checks
            .iter()
            .map(LemmaCheck::path_gap)
            .fold(0.0, f64::max)
    }
}

pub const INPUT_DISTRIBUTION: &str = "input_distribution";
pub const SAMPLEABLE_X: &str = "sampleable_x";
pub const SAMPLEABLE_Y: &str = "sampleable_y";
pub const SAMPLEABLE_XY: &str = "sampleable_xy";
pub const BOB_ANSWER_AVG_T: &str = "bob_answer_avg_t";
pub const BOB_ANSWER_FIXED_T: &str = "bob_answer_fixed_t";
pub const ALICE_ANSWER: &str = "alice_answer";

pub(crate) fn sorted_set(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// All subsets of `free` with at most `max_size` elements, smallest first.
pub(crate) fn t_family(free: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_size.min(free.len()) {
        let mut next = Vec::new();
        for set in &frontier {
            let start = set
                .last()
                .map_or(0, |&last| free.iter().position(|&f| f == last).unwrap() + 1);
            for &f in &free[start..] {
                let mut s = set.clone();
                s.push(f);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Column positions of `R_{Tj} = (Omega_{-j}, X_T, A_{S u T}, B_S)` where
/// `Omega = (Om_0..Om_{n-1}, X_S, Y_S)`.
pub(crate) fn r_columns(layout: &RoundLayout, s: &[usize], t: &[usize], j: usize) -> Vec<usize> {
    let om = layout.omega.as_ref().expect("augmented table");
    let mut cols: Vec<usize> = (0..layout.n()).filter(|&i| i != j).map(|i| om[i]).collect();
    cols.extend(s.iter().map(|&i| layout.x[i]));
    cols.extend(s.iter().map(|&i| layout.y[i]));
    cols.extend(t.iter().map(|&i| layout.x[i]));
    let st = sorted_set(&[s, t].concat());
    cols.extend(st.iter().map(|&i| layout.a[i]));
    cols.extend(s.iter().map(|&i| layout.b[i]));
    cols
}

fn key(row: &[u16], cols: &[usize]) -> Vec<u16> {
    cols.iter().map(|&c| row[c]).collect()
}

/// `E_{g ~ P} || P_{target | g} - P_{target | reduced(g)} ||`, grouped path.
/// `reduced` lists columns that must be a subset of `full`.
pub(crate) fn expected_conditional_tv(
    table: &JointTable,
    full: &[usize],
    reduced: &[usize],
    target: &[usize],
) -> f64 {
    let mut by_full: BTreeMap<Vec<u16>, BTreeMap<Vec<u16>, f64>> = BTreeMap::new();
    let mut by_red: BTreeMap<Vec<u16>, BTreeMap<Vec<u16>, f64>> = BTreeMap::new();
    for (r, p) in table.iter() {
        let t = key(r, target);
        *by_full
            .entry(key(r, full))
            .or_default()
            .entry(t.clone())
            .or_default() += p;
        *by_red
            .entry(key(r, reduced))
            .or_default()
            .entry(t)
            .or_default() += p;
    }
    let red_pos: Vec<usize> = reduced
        .iter()
        .map(|c| {
            full.iter()
                .position(|f| f == c)
                .expect("reduced within full")
        })
        .collect();
    let red_tot: BTreeMap<&Vec<u16>, f64> =
        by_red.iter().map(|(k, m)| (k, m.values().sum())).collect();
    let mut acc = 0.0;
    for (g, tm) in &by_full {
        let pg: f64 = tm.values().sum();
        let rk: Vec<u16> = red_pos.iter().map(|&i| g[i]).collect();
        let rm = &by_red[&rk];
        let pr = red_tot[&rk];
        let mut d = 0.0;
        for (t, &p) in tm {
            d += (p / pg - rm.get(t).copied().unwrap_or(0.0) / pr).abs();
        }
        for (t, &q) in rm {
            if !tm.contains_key(t) {
                d += q / pr;
            }
        }
        acc += pg * 0.5 * d;
    }
    acc
}

/// Dense joint array over `cols` with mixed-radix indexing (first column most
/// significant).
struct Dense {
    cards: Vec<usize>,
    data: Vec<f64>,
}

impl Dense {
    fn new(table: &JointTable, cols: &[usize]) -> Result<Self> {
        let cards: Vec<usize> = cols.iter().map(|&c| table.vars()[c].card).collect();
        let size = cards
            .iter()
            .try_fold(1usize, |acc, &k| acc.checked_mul(k))
            .unwrap_or(usize::MAX);
        if size > DENSE_BUDGET {
            return Err(invalid(format!(
                "dense audit array of size {size} exceeds {DENSE_BUDGET}"
            )));
        }
        let mut data = vec![0.0; size];
        for (r, p) in table.iter() {
            let mut idx = 0;
            for (&c, &k) in cols.iter().zip(&cards) {
                idx = idx * k + r[c] as usize;
            }
            data[idx] += p;
        }
        Ok(Dense { cards, data })
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut d = vec![0; self.cards.len()];
        for i in (0..self.cards.len()).rev() {
            d[i] = idx % self.cards[i];
            idx /= self.cards[i];
        }
        d
    }

    /// Sums out everything but the listed axes (kept in the listed order).
    fn project(&self, axes: &[usize]) -> Dense {
        let cards: Vec<usize> = axes.iter().map(|&a| self.cards[a]).collect();
        let size: usize = cards.iter().product();
        let mut data = vec![0.0; size];
        for (idx, &p) in self.data.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let d = self.digits(idx);
            let mut j = 0;
            for (&a, &k) in axes.iter().zip(&cards) {
                j = j * k + d[a];
            }
            data[j] += p;
        }
        Dense { cards, data }
    }

    fn index_of(&self, digits: &[usize], axes: &[usize]) -> usize {
        axes.iter()
            .zip(&self.cards)
            .fold(0, |acc, (&a, &k)| acc * k + digits[a])
    }
}

/// Dense path for [`expected_conditional_tv`]:
/// `(1/2) sum_{g,t} | P(g,t) - P(g) P(red(g),t) / P(red(g)) |`.
pub(crate) fn expected_conditional_tv_dense(
    table: &JointTable,
    full: &[usize],
    reduced: &[usize],
    target: &[usize],
) -> Result<f64> {
    let cols: Vec<usize> = full.iter().chain(target).copied().collect();
    let joint = Dense::new(table, &cols)?;
    let nf = full.len();
    let full_axes: Vec<usize> = (0..nf).collect();
    let red_axes: Vec<usize> = reduced
        .iter()
        .map(|c| {
            full.iter()
                .position(|f| f == c)
                .expect("reduced within full")
        })
        .collect();
    let tgt_axes: Vec<usize> = (nf..cols.len()).collect();
    let red_tgt_axes: Vec<usize> = red_axes.iter().chain(&tgt_axes).copied().collect();
    let p_full = joint.project(&full_axes);
    let p_red = joint.project(&red_axes);
    let p_red_tgt = joint.project(&red_tgt_axes);
    let mut acc = 0.0;
    for idx in 0..joint.data.len() {
        let d = joint.digits(idx);
        let pg = p_full.data[p_full.index_of(&d, &full_axes)];
        if pg == 0.0 {
            continue;
        }
        let pr = p_red.data[p_red.index_of(&d, &red_axes)];
        let prt = p_red_tgt.data[p_red_tgt.index_of(&d, &red_tgt_axes)];
        acc += (joint.data[idx] - pg * prt / pr).abs();
    }
    Ok(0.5 * acc)
}

/// `E_{(x,y) ~ P} || P_{R | X_j = x} - P_{R | Y_j = y} ||`, grouped path.
fn cross_conditional_tv(table: &JointTable, xc: usize, yc: usize, r: &[usize]) -> f64 {
    let mut rx: BTreeMap<u16, BTreeMap<Vec<u16>, f64>> = BTreeMap::new();
    let mut ry: BTreeMap<u16, BTreeMap<Vec<u16>, f64>> = BTreeMap::new();
    let mut pxy: BTreeMap<(u16, u16), f64> = BTreeMap::new();
    for (row, p) in table.iter() {
        *rx.entry(row[xc])
            .or_default()
            .entry(key(row, r))
            .or_default() += p;
        *ry.entry(row[yc])
            .or_default()
            .entry(key(row, r))
            .or_default() += p;
        *pxy.entry((row[xc], row[yc])).or_default() += p;
    }
    let tot = |m: &BTreeMap<Vec<u16>, f64>| -> f64 { m.values().sum() };
    let mut acc = 0.0;
    for (&(x, y), &w) in &pxy {
        let (mx, my) = (&rx[&x], &ry[&y]);
        let (px, py) = (tot(mx), tot(my));
        let mut d = 0.0;
        for (k, &p) in mx {
            d += (p / px - my.get(k).copied().unwrap_or(0.0) / py).abs();
        }
        for (k, &q) in my {
            if !mx.contains_key(k) {
                d += q / py;
            }
        }
        acc += w * 0.5 * d;
    }
    acc
}

fn cross_conditional_tv_dense(
    table: &JointTable,
    xc: usize,
    yc: usize,
    r: &[usize],
) -> Result<f64> {
    let cols: Vec<usize> = [xc, yc].iter().chain(r).copied().collect();
    let joint = Dense::new(table, &cols)?;
    let r_axes: Vec<usize> = (2..cols.len()).collect();
    let pxy = joint.project(&[0, 1]);
    let px = joint.project(&[0]);
    let py = joint.project(&[1]);
    let xr_axes: Vec<usize> = std::iter::once(0).chain(r_axes.iter().copied()).collect();
    let yr_axes: Vec<usize> = std::iter::once(1).chain(r_axes.iter().copied()).collect();
    let pxr = joint.project(&xr_axes);
    let pyr = joint.project(&yr_axes);
    let r_size: usize = r_axes.iter().map(|&a| joint.cards[a]).product();
    let (nx, ny) = (joint.cards[0], joint.cards[1]);
    let mut acc = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let w = pxy.data[x * ny + y];
            if w == 0.0 {
                continue;
            }
            let mut d = 0.0;
            for k in 0..r_size {
                d += (pxr.data[x * r_size + k] / px.data[x]
                    - pyr.data[y * r_size + k] / py.data[y])
                    .abs();
            }
            acc += w * 0.5 * d;
        }
    }
    Ok(acc)
}

#[derive(Default, Clone, Copy)]
struct Pair {
    lhs: f64,
    alt: f64,
}

impl Pair {
    fn add(&mut self, w: f64, lhs: f64, alt: f64) {
        self.lhs += w * lhs;
        self.alt += w * alt;
    }
}

/// Runs every lemma audit on `table`, which may be plain or already augmented
/// with the `Om` variables for the same `S`.
pub fn lemma_audit(table: &JointTable, game: &Game, config: &AuditConfig) -> Result<AuditReport> {
    let base_layout = RoundLayout::of(table)?;
    let n = base_layout.n();
    let s = sorted_set(&config.s);
    let t_fixed = sorted_set(&config.t);
    if let Some(&i) = s.iter().chain(&t_fixed).find(|&&i| i >= n) {
        return Err(invalid(format!("round {i} out of range for n = {n}")));
    }
    if t_fixed.iter().any(|i| s.contains(i)) {
        return Err(invalid("T must be disjoint from S"));
    }
    if !(config.tau >= 0.0 && config.tau <= 1.0) {
        return Err(invalid("tau must be in [0, 1]"));
    }
    if s.len() >= n {
        return Err(invalid("S must leave at least one round free"));
    }
    let m = n - s.len();
    let t_max = (config.beta * m as f64 + 1e-12).floor() as usize;
    if t_fixed.len() > t_max {
        return Err(invalid(format!(
            "|T| = {} exceeds beta m = {}",
            t_fixed.len(),
            config.beta * m as f64
        )));
    }

    let augmented = if base_layout.omega.is_some() {
        table.clone()
    } else {
        augment_dependency_breaking(table, game, &s)?
    };
    let layout = RoundLayout::of(&augmented)?;
    let deviation = dependency_breaking_deviation(&augmented, &s)?;
    let xs: Vec<String> = (0..n).map(super::joint::x_name).collect();
    let ys: Vec<String> = (0..n).map(super::joint::y_name).collect();
    let mi = augmented.conditional_mutual_information(&xs, &ys, &omega_names(n, &s))?;

    let event = WinEventSpec::subset_from_tau(&s, config.tau);
    let (cond, p_ws) = condition_on_event(&augmented, &event, game)?;
    let answer_pairs = game.answer_pairs();
    let params = error_params_with_beta(
        config.beta,
        answer_pairs,
        n,
        s.len(),
        p_ws,
        config.entanglement_bits,
    )?;

    let free: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
    let js =
        |t: &[usize]| -> Vec<usize> { free.iter().copied().filter(|j| !t.contains(j)).collect() };

    // lemmas stated for a fixed T
    let j_fixed = js(&t_fixed);
    let wj = 1.0 / j_fixed.len() as f64;
    let mut input = Pair::default();
    let mut sx = Pair::default();
    let mut sy = Pair::default();
    let mut sxy = Pair::default();
    let mut bob_fixed = Pair::default();
    let mut alice = Pair::default();
    for &j in &j_fixed {
        let (xc, yc, ac, bc) = (layout.x[j], layout.y[j], layout.a[j], layout.b[j]);
        let xy = [xc, yc];
        let before = augmented.marginal_cols(&xy);
        let after = cond.marginal_cols(&xy);
        let tv = after.tv_distance(&before)?;
        let tv_alt = {
            let p = Dense::new(&augmented, &xy)?;
            let q = Dense::new(&cond, &xy)?;
            0.5 * p
                .data
                .iter()
                .zip(&q.data)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
        };
        input.add(wj, tv, tv_alt);

        let r = r_columns(&layout, &s, &t_fixed, j);
        sx.add(
            wj,
            expected_conditional_tv(&cond, &xy, &[xc], &r),
            expected_conditional_tv_dense(&cond, &xy, &[xc], &r)?,
        );
        sy.add(
            wj,
            expected_conditional_tv(&cond, &xy, &[yc], &r),
            expected_conditional_tv_dense(&cond, &xy, &[yc], &r)?,
        );
        sxy.add(
            wj,
            cross_conditional_tv(&cond, xc, yc, &r),
            cross_conditional_tv_dense(&cond, xc, yc, &r)?,
        );

        let bob_full: Vec<usize> = r.iter().copied().chain([xc, ac, yc]).collect();
        let bob_red: Vec<usize> = r.iter().copied().chain([yc]).collect();
        bob_fixed.add(
            wj,
            expected_conditional_tv(&cond, &bob_full, &bob_red, &[bc]),
            expected_conditional_tv_dense(&cond, &bob_full, &bob_red, &[bc])?,
        );

        let alice_full: Vec<usize> = r.iter().copied().chain([xc, yc]).collect();
        let alice_red: Vec<usize> = r.iter().copied().chain([xc]).collect();
        alice.add(
            wj,
            expected_conditional_tv(&cond, &alice_full, &alice_red, &[ac]),
            expected_conditional_tv_dense(&cond, &alice_full, &alice_red, &[ac])?,
        );
    }

    // Bob's lemma averaged over a uniformly random T with |T| <= beta m
    let family = t_family(&free, t_max);
    let wt = 1.0 / family.len() as f64;
    let mut bob_avg = Pair::default();
    for t in &family {
        let jt = js(t);
        let w = wt / jt.len() as f64;
        for &j in &jt {
            let r = r_columns(&layout, &s, t, j);
            let (xc, yc, ac, bc) = (layout.x[j], layout.y[j], layout.a[j], layout.b[j]);
            let full: Vec<usize> = r.iter().copied().chain([xc, ac, yc]).collect();
            let red: Vec<usize> = r.iter().copied().chain([yc]).collect();
            bob_avg.add(
                w,
                expected_conditional_tv(&cond, &full, &red, &[bc]),
                expected_conditional_tv_dense(&cond, &full, &red, &[bc])?,
            );
        }
    }

    let checks = vec![
        LemmaCheck::new(
            INPUT_DISTRIBUTION,
            input.lhs,
            input.alt,
            params.bound_input(),
        ),
        LemmaCheck::new(SAMPLEABLE_X, sx.lhs, sx.alt, params.bound_sampling()),
        LemmaCheck::new(SAMPLEABLE_Y, sy.lhs, sy.alt, params.bound_sampling()),
        LemmaCheck::new(SAMPLEABLE_XY, sxy.lhs, sxy.alt, params.bound_sampling()),
        LemmaCheck::new(
            BOB_ANSWER_AVG_T,
            bob_avg.lhs,
            bob_avg.alt,
            params.bound_bob(),
        ),
        LemmaCheck::new(
            BOB_ANSWER_FIXED_T,
            bob_fixed.lhs,
            bob_fixed.alt,
            params.bound_bob(),
        ),
        LemmaCheck::new(ALICE_ANSWER, alice.lhs, alice.alt, params.bound_alice()),
    ];

    Ok(AuditReport {
        config: AuditConfig {
            s,
            t: t_fixed,
            ..config.clone()
        },
        n,
        m,
        p_ws,
        error_params: params,
        t_family_size: family.len(),
        checks,
        dependency_breaking_deviation: deviation,
        xy_given_omega_information: mi,
    })
}

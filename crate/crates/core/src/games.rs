//! Finite two-player games.
//!
//! A game is a question distribution `mu` over `X x Y` together with a 0/1
//! predicate `V(x, y, a, b)`. Alphabets are ordered label lists and every
//! table is indexed by label position.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Error, Result};
use crate::min_wins;

/// Default cap on `|A|^|X| * |B|^|Y|` for [`classical_value`].
pub const DEFAULT_ENUMERATION_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Text(v.to_string())
    }
}

/// Unvalidated game description, exactly as it appears in game JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawGame {
    pub x_alphabet: Vec<Label>,
    pub y_alphabet: Vec<Label>,
    pub a_alphabet: Vec<Label>,
    pub b_alphabet: Vec<Label>,
    pub mu: Vec<Vec<f64>>,
    /// Indexed `[x][y][a][b]`, entries 0 or 1.
    pub predicate: Vec<Vec<Vec<Vec<u8>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct Game {
    x_alphabet: Vec<Label>,
    y_alphabet: Vec<Label>,
    a_alphabet: Vec<Label>,
    b_alphabet: Vec<Label>,
    mu: Vec<f64>,
    predicate: Vec<bool>,
}

impl TryFrom<RawGame> for Game {
    type Error = Error;

    fn try_from(raw: RawGame) -> Result<Self> {
        validate_game(raw)
    }
}

impl From<Game> for RawGame {
    fn from(g: Game) -> Self {
        let (nx, ny, na, nb) = g.dims();
        let mu = (0..nx)
            .map(|x| (0..ny).map(|y| g.mu(x, y)).collect())
            .collect();
        let predicate = (0..nx)
            .map(|x| {
                (0..ny)
                    .map(|y| {
                        (0..na)
                            .map(|a| (0..nb).map(|b| g.wins(x, y, a, b) as u8).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        RawGame {
            x_alphabet: g.x_alphabet,
            y_alphabet: g.y_alphabet,
            a_alphabet: g.a_alphabet,
            b_alphabet: g.b_alphabet,
            mu,
            predicate,
        }
    }
}

/// Checks a raw description and returns a [`Game`].
///
/// `mu` is renormalized by its sum when the sum is within 1e-9 of one.
pub fn validate_game(raw: RawGame) -> Result<Game> {
    let (nx, ny, na, nb) = (
        raw.x_alphabet.len(),
        raw.y_alphabet.len(),
        raw.a_alphabet.len(),
        raw.b_alphabet.len(),
    );
    if nx == 0 || ny == 0 || na == 0 || nb == 0 {
        return Err(invalid("alphabets must be non-empty"));
    }
    if raw.mu.len() != nx || raw.mu.iter().any(|row| row.len() != ny) {
        return Err(dim_err(format!("mu must be {nx}x{ny}")));
    }
    let mut mu = Vec::with_capacity(nx * ny);
    for (x, row) in raw.mu.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if !p.is_finite() {
                return Err(invalid(format!("mu[{x}][{y}] is not finite")));
            }
            if p < 0.0 {
                return Err(Error::NegativeProbability {
                    value: p,
                    location: format!("mu[{x}][{y}]"),
                });
            }
            mu.push(p);
        }
    }
    let sum: f64 = mu.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::MuNotNormalized(sum));
    }
    mu.iter_mut().for_each(|p| *p /= sum);

    let mut predicate = Vec::with_capacity(nx * ny * na * nb);
    if raw.predicate.len() != nx {
        return Err(dim_err("predicate outer dimension must match x_alphabet"));
    }
    for px in &raw.predicate {
        if px.len() != ny {
            return Err(dim_err("predicate second dimension must match y_alphabet"));
        }
        for pxy in px {
            if pxy.len() != na {
                return Err(dim_err("predicate third dimension must match a_alphabet"));
            }
            for pxya in pxy {
                if pxya.len() != nb {
                    return Err(dim_err("predicate fourth dimension must match b_alphabet"));
                }
                for &v in pxya {
                    match v {
                        0 => predicate.push(false),
                        1 => predicate.push(true),
                        other => {
                            return Err(invalid(format!("predicate entry {other} is not 0/1")))
                        }
                    }
                }
            }
        }
    }

    Ok(Game {
        x_alphabet: raw.x_alphabet,
        y_alphabet: raw.y_alphabet,
        a_alphabet: raw.a_alphabet,
        b_alphabet: raw.b_alphabet,
        mu,
        predicate,
    })
}

fn index_labels(k: usize) -> Vec<Label> {
    (0..k as i64).map(Label::Int).collect()
}

impl Game {
    /// Builds a game over index-labelled alphabets from a question table and a
    /// predicate closure.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        na: usize,
        nb: usize,
        mu: impl Fn(usize, usize) -> f64,
        v: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Result<Game> {
        let raw = RawGame {
            x_alphabet: index_labels(nx),
            y_alphabet: index_labels(ny),
            a_alphabet: index_labels(na),
            b_alphabet: index_labels(nb),
            mu: (0..nx)
                .map(|x| (0..ny).map(|y| mu(x, y)).collect())
                .collect(),
            predicate: (0..nx)
                .map(|x| {
                    (0..ny)
                        .map(|y| {
                            (0..na)
                                .map(|a| (0..nb).map(|b| v(x, y, a, b) as u8).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        validate_game(raw)
    }

    /// The CHSH game: binary alphabets, uniform questions, win iff `a xor b = x and y`.
    pub fn chsh() -> Game {
        Game::from_fn(2, 2, 2, 2, |_, _| 0.25, |x, y, a, b| (a ^ b) == (x & y))
            .expect("CHSH is well formed")
    }

    /// `(|X|, |Y|, |A|, |B|)`
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (
            self.x_alphabet.len(),
            self.y_alphabet.len(),
            self.a_alphabet.len(),
            self.b_alphabet.len(),
        )
    }

    pub fn answer_pairs(&self) -> usize {
        self.a_alphabet.len() * self.b_alphabet.len()
    }

    pub fn x_alphabet(&self) -> &[Label] {
        &self.x_alphabet
    }

    pub fn y_alphabet(&self) -> &[Label] {
        &self.y_alphabet
    }

    pub fn a_alphabet(&self) -> &[Label] {
        &self.a_alphabet
    }

    pub fn b_alphabet(&self) -> &[Label] {
        &self.b_alphabet
    }

    #[inline]
    pub fn mu(&self, x: usize, y: usize) -> f64 {
        self.mu[x * self.y_alphabet.len() + y]
    }

    #[inline]
    pub fn wins(&self, x: usize, y: usize, a: usize, b: usize) -> bool {
        let (_, ny, na, nb) = self.dims();
        self.predicate[((x * ny + y) * na + a) * nb + b]
    }

    /// Marginal of `mu` on Alice's question.
    pub fn mu_x(&self) -> Vec<f64> {
        let (nx, ny, _, _) = self.dims();
        (0..nx)
            .map(|x| (0..ny).map(|y| self.mu(x, y)).sum())
            .collect()
    }

    /// Marginal of `mu` on Bob's question.
    pub fn mu_y(&self) -> Vec<f64> {
        let (nx, ny, _, _) = self.dims();
        (0..ny)
            .map(|y| (0..nx).map(|x| self.mu(x, y)).sum())
            .collect()
    }

    /// Success probability of the deterministic strategy `(f, h)`.
    pub fn deterministic_value(&self, f: &[usize], h: &[usize]) -> f64 {
        let (nx, ny, _, _) = self.dims();
        let mut total = 0.0;
        for x in 0..nx {
            for y in 0..ny {
                if self.wins(x, y, f[x], h[y]) {
                    total += self.mu(x, y);
                }
            }
        }
        total
    }

    /// Returns the game with every alphabet relabelled by the given permutations.
    /// `perm_x[x]` is the new position of old label `x`, and likewise for the others.
    pub fn relabel(
        &self,
        perm_x: &[usize],
        perm_y: &[usize],
        perm_a: &[usize],
        perm_b: &[usize],
    ) -> Result<Game> {
        let (nx, ny, na, nb) = self.dims();
        for (p, k) in [(perm_x, nx), (perm_y, ny), (perm_a, na), (perm_b, nb)] {
            let mut seen = vec![false; k];
            if p.len() != k
                || p.iter()
                    .any(|&i| i >= k || std::mem::replace(&mut seen[i], true))
            {
                return Err(invalid("relabeling must be a permutation of each alphabet"));
            }
        }
        let inv = |p: &[usize]| {
            let mut q = vec![0; p.len()];
            for (old, &new) in p.iter().enumerate() {
                q[new] = old;
            }
            q
        };
        let (ix, iy, ia, ib) = (inv(perm_x), inv(perm_y), inv(perm_a), inv(perm_b));
        let permute =
            |labels: &[Label], inv: &[usize]| inv.iter().map(|&o| labels[o].clone()).collect();
        let mut g = Game::from_fn(
            nx,
            ny,
            na,
            nb,
            |x, y| self.mu(ix[x], iy[y]),
            |x, y, a, b| self.wins(ix[x], iy[y], ia[a], ib[b]),
        )?;
        g.x_alphabet = permute(&self.x_alphabet, &ix);
        g.y_alphabet = permute(&self.y_alphabet, &iy);
        g.a_alphabet = permute(&self.a_alphabet, &ia);
        g.b_alphabet = permute(&self.b_alphabet, &ib);
        Ok(g)
    }
}

/// Exact classical value with the default enumeration budget.
pub fn classical_value(g: &Game) -> Result<f64> {
    classical_value_with_budget(g, DEFAULT_ENUMERATION_BUDGET)
}

pub fn classical_value_with_budget(g: &Game, budget: f64) -> Result<f64> {
    Ok(classical_optimum(g, budget)?.value)
}

/// An optimal deterministic strategy: Alice answers `f[x]`, Bob answers `h[y]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalOptimum {
    pub value: f64,
    pub f: Vec<usize>,
    pub h: Vec<usize>,
}

/// Exact classical value: the maximum of `sum mu(x,y) V(x,y,f(x),h(y))` over all
/// deterministic strategy pairs `(f, h)`. Shared randomness is a convex mixture
/// of such pairs, so the maximum is attained at a deterministic pair.
///
/// Alice's functions are enumerated explicitly (or Bob's, whichever side is
/// smaller); for each fixed function the other player's best response is taken
/// question by question, which is the exact inner maximum.
pub fn classical_optimum(g: &Game, budget: f64) -> Result<ClassicalOptimum> {
    let (nx, ny, na, nb) = g.dims();
    let needed = (na as f64).powi(nx as i32) * (nb as f64).powi(ny as i32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let alice_side = (na as f64).powi(nx as i32) <= (nb as f64).powi(ny as i32);
    let (n_fixed, k_fixed, n_resp, k_resp) = if alice_side {
        (nx, na, ny, nb)
    } else {
        (ny, nb, nx, na)
    };
    let total = (k_fixed as u64).pow(n_fixed as u32);

    let best_response = |code: u64| -> (f64, Vec<usize>, Vec<usize>) {
        let f = decode_vector(code as usize, k_fixed, n_fixed);
        let mut sum = 0.0;
        let mut resp = Vec::with_capacity(n_resp);
        for r in 0..n_resp {
            let mut best = (f64::NEG_INFINITY, 0);
            for ans in 0..k_resp {
                let mut s = 0.0;
                for q in 0..n_fixed {
                    let (x, y, a, b) = if alice_side {
                        (q, r, f[q], ans)
                    } else {
                        (r, q, ans, f[q])
                    };
                    if g.wins(x, y, a, b) {
                        s += g.mu(x, y);
                    }
                }
                if s > best.0 {
                    best = (s, ans);
                }
            }
            sum += best.0;
            resp.push(best.1);
        }
        (sum, f, resp)
    };

    // max value, lowest code on ties, so the result does not depend on scheduling
    let (_, code) = (0..total)
        .into_par_iter()
        .map(|code| (best_response(code).0, code))
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let (value, fixed, resp) = best_response(code);
    let (f, h) = if alice_side {
        (fixed, resp)
    } else {
        (resp, fixed)
    };
    Ok(ClassicalOptimum {
        value: value.min(1.0),
        f,
        h,
    })
}

/// The threshold game `G^n_threshold`: `n` parallel copies of `base`, won when at
/// least a `threshold` fraction of the copies are won.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGameSpec {
    pub base: Game,
    pub n: usize,
    pub threshold: f64,
}

impl ThresholdGameSpec {
    pub fn new(base: Game, n: usize, threshold: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("threshold game needs n >= 1"));
        }
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(invalid(format!("threshold {threshold} not in (0, 1]")));
        }
        Ok(ThresholdGameSpec { base, n, threshold })
    }

    pub fn required_wins(&self) -> usize {
        min_wins(self.threshold, self.n)
    }

    /// Probability of the question tuple under `mu^n`.
    pub fn question_prob(&self, xs: &[usize], ys: &[usize]) -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| self.base.mu(x, y))
            .product()
    }

    /// The threshold game written out as a single game over vector alphabets
    /// (round 0 is the most significant digit of each vector index).
    pub fn to_game(&self) -> Result<Game> {
        let (nx, ny, na, nb) = self.base.dims();
        let p = |k: usize| (k as f64).powi(self.n as i32);
        let size = p(nx) * p(ny) * p(na) * p(nb);
        if size > 5e7 {
            return Err(Error::BudgetExceeded {
                needed: size,
                budget: 5e7,
            });
        }
        let n = self.n;
        Game::from_fn(
            nx.pow(n as u32),
            ny.pow(n as u32),
            na.pow(n as u32),
            nb.pow(n as u32),
            |x, y| self.question_prob(&decode_vector(x, nx, n), &decode_vector(y, ny, n)),
            |x, y, a, b| {
                let (xs, ys, as_, bs) = (
                    decode_vector(x, nx, n),
                    decode_vector(y, ny, n),
                    decode_vector(a, na, n),
                    decode_vector(b, nb, n),
                );
                let wins = (0..n)
                    .filter(|&i| self.base.wins(xs[i], ys[i], as_[i], bs[i]))
                    .count();
                wins >= self.required_wins()
            },
        )
    }
}

/// Splits a vector index into its `n` round digits, round 0 most significant.
pub fn decode_vector(mut index: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

/// Inverse of [`decode_vector`].
pub fn encode_vector(digits: &[usize], k: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * k + d)
}

/// `V^n_threshold(x, y, a, b)`: true iff the number of won rounds is at least
/// `ceil(threshold * n)`.
pub fn threshold_predicate(
    spec: &ThresholdGameSpec,
    xs: &[usize],
    ys: &[usize],
    as_: &[usize],
    bs: &[usize],
) -> Result<bool> {
    let n = spec.n;
    if xs.len() != n || ys.len() != n || as_.len() != n || bs.len() != n {
        return Err(dim_err(format!("tuples must have length {n}")));
    }
    let (nx, ny, na, nb) = spec.base.dims();
    let in_range = |v: &[usize], k: usize| v.iter().all(|&e| e < k);
    if !(in_range(xs, nx) && in_range(ys, ny) && in_range(as_, na) && in_range(bs, nb)) {
        return Err(invalid("tuple entry outside its alphabet"));
    }
    let wins = (0..n)
        .filter(|&i| spec.base.wins(xs[i], ys[i], as_[i], bs[i]))
        .count();
    Ok(wins >= spec.required_wins())
}

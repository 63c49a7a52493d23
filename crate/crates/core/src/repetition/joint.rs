//! Exact joint distribution `P_{XYAB}` of n parallel rounds, and its
//! augmentation with dependency-breaking variables.

use crate::error::{dim_err, invalid, Error, Result};
use crate::games::{decode_vector, Game};
use crate::strategies::Behavior;

use super::table::{JointTable, Var};

/// Default cap on `(|X||Y||A||B|)^n`.
pub const DEFAULT_TABLE_BUDGET: f64 = 5e7;

/// How answers in the n rounds are produced.
#[derive(Debug, Clone)]
pub enum RoundBehavior {
    /// Each round independently from the same single-round behavior.
    Iid(Behavior),
    /// One behavior over vector alphabets (round 0 most significant digit).
    Joint(Behavior),
}

pub fn x_name(i: usize) -> String {
    format!("X{i}")
}
pub fn y_name(i: usize) -> String {
    format!("Y{i}")
}
pub fn a_name(i: usize) -> String {
    format!("A{i}")
}
pub fn b_name(i: usize) -> String {
    format!("B{i}")
}
pub fn omega_name(i: usize) -> String {
    format!("Om{i}")
}

/// Column positions of the per-round variables of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLayout {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Present only on augmented tables.
    pub omega: Option<Vec<usize>>,
}

impl RoundLayout {
    pub fn of(table: &JointTable) -> Result<Self> {
        let mut n = 0;
        while table.var_index(&x_name(n)).is_ok() {
            n += 1;
        }
        if n == 0 {
            return Err(invalid("table has no round variables X0.."));
        }
        let cols = |f: fn(usize) -> String| -> Result<Vec<usize>> {
            (0..n).map(|i| table.var_index(&f(i))).collect()
        };
        let omega = if table.var_index(&omega_name(0)).is_ok() {
            Some(cols(omega_name)?)
        } else {
            None
        };
        Ok(RoundLayout {
            x: cols(x_name)?,
            y: cols(y_name)?,
            a: cols(a_name)?,
            b: cols(b_name)?,
            omega,
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn round_won(&self, game: &Game, row: &[u16], i: usize) -> bool {
        game.wins(
            row[self.x[i]] as usize,
            row[self.y[i]] as usize,
            row[self.a[i]] as usize,
            row[self.b[i]] as usize,
        )
    }
}

fn schema(game: &Game, n: usize) -> Vec<Var> {
    let (nx, ny, na, nb) = game.dims();
    (0..n)
        .flat_map(|i| {
            [
                Var::new(x_name(i), nx),
                Var::new(y_name(i), ny),
                Var::new(a_name(i), na),
                Var::new(b_name(i), nb),
            ]
        })
        .collect()
}

/// Exact table of `mu^n(x, y) P(a, b | x, y)` with variables ordered
/// `X0 Y0 A0 B0 X1 Y1 A1 B1 ...`.
pub fn enumerate_joint(
    behavior: &RoundBehavior,
    game: &Game,
    n: usize,
    budget: f64,
) -> Result<JointTable> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let (nx, ny, na, nb) = game.dims();
    let needed = ((nx * ny * na * nb) as f64).powi(n as i32);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut rows: Vec<u16> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    match behavior {
        RoundBehavior::Iid(b) => {
            if b.dims() != game.dims() {
                return Err(dim_err("single-round behavior does not match the game"));
            }
            let mut single: Vec<([u16; 4], f64)> = Vec::new();
            for x in 0..nx {
                for y in 0..ny {
                    for a in 0..na {
                        for bb in 0..nb {
                            let p = game.mu(x, y) * b.prob(x, y, a, bb);
                            if p > 0.0 {
                                single.push(([x as u16, y as u16, a as u16, bb as u16], p));
                            }
                        }
                    }
                }
            }
            let mut idx = vec![0usize; n];
            'outer: loop {
                let mut w = 1.0;
                for &k in &idx {
                    rows.extend_from_slice(&single[k].0);
                    w *= single[k].1;
                }
                weights.push(w);
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < single.len() {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
        }
        RoundBehavior::Joint(b) => {
            let p = |k: usize| k.pow(n as u32);
            if b.dims() != (p(nx), p(ny), p(na), p(nb)) {
                return Err(dim_err(format!(
                    "joint behavior dims {:?} do not match {n} rounds of the game",
                    b.dims()
                )));
            }
            for xv in 0..p(nx) {
                let xs = decode_vector(xv, nx, n);
                for yv in 0..p(ny) {
                    let ys = decode_vector(yv, ny, n);
                    let q: f64 = (0..n).map(|i| game.mu(xs[i], ys[i])).product();
                    if q == 0.0 {
                        continue;
                    }
                    for av in 0..p(na) {
                        let as_ = decode_vector(av, na, n);
                        for bv in 0..p(nb) {
                            let w = q * b.prob(xv, yv, av, bv);
                            if w <= 0.0 {
                                continue;
                            }
                            let bs = decode_vector(bv, nb, n);
                            for i in 0..n {
                                rows.extend([
                                    xs[i] as u16,
                                    ys[i] as u16,
                                    as_[i] as u16,
                                    bs[i] as u16,
                                ]);
                            }
                            weights.push(w);
                        }
                    }
                }
            }
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    JointTable::new(schema(game, n), rows, weights)
}

/// Adds `Om0..Om{n-1}`: with a fair coin `D_i`, `Om_i = x_i` when `D_i` is
/// Alice and `|X| + y_i` when it is Bob. Every row is split over the `2^n` coin
/// vectors with weight `2^-n`. The full dependency-breaking variable is
/// `(Om_0..Om_{n-1}, X_S, Y_S)`; `s` is only checked here.
pub fn augment_dependency_breaking(
    table: &JointTable,
    game: &Game,
    s: &[usize],
) -> Result<JointTable> {
    let layout = RoundLayout::of(table)?;
    if layout.omega.is_some() {
        return Err(invalid("table is already augmented"));
    }
    let n = layout.n();
    if let Some(&i) = s.iter().find(|&&i| i >= n) {
        return Err(invalid(format!(
            "round {i} in S is out of range for n = {n}"
        )));
    }
    let (nx, ny, _, _) = game.dims();
    let extra = (0..n).map(|i| Var::new(omega_name(i), nx + ny)).collect();
    let scale = 0.5f64.powi(n as i32);
    Ok(table.extend_with(extra, |row| {
        (0..1usize << n)
            .map(|coins| {
                let vals = (0..n)
                    .map(|i| {
                        let bob = (coins >> (n - 1 - i)) & 1 == 1;
                        if bob {
                            (nx + row[layout.y[i]] as usize) as u16
                        } else {
                            row[layout.x[i]]
                        }
                    })
                    .collect();
                (vals, scale)
            })
            .collect()
    }))
}

/// Names of the variables making up `Omega = (Om_0..Om_{n-1}, X_S, Y_S)`.
pub fn omega_names(n: usize, s: &[usize]) -> Vec<String> {
    let mut names: Vec<String> = (0..n).map(omega_name).collect();
    let mut sset: Vec<usize> = s.to_vec();
    sset.sort_unstable();
    sset.dedup();
    names.extend(sset.iter().map(|&i| x_name(i)));
    names.extend(sset.iter().map(|&i| y_name(i)));
    names
}

/// Claim-2.7 deviation: the maximum over `omega` of
/// `|| P_{XY|omega} - P_{X|omega} P_{Y|omega} ||` (total variation).
pub fn dependency_breaking_deviation(augmented: &JointTable, s: &[usize]) -> Result<f64> {
    let layout = RoundLayout::of(augmented)?;
    let n = layout.n();
    let om_cols = augmented.columns(&omega_names(n, s))?;
    let xs = layout.x.clone();
    let ys = layout.y.clone();
    type Slice = Vec<(Vec<u16>, Vec<u16>, f64)>;
    let mut by_omega: std::collections::BTreeMap<Vec<u16>, Slice> = Default::default();
    for (r, p) in augmented.iter() {
        by_omega
            .entry(om_cols.iter().map(|&c| r[c]).collect())
            .or_default()
            .push((
                xs.iter().map(|&c| r[c]).collect(),
                ys.iter().map(|&c| r[c]).collect(),
                p,
            ));
    }
    let mut worst: f64 = 0.0;
    for entries in by_omega.values() {
        let total: f64 = entries.iter().map(|e| e.2).sum();
        let mut pxy: std::collections::BTreeMap<(&[u16], &[u16]), f64> = Default::default();
        let mut px: std::collections::BTreeMap<&[u16], f64> = Default::default();
        let mut py: std::collections::BTreeMap<&[u16], f64> = Default::default();
        for (x, y, p) in entries {
            *pxy.entry((x, y)).or_default() += p / total;
            *px.entry(x).or_default() += p / total;
            *py.entry(y).or_default() += p / total;
        }
        let mut tv = 0.0;
        for (x, &qx) in &px {
            for (y, &qy) in &py {
                tv += (pxy.get(&(*x, *y)).copied().unwrap_or(0.0) - qx * qy).abs();
            }
        }
        worst = worst.max(0.5 * tv);
    }
    Ok(worst)
}

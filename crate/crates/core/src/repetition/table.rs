//! Exact finite joint distributions over named discrete variables.
//!
//! Rows are stored sorted lexicographically by assignment, one weight per
//! row; assignments of weight zero are not stored.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{dim_err, invalid, Error, Result};
use crate::quantum::shannon_entropy;

/// Probability below which an event counts as null.
pub const NULL_EVENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Var {
    pub name: String,
    pub card: usize,
}

impl Var {
    pub fn new(name: impl Into<String>, card: usize) -> Self {
        Var {
            name: name.into(),
            card,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<Var>,
    rows: Vec<u16>,
    weights: Vec<f64>,
}

impl JointTable {
    /// Builds a table from possibly unsorted, possibly repeated assignments.
    /// Weights must be non-negative and sum to one within 1e-10.
    pub fn new(vars: Vec<Var>, rows: Vec<u16>, weights: Vec<f64>) -> Result<Self> {
        let w = vars.len();
        if w == 0 {
            return Err(dim_err("a table needs at least one variable"));
        }
        if vars
            .iter()
            .any(|v| v.card == 0 || v.card > u16::MAX as usize)
        {
            return Err(invalid("variable cardinalities must be in 1..=65535"));
        }
        let mut names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|p| p[0] == p[1]) {
            return Err(invalid("duplicate variable name"));
        }
        if rows.len() != weights.len() * w {
            return Err(dim_err("row storage does not match the number of weights"));
        }
        for (k, row) in rows.chunks(w).enumerate() {
            if let Some(i) = (0..w).find(|&i| row[i] as usize >= vars[i].card) {
                return Err(invalid(format!(
                    "row {k}: value {} outside {}",
                    row[i], vars[i].name
                )));
            }
        }
        if let Some((k, &p)) = weights.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
            return Err(Error::NegativeProbability {
                value: p,
                location: format!("row {k}"),
            });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("table weights sum to {sum}")));
        }
        Ok(Self::from_parts_sorted(vars, rows, weights))
    }

    /// Sorts, merges duplicates and drops zero weights. No validation.
    pub(crate) fn from_parts_sorted(vars: Vec<Var>, rows: Vec<u16>, weights: Vec<f64>) -> Self {
        let w = vars.len();
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_unstable_by(|&i, &j| rows[i * w..(i + 1) * w].cmp(&rows[j * w..(j + 1) * w]));
        let mut out_rows: Vec<u16> = Vec::with_capacity(rows.len());
        let mut out_w: Vec<f64> = Vec::with_capacity(weights.len());
        for i in order {
            let r = &rows[i * w..(i + 1) * w];
            let same_as_last = !out_w.is_empty() && &out_rows[out_rows.len() - w..] == r;
            if same_as_last {
                *out_w.last_mut().expect("non-empty") += weights[i];
            } else {
                out_rows.extend_from_slice(r);
                out_w.push(weights[i]);
            }
        }
        let mut rows = Vec::with_capacity(out_rows.len());
        let mut weights = Vec::with_capacity(out_w.len());
        for (r, &p) in out_rows.chunks(w).zip(&out_w) {
            if p > 0.0 {
                rows.extend_from_slice(r);
                weights.push(p);
            }
        }
        JointTable {
            vars,
            rows,
            weights,
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    /// Number of stored (positive-weight) assignments.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn row(&self, k: usize) -> &[u16] {
        &self.rows[k * self.width()..(k + 1) * self.width()]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u16], f64)> + '_ {
        self.rows
            .chunks(self.width())
            .zip(self.weights.iter().copied())
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| invalid(format!("no variable named {name}")))
    }

    pub fn columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.var_index(n.as_ref())).collect()
    }

    /// Weight of one full assignment (zero when absent).
    pub fn get(&self, assignment: &[u16]) -> f64 {
        let w = self.width();
        if assignment.len() != w {
            return 0.0;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.rows[mid * w..(mid + 1) * w].cmp(assignment) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return self.weights[mid],
            }
        }
        0.0
    }

    pub fn probability(&self, pred: impl Fn(&[u16]) -> bool) -> f64 {
        self.iter().filter(|(r, _)| pred(r)).map(|(_, p)| p).sum()
    }

    /// Restricts to the event and renormalizes; returns the event probability.
    pub fn condition(&self, pred: impl Fn(&[u16]) -> bool) -> Result<(JointTable, f64)> {
        let p = self.probability(&pred);
        if p < NULL_EVENT {
            return Err(Error::NullEvent(p));
        }
        let mut rows = Vec::new();
        let mut weights = Vec::new();
        for (r, w) in self.iter() {
            if pred(r) {
                rows.extend_from_slice(r);
                weights.push(w / p);
            }
        }
        Ok((
            JointTable {
                vars: self.vars.clone(),
                rows,
                weights,
            },
            p,
        ))
    }

    /// Marginal on the given columns, in the given order.
    pub fn marginal_cols(&self, cols: &[usize]) -> JointTable {
        let vars = cols.iter().map(|&c| self.vars[c].clone()).collect();
        let mut rows = Vec::with_capacity(self.len() * cols.len());
        for r in self.rows.chunks(self.width()) {
            rows.extend(cols.iter().map(|&c| r[c]));
        }
        Self::from_parts_sorted(vars, rows, self.weights.clone())
    }

    pub fn marginal<S: AsRef<str>>(&self, names: &[S]) -> Result<JointTable> {
        Ok(self.marginal_cols(&self.columns(names)?))
    }

    /// Probabilities grouped by the projection onto `cols`.
    pub fn grouped(&self, cols: &[usize]) -> BTreeMap<Vec<u16>, f64> {
        let mut out: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
        for (r, p) in self.iter() {
            *out.entry(cols.iter().map(|&c| r[c]).collect()).or_default() += p;
        }
        out
    }

    /// `(1/2) sum |p - q|` over the union of supports; schemas must agree.
    pub fn tv_distance(&self, other: &JointTable) -> Result<f64> {
        if self.vars != other.vars {
            return Err(dim_err("tables have different schemas"));
        }
        let w = self.width();
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.len() || j < other.len() {
            let ord = match (i < self.len(), j < other.len()) {
                (true, true) => self.rows[i * w..(i + 1) * w].cmp(&other.rows[j * w..(j + 1) * w]),
                (true, false) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    acc += self.weights[i];
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    acc += other.weights[j];
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    acc += (self.weights[i] - other.weights[j]).abs();
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(0.5 * acc)
    }

    /// Largest absolute difference between matching assignments.
    pub fn max_abs_difference(&self, other: &JointTable) -> Result<f64> {
        if self.vars != other.vars {
            return Err(dim_err("tables have different schemas"));
        }
        let mut worst: f64 = 0.0;
        for (r, p) in self.iter() {
            worst = worst.max((p - other.get(r)).abs());
        }
        for (r, q) in other.iter() {
            worst = worst.max((q - self.get(r)).abs());
        }
        Ok(worst)
    }

    /// Shannon entropy (bits) of the marginal on `names`.
    pub fn entropy<S: AsRef<str>>(&self, names: &[S]) -> Result<f64> {
        let cols = self.columns(names)?;
        let probs: Vec<f64> = self.grouped(&cols).into_values().collect();
        Ok(shannon_entropy(&probs))
    }

    /// `I(A; B | C) = H(AC) + H(BC) - H(ABC) - H(C)`.
    pub fn conditional_mutual_information<A, B, C>(&self, a: &[A], b: &[B], c: &[C]) -> Result<f64>
    where
        A: AsRef<str>,
        B: AsRef<str>,
        C: AsRef<str>,
    {
        let a: Vec<&str> = a.iter().map(|s| s.as_ref()).collect();
        let b: Vec<&str> = b.iter().map(|s| s.as_ref()).collect();
        let c: Vec<&str> = c.iter().map(|s| s.as_ref()).collect();
        let join = |parts: &[&[&str]]| -> Vec<String> {
            parts
                .iter()
                .flat_map(|p| p.iter().map(|s| s.to_string()))
                .collect()
        };
        let hac = self.entropy(&join(&[&a, &c]))?;
        let hbc = self.entropy(&join(&[&b, &c]))?;
        let habc = self.entropy(&join(&[&a, &b, &c]))?;
        let hc = self.entropy(&join(&[&c]))?;
        Ok(hac + hbc - habc - hc)
    }

    pub fn mutual_information<A: AsRef<str>, B: AsRef<str>>(
        &self,
        a: &[A],
        b: &[B],
    ) -> Result<f64> {
        self.conditional_mutual_information::<A, B, &str>(a, b, &[])
    }

    /// Applies a value permutation to one variable (`perm[old] = new`).
    pub fn relabel(&self, name: &str, perm: &[u16]) -> Result<JointTable> {
        let c = self.var_index(name)?;
        if perm.len() != self.vars[c].card {
            return Err(dim_err(
                "permutation length differs from the variable cardinality",
            ));
        }
        let mut rows = self.rows.clone();
        let w = self.width();
        for r in rows.chunks_mut(w) {
            r[c] = perm[r[c] as usize];
        }
        Ok(Self::from_parts_sorted(
            self.vars.clone(),
            rows,
            self.weights.clone(),
        ))
    }

    /// Appends variables whose values are expanded row by row. `expand` returns
    /// the extra values with a weight multiplier for each extension of a row.
    pub(crate) fn extend_with(
        &self,
        extra: Vec<Var>,
        expand: impl Fn(&[u16]) -> Vec<(Vec<u16>, f64)>,
    ) -> JointTable {
        let mut vars = self.vars.clone();
        vars.extend(extra);
        let mut rows = Vec::new();
        let mut weights = Vec::new();
        for (r, p) in self.iter() {
            for (vals, m) in expand(r) {
                rows.extend_from_slice(r);
                rows.extend(vals);
                weights.push(p * m);
            }
        }
        Self::from_parts_sorted(vars, rows, weights)
    }
}

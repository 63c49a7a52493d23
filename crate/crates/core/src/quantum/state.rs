use serde::{Deserialize, Serialize};

use super::linalg::{
    self, c, eigvalsh, hermitian_defect_ok, kron, outer, partial_trace, trace, CMat, CVec, Side,
};
use crate::error::{dim_err, invalid, Result};

/// Positive semidefinite, unit-trace, Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), positivity (eigenvalues >= -1e-10) and trace (1e-10).
    /// The stored matrix is the Hermitian part of the input.
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(dim_err("density matrix must be square and non-empty"));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid("density matrix has non-finite entries"));
        }
        if !hermitian_defect_ok(&matrix, 1e-10) {
            return Err(invalid("density matrix is not Hermitian"));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(invalid(format!("density matrix trace {} != 1", tr.re)));
        }
        let min = eigvalsh(&matrix)[0];
        if min < -1e-10 {
            return Err(invalid(format!("density matrix has eigenvalue {min}")));
        }
        Ok(DensityMatrix {
            matrix: linalg::hermitian_part(&matrix),
        })
    }

    /// Normalizes `m` by its trace before validating.
    pub fn normalized(m: CMat) -> Result<Self> {
        let tr = trace(&m).re;
        if !(tr > 0.0) {
            return Err(invalid("cannot normalize a matrix with non-positive trace"));
        }
        Self::new(m.unscale(tr))
    }

    pub fn pure(v: &CVec) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(invalid("zero vector"));
        }
        Self::new(outer(&v.unscale(norm)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: linalg::identity(dim).unscale(dim as f64),
        }
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        let n = p.len();
        Self::new(CMat::from_fn(n, n, |i, j| {
            if i == j {
                c(p[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    pub fn partial_trace(&self, dim_a: usize, dim_b: usize, keep: Side) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            matrix: partial_trace(&self.matrix, dim_a, dim_b, keep)?,
        })
    }

    /// `w * self + (1 - w) * other`
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(dim_err("mixing states of different dimension"));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(invalid("mixing weight outside [0, 1]"));
        }
        Ok(DensityMatrix {
            matrix: self.matrix.scale(w) + other.matrix.scale(1.0 - w),
        })
    }

    /// True when the state has rank one (largest eigenvalue within 1e-10 of 1).
    pub fn is_pure(&self) -> bool {
        self.eigenvalues()
            .last()
            .is_some_and(|&l| (l - 1.0).abs() < 1e-10)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVec,
}

impl BipartitePureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: CVec) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || amplitudes.len() != dim_a * dim_b {
            return Err(dim_err(format!(
                "{} amplitudes for a {dim_a}x{dim_b} system",
                amplitudes.len()
            )));
        }
        let n2 = amplitudes.norm_squared();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("state has squared norm {n2}")));
        }
        Ok(BipartitePureState {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// `(|00> + |11>)/sqrt(2)`
    pub fn epr() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        BipartitePureState {
            dim_a: 2,
            dim_b: 2,
            amplitudes: CVec::from_vec(vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: outer(&self.amplitudes),
        }
    }

    pub fn reduced(&self, keep: Side) -> DensityMatrix {
        self.density()
            .partial_trace(self.dim_a, self.dim_b, keep)
            .expect("dimensions are consistent by construction")
    }
}

/// Classical-quantum state `sum_x w_x |x><x| (x) rho_x`, labels are tuples of
/// classical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCqState", into = "RawCqState")]
pub struct CqState {
    labels: Vec<Vec<usize>>,
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawCqState {
    pub labels: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
    pub conditional_states: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TryFrom<RawCqState> for CqState {
    type Error = crate::Error;
    fn try_from(raw: RawCqState) -> Result<Self> {
        let states = raw
            .conditional_states
            .iter()
            .map(|rows| DensityMatrix::new(linalg::from_rows(rows)?))
            .collect::<Result<Vec<_>>>()?;
        CqState::new(raw.labels, raw.weights, states)
    }
}

impl From<CqState> for RawCqState {
    fn from(s: CqState) -> Self {
        RawCqState {
            conditional_states: s
                .states
                .iter()
                .map(|d| linalg::to_rows(d.matrix()))
                .collect(),
            labels: s.labels,
            weights: s.weights,
        }
    }
}

impl CqState {
    pub fn new(
        labels: Vec<Vec<usize>>,
        weights: Vec<f64>,
        states: Vec<DensityMatrix>,
    ) -> Result<Self> {
        if labels.is_empty() || labels.len() != weights.len() || labels.len() != states.len() {
            return Err(dim_err(
                "labels, weights and conditional states must have equal non-zero length",
            ));
        }
        let width = labels[0].len();
        if labels.iter().any(|l| l.len() != width) {
            return Err(dim_err("labels must all have the same arity"));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(invalid("duplicate cq-state label"));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(dim_err("conditional states must share a dimension"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(invalid(format!("cq-state weight {w} is negative")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("cq-state weights sum to {sum}")));
        }
        Ok(CqState {
            labels,
            weights,
            states,
        })
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Number of classical coordinates per label.
    pub fn arity(&self) -> usize {
        self.labels[0].len()
    }

    pub fn quantum_dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn weight_of(&self, label: &[usize]) -> f64 {
        self.labels
            .iter()
            .position(|l| l == label)
            .map_or(0.0, |i| self.weights[i])
    }

    /// Block-diagonal density matrix over `ordered_labels` (x) quantum register.
    /// Labels absent from `self` get zero blocks.
    pub fn block_matrix(&self, ordered_labels: &[Vec<usize>]) -> CMat {
        let d = self.quantum_dim();
        let mut m = CMat::zeros(ordered_labels.len() * d, ordered_labels.len() * d);
        for (k, lab) in ordered_labels.iter().enumerate() {
            if let Some(i) = self.labels.iter().position(|l| l == lab) {
                let block = self.states[i].matrix().scale(self.weights[i]);
                m.view_mut((k * d, k * d), (d, d)).copy_from(&block);
            }
        }
        m
    }

    /// Marginal cq-state on the listed classical coordinates.
    pub fn marginal(&self, coords: &[usize]) -> Result<CqState> {
        if coords.iter().any(|&i| i >= self.arity()) {
            return Err(dim_err("coordinate out of range"));
        }
        let mut labels: Vec<Vec<usize>> = Vec::new();
        let mut acc: Vec<(f64, CMat)> = Vec::new();
        for (i, lab) in self.labels.iter().enumerate() {
            let key: Vec<usize> = coords.iter().map(|&k| lab[k]).collect();
            let slot = match labels.iter().position(|l| *l == key) {
                Some(s) => s,
                None => {
                    labels.push(key);
                    acc.push((0.0, CMat::zeros(self.quantum_dim(), self.quantum_dim())));
                    labels.len() - 1
                }
            };
            acc[slot].0 += self.weights[i];
            acc[slot].1 += self.states[i].matrix().scale(self.weights[i]);
        }
        let mut weights = Vec::with_capacity(labels.len());
        let mut states = Vec::with_capacity(labels.len());
        for (w, m) in acc {
            weights.push(w);
            states.push(if w > 0.0 {
                DensityMatrix {
                    matrix: m.unscale(w),
                }
            } else {
                DensityMatrix::maximally_mixed(self.quantum_dim())
            });
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        CqState::new(labels, weights, states)
    }

    /// Average quantum state `sum_x w_x rho_x`.
    pub fn quantum_marginal(&self) -> DensityMatrix {
        let mut m = CMat::zeros(self.quantum_dim(), self.quantum_dim());
        for (w, s) in self.weights.iter().zip(&self.states) {
            m += s.matrix().scale(*w);
        }
        DensityMatrix { matrix: m }
    }
}

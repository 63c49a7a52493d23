//! Quantum strategies, the behaviors they induce, and noise.
//!
//! Strategies store POVM elements `E_x(a)` directly. A strategy written with
//! operators whose squares sum to the identity maps to `E_x(a) = A_x(a)^2`.

mod seesaw;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, invalid, Result};
use crate::games::{decode_vector, Game};
use crate::quantum::linalg::{self, c, eigvalsh, identity, kron, trace_product, CMat, CVec};
use crate::quantum::random::{gaussian_matrix, random_density};
use crate::quantum::{BipartitePureState, DensityMatrix, Side};

pub use seesaw::{seesaw_from, seesaw_optimize, SeesawResult, SEESAW_MAX_ITERS, SEESAW_TOL};

const POVM_PSD_TOL: f64 = 1e-10;
const POVM_SUM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStrategy", into = "RawStrategy")]
pub struct QuantumStrategy {
    dim_a: usize,
    dim_b: usize,
    state: DensityMatrix,
    a_measurements: Vec<Vec<CMat>>,
    b_measurements: Vec<Vec<CMat>>,
}

type Rows = Vec<Vec<[f64; 2]>>;

/// Strategy JSON: matrices are row-major arrays of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawStrategy {
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: Rows,
    pub a_measurements: Vec<Vec<Rows>>,
    pub b_measurements: Vec<Vec<Rows>>,
}

impl TryFrom<RawStrategy> for QuantumStrategy {
    type Error = crate::Error;
    fn try_from(raw: RawStrategy) -> Result<Self> {
        let conv = |fam: &[Vec<Rows>]| -> Result<Vec<Vec<CMat>>> {
            fam.iter()
                .map(|povm| povm.iter().map(|m| linalg::from_rows(m)).collect())
                .collect()
        };
        let state = DensityMatrix::new(linalg::from_rows(&raw.state)?)?;
        QuantumStrategy::new(
            raw.dim_a,
            raw.dim_b,
            state,
            conv(&raw.a_measurements)?,
            conv(&raw.b_measurements)?,
        )
    }
}

impl From<QuantumStrategy> for RawStrategy {
    fn from(s: QuantumStrategy) -> Self {
        let conv = |fam: &[Vec<CMat>]| -> Vec<Vec<Rows>> {
            fam.iter()
                .map(|povm| povm.iter().map(linalg::to_rows).collect())
                .collect()
        };
        RawStrategy {
            dim_a: s.dim_a,
            dim_b: s.dim_b,
            state: linalg::to_rows(s.state.matrix()),
            a_measurements: conv(&s.a_measurements),
            b_measurements: conv(&s.b_measurements),
        }
    }
}

fn check_povm(elements: &[CMat], dim: usize, what: &str) -> Result<()> {
    if elements.is_empty() {
        return Err(invalid(format!("{what}: empty POVM")));
    }
    let mut sum = CMat::zeros(dim, dim);
    for (k, e) in elements.iter().enumerate() {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(dim_err(format!("{what}: element {k} is not {dim}x{dim}")));
        }
        if !linalg::hermitian_defect_ok(e, POVM_PSD_TOL) {
            return Err(invalid(format!("{what}: element {k} is not Hermitian")));
        }
        if eigvalsh(e)[0] < -POVM_PSD_TOL {
            return Err(invalid(format!(
                "{what}: element {k} is not positive semidefinite"
            )));
        }
        sum += e;
    }
    let defect = (sum - identity(dim))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > POVM_SUM_TOL {
        return Err(invalid(format!(
            "{what}: elements sum to identity only within {defect:e}"
        )));
    }
    Ok(())
}

impl QuantumStrategy {
    pub fn new(
        dim_a: usize,
        dim_b: usize,
        state: DensityMatrix,
        a_measurements: Vec<Vec<CMat>>,
        b_measurements: Vec<Vec<CMat>>,
    ) -> Result<Self> {
        if state.dim() != dim_a * dim_b {
            return Err(dim_err(format!(
                "state has dimension {}, expected {dim_a}*{dim_b}",
                state.dim()
            )));
        }
        if a_measurements.is_empty() || b_measurements.is_empty() {
            return Err(invalid("each player needs at least one measurement"));
        }
        for (x, povm) in a_measurements.iter().enumerate() {
            check_povm(povm, dim_a, &format!("a_measurements[{x}]"))?;
        }
        for (y, povm) in b_measurements.iter().enumerate() {
            check_povm(povm, dim_b, &format!("b_measurements[{y}]"))?;
        }
        let na = a_measurements[0].len();
        let nb = b_measurements[0].len();
        if a_measurements.iter().any(|p| p.len() != na)
            || b_measurements.iter().any(|p| p.len() != nb)
        {
            return Err(dim_err(
                "every question must have the same number of outcomes",
            ));
        }
        Ok(QuantumStrategy {
            dim_a,
            dim_b,
            state,
            a_measurements,
            b_measurements,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn a_measurements(&self) -> &[Vec<CMat>] {
        &self.a_measurements
    }

    pub fn b_measurements(&self) -> &[Vec<CMat>] {
        &self.b_measurements
    }

    /// `(|X|, |Y|, |A|, |B|)` as seen by the measurement families.
    pub fn alphabet_sizes(&self) -> (usize, usize, usize, usize) {
        (
            self.a_measurements.len(),
            self.b_measurements.len(),
            self.a_measurements[0].len(),
            self.b_measurements[0].len(),
        )
    }

    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        if state.dim() != self.state.dim() {
            return Err(dim_err("replacement state has a different dimension"));
        }
        Ok(QuantumStrategy {
            state,
            ..self.clone()
        })
    }

    /// Entanglement entropy of the shared state when it is pure.
    pub fn pure_state_entanglement(&self) -> Option<f64> {
        if !self.state.is_pure() {
            return None;
        }
        Some(crate::quantum::von_neumann_entropy(
            &self
                .state
                .partial_trace(self.dim_a, self.dim_b, Side::B)
                .ok()?,
        ))
    }

    /// A deterministic classical strategy embedded with one-dimensional registers.
    pub fn deterministic(f: &[usize], h: &[usize], na: usize, nb: usize) -> Result<Self> {
        if f.iter().any(|&a| a >= na) || h.iter().any(|&b| b >= nb) {
            return Err(invalid("deterministic answer outside its alphabet"));
        }
        let one = |on: bool| CMat::from_element(1, 1, c(if on { 1.0 } else { 0.0 }, 0.0));
        let a = f
            .iter()
            .map(|&fa| (0..na).map(|a| one(a == fa)).collect())
            .collect();
        let b = h
            .iter()
            .map(|&hb| (0..nb).map(|b| one(b == hb)).collect())
            .collect();
        QuantumStrategy::new(1, 1, DensityMatrix::maximally_mixed(1), a, b)
    }
}

/// Conditional distribution `P(a, b | x, y)`, stored flat in `[x][y][a][b]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBehavior", into = "RawBehavior")]
pub struct Behavior {
    dims: (usize, usize, usize, usize),
    table: Vec<f64>,
}

/// Behavior JSON. For n-round behaviors over vector alphabets the index of a
/// vector `(v_0, .., v_{n-1})` over an alphabet of size `k` is
/// `sum_i v_i k^(n-1-i)` (round 0 most significant).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawBehavior {
    pub table: Vec<Vec<Vec<Vec<f64>>>>,
}

impl TryFrom<RawBehavior> for Behavior {
    type Error = crate::Error;
    fn try_from(raw: RawBehavior) -> Result<Self> {
        let nx = raw.table.len();
        let ny = raw.table.first().map_or(0, |r| r.len());
        let na = raw
            .table
            .first()
            .and_then(|r| r.first())
            .map_or(0, |r| r.len());
        let nb = raw
            .table
            .first()
            .and_then(|r| r.first())
            .and_then(|r| r.first())
            .map_or(0, |r| r.len());
        let mut flat = Vec::with_capacity(nx * ny * na * nb);
        for px in &raw.table {
            if px.len() != ny {
                return Err(dim_err("ragged behavior table"));
            }
            for pxy in px {
                if pxy.len() != na || pxy.iter().any(|r| r.len() != nb) {
                    return Err(dim_err("ragged behavior table"));
                }
                flat.extend(pxy.iter().flatten());
            }
        }
        Behavior::new((nx, ny, na, nb), flat)
    }
}

impl From<Behavior> for RawBehavior {
    fn from(b: Behavior) -> Self {
        let (nx, ny, na, nb) = b.dims;
        RawBehavior {
            table: (0..nx)
                .map(|x| {
                    (0..ny)
                        .map(|y| {
                            (0..na)
                                .map(|a| (0..nb).map(|bb| b.prob(x, y, a, bb)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl Behavior {
    /// Validates non-negativity (-1e-12), normalization (1e-9) and no-signaling (1e-8).
    pub fn new(dims: (usize, usize, usize, usize), table: Vec<f64>) -> Result<Self> {
        let (nx, ny, na, nb) = dims;
        if nx * ny * na * nb == 0 || table.len() != nx * ny * na * nb {
            return Err(dim_err("behavior table size does not match its dimensions"));
        }
        let b = Behavior { dims, table };
        b.validate()?;
        Ok(b)
    }

    fn validate(&self) -> Result<()> {
        let (nx, ny, na, nb) = self.dims;
        if let Some(p) = self.table.iter().find(|p| !(**p >= -1e-12)) {
            return Err(invalid(format!("behavior entry {p} is negative")));
        }
        for x in 0..nx {
            for y in 0..ny {
                let s: f64 = (0..na)
                    .flat_map(|a| (0..nb).map(move |b| (a, b)))
                    .map(|(a, b)| self.prob(x, y, a, b))
                    .sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("P(.,.|{x},{y}) sums to {s}")));
                }
            }
        }
        if self.signaling() > 1e-8 {
            return Err(invalid(format!(
                "behavior is signaling by {:e}",
                self.signaling()
            )));
        }
        Ok(())
    }

    pub fn from_fn(
        dims: (usize, usize, usize, usize),
        p: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let (nx, ny, na, nb) = dims;
        let mut table = Vec::with_capacity(nx * ny * na * nb);
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..na {
                    for b in 0..nb {
                        table.push(p(x, y, a, b));
                    }
                }
            }
        }
        Behavior::new(dims, table)
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        self.dims
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        let (_, ny, na, nb) = self.dims;
        self.table[((x * ny + y) * na + a) * nb + b]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn marginal_a(&self, x: usize, y: usize, a: usize) -> f64 {
        (0..self.dims.3).map(|b| self.prob(x, y, a, b)).sum()
    }

    pub fn marginal_b(&self, x: usize, y: usize, b: usize) -> f64 {
        (0..self.dims.2).map(|a| self.prob(x, y, a, b)).sum()
    }

    /// Largest violation of no-signaling in either direction.
    pub fn signaling(&self) -> f64 {
        let (nx, ny, na, nb) = self.dims;
        let mut worst: f64 = 0.0;
        for x in 0..nx {
            for a in 0..na {
                for y in 1..ny {
                    worst = worst.max((self.marginal_a(x, y, a) - self.marginal_a(x, 0, a)).abs());
                }
            }
        }
        for y in 0..ny {
            for b in 0..nb {
                for x in 1..nx {
                    worst = worst.max((self.marginal_b(x, y, b) - self.marginal_b(0, y, b)).abs());
                }
            }
        }
        worst
    }
}

fn check_game(strategy_sizes: (usize, usize, usize, usize), game: &Game) -> Result<()> {
    if strategy_sizes != game.dims() {
        return Err(dim_err(format!(
            "strategy alphabets {:?} do not match game alphabets {:?}",
            strategy_sizes,
            game.dims()
        )));
    }
    Ok(())
}

/// `P(a, b | x, y) = Tr((E_x(a) (x) F_y(b)) rho)`.
pub fn behavior_of(strategy: &QuantumStrategy, game: &Game) -> Result<Behavior> {
    check_game(strategy.alphabet_sizes(), game)?;
    behavior_of_strategy(strategy)
}

/// The behavior of a strategy without reference to a game.
pub fn behavior_of_strategy(s: &QuantumStrategy) -> Result<Behavior> {
    let (nx, ny, na, nb) = s.alphabet_sizes();
    let (da, db) = s.dims();
    // Bob's conditional operators Tr_A[(E_x(a) (x) I) rho], one per (x, a)
    let cond: Vec<CMat> = s
        .a_measurements
        .iter()
        .flat_map(|povm| povm.iter())
        .map(|e| {
            let lifted = kron(e, &identity(db)) * s.state.matrix();
            linalg::partial_trace(&lifted, da, db, Side::B).expect("consistent dims")
        })
        .collect();
    let mut table = Vec::with_capacity(nx * ny * na * nb);
    for x in 0..nx {
        for y in 0..ny {
            for a in 0..na {
                for b in 0..nb {
                    table.push(
                        trace_product(&s.b_measurements[y][b], &cond[x * na + a])
                            .re
                            .max(0.0),
                    );
                }
            }
        }
    }
    Behavior::new((nx, ny, na, nb), table)
}

pub fn win_probability(behavior: &Behavior, game: &Game) -> Result<f64> {
    check_game(behavior.dims(), game)?;
    let (nx, ny, na, nb) = game.dims();
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let mut inner = 0.0;
            for a in 0..na {
                for b in 0..nb {
                    if game.wins(x, y, a, b) {
                        inner += behavior.prob(x, y, a, b);
                    }
                }
            }
            total += game.mu(x, y) * inner;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    EprFidelityMix,
}

/// Both kinds act on the full bipartite space as `rho -> (1 - nu) rho + nu I / dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub kind: NoiseKind,
    pub nu: f64,
}

impl NoiseChannel {
    pub fn new(kind: NoiseKind, nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(invalid(format!("noise parameter {nu} not in [0, 1]")));
        }
        Ok(NoiseChannel { kind, nu })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        rho.mix(&DensityMatrix::maximally_mixed(rho.dim()), 1.0 - self.nu)
            .expect("same dimension and weight in [0, 1]")
    }
}

pub fn apply_noise(strategy: &QuantumStrategy, channel: &NoiseChannel) -> Result<QuantumStrategy> {
    NoiseChannel::new(channel.kind, channel.nu)?;
    strategy.with_state(channel.apply(strategy.state()))
}

/// Rank-one projectors onto `cos t |0> + sin t |1>` (outcome 0) and its complement (outcome 1).
pub fn real_qubit_measurement(theta: f64) -> Vec<CMat> {
    let v = CVec::from_vec(vec![c(theta.cos(), 0.0), c(theta.sin(), 0.0)]);
    let p0 = linalg::outer(&v);
    let p1 = identity(2) - &p0;
    vec![p0, p1]
}

/// EPR pair with Alice at angles 0, pi/4 and Bob at pi/8, -pi/8; wins CHSH with
/// probability cos^2(pi/8).
pub fn canonical_chsh_strategy() -> QuantumStrategy {
    QuantumStrategy::new(
        2,
        2,
        BipartitePureState::epr().density(),
        vec![
            real_qubit_measurement(0.0),
            real_qubit_measurement(PI / 4.0),
        ],
        vec![
            real_qubit_measurement(PI / 8.0),
            real_qubit_measurement(-PI / 8.0),
        ],
    )
    .expect("canonical strategy is valid")
}

/// An n-round strategy for the n-fold CHSH questions sharing a single EPR pair.
/// Each player measures at the canonical CHSH angle for its round-0 question and
/// repeats that outcome bit as the answer in every round. Questions and answers
/// are vector indices (round 0 most significant).
pub fn correlated_epr_strategy(n: usize) -> Result<QuantumStrategy> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let k = 1usize << n;
    let all_ones = k - 1;
    let family = |angles: [f64; 2]| -> Vec<Vec<CMat>> {
        (0..k)
            .map(|q| {
                let first = decode_vector(q, 2, n)[0];
                let m = real_qubit_measurement(angles[first]);
                (0..k)
                    .map(|ans| match ans {
                        0 => m[0].clone(),
                        v if v == all_ones => m[1].clone(),
                        _ => CMat::zeros(2, 2),
                    })
                    .collect()
            })
            .collect()
    };
    QuantumStrategy::new(
        2,
        2,
        BipartitePureState::epr().density(),
        family([0.0, PI / 4.0]),
        family([PI / 8.0, -PI / 8.0]),
    )
}

/// `(E_1 .. E_k)` with `E_i = S^{-1/2} G_i S^{-1/2}`, `G_i` random PSD and `S = sum G_i`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<CMat> {
    let gs: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let g = gaussian_matrix(rng, dim, dim);
            &g * g.adjoint()
        })
        .collect();
    let sum = gs.iter().fold(CMat::zeros(dim, dim), |acc, g| acc + g);
    let inv_sqrt = linalg::hermitian_fn(&sum, |l| 1.0 / l.sqrt());
    gs.iter()
        .map(|g| linalg::hermitian_part(&(&inv_sqrt * g * &inv_sqrt)))
        .collect()
}

/// Random projective measurement: a random orthonormal basis with each vector
/// assigned to a uniformly random outcome.
pub fn random_projective<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<CMat> {
    let q = gaussian_matrix(rng, dim, dim).qr().q();
    let mut elems = vec![CMat::zeros(dim, dim); outcomes];
    for k in 0..dim {
        let col = q.column(k).into_owned();
        elems[rng.random_range(0..outcomes)] += linalg::outer(&col);
    }
    elems
}

/// Random strategy with mixed state of the given rank and random POVMs.
pub fn random_strategy<R: Rng + ?Sized>(
    rng: &mut R,
    dims: (usize, usize),
    sizes: (usize, usize, usize, usize),
    rank: usize,
) -> QuantumStrategy {
    let (da, db) = dims;
    let (nx, ny, na, nb) = sizes;
    let state = random_density(rng, da * db, rank);
    let a = (0..nx).map(|_| random_povm(rng, da, na)).collect();
    let b = (0..ny).map(|_| random_povm(rng, db, nb)).collect();
    QuantumStrategy::new(da, db, state, a, b).expect("random strategy is valid")
}

//! Alternating (seesaw) optimization of a quantum strategy. Produces lower
//! bounds on the quantum value; every step is a best response, so the value
//! sequence is non-decreasing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{random_projective, QuantumStrategy};
use crate::error::{invalid, Result};
use crate::games::Game;
use crate::quantum::linalg::{
    eigh, identity, kron, outer, partial_trace, trace_product, CMat, Side,
};
use crate::quantum::DensityMatrix;

pub const SEESAW_TOL: f64 = 1e-10;
pub const SEESAW_MAX_ITERS: usize = 500;

#[derive(Debug, Clone, Serialize)]
pub struct SeesawResult {
    #[serde(skip)]
    pub strategy: QuantumStrategy,
    pub value: f64,
    pub restart: usize,
    pub iterations: usize,
    /// Value after each full iteration of the winning restart.
    pub history: Vec<f64>,
}

/// `W = sum_{x,y} mu(x,y) sum_{V=1} A_x(a) (x) B_y(b)`
fn game_operator(game: &Game, a: &[Vec<CMat>], b: &[Vec<CMat>]) -> CMat {
    let (nx, ny, na, nb) = game.dims();
    let (da, db) = (a[0][0].nrows(), b[0][0].nrows());
    let mut w = CMat::zeros(da * db, da * db);
    for x in 0..nx {
        for y in 0..ny {
            let m = game.mu(x, y);
            if m == 0.0 {
                continue;
            }
            for aa in 0..na {
                let mut bsum = CMat::zeros(db, db);
                for bb in 0..nb {
                    if game.wins(x, y, aa, bb) {
                        bsum += &b[y][bb];
                    }
                }
                w += kron(&a[x][aa], &bsum).scale(m);
            }
        }
    }
    w
}

/// Top eigenvector of `W` as a pure state, with its eigenvalue.
fn best_state(w: &CMat) -> (DensityMatrix, f64) {
    let (vals, vecs) = eigh(w);
    let k = vals.len() - 1;
    let v = vecs.column(k).into_owned();
    (DensityMatrix::pure(&v).expect("unit eigenvector"), vals[k])
}

/// Best projective response for one question given reward operators `q[a]`:
/// sweeps over outcome pairs and, inside the range of `E_a + E_b`, hands the
/// non-negative eigenspace of `Q_a - Q_b` to `a` and the rest to `b`. For two
/// outcomes this is exactly the projector onto the non-negative eigenspace of
/// `Q_0 - Q_1`.
fn improve_povm(elems: &mut [CMat], q: &[CMat]) {
    let k = elems.len();
    let dim = elems[0].nrows();
    for a in 0..k {
        for b in (a + 1)..k {
            let f = &elems[a] + &elems[b];
            let (fv, fvecs) = eigh(&f);
            let range: Vec<usize> = (0..dim).filter(|&i| fv[i] > 0.5).collect();
            if range.is_empty() {
                continue;
            }
            let u = CMat::from_fn(dim, range.len(), |r, c| fvecs[(r, range[c])]);
            let d = u.adjoint() * (&q[a] - &q[b]) * &u;
            let (dv, dvecs) = eigh(&d);
            let mut ea = CMat::zeros(dim, dim);
            for (i, &l) in dv.iter().enumerate() {
                if l >= 0.0 {
                    let col = &u * dvecs.column(i);
                    ea += outer(&col);
                }
            }
            // F is a projector, so E_b = F - E_a is one as well
            let proj_f = &u * u.adjoint();
            elems[b] = &proj_f - &ea;
            elems[a] = ea;
        }
    }
}

fn update_alice(game: &Game, rho: &CMat, a: &mut [Vec<CMat>], b: &[Vec<CMat>]) {
    let (nx, ny, na, nb) = game.dims();
    let (da, db) = (a[0][0].nrows(), b[0][0].nrows());
    for x in 0..nx {
        let mut q = vec![CMat::zeros(da, da); na];
        for y in 0..ny {
            let m = game.mu(x, y);
            if m == 0.0 {
                continue;
            }
            for (aa, qa) in q.iter_mut().enumerate() {
                let mut bsum = CMat::zeros(db, db);
                for bb in 0..nb {
                    if game.wins(x, y, aa, bb) {
                        bsum += &b[y][bb];
                    }
                }
                let lifted = kron(&identity(da), &bsum) * rho;
                *qa += partial_trace(&lifted, da, db, Side::A)
                    .expect("dims")
                    .scale(m);
            }
        }
        improve_povm(&mut a[x], &q);
    }
}

fn update_bob(game: &Game, rho: &CMat, a: &[Vec<CMat>], b: &mut [Vec<CMat>]) {
    let (nx, ny, na, nb) = game.dims();
    let (da, db) = (a[0][0].nrows(), b[0][0].nrows());
    for y in 0..ny {
        let mut q = vec![CMat::zeros(db, db); nb];
        for x in 0..nx {
            let m = game.mu(x, y);
            if m == 0.0 {
                continue;
            }
            for (bb, qb) in q.iter_mut().enumerate() {
                let mut asum = CMat::zeros(da, da);
                for aa in 0..na {
                    if game.wins(x, y, aa, bb) {
                        asum += &a[x][aa];
                    }
                }
                let lifted = kron(&asum, &identity(db)) * rho;
                *qb += partial_trace(&lifted, da, db, Side::B)
                    .expect("dims")
                    .scale(m);
            }
        }
        improve_povm(&mut b[y], &q);
    }
}

fn value_of(game: &Game, rho: &CMat, a: &[Vec<CMat>], b: &[Vec<CMat>]) -> f64 {
    trace_product(&game_operator(game, a, b), rho).re
}

fn run(
    game: &Game,
    mut a: Vec<Vec<CMat>>,
    mut b: Vec<Vec<CMat>>,
    restart: usize,
) -> Result<SeesawResult> {
    let mut history = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let mut rho = best_state(&game_operator(game, &a, &b)).0;
    for _ in 0..SEESAW_MAX_ITERS {
        rho = best_state(&game_operator(game, &a, &b)).0;
        update_alice(game, rho.matrix(), &mut a, &b);
        update_bob(game, rho.matrix(), &a, &mut b);
        let v = value_of(game, rho.matrix(), &a, &b);
        history.push(v);
        if v - last < SEESAW_TOL {
            break;
        }
        last = v;
    }
    let da = a[0][0].nrows();
    let db = b[0][0].nrows();
    let value = *history.last().expect("at least one iteration");
    let strategy = QuantumStrategy::new(da, db, rho, a, b)?;
    Ok(SeesawResult {
        strategy,
        value: value.min(1.0),
        restart,
        iterations: history.len(),
        history,
    })
}

/// Best value over `restarts` random projective initializations. Restart `r`
/// draws its initial measurements from ChaCha8 seeded with `seed` on stream `r`.
pub fn seesaw_optimize(
    game: &Game,
    dim: usize,
    restarts: usize,
    seed: u64,
) -> Result<SeesawResult> {
    if dim == 0 || restarts == 0 {
        return Err(invalid("seesaw needs dim >= 1 and restarts >= 1"));
    }
    let (nx, ny, na, nb) = game.dims();
    let results: Vec<SeesawResult> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let a = (0..nx)
                .map(|_| random_projective(&mut rng, dim, na))
                .collect();
            let b = (0..ny)
                .map(|_| random_projective(&mut rng, dim, nb))
                .collect();
            run(game, a, b, r)
        })
        .collect::<Result<_>>()?;
    let mut best = None::<SeesawResult>;
    for r in results {
        if best.as_ref().is_none_or(|b| r.value > b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Seesaw started from the measurements of `initial` (which must be projective
/// for the updates to keep the measurements projective).
pub fn seesaw_from(game: &Game, initial: &QuantumStrategy) -> Result<SeesawResult> {
    if initial.alphabet_sizes() != game.dims() {
        return Err(invalid(
            "initial strategy does not match the game alphabets",
        ));
    }
    run(
        game,
        initial.a_measurements().to_vec(),
        initial.b_measurements().to_vec(),
        0,
    )
}

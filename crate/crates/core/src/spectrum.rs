//! Lowest eigenpairs of an operator, matrix-free.
//!
//! Restarted Lanczos with full reorthogonalization: each cycle builds a
//! Krylov basis of at most `krylov_dim` vectors, takes the lowest Ritz pair
//! of the tridiagonal projection, and restarts from that Ritz vector until
//! the true residual `‖Hψ − Eψ‖` drops below the tolerance. Excited states
//! are found one at a time by deflating against the pairs already found.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::hamiltonian::OperatorTermList;
use crate::rng::RngStream;
use crate::state::StateVector;
use crate::C64;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 20_000;
const KRYLOV_DIM: usize = 100;

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub energy: f64,
    pub state: StateVector,
    /// `‖Hψ − Eψ‖` of the returned pair.
    pub residual: f64,
    /// Operator applications spent.
    pub iterations: usize,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn apply(h: &OperatorTermList, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    h.apply_accumulate(v, 1.0, &mut out);
    out
}

/// Classical Gram-Schmidt against `basis`, applied twice.
fn orthogonalize<'a>(w: &mut [C64], basis: impl Iterator<Item = &'a [C64]> + Clone) {
    for _ in 0..2 {
        for q in basis.clone() {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

fn residual_norm(h: &OperatorTermList, v: &[C64], energy: f64) -> f64 {
    let mut hv = apply(h, v);
    axpy(C64::new(-energy, 0.0), v, &mut hv);
    norm(&hv)
}

/// Lowest eigenpair of `h` restricted to the complement of `deflate`.
fn restarted_lanczos(
    h: &OperatorTermList,
    deflate: &[Vec<C64>],
    mut start: Vec<C64>,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<C64>, f64, usize)> {
    let dim = start.len();
    let krylov_dim = KRYLOV_DIM.min(dim - deflate.len()).max(1);
    let scale = h.norm_bound().max(1e-300);
    let mut iterations = 0usize;
    let mut best_residual = f64::INFINITY;

    orthogonalize(&mut start, deflate.iter().map(|v| v.as_slice()));
    let n0 = norm(&start);
    if n0 == 0.0 {
        return Err(Error::Config("start vector lies in the deflated space".into()));
    }
    start.iter_mut().for_each(|x| *x /= n0);

    loop {
        let mut basis: Vec<Vec<C64>> = vec![start];
        let mut alphas: Vec<f64> = Vec::with_capacity(krylov_dim);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov_dim);
        loop {
            let j = basis.len() - 1;
            let mut w = apply(h, &basis[j]);
            iterations += 1;
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            axpy(C64::new(-alpha, 0.0), &basis[j], &mut w);
            if j > 0 {
                axpy(C64::new(-betas[j - 1], 0.0), &basis[j - 1], &mut w);
            }
            orthogonalize(
                &mut w,
                deflate
                    .iter()
                    .map(|v| v.as_slice())
                    .chain(basis.iter().map(|v| v.as_slice())),
            );
            let beta = norm(&w);
            if beta <= 1e-12 * scale || alphas.len() >= krylov_dim || iterations >= max_iter {
                break;
            }
            w.iter_mut().for_each(|x| *x /= beta);
            betas.push(beta);
            basis.push(w);
        }

        let m = alphas.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (lowest, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| {
                if v < bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
        let y = eig.eigenvectors.column(lowest);
        let mut ritz = vec![C64::new(0.0, 0.0); dim];
        for (coef, v) in y.iter().zip(&basis) {
            axpy(C64::new(*coef, 0.0), v, &mut ritz);
        }
        orthogonalize(&mut ritz, deflate.iter().map(|v| v.as_slice()));
        let nr = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= nr);

        let h_ritz = apply(h, &ritz);
        iterations += 1;
        let energy = dot(&ritz, &h_ritz).re;
        let mut r = h_ritz;
        axpy(C64::new(-energy, 0.0), &ritz, &mut r);
        let residual = norm(&r);
        best_residual = best_residual.min(residual);
        if residual < tol {
            return Ok((energy, ritz, residual, iterations));
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: best_residual,
            });
        }
        start = ritz;
    }
}

fn random_start(dim: usize, rng: &mut RngStream) -> Vec<C64> {
    (0..dim)
        .map(|_| {
            let re = rng.standard_normal();
            let im = rng.standard_normal();
            C64::new(re, im)
        })
        .collect()
}

/// The `count` lowest eigenpairs in ascending energy order.
pub fn lowest_eigenpairs(
    h: &OperatorTermList,
    count: usize,
    tol: f64,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<Vec<EigenResult>> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let dim = 1usize << h.n_spins();
    if count == 0 || count > dim {
        return Err(Error::Config(format!(
            "cannot compute {count} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    let mut found: Vec<Vec<C64>> = Vec::with_capacity(count);
    let mut results = Vec::with_capacity(count);
    for _ in 0..count {
        let start = random_start(dim, rng);
        let (energy, vector, _, iterations) =
            restarted_lanczos(h, &found, start, tol, max_iter)?;
        // Certificate against the full operator, not the deflated one.
        let residual = residual_norm(h, &vector, energy);
        found.push(vector.clone());
        let mut state = StateVector::from_amplitudes(vector)?;
        state.canonicalize_phase();
        results.push(EigenResult {
            energy,
            state,
            residual,
            iterations,
        });
    }
    results.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(results)
}

pub fn ground_state(
    h: &OperatorTermList,
    tol: f64,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<EigenResult> {
    let mut pairs = lowest_eigenpairs(h, 1, tol, max_iter, rng)?;
    Ok(pairs.remove(0))
}

/// Ground state plus the gap to the first excited level.
#[derive(Debug, Clone)]
pub struct GroundStateReport {
    pub ground: EigenResult,
    pub first_excited: f64,
}

impl GroundStateReport {
    pub fn gap(&self) -> f64 {
        self.first_excited - self.ground.energy
    }
}

pub fn ground_state_with_gap(
    h: &OperatorTermList,
    tol: f64,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<GroundStateReport> {
    let mut pairs = lowest_eigenpairs(h, 2, tol, max_iter, rng)?;
    let excited = pairs.pop().expect("two pairs");
    let ground = pairs.pop().expect("two pairs");
    Ok(GroundStateReport {
        ground,
        first_excited: excited.energy,
    })
}

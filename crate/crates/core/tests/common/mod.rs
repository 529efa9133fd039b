//! Test-only references: dense Kronecker-product operators and full
//! diagonalization, built without the matrix-free kernel.

#![allow(dead_code)]

use chaincool::hamiltonian::{Axis, OperatorTermList};
use chaincool::{RngStream, StateVector, C64};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-site spin-1/2 matrix in (down, up) order, matching bit value 0/1.
pub fn site_matrix(axis: Axis) -> DMatrix<C64> {
    let z = c(0.0, 0.0);
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[z, c(0.5, 0.0), c(0.5, 0.0), z]),
        // σy in (up, down) order is [[0, -i], [i, 0]]; reversed order flips signs.
        Axis::Y => DMatrix::from_row_slice(2, 2, &[z, c(0.0, 0.5), c(0.0, -0.5), z]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[c(-0.5, 0.0), z, z, c(0.5, 0.0)]),
    }
}

/// Dense matrix of a term list via Kronecker products; site N-1 is the most
/// significant factor so that basis index bit m is spin m.
pub fn dense(op: &OperatorTermList) -> DMatrix<C64> {
    let n = op.n_spins();
    let dim = 1usize << n;
    let mut total = DMatrix::<C64>::zeros(dim, dim);
    for term in op.terms() {
        let mut m = DMatrix::<C64>::identity(1, 1);
        for site in (0..n).rev() {
            let factor = term
                .factors
                .iter()
                .find(|(s, _)| *s == site)
                .map(|&(_, a)| site_matrix(a))
                .unwrap_or_else(|| DMatrix::identity(2, 2));
            m = m.kronecker(&factor);
        }
        total += m * c(term.coefficient, 0.0);
    }
    total
}

pub fn to_dvector(psi: &StateVector) -> DVector<C64> {
    DVector::from_column_slice(psi.amplitudes())
}

/// Ascending eigenvalues of a dense Hermitian matrix.
pub fn dense_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Lowest eigenvector of a dense Hermitian matrix.
pub fn dense_ground(m: &DMatrix<C64>) -> (f64, StateVector) {
    let eig = SymmetricEigen::new(m.clone());
    let (i, e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &e)| (i, e))
        .unwrap();
    let v: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
    (e, StateVector::from_amplitudes(v).unwrap())
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    StateVector::random_infinite_temperature(n, &mut RngStream::new(seed)).unwrap()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Collects sub-check verdicts for one criterion, printing one line each,
/// and fails at the end if any failed.
pub struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    pub fn check(&mut self, what: &str, pass: bool, detail: String) {
        println!(
            "[{}] {} / {what}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            self.name
        );
        if !pass {
            self.failures.push(format!("{what}: {detail}"));
        }
    }

    /// Informational line that does not affect the verdict.
    pub fn note(&self, what: &str, detail: String) {
        println!("[INFO] {} / {what}: {detail}", self.name);
    }

    pub fn finish(self) {
        let ok = self.failures.is_empty();
        println!("[{}] {}", if ok { "PASS" } else { "FAIL" }, self.name);
        assert!(ok, "{} failed: {:?}", self.name, self.failures);
    }
}

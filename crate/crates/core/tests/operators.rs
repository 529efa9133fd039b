mod common;

use approx::assert_abs_diff_eq;
use chaincool::hamiltonian::{self, Couplings, DistanceRule, OperatorTermList};
use chaincool::{StateVector, C64};
use common::{dense, random_state};
use proptest::prelude::*;

fn model(n: usize, couplings: Couplings, kind: u8) -> OperatorTermList {
    match kind {
        0 => hamiltonian::short_range_chain(n, couplings, true).unwrap(),
        1 => hamiltonian::short_range_chain(n, couplings, false).unwrap(),
        2 => hamiltonian::long_range_chain(n, couplings, DistanceRule::Linear).unwrap(),
        _ => hamiltonian::long_range_chain(n, couplings, DistanceRule::Ring).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian(
        n in 2usize..=8,
        jx in -2.0f64..2.0, jy in -2.0f64..2.0, jz in -2.0f64..2.0, hy in -1.0f64..1.0,
        kind in 0u8..4,
        seed in 0u64..1000,
    ) {
        let h = model(n, Couplings { jx, jy, jz, hy }, kind);
        let a = random_state(n, seed);
        let b = random_state(n, seed + 1);
        let lhs = a.inner(&h.apply(&b, 1.0).unwrap()).unwrap();
        let rhs = b.inner(&h.apply(&a, 1.0).unwrap()).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
        let e = h.expectation_complex(&a).unwrap();
        prop_assert!(e.im.abs() < 1e-12);
    }

    #[test]
    fn exchange_without_transverse_field_conserves_mz(
        n in 2usize..=8,
        j in -2.0f64..2.0, jz in -2.0f64..2.0,
        kind in 0u8..4,
        index in 0usize..256,
    ) {
        let h = model(n, Couplings { jx: j, jy: j, jz, hy: 0.0 }, kind);
        let index = index % (1 << n);
        let out = h.apply(&StateVector::basis_index(n, index).unwrap(), 1.0).unwrap();
        let ones = index.count_ones();
        for (k, a) in out.amplitudes().iter().enumerate() {
            if a.norm() > 0.0 {
                prop_assert_eq!(k.count_ones(), ones);
            }
        }
    }
}

#[test]
fn norm_bound_dominates_spectrum() {
    for n in 2..=4 {
        let h = model(n, Couplings::default(), 3);
        let m = dense(&h);
        let radius = common::dense_eigenvalues(&m)
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()));
        assert!(h.norm_bound() >= radius - 1e-12);
    }
}

#[test]
fn scaling_and_sum_are_linear() {
    let n = 5;
    let h0 = model(n, Couplings::default(), 0);
    let hz = hamiltonian::zeeman(n).unwrap();
    let total = hz.sum_scaled(10.0, &h0).unwrap();
    let psi = random_state(n, 9);
    let lhs = total.apply(&psi, 1.0).unwrap();
    let a = hz.apply(&psi, 10.0).unwrap();
    let b = h0.apply(&psi, 1.0).unwrap();
    for ((l, x), y) in lhs.amplitudes().iter().zip(a.amplitudes()).zip(b.amplitudes()) {
        assert_abs_diff_eq!((l - (x + y)).norm(), 0.0, epsilon = 1e-13);
    }
    let mut acc = vec![C64::new(0.0, 0.0); psi.dim()];
    total.apply_accumulate(psi.amplitudes(), -2.0, &mut acc);
    for (x, l) in acc.iter().zip(lhs.amplitudes()) {
        assert_abs_diff_eq!((x + 2.0 * l).norm(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn long_range_decays_inversely_with_distance() {
    let n = 6;
    let c = Couplings { jx: 1.0, jy: 0.0, jz: 0.0, hy: 0.0 };
    let ring = hamiltonian::long_range_chain(n, c, DistanceRule::Ring).unwrap();
    let linear = hamiltonian::long_range_chain(n, c, DistanceRule::Linear).unwrap();
    let coef = |op: &OperatorTermList, i: usize, j: usize| -> f64 {
        op.terms()
            .iter()
            .filter(|t| t.factors.len() == 2 && t.factors.iter().any(|f| f.0 == i) && t.factors.iter().any(|f| f.0 == j))
            .map(|t| t.coefficient)
            .sum()
    };
    assert_abs_diff_eq!(coef(&linear, 0, 3), 1.0 / 3.0, epsilon = 1e-15);
    assert_abs_diff_eq!(coef(&ring, 0, 5), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(coef(&ring, 0, 4), 1.0 / 2.0, epsilon = 1e-15);
    assert_abs_diff_eq!(coef(&linear, 0, 5), 1.0 / 5.0, epsilon = 1e-15);
}

mod common;

use common::*;
use pathboltz::operators::{
    check_hermitian, check_unitary, frobenius_distance, matrix_exponential, matrix_from_csv_str,
    matrix_to_csv_string, ComplexMatrix, EvolutionParameter, HermitianOperator,
};
use proptest::prelude::*;

fn sigma_x() -> HermitianOperator<f64> {
    HermitianOperator::new(
        ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap(),
    )
    .unwrap()
}

#[test]
fn diagonal_thermal_exponential() {
    let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
    let e = matrix_exponential(&h, &EvolutionParameter::thermal(2f64.ln()).unwrap()).unwrap();
    let expected = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.5, 0.0)]);
    assert!(max_entry_diff(&e, &expected) < 1e-15);
}

#[test]
fn matches_taylor_series() {
    let mut rng = rng(1);
    let h = random_hermitian(&mut rng, 6);
    let beta = 0.37;
    let e = matrix_exponential(&h, &EvolutionParameter::thermal(beta).unwrap()).unwrap();
    let oracle = taylor_exp(h.matrix(), c(beta, 0.0), 40);
    assert!(max_entry_diff(&e, &oracle) <= 1e-10);
}

#[test]
fn real_time_matches_taylor_series() {
    let mut rng = rng(2);
    let h = random_hermitian(&mut rng, 5);
    let e = matrix_exponential(&h, &EvolutionParameter::real_time(0.8).unwrap()).unwrap();
    let oracle = taylor_exp(h.matrix(), c(0.0, 0.8), 40);
    assert!(max_entry_diff(&e, &oracle) <= 1e-10);
}

#[test]
fn unitarity_of_real_time_only() {
    let u = matrix_exponential(&sigma_x(), &EvolutionParameter::real_time(1.3).unwrap()).unwrap();
    assert!(check_unitary(&u, 1e-10).unwrap());
    let t = matrix_exponential(&sigma_x(), &EvolutionParameter::thermal(1.0).unwrap()).unwrap();
    // cosh/sinh matrix: T^dag T - I has entries cosh 2 - 1 and -sinh 2
    assert!((t[(0, 0)].re - 1f64.cosh()).abs() < 1e-14);
    assert!((t[(0, 1)].re + 1f64.sinh()).abs() < 1e-14);
    assert!(!check_unitary(&t, 1e-3).unwrap());
    assert!(check_unitary(&ComplexMatrix::<f64>::identity(3), 0.0).unwrap());
}

#[test]
fn hermitian_checks() {
    let nil = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(!check_hermitian(&nil, 1e-12).unwrap());
    assert!(check_hermitian(&ComplexMatrix::<f64>::identity(2), 1e-12).unwrap());
    assert!(check_hermitian(&ComplexMatrix::<f64>::zeros(2, 3), 1e-12).is_err());
}

#[test]
fn frobenius_examples() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    assert_eq!(frobenius_distance(&i2, &i2).unwrap(), 0.0);
    assert!((frobenius_distance(&i2, &ComplexMatrix::zeros(2, 2)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    let mut rng = rng(3);
    let (a, b) = (random_matrix(&mut rng, 3, 4), random_matrix(&mut rng, 3, 4));
    let direct: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    assert!((frobenius_distance(&a, &b).unwrap() - direct).abs() <= 1e-14);
    assert!(frobenius_distance(&a, &random_matrix(&mut rng, 4, 3)).is_err());
}

#[test]
fn semigroup_trace_and_wick_symmetry() {
    let mut rng = rng(4);
    for dim in [2, 5, 8] {
        let h = random_hermitian(&mut rng, dim);
        let b1 = EvolutionParameter::general(c(0.3, 0.4));
        let b2 = EvolutionParameter::general(c(0.5, -0.2));
        let lhs = matrix_exponential(&h, &b1)
            .unwrap()
            .matmul(&matrix_exponential(&h, &b2).unwrap())
            .unwrap();
        let rhs = matrix_exponential(&h, &EvolutionParameter::general(c(0.8, 0.2))).unwrap();
        assert!(max_entry_diff(&lhs, &rhs) <= 1e-10);

        let beta = EvolutionParameter::thermal(0.9).unwrap();
        let trace = matrix_exponential(&h, &beta).unwrap().trace().unwrap();
        let sum: f64 = h.eigenvalues().unwrap().iter().map(|l| (-0.9 * l).exp()).sum();
        assert!((trace - c(sum, 0.0)).norm() <= 1e-10);

        let e = matrix_exponential(&h, &b1).unwrap();
        let e_conj = matrix_exponential(&h, &b1.conj()).unwrap();
        assert!(max_entry_diff(&e.adjoint(), &e_conj) <= 1e-10);
    }
}

#[test]
fn zero_hamiltonian_gives_identity() {
    let h = HermitianOperator::new(ComplexMatrix::<f64>::zeros(2, 2)).unwrap();
    let e = matrix_exponential(&h, &EvolutionParameter::general(c(1.7, -3.0))).unwrap();
    assert_eq!(e, ComplexMatrix::identity(2));
}

proptest! {
    #[test]
    fn exponential_of_any_hermitian_is_finite_and_consistent(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = rng(seed);
        let h = random_hermitian(&mut rng, dim);
        let u = matrix_exponential(&h, &EvolutionParameter::real_time(0.6).unwrap()).unwrap();
        prop_assert!(check_unitary(&u, 1e-10).unwrap());
        let e = matrix_exponential(&h, &EvolutionParameter::thermal(0.6).unwrap()).unwrap();
        prop_assert!(check_hermitian(&e, 1e-12).unwrap());
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), rows in 1usize..5, cols in 1usize..5) {
        let mut rng = rng(seed);
        let m = random_matrix(&mut rng, rows, cols);
        let back = matrix_from_csv_str::<f64>(&matrix_to_csv_string(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}

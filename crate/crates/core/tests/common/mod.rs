#![allow(dead_code)]

use pathboltz::layered_network::{LayerSpec, LayeredNetwork};
use pathboltz::operators::{ComplexMatrix, HermitianOperator};
use pathboltz::path_integral::TransferChain;
use pathboltz::rbm::RbmParams;
use pathboltz::rng::{seeded, Rng};
use pathboltz::Cplx;
use rand::Rng as _;

pub fn rng(seed: u64) -> Rng {
    seeded(seed)
}

pub fn c(re: f64, im: f64) -> Cplx<f64> {
    Cplx::new(re, im)
}

pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut Rng, dim: usize) -> HermitianOperator<f64> {
    let a = random_matrix(rng, dim, dim);
    let h = a.add(&a.adjoint()).unwrap().scale(c(0.5, 0.0));
    HermitianOperator::new(h).unwrap()
}

/// Hermitian with the sparsity of a two-qubit nearest-neighbour
/// Hamiltonian: diagonal fields plus single- and double-flip couplings.
pub fn random_two_local(rng: &mut Rng) -> HermitianOperator<f64> {
    let mut m = ComplexMatrix::zeros(4, 4);
    let set = |m: &mut ComplexMatrix<f64>, r: usize, col: usize, v: Cplx<f64>| {
        m[(r, col)] = v;
        m[(col, r)] = v.conj();
    };
    for k in 0..4 {
        let v = rng.gen_range(-1.0..1.0);
        set(&mut m, k, k, c(v, 0.0));
    }
    for (r, col) in [(0, 1), (0, 2), (1, 3), (2, 3), (0, 3), (1, 2)] {
        let v = c(rng.gen_range(-1.0..1.0), 0.0);
        set(&mut m, r, col, v);
    }
    HermitianOperator::new(m).unwrap()
}

pub fn random_chain(rng: &mut Rng, d: usize, p: usize) -> TransferChain<f64> {
    TransferChain::new((0..p).map(|_| random_matrix(rng, d, d)).collect()).unwrap()
}

pub fn positive_chain(rng: &mut Rng, dims: &[usize]) -> TransferChain<f64> {
    let kernels = dims
        .windows(2)
        .map(|w| ComplexMatrix::from_fn(w[0], w[1], |_, _| c(rng.gen_range(0.05..1.0), 0.0)))
        .collect();
    TransferChain::new(kernels).unwrap()
}

pub fn random_rbm(rng: &mut Rng, n: usize, p: usize) -> RbmParams<f64> {
    let mut u = || rng.gen_range(-1.0..1.0);
    let a = (0..n).map(|_| u()).collect();
    let b = (0..p).map(|_| u()).collect();
    let w = (0..n).map(|_| (0..p).map(|_| u()).collect()).collect();
    RbmParams::new(a, b, w).unwrap()
}

pub fn random_network(rng: &mut Rng, dims: &[usize], complex: bool) -> LayeredNetwork<f64> {
    let layers = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let name = if i == 0 { "x".to_string() } else { format!("h{i}") };
            if i == 0 {
                LayerSpec::visible(name, d)
            } else {
                LayerSpec::hidden(name, d)
            }
        })
        .collect();
    let biases = dims.iter().map(|&d| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let weights = dims
        .windows(2)
        .map(|w| {
            ComplexMatrix::from_fn(w[0], w[1], |_, _| {
                let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
                c(rng.gen_range(-1.0..1.0), im)
            })
        })
        .collect();
    LayeredNetwork::new(layers, biases, weights, Vec::new()).unwrap()
}

pub fn max_entry_diff(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>) -> f64 {
    a.sub(b).unwrap().max_abs()
}

/// `sum_{k <= terms} (-z A)^k / k!`.
pub fn taylor_exp(a: &ComplexMatrix<f64>, z: Cplx<f64>, terms: usize) -> ComplexMatrix<f64> {
    let n = a.rows();
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=terms {
        term = term.matmul(a).unwrap().scale(-z / c(k as f64, 0.0));
        sum = sum.add(&term).unwrap();
    }
    sum
}

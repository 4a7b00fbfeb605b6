use super::activation::ActivationKind;
use super::network::LayeredNetwork;
use crate::entropy::{ProbabilityTable, Variable};
use crate::error::{Error, Result};
use crate::operators::{matrix_exponential, ComplexMatrix, EvolutionParameter, HermitianOperator};
use crate::path_integral::{TransferChain, ENUMERATION_BUDGET};
use crate::scalar::{Cplx, Real};

/// Block-tridiagonal Hamiltonian: concatenated biases on the diagonal,
/// weight block `(a, a+1)` above the diagonal and its adjoint below.
pub fn assemble_hamiltonian<T: Real>(net: &LayeredNetwork<T>) -> Result<HermitianOperator<T>> {
    if !net.is_two_local() {
        return Err(Error::KLocalUnsupported);
    }
    let n = net.total_dim();
    let offsets = net.offsets();
    let mut m = ComplexMatrix::zeros(n, n);
    for (a, bias) in net.biases().iter().enumerate() {
        for (i, &b) in bias.iter().enumerate() {
            m[(offsets[a] + i, offsets[a] + i)] = Cplx::new(b, T::zero());
        }
    }
    for (a, w) in net.weights().iter().enumerate() {
        let (r0, c0) = (offsets[a], offsets[a + 1]);
        for r in 0..w.rows() {
            for c in 0..w.cols() {
                m[(r0 + r, c0 + c)] = w[(r, c)];
                m[(c0 + c, r0 + r)] = w[(r, c)].conj();
            }
        }
    }
    HermitianOperator::new(m)
}

fn layer_labels<T: Real>(net: &LayeredNetwork<T>) -> Vec<String> {
    net.layers().iter().map(|l| l.name.clone()).collect()
}

/// Chain whose kernel `k` is the `(layer k, layer k+1)` block of
/// `exp(-delta_beta H)`.
pub fn slice_blocks<T: Real>(
    net: &LayeredNetwork<T>,
    delta_beta: &EvolutionParameter<T>,
) -> Result<TransferChain<T>> {
    if net.layers().len() < 2 {
        return Err(Error::InvalidNetwork("slicing needs at least two layers".into()));
    }
    let h = assemble_hamiltonian(net)?;
    let full = matrix_exponential(&h, delta_beta)?;
    let offsets = net.offsets();
    let dims = net.dims();
    let kernels = (0..dims.len() - 1)
        .map(|a| full.block(offsets[a], offsets[a + 1], dims[a], dims[a + 1]))
        .collect::<Result<Vec<_>>>()?;
    TransferChain::with_labels(kernels, layer_labels(net))
}

/// Like [`slice_blocks`] but every interior boundary resolves the identity
/// over the complete `D`-dimensional basis, so contracting the `L - 1`
/// kernels gives the `(first, last)` block of `exp(-(L-1) delta_beta H)`.
pub fn slice_complete<T: Real>(
    net: &LayeredNetwork<T>,
    delta_beta: &EvolutionParameter<T>,
) -> Result<TransferChain<T>> {
    let layers = net.layers().len();
    if layers < 2 {
        return Err(Error::InvalidNetwork("slicing needs at least two layers".into()));
    }
    let h = assemble_hamiltonian(net)?;
    let full = matrix_exponential(&h, delta_beta)?;
    let n = net.total_dim();
    let offsets = net.offsets();
    let dims = net.dims();
    let last = layers - 1;
    let kernels = (0..last)
        .map(|k| {
            let (r0, nr) = if k == 0 { (offsets[0], dims[0]) } else { (0, n) };
            let (c0, nc) = if k + 1 == last {
                (offsets[last], dims[last])
            } else {
                (0, n)
            };
            full.block(r0, c0, nr, nc)
        })
        .collect::<Result<Vec<_>>>()?;
    TransferChain::with_labels(kernels, layer_labels(net))
}

/// Feed-forward pass `h_{a+1} = f(W_{a,a+1}^T h_a + bias_{a+1})`.
pub fn forward_map<T: Real>(
    net: &LayeredNetwork<T>,
    activation: ActivationKind,
    input: &[T],
) -> Result<Vec<T>> {
    Ok(forward_trace(net, activation, input)?.activations.pop().unwrap())
}

/// Pre-activations and activations of every layer from one forward pass.
pub(crate) struct ForwardTrace<T> {
    /// `pre[a]` for layers `1..L`; index 0 is empty.
    pub pre: Vec<Vec<T>>,
    /// `activations[0]` is the input.
    pub activations: Vec<Vec<T>>,
}

pub(crate) fn forward_trace<T: Real>(
    net: &LayeredNetwork<T>,
    activation: ActivationKind,
    input: &[T],
) -> Result<ForwardTrace<T>> {
    let dims = net.dims();
    if input.len() != dims[0] {
        return Err(Error::DimensionMismatch {
            expected: dims[0],
            found: input.len(),
        });
    }
    net.require_real_weights()?;
    let mut pre = vec![Vec::new()];
    let mut activations = vec![input.to_vec()];
    for (a, w) in net.weights().iter().enumerate() {
        let h = &activations[a];
        let bias = &net.biases()[a + 1];
        let z: Vec<T> = (0..w.cols())
            .map(|c| {
                (0..w.rows()).fold(bias[c], |acc, r| acc + w[(r, c)].re * h[r])
            })
            .collect();
        activations.push(z.iter().map(|&v| activation.apply(v)).collect());
        pre.push(z);
    }
    Ok(ForwardTrace { pre, activations })
}

/// Share of a layer's bias carried by each incident kernel: the whole
/// bias at a terminal layer, half of it at an interior one.
fn bias_share<T: Real>(layers: usize, a: usize) -> T {
    if a == 0 || a == layers - 1 {
        T::one()
    } else {
        T::lit(0.5)
    }
}

/// Boltzmann kernels `K_a[mu, nu] = exp(-[s_a bias_a(mu) + W_a(mu, nu) + s_{a+1} bias_{a+1}(nu)])`
/// whose product along a path is `exp(-E(path))` with every bias counted once.
pub fn classical_chain<T: Real>(net: &LayeredNetwork<T>) -> Result<TransferChain<T>> {
    let layers = net.layers().len();
    if layers < 2 {
        return Err(Error::InvalidNetwork("a chain needs at least two layers".into()));
    }
    if !net.is_two_local() {
        return Err(Error::KLocalUnsupported);
    }
    net.require_real_weights()?;
    let kernels = net
        .weights()
        .iter()
        .enumerate()
        .map(|(a, w)| {
            let (sa, sb) = (bias_share::<T>(layers, a), bias_share::<T>(layers, a + 1));
            let (ba, bb) = (&net.biases()[a], &net.biases()[a + 1]);
            ComplexMatrix::from_fn(w.rows(), w.cols(), |r, c| {
                let e = sa * ba[r] + w[(r, c)].re + sb * bb[c];
                Cplx::new((-e).exp(), T::zero())
            })
        })
        .collect();
    TransferChain::with_labels(kernels, layer_labels(net))
}

/// Classical energy of one basis state per layer, including k-local terms.
pub fn configuration_energy<T: Real>(net: &LayeredNetwork<T>, config: &[usize]) -> Result<T> {
    let dims = net.dims();
    if config.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: config.len(),
        });
    }
    for (boundary, (&i, &d)) in config.iter().zip(&dims).enumerate() {
        if i >= d {
            return Err(Error::IndexOutOfRange {
                boundary,
                index: i,
                dim: d,
            });
        }
    }
    net.require_real_weights()?;
    Ok(energy_unchecked(net, config))
}

fn energy_unchecked<T: Real>(net: &LayeredNetwork<T>, config: &[usize]) -> T {
    let mut e = T::zero();
    for (a, bias) in net.biases().iter().enumerate() {
        e += bias[config[a]];
    }
    for (a, w) in net.weights().iter().enumerate() {
        e += w[(config[a], config[a + 1])].re;
    }
    for hw in net.higher() {
        let flat = hw
            .layers
            .iter()
            .fold(0, |acc, &l| acc * net.layers()[l].dim + config[l]);
        e += hw.tensor[flat];
    }
    e
}

/// Gibbs distribution `e^{-E}/Z` over one basis state per layer, by
/// enumeration; handles k-local weights.
pub fn boltzmann_joint<T: Real>(net: &LayeredNetwork<T>) -> Result<ProbabilityTable<T>> {
    net.require_real_weights()?;
    let dims = net.dims();
    let count: u128 = dims.iter().map(|&d| d as u128).product();
    if count > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            paths: count,
            budget: ENUMERATION_BUDGET,
        });
    }
    let variables: Vec<Variable> = net
        .layers()
        .iter()
        .map(|l| Variable::new(l.name.clone(), l.dim))
        .collect();
    let mut config = vec![0usize; dims.len()];
    let mut energies = Vec::with_capacity(count as usize);
    for _ in 0..count {
        energies.push(energy_unchecked(net, &config));
        crate::entropy::odometer_step(&mut config, &variables);
    }
    let e_min = energies.iter().copied().fold(T::infinity(), T::min);
    let weights = energies.into_iter().map(|e| (e_min - e).exp()).collect();
    ProbabilityTable::from_weights(variables, weights)
}

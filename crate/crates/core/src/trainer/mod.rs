//! Fitting network biases and weights to data: input/target pairs through
//! the forward map, a target propagator, or a target Gibbs table.

mod fit;

pub use fit::{fit, initialize, FitResult};

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::ProbabilityTable;
use crate::error::{Error, Result};
use crate::layered_network::{
    classical_chain, forward_map, forward_trace, ActivationKind, LayeredNetwork,
};
use crate::operators::ComplexMatrix;
use crate::path_integral::{path_distribution, Endpoints};
use crate::scalar::{Cplx, KahanSum, Real};

/// Data a network is fitted to.
#[derive(Clone, Debug, PartialEq)]
pub enum TrainingSet<T> {
    /// `(input, target)` vectors for the forward map.
    MapPairs(Vec<(Vec<T>, Vec<T>)>),
    /// Target for [`network_propagator`], first-layer dim x last-layer dim.
    TargetPropagator(ComplexMatrix<T>),
    /// Target distribution over one basis state per layer.
    TargetGibbs(ProbabilityTable<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Sum of squared residuals; Frobenius distance squared for propagators.
    SquaredError,
    /// `KL(target || model)` for Gibbs targets.
    KullbackLeibler,
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sq" | "squared" => Ok(Self::SquaredError),
            "kl" => Ok(Self::KullbackLeibler),
            other => Err(Error::InvalidConfig(format!("unknown loss `{other}` (expected sq|kl)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Optimizer<T> {
    GradientDescent { lr: T },
    Adam { lr: T, beta1: T, beta2: T, eps: T },
}

impl<T: Real> Optimizer<T> {
    pub fn adam(lr: T) -> Self {
        Self::Adam {
            lr,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
        }
    }

    pub fn lr(&self) -> T {
        match *self {
            Self::GradientDescent { lr } | Self::Adam { lr, .. } => lr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GradientMode<T> {
    Analytic,
    CentralDifference(T),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig<T> {
    pub loss: LossKind,
    pub optimizer: Optimizer<T>,
    pub steps: usize,
    pub seed: u64,
    pub gradient: GradientMode<T>,
    pub activation: ActivationKind,
    /// Start from seeded `U[-0.1, 0.1]` weights and zero biases instead of
    /// the given parameters.
    pub reinitialize: bool,
}

impl<T: Real> FitConfig<T> {
    pub fn new(loss: LossKind, optimizer: Optimizer<T>, steps: usize, seed: u64) -> Self {
        Self {
            loss,
            optimizer,
            steps,
            seed,
            gradient: GradientMode::Analytic,
            activation: ActivationKind::Identity,
            reinitialize: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lr = self.optimizer.lr();
        if !(lr > T::zero()) || !lr.is_finite() {
            return Err(Error::InvalidConfig(format!("learning rate must be positive, got {lr}")));
        }
        if let Optimizer::Adam { beta1, beta2, eps, .. } = self.optimizer {
            let unit = |b: T| b >= T::zero() && b < T::one();
            if !unit(beta1) || !unit(beta2) || !(eps > T::zero()) {
                return Err(Error::InvalidConfig("Adam needs 0 <= beta < 1 and eps > 0".into()));
            }
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if let GradientMode::CentralDifference(h) = self.gradient {
            if !(h > T::zero()) || !h.is_finite() {
                return Err(Error::InvalidConfig(format!("difference step must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Derivatives with respect to every bias and weight. Weight entries hold
/// `dL/dRe w + i dL/dIm w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient<T> {
    pub biases: Vec<Vec<T>>,
    pub weights: Vec<ComplexMatrix<T>>,
}

impl<T: Real> Gradient<T> {
    pub fn zeros_like(net: &LayeredNetwork<T>) -> Self {
        Self {
            biases: net.biases().iter().map(|b| vec![T::zero(); b.len()]).collect(),
            weights: net
                .weights()
                .iter()
                .map(|w| ComplexMatrix::zeros(w.rows(), w.cols()))
                .collect(),
        }
    }

    /// Flattened in parameter order: biases, weight real parts, then (if
    /// `imaginary`) weight imaginary parts.
    pub fn to_vec(&self, imaginary: bool) -> Vec<T> {
        let mut out: Vec<T> = self.biases.iter().flatten().copied().collect();
        out.extend(self.weights.iter().flat_map(|w| w.entries().iter().map(|e| e.re)));
        if imaginary {
            out.extend(self.weights.iter().flat_map(|w| w.entries().iter().map(|e| e.im)));
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.to_vec(true).into_iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    fn from_vec(net: &LayeredNetwork<T>, values: &[T], imaginary: bool) -> Self {
        let mut g = Self::zeros_like(net);
        let mut it = values.iter().copied();
        for b in &mut g.biases {
            for x in b.iter_mut() {
                *x = it.next().unwrap_or_else(T::zero);
            }
        }
        let mut re: Vec<Vec<T>> = g
            .weights
            .iter()
            .map(|w| (0..w.entries().len()).map(|_| it.next().unwrap_or_else(T::zero)).collect())
            .collect();
        let im: Vec<Vec<T>> = g
            .weights
            .iter()
            .map(|w| {
                (0..w.entries().len())
                    .map(|_| if imaginary { it.next().unwrap_or_else(T::zero) } else { T::zero() })
                    .collect()
            })
            .collect();
        for ((w, re), im) in g.weights.iter_mut().zip(re.iter_mut()).zip(&im) {
            let (rows, cols) = w.shape();
            *w = ComplexMatrix::from_fn(rows, cols, |r, c| Cplx::new(re[r * cols + c], im[r * cols + c]));
        }
        g
    }
}

/// Imaginary weight parts are trainable only against a propagator built
/// from the weight product.
pub(crate) fn trains_imaginary<T>(data: &TrainingSet<T>, activation: ActivationKind) -> bool {
    matches!(data, TrainingSet::TargetPropagator(_)) && activation == ActivationKind::Identity
}

pub(crate) fn parameters<T: Real>(net: &LayeredNetwork<T>, imaginary: bool) -> Vec<T> {
    let g = Gradient {
        biases: net.biases().to_vec(),
        weights: net.weights().to_vec(),
    };
    g.to_vec(imaginary)
}

pub(crate) fn with_parameters<T: Real>(
    net: &LayeredNetwork<T>,
    values: &[T],
    imaginary: bool,
) -> LayeredNetwork<T> {
    let g = Gradient::from_vec(net, values, imaginary);
    let mut out = net.clone();
    for (a, b) in g.biases.iter().enumerate() {
        for (i, &x) in b.iter().enumerate() {
            out.set_bias(a, i, x);
        }
    }
    for (e, w) in g.weights.iter().enumerate() {
        for r in 0..w.rows() {
            for c in 0..w.cols() {
                let im = if imaginary { w[(r, c)].im } else { net.weights()[e][(r, c)].im };
                out.set_weight(e, r, c, Cplx::new(w[(r, c)].re, im));
            }
        }
    }
    out
}

/// Identity activation: `W_1 W_2 ... W_{L-1}` (biases do not enter).
/// Otherwise row `alpha` is `forward_map(e_alpha)`.
pub fn network_propagator<T: Real>(
    net: &LayeredNetwork<T>,
    activation: ActivationKind,
) -> Result<ComplexMatrix<T>> {
    if net.weights().is_empty() {
        return Err(Error::InvalidNetwork("a propagator needs at least two layers".into()));
    }
    if activation == ActivationKind::Identity {
        let mut acc = net.weights()[0].clone();
        for w in &net.weights()[1..] {
            acc = acc.matmul(w)?;
        }
        return Ok(acc);
    }
    let dims = net.dims();
    let (d_in, d_out) = (dims[0], dims[dims.len() - 1]);
    let mut rows = Vec::with_capacity(d_in);
    for alpha in 0..d_in {
        let mut e = vec![T::zero(); d_in];
        e[alpha] = T::one();
        rows.push(forward_map(net, activation, &e)?);
    }
    Ok(ComplexMatrix::from_fn(d_in, d_out, |r, c| Cplx::new(rows[r][c], T::zero())))
}

fn default_loss<T>(data: &TrainingSet<T>) -> LossKind {
    match data {
        TrainingSet::TargetGibbs(_) => LossKind::KullbackLeibler,
        _ => LossKind::SquaredError,
    }
}

pub(crate) fn check_loss_kind<T>(data: &TrainingSet<T>, kind: LossKind) -> Result<()> {
    if kind != default_loss(data) {
        let mode = match data {
            TrainingSet::MapPairs(_) => "map pairs",
            TrainingSet::TargetPropagator(_) => "a target propagator",
            TrainingSet::TargetGibbs(_) => "a Gibbs target",
        };
        return Err(Error::InvalidConfig(format!("loss {kind:?} does not apply to {mode}")));
    }
    Ok(())
}

fn validate_data<T: Real>(net: &LayeredNetwork<T>, data: &TrainingSet<T>) -> Result<()> {
    let dims = net.dims();
    let (d_in, d_out) = (dims[0], dims[dims.len() - 1]);
    match data {
        TrainingSet::MapPairs(pairs) => {
            for (x, y) in pairs {
                if x.len() != d_in {
                    return Err(Error::DimensionMismatch {
                        expected: d_in,
                        found: x.len(),
                    });
                }
                if y.len() != d_out {
                    return Err(Error::DimensionMismatch {
                        expected: d_out,
                        found: y.len(),
                    });
                }
            }
        }
        TrainingSet::TargetPropagator(target) => {
            if target.shape() != (d_in, d_out) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{d_in}x{d_out}"),
                    found: format!("{}x{}", target.rows(), target.cols()),
                });
            }
        }
        TrainingSet::TargetGibbs(table) => {
            if table.cards() != dims {
                return Err(Error::ShapeMismatch {
                    expected: format!("{dims:?}"),
                    found: format!("{:?}", table.cards()),
                });
            }
        }
    }
    Ok(())
}

fn model_distribution<T: Real>(net: &LayeredNetwork<T>) -> Result<ProbabilityTable<T>> {
    path_distribution(&classical_chain(net)?, Endpoints::Free)
}

fn kl<T: Real>(target: &ProbabilityTable<T>, model: &ProbabilityTable<T>) -> Result<T> {
    let mut acc = KahanSum::new();
    for (&t, &m) in target.masses().iter().zip(model.masses()) {
        if t > T::zero() {
            if !(m > T::zero()) {
                return Err(Error::SupportMismatch);
            }
            acc.add(t * (t / m).ln());
        }
    }
    Ok(acc.value().max(T::zero()))
}

/// Loss of the data's natural kind: squared error for pairs and
/// propagators, KL divergence for Gibbs targets.
pub fn loss<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    activation: ActivationKind,
) -> Result<T> {
    validate_data(net, data)?;
    match data {
        TrainingSet::MapPairs(pairs) => {
            let per_pair = pairs
                .par_iter()
                .map(|(x, y)| {
                    let out = forward_map(net, activation, x)?;
                    Ok(out
                        .iter()
                        .zip(y)
                        .fold(T::zero(), |acc, (&o, &t)| acc + (o - t) * (o - t)))
                })
                .collect::<Result<Vec<T>>>()?;
            let mut acc = KahanSum::new();
            for v in per_pair {
                acc.add(v);
            }
            Ok(acc.value())
        }
        TrainingSet::TargetPropagator(target) => {
            let diff = network_propagator(net, activation)?.sub(target)?;
            let mut acc = KahanSum::new();
            for e in diff.entries() {
                acc.add(e.norm_sqr());
            }
            Ok(acc.value())
        }
        TrainingSet::TargetGibbs(target) => kl(target, &model_distribution(net)?),
    }
}

/// Loss of the given kind; errors if the kind does not fit the data.
pub fn loss_of_kind<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    activation: ActivationKind,
    kind: LossKind,
) -> Result<T> {
    check_loss_kind(data, kind)?;
    loss(net, data, activation)
}

/// Gradient of [`loss`] under `cfg.gradient` and `cfg.activation`.
pub fn gradient<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    cfg: &FitConfig<T>,
) -> Result<Gradient<T>> {
    validate_data(net, data)?;
    check_loss_kind(data, cfg.loss)?;
    match cfg.gradient {
        GradientMode::Analytic => analytic_gradient(net, data, cfg.activation),
        GradientMode::CentralDifference(h) => numeric_gradient(net, data, cfg.activation, h),
    }
}

fn numeric_gradient<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    activation: ActivationKind,
    h: T,
) -> Result<Gradient<T>> {
    let imaginary = trains_imaginary(data, activation);
    let base = parameters(net, imaginary);
    let two_h = h + h;
    let grads = (0..base.len())
        .into_par_iter()
        .map(|k| {
            let mut probe = base.clone();
            probe[k] = base[k] + h;
            let up = loss(&with_parameters(net, &probe, imaginary), data, activation)?;
            probe[k] = base[k] - h;
            let down = loss(&with_parameters(net, &probe, imaginary), data, activation)?;
            Ok((up - down) / two_h)
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(Gradient::from_vec(net, &grads, imaginary))
}

fn analytic_gradient<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    activation: ActivationKind,
) -> Result<Gradient<T>> {
    match data {
        TrainingSet::MapPairs(pairs) => map_pairs_gradient(net, pairs, activation),
        TrainingSet::TargetPropagator(target) => {
            if activation != ActivationKind::Identity {
                return Err(Error::AnalyticUnavailable(format!(
                    "propagator targets with {activation:?} activation; use central differences"
                )));
            }
            propagator_gradient(net, target)
        }
        TrainingSet::TargetGibbs(target) => gibbs_gradient(net, target),
    }
}

fn map_pairs_gradient<T: Real>(
    net: &LayeredNetwork<T>,
    pairs: &[(Vec<T>, Vec<T>)],
    activation: ActivationKind,
) -> Result<Gradient<T>> {
    let per_pair = pairs
        .par_iter()
        .map(|(x, y)| {
            let trace = forward_trace(net, activation, x)?;
            let mut g = Gradient::zeros_like(net);
            let last = trace.activations.len() - 1;
            let two = T::lit(2.0);
            let mut delta: Vec<T> = trace.activations[last]
                .iter()
                .zip(y)
                .zip(&trace.pre[last])
                .map(|((&o, &t), &z)| two * (o - t) * activation.derivative(z))
                .collect();
            for a in (0..last).rev() {
                let w = &net.weights()[a];
                let h = &trace.activations[a];
                g.biases[a + 1] = delta.clone();
                g.weights[a] = ComplexMatrix::from_fn(w.rows(), w.cols(), |r, c| {
                    Cplx::new(h[r] * delta[c], T::zero())
                });
                if a > 0 {
                    delta = (0..w.rows())
                        .map(|r| {
                            let back = (0..w.cols()).fold(T::zero(), |acc, c| acc + w[(r, c)].re * delta[c]);
                            back * activation.derivative(trace.pre[a][r])
                        })
                        .collect();
                }
            }
            Ok(g)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Gradient::zeros_like(net);
    for g in per_pair {
        for (tb, gb) in total.biases.iter_mut().zip(&g.biases) {
            for (t, &x) in tb.iter_mut().zip(gb) {
                *t += x;
            }
        }
        for (tw, gw) in total.weights.iter_mut().zip(&g.weights) {
            *tw = tw.add(gw)?;
        }
    }
    Ok(total)
}

fn propagator_gradient<T: Real>(
    net: &LayeredNetwork<T>,
    target: &ComplexMatrix<T>,
) -> Result<Gradient<T>> {
    let ws = net.weights();
    let k = ws.len();
    // before[a] = W_1 ... W_{a-1}, after[a] = W_{a+1} ... W_k
    let mut before = vec![ComplexMatrix::identity(ws[0].rows())];
    for a in 0..k - 1 {
        let next = before[a].matmul(&ws[a])?;
        before.push(next);
    }
    let mut after = vec![ComplexMatrix::identity(ws[k - 1].cols()); k];
    for a in (0..k - 1).rev() {
        after[a] = ws[a + 1].matmul(&after[a + 1])?;
    }
    let residual = before[k - 1].matmul(&ws[k - 1])?.sub(target)?;
    let two = Cplx::new(T::lit(2.0), T::zero());
    let mut g = Gradient::zeros_like(net);
    for a in 0..k {
        g.weights[a] = before[a]
            .adjoint()
            .matmul(&residual)?
            .matmul(&after[a].adjoint())?
            .scale(two);
    }
    Ok(g)
}

fn gibbs_gradient<T: Real>(
    net: &LayeredNetwork<T>,
    target: &ProbabilityTable<T>,
) -> Result<Gradient<T>> {
    let model = model_distribution(net)?;
    kl(target, &model)?;
    let layers = net.layers().len();
    let mut g = Gradient::zeros_like(net);
    for a in 0..layers {
        let t = target.marginalize_positions(&[a])?;
        let m = model.marginalize_positions(&[a])?;
        g.biases[a] = t.masses().iter().zip(m.masses()).map(|(&x, &y)| x - y).collect();
    }
    for a in 0..layers - 1 {
        let t = target.marginalize_positions(&[a, a + 1])?;
        let m = model.marginalize_positions(&[a, a + 1])?;
        let (rows, cols) = net.weights()[a].shape();
        g.weights[a] = ComplexMatrix::from_fn(rows, cols, |r, c| {
            let i = r * cols + c;
            Cplx::new(t.masses()[i] - m.masses()[i], T::zero())
        });
    }
    Ok(g)
}

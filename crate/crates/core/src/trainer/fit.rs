use rand::Rng as _;

use super::{
    check_loss_kind, gradient, loss, parameters, trains_imaginary, with_parameters, FitConfig,
    Optimizer, TrainingSet,
};
use crate::error::{Error, Result};
use crate::layered_network::LayeredNetwork;
use crate::rng;
use crate::scalar::{Cplx, Real};

/// A step whose loss exceeds this multiple of the current loss is rejected
/// and the learning rate halved.
const BLOWUP_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult<T> {
    /// Lowest-loss parameters seen.
    pub network: LayeredNetwork<T>,
    /// Loss before the first step and after every step.
    pub trace: Vec<T>,
    pub best_loss: T,
    /// Learning rate in effect at the end.
    pub final_lr: T,
}

/// Seeded `U[-0.1, 0.1]` real weights and zero biases.
pub fn initialize<T: Real>(net: &LayeredNetwork<T>, seed: u64) -> LayeredNetwork<T> {
    let mut rng = rng::seeded(seed);
    let mut out = net.clone();
    for (a, b) in net.biases().iter().enumerate() {
        for i in 0..b.len() {
            out.set_bias(a, i, T::zero());
        }
    }
    for (e, w) in net.weights().iter().enumerate() {
        for r in 0..w.rows() {
            for c in 0..w.cols() {
                let x = rng.gen_range(-0.1..=0.1);
                out.set_weight(e, r, c, Cplx::new(T::lit(x), T::zero()));
            }
        }
    }
    out
}

struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: i32,
}

fn propose<T: Real>(
    optimizer: &Optimizer<T>,
    lr: T,
    params: &[T],
    grad: &[T],
    adam: &mut AdamState<T>,
) -> Vec<T> {
    match *optimizer {
        Optimizer::GradientDescent { .. } => params
            .iter()
            .zip(grad)
            .map(|(&p, &g)| p - lr * g)
            .collect(),
        Optimizer::Adam {
            beta1, beta2, eps, ..
        } => {
            adam.t += 1;
            let c1 = T::one() - beta1.powi(adam.t);
            let c2 = T::one() - beta2.powi(adam.t);
            params
                .iter()
                .zip(grad)
                .enumerate()
                .map(|(k, (&p, &g))| {
                    adam.m[k] = beta1 * adam.m[k] + (T::one() - beta1) * g;
                    adam.v[k] = beta2 * adam.v[k] + (T::one() - beta2) * g * g;
                    let m_hat = adam.m[k] / c1;
                    let v_hat = adam.v[k] / c2;
                    p - lr * m_hat / (v_hat.sqrt() + eps)
                })
                .collect()
        }
    }
}

/// Runs `cfg.steps` optimizer steps. A step that raises the loss more than
/// tenfold is undone and the learning rate halved; a NaN loss aborts with
/// [`Error::Divergence`].
pub fn fit<T: Real>(
    net: &LayeredNetwork<T>,
    data: &TrainingSet<T>,
    cfg: &FitConfig<T>,
) -> Result<FitResult<T>> {
    cfg.validate()?;
    check_loss_kind(data, cfg.loss)?;
    let imaginary = trains_imaginary(data, cfg.activation);
    let mut current = if cfg.reinitialize {
        initialize(net, cfg.seed)
    } else {
        net.clone()
    };
    let mut current_loss = loss(&current, data, cfg.activation)?;
    let mut trace = vec![current_loss];
    let to_f64 = |trace: &[T]| trace.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    if current_loss.is_nan() {
        return Err(Error::Divergence {
            step: 0,
            trace: to_f64(&trace),
        });
    }
    let mut best = (current.clone(), current_loss);
    let mut lr = cfg.optimizer.lr();
    let n = parameters(&current, imaginary).len();
    let mut adam = AdamState {
        m: vec![T::zero(); n],
        v: vec![T::zero(); n],
        t: 0,
    };
    for step in 1..=cfg.steps {
        let params = parameters(&current, imaginary);
        let grad = gradient(&current, data, cfg)?.to_vec(imaginary);
        let (saved_m, saved_v, saved_t) = (adam.m.clone(), adam.v.clone(), adam.t);
        let proposal = propose(&cfg.optimizer, lr, &params, &grad, &mut adam);
        let candidate = with_parameters(&current, &proposal, imaginary);
        let candidate_loss = match loss(&candidate, data, cfg.activation) {
            Ok(l) => l,
            Err(Error::SupportMismatch) => T::infinity(),
            Err(e) => return Err(e),
        };
        if candidate_loss.is_nan() {
            trace.push(candidate_loss);
            return Err(Error::Divergence {
                step,
                trace: to_f64(&trace),
            });
        }
        if candidate_loss > T::lit(BLOWUP_FACTOR) * current_loss {
            adam.m = saved_m;
            adam.v = saved_v;
            adam.t = saved_t;
            lr = lr * T::lit(0.5);
            trace.push(current_loss);
            continue;
        }
        current = candidate;
        current_loss = candidate_loss;
        trace.push(current_loss);
        if current_loss < best.1 {
            best = (current.clone(), current_loss);
        }
    }
    Ok(FitResult {
        network: best.0,
        trace,
        best_loss: best.1,
        final_lr: lr,
    })
}

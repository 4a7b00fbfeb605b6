use rand::Rng as _;

use super::{budget, RbmParams};
use crate::entropy::{ProbabilityTable, Variable};
use crate::error::{Error, Result};
use crate::layered_network::logistic;
use crate::rng;
use crate::scalar::Real;

/// `p(h_j = +1 | v) = logistic(-2 (b_j + sum_i W_ij v_i))`.
pub fn hidden_up_probability<T: Real>(params: &RbmParams<T>, v: &[i8], j: usize) -> T {
    logistic(T::lit(-2.0) * params.hidden_field(v, j))
}

/// `p(v_i = +1 | h) = logistic(-2 (a_i + sum_j W_ij h_j))`.
pub fn visible_up_probability<T: Real>(params: &RbmParams<T>, h: &[i8], i: usize) -> T {
    logistic(T::lit(-2.0) * params.visible_field(h, i))
}

fn index(spins: &[i8]) -> usize {
    spins.iter().fold(0, |acc, &s| (acc << 1) | usize::from(s < 0))
}

/// Block Gibbs chain from a random start. After `burn_in` discarded
/// sweeps, each of `sweeps` sweeps (h given v, then v given h) records one
/// `(v, h)` sample; the result is the normalized histogram.
pub fn gibbs_sample<T: Real>(
    params: &RbmParams<T>,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
) -> Result<ProbabilityTable<T>> {
    params.validate()?;
    budget(params.n + params.p)?;
    if sweeps == 0 {
        return Err(Error::InvalidConfig("sweeps must be at least 1".into()));
    }
    let mut rng = rng::seeded(seed);
    let draw = |prob_up: T, rng: &mut rng::Rng| -> i8 {
        if rng.gen::<f64>() < prob_up.as_f64() {
            1
        } else {
            -1
        }
    };
    let mut v: Vec<i8> = (0..params.n).map(|_| draw(T::lit(0.5), &mut rng)).collect();
    let mut h = vec![1i8; params.p];
    let mut counts = vec![0u64; 1 << (params.n + params.p)];
    for sweep in 0..burn_in + sweeps {
        for j in 0..params.p {
            h[j] = draw(hidden_up_probability(params, &v, j), &mut rng);
        }
        for i in 0..params.n {
            v[i] = draw(visible_up_probability(params, &h, i), &mut rng);
        }
        if sweep >= burn_in {
            counts[(index(&v) << params.p) | index(&h)] += 1;
        }
    }
    ProbabilityTable::from_weights(
        vec![
            Variable::new("v", 1 << params.n),
            Variable::new("h", 1 << params.p),
        ],
        counts.into_iter().map(|c| T::lit(c as f64)).collect(),
    )
}

//! Restricted Boltzmann machine on `+-1` spins: energy, exact Gibbs
//! tables, the analytic visible marginal, the square-root ansatz and a
//! seeded block Gibbs sampler.
//!
//! Spins are `sigma^z` eigenvalues. A `{0, 1}` unit `s` maps to a spin by
//! `sigma = 1 - 2 s`, so state index bit `0` is spin `+1`. Configuration
//! `k` of an `m`-spin register lists spin 0 as the most significant bit.

mod sampler;

pub use sampler::{gibbs_sample, hidden_up_probability, visible_up_probability};

use serde::{Deserialize, Serialize};

use crate::entropy::{ProbabilityTable, Variable};
use crate::error::{Error, Result};
use crate::layered_network::{LayerSpec, LayeredNetwork};
use crate::operators::ComplexMatrix;
use crate::scalar::{Cplx, KahanSum, Real};

/// Largest `n + p` (or `n` alone for visible-only tables) that the exact
/// routines will enumerate.
pub const MAX_SPINS: usize = 24;

/// Biases `a`, `b` and couplings `W` (n x p), already multiplied by beta.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct RbmParams<T> {
    pub n: usize,
    pub p: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<T>>,
}

impl<T: Real> RbmParams<T> {
    pub fn new(a: Vec<T>, b: Vec<T>, w: Vec<Vec<T>>) -> Result<Self> {
        let params = Self {
            n: a.len(),
            p: b.len(),
            a,
            b,
            w,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        Self::new(vec![T::zero(); n], vec![T::zero(); p], vec![vec![T::zero(); p]; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::InvalidRbm("n and p must be at least 1".into()));
        }
        if self.a.len() != self.n || self.b.len() != self.p {
            return Err(Error::InvalidRbm(format!(
                "bias lengths {}/{} do not match n={} p={}",
                self.a.len(),
                self.b.len(),
                self.n,
                self.p
            )));
        }
        if self.w.len() != self.n || self.w.iter().any(|row| row.len() != self.p) {
            return Err(Error::InvalidRbm(format!("W must be {}x{}", self.n, self.p)));
        }
        let finite = self
            .a
            .iter()
            .chain(&self.b)
            .chain(self.w.iter().flatten())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidRbm("non-finite parameter".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Every parameter negated.
    pub fn negated(&self) -> Self {
        Self {
            n: self.n,
            p: self.p,
            a: self.a.iter().map(|&x| -x).collect(),
            b: self.b.iter().map(|&x| -x).collect(),
            w: self.w.iter().map(|r| r.iter().map(|&x| -x).collect()).collect(),
        }
    }

    /// `b_j + sum_i W_ij v_i`.
    pub(crate) fn hidden_field(&self, v: &[i8], j: usize) -> T {
        v.iter()
            .zip(&self.w)
            .fold(self.b[j], |acc, (&s, row)| acc + row[j] * spin(s))
    }

    /// `a_i + sum_j W_ij h_j`.
    pub(crate) fn visible_field(&self, h: &[i8], i: usize) -> T {
        h.iter()
            .zip(&self.w[i])
            .fold(self.a[i], |acc, (&s, &wij)| acc + wij * spin(s))
    }
}

fn spin<T: Real>(s: i8) -> T {
    if s > 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Vector of `+-1` spins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpin(f64::from(bad)));
        }
        Ok(Self(values))
    }

    pub fn from_reals<T: Real>(values: &[T]) -> Result<Self> {
        values
            .iter()
            .map(|&x| {
                if x == T::one() {
                    Ok(1)
                } else if x == -T::one() {
                    Ok(-1)
                } else {
                    Err(Error::InvalidSpin(x.as_f64()))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Configuration number `index` of a `len`-spin register.
    pub fn from_index(index: usize, len: usize) -> Self {
        Self(
            (0..len)
                .map(|i| if (index >> (len - 1 - i)) & 1 == 0 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &s| (acc << 1) | usize::from(s < 0))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `+-` string, e.g. `"+-+"`.
    pub fn signs(&self) -> String {
        self.0.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
    }
}

/// `sum a_i v_i + sum b_j h_j + sum W_ij v_i h_j`.
pub fn energy<T: Real>(
    params: &RbmParams<T>,
    v: &SpinConfiguration,
    h: &SpinConfiguration,
) -> Result<T> {
    if v.len() != params.n {
        return Err(Error::DimensionMismatch {
            expected: params.n,
            found: v.len(),
        });
    }
    if h.len() != params.p {
        return Err(Error::DimensionMismatch {
            expected: params.p,
            found: h.len(),
        });
    }
    Ok(energy_unchecked(params, v.values(), h.values()))
}

fn energy_unchecked<T: Real>(params: &RbmParams<T>, v: &[i8], h: &[i8]) -> T {
    let mut e = T::zero();
    for (&ai, &s) in params.a.iter().zip(v) {
        e += ai * spin(s);
    }
    for (&bj, &s) in params.b.iter().zip(h) {
        e += bj * spin(s);
    }
    for (row, &vi) in params.w.iter().zip(v) {
        for (&wij, &hj) in row.iter().zip(h) {
            e += wij * spin(vi) * spin(hj);
        }
    }
    e
}

fn budget(spins: usize) -> Result<()> {
    if spins > MAX_SPINS {
        Err(Error::EnumerationBudget {
            paths: 1u128 << spins,
            budget: 1u128 << MAX_SPINS,
        })
    } else {
        Ok(())
    }
}

fn configs(len: usize) -> Vec<SpinConfiguration> {
    (0..1usize << len)
        .map(|k| SpinConfiguration::from_index(k, len))
        .collect()
}

/// Joint table over `(v, h)` with mass `e^{-E}/Z`; energies are shifted by
/// their minimum before exponentiation.
pub fn gibbs_table<T: Real>(params: &RbmParams<T>) -> Result<ProbabilityTable<T>> {
    params.validate()?;
    budget(params.n + params.p)?;
    let vs = configs(params.n);
    let hs = configs(params.p);
    let mut energies = Vec::with_capacity(vs.len() * hs.len());
    for v in &vs {
        for h in &hs {
            energies.push(energy_unchecked(params, v.values(), h.values()));
        }
    }
    let e_min = energies.iter().copied().fold(T::infinity(), T::min);
    let weights = energies.into_iter().map(|e| (e_min - e).exp()).collect();
    ProbabilityTable::from_weights(
        vec![Variable::new("v", vs.len()), Variable::new("h", hs.len())],
        weights,
    )
}

/// `p(v)` with the hidden layer traced out analytically:
/// `p(v) ~ e^{-a.v} prod_j 2 cosh(b_j + sum_i W_ij v_i)`.
pub fn visible_marginal<T: Real>(params: &RbmParams<T>) -> Result<ProbabilityTable<T>> {
    params.validate()?;
    budget(params.n)?;
    // log-weights, shifted by their maximum before exponentiation
    let logs: Vec<T> = configs(params.n)
        .iter()
        .map(|v| {
            let vs = v.values();
            let mut acc = KahanSum::new();
            for (&ai, &s) in params.a.iter().zip(vs) {
                acc.add(-ai * spin(s));
            }
            for j in 0..params.p {
                acc.add(log_two_cosh(params.hidden_field(vs, j)));
            }
            acc.value()
        })
        .collect();
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let weights = logs.into_iter().map(|l| (l - top).exp()).collect();
    ProbabilityTable::from_weights(vec![Variable::new("v", 1 << params.n)], weights)
}

/// `ln(2 cosh x)` without overflow.
fn log_two_cosh<T: Real>(x: T) -> T {
    let ax = x.abs();
    ax + (-(ax + ax)).exp().ln_1p()
}

/// `psi(v) = sqrt(p(v))`.
pub fn ansatz<T: Real>(params: &RbmParams<T>) -> Result<Vec<T>> {
    Ok(visible_marginal(params)?
        .masses()
        .iter()
        .map(|m| m.sqrt())
        .collect())
}

/// Two-layer network over whole-register configurations: visible bias
/// `sum a_i v_i`, hidden bias `sum b_j h_j`, edge weight `sum W_ij v_i h_j`.
pub fn as_layered<T: Real>(params: &RbmParams<T>) -> Result<LayeredNetwork<T>> {
    params.validate()?;
    budget(params.n + params.p)?;
    let vs = configs(params.n);
    let hs = configs(params.p);
    let dot = |coef: &[T], c: &SpinConfiguration| {
        coef.iter()
            .zip(c.values())
            .fold(T::zero(), |acc, (&x, &s)| acc + x * spin(s))
    };
    let vis: Vec<T> = vs.iter().map(|v| dot(&params.a, v)).collect();
    let hid: Vec<T> = hs.iter().map(|h| dot(&params.b, h)).collect();
    let w = ComplexMatrix::from_fn(vs.len(), hs.len(), |r, c| {
        let mut e = T::zero();
        for (row, &vi) in params.w.iter().zip(vs[r].values()) {
            for (&wij, &hj) in row.iter().zip(hs[c].values()) {
                e += wij * spin(vi) * spin(hj);
            }
        }
        Cplx::new(e, T::zero())
    });
    LayeredNetwork::new(
        vec![LayerSpec::visible("v", vs.len()), LayerSpec::hidden("h", hs.len())],
        vec![vis, hid],
        vec![w],
        Vec::new(),
    )
}

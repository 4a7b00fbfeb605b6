//! Pauli-string Hamiltonians on qubit registers: dense realization,
//! thermal diagonals, and the bridge from RBM parameters and k-local
//! terms.
//!
//! Site 0 is the most significant bit of a basis index; bit value `0`
//! is the `sigma^z = +1` state.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy::{ProbabilityTable, SimplicialComplex, Variable};
use crate::error::{Error, Result};
use crate::operators::{ComplexMatrix, HermitianOperator};
use crate::rbm::RbmParams;
use crate::scalar::{Cplx, Real};

/// Largest register realized densely.
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Self::X),
            "y" | "Y" => Ok(Self::Y),
            "z" | "Z" => Ok(Self::Z),
            other => Err(Error::InvalidHamiltonian(format!("unknown axis `{other}`"))),
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::X => "x",
            Self::Y => "y",
            Self::Z => "z",
        })
    }
}

/// `coeff * prod_k sigma^{axes[k]}_{sites[k]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct PauliTerm<T> {
    pub sites: Vec<usize>,
    pub axes: Vec<PauliAxis>,
    pub coeff: T,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(sites: Vec<usize>, axes: Vec<PauliAxis>, coeff: T) -> Self {
        Self { sites, axes, coeff }
    }

    pub fn z(sites: &[usize], coeff: T) -> Self {
        Self::new(sites.to_vec(), vec![PauliAxis::Z; sites.len()], coeff)
    }

    pub fn locality(&self) -> usize {
        self.sites.len()
    }

    fn validate(&self, qubits: usize) -> Result<()> {
        if self.sites.is_empty() || self.sites.len() != self.axes.len() {
            return Err(Error::InvalidHamiltonian(format!(
                "term needs matching nonempty sites/axes, got {}/{}",
                self.sites.len(),
                self.axes.len()
            )));
        }
        if !self.coeff.is_finite() {
            return Err(Error::InvalidHamiltonian("non-finite coefficient".into()));
        }
        let mut sorted = self.sites.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidHamiltonian(format!(
                "duplicate site in term {:?}",
                self.sites
            )));
        }
        if let Some(&s) = sorted.last().filter(|&&s| s >= qubits) {
            return Err(Error::InvalidHamiltonian(format!(
                "site {s} outside a {qubits}-qubit register"
            )));
        }
        Ok(())
    }

    /// `(site, axis)` pairs sorted by site; single-site Paulis on
    /// distinct sites commute, so this is the same operator.
    fn canonical(&self) -> Vec<(usize, PauliAxis)> {
        let mut pairs: Vec<(usize, PauliAxis)> =
            self.sites.iter().copied().zip(self.axes.iter().copied()).collect();
        pairs.sort_unstable();
        pairs
    }

    fn is_z_only(&self) -> bool {
        self.axes.iter().all(|&a| a == PauliAxis::Z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct PauliHamiltonian<T> {
    pub qubits: usize,
    pub terms: Vec<PauliTerm<T>>,
}

impl<T: Real> PauliHamiltonian<T> {
    pub fn new(qubits: usize, terms: Vec<PauliTerm<T>>) -> Result<Self> {
        let h = Self { qubits, terms };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 {
            return Err(Error::InvalidHamiltonian("register has no qubits".into()));
        }
        self.terms.iter().try_for_each(|t| t.validate(self.qubits))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Self = serde_json::from_str(text)?;
        h.validate()?;
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn is_z_only(&self) -> bool {
        self.terms.iter().all(PauliTerm::is_z_only)
    }

    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(PauliTerm::locality).max().unwrap_or(0)
    }

    /// Terms in a canonical order independent of how they were listed.
    fn sorted_terms(&self) -> Vec<(Vec<(usize, PauliAxis)>, T)> {
        let mut terms: Vec<_> = self.terms.iter().map(|t| (t.canonical(), t.coeff)).collect();
        terms.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
        });
        terms
    }

    fn require_dense(&self) -> Result<()> {
        self.validate()?;
        if self.qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: self.qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(())
    }

    /// Classical energy of basis state `index` for a z-only Hamiltonian.
    fn z_energy(&self, sorted: &[(Vec<(usize, PauliAxis)>, T)], index: usize) -> T {
        let mut e = T::zero();
        for (pairs, coeff) in sorted {
            let flips = pairs
                .iter()
                .filter(|(site, _)| bit(index, *site, self.qubits))
                .count();
            e += if flips % 2 == 0 { *coeff } else { -*coeff };
        }
        e
    }
}

fn bit(index: usize, site: usize, qubits: usize) -> bool {
    (index >> (qubits - 1 - site)) & 1 == 1
}

/// Dense `2^N x 2^N` matrix of `sum_t coeff_t P_t`.
pub fn build_dense<T: Real>(h: &PauliHamiltonian<T>) -> Result<HermitianOperator<T>> {
    h.require_dense()?;
    let dim = 1usize << h.qubits;
    let mut m = ComplexMatrix::zeros(dim, dim);
    let (zero, one) = (T::zero(), T::one());
    for (pairs, coeff) in h.sorted_terms() {
        let mut flip = 0usize;
        for &(site, axis) in &pairs {
            if axis != PauliAxis::Z {
                flip |= 1 << (h.qubits - 1 - site);
            }
        }
        for col in 0..dim {
            // P |col> = phase |col ^ flip>
            let mut phase = Cplx::new(coeff, zero);
            for &(site, axis) in &pairs {
                let set = bit(col, site, h.qubits);
                phase = phase
                    * match (axis, set) {
                        (PauliAxis::X, _) => Cplx::new(one, zero),
                        (PauliAxis::Y, false) => Cplx::new(zero, one),
                        (PauliAxis::Y, true) => Cplx::new(zero, -one),
                        (PauliAxis::Z, false) => Cplx::new(one, zero),
                        (PauliAxis::Z, true) => Cplx::new(-one, zero),
                    };
            }
            m[(col ^ flip, col)] += phase;
        }
    }
    HermitianOperator::new(m)
}

fn qubit_variables(qubits: usize) -> Vec<Variable> {
    (0..qubits).map(|q| Variable::new(format!("q{q}"), 2)).collect()
}

/// `diag(exp(-beta H)) / Tr exp(-beta H)` as a table over qubits
/// `q0, ..., q{N-1}`.
pub fn thermal_diagonal<T: Real>(h: &PauliHamiltonian<T>, beta: T) -> Result<ProbabilityTable<T>> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::InvalidEvolution(format!("beta must be positive, got {beta}")));
    }
    h.require_dense()?;
    let dim = 1usize << h.qubits;
    let weights = if h.is_z_only() {
        let sorted = h.sorted_terms();
        let energies: Vec<T> = (0..dim).map(|k| h.z_energy(&sorted, k)).collect();
        let e_min = energies.iter().copied().fold(T::infinity(), T::min);
        energies
            .into_iter()
            .map(|e| (-beta * (e - e_min)).exp())
            .collect()
    } else {
        let eig = build_dense(h)?.eigen()?;
        let e_min = eig.values[0];
        let boltz: Vec<T> = eig
            .values
            .iter()
            .map(|&e| (-beta * (e - e_min)).exp())
            .collect();
        (0..dim)
            .map(|row| {
                boltz
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (k, &w)| acc + w * eig.vectors[(row, k)].norm_sqr())
            })
            .collect()
    };
    ProbabilityTable::from_weights(qubit_variables(h.qubits), weights)
}

/// Z-only image of an RBM: visible spins on qubits `0..n`, hidden spins on
/// `n..n+p`. Zero coefficients are dropped.
pub fn rbm_to_pauli<T: Real>(params: &RbmParams<T>) -> Result<PauliHamiltonian<T>> {
    params.validate()?;
    let n = params.n;
    let mut terms = Vec::new();
    for (i, &a) in params.a.iter().enumerate() {
        if a != T::zero() {
            terms.push(PauliTerm::z(&[i], a));
        }
    }
    for (j, &b) in params.b.iter().enumerate() {
        if b != T::zero() {
            terms.push(PauliTerm::z(&[n + j], b));
        }
    }
    for (i, row) in params.w.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w != T::zero() {
                terms.push(PauliTerm::z(&[i, n + j], w));
            }
        }
    }
    PauliHamiltonian::new(n + params.p, terms)
}

/// One simplex per term on its sites, closed under faces. Multiplicities
/// follow the complex's default mode.
pub fn klocal_to_complex<T: Real>(h: &PauliHamiltonian<T>) -> Result<SimplicialComplex> {
    h.validate()?;
    SimplicialComplex::from_simplices(h.terms.iter().map(|t| t.sites.clone()))
}

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{KahanSum, Real};

/// A named discrete variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub card: usize,
}

impl Variable {
    pub fn new(name: impl Into<String>, card: usize) -> Self {
        Self {
            name: name.into(),
            card,
        }
    }
}

/// Normalized joint distribution over an ordered list of variables.
///
/// Masses are stored row-major: the first variable is the most significant
/// digit of the flat index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct ProbabilityTable<T> {
    variables: Vec<Variable>,
    masses: Vec<T>,
}

impl<T: Real> ProbabilityTable<T> {
    /// Validates shape, nonnegativity and `sum = 1 +- 1e-12`.
    pub fn new(variables: Vec<Variable>, masses: Vec<T>) -> Result<Self> {
        validate_variables(&variables, masses.len())?;
        if let Some(bad) = masses.iter().find(|m| !m.is_finite() || **m < T::zero()) {
            return Err(Error::InvalidTable(format!("mass {bad} is negative or non-finite")));
        }
        let sum = kahan_total(&masses);
        if (sum - T::one()).abs() > T::norm_tol() {
            return Err(Error::Unnormalized { sum: sum.as_f64() });
        }
        Ok(Self { variables, masses })
    }

    /// Normalizes nonnegative weights into a table.
    pub fn from_weights(variables: Vec<Variable>, weights: Vec<T>) -> Result<Self> {
        validate_variables(&variables, weights.len())?;
        if let Some(bad) = weights.iter().find(|m| !m.is_finite() || **m < T::zero()) {
            return Err(Error::InvalidTable(format!("weight {bad} is negative or non-finite")));
        }
        let total = kahan_total(&weights);
        if !(total > T::zero()) {
            return Err(Error::InvalidTable("weights sum to zero".into()));
        }
        let masses = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { variables, masses })
    }

    /// `{variables: [{name, card}], masses: [..]}`, validated like [`Self::new`].
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        Self::new(raw.variables, raw.masses)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Uniform table.
    pub fn uniform(variables: Vec<Variable>) -> Result<Self> {
        let size = variables.iter().map(|v| v.card).product::<usize>();
        Self::from_weights(variables, vec![T::one(); size])
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.card).collect()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn mass(&self, index: &[usize]) -> Result<T> {
        Ok(self.masses[self.flat_index(index)?])
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.variables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.variables.len(),
                found: index.len(),
            });
        }
        let mut flat = 0;
        for (boundary, (v, &i)) in self.variables.iter().zip(index).enumerate() {
            if i >= v.card {
                return Err(Error::IndexOutOfRange {
                    boundary,
                    index: i,
                    dim: v.card,
                });
            }
            flat = flat * v.card + i;
        }
        Ok(flat)
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.variables.len()];
        for (slot, v) in idx.iter_mut().zip(&self.variables).rev() {
            *slot = flat % v.card;
            flat /= v.card;
        }
        idx
    }

    /// Sums out every variable not in `keep`; the result follows `keep`'s order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<Self> {
        let positions: Vec<usize> = keep.iter().map(|n| self.position(n)).collect::<Result<_>>()?;
        self.marginalize_positions(&positions)
    }

    pub fn marginalize_positions(&self, keep: &[usize]) -> Result<Self> {
        let mut seen = HashSet::new();
        for &k in keep {
            if k >= self.variables.len() {
                return Err(Error::UnknownVariable(format!("#{k}")));
            }
            if !seen.insert(k) {
                return Err(Error::InvalidTable(format!(
                    "variable `{}` kept twice",
                    self.variables[k].name
                )));
            }
        }
        let variables: Vec<Variable> = keep.iter().map(|&k| self.variables[k].clone()).collect();
        let out_size = variables.iter().map(|v| v.card).product::<usize>();

        // stride of each source variable inside the output index
        let mut out_stride = vec![0usize; self.variables.len()];
        let mut s = 1;
        for &k in keep.iter().rev() {
            out_stride[k] = s;
            s *= self.variables[k].card;
        }

        let mut sums = vec![KahanSum::<T>::new(); out_size];
        let mut idx = vec![0usize; self.variables.len()];
        for &m in &self.masses {
            let target: usize = idx.iter().zip(&out_stride).map(|(i, st)| i * st).sum();
            sums[target].add(m);
            odometer_step(&mut idx, &self.variables);
        }
        Ok(Self {
            variables,
            masses: sums.iter().map(KahanSum::value).collect(),
        })
    }

    /// Table of independent variables: `p(a, b) = p(a) q(b)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().cloned());
        validate_variables(&variables, self.len() * other.len())?;
        let masses = self
            .masses
            .iter()
            .flat_map(|&a| other.masses.iter().map(move |&b| a * b))
            .collect();
        Ok(Self { variables, masses })
    }

    /// Same table with variables renamed in order.
    pub fn renamed(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.variables.len() {
            return Err(Error::DimensionMismatch {
                expected: self.variables.len(),
                found: names.len(),
            });
        }
        let variables: Vec<Variable> = self
            .variables
            .iter()
            .zip(names)
            .map(|(v, n)| Variable::new(*n, v.card))
            .collect();
        validate_variables(&variables, self.masses.len())?;
        Ok(Self {
            variables,
            masses: self.masses.clone(),
        })
    }

    /// `max |p - q|` over entries of two same-shaped tables.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.require_same_shape(other)?;
        Ok(self
            .masses
            .iter()
            .zip(&other.masses)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max))
    }

    /// Total-variation distance `1/2 sum |p - q|`.
    pub fn tv_distance(&self, other: &Self) -> Result<T> {
        self.require_same_shape(other)?;
        let mut acc = KahanSum::new();
        for (&a, &b) in self.masses.iter().zip(&other.masses) {
            acc.add((a - b).abs());
        }
        Ok(acc.value() * T::lit(0.5))
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.cards() != other.cards() {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", self.cards()),
                found: format!("{:?}", other.cards()),
            });
        }
        Ok(())
    }
}

fn validate_variables(variables: &[Variable], len: usize) -> Result<()> {
    let mut names = HashSet::new();
    let mut size: usize = 1;
    for v in variables {
        if v.card == 0 {
            return Err(Error::InvalidTable(format!("variable `{}` has cardinality 0", v.name)));
        }
        if !names.insert(v.name.as_str()) {
            return Err(Error::InvalidTable(format!("duplicate variable `{}`", v.name)));
        }
        size = size
            .checked_mul(v.card)
            .ok_or_else(|| Error::InvalidTable("table too large".into()))?;
    }
    if size != len {
        return Err(Error::ShapeMismatch {
            expected: format!("{size} masses"),
            found: format!("{len} masses"),
        });
    }
    Ok(())
}

fn kahan_total<T: Real>(xs: &[T]) -> T {
    let mut k = KahanSum::new();
    for &x in xs {
        k.add(x);
    }
    k.value()
}

/// Advances a row-major multi-index by one.
pub(crate) fn odometer_step(idx: &mut [usize], variables: &[Variable]) {
    for (slot, v) in idx.iter_mut().zip(variables).rev() {
        *slot += 1;
        if *slot < v.card {
            return;
        }
        *slot = 0;
    }
}

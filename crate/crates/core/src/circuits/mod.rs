//! Rotation-circuit template for a layered network, a statevector
//! simulator to execute it, and a QASM-like text format.
//!
//! Qubit 0 is the most significant bit of a basis index.

mod text;

pub use text::{parse_circuit, parse_circuit_json, serialize_circuit, serialize_circuit_json};

use std::collections::{BTreeMap, HashSet};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::layered_network::LayeredNetwork;
use crate::rng;
use crate::scalar::{Cplx, Real};

/// Register limit for [`emit_circuit`].
pub const MAX_EMIT_QUBITS: usize = 20;
/// Register limit for [`simulate_statevector`] and [`sample`].
pub const MAX_SIM_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate<T> {
    Ry { theta: T, target: usize },
    CCRy { theta: T, controls: [usize; 2], target: usize },
    Measure { target: usize },
}

impl<T: Real> Gate<T> {
    /// Qubits touched, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Ry { target, .. } | Gate::Measure { target } => vec![target],
            Gate::CCRy { controls, target, .. } => vec![controls[0], controls[1], target],
        }
    }

    pub fn theta(&self) -> Option<T> {
        match *self {
            Gate::Ry { theta, .. } | Gate::CCRy { theta, .. } => Some(theta),
            Gate::Measure { .. } => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::Ry { .. } => "ry",
            Gate::CCRy { .. } => "ccry",
            Gate::Measure { .. } => "measure",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitDescription<T> {
    qubits: usize,
    labels: Vec<String>,
    gates: Vec<Gate<T>>,
}

impl<T: Real> CircuitDescription<T> {
    pub fn new(qubits: usize, labels: Vec<String>, gates: Vec<Gate<T>>) -> Result<Self> {
        if labels.len() != qubits {
            return Err(Error::InvalidCircuit(format!(
                "{} labels for {qubits} qubits",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidCircuit(format!("duplicate label `{dup}`")));
        }
        if let Some(bad) = labels.iter().find(|l| l.is_empty() || l.contains('\n') || l.trim() != l.as_str()) {
            return Err(Error::InvalidCircuit(format!("bad label {bad:?}")));
        }
        let mut measured = vec![false; qubits];
        for (g, gate) in gates.iter().enumerate() {
            let qs = gate.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= qubits) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {g} touches qubit {q} outside a {qubits}-qubit register"
                )));
            }
            if qs.iter().collect::<HashSet<_>>().len() != qs.len() {
                return Err(Error::InvalidCircuit(format!("gate {g} repeats a qubit")));
            }
            if gate.theta().is_some_and(|t| !t.is_finite()) {
                return Err(Error::InvalidCircuit(format!("gate {g} has a non-finite angle")));
            }
            if let Some(&q) = qs.iter().find(|&&q| measured[q]) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {g} acts on qubit {q} after it was measured"
                )));
            }
            if let Gate::Measure { target } = *gate {
                measured[target] = true;
            }
        }
        Ok(Self {
            qubits,
            labels,
            gates,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    /// Gate count by kind, e.g. `{"ccry": 4, "measure": 9, "ry": 5}`.
    pub fn census(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for g in &self.gates {
            *out.entry(g.kind()).or_insert(0) += 1;
        }
        out
    }
}

/// One qubit per basis state of every layer, then one ancilla per nonzero
/// edge-weight entry. Each node qubit gets `Ry(bias t)`, each ancilla a
/// `CCRy(w t)` controlled by the two node qubits the entry couples, and
/// every qubit is measured at the end.
pub fn emit_circuit<T: Real>(net: &LayeredNetwork<T>, t: T) -> Result<CircuitDescription<T>> {
    if !net.is_two_local() {
        return Err(Error::KLocalUnsupported);
    }
    net.require_real_weights()?;
    if !t.is_finite() {
        return Err(Error::InvalidCircuit("time must be finite".into()));
    }
    let nodes = net.total_dim();
    let qubits = nodes + net.nonzero_weight_count();
    if qubits > MAX_EMIT_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits,
            max: MAX_EMIT_QUBITS,
        });
    }
    let offsets = net.offsets();
    let mut labels = Vec::with_capacity(qubits);
    let mut gates = Vec::new();
    for (layer, bias) in net.layers().iter().zip(net.biases()) {
        for (mu, &b) in bias.iter().enumerate() {
            gates.push(Gate::Ry {
                theta: b * t,
                target: labels.len(),
            });
            labels.push(format!("{}[{mu}]", layer.name));
        }
    }
    for (a, w) in net.weights().iter().enumerate() {
        for r in 0..w.rows() {
            for c in 0..w.cols() {
                let value = w[(r, c)].re;
                if value != T::zero() {
                    gates.push(Gate::CCRy {
                        theta: value * t,
                        controls: [offsets[a] + r, offsets[a + 1] + c],
                        target: labels.len(),
                    });
                    labels.push(format!("a{}", labels.len() - nodes + 1));
                }
            }
        }
    }
    gates.extend((0..qubits).map(|target| Gate::Measure { target }));
    CircuitDescription::new(qubits, labels, gates)
}

fn apply_ry<T: Real>(state: &mut [Cplx<T>], qubits: usize, target: usize, mask: usize, theta: T) {
    let half = theta * T::lit(0.5);
    let (s, c) = half.sin_cos();
    let bit = 1usize << (qubits - 1 - target);
    for i in 0..state.len() {
        if i & bit == 0 && i & mask == mask {
            let (a0, a1) = (state[i], state[i | bit]);
            state[i] = a0 * c - a1 * s;
            state[i | bit] = a0 * s + a1 * c;
        }
    }
}

/// Final state of the circuit applied to `|0...0>`. Measurements are
/// terminal and leave the state untouched.
pub fn simulate_statevector<T: Real>(circuit: &CircuitDescription<T>) -> Result<Vec<Cplx<T>>> {
    let n = circuit.qubits;
    if n > MAX_SIM_QUBITS {
        return Err(Error::RegisterTooLarge {
            qubits: n,
            max: MAX_SIM_QUBITS,
        });
    }
    let mut state = vec![Cplx::new(T::zero(), T::zero()); 1 << n];
    state[0] = Cplx::new(T::one(), T::zero());
    for gate in &circuit.gates {
        match *gate {
            Gate::Ry { theta, target } => apply_ry(&mut state, n, target, 0, theta),
            Gate::CCRy {
                theta,
                controls,
                target,
            } => {
                let mask = controls
                    .iter()
                    .fold(0, |m, &q| m | (1usize << (n - 1 - q)));
                apply_ry(&mut state, n, target, mask, theta);
            }
            Gate::Measure { .. } => {}
        }
    }
    Ok(state)
}

/// `|amplitude|^2` of every basis state.
pub fn probabilities<T: Real>(circuit: &CircuitDescription<T>) -> Result<Vec<T>> {
    Ok(simulate_statevector(circuit)?
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Seeded multinomial draw of `shots` outcomes; keys are basis indices,
/// only outcomes that occurred are present.
pub fn sample<T: Real>(
    circuit: &CircuitDescription<T>,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<usize, u64>> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    let probs = probabilities(circuit)?;
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0f64;
    for p in &probs {
        acc += p.as_f64();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = rng::seeded(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(k).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Basis index as a bit string, qubit 0 first.
pub fn bitstring(index: usize, qubits: usize) -> String {
    (0..qubits)
        .map(|q| if (index >> (qubits - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::ComplexMatrix;
use crate::scalar::{Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Visible,
    Hidden,
}

/// One layer of basis states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub dim: usize,
    pub kind: LayerKind,
}

impl LayerSpec {
    pub fn visible(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
            kind: LayerKind::Visible,
        }
    }

    pub fn hidden(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
            kind: LayerKind::Hidden,
        }
    }
}

/// Real rank-k coupling among `k >= 3` distinct layers, stored row-major
/// in the order the layers are listed.
#[derive(Clone, Debug, PartialEq)]
pub struct HigherWeight<T> {
    pub layers: Vec<usize>,
    pub tensor: Vec<T>,
}

/// Layered Hamiltonian data: per-layer biases (diagonal elements) and
/// per-edge weight blocks (off-diagonal elements between adjacent layers).
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredNetwork<T> {
    layers: Vec<LayerSpec>,
    biases: Vec<Vec<T>>,
    weights: Vec<ComplexMatrix<T>>,
    higher: Vec<HigherWeight<T>>,
}

impl<T: Real> LayeredNetwork<T> {
    pub fn new(
        layers: Vec<LayerSpec>,
        biases: Vec<Vec<T>>,
        weights: Vec<ComplexMatrix<T>>,
        higher: Vec<HigherWeight<T>>,
    ) -> Result<Self> {
        validate_layers(&layers)?;
        if biases.len() != layers.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} bias vectors for {} layers",
                biases.len(),
                layers.len()
            )));
        }
        for (layer, b) in layers.iter().zip(&biases) {
            if b.len() != layer.dim {
                return Err(Error::InvalidNetwork(format!(
                    "layer `{}` has dim {} but {} biases",
                    layer.name,
                    layer.dim,
                    b.len()
                )));
            }
            if b.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidNetwork(format!("non-finite bias on `{}`", layer.name)));
            }
        }
        if weights.len() != layers.len() - 1 {
            return Err(Error::InvalidNetwork(format!(
                "{} weight blocks for {} adjacent layer pairs",
                weights.len(),
                layers.len() - 1
            )));
        }
        for (a, w) in weights.iter().enumerate() {
            let expected = (layers[a].dim, layers[a + 1].dim);
            if w.shape() != expected {
                return Err(Error::InvalidNetwork(format!(
                    "weight block {}->{} is {}x{}, expected {}x{}",
                    layers[a].name,
                    layers[a + 1].name,
                    w.rows(),
                    w.cols(),
                    expected.0,
                    expected.1
                )));
            }
        }
        for hw in &higher {
            if hw.layers.len() < 3 {
                return Err(Error::InvalidNetwork("k-local weights need k >= 3 layers".into()));
            }
            let mut seen = HashSet::new();
            for &l in &hw.layers {
                if l >= layers.len() || !seen.insert(l) {
                    return Err(Error::InvalidNetwork(format!(
                        "k-local weight references layer #{l} twice or out of range"
                    )));
                }
            }
            let size: usize = hw.layers.iter().map(|&l| layers[l].dim).product();
            if hw.tensor.len() != size {
                return Err(Error::InvalidNetwork(format!(
                    "k-local tensor has {} entries, expected {size}",
                    hw.tensor.len()
                )));
            }
            if hw.tensor.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidNetwork("non-finite k-local tensor entry".into()));
            }
        }
        Ok(Self {
            layers,
            biases,
            weights,
            higher,
        })
    }

    /// Network with every bias and weight zero.
    pub fn zeros(layers: Vec<LayerSpec>) -> Result<Self> {
        validate_layers(&layers)?;
        let biases = layers.iter().map(|l| vec![T::zero(); l.dim]).collect();
        let weights = layers
            .windows(2)
            .map(|p| ComplexMatrix::zeros(p[0].dim, p[1].dim))
            .collect();
        Self::new(layers, biases, weights, Vec::new())
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn biases(&self) -> &[Vec<T>] {
        &self.biases
    }

    pub fn weights(&self) -> &[ComplexMatrix<T>] {
        &self.weights
    }

    pub fn higher(&self) -> &[HigherWeight<T>] {
        &self.higher
    }

    pub fn dims(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.dim).collect()
    }

    /// `D`, the sum of layer dimensions.
    pub fn total_dim(&self) -> usize {
        self.layers.iter().map(|l| l.dim).sum()
    }

    /// Start of each layer inside the `D`-dimensional basis.
    pub fn offsets(&self) -> Vec<usize> {
        self.layers
            .iter()
            .scan(0, |acc, l| {
                let start = *acc;
                *acc += l.dim;
                Some(start)
            })
            .collect()
    }

    pub fn layer_index(&self, name: &str) -> Result<usize> {
        self.layers
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::InvalidNetwork(format!("unknown layer `{name}`")))
    }

    pub fn set_bias(&mut self, layer: usize, state: usize, value: T) {
        self.biases[layer][state] = value;
    }

    pub fn set_weight(&mut self, edge: usize, row: usize, col: usize, value: Cplx<T>) {
        self.weights[edge][(row, col)] = value;
    }

    pub fn with_higher(mut self, higher: Vec<HigherWeight<T>>) -> Result<Self> {
        let layers = std::mem::take(&mut self.layers);
        Self::new(layers, self.biases, self.weights, higher)
    }

    pub fn is_two_local(&self) -> bool {
        self.higher.is_empty()
    }

    /// Fails with [`Error::ComplexWeights`] at the first weight with a
    /// nonzero imaginary part.
    pub fn require_real_weights(&self) -> Result<()> {
        for (edge, w) in self.weights.iter().enumerate() {
            for r in 0..w.rows() {
                if let Some(col) = w.row(r).iter().position(|z| !z.im.is_zero()) {
                    return Err(Error::ComplexWeights { edge, row: r, col });
                }
            }
        }
        Ok(())
    }

    /// Number of nonzero edge-weight entries.
    pub fn nonzero_weight_count(&self) -> usize {
        self.weights
            .iter()
            .map(|w| w.entries().iter().filter(|z| !z.is_zero()).count())
            .sum()
    }

    pub fn to_file(&self) -> NetworkFile<T> {
        let biases = self
            .layers
            .iter()
            .zip(&self.biases)
            .map(|(l, b)| (l.name.clone(), b.clone()))
            .collect();
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(a, w)| {
                (
                    edge_key(&self.layers[a].name, &self.layers[a + 1].name),
                    w.entries().iter().map(|z| [z.re, z.im]).collect(),
                )
            })
            .collect();
        let higher = self
            .higher
            .iter()
            .map(|h| HigherFile {
                layers: h.layers.iter().map(|&l| self.layers[l].name.clone()).collect(),
                tensor: h.tensor.clone(),
            })
            .collect();
        NetworkFile {
            layers: self.layers.clone(),
            biases,
            weights,
            higher,
        }
    }

    pub fn from_file(file: &NetworkFile<T>) -> Result<Self> {
        let layers = file.layers.clone();
        validate_layers(&layers)?;
        let index = |name: &str| {
            layers
                .iter()
                .position(|l| l.name == name)
                .ok_or_else(|| Error::InvalidNetwork(format!("unknown layer `{name}`")))
        };

        let mut biases: Vec<Vec<T>> = layers.iter().map(|l| vec![T::zero(); l.dim]).collect();
        for (name, b) in &file.biases {
            biases[index(name)?] = b.clone();
        }

        let mut weights: Vec<ComplexMatrix<T>> = layers
            .windows(2)
            .map(|p| ComplexMatrix::zeros(p[0].dim, p[1].dim))
            .collect();
        for (key, entries) in &file.weights {
            let (from, to) = key
                .split_once("->")
                .ok_or_else(|| Error::InvalidNetwork(format!("weight key `{key}` is not `a->b`")))?;
            let (a, b) = (index(from.trim())?, index(to.trim())?);
            if b != a + 1 {
                return Err(Error::InvalidNetwork(format!(
                    "weight `{key}` does not join adjacent layers in order"
                )));
            }
            let (r, c) = (layers[a].dim, layers[b].dim);
            if entries.len() != r * c {
                return Err(Error::InvalidNetwork(format!(
                    "weight `{key}` has {} entries, expected {}",
                    entries.len(),
                    r * c
                )));
            }
            let data = entries.iter().map(|&[re, im]| Cplx::new(re, im)).collect();
            weights[a] = ComplexMatrix::new(r, c, data)
                .map_err(|e| Error::InvalidNetwork(format!("weight `{key}`: {e}")))?;
        }

        let higher = file
            .higher
            .iter()
            .map(|h| {
                Ok(HigherWeight {
                    layers: h.layers.iter().map(|n| index(n)).collect::<Result<_>>()?,
                    tensor: h.tensor.clone(),
                })
            })
            .collect::<Result<_>>()?;
        Self::new(layers, biases, weights, higher)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile<T> = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}

fn validate_layers(layers: &[LayerSpec]) -> Result<()> {
    if layers.is_empty() {
        return Err(Error::InvalidNetwork("no layers".into()));
    }
    let mut names = HashSet::new();
    for (i, l) in layers.iter().enumerate() {
        if l.dim == 0 {
            return Err(Error::InvalidNetwork(format!("layer `{}` has dim 0", l.name)));
        }
        if !names.insert(l.name.as_str()) {
            return Err(Error::InvalidNetwork(format!("duplicate layer name `{}`", l.name)));
        }
        let terminal = i == 0 || i == layers.len() - 1;
        if i == 0 && l.kind != LayerKind::Visible {
            return Err(Error::InvalidNetwork("first layer must be visible".into()));
        }
        if !terminal && l.kind != LayerKind::Hidden {
            return Err(Error::InvalidNetwork(format!("interior layer `{}` must be hidden", l.name)));
        }
    }
    Ok(())
}

pub fn edge_key(from: &str, to: &str) -> String {
    format!("{from}->{to}")
}

/// JSON schema shared by the CLI, trainer, circuits and entropy tools.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct NetworkFile<T> {
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub biases: BTreeMap<String, Vec<T>>,
    #[serde(default)]
    pub weights: BTreeMap<String, Vec<[T; 2]>>,
    #[serde(default)]
    pub higher: Vec<HigherFile<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct HigherFile<T> {
    pub layers: Vec<String>,
    pub tensor: Vec<T>,
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How simplex multiplicities are counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplicityMode {
    /// `M(s)` = number of simplices of the complex containing `s`,
    /// `s` itself included. Entered with sign `(-1)^rank`.
    #[default]
    #[serde(rename = "paper")]
    PaperCount,
    /// Overcounting numbers `c(max) = 1`, `c(s) = 1 - sum_{t > s} c(t)`.
    /// They already carry their sign and are used as is.
    #[serde(rename = "moebius")]
    MoebiusCount,
}

impl FromStr for MultiplicityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::PaperCount),
            "moebius" | "mobius" => Ok(Self::MoebiusCount),
            other => Err(Error::InvalidConfig(format!(
                "unknown multiplicity `{other}` (expected paper|moebius)"
            ))),
        }
    }
}

impl fmt::Display for MultiplicityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PaperCount => "paper",
            Self::MoebiusCount => "moebius",
        })
    }
}

/// Face-closed set of simplices over variable positions `0..n`, each
/// stored as a sorted vertex list, with multiplicities for one mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Vec<usize>>,
    mode: MultiplicityMode,
    multiplicity: BTreeMap<Vec<usize>, i64>,
}

impl SimplicialComplex {
    /// Closure of the given simplices under taking faces.
    pub fn from_simplices<I, S>(generators: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[usize]>,
    {
        let mut simplices = BTreeSet::new();
        for g in generators {
            let mut verts = g.as_ref().to_vec();
            if verts.is_empty() {
                return Err(Error::InvalidComplex("empty simplex".into()));
            }
            verts.sort_unstable();
            if verts.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!("repeated vertex in {verts:?}")));
            }
            if verts.len() > 20 {
                return Err(Error::InvalidComplex(format!(
                    "simplex with {} vertices is too large to close",
                    verts.len()
                )));
            }
            for mask in 1u32..(1 << verts.len()) {
                let face: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                simplices.insert(face);
            }
        }
        if simplices.is_empty() {
            return Err(Error::InvalidComplex("no simplices".into()));
        }
        let mode = MultiplicityMode::default();
        let multiplicity = compute(&simplices, mode);
        Ok(Self {
            simplices,
            mode,
            multiplicity,
        })
    }

    /// Same complex with multiplicities recomputed for `mode`.
    pub fn with_multiplicities(mut self, mode: MultiplicityMode) -> Self {
        self.mode = mode;
        self.multiplicity = compute(&self.simplices, mode);
        self
    }

    pub fn mode(&self) -> MultiplicityMode {
        self.mode
    }

    pub fn simplices(&self) -> impl Iterator<Item = &[usize]> {
        self.simplices.iter().map(Vec::as_slice)
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.simplices.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.simplices
            .iter()
            .filter(|s| s.len() == 1)
            .map(|s| s[0])
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// Number of simplices of each rank, index = rank.
    pub fn counts_by_rank(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_rank() + 1];
        for s in &self.simplices {
            counts[s.len() - 1] += 1;
        }
        counts
    }

    /// Simplices that are not a proper face of another.
    pub fn maximal(&self) -> Vec<&[usize]> {
        self.simplices
            .iter()
            .filter(|s| !self.simplices.iter().any(|t| t.len() > s.len() && is_subset(s, t)))
            .map(Vec::as_slice)
            .collect()
    }

    pub fn multiplicity(&self, simplex: &[usize]) -> Option<i64> {
        let mut s = simplex.to_vec();
        s.sort_unstable();
        self.multiplicity.get(&s).copied()
    }

    pub fn multiplicities(&self) -> &BTreeMap<Vec<usize>, i64> {
        &self.multiplicity
    }

    /// Every face of every simplex is present.
    pub fn is_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            (0..s.len()).all(|skip| {
                s.len() == 1 || {
                    let face: Vec<usize> = s
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    self.simplices.contains(&face)
                }
            })
        })
    }
}

/// Multiplicity of every simplex of `complex` under `mode`.
pub fn multiplicities(complex: &SimplicialComplex, mode: MultiplicityMode) -> BTreeMap<Vec<usize>, i64> {
    compute(&complex.simplices, mode)
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    // both sorted
    let mut it = big.iter();
    small.iter().all(|v| it.any(|b| b == v))
}

fn compute(simplices: &BTreeSet<Vec<usize>>, mode: MultiplicityMode) -> BTreeMap<Vec<usize>, i64> {
    match mode {
        MultiplicityMode::PaperCount => simplices
            .iter()
            .map(|s| {
                let count = simplices.iter().filter(|t| is_subset(s, t)).count();
                (s.clone(), count as i64)
            })
            .collect(),
        MultiplicityMode::MoebiusCount => {
            let mut by_size: Vec<&Vec<usize>> = simplices.iter().collect();
            by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
            let mut out: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
            for s in by_size {
                let above: i64 = out
                    .iter()
                    .filter(|(t, _)| t.len() > s.len() && is_subset(s, t))
                    .map(|(_, &c)| c)
                    .sum();
                out.insert(s.clone(), 1 - above);
            }
            out
        }
    }
}

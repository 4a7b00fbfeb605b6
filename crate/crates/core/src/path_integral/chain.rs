use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    matrix_exponential, ComplexMatrix, EvolutionParameter, HermitianOperator,
};
use crate::scalar::{Cplx, Real};

/// How a single slice `exp(-beta/P H)` is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceScheme {
    Exact,
    /// `exp(-dB D) exp(-dB O)` with `D` the diagonal and `O` the off-diagonal part.
    SplitFirstOrder,
    /// `exp(-dB D/2) exp(-dB O) exp(-dB D/2)`.
    SplitStrang,
}

impl SliceScheme {
    pub fn tag(self) -> &'static str {
        match self {
            SliceScheme::Exact => "exact",
            SliceScheme::SplitFirstOrder => "first",
            SliceScheme::SplitStrang => "strang",
        }
    }
}

impl std::str::FromStr for SliceScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SliceScheme::Exact),
            "first" | "first_order" | "split_first_order" | "lie" => Ok(SliceScheme::SplitFirstOrder),
            "strang" | "split_strang" | "second" => Ok(SliceScheme::SplitStrang),
            other => Err(Error::InvalidConfig(format!("unknown slice scheme `{other}`"))),
        }
    }
}

/// Ordered kernels whose product resums every path.
///
/// Kernel `k` maps boundary `k` to boundary `k + 1`, so a chain of `P`
/// kernels has `P + 1` boundaries. Kernels may be rectangular as long as
/// neighbouring dimensions agree.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferChain<T> {
    kernels: Vec<ComplexMatrix<T>>,
    labels: Vec<String>,
    scheme: Option<SliceScheme>,
}

impl<T: Real> TransferChain<T> {
    /// Chain with default boundary labels `x, h1, ..., h{P-1}, x'`.
    pub fn new(kernels: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let labels = default_labels(kernels.len());
        Self::with_labels(kernels, labels)
    }

    pub fn with_labels(kernels: Vec<ComplexMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::ZeroSlices);
        }
        for (k, pair) in kernels.windows(2).enumerate() {
            if pair[0].cols() != pair[1].rows() {
                return Err(Error::ShapeMismatch {
                    expected: format!("kernel {} with {} rows", k + 1, pair[0].cols()),
                    found: format!("{} rows", pair[1].rows()),
                });
            }
        }
        if labels.len() != kernels.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: kernels.len() + 1,
                found: labels.len(),
            });
        }
        Ok(Self {
            kernels,
            labels,
            scheme: None,
        })
    }

    pub fn slices(&self) -> usize {
        self.kernels.len()
    }

    pub fn kernels(&self) -> &[ComplexMatrix<T>] {
        &self.kernels
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn scheme(&self) -> Option<SliceScheme> {
        self.scheme
    }

    /// Dimension of each of the `P + 1` boundaries.
    pub fn boundary_dims(&self) -> Vec<usize> {
        std::iter::once(self.kernels[0].rows())
            .chain(self.kernels.iter().map(ComplexMatrix::cols))
            .collect()
    }

    /// Full product `K_1 K_2 ... K_P`.
    pub fn contract(&self) -> ComplexMatrix<T> {
        let mut acc = self.kernels[0].clone();
        for k in &self.kernels[1..] {
            acc = acc.matmul(k).expect("chain dimensions validated at construction");
        }
        acc
    }

    pub fn is_real(&self) -> bool {
        self.kernels.iter().all(ComplexMatrix::is_real)
    }

    pub fn to_dump(&self) -> ChainDump<T> {
        ChainDump {
            slices: self.slices(),
            d: self.kernels[0].rows(),
            dims: self.boundary_dims(),
            scheme: self.scheme,
            labels: self.labels.clone(),
            kernels: self
                .kernels
                .iter()
                .map(|k| {
                    (0..k.rows())
                        .map(|r| k.row(r).iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_dump(dump: &ChainDump<T>) -> Result<Self> {
        let kernels = dump
            .kernels
            .iter()
            .map(|rows| {
                let r = rows.len();
                let c = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|row| row.len() != c) {
                    return Err(Error::ShapeMismatch {
                        expected: format!("rows of length {c}"),
                        found: "ragged kernel".into(),
                    });
                }
                let entries = rows.iter().flatten().map(|&[re, im]| Cplx::new(re, im)).collect();
                ComplexMatrix::new(r, c, entries)
            })
            .collect::<Result<Vec<_>>>()?;
        if kernels.len() != dump.slices {
            return Err(Error::DimensionMismatch {
                expected: dump.slices,
                found: kernels.len(),
            });
        }
        let mut chain = Self::with_labels(kernels, dump.labels.clone())?;
        chain.scheme = dump.scheme;
        Ok(chain)
    }
}

/// JSON form of a chain: kernels as nested `[re, im]` arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
pub struct ChainDump<T> {
    #[serde(rename = "P")]
    pub slices: usize,
    pub d: usize,
    pub dims: Vec<usize>,
    pub scheme: Option<SliceScheme>,
    pub labels: Vec<String>,
    pub kernels: Vec<Vec<Vec<[T; 2]>>>,
}

fn default_labels(slices: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(slices + 1);
    labels.push("x".to_string());
    labels.extend((1..slices).map(|i| format!("h{i}")));
    labels.push("x'".to_string());
    labels
}

/// Single slice kernel for step `delta` under `scheme`.
pub fn slice_kernel<T: Real>(
    h: &HermitianOperator<T>,
    delta: &EvolutionParameter<T>,
    scheme: SliceScheme,
) -> Result<ComplexMatrix<T>> {
    match scheme {
        SliceScheme::Exact => matrix_exponential(h, delta),
        SliceScheme::SplitFirstOrder => {
            let d = diagonal_exponential(h, delta, T::one());
            let o = matrix_exponential(&h.off_diagonal_part(), delta)?;
            d.matmul(&o)
        }
        SliceScheme::SplitStrang => {
            let half = diagonal_exponential(h, delta, T::lit(0.5));
            let o = matrix_exponential(&h.off_diagonal_part(), delta)?;
            half.matmul(&o)?.matmul(&half)
        }
    }
}

/// `exp(-fraction * delta * D)` for the diagonal part `D`.
fn diagonal_exponential<T: Real>(
    h: &HermitianOperator<T>,
    delta: &EvolutionParameter<T>,
    fraction: T,
) -> ComplexMatrix<T> {
    let n = h.dim();
    let step = delta.beta() * fraction;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            (-step * h.matrix()[(r, r)].re).exp()
        } else {
            Cplx::zero()
        }
    })
}

/// `P` identical slices of `exp(-beta/P H)`.
pub fn build_chain<T: Real>(
    h: &HermitianOperator<T>,
    beta: &EvolutionParameter<T>,
    slices: usize,
    scheme: SliceScheme,
) -> Result<TransferChain<T>> {
    if slices == 0 {
        return Err(Error::ZeroSlices);
    }
    let kernel = slice_kernel(h, &beta.divided(slices), scheme)?;
    let mut chain = TransferChain::new(vec![kernel; slices])?;
    chain.scheme = Some(scheme);
    Ok(chain)
}

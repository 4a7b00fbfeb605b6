use num_traits::{One, Zero};
use rayon::prelude::*;

use super::chain::TransferChain;
use crate::entropy::{ProbabilityTable, Variable};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, KahanComplex, KahanSum, Real};

/// Largest number of terms any enumeration routine will visit.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// Paths summed per block; blocks are combined in index order so results do
/// not depend on the worker count.
const BLOCK: usize = 4096;

/// Boundary indices `(alpha, mu_1, ..., mu_{P-1}, alpha')`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathIndex(pub Vec<usize>);

impl From<Vec<usize>> for PathIndex {
    fn from(v: Vec<usize>) -> Self {
        PathIndex(v)
    }
}

/// Endpoint handling for [`path_distribution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoints {
    /// Endpoints summed into the table, as in a trace.
    Free,
    /// Conditional distribution given both endpoints.
    Fixed { start: usize, end: usize },
}

fn check_path<T: Real>(chain: &TransferChain<T>, path: &[usize]) -> Result<()> {
    let dims = chain.boundary_dims();
    if path.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: path.len(),
        });
    }
    for (boundary, (&i, &d)) in path.iter().zip(&dims).enumerate() {
        if i >= d {
            return Err(Error::IndexOutOfRange {
                boundary,
                index: i,
                dim: d,
            });
        }
    }
    Ok(())
}

fn weight_unchecked<T: Real>(chain: &TransferChain<T>, path: &[usize]) -> Cplx<T> {
    chain
        .kernels()
        .iter()
        .zip(path.windows(2))
        .fold(Cplx::one(), |acc, (k, w)| acc * k[(w[0], w[1])])
}

/// Product of kernel elements along one path.
pub fn path_weight<T: Real>(chain: &TransferChain<T>, path: &PathIndex) -> Result<Cplx<T>> {
    check_path(chain, &path.0)?;
    Ok(weight_unchecked(chain, &path.0))
}

fn budget_check(count: u128) -> Result<()> {
    if count > ENUMERATION_BUDGET {
        Err(Error::EnumerationBudget {
            paths: count,
            budget: ENUMERATION_BUDGET,
        })
    } else {
        Ok(())
    }
}

fn endpoint_check(dims: &[usize], start: usize, end: usize) -> Result<()> {
    let last = dims.len() - 1;
    if start >= dims[0] {
        return Err(Error::IndexOutOfRange {
            boundary: 0,
            index: start,
            dim: dims[0],
        });
    }
    if end >= dims[last] {
        return Err(Error::IndexOutOfRange {
            boundary: last,
            index: end,
            dim: dims[last],
        });
    }
    Ok(())
}

/// Decodes `flat` into the row-major multi-index over `dims`.
fn decode(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for (slot, &d) in idx.iter_mut().zip(dims).rev() {
        *slot += 1;
        if *slot < d {
            return;
        }
        *slot = 0;
    }
}

/// Explicit sum over every interior index assignment.
pub fn amplitude_by_enumeration<T: Real>(
    chain: &TransferChain<T>,
    start: usize,
    end: usize,
) -> Result<Cplx<T>> {
    let dims = chain.boundary_dims();
    endpoint_check(&dims, start, end)?;
    let interior = &dims[1..dims.len() - 1];
    let count: u128 = interior.iter().map(|&d| d as u128).product();
    budget_check(count)?;
    let count = count as usize;
    let p = chain.slices();

    let blocks: Vec<Cplx<T>> = (0..count.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(count);
            let mut path = vec![0usize; p + 1];
            path[0] = start;
            path[p] = end;
            decode(lo, interior, &mut path[1..p]);
            let mut acc = KahanComplex::new();
            for _ in lo..hi {
                acc.add(weight_unchecked(chain, &path));
                advance(&mut path[1..p], interior);
            }
            acc.value()
        })
        .collect();

    let mut total = KahanComplex::new();
    for b in blocks {
        total.add(b);
    }
    Ok(total.value())
}

/// `(K_1 K_2 ... K_P)[start, end]` by propagating one row vector.
pub fn amplitude_by_contraction<T: Real>(
    chain: &TransferChain<T>,
    start: usize,
    end: usize,
) -> Result<Cplx<T>> {
    let dims = chain.boundary_dims();
    endpoint_check(&dims, start, end)?;
    let mut row: Vec<Cplx<T>> = chain.kernels()[0].row(start).to_vec();
    for k in &chain.kernels()[1..] {
        let mut next = vec![Cplx::zero(); k.cols()];
        for (i, &a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (n, &b) in next.iter_mut().zip(k.row(i)) {
                *n += a * b;
            }
        }
        row = next;
    }
    Ok(row[end])
}

/// Joint distribution of the boundary indices of a chain with nonnegative
/// real kernels; mass of a path is its weight over the total weight.
///
/// Kernel entries within a few ulps of zero (relative to the kernel's
/// largest entry) count as zero; anything else negative or complex is
/// reported as [`Error::NegativeKernelEntry`].
pub fn path_distribution<T: Real>(
    chain: &TransferChain<T>,
    endpoints: Endpoints,
) -> Result<ProbabilityTable<T>> {
    let dims = chain.boundary_dims();
    let kernels = real_kernels(chain)?;
    if let Endpoints::Fixed { start, end } = endpoints {
        endpoint_check(&dims, start, end)?;
    }
    let count: u128 = dims.iter().map(|&d| d as u128).product();
    budget_check(count)?;
    let count = count as usize;
    let last = dims.len() - 1;

    let mut weights = vec![T::zero(); count];
    weights
        .par_chunks_mut(BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut path = vec![0usize; dims.len()];
            decode(b * BLOCK, &dims, &mut path);
            for w in chunk.iter_mut() {
                let admissible = match endpoints {
                    Endpoints::Free => true,
                    Endpoints::Fixed { start, end } => path[0] == start && path[last] == end,
                };
                if admissible {
                    *w = kernels
                        .iter()
                        .zip(path.windows(2))
                        .fold(T::one(), |acc, (k, e)| acc * k.at(e[0], e[1]));
                }
                advance(&mut path, &dims);
            }
        });

    let mut total = KahanSum::new();
    for chunk in weights.chunks(BLOCK) {
        let mut part = KahanSum::new();
        for &w in chunk {
            part.add(w);
        }
        total.add(part.value());
    }
    let total = total.value();
    if !(total > T::zero()) {
        return Err(Error::InvalidTable("every admissible path has zero weight".into()));
    }
    let masses = weights.into_iter().map(|w| w / total).collect();
    let variables = chain
        .labels()
        .iter()
        .zip(&dims)
        .map(|(l, &d)| Variable::new(l.clone(), d))
        .collect();
    ProbabilityTable::new(variables, masses)
}

struct RealKernel<T> {
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy> RealKernel<T> {
    fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }
}

fn real_kernels<T: Real>(chain: &TransferChain<T>) -> Result<Vec<RealKernel<T>>> {
    chain
        .kernels()
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let noise = m.max_abs() * T::epsilon() * T::lit(64.0);
            let mut data = Vec::with_capacity(m.rows() * m.cols());
            for r in 0..m.rows() {
                for (c, z) in m.row(r).iter().enumerate() {
                    if z.im.abs() > noise || z.re < -noise {
                        return Err(Error::NegativeKernelEntry {
                            kernel: k,
                            row: r,
                            col: c,
                            re: z.re.as_f64(),
                            im: z.im.as_f64(),
                        });
                    }
                    data.push(z.re.max(T::zero()));
                }
            }
            Ok(RealKernel {
                cols: m.cols(),
                data,
            })
        })
        .collect()
}

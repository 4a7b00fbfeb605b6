use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Cplx<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Cplx<T>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                found: format!("{} entries", entries.len()),
            });
        }
        if let Some(pos) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Cplx::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Cplx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Real matrix from nested rows.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch {
                expected: format!("rows of length {c}"),
                found: "ragged rows".into(),
            });
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Cplx::new(x, T::zero())))
            .collect();
        Self::new(r, c, entries)
    }

    pub fn from_diagonal(diag: &[Cplx<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Cplx<T>] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Cplx<T>> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Cplx<T>> {
        (row < self.rows && col < self.cols).then(|| self.entries[row * self.cols + col])
    }

    pub fn row(&self, row: usize) -> &[Cplx<T>] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Cplx<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("{} rows on the right operand", self.cols),
                found: format!("{}x{}", rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.entries[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Cplx<T>, Cplx<T>) -> Cplx<T>) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(shape_error(self, rhs));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn trace(&self) -> Result<Cplx<T>> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Copies out the `nrows x ncols` block whose top-left corner is `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, nrows: usize, ncols: usize) -> Result<Self> {
        if row0 + nrows > self.rows || col0 + ncols > self.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("block within {}x{}", self.rows, self.cols),
                found: format!("rows {row0}..{} cols {col0}..{}", row0 + nrows, col0 + ncols),
            });
        }
        Ok(Self::from_fn(nrows, ncols, |r, c| self[(row0 + r, col0 + c)]))
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == T::zero())
    }

    pub(crate) fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

pub(crate) fn shape_error<T>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Error {
    Error::ShapeMismatch {
        expected: format!("{}x{}", a.rows, a.cols),
        found: format!("{}x{}", b.rows, b.cols),
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Cplx<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Cplx<T> {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &self.entries[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cplx<T> {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &mut self.entries[r * self.cols + c]
    }
}

/// Entrywise test `max |M - M^H| <= tol`.
pub fn check_hermitian<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    Ok(hermitian_deviation(m)? <= tol)
}

pub(crate) fn hermitian_deviation<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    m.require_square()?;
    let n = m.rows();
    let mut worst = T::zero();
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    Ok(worst)
}

/// Entrywise test `max |M^H M - I| <= tol`.
pub fn check_unitary<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<bool> {
    m.require_square()?;
    let gram = m.adjoint().matmul(m)?;
    let dev = gram.sub(&ComplexMatrix::identity(m.rows()))?.max_abs();
    Ok(dev <= tol)
}

/// `sqrt(sum |A - B|^2)`.
pub fn frobenius_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(shape_error(a, b));
    }
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(&x, &y)| (x - y).norm_sqr())
        .sum::<T>()
        .sqrt())
}

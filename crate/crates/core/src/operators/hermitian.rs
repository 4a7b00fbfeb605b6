use num_traits::Zero;

use super::evolution::EvolutionParameter;
use super::matrix::{hermitian_deviation, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

const MAX_SWEEPS: usize = 100;

/// Absolute entrywise Hermiticity tolerance: `1e-12` in double precision.
pub fn hermitian_tol<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1024.0))
}

/// Square complex matrix certified Hermitian at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: ComplexMatrix<T>,
}

/// Eigenpairs of a Hermitian operator, eigenvalues ascending and
/// eigenvectors stored as matrix columns.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates `max |M - M^H| <= 1e-12`; the stored matrix is the exact
    /// Hermitian part `(M + M^H) / 2`.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let deviation = hermitian_deviation(&matrix)?;
        if deviation > hermitian_tol() {
            return Err(Error::NotHermitian {
                deviation: deviation.as_f64(),
            });
        }
        let half = T::lit(0.5);
        let n = matrix.rows();
        let sym = ComplexMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Cplx::new(matrix[(r, r)].re, T::zero())
            } else {
                (matrix[(r, c)] + matrix[(c, r)].conj()) * half
            }
        });
        Ok(Self { matrix: sym })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Cplx::new(x, T::zero())).collect();
        Self {
            matrix: ComplexMatrix::from_diagonal(&d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.matrix[(r, c)].is_zero()))
    }

    /// Diagonal part `D` (zero off the diagonal).
    pub fn diagonal_part(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: ComplexMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    self.matrix[(r, r)]
                } else {
                    Cplx::zero()
                }
            }),
        }
    }

    /// Off-diagonal part `H - D`.
    pub fn off_diagonal_part(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: ComplexMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    Cplx::zero()
                } else {
                    self.matrix[(r, c)]
                }
            }),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            matrix: self.matrix.scale(Cplx::new(factor, T::zero())),
        }
    }

    /// Cyclic complex Jacobi diagonalization.
    pub fn eigen(&self) -> Result<Eigen<T>> {
        let n = self.dim();
        let mut a = self.matrix.clone();
        let mut v = ComplexMatrix::identity(n);
        let hundred = T::lit(100.0);
        let mut converged = n <= 1;

        for sweep in 0..MAX_SWEEPS {
            let off: T = (0..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum();
            if off == T::zero() {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r == T::zero() {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    // Once negligible against both diagonal entries the
                    // off-diagonal element is dropped outright.
                    let g = hundred * r;
                    if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                        a[(p, q)] = Cplx::zero();
                        a[(q, p)] = Cplx::zero();
                        continue;
                    }
                    rotate(&mut a, &mut v, p, q, apq, r);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let values: Vec<T> = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

        let residual = eigen_residual(&self.matrix, &values, &vectors);
        let scale = T::one() + self.matrix.frobenius_norm();
        if !converged || !residual.is_finite() || residual > T::epsilon().sqrt() * scale {
            return Err(Error::EigenFailure {
                residual: residual.as_f64(),
            });
        }
        Ok(Eigen { values, vectors })
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(self.eigen()?.values)
    }

    /// `exp(-beta H)`; see [`matrix_exponential`].
    pub fn exp(&self, beta: &EvolutionParameter<T>) -> Result<ComplexMatrix<T>> {
        matrix_exponential(self, beta)
    }
}

/// One unitary Jacobi step annihilating `a[p][q]`.
fn rotate<T: Real>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    apq: Cplx<T>,
    r: T,
) {
    let n = a.rows();
    let phase = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (T::lit(2.0) * r);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (T::lit(2.0) * theta)
    } else {
        theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    let cc = Cplx::new(c, T::zero());
    let sc = Cplx::new(s, T::zero());
    let g_pp = cc;
    let g_pq = sc;
    let g_qp = -sc * phase.conj();
    let g_qq = cc * phase.conj();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Cplx::zero();
    a[(q, p)] = Cplx::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// `||H V - V diag(values)||_F`.
fn eigen_residual<T: Real>(h: &ComplexMatrix<T>, values: &[T], vectors: &ComplexMatrix<T>) -> T {
    let n = h.rows();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            let mut hv: Cplx<T> = Cplx::zero();
            for k in 0..n {
                hv += h[(r, k)] * vectors[(k, c)];
            }
            acc += (hv - vectors[(r, c)] * values[c]).norm_sqr();
        }
    }
    acc.sqrt()
}

/// `exp(-beta H) = V exp(-beta Lambda) V^H` through the unitary eigendecomposition.
pub fn matrix_exponential<T: Real>(
    h: &HermitianOperator<T>,
    beta: &EvolutionParameter<T>,
) -> Result<ComplexMatrix<T>> {
    let eig = h.eigen()?;
    Ok(spectral_apply(&eig, |lambda| (-beta.beta() * lambda).exp()))
}

/// `V f(Lambda) V^H`.
fn spectral_apply<T: Real>(eig: &Eigen<T>, f: impl Fn(T) -> Cplx<T>) -> ComplexMatrix<T> {
    let n = eig.values.len();
    let weights: Vec<Cplx<T>> = eig.values.iter().map(|&l| f(l)).collect();
    let v = &eig.vectors;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let mut acc = Cplx::zero();
        for k in 0..n {
            acc += v[(r, k)] * weights[k] * v[(c, k)].conj();
        }
        acc
    })
}

impl<T: Real> TryFrom<ComplexMatrix<T>> for HermitianOperator<T> {
    type Error = Error;

    fn try_from(m: ComplexMatrix<T>) -> Result<Self> {
        Self::new(m)
    }
}

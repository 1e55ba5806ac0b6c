//! Small dense complex matrices, Hermitian eigenvalues and Schatten norms.
//!
//! Matrices here never exceed a handful of rows (two-level spin, seven-site
//! exciton), so everything is row-major `Vec` storage and the eigen solver
//! is cyclic Jacobi.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Hermiticity tolerance: max entrywise |A - A^dagger|.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 64;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Wraps a row-major slice of length `dim * dim`.
    pub fn from_row_major(dim: usize, data: &[C<T>]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::LayoutMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self {
            dim,
            data: data.to_vec(),
        })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C::new(d, T::zero());
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(C::zero(), |a, b| a + b)
    }

    /// Frobenius norm, sqrt(sum |a_ij|^2).
    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Largest entrywise |A - A^dagger|.
    pub fn hermitian_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        let tol = T::lit(HERMITIAN_TOL);
        if !(deviation <= tol) {
            return Err(Error::NonHermitianInput {
                deviation: deviation.to_f64_lossy(),
                tolerance: HERMITIAN_TOL,
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching unit eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<T>> {
    hermitian_eigen(a).map(|e| e.values)
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then annihilates it with a real Givens rotation.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    a.check_hermitian()?;
    let n = a.dim();
    // symmetrize so rounding in the input cannot bias the result
    let mut m = CMatrix::from_fn(n, |i, j| {
        if i == j {
            C::new(a[(i, i)].re, T::zero())
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * T::lit(0.5)
        }
    });
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_norm();
    let eps = T::epsilon() * T::lit(0.5);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite"));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate<T: Real>(m: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let n = m.dim();
    let phase = apq / mag; // e^{i phi}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    // A <- A J with J = diag(1, e^{-i phi}) * R(c, s) on the (p, q) plane
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - conj_phase * akq * s;
        m[(k, q)] = akp * s + conj_phase * akq * c;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c - phase * aqk * s;
        m[(q, k)] = apk * s + phase * aqk * c;
    }
    m[(p, q)] = C::zero();
    m[(q, p)] = C::zero();
    m[(p, p)] = C::new(m[(p, p)].re, T::zero());
    m[(q, q)] = C::new(m[(q, q)].re, T::zero());

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - conj_phase * vkq * s;
        v[(k, q)] = vkp * s + conj_phase * vkq * c;
    }
}

/// Schatten norm order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchattenP {
    /// Trace norm.
    One,
    /// Hilbert-Schmidt norm.
    Two,
    /// Operator norm.
    Infinity,
}

impl SchattenP {
    pub const ALL: [SchattenP; 3] = [SchattenP::One, SchattenP::Two, SchattenP::Infinity];
}

/// Singular values of `a`, in no particular order.
///
/// Hermitian inputs use |eigenvalues| directly; anything else goes through
/// the eigenvalues of A^dagger A.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    if a.hermitian_deviation() <= T::lit(HERMITIAN_TOL) {
        if let Ok(vals) = hermitian_eigenvalues(a) {
            return vals.into_iter().map(|x| x.abs()).collect();
        }
    }
    let gram = a.adjoint().matmul(a);
    hermitian_eigenvalues(&gram)
        .expect("A^dagger A is Hermitian by construction")
        .into_iter()
        .map(|x| x.max(T::zero()).sqrt())
        .collect()
}

/// Schatten p-norm for p in {1, 2, infinity}.
pub fn schatten_norm<T: Real>(a: &CMatrix<T>, p: SchattenP) -> T {
    let sv = singular_values(a);
    match p {
        SchattenP::One => sv.iter().copied().sum(),
        SchattenP::Two => sv.iter().map(|&s| s * s).sum::<T>().sqrt(),
        SchattenP::Infinity => sv.iter().copied().fold(T::zero(), T::max),
    }
}

/// Convenience constructor for a complex scalar.
#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

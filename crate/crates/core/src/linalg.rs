//! Small dense complex linear algebra: fixed 4×4 matrices for moments and a
//! dynamically sized square matrix for the 16×16 Kronecker systems.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cr<T: Scalar>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// Fixed-size 4×4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat4<T>(pub [[C<T>; 4]; 4]);

impl<T: Scalar> Mat4<T> {
    pub fn zeros() -> Self {
        Self([[C::zero(); 4]; 4])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_real_diagonal(d: [T; 4]) -> Self {
        Self::from_fn(|i, j| if i == j { cr(d[i]) } else { C::zero() })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn mul_vec(&self, v: &[C<T>; 4]) -> [C<T>; 4] {
        let mut out = [C::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o = *o + self.0[i][j] * vj;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.max_abs_diff(&Self::zeros())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn to_dmat(&self) -> DMat<T> {
        DMat::from_fn(4, |i, j| self.0[i][j])
    }
}

impl<T: Scalar> Index<(usize, usize)> for Mat4<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.0[i][j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.0[i][j]
    }
}

impl<T: Scalar> Add for Mat4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Scalar> Sub for Mat4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Scalar> Mul for Mat4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| {
            (0..4).fold(C::zero(), |acc, k| acc + self.0[i][k] * rhs.0[k][j])
        })
    }
}

/// Column-stacking vectorization: columns are concatenated left to right.
pub fn vec_columns<T: Scalar>(m: &Mat4<T>) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(16);
    for j in 0..4 {
        for i in 0..4 {
            out.push(m.0[i][j]);
        }
    }
    out
}

/// Kronecker product of two 4×4 matrices, `(A ⊗ B)[4i+k, 4j+l] = A[i,j]·B[k,l]`.
pub fn kron<T: Scalar>(a: &Mat4<T>, b: &Mat4<T>) -> DMat<T> {
    DMat::from_fn(16, |row, col| a.0[row / 4][col / 4] * b.0[row % 4][col % 4])
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> DMat<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(v)
                    .fold(C::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Solves `self · x = b` by LU decomposition with partial pivoting.
    pub fn solve(&self, b: &[C<T>]) -> Option<Vec<C<T>>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = self.max_abs();
        if scale == T::zero() {
            return None;
        }
        let tiny = scale * T::epsilon() * T::lit(1e-3);
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&p, &q| a[p * n + k].norm().partial_cmp(&a[q * n + k].norm()).unwrap())
                .unwrap();
            if a[pivot * n + k].norm() <= tiny {
                return None;
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                x.swap(k, pivot);
            }
            let inv: C<T> = C::<T>::one() / a[k * n + k];
            for i in k + 1..n {
                let f: C<T> = a[i * n + k] * inv;
                if f == C::zero() {
                    continue;
                }
                for j in k..n {
                    let akj = a[k * n + j];
                    a[i * n + j] = a[i * n + j] - f * akj;
                }
                let xk = x[k];
                x[i] = x[i] - f * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues are returned in ascending order; column `k` of
    /// the returned matrix is the eigenvector for eigenvalue `k`.
    pub fn hermitian_eigen(&self) -> HermitianEigen<T> {
        let n = self.n;
        let mut a = self.clone();
        let mut v = DMat::identity(n);
        let total = a.data.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        let threshold = total * T::epsilon() * T::epsilon();

        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(T::zero(), |s, (i, j)| s + a[(i, j)].norm_sqr());
            if off <= threshold {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let g = apq.norm();
                    if g == T::zero() {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phase = apq / g;
                    let theta = (aqq - app) / (T::two() * g);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    // J = diag(1, conj(phase)) · [[c, s], [-s, c]]
                    let jpp = cr(c);
                    let jpq = cr(s);
                    let jqp = phase.conj() * (-s);
                    let jqq = phase.conj() * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = DMat::from_fn(n, |row, col| v[(row, order[col])]);
        HermitianEigen { values, vectors }
    }
}

impl<T> Index<(usize, usize)> for DMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Sub for &DMat<T> {
    type Output = DMat<T>;
    fn sub(self, rhs: Self) -> DMat<T> {
        assert_eq!(self.n, rhs.n);
        DMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: DMat<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    /// Ratio of the largest to the smallest eigenvalue magnitude.
    pub fn condition_number(&self) -> T {
        let (lo, hi) = self
            .values
            .iter()
            .fold((T::infinity(), T::zero()), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
        if lo == T::zero() {
            T::infinity()
        } else {
            hi / lo
        }
    }

    /// Components `V† x` of a vector in the eigenbasis.
    pub fn project(&self, x: &[C<T>]) -> Vec<C<T>> {
        let n = self.vectors.dim();
        (0..n)
            .map(|k| (0..n).fold(C::zero(), |acc, i| acc + self.vectors[(i, k)].conj() * x[i]))
            .collect()
    }
}

pub(crate) fn inner<T: Scalar>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    x.iter().zip(y).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
}

pub(crate) fn norm<T: Scalar>(x: &[C<T>]) -> T {
    x.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

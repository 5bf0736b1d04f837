//! Small dense vector/matrix helpers. Nothing here is performance-critical;
//! the instances in this crate are desk-scale.

use crate::real::Real;
use crate::{Error, Result};

pub fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm2<S: Real>(x: &[S]) -> S {
    dot(x, x).sqrt()
}

pub fn norm1<S: Real>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, &v| acc + v.abs())
}

pub fn norm_inf<S: Real>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |acc, &v| acc.max(v.abs()))
}

/// ℓp norm for finite p ≥ 1.
pub fn norm_p<S: Real>(x: &[S], p: S) -> S {
    if p == S::of(2.0) {
        return norm2(x);
    }
    let sum = x.iter().fold(S::zero(), |acc, &v| acc + v.abs().powf(p));
    sum.powf(p.recip())
}

pub fn sub<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<S: Real>(a: &[S], t: S) -> Vec<S> {
    a.iter().map(|&x| x * t).collect()
}

/// `(1-θ)·x + θ·s`, the convex-combination update. Kept in this form (rather
/// than `x + θ(s-x)`) so iterates stay inside the convex hull under floating
/// point.
pub fn convex_combine<S: Real>(x: &[S], s: &[S], theta: S) -> Vec<S> {
    let one = S::one();
    x.iter()
        .zip(s)
        .map(|(&a, &b)| (one - theta) * a + theta * b)
        .collect()
}

pub fn all_finite<S: Real>(x: &[S]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Real> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend(row);
        }
        Matrix { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// `Aᵀ x`.
    pub fn matvec_transpose(&self, x: &[S]) -> Vec<S> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![S::zero(); self.n];
        for i in 0..self.n {
            let xi = x[i];
            for j in 0..self.n {
                out[j] = out[j] + self.data[i * self.n + j] * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(S::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j))
        })
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Max absolute column sum (operator 1-norm).
    pub fn one_norm(&self) -> S {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).fold(S::zero(), |acc, i| acc + self.get(i, j).abs()))
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix<S>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for row in col + 1..n {
                if a.get(row, col).abs() > a.get(pivot, col).abs() {
                    pivot = row;
                }
            }
            let pv = a.get(pivot, col);
            if pv.abs() < S::of(1e-300) {
                return Err(Error::Usage("singular matrix in reparametrization".into()));
            }
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let inv_pv = pv.recip();
            for j in 0..n {
                a.set(col, j, a.get(col, j) * inv_pv);
                inv.set(col, j, inv.get(col, j) * inv_pv);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a.get(row, col);
                if factor == S::zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(row, j, a.get(row, j) - factor * a.get(col, j));
                    inv.set(row, j, inv.get(row, j) - factor * inv.get(col, j));
                }
            }
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let a: Matrix<f64> =
            Matrix::from_rows(vec![vec![2.0, 1.0, 0.0], vec![0.5, 3.0, -1.0], vec![0.0, 1.0, 1.5]]);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_rejected() {
        let a: Matrix<f64> = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn lp_norms() {
        let x = vec![3.0_f64, -4.0];
        assert!((norm_p(&x, 2.0) - 5.0).abs() < 1e-14);
        assert!((norm1(&x) - 7.0).abs() < 1e-14);
        assert!((norm_inf(&x) - 4.0).abs() < 1e-14);
        assert!((norm_p(&x, 4.0) - (81.0_f64 + 256.0).powf(0.25)).abs() < 1e-14);
    }
}

//! Dense exact matrices.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<BigRational>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>>
    where
        T: Clone,
    {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self
    where
        T: Clone,
    {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool
    where
        T: PartialEq,
    {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: std::ops::Mul<&'a T, Output = T>,
{
    /// Product skipping zero entries of the left factor.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        let slot = &mut out[(i, j)];
                        *slot = std::mem::replace(slot, T::zero()) + prod;
                    }
                }
            }
        }
        out
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|v| BigRational::from_integer(v.clone()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = v.div_floor(&prev);
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }
}

impl RatMatrix {
    /// Gauss–Jordan inverse, pivoting on the first nonzero entry of each
    /// column.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    if !a[(col, j)].is_zero() {
                        a[(r, j)] = &a[(r, j)] - &f * &a[(col, j)];
                    }
                    if !inv[(col, j)].is_zero() {
                        inv[(r, j)] = &inv[(r, j)] - &f * &inv[(col, j)];
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Largest common denominator scaled out: returns `(s, M)` with
    /// `self = M / s` and `M` integral.
    pub fn scaled_integer(&self) -> (BigInt, IntMatrix) {
        let s = self.data.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let m = self.map(|v| (v * BigRational::from_integer(s.clone())).to_integer());
        (s.abs(), m)
    }
}

/// Inverse of an integer matrix by exact rational elimination; the
/// reference against which the factored inverse is checked.
pub fn rational_inverse_oracle(m: &IntMatrix) -> Result<RatMatrix> {
    m.to_rational().inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn identity_inverse() {
        let i = IntMatrix::identity(4);
        assert_eq!(rational_inverse_oracle(&i).unwrap(), RatMatrix::identity(4));
    }

    #[test]
    fn two_by_two_connectivity_matrix() {
        let a = IntMatrix::from_i64(&[vec![0, 1], vec![1, 1]]);
        let inv = rational_inverse_oracle(&a).unwrap();
        assert_eq!(inv, IntMatrix::from_i64(&[vec![-1, 1], vec![1, 0]]).to_rational());
        assert_eq!(a.determinant().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn singular_is_reported() {
        let a = IntMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rational_inverse_oracle(&a), Err(Error::SingularMatrix));
        assert_eq!(a.determinant().unwrap(), BigInt::zero());
        assert!(matches!(IntMatrix::zeros(2, 3).determinant(), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let a = IntMatrix::from_i64(&[vec![2, -1, 0, 3], vec![1, 0, 4, -2], vec![0, 5, 1, 1], vec![3, 1, -1, 0]]);
        fn cofactor(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|j| {
                    let minor: Vec<Vec<i64>> =
                        m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * m[0][j] * cofactor(&minor)
                })
                .sum()
        }
        let rows: Vec<Vec<i64>> = a.to_rows().iter().map(|r| r.iter().map(|v| v.try_into().unwrap()).collect()).collect();
        assert_eq!(a.determinant().unwrap(), BigInt::from(cofactor(&rows)));
    }

    #[test]
    fn product_and_scaling() {
        let a = RatMatrix::from_fn(2, 2, |i, j| rat((i + 2 * j) as i64, 2));
        let (s, m) = a.scaled_integer();
        assert_eq!(s, BigInt::from(2));
        assert_eq!(m, IntMatrix::from_i64(&[vec![0, 2], vec![1, 3]]));
        let prod = a.mul(&RatMatrix::identity(2));
        assert_eq!(prod, a);
    }
}

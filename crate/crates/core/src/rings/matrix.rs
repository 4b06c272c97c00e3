use std::fmt::Debug;

use super::{RingElem, SystematicRing};
use crate::error::{Error, Result};

/// The arithmetic a dense matrix needs from its entry ring.
pub trait RingOps {
    type Elem: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl RingOps for SystematicRing {
    type Elem = RingElem;
    fn zero(&self) -> RingElem {
        SystematicRing::zero(self)
    }
    fn one(&self) -> RingElem {
        SystematicRing::one(self)
    }
    fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        SystematicRing::add(self, a, b)
    }
    fn neg(&self, a: &RingElem) -> RingElem {
        SystematicRing::neg(self, a)
    }
    fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        SystematicRing::mul(self, a, b)
    }
    fn is_zero(&self, a: &RingElem) -> bool {
        a.is_zero()
    }
}

/// `Z/n` on machine integers, used by the brute-force oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZMod(pub u64);

impl RingOps for ZMod {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (a * b) % self.0
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a % self.0 == 0
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!("rows must have length {cols}")));
        }
        let n = rows.len();
        Ok(Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.data.iter().enumerate().map(move |(k, v)| (k / self.cols.max(1), k % self.cols.max(1), v))
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Assembles a matrix from a grid of blocks with consistent shapes.
    pub fn from_blocks(grid: &[Vec<&Matrix<T>>]) -> Result<Self> {
        let heights: Vec<usize> = grid.iter().map(|r| r.first().map_or(0, |b| b.rows)).collect();
        let widths: Vec<usize> = grid.first().map_or(Vec::new(), |r| r.iter().map(|b| b.cols).collect());
        for (bi, r) in grid.iter().enumerate() {
            if r.len() != widths.len() || r.iter().enumerate().any(|(bj, b)| b.rows != heights[bi] || b.cols != widths[bj]) {
                return Err(Error::ShapeMismatch("inconsistent block shapes".into()));
            }
        }
        let rows: usize = heights.iter().sum();
        let cols: usize = widths.iter().sum();
        let mut data = Vec::with_capacity(rows * cols);
        for (bi, r) in grid.iter().enumerate() {
            for i in 0..heights[bi] {
                for b in r {
                    data.extend_from_slice(b.row(i));
                }
            }
        }
        Ok(Matrix { rows, cols, data })
    }
}

impl<T: Clone + PartialEq + Debug> Matrix<T> {
    pub fn zeros<R: RingOps<Elem = T>>(ring: &R, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity<R: RingOps<Elem = T>>(ring: &R, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn is_zero<R: RingOps<Elem = T>>(&self, ring: &R) -> bool {
        self.data.iter().all(|x| ring.is_zero(x))
    }

    pub fn add<R: RingOps<Elem = T>>(&self, ring: &R, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| ring.add(a, b)).collect(),
        })
    }

    pub fn neg<R: RingOps<Elem = T>>(&self, ring: &R) -> Self {
        self.map(|a| ring.neg(a))
    }

    pub fn sub<R: RingOps<Elem = T>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.add(ring, &other.neg(ring))
    }

    pub fn mul<R: RingOps<Elem = T>>(&self, ring: &R, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ring.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if ring.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = ring.add(&out.data[idx], &ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Product of a chain `m_1 · m_2 · ... · m_k`.
    pub fn chain<R: RingOps<Elem = T>>(ring: &R, ms: &[&Self]) -> Result<Self> {
        let (first, rest) = ms.split_first().ok_or_else(|| Error::ShapeMismatch("empty product".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, m| acc.mul(ring, m))
    }

    pub fn is_idempotent<R: RingOps<Elem = T>>(&self, ring: &R) -> bool {
        self.rows == self.cols && self.mul(ring, self).is_ok_and(|sq| sq == *self)
    }

    /// Block diagonal sum `self ⊕ other`.
    pub fn direct_sum<R: RingOps<Elem = T>>(&self, ring: &R, other: &Self) -> Self {
        Matrix::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => ring.zero(),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_matrix_arithmetic() {
        let r = ZMod(4);
        let a = Matrix::from_rows(vec![vec![1, 2], vec![0, 0]], 2).unwrap();
        assert!(a.is_idempotent(&r));
        let b = Matrix::from_rows(vec![vec![3, 1], vec![1, 3]], 2).unwrap();
        let ab = a.mul(&r, &b).unwrap();
        assert_eq!(ab.to_rows(), vec![vec![1, 3], vec![0, 0]]);
        assert!(a.sub(&r, &a).unwrap().is_zero(&r));
        let s = a.direct_sum(&r, &Matrix::identity(&r, 1));
        assert!(s.is_idempotent(&r));
        let top = a.block(0, 1, 0, 2);
        let glued = Matrix::from_blocks(&[vec![&top], vec![&a.block(1, 2, 0, 2)]]).unwrap();
        assert_eq!(glued, a);
        assert!(a.mul(&r, &top).is_err());
    }
}

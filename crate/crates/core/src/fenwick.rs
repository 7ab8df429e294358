//! Binary indexed tree over a difference array: range add, point query.

use std::ops::{AddAssign, Neg};

use num_traits::Zero;

use crate::error::{Error, Result};

/// Range-add / point-query accumulator with 1-based positions.
///
/// Stores the difference array `d` where `value(i) = d[1] + ... + d[i]`, so
/// `add(l, r, v)` touches two prefix cells and `query(i)` is a prefix sum.
#[derive(Debug, Clone)]
pub struct FenwickTree<T> {
    cells: Vec<T>,
}

impl<T> FenwickTree<T>
where
    T: Copy + Zero + AddAssign + Neg<Output = T>,
{
    pub fn new(size: usize) -> Self {
        FenwickTree {
            cells: vec![T::zero(); size + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Adds `value` to every position in `l..=r`.
    pub fn add(&mut self, l: usize, r: usize, value: T) -> Result<()> {
        let size = self.len();
        for index in [l, r] {
            if index == 0 || index > size {
                return Err(Error::OutOfBounds { index, size });
            }
        }
        if l > r {
            return Err(Error::invalid(format!("empty range {l}..={r}")));
        }
        self.add_in_bounds(l, r, value);
        Ok(())
    }

    /// Value at position `i`.
    pub fn query(&self, i: usize) -> Result<T> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfBounds {
                index: i,
                size: self.len(),
            });
        }
        Ok(self.query_in_bounds(i))
    }

    #[inline]
    pub(crate) fn add_in_bounds(&mut self, l: usize, r: usize, value: T) {
        debug_assert!(1 <= l && l <= r && r <= self.len());
        self.bump(l, value);
        if r < self.len() {
            self.bump(r + 1, -value);
        }
    }

    #[inline]
    pub(crate) fn query_in_bounds(&self, mut i: usize) -> T {
        let mut acc = T::zero();
        while i > 0 {
            acc += self.cells[i];
            i &= i - 1;
        }
        acc
    }

    #[inline]
    fn bump(&mut self, mut i: usize, value: T) {
        while i < self.cells.len() {
            self.cells[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// True when every internal cell is zero, i.e. every query returns zero.
    pub fn is_zeroed(&self) -> bool
    where
        T: PartialEq,
    {
        self.cells.iter().all(|c| c.is_zero())
    }

    pub fn clear(&mut self) {
        self.cells.fill(T::zero());
    }
}

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square, row-major 2-D array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D<T> {
    side: usize,
    values: Vec<T>,
}

impl<T> Grid2D<T> {
    pub fn new(side: usize, values: Vec<T>) -> Result<Self> {
        if side * side != values.len() {
            return Err(Error::DimensionMismatch {
                expected: side * side,
                actual: values.len(),
            });
        }
        Ok(Self { side, values })
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(side * side);
        for r in 0..side {
            for c in 0..side {
                values.push(f(r, c));
            }
        }
        Self { side, values }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.values[row * self.side + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut T {
        &mut self.values[row * self.side + col]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid2D<U> {
        Grid2D {
            side: self.side,
            values: self.values.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Grid2D<T> {
    pub fn filled(side: usize, value: T) -> Self {
        Self {
            side,
            values: alloc::vec![value; side * side],
        }
    }

    /// Row-major flattening; inverse of [`crate::basis::reshape_2d`].
    pub fn flatten(&self) -> Vec<T> {
        self.values.clone()
    }
}

impl Grid2D<f64> {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Position of the largest value (first one in row-major order on ties).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best / self.side, best % self.side)
    }
}

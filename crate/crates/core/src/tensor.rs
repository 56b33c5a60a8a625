//! Dense row-major tensors and their matricizations.
//!
//! Modes are 0-indexed: mode `n` here is mode `n + 1` in the usual
//! 1-indexed mathematical notation.
//!
//! The mode-`n` unfolding places `I_n` on the rows and enumerates the
//! remaining indices on the columns in row-major order (increasing mode,
//! last index fastest), skipping mode `n`. Element `(i_1, …, i_N)` lands at
//! row `i_n`, column `j = Σ_{k≠n} i_k · Π_{m>k, m≠n} I_m`. With this ordering
//! the mode-0 unfolding of a contiguous tensor is exactly its backing buffer.

use std::fmt;

use crate::error::{invalid, mismatch, Result};
use crate::matrix::Matrix;
use crate::random;

#[derive(Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Wraps a row-major buffer. Every dimension must be positive and the
    /// buffer length must equal the product of the dimensions.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(invalid!("tensor order must be at least 1"));
        }
        if let Some(k) = shape.iter().position(|&d| d == 0) {
            return Err(invalid!("dimension {k} of shape {shape:?} is zero"));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(mismatch!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            ));
        }
        Ok(Self { shape, data })
    }

    /// Order-0 tensor holding a single value; produced by contracting away the last mode.
    pub fn scalar(value: f64) -> Self {
        Self { shape: Vec::new(), data: vec![value] }
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        Self::new(shape.to_vec(), vec![0.0; shape.iter().product()])
    }

    pub fn filled(shape: &[usize], value: f64) -> Result<Self> {
        Self::new(shape.to_vec(), vec![value; shape.iter().product()])
    }

    /// Builds a tensor by evaluating `f` at every multi-index in row-major order.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let total: usize = shape.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..total {
            data.push(f(&idx));
            increment(&mut idx, shape);
        }
        Self::new(shape.to_vec(), data)
    }

    /// I.i.d. standard normal entries from a ChaCha8 stream seeded with `seed`.
    pub fn random_gaussian(shape: &[usize], seed: u64) -> Result<Self> {
        let total: usize = shape.iter().product();
        let mut rng = random::seeded(seed);
        Self::new(shape.to_vec(), random::gaussian_vec(&mut rng, total))
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Row-major strides, in elements.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.shape.len()];
        for k in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.shape[k + 1];
        }
        strides
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index.iter().zip(self.strides()).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let off = self.offset(index);
        self.data[off] = value;
    }

    /// Mode-`mode` unfolding; see the module docs for the column ordering.
    pub fn unfold(&self, mode: usize) -> Result<Matrix> {
        self.check_mode(mode)?;
        let (outer, dim, inner) = split_at_mode(&self.shape, mode);
        if outer == 1 {
            return Matrix::new(dim, inner, self.data.clone());
        }
        let cols = outer * inner;
        let mut out = vec![0.0; dim * cols];
        for a in 0..outer {
            for i in 0..dim {
                let src = (a * dim + i) * inner;
                let dst = i * cols + a * inner;
                out[dst..dst + inner].copy_from_slice(&self.data[src..src + inner]);
            }
        }
        Matrix::new(dim, cols, out)
    }

    /// Inverse of [`DenseTensor::unfold`]: rebuilds a tensor of `shape` from its mode-`mode` unfolding.
    pub fn fold(matrix: &Matrix, mode: usize, shape: &[usize]) -> Result<Self> {
        if mode >= shape.len() {
            return Err(invalid!("mode {mode} out of range for order {}", shape.len()));
        }
        if shape.contains(&0) {
            return Err(invalid!("shape {shape:?} has a zero dimension"));
        }
        let (outer, dim, inner) = split_at_mode(shape, mode);
        if matrix.rows() != dim || matrix.cols() != outer * inner {
            return Err(mismatch!(
                "cannot fold {}x{} matrix along mode {mode} into {shape:?} (expected {dim}x{})",
                matrix.rows(),
                matrix.cols(),
                outer * inner
            ));
        }
        if outer == 1 {
            return Self::new(shape.to_vec(), matrix.as_slice().to_vec());
        }
        let cols = outer * inner;
        let src = matrix.as_slice();
        let mut out = vec![0.0; dim * cols];
        for a in 0..outer {
            for i in 0..dim {
                let from = i * cols + a * inner;
                let to = (a * dim + i) * inner;
                out[to..to + inner].copy_from_slice(&src[from..from + inner]);
            }
        }
        Self::new(shape.to_vec(), out)
    }

    /// Row-major flattening, identical to the row-major flattening of `unfold(0)`.
    pub fn vectorize(&self) -> Vec<f64> {
        self.data.clone()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sum of absolute values.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Frobenius inner product.
    pub fn inner(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseTensor {
        DenseTensor { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseTensor { shape: self.shape.clone(), data })
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scaled(&self, factor: f64) -> DenseTensor {
        self.map(|v| v * factor)
    }

    /// `‖self − other‖_F / ‖self‖_F`, or `‖other‖_F` when `self` is zero.
    pub fn relative_error(&self, approx: &DenseTensor) -> Result<f64> {
        let diff = self.sub(approx)?.frobenius_norm();
        let norm = self.frobenius_norm();
        Ok(if norm == 0.0 { approx.frobenius_norm() } else { diff / norm })
    }

    pub fn max_abs_diff(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.order() {
            return Err(invalid!("mode {mode} out of range for order-{} tensor", self.order()));
        }
        Ok(())
    }

    pub(crate) fn check_same_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(mismatch!("shapes {:?} and {:?} differ", self.shape, other.shape));
        }
        Ok(())
    }
}

/// `(Π_{k<mode} I_k, I_mode, Π_{k>mode} I_k)`.
pub(crate) fn split_at_mode(shape: &[usize], mode: usize) -> (usize, usize, usize) {
    let outer = shape[..mode].iter().product();
    let inner = shape[mode + 1..].iter().product();
    (outer, shape[mode], inner)
}

/// Advances a multi-index in row-major order, wrapping to all zeros at the end.
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

impl fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseTensor")
            .field("shape", &self.shape)
            .field("data", &self.data)
            .finish()
    }
}

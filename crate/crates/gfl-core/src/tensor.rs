//! Dense row-major tensors over `f64`.
//!
//! The kernel deliberately stays small: rank-1 and rank-2 tensors cover every
//! model in this workspace, and the few linear-algebra routines the GRU and
//! the GAN need are written out by hand so their cost is explicit.

use crate::error::{CoreError, Result};

/// A dense tensor: a shape and a row-major value buffer.
///
/// Invariant: `data.len() == shape.iter().product()`. Constructors enforce
/// this; the buffer is never resized afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Tensor of zeros with the given shape.
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; len],
        }
    }

    /// Rank-1 tensor wrapping `data`.
    pub fn vector(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    /// Rank-2 tensor with `rows * cols` values laid out row-major.
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoreError::Shape(format!(
                "matrix {}x{} needs {} values, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Tensor {
            shape: vec![rows, cols],
            data,
        })
    }

    /// Arbitrary-rank tensor from a shape and a flat buffer.
    pub fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expect: usize = shape.iter().product();
        if data.len() != expect {
            return Err(CoreError::Shape(format!(
                "shape {:?} needs {} values, got {}",
                shape,
                expect,
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Number of rows of a rank-2 tensor (panics on other ranks).
    pub fn rows(&self) -> usize {
        assert_eq!(self.rank(), 2, "rows() needs a rank-2 tensor");
        self.shape[0]
    }

    /// Number of columns of a rank-2 tensor (panics on other ranks).
    pub fn cols(&self) -> usize {
        assert_eq!(self.rank(), 2, "cols() needs a rank-2 tensor");
        self.shape[1]
    }

    /// Element of a rank-2 tensor.
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        debug_assert_eq!(self.rank(), 2);
        self.data[row * self.shape[1] + col]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut f64 {
        debug_assert_eq!(self.rank(), 2);
        &mut self.data[row * self.shape[1] + col]
    }

    /// `y = M x` for a rank-2 `self` and a vector of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rank(), 2, "matvec needs a rank-2 tensor");
        let (rows, cols) = (self.shape[0], self.shape[1]);
        assert_eq!(cols, x.len(), "matvec dimension mismatch");
        let mut out = vec![0.0; rows];
        for r in 0..rows {
            let row = &self.data[r * cols..(r + 1) * cols];
            let mut acc = 0.0;
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            out[r] = acc;
        }
        out
    }

    /// `y = Mᵀ x` for a rank-2 `self` and a vector of length `rows`.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rank(), 2, "matvec_t needs a rank-2 tensor");
        let (rows, cols) = (self.shape[0], self.shape[1]);
        assert_eq!(rows, x.len(), "matvec_t dimension mismatch");
        let mut out = vec![0.0; cols];
        for r in 0..rows {
            let row = &self.data[r * cols..(r + 1) * cols];
            let xv = x[r];
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * xv;
            }
        }
        out
    }

    /// Accumulate the outer product `a bᵀ` scaled by `scale` into `self`.
    pub fn add_outer(&mut self, a: &[f64], b: &[f64], scale: f64) {
        assert_eq!(self.rank(), 2, "add_outer needs a rank-2 tensor");
        let (rows, cols) = (self.shape[0], self.shape[1]);
        assert_eq!(rows, a.len(), "add_outer row mismatch");
        assert_eq!(cols, b.len(), "add_outer col mismatch");
        for r in 0..rows {
            let av = a[r] * scale;
            let row = &mut self.data[r * cols..(r + 1) * cols];
            for (w, bv) in row.iter_mut().zip(b) {
                *w += av * bv;
            }
        }
    }

    /// Accumulate `scale * v` into a rank-1 tensor.
    pub fn add_scaled(&mut self, v: &[f64], scale: f64) {
        assert_eq!(self.data.len(), v.len(), "add_scaled length mismatch");
        for (d, s) in self.data.iter_mut().zip(v) {
            *d += s * scale;
        }
    }

    /// Scale every element in place.
    pub fn scale(&mut self, factor: f64) {
        for d in &mut self.data {
            *d *= factor;
        }
    }

    /// Error if any element is NaN or infinite.
    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(CoreError::NonFinite(context.to_string()))
        }
    }
}

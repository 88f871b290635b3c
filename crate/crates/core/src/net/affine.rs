use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dim(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copy of this matrix grown to `rows x cols`, new entries zero.
    pub fn padded(&self, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows.max(self.rows), cols.max(self.cols));
        for r in 0..self.rows {
            out.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    /// Accumulate `self * x` into `out` (length `rows`).
    #[inline]
    pub fn mul_add_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate().take(self.rows) {
            let row = self.row(r);
            let mut acc = 0.0;
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            *o += acc;
        }
    }
}

/// `x -> W x + b`, the building block of every network.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    weights: Matrix,
    bias: Vec<f64>,
}

impl AffineMap {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::dim(format!(
                "bias has length {} but weight matrix has {} rows",
                bias.len(),
                weights.rows()
            )));
        }
        if !weights.is_finite() || bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::arg("affine map entries must be finite"));
        }
        Ok(AffineMap { weights, bias })
    }

    /// Build from nested rows; `cols` is needed so that zero-row maps keep
    /// their input dimension.
    pub fn from_rows(rows: &[Vec<f64>], cols: usize, bias: Vec<f64>) -> Result<Self> {
        AffineMap::new(Matrix::from_rows(rows, cols)?, bias)
    }

    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        AffineMap {
            weights: Matrix::zeros(out_dim, in_dim),
            bias: vec![0.0; out_dim],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out[..self.bias.len()].copy_from_slice(&self.bias);
        self.weights.mul_add_into(x, out);
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.output_dim()];
        self.apply_into(x, &mut out);
        out
    }
}

#[inline]
pub(crate) fn relu_in_place(v: &mut [f64]) {
    for x in v {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bias_length_must_match_rows() {
        let w = Matrix::zeros(2, 3);
        assert!(matches!(
            AffineMap::new(w, vec![0.0; 3]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        let w = Matrix::from_rows(&[vec![f64::NAN]], 1).unwrap();
        assert!(AffineMap::new(w, vec![0.0]).is_err());
    }

    #[test]
    fn apply_computes_wx_plus_b() {
        let map = AffineMap::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]], 2, vec![0.5, 1.0])
            .unwrap();
        assert_eq!(map.apply(&[1.0, 1.0]), vec![3.5, 0.5]);
    }
}

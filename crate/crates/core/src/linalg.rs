//! Dense complex matrix helpers shared by the channel, scheme and analysis
//! modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Block-diagonal stacking; zero-sized blocks are allowed.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&CMatrix]) -> Result<CMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if let Some(b) = blocks.iter().find(|b| b.ncols() != cols) {
        return Err(Error::Shape(format!(
            "vstack: expected {cols} columns, found {}",
            b.ncols()
        )));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    Ok(out)
}

/// Keeps only the listed rows, in the listed order.
pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Keeps only the listed columns, in the listed order.
pub fn select_cols(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Scales row `i` by `gains[i]`.
pub fn scale_rows(m: &CMatrix, gains: &[f64]) -> CMatrix {
    debug_assert_eq!(m.nrows(), gains.len());
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * gains[i])
}

/// Assembles a matrix from a grid of blocks. Cells not listed stay exactly
/// zero; every listed block must match its row height and column width.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    row_heights: Vec<usize>,
    col_widths: Vec<usize>,
    filled: Vec<Vec<bool>>,
    matrix: CMatrix,
}

impl BlockGrid {
    pub fn new(row_heights: &[usize], col_widths: &[usize]) -> Self {
        let rows = row_heights.iter().sum();
        let cols = col_widths.iter().sum();
        Self {
            row_heights: row_heights.to_vec(),
            col_widths: col_widths.to_vec(),
            filled: vec![vec![false; col_widths.len()]; row_heights.len()],
            matrix: zeros(rows, cols),
        }
    }

    pub fn set(&mut self, row: usize, col: usize, block: &CMatrix) -> Result<&mut Self> {
        let (h, w) = (self.row_heights[row], self.col_widths[col]);
        if block.shape() != (h, w) {
            return Err(Error::Shape(format!(
                "block ({row},{col}) must be {h}x{w}, got {}x{}",
                block.nrows(),
                block.ncols()
            )));
        }
        let r0: usize = self.row_heights[..row].iter().sum();
        let c0: usize = self.col_widths[..col].iter().sum();
        self.matrix.view_mut((r0, c0), (h, w)).copy_from(block);
        self.filled[row][col] = true;
        Ok(self)
    }

    pub fn structure(&self) -> BlockStructure {
        BlockStructure {
            row_heights: self.row_heights.clone(),
            col_widths: self.col_widths.clone(),
            nonzero: self.filled.clone(),
        }
    }

    pub fn finish(self) -> (CMatrix, BlockStructure) {
        let structure = self.structure();
        (self.matrix, structure)
    }
}

/// Block sizes plus which blocks may be nonzero.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BlockStructure {
    pub row_heights: Vec<usize>,
    pub col_widths: Vec<usize>,
    pub nonzero: Vec<Vec<bool>>,
}

impl BlockStructure {
    /// Returns true when every block marked zero is exactly zero in `m`.
    pub fn zero_blocks_hold(&self, m: &CMatrix) -> bool {
        let mut r0 = 0;
        for (i, &h) in self.row_heights.iter().enumerate() {
            let mut c0 = 0;
            for (j, &w) in self.col_widths.iter().enumerate() {
                if !self.nonzero[i][j] && m.view((r0, c0), (h, w)).iter().any(|z| *z != C64::new(0.0, 0.0)) {
                    return false;
                }
                c0 += w;
            }
            r0 += h;
        }
        true
    }
}

/// Singular values above `tol * sigma_max * max(rows, cols)`.
pub fn numeric_rank(a: &CMatrix, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let sigma_max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    let threshold = tol * sigma_max * a.nrows().max(a.ncols()) as f64;
    sv.iter().filter(|&&s| s > threshold).count()
}

/// `log2 det(I + p * A * A^H)` without forming the Gram matrix.
///
/// The determinant equals `|det R|^2` where `R` comes from the QR factorization
/// of `[sqrt(p) A; I]` (or its Hermitian counterpart, whichever is thinner), so
/// directions in the null space of `A` contribute exactly `log2 1` even at very
/// large `p`.
pub fn log2_det_identity_plus(a: &CMatrix, p: f64) -> f64 {
    if a.is_empty() || p == 0.0 {
        return 0.0;
    }
    let s = p.sqrt();
    let (tall, k) = if a.ncols() <= a.nrows() {
        (a * C64::new(s, 0.0), a.ncols())
    } else {
        (a.adjoint() * C64::new(s, 0.0), a.nrows())
    };
    let id = identity(k);
    let stacked = vstack(&[&tall, &id]).expect("stacked blocks share a column count");
    let r = stacked.qr().r();
    2.0 * (0..k).map(|i| r[(i, i)].norm().log2()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn block_diag_places_blocks_and_zeros() {
        let a = CMatrix::from_element(2, 3, c(1.0));
        let b = CMatrix::from_element(1, 2, c(2.0));
        let d = block_diag(&[a, b]);
        assert_eq!(d.shape(), (3, 5));
        assert_eq!(d[(2, 3)], c(2.0));
        assert_eq!(d[(0, 3)], c(0.0));
        assert_eq!(d[(2, 0)], c(0.0));
    }

    #[test]
    fn block_diag_accepts_empty_blocks() {
        let d = block_diag(&[zeros(0, 3), identity(2)]);
        assert_eq!(d.shape(), (2, 5));
        assert_eq!(d[(0, 3)], c(1.0));
    }

    #[test]
    fn rank_of_identity_and_outer_product() {
        assert_eq!(numeric_rank(&identity(3), DEFAULT_RANK_TOL), 3);
        let x = CMatrix::from_column_slice(3, 1, &[c(1.0), C64::new(0.5, -2.0), c(3.0)]);
        let y = CMatrix::from_column_slice(4, 1, &[c(2.0), c(-1.0), C64::new(0.0, 1.0), c(0.3)]);
        assert_eq!(numeric_rank(&(&x * y.adjoint()), DEFAULT_RANK_TOL), 1);
        assert_eq!(numeric_rank(&zeros(3, 3), DEFAULT_RANK_TOL), 0);
        assert_eq!(numeric_rank(&zeros(0, 3), DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn log_det_of_scaled_identity() {
        let p = 1e6;
        assert_relative_eq!(
            log2_det_identity_plus(&identity(2), p),
            2.0 * (1.0 + p).log2(),
            max_relative = 1e-12
        );
        assert_eq!(log2_det_identity_plus(&zeros(3, 2), p), 0.0);
    }

    #[test]
    fn log_det_ignores_null_space_at_huge_power() {
        // rank one, 3x3: log det = log2(1 + p * |x|^2 |y|^2)
        let x = CMatrix::from_column_slice(3, 1, &[c(1.0), c(2.0), c(0.0)]);
        let a = &x * x.adjoint();
        let p = 1e16;
        let expected = (1.0 + p * 25.0_f64).log2();
        assert_relative_eq!(log2_det_identity_plus(&a, p), expected, max_relative = 1e-12);
    }

    #[test]
    fn block_grid_rejects_wrong_shapes() {
        let mut g = BlockGrid::new(&[2, 1], &[1, 1]);
        assert!(g.set(0, 0, &zeros(2, 1)).is_ok());
        assert!(g.set(1, 1, &zeros(2, 1)).is_err());
    }
}

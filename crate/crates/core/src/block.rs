//! Block partitioning of matrices into uniform grids.
//!
//! Grid coordinates are 0-based inside a [`BlockGrid`]. Positions in the
//! product coefficient vector follow the 1-based `[R']` convention, so
//! [`product_block_index`] and [`reassemble`] take 1-based block indices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::FieldMatrix;

/// A matrix split into a `grid_rows x grid_cols` grid of equally sized blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    grid_rows: usize,
    grid_cols: usize,
    blocks: Vec<FieldMatrix>,
}

impl BlockGrid {
    /// Assembles a grid from row-major blocks, checking they share one shape.
    pub fn from_blocks(
        grid_rows: usize,
        grid_cols: usize,
        blocks: Vec<FieldMatrix>,
    ) -> Result<Self> {
        if blocks.len() != grid_rows * grid_cols || blocks.is_empty() {
            return Err(Error::Shape(format!(
                "{} blocks for a {grid_rows}x{grid_cols} grid",
                blocks.len()
            )));
        }
        let shape = blocks[0].shape();
        let field = blocks[0].field();
        if blocks
            .iter()
            .any(|b| b.shape() != shape || b.field() != field)
        {
            return Err(Error::Shape("blocks must share one shape and field".into()));
        }
        Ok(Self {
            grid_rows,
            grid_cols,
            blocks,
        })
    }

    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn block_shape(&self) -> (usize, usize) {
        self.blocks[0].shape()
    }

    /// Block at 0-based grid position `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> &FieldMatrix {
        &self.blocks[i * self.grid_cols + j]
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((usize, usize), &FieldMatrix)> {
        let cols = self.grid_cols;
        self.blocks
            .iter()
            .enumerate()
            .map(move |(idx, b)| ((idx / cols, idx % cols), b))
    }

    /// Glues the blocks back into a single matrix.
    pub fn concat(&self) -> FieldMatrix {
        let (br, bc) = self.block_shape();
        let mut out = FieldMatrix::zeros(
            self.blocks[0].field(),
            br * self.grid_rows,
            bc * self.grid_cols,
        );
        for ((i, j), b) in self.blocks() {
            out.paste(i * br, j * bc, b)
                .expect("blocks fit by construction");
        }
        out
    }
}

pub fn partition(m: &FieldMatrix, grid_rows: usize, grid_cols: usize) -> Result<BlockGrid> {
    if grid_rows == 0
        || grid_cols == 0
        || !m.rows().is_multiple_of(grid_rows)
        || !m.cols().is_multiple_of(grid_cols)
        || m.is_empty()
    {
        return Err(Error::Partition {
            rows: m.rows(),
            cols: m.cols(),
            grid_rows,
            grid_cols,
        });
    }
    let (br, bc) = (m.rows() / grid_rows, m.cols() / grid_cols);
    let mut blocks = Vec::with_capacity(grid_rows * grid_cols);
    for i in 0..grid_rows {
        for j in 0..grid_cols {
            blocks.push(m.submatrix(i * br, j * bc, br, bc)?);
        }
    }
    Ok(BlockGrid {
        grid_rows,
        grid_cols,
        blocks,
    })
}

/// Position (1-based, in `[pmn]`) of product block `(m_idx, n_idx)` among the
/// coefficients of the entangled product: `p + p(m_idx-1) + pm(n_idx-1)`.
pub fn product_block_index(
    m_idx: usize,
    n_idx: usize,
    p: usize,
    m: usize,
    n: usize,
) -> Result<usize> {
    if !(1..=m).contains(&m_idx) || !(1..=n).contains(&n_idx) || p == 0 {
        return Err(Error::Index(format!(
            "block ({m_idx}, {n_idx}) outside {m}x{n} grid"
        )));
    }
    Ok(p + p * (m_idx - 1) + p * m * (n_idx - 1))
}

/// Every product position, in `(m_idx, n_idx)` order with `m_idx` varying fastest.
pub fn product_positions(p: usize, m: usize, n: usize) -> Vec<((usize, usize), usize)> {
    let mut out = Vec::with_capacity(m * n);
    for n_idx in 1..=n {
        for m_idx in 1..=m {
            let pos = product_block_index(m_idx, n_idx, p, m, n).expect("in range");
            out.push(((m_idx, n_idx), pos));
        }
    }
    out
}

/// Builds the product matrix from its `m x n` blocks, keyed by 1-based `(m_idx, n_idx)`.
pub fn reassemble(
    blocks: &BTreeMap<(usize, usize), FieldMatrix>,
    m: usize,
    n: usize,
) -> Result<FieldMatrix> {
    let mut ordered = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 1..=n {
            let b = blocks.get(&(i, j)).ok_or(Error::Incomplete(i, j))?;
            ordered.push(b.clone());
        }
    }
    Ok(BlockGrid::from_blocks(m, n, ordered)?.concat())
}

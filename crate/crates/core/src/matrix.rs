//! Dense matrices over a prime field.

use std::cell::Cell;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;

thread_local! {
    static FIELD_MULS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
fn count_muls(n: usize) {
    FIELD_MULS.with(|c| c.set(c.get() + n as u64));
}

/// Number of field multiplications performed by matrix routines on this
/// thread since the last [`reset_field_ops`].
pub fn field_ops() -> u64 {
    FIELD_MULS.with(|c| c.get())
}

pub fn reset_field_ops() {
    FIELD_MULS.with(|c| c.set(0));
}

/// A dense row-major matrix over GF(q).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GF({}) {}x{} [",
            self.field.modulus(),
            self.rows,
            self.cols
        )?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl FieldMatrix {
    /// Builds a matrix from row-major data, reducing every entry mod q.
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|v| field.elem(v)).collect();
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    /// Builds a matrix from signed integers, mapping negatives into the field.
    pub fn from_signed(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let mapped: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, &mapped)
    }

    pub fn scalar(field: PrimeField, v: u64) -> Self {
        Self {
            field,
            rows: 1,
            cols: 1,
            data: vec![field.elem(v)],
        }
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of field elements held, `|M|`.
    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.elem(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Shape(format!(
                "{what}: operands over different fields"
            )));
        }
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "{what}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(1, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "sub")?;
        let f = self.field;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(Self {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: u64, other: &Self) -> Result<()> {
        self.check_same(other, "add")?;
        let f = self.field;
        let c = f.elem(c);
        if c == 0 {
            return Ok(());
        }
        if c == 1 {
            for (a, &b) in self.data.iter_mut().zip(&other.data) {
                *a = f.add(*a, b);
            }
        } else {
            count_muls(self.data.len());
            for (a, &b) in self.data.iter_mut().zip(&other.data) {
                *a = f.add(*a, f.mul(c, b));
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        count_muls(self.data.len());
        let data = self
            .data
            .iter()
            .map(|&a| f.mul(a, c % f.modulus()))
            .collect();
        Self {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Standard matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::Shape("mul: operands over different fields".into()));
        }
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "mul: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let q = f.modulus();
        let mut out = vec![0u64; self.rows * other.cols];
        for i in 0..self.rows {
            let out_row = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o = (*o + a * b % q) % q;
                }
            }
        }
        count_muls(self.rows * self.cols * other.cols);
        Self::new(f, self.rows, other.cols, out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Contiguous submatrix starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            return Err(Error::Shape(format!(
                "submatrix {rows}x{cols} at ({r0},{c0}) exceeds {}x{}",
                self.rows, self.cols
            )));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for r in r0..r0 + rows {
            data.extend_from_slice(&self.data[r * self.cols + c0..r * self.cols + c0 + cols]);
        }
        Ok(Self {
            field: self.field,
            rows,
            cols,
            data,
        })
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) -> Result<()> {
        if r0 + block.rows > self.rows || c0 + block.cols > self.cols {
            return Err(Error::Shape("paste out of bounds".into()));
        }
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
        Ok(())
    }

    /// Stacks matrices vertically.
    pub fn vstack(parts: &[Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("vstack of nothing".into()))?;
        if parts
            .iter()
            .any(|p| p.cols != first.cols || p.field != first.field)
        {
            return Err(Error::Shape("vstack: column mismatch".into()));
        }
        let rows = parts.iter().map(|p| p.rows).sum();
        let data = parts.iter().flat_map(|p| p.data.iter().copied()).collect();
        Ok(Self {
            field: first.field,
            rows,
            cols: first.cols,
            data,
        })
    }

    /// Solves `self * X = rhs` for square `self` by Gauss-Jordan elimination.
    ///
    /// Pivots are chosen as the first nonzero entry at or below the diagonal,
    /// so the result is deterministic.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "solve needs a square system, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.rows != self.rows || rhs.field != self.field {
            return Err(Error::Shape(format!(
                "right-hand side has {} rows, system has {}",
                rhs.rows, self.rows
            )));
        }
        let f = self.field;
        let n = self.rows;
        let k = rhs.cols;
        let width = n + k;
        // augmented [M | Y]
        let mut aug = vec![0u64; n * width];
        for r in 0..n {
            aug[r * width..r * width + n].copy_from_slice(self.row(r));
            aug[r * width + n..(r + 1) * width].copy_from_slice(rhs.row(r));
        }
        let mut muls = 0usize;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| aug[r * width + col] != 0)
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                for c in 0..width {
                    aug.swap(pivot * width + c, col * width + c);
                }
            }
            let inv = f.inv(aug[col * width + col])?;
            for c in col..width {
                aug[col * width + c] = f.mul(aug[col * width + c], inv);
            }
            muls += width - col;
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = aug[r * width + col];
                if factor == 0 {
                    continue;
                }
                for c in col..width {
                    let v = f.mul(factor, aug[col * width + c]);
                    aug[r * width + c] = f.sub(aug[r * width + c], v);
                }
                muls += width - col;
            }
        }
        count_muls(muls);
        let mut out = Vec::with_capacity(n * k);
        for r in 0..n {
            out.extend_from_slice(&aug[r * width + n..(r + 1) * width]);
        }
        Self::new(f, n, k, out)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Self::identity(self.field, self.rows))
    }

    /// Reduced row echelon form and the list of pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            for c in 0..m.cols {
                m.data.swap(p * m.cols + c, row * m.cols + c);
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.data[row * m.cols + c] = v;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.data[r * m.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the right null space, one basis vector per column.
    pub fn null_space(&self) -> Self {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            basis.set(fc, j, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(pc, j, f.neg(r.get(i, fc)));
            }
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn identity_times_b() {
        let f = gf(11);
        let b = FieldMatrix::from_rows(f, &[vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        assert_eq!(FieldMatrix::identity(f, 2).mul(&b).unwrap(), b);
    }

    #[test]
    fn scalar_product() {
        let f = gf(5);
        let p = FieldMatrix::scalar(f, 3)
            .mul(&FieldMatrix::scalar(f, 4))
            .unwrap();
        assert_eq!(p.to_rows(), vec![vec![2]]);
    }

    #[test]
    fn mul_shape_error() {
        let f = gf(5);
        let a = FieldMatrix::zeros(f, 2, 3);
        assert!(matches!(a.mul(&a), Err(Error::Shape(_))));
    }

    #[test]
    fn random_times_inverse_is_identity() {
        let f = gf(97);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 5 {
            let a = FieldMatrix::random(f, 4, 4, &mut rng);
            let Ok(inv) = a.inverse() else { continue };
            assert_eq!(a.mul(&inv).unwrap(), FieldMatrix::identity(f, 4));
            checked += 1;
        }
    }

    #[test]
    fn solve_examples() {
        let f = gf(5);
        let y = FieldMatrix::from_rows(f, &[vec![1, 2], vec![3, 4], vec![0, 1]]).unwrap();
        assert_eq!(FieldMatrix::identity(f, 3).solve(&y).unwrap(), y);

        let m = FieldMatrix::from_rows(f, &[vec![1, 1], vec![1, 2]]).unwrap();
        let y = FieldMatrix::from_rows(f, &[vec![0], vec![1]]).unwrap();
        let x = m.solve(&y).unwrap();
        assert_eq!(x.to_rows(), vec![vec![4], vec![1]]);
        assert_eq!(m.mul(&x).unwrap(), y);
    }

    #[test]
    fn solve_errors() {
        let f = gf(7);
        let singular = FieldMatrix::from_rows(f, &[vec![1, 2], vec![1, 2]]).unwrap();
        let y = FieldMatrix::zeros(f, 2, 1);
        assert_eq!(singular.solve(&y), Err(Error::SingularMatrix));
        let wide = FieldMatrix::zeros(f, 2, 3);
        assert!(matches!(wide.solve(&y), Err(Error::Shape(_))));
    }

    #[test]
    fn null_space_annihilates() {
        let f = gf(13);
        let m = FieldMatrix::from_signed(f, &[vec![1, 2, 0, -1], vec![0, 1, 1, 1]]).unwrap();
        let n = m.null_space();
        assert_eq!(n.shape(), (4, 2));
        assert!(m.mul(&n).unwrap().is_zero());
        assert_eq!(n.rank(), 2);
    }

    #[test]
    fn submatrix_and_paste() {
        let f = gf(13);
        let m = FieldMatrix::new(f, 3, 4, (0..12).collect()).unwrap();
        let s = m.submatrix(1, 1, 2, 2).unwrap();
        assert_eq!(s.to_rows(), vec![vec![5, 6], vec![9, 10]]);
        let mut z = FieldMatrix::zeros(f, 3, 4);
        z.paste(1, 1, &s).unwrap();
        assert_eq!(z.get(2, 2), 10);
        assert!(m.submatrix(2, 2, 2, 2).is_err());
    }

    #[test]
    fn op_counter_tracks_products() {
        let f = gf(13);
        reset_field_ops();
        let a = FieldMatrix::identity(f, 3);
        a.mul(&a).unwrap();
        assert_eq!(field_ops(), 27);
    }

    proptest! {
        #[test]
        fn solve_recovers_x(seed in any::<u64>(), n in 1usize..7, k in 1usize..4) {
            let f = gf(65537);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let m = FieldMatrix::random(f, n, n, &mut rng);
            prop_assume!(m.rank() == n);
            let x = FieldMatrix::random(f, n, k, &mut rng);
            let y = m.mul(&x).unwrap();
            prop_assert_eq!(m.solve(&y).unwrap(), x);
        }
    }
}

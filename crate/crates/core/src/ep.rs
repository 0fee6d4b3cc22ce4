//! Entangled polynomial encoding of block grids.
//!
//! An `m x p` grid of A-blocks is encoded as `sum A[i][j] x^(j + p i)` and a
//! `p x n` grid of B-blocks as `sum B[i][j] x^(p - 1 - i + p m j)` (0-based
//! grid indices). In the product of the two encodings, block `(i, j)` of `AB`
//! sits at the coefficient of `x^(p - 1 + p i + p m j)`.

use crate::block::{product_positions, BlockGrid};
use crate::error::{Error, Result};
use crate::matrix::FieldMatrix;

fn a_exponent(i: usize, j: usize, p: usize) -> usize {
    j + p * i
}

fn b_exponent(i: usize, j: usize, p: usize, m: usize) -> usize {
    p - 1 - i + p * m * j
}

/// Evaluates the A-side encoding at `x`.
pub fn encode_a(blocks: &BlockGrid, x: u64) -> FieldMatrix {
    let p = blocks.grid_cols();
    let first = blocks.block(0, 0);
    let f = first.field();
    let mut out = FieldMatrix::zeros(f, first.rows(), first.cols());
    for ((i, j), b) in blocks.blocks() {
        let w = f.pow(x, a_exponent(i, j, p) as u64);
        out.add_scaled(w, b).expect("uniform blocks");
    }
    out
}

/// Evaluates the B-side encoding at `x`; `m` is the row-block count of the A side.
pub fn encode_b(blocks: &BlockGrid, m: usize, x: u64) -> FieldMatrix {
    let p = blocks.grid_rows();
    let first = blocks.block(0, 0);
    let f = first.field();
    let mut out = FieldMatrix::zeros(f, first.rows(), first.cols());
    for ((i, j), b) in blocks.blocks() {
        let w = f.pow(x, b_exponent(i, j, p, m) as u64);
        out.add_scaled(w, b).expect("uniform blocks");
    }
    out
}

/// The coefficient matrices `C_1, ..., C_{pmn+p-1}` of the product of the two
/// encodings, as polynomials in the evaluation variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCoefficients {
    coeffs: Vec<FieldMatrix>,
    p: usize,
    m: usize,
    n: usize,
}

impl ProductCoefficients {
    /// Symbolic expansion of the product: every pair of blocks contributes its
    /// product to the coefficient indexed by the sum of their exponents.
    pub fn expand(a: &BlockGrid, b: &BlockGrid) -> Result<Self> {
        let (m, p, n) = (a.grid_rows(), a.grid_cols(), b.grid_cols());
        if b.grid_rows() != p || a.block_shape().1 != b.block_shape().0 {
            return Err(Error::Shape(format!(
                "cannot multiply {m}x{p} grid of {:?} blocks by {}x{n} grid of {:?} blocks",
                a.block_shape(),
                b.grid_rows(),
                b.block_shape()
            )));
        }
        let f = a.block(0, 0).field();
        let shape = (a.block_shape().0, b.block_shape().1);
        let mut coeffs = vec![FieldMatrix::zeros(f, shape.0, shape.1); p * m * n + p - 1];
        for ((ai, aj), ab) in a.blocks() {
            for ((bi, bj), bb) in b.blocks() {
                let e = a_exponent(ai, aj, p) + b_exponent(bi, bj, p, m);
                coeffs[e].add_scaled(1, &ab.mul(bb)?)?;
            }
        }
        Ok(Self { coeffs, p, m, n })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `C_i` with the 1-based index used throughout the protocol.
    pub fn get(&self, i: usize) -> Option<&FieldMatrix> {
        i.checked_sub(1).and_then(|i| self.coeffs.get(i))
    }

    pub fn as_slice(&self) -> &[FieldMatrix] {
        &self.coeffs
    }

    /// Evaluates `sum_i C_{i+1} x^i`.
    pub fn evaluate(&self, x: u64) -> FieldMatrix {
        let f = self.coeffs[0].field();
        let mut out = FieldMatrix::zeros(f, self.coeffs[0].rows(), self.coeffs[0].cols());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.add_scaled(f.pow(x, i as u64), c)
                .expect("uniform coefficients");
        }
        out
    }

    /// The product blocks, keyed by 1-based `(m_idx, n_idx)`.
    pub fn desired_blocks(&self) -> Vec<((usize, usize), &FieldMatrix)> {
        product_positions(self.p, self.m, self.n)
            .into_iter()
            .map(|(key, pos)| (key, &self.coeffs[pos - 1]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{partition, reassemble};
    use crate::field::PrimeField;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn scalars(f: PrimeField, rows: usize, cols: usize, vals: &[u64]) -> BlockGrid {
        let blocks = vals.iter().map(|&v| FieldMatrix::scalar(f, v)).collect();
        BlockGrid::from_blocks(rows, cols, blocks).unwrap()
    }

    #[test]
    fn trivial_grids_ignore_x() {
        let f = gf(7);
        let a = scalars(f, 1, 1, &[5]);
        assert_eq!(encode_a(&a, 3), FieldMatrix::scalar(f, 5));
        assert_eq!(encode_b(&a, 1, 3), FieldMatrix::scalar(f, 5));
    }

    #[test]
    fn two_column_split() {
        let f = gf(13);
        // A1 + x A2 and x B1 + B2
        let a = scalars(f, 1, 2, &[2, 5]);
        let b = scalars(f, 2, 1, &[7, 3]);
        assert_eq!(encode_a(&a, 4), FieldMatrix::scalar(f, 2 + 4 * 5));
        assert_eq!(encode_b(&b, 1, 4), FieldMatrix::scalar(f, 4 * 7 + 3));
    }

    #[test]
    fn exponent_tables() {
        let f = gf(7);
        // A11 + 3 A12 + 2 A21 + 6 A22 with (A11, A12, A21, A22) = (1, 2, 3, 4)
        let a = scalars(f, 2, 2, &[1, 2, 3, 4]);
        assert_eq!(
            encode_a(&a, 3),
            FieldMatrix::scalar(f, (1 + 6 + 6 + 24) % 7)
        );
        // 3 B11 + B21 + 6 B12 + 2 B22 with (B11, B12, B21, B22) = (1, 2, 3, 4)
        let b = scalars(f, 2, 2, &[1, 2, 3, 4]);
        assert_eq!(
            encode_b(&b, 1, 3),
            FieldMatrix::scalar(f, (3 + 3 + 12 + 8) % 7)
        );
    }

    #[test]
    fn toy_coefficients() {
        let f = gf(101);
        let (a1, a2, b1, b2) = (3, 5, 7, 11);
        let a = scalars(f, 1, 2, &[a1, a2]);
        let b = scalars(f, 2, 1, &[b1, b2]);
        let c = ProductCoefficients::expand(&a, &b).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.get(1).unwrap(), &FieldMatrix::scalar(f, a1 * b2));
        assert_eq!(
            c.get(2).unwrap(),
            &FieldMatrix::scalar(f, a1 * b1 + a2 * b2)
        );
        assert_eq!(c.get(3).unwrap(), &FieldMatrix::scalar(f, a2 * b1));
        assert!(c.get(0).is_none());
    }

    #[test]
    fn single_block_product() {
        let f = gf(101);
        let c =
            ProductCoefficients::expand(&scalars(f, 1, 1, &[6]), &scalars(f, 1, 1, &[9])).unwrap();
        assert_eq!(c.as_slice(), &[FieldMatrix::scalar(f, 54)]);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let f = gf(11);
        let a = scalars(f, 1, 2, &[1, 2]);
        let b = scalars(f, 3, 1, &[1, 2, 3]);
        assert!(matches!(
            ProductCoefficients::expand(&a, &b),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn evaluation_consistency_two_by_two() {
        let f = gf(97);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let a = partition(&FieldMatrix::random(f, 2, 2, &mut rng), 2, 2).unwrap();
        let b = partition(&FieldMatrix::random(f, 2, 2, &mut rng), 2, 2).unwrap();
        let c = ProductCoefficients::expand(&a, &b).unwrap();
        assert_eq!(c.len(), 2 * 2 * 2 + 2 - 1);
        for _ in 0..20 {
            let x = f.random(&mut rng);
            let direct = encode_a(&a, x).mul(&encode_b(&b, 2, x)).unwrap();
            assert_eq!(c.evaluate(x), direct);
        }
    }

    proptest! {
        #[test]
        fn desired_coefficients_are_product_blocks(
            p in 1usize..4, m in 1usize..4, n in 1usize..4, seed in any::<u64>()
        ) {
            let f = gf(65537);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = FieldMatrix::random(f, 2 * m, 2 * p, &mut rng);
            let b = FieldMatrix::random(f, 2 * p, n, &mut rng);
            let c = ProductCoefficients::expand(&partition(&a, m, p).unwrap(), &partition(&b, p, n).unwrap()).unwrap();
            prop_assert_eq!(c.len(), p * m * n + p - 1);
            let keyed = c.desired_blocks().into_iter().map(|(k, v)| (k, v.clone())).collect();
            prop_assert_eq!(reassemble(&keyed, m, n).unwrap(), a.mul(&b).unwrap());
        }

        #[test]
        fn encodings_multiply_to_expansion(p in 1usize..4, m in 1usize..3, n in 1usize..3, x in 0u64..65537, seed in any::<u64>()) {
            let f = gf(65537);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = partition(&FieldMatrix::random(f, m, p, &mut rng), m, p).unwrap();
            let b = partition(&FieldMatrix::random(f, p, 2 * n, &mut rng), p, n).unwrap();
            let c = ProductCoefficients::expand(&a, &b).unwrap();
            prop_assert_eq!(c.evaluate(x), encode_a(&a, x).mul(&encode_b(&b, m, x)).unwrap());
        }
    }
}

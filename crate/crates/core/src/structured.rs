//! Builders for the structured matrices used by the decoders.

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FieldMatrix;

fn check_distinct(field: PrimeField, points: &[u64]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &p in points {
        if !seen.insert(field.elem(p)) {
            return Err(Error::DegeneratePoints(format!("repeated point {p}")));
        }
    }
    Ok(())
}

/// Row `i` is `[1, a_i, a_i^2, ..., a_i^(width-1)]`.
pub fn vandermonde(field: PrimeField, points: &[u64], width: usize) -> Result<FieldMatrix> {
    check_distinct(field, points)?;
    let mut m = FieldMatrix::zeros(field, points.len(), width);
    for (i, &a) in points.iter().enumerate() {
        let mut acc = 1 % field.modulus();
        for j in 0..width {
            m.set(i, j, acc);
            acc = field.mul(acc, field.elem(a));
        }
    }
    Ok(m)
}

/// The lower-triangular Toeplitz matrix whose first column is `first_column`.
pub fn lower_toeplitz(field: PrimeField, first_column: &[u64]) -> FieldMatrix {
    let n = first_column.len();
    let mut m = FieldMatrix::zeros(field, n, n);
    for r in 0..n {
        for c in 0..=r {
            m.set(r, c, first_column[r - c]);
        }
    }
    m
}

/// Confluent Cauchy block: for each pole `f` (in order), row `i` holds
/// `[(f - a_i)^-max_power, ..., (f - a_i)^-1]`.
pub fn cauchy_power(
    field: PrimeField,
    points: &[u64],
    poles: &[u64],
    max_power: usize,
) -> Result<FieldMatrix> {
    check_distinct(field, points)?;
    check_distinct(field, poles)?;
    let mut m = FieldMatrix::zeros(field, points.len(), poles.len() * max_power);
    for (i, &a) in points.iter().enumerate() {
        for (j, &f) in poles.iter().enumerate() {
            let diff = field.sub(field.elem(f), field.elem(a));
            let inv = field.inv(diff).map_err(|_| {
                Error::DegeneratePoints(format!("pole {f} coincides with point {a}"))
            })?;
            // column j*max_power + t carries exponent -(max_power - t)
            let mut acc = inv;
            for t in (0..max_power).rev() {
                m.set(i, j * max_power + t, acc);
                acc = field.mul(acc, inv);
            }
        }
    }
    Ok(m)
}

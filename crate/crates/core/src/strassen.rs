//! Strassen's seven-product construction with cross-subspace shares and
//! null-space aligned noise, for 2x2 block inputs and `X = 1`.
//!
//! The master decodes `T_i = P_i Q_i + (N z)_i` where the columns of `N`
//! span the null space of the reconstruction matrix, so `recon * T` is
//! exactly the product while the three-dimensional complement is masked.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;

use crate::block::{partition, reassemble, BlockGrid};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::gcsa::Answer;
use crate::matrix::FieldMatrix;
use crate::structured::vandermonde;

/// Rows give `C11, C12, C21, C22` as combinations of the seven products.
pub const RECON: [[i64; 7]; 4] = [
    [0, -1, 0, 1, 1, 1, 0],
    [1, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0],
    [1, 0, -1, 0, 1, 0, -1],
];

// Coefficients over (X11, X12, X21, X22) for each P_i (from A) and Q_i (from B).
const P_COEFFS: [[i64; 4]; 7] = [
    [1, 0, 0, 0],
    [1, 1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
    [1, 0, 0, 1],
    [0, 1, 0, -1],
    [1, 0, -1, 0],
];
const Q_COEFFS: [[i64; 4]; 7] = [
    [0, 1, 0, -1],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
    [-1, 0, 1, 0],
    [1, 0, 0, 1],
    [0, 0, 1, 1],
    [1, 1, 0, 0],
];

/// Z1 entering T1..T4 as (-1, -1, -1, +1) together with the two columns below.
/// Under `RECON` this leaves `2 Z1` and `-2 Z1` in the first two outputs.
pub const LEGACY_NOISE: [[i64; 3]; 7] = [
    [-1, -1, 1],
    [-1, 1, -1],
    [-1, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, -1],
    [0, 0, 1],
];

const SELF_CHECK_TRIALS: usize = 20;
const SELF_CHECK_MODULUS: u64 = 101;

/// Number of answers the master needs: seven Cauchy terms and `alpha^0..alpha^7`.
pub const STRASSEN_THRESHOLD: usize = 15;

/// A verified bilinear algorithm for 2x2 block multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearScheme {
    recon: [[i64; 7]; 4],
    p: [[i64; 4]; 7],
    q: [[i64; 4]; 7],
}

fn combine(field: PrimeField, grid: &BlockGrid, coeffs: &[i64; 4]) -> Result<FieldMatrix> {
    let (r, c) = grid.block_shape();
    let mut out = FieldMatrix::zeros(field, r, c);
    for (k, &w) in coeffs.iter().enumerate() {
        if w != 0 {
            out.add_scaled(field.from_i64(w), grid.block(k / 2, k % 2))?;
        }
    }
    Ok(out)
}

fn check_grid(grid: &BlockGrid) -> Result<()> {
    if grid.grid_rows() != 2 || grid.grid_cols() != 2 {
        return Err(Error::Shape(format!(
            "expected a 2x2 block grid, got {}x{}",
            grid.grid_rows(),
            grid.grid_cols()
        )));
    }
    Ok(())
}

impl BilinearScheme {
    /// The built-in assignment, checked against direct multiplication.
    pub fn strassen() -> Result<Self> {
        Self::new(RECON, P_COEFFS, Q_COEFFS)
    }

    /// Validates an arbitrary assignment on random scalar-block inputs.
    pub fn new(recon: [[i64; 7]; 4], p: [[i64; 4]; 7], q: [[i64; 4]; 7]) -> Result<Self> {
        use rand::SeedableRng;
        let scheme = Self { recon, p, q };
        let field = PrimeField::new(SELF_CHECK_MODULUS)?;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x5742);
        for trial in 0..SELF_CHECK_TRIALS {
            let a = FieldMatrix::random(field, 2, 2, &mut rng);
            let b = FieldMatrix::random(field, 2, 2, &mut rng);
            let got = scheme.multiply(&a, &b)?;
            if got != a.mul(&b)? {
                return Err(Error::Consistency(format!(
                    "bilinear assignment disagrees with direct product on trial {trial}"
                )));
            }
        }
        Ok(scheme)
    }

    pub fn recon(&self, field: PrimeField) -> FieldMatrix {
        let rows: Vec<Vec<i64>> = self.recon.iter().map(|r| r.to_vec()).collect();
        FieldMatrix::from_signed(field, &rows).expect("4x7")
    }

    pub fn left_factors(&self, a: &BlockGrid) -> Result<Vec<FieldMatrix>> {
        check_grid(a)?;
        let field = a.block(0, 0).field();
        self.p.iter().map(|c| combine(field, a, c)).collect()
    }

    pub fn right_factors(&self, b: &BlockGrid) -> Result<Vec<FieldMatrix>> {
        check_grid(b)?;
        let field = b.block(0, 0).field();
        self.q.iter().map(|c| combine(field, b, c)).collect()
    }

    /// `[P_1 Q_1, ..., P_7 Q_7]`.
    pub fn products(&self, a: &BlockGrid, b: &BlockGrid) -> Result<Vec<FieldMatrix>> {
        let ps = self.left_factors(a)?;
        let qs = self.right_factors(b)?;
        ps.iter().zip(&qs).map(|(p, q)| p.mul(q)).collect()
    }

    /// Applies the reconstruction matrix to seven terms, returning the
    /// output blocks keyed 1-based as `(row, col)`.
    pub fn reconstruct_blocks(
        &self,
        terms: &[FieldMatrix],
    ) -> Result<BTreeMap<(usize, usize), FieldMatrix>> {
        if terms.len() != 7 {
            return Err(Error::Shape(format!(
                "expected 7 terms, got {}",
                terms.len()
            )));
        }
        let field = terms[0].field();
        let (r, c) = terms[0].shape();
        let mut out = BTreeMap::new();
        for (row, weights) in self.recon.iter().enumerate() {
            let mut block = FieldMatrix::zeros(field, r, c);
            for (w, t) in weights.iter().zip(terms) {
                if *w != 0 {
                    block.add_scaled(field.from_i64(*w), t)?;
                }
            }
            out.insert((row / 2 + 1, row % 2 + 1), block);
        }
        Ok(out)
    }

    /// Full Strassen product of two even-sized matrices.
    pub fn multiply(&self, a: &FieldMatrix, b: &FieldMatrix) -> Result<FieldMatrix> {
        let ag = partition(a, 2, 2)?;
        let bg = partition(b, 2, 2)?;
        let blocks = self.reconstruct_blocks(&self.products(&ag, &bg)?)?;
        reassemble(&blocks, 2, 2)
    }
}

/// Noise coefficients: column `j` says how `Z_{j+1}` enters `T_1..T_7`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseDesign {
    pub n: FieldMatrix,
}

/// Picks a basis of `null(recon)`. Columns of the legacy sign pattern that do
/// cancel under `recon` are kept; the rest come from Gaussian elimination.
pub fn noise_design(recon: &FieldMatrix) -> Result<NoiseDesign> {
    let field = recon.field();
    let rank = recon.rank();
    if rank != recon.rows() {
        return Err(Error::Rank(format!(
            "reconstruction matrix has rank {rank}, expected {}",
            recon.rows()
        )));
    }
    let dim = recon.cols() - rank;
    let computed = recon.null_space();
    let mut candidates = Vec::new();
    if recon.cols() == 7 {
        let legacy = legacy_noise(field);
        for j in 0..3 {
            candidates.push(legacy.submatrix(0, j, 7, 1)?);
        }
    }
    for j in 0..computed.cols() {
        candidates.push(computed.submatrix(0, j, recon.cols(), 1)?);
    }
    let mut chosen: Vec<FieldMatrix> = Vec::new();
    for col in candidates {
        if chosen.len() == dim {
            break;
        }
        if !recon.mul(&col)?.is_zero() {
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(col);
        if hstack(&trial)?.rank() == trial.len() {
            chosen = trial;
        }
    }
    let n = hstack(&chosen)?;
    if n.rank() != dim || !recon.mul(&n)?.is_zero() {
        return Err(Error::Rank("could not assemble a null-space basis".into()));
    }
    Ok(NoiseDesign { n })
}

fn hstack(cols: &[FieldMatrix]) -> Result<FieldMatrix> {
    let t: Vec<FieldMatrix> = cols.iter().map(FieldMatrix::transpose).collect();
    Ok(FieldMatrix::vstack(&t)?.transpose())
}

/// The legacy sign pattern as a 7x3 field matrix.
pub fn legacy_noise(field: PrimeField) -> FieldMatrix {
    let rows: Vec<Vec<i64>> = LEGACY_NOISE.iter().map(|r| r.to_vec()).collect();
    FieldMatrix::from_signed(field, &rows).expect("7x3")
}

/// Server-side randomness: `z` masks the null-space directions, `masks`
/// cover the `alpha^0..alpha^6` interference terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrassenNoise {
    pub z: Vec<FieldMatrix>,
    pub masks: Vec<FieldMatrix>,
}

impl StrassenNoise {
    pub fn generate<R: Rng + ?Sized>(
        field: PrimeField,
        shape: (usize, usize),
        rng: &mut R,
    ) -> Self {
        let mut draw = |k: usize| {
            (0..k)
                .map(|_| FieldMatrix::random(field, shape.0, shape.1, rng))
                .collect()
        };
        Self {
            z: draw(3),
            masks: draw(7),
        }
    }

    pub fn zeros(field: PrimeField, shape: (usize, usize)) -> Self {
        Self {
            z: vec![FieldMatrix::zeros(field, shape.0, shape.1); 3],
            masks: vec![FieldMatrix::zeros(field, shape.0, shape.1); 7],
        }
    }

    pub fn len(&self) -> usize {
        self.z.len() + self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Public state of one Strassen run with `S` servers.
#[derive(Debug, Clone)]
pub struct StrassenNa {
    field: PrimeField,
    scheme: BilinearScheme,
    design: NoiseDesign,
    f: Vec<u64>,
    alpha: Vec<u64>,
    c: Vec<u64>,
}

/// What the master recovers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrassenDecoded {
    /// `T_1..T_7`.
    pub t: Vec<FieldMatrix>,
    pub product: FieldMatrix,
}

impl StrassenNa {
    /// Sequential points `f_i = i - 1` and `alpha_s = 7 + s`.
    pub fn new(field: PrimeField, servers: usize) -> Result<Self> {
        let needed = 7 + servers as u64;
        if field.modulus() < needed {
            return Err(Error::FieldTooSmall {
                modulus: field.modulus(),
                needed,
            });
        }
        Self::with_points(field, (0..7).collect(), (7..needed).collect())
    }

    pub fn with_points(field: PrimeField, f: Vec<u64>, alpha: Vec<u64>) -> Result<Self> {
        if f.len() != 7 {
            return Err(Error::InvalidParams(format!(
                "need 7 poles, got {}",
                f.len()
            )));
        }
        if alpha.len() < STRASSEN_THRESHOLD {
            return Err(Error::InsufficientServers {
                servers: alpha.len(),
                threshold: STRASSEN_THRESHOLD,
            });
        }
        let mut seen = HashSet::new();
        for &v in f.iter().chain(&alpha) {
            if !seen.insert(field.elem(v)) {
                return Err(Error::DegeneratePoints(format!("point {v} repeated")));
            }
        }
        let scheme = BilinearScheme::strassen()?;
        let design = noise_design(&scheme.recon(field))?;
        let c = (0..7)
            .map(|i| {
                (0..7)
                    .filter(|&j| j != i)
                    .fold(1, |acc, j| field.mul(acc, field.sub(f[j], f[i])))
            })
            .collect();
        Ok(Self {
            field,
            scheme,
            design,
            f,
            alpha,
            c,
        })
    }

    pub fn servers(&self) -> usize {
        self.alpha.len()
    }

    pub fn scheme(&self) -> &BilinearScheme {
        &self.scheme
    }

    pub fn design(&self) -> &NoiseDesign {
        &self.design
    }

    /// `c_i = prod_{j != i} (f_j - f_i)`.
    pub fn c(&self) -> &[u64] {
        &self.c
    }

    fn delta(&self, s: usize) -> u64 {
        self.f.iter().fold(1, |acc, &fi| {
            self.field.mul(acc, self.field.sub(fi, self.alpha[s]))
        })
    }

    fn pole(&self, i: usize, s: usize) -> u64 {
        self.field
            .inv(self.field.sub(self.f[i], self.alpha[s]))
            .expect("poles and server points are distinct")
    }

    /// `A~ = Delta (sum P_i / (f_i - alpha) + Z^A)` and `B~ = sum Q_i / (f_i - alpha) + Z^B`.
    pub fn share(
        &self,
        a: &BlockGrid,
        b: &BlockGrid,
        noise_a: &FieldMatrix,
        noise_b: &FieldMatrix,
        s: usize,
    ) -> Result<(FieldMatrix, FieldMatrix)> {
        let ps = self.scheme.left_factors(a)?;
        let qs = self.scheme.right_factors(b)?;
        let mut sa = noise_a.clone();
        let mut sb = noise_b.clone();
        for i in 0..7 {
            let w = self.pole(i, s);
            sa.add_scaled(w, &ps[i])?;
            sb.add_scaled(w, &qs[i])?;
        }
        Ok((sa.scale(self.delta(s)), sb))
    }

    /// `Z~_s = sum_i c_i (N z)_i / (f_i - alpha_s) + sum_j alpha_s^j Z_{j+4}`.
    pub fn noise_share(&self, noise: &StrassenNoise, s: usize) -> Result<FieldMatrix> {
        let f = self.field;
        let (r, c) = noise.z[0].shape();
        let mut out = FieldMatrix::zeros(f, r, c);
        for i in 0..7 {
            let w = f.mul(self.c[i], self.pole(i, s));
            for (j, z) in noise.z.iter().enumerate() {
                let n = self.design.n.get(i, j);
                if n != 0 {
                    out.add_scaled(f.mul(w, n), z)?;
                }
            }
        }
        for (j, m) in noise.masks.iter().enumerate() {
            out.add_scaled(f.pow(self.alpha[s], j as u64), m)?;
        }
        Ok(out)
    }

    pub fn answer(
        &self,
        share: &(FieldMatrix, FieldMatrix),
        noise_share: &FieldMatrix,
    ) -> Result<FieldMatrix> {
        share.0.mul(&share.1)?.add(noise_share)
    }

    /// Decodes from the first fifteen responsive answers by server index.
    pub fn decode(&self, answers: &[Answer]) -> Result<StrassenDecoded> {
        let mut seen = HashSet::new();
        let mut responsive: Vec<(usize, &FieldMatrix)> = Vec::new();
        for a in answers {
            if a.server >= self.servers() {
                return Err(Error::Index(format!("server {} does not exist", a.server)));
            }
            if !seen.insert(a.server) {
                return Err(Error::InvalidParams(format!(
                    "duplicate answer from server {}",
                    a.server
                )));
            }
            if let Some(v) = &a.value {
                responsive.push((a.server, v));
            }
        }
        if responsive.len() < STRASSEN_THRESHOLD {
            return Err(Error::NotEnoughAnswers {
                needed: STRASSEN_THRESHOLD,
                got: responsive.len(),
            });
        }
        responsive.sort_by_key(|(s, _)| *s);
        responsive.truncate(STRASSEN_THRESHOLD);
        let f = self.field;
        let (r, c) = responsive[0].1.shape();
        let alphas: Vec<u64> = responsive.iter().map(|(s, _)| self.alpha[*s]).collect();
        let vand = vandermonde(f, &alphas, 8)?;
        let mut system = FieldMatrix::zeros(f, STRASSEN_THRESHOLD, STRASSEN_THRESHOLD);
        for (row, (s, _)) in responsive.iter().enumerate() {
            for i in 0..7 {
                system.set(row, i, self.pole(i, *s));
            }
        }
        system.paste(0, 7, &vand)?;
        let rhs = FieldMatrix::new(
            f,
            STRASSEN_THRESHOLD,
            r * c,
            responsive
                .iter()
                .flat_map(|(_, v)| v.as_slice().iter().copied())
                .collect(),
        )?;
        let sol = system.solve(&rhs).map_err(|e| match e {
            Error::SingularMatrix => {
                Error::Internal("Cauchy-Vandermonde system is singular".into())
            }
            other => other,
        })?;
        let t: Vec<FieldMatrix> = (0..7)
            .map(|i| {
                let inv = f.inv(self.c[i]).expect("distinct poles");
                FieldMatrix::new(f, r, c, sol.row(i).to_vec())
                    .expect("row width")
                    .scale(inv)
            })
            .collect();
        let product = reassemble(&self.scheme.reconstruct_blocks(&t)?, 2, 2)?;
        Ok(StrassenDecoded { t, product })
    }

    /// One honest run with every server responsive except `stragglers`.
    pub fn run<R: Rng + ?Sized>(
        &self,
        a: &FieldMatrix,
        b: &FieldMatrix,
        stragglers: &[usize],
        rng: &mut R,
    ) -> Result<StrassenDecoded> {
        let ag = partition(a, 2, 2)?;
        let bg = partition(b, 2, 2)?;
        let (ar, ac) = ag.block_shape();
        let (br, bc) = bg.block_shape();
        let za = FieldMatrix::random(self.field, ar, ac, rng);
        let zb = FieldMatrix::random(self.field, br, bc, rng);
        let noise = StrassenNoise::generate(self.field, (ar, bc), rng);
        let answers = (0..self.servers())
            .map(|s| {
                if stragglers.contains(&s) {
                    return Ok(Answer::straggler(s));
                }
                let share = self.share(&ag, &bg, &za, &zb, s)?;
                Ok(Answer::responsive(
                    s,
                    self.answer(&share, &self.noise_share(&noise, s)?)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        self.decode(&answers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn identity_times_identity() {
        let f = gf(7);
        let s = BilinearScheme::strassen().unwrap();
        let i = FieldMatrix::identity(f, 2);
        assert_eq!(s.multiply(&i, &i).unwrap(), i);
    }

    #[test]
    fn matches_direct_product() {
        let f = gf(101);
        let s = BilinearScheme::strassen().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = FieldMatrix::random(f, 2, 2, &mut rng);
            let b = FieldMatrix::random(f, 2, 2, &mut rng);
            assert_eq!(s.multiply(&a, &b).unwrap(), a.mul(&b).unwrap());
        }
        let a = FieldMatrix::random(f, 4, 6, &mut rng);
        let b = FieldMatrix::random(f, 6, 2, &mut rng);
        assert_eq!(s.multiply(&a, &b).unwrap(), a.mul(&b).unwrap());
    }

    #[test]
    fn c21_is_p3q3_plus_p4q4() {
        assert_eq!(RECON[2], [0, 0, 1, 1, 0, 0, 0]);
        let f = gf(101);
        let s = BilinearScheme::strassen().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let ag = partition(&FieldMatrix::random(f, 2, 2, &mut rng), 2, 2).unwrap();
        let bg = partition(&FieldMatrix::random(f, 2, 2, &mut rng), 2, 2).unwrap();
        let prods = s.products(&ag, &bg).unwrap();
        let c = s.reconstruct_blocks(&prods).unwrap();
        assert_eq!(c[&(2, 1)], prods[2].add(&prods[3]).unwrap());
    }

    #[test]
    fn broken_assignment_is_rejected() {
        let mut q = Q_COEFFS;
        q[0] = [0, 1, 0, 1];
        assert!(matches!(
            BilinearScheme::new(RECON, P_COEFFS, q),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn noise_design_cancels() {
        for q in [5, 7, 101, 65537] {
            let f = gf(q);
            let recon = BilinearScheme::strassen().unwrap().recon(f);
            assert_eq!(recon.null_space().cols(), 3);
            let d = noise_design(&recon).unwrap();
            assert!(recon.mul(&d.n).unwrap().is_zero());
            assert_eq!(d.n.rank(), 3);
        }
    }

    #[test]
    fn noise_design_keeps_consistent_legacy_columns() {
        let f = gf(101);
        let d = noise_design(&BilinearScheme::strassen().unwrap().recon(f)).unwrap();
        let legacy = legacy_noise(f);
        assert_eq!(
            d.n.submatrix(0, 0, 7, 2).unwrap(),
            legacy.submatrix(0, 1, 7, 2).unwrap()
        );
    }

    #[test]
    fn rank_deficient_recon_is_rejected() {
        let f = gf(7);
        let recon = FieldMatrix::from_signed(f, &[vec![1, 1, 0], vec![2, 2, 0]]).unwrap();
        assert!(matches!(noise_design(&recon), Err(Error::Rank(_))));
    }

    #[test]
    fn legacy_pattern_leaves_residue() {
        // expected failure: recon * N_legacy = [[2,0,0],[-2,0,0],[0,0,0],[0,0,0]]
        for q in [7, 31, 101] {
            let f = gf(q);
            let recon = BilinearScheme::strassen().unwrap().recon(f);
            let residue = recon.mul(&legacy_noise(f)).unwrap();
            let expect = FieldMatrix::from_signed(
                f,
                &[vec![2, 0, 0], vec![-2, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
            )
            .unwrap();
            assert_eq!(residue, expect);
        }
        let f2 = gf(2);
        let recon = BilinearScheme::strassen().unwrap().recon(f2);
        assert!(recon.mul(&legacy_noise(f2)).unwrap().is_zero());
    }

    #[test]
    fn end_to_end_gf31() {
        let f = gf(31);
        let na = StrassenNa::new(f, 15).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = FieldMatrix::random(f, 2, 2, &mut rng);
            let b = FieldMatrix::random(f, 2, 2, &mut rng);
            assert_eq!(
                na.run(&a, &b, &[], &mut rng).unwrap().product,
                a.mul(&b).unwrap()
            );
        }
    }

    #[test]
    fn stragglers_and_threshold() {
        let f = gf(101);
        let na = StrassenNa::new(f, 17).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let a = FieldMatrix::random(f, 4, 4, &mut rng);
        let b = FieldMatrix::random(f, 4, 2, &mut rng);
        assert_eq!(
            na.run(&a, &b, &[0, 9], &mut rng).unwrap().product,
            a.mul(&b).unwrap()
        );
        assert_eq!(
            na.run(&a, &b, &[0, 1, 2], &mut rng).map(|d| d.product),
            Err(Error::NotEnoughAnswers {
                needed: 15,
                got: 14
            })
        );
    }

    #[test]
    fn decoded_terms_are_products_plus_design_noise() {
        let f = gf(101);
        let na = StrassenNa::new(f, 15).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let ag = partition(&FieldMatrix::random(f, 2, 4, &mut rng), 2, 2).unwrap();
        let bg = partition(&FieldMatrix::random(f, 4, 2, &mut rng), 2, 2).unwrap();
        let za = FieldMatrix::random(f, 1, 2, &mut rng);
        let zb = FieldMatrix::random(f, 2, 1, &mut rng);
        let noise = StrassenNoise::generate(f, (1, 1), &mut rng);
        let answers: Vec<Answer> = (0..15)
            .map(|s| {
                let sh = na.share(&ag, &bg, &za, &zb, s).unwrap();
                Answer::responsive(
                    s,
                    na.answer(&sh, &na.noise_share(&noise, s).unwrap()).unwrap(),
                )
            })
            .collect();
        let dec = na.decode(&answers).unwrap();
        let prods = na.scheme().products(&ag, &bg).unwrap();
        for i in 0..7 {
            let mut expect = prods[i].clone();
            for j in 0..3 {
                expect
                    .add_scaled(na.design().n.get(i, j), &noise.z[j])
                    .unwrap();
            }
            assert_eq!(dec.t[i], expect, "T_{}", i + 1);
        }
    }

    #[test]
    fn zero_input_leaves_only_noise() {
        let f = gf(31);
        let na = StrassenNa::new(f, 15).unwrap();
        let zero = FieldMatrix::zeros(f, 2, 2);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let dec = na.run(&zero, &zero, &[], &mut rng).unwrap();
        assert!(dec.product.is_zero());
        // T lies in the column span of N
        let t = FieldMatrix::new(f, 7, 1, dec.t.iter().map(|m| m.get(0, 0)).collect()).unwrap();
        let n = &na.design().n;
        let both = FieldMatrix::vstack(&[n.transpose(), t.transpose()]).unwrap();
        assert_eq!(both.rank(), 3);
    }

    #[test]
    fn masked_component_is_uniform_given_product() {
        // Over GF(7), every (A, B) with the same product yields the same
        // multiset of decoded T vectors across all 343 noise draws.
        let f = gf(7);
        let s = BilinearScheme::strassen().unwrap();
        let n = noise_design(&s.recon(f)).unwrap().n;
        let view = |a: &FieldMatrix, b: &FieldMatrix| {
            let prods = s
                .products(&partition(a, 2, 2).unwrap(), &partition(b, 2, 2).unwrap())
                .unwrap();
            let mut all = Vec::new();
            for z in 0..343u64 {
                let zv = [z % 7, (z / 7) % 7, z / 49];
                let t: Vec<u64> = (0..7)
                    .map(|i| {
                        (0..3).fold(prods[i].get(0, 0), |acc, j| {
                            f.add(acc, f.mul(n.get(i, j), zv[j]))
                        })
                    })
                    .collect();
                all.push(t);
            }
            all.sort();
            all
        };
        let i = FieldMatrix::identity(f, 2);
        let a = FieldMatrix::from_rows(f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let a_inv = a.inverse().unwrap();
        // I * I and A * A^-1 share the product I
        assert_eq!(view(&i, &i), view(&a, &a_inv));
        let v = view(&i, &i);
        let mut dedup = v.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 343);
    }

    #[test]
    fn point_checks() {
        assert!(matches!(
            StrassenNa::new(gf(13), 15),
            Err(Error::FieldTooSmall {
                modulus: 13,
                needed: 22
            })
        ));
        assert!(matches!(
            StrassenNa::new(gf(101), 14),
            Err(Error::InsufficientServers {
                servers: 14,
                threshold: 15
            })
        ));
    }
}

//! The GCSA-NA protocol: sharing, server noise alignment, answers and
//! reconstruction for secure batch matrix multiplication.
//!
//! Batch instances are grouped as `l in 0..ell`, `k in 0..kc` and flattened to
//! `t = l * kc + k`, which is also the position of the product in the batch.
//! Server indices are 0-based.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::block::{partition, product_positions, reassemble, BlockGrid};
use crate::ep;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FieldMatrix;
use crate::structured::{cauchy_power, lower_toeplitz, vandermonde};

/// Raw protocol integers as supplied by a caller or a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSpec {
    /// Number of servers `S`.
    #[serde(alias = "S")]
    pub servers: usize,
    /// Collusion tolerance `X`.
    #[serde(alias = "X")]
    pub security: usize,
    /// Number of groups `ell`.
    pub ell: usize,
    /// Instances per group `K_c`.
    #[serde(alias = "Kc")]
    pub kc: usize,
    pub p: usize,
    pub m: usize,
    pub n: usize,
    pub lambda: usize,
    pub kappa: usize,
    pub mu: usize,
}

impl ParamSpec {
    pub fn batch(&self) -> usize {
        self.ell * self.kc
    }

    pub fn r_prime(&self) -> usize {
        self.p * self.m * self.n
    }

    /// `R = pmn(ell + 1)K_c + 2X - 1`.
    pub fn recovery_threshold(&self) -> usize {
        self.r_prime() * (self.ell + 1) * self.kc + 2 * self.security - 1
    }
}

/// Validated parameters together with the field they live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeParams {
    spec: ParamSpec,
    field: PrimeField,
}

impl SchemeParams {
    pub fn derive(spec: ParamSpec, field: PrimeField) -> Result<Self> {
        let counts = [
            ("S", spec.servers),
            ("ell", spec.ell),
            ("Kc", spec.kc),
            ("p", spec.p),
            ("m", spec.m),
            ("n", spec.n),
            ("lambda", spec.lambda),
            ("kappa", spec.kappa),
            ("mu", spec.mu),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidParams(format!("{name} must be at least 1")));
        }
        if spec.security == 0 {
            return Err(Error::InvalidParams("X must be at least 1".into()));
        }
        for (dim, parts) in [
            (spec.lambda, spec.m),
            (spec.kappa, spec.p),
            (spec.mu, spec.n),
        ] {
            if dim % parts != 0 {
                return Err(Error::NotDivisible { dim, parts });
            }
        }
        let needed = (spec.servers + spec.batch()) as u64;
        if field.modulus() < needed {
            return Err(Error::FieldTooSmall {
                modulus: field.modulus(),
                needed,
            });
        }
        let threshold = spec.recovery_threshold();
        if threshold > spec.servers {
            return Err(Error::InsufficientServers {
                servers: spec.servers,
                threshold,
            });
        }
        Ok(Self { spec, field })
    }

    pub fn spec(&self) -> &ParamSpec {
        &self.spec
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn servers(&self) -> usize {
        self.spec.servers
    }

    pub fn security(&self) -> usize {
        self.spec.security
    }

    pub fn batch(&self) -> usize {
        self.spec.batch()
    }

    pub fn r_prime(&self) -> usize {
        self.spec.r_prime()
    }

    pub fn recovery_threshold(&self) -> usize {
        self.spec.recovery_threshold()
    }

    /// `D_E = max(pm, pmn - pm + p) - 1`.
    pub fn d_e(&self) -> usize {
        let ParamSpec { p, m, n, .. } = self.spec;
        (p * m).max(p * m * n - p * m + p) - 1
    }

    /// Number of polynomial (Vandermonde) terms in an answer, `R'K_c + 2X - 1`.
    pub fn poly_terms(&self) -> usize {
        self.r_prime() * self.spec.kc + 2 * self.spec.security - 1
    }

    /// Number of aligned noise matrices `Z'`, `R'(K_c - 1) + X + D_E`.
    pub fn aligned_noise_len(&self) -> usize {
        self.r_prime() * (self.spec.kc - 1) + self.spec.security + self.d_e()
    }

    /// 1-based coefficient positions holding product blocks.
    pub fn desired_positions(&self) -> Vec<usize> {
        product_positions(self.spec.p, self.spec.m, self.spec.n)
            .into_iter()
            .map(|(_, e)| e)
            .collect()
    }

    pub fn a_block_shape(&self) -> (usize, usize) {
        (
            self.spec.lambda / self.spec.m,
            self.spec.kappa / self.spec.p,
        )
    }

    pub fn b_block_shape(&self) -> (usize, usize) {
        (self.spec.kappa / self.spec.p, self.spec.mu / self.spec.n)
    }

    pub fn answer_shape(&self) -> (usize, usize) {
        (self.spec.lambda / self.spec.m, self.spec.mu / self.spec.n)
    }
}

/// Evaluation points: one pole `f` per batch instance and one `alpha` per server.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalPoints {
    pub f: Vec<u64>,
    pub alpha: Vec<u64>,
}

/// How evaluation points are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointPolicy {
    #[default]
    Sequential,
    Random,
}

impl EvalPoints {
    pub fn new(field: PrimeField, f: Vec<u64>, alpha: Vec<u64>) -> Result<Self> {
        let f: Vec<u64> = f.into_iter().map(|v| field.elem(v)).collect();
        let alpha: Vec<u64> = alpha.into_iter().map(|v| field.elem(v)).collect();
        let mut seen = HashSet::new();
        for &v in f.iter().chain(&alpha) {
            if !seen.insert(v) {
                return Err(Error::DegeneratePoints(format!("value {v} used twice")));
            }
        }
        Ok(Self { f, alpha })
    }

    fn check_room(field: PrimeField, batch: usize, servers: usize) -> Result<()> {
        let needed = (batch + servers) as u64;
        if field.modulus() < needed {
            return Err(Error::FieldTooSmall {
                modulus: field.modulus(),
                needed,
            });
        }
        Ok(())
    }

    /// `f_t = t + 1` and `alpha_s = L + s + 1`, reduced mod q.
    pub fn sequential(field: PrimeField, batch: usize, servers: usize) -> Result<Self> {
        Self::check_room(field, batch, servers)?;
        let f = (1..=batch as u64).collect();
        let alpha = (batch as u64 + 1..=(batch + servers) as u64).collect();
        Self::new(field, f, alpha)
    }

    /// Distinct points drawn uniformly from the field.
    pub fn random<R: Rng + ?Sized>(
        field: PrimeField,
        batch: usize,
        servers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        Self::check_room(field, batch, servers)?;
        let mut seen = HashSet::new();
        let mut values = Vec::with_capacity(batch + servers);
        while values.len() < batch + servers {
            let v = field.random(rng);
            if seen.insert(v) {
                values.push(v);
            }
        }
        let alpha = values.split_off(batch);
        Self::new(field, values, alpha)
    }

    pub fn choose<R: Rng + ?Sized>(
        policy: PointPolicy,
        field: PrimeField,
        batch: usize,
        servers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        match policy {
            PointPolicy::Sequential => Self::sequential(field, batch, servers),
            PointPolicy::Random => Self::random(field, batch, servers, rng),
        }
    }
}

/// Coefficients of `prod_{k' != k} (a + f_{l,k'} - f_{l,k})^{R'}`, lowest degree first.
pub fn psi_coeffs(params: &SchemeParams, points: &EvalPoints, l: usize, k: usize) -> Vec<u64> {
    let field = params.field();
    let kc = params.spec().kc;
    let base = points.f[l * kc + k];
    let mut poly = vec![1 % field.modulus()];
    for other in (0..kc).filter(|&o| o != k) {
        let shift = field.sub(points.f[l * kc + other], base);
        for _ in 0..params.r_prime() {
            // multiply by (a + shift)
            let mut next = vec![0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i] = field.add(next[i], field.mul(c, shift));
                next[i + 1] = field.add(next[i + 1], c);
            }
            poly = next;
        }
    }
    poly
}

/// Private noise of one source: `X` matrices per group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceNoise {
    pub groups: Vec<Vec<FieldMatrix>>,
}

impl SourceNoise {
    pub fn random<R: Rng + ?Sized>(
        params: &SchemeParams,
        shape: (usize, usize),
        rng: &mut R,
    ) -> Self {
        let groups = (0..params.spec().ell)
            .map(|_| {
                (0..params.security())
                    .map(|_| FieldMatrix::random(params.field(), shape.0, shape.1, rng))
                    .collect()
            })
            .collect();
        Self { groups }
    }

    pub fn zeros(params: &SchemeParams, shape: (usize, usize)) -> Self {
        let z = FieldMatrix::zeros(params.field(), shape.0, shape.1);
        Self {
            groups: vec![vec![z; params.security()]; params.spec().ell],
        }
    }
}

/// What one server receives from the two sources: one share per group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerShare {
    pub a: Vec<FieldMatrix>,
    pub b: Vec<FieldMatrix>,
}

impl ServerShare {
    pub fn symbols(&self) -> (usize, usize) {
        (
            self.a.iter().map(FieldMatrix::len).sum(),
            self.b.iter().map(FieldMatrix::len).sum(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareBundle {
    pub servers: Vec<ServerShare>,
}

/// Server-side noise: the aligned set `Z'` and the per-instance set `Z''`,
/// which is zero exactly at the product positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseBundle {
    pub aligned: Vec<FieldMatrix>,
    /// `cross[t][i]` is `Z''` at 1-based position `i + 1` of instance `t`.
    pub cross: Vec<Vec<FieldMatrix>>,
}

impl NoiseBundle {
    pub fn generate<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Self {
        Self::build(params, |shape| {
            FieldMatrix::random(params.field(), shape.0, shape.1, rng)
        })
    }

    pub fn zeros(params: &SchemeParams) -> Self {
        Self::build(params, |shape| {
            FieldMatrix::zeros(params.field(), shape.0, shape.1)
        })
    }

    fn build(params: &SchemeParams, mut draw: impl FnMut((usize, usize)) -> FieldMatrix) -> Self {
        let shape = params.answer_shape();
        let desired: HashSet<usize> = params.desired_positions().into_iter().collect();
        let aligned = (0..params.aligned_noise_len())
            .map(|_| draw(shape))
            .collect();
        let cross = (0..params.batch())
            .map(|_| {
                (1..=params.r_prime())
                    .map(|pos| {
                        if desired.contains(&pos) {
                            FieldMatrix::zeros(params.field(), shape.0, shape.1)
                        } else {
                            draw(shape)
                        }
                    })
                    .collect()
            })
            .collect();
        Self { aligned, cross }
    }

    /// Number of matrices drawn at random (zero positions excluded).
    pub fn random_count(&self, params: &SchemeParams) -> usize {
        self.aligned.len()
            + self.cross.len() * (params.r_prime() - params.desired_positions().len())
    }

    pub fn zero_count(&self, params: &SchemeParams) -> usize {
        self.cross.len() * params.desired_positions().len()
    }
}

/// A server's reply to the master; `None` for a straggler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub server: usize,
    pub value: Option<FieldMatrix>,
}

impl Answer {
    pub fn responsive(server: usize, value: FieldMatrix) -> Self {
        Self {
            server,
            value: Some(value),
        }
    }

    pub fn straggler(server: usize) -> Self {
        Self {
            server,
            value: None,
        }
    }

    pub fn is_responsive(&self) -> bool {
        self.value.is_some()
    }
}

/// `Y_s = sum_l A~_l B~_l + M~_s`.
pub fn server_answer(share: &ServerShare, noise_share: &FieldMatrix) -> Result<FieldMatrix> {
    if share.a.len() != share.b.len() {
        return Err(Error::Shape(format!(
            "{} A-shares but {} B-shares",
            share.a.len(),
            share.b.len()
        )));
    }
    let mut y = noise_share.clone();
    for (a, b) in share.a.iter().zip(&share.b) {
        y.add_scaled(1, &a.mul(b)?)?;
    }
    Ok(y)
}

/// Coefficients recovered by the master before extracting the products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedTerms {
    /// `masked[t][i]` is `C + Z''` at 1-based position `i + 1` of instance `t`.
    pub masked: Vec<Vec<FieldMatrix>>,
    /// Coefficients of `1, alpha, ..., alpha^(R'K_c + 2X - 2)`.
    pub poly: Vec<FieldMatrix>,
}

/// Public state shared by sources, servers and master.
#[derive(Debug, Clone)]
pub struct GcsaNa {
    params: SchemeParams,
    points: EvalPoints,
    psi: Vec<Vec<u64>>,
}

impl GcsaNa {
    pub fn new(params: SchemeParams, points: EvalPoints) -> Result<Self> {
        if points.f.len() != params.batch() || points.alpha.len() != params.servers() {
            return Err(Error::InvalidParams(format!(
                "{} poles and {} server points for batch {} and {} servers",
                points.f.len(),
                points.alpha.len(),
                params.batch(),
                params.servers()
            )));
        }
        let kc = params.spec().kc;
        let psi = (0..params.batch())
            .map(|t| psi_coeffs(&params, &points, t / kc, t % kc))
            .collect();
        Ok(Self {
            params,
            points,
            psi,
        })
    }

    /// Convenience constructor with sequential points.
    pub fn sequential(params: SchemeParams) -> Result<Self> {
        let points = EvalPoints::sequential(params.field(), params.batch(), params.servers())?;
        Self::new(params, points)
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn points(&self) -> &EvalPoints {
        &self.points
    }

    pub fn psi(&self, t: usize) -> &[u64] {
        &self.psi[t]
    }

    fn shift(&self, t: usize, s: usize) -> u64 {
        self.params
            .field()
            .sub(self.points.f[t], self.points.alpha[s])
    }

    /// `Delta_s^l = prod_k (f_{l,k} - alpha_s)^{R'}`.
    pub fn delta(&self, s: usize, l: usize) -> u64 {
        let field = self.params.field();
        let kc = self.params.spec().kc;
        (0..kc).fold(1, |acc, k| {
            field.mul(
                acc,
                field.pow(self.shift(l * kc + k, s), self.params.r_prime() as u64),
            )
        })
    }

    fn check_inputs(
        &self,
        inputs: &[FieldMatrix],
        shape: (usize, usize),
        side: &str,
    ) -> Result<()> {
        if inputs.len() != self.params.batch() {
            return Err(Error::Shape(format!(
                "{side}: {} inputs for batch size {}",
                inputs.len(),
                self.params.batch()
            )));
        }
        if let Some(bad) = inputs
            .iter()
            .find(|m| m.shape() != shape || m.field() != self.params.field())
        {
            return Err(Error::Shape(format!(
                "{side}: input is {:?}, expected {shape:?}",
                bad.shape()
            )));
        }
        Ok(())
    }

    fn noise_poly(&self, s: usize, noise: &[FieldMatrix]) -> Result<FieldMatrix> {
        let field = self.params.field();
        let (r, c) = noise[0].shape();
        let mut acc = FieldMatrix::zeros(field, r, c);
        let alpha = self.points.alpha[s];
        for (x, z) in noise.iter().enumerate() {
            acc.add_scaled(field.pow(alpha, x as u64), z)?;
        }
        Ok(acc)
    }

    /// Shares of the A batch, indexed `[server][group]`.
    pub fn share_a(
        &self,
        inputs: &[FieldMatrix],
        noise: &SourceNoise,
    ) -> Result<Vec<Vec<FieldMatrix>>> {
        let spec = *self.params.spec();
        self.check_inputs(inputs, (spec.lambda, spec.kappa), "A")?;
        let grids: Vec<BlockGrid> = inputs
            .iter()
            .map(|a| partition(a, spec.m, spec.p))
            .collect::<Result<_>>()?;
        let field = self.params.field();
        let rp = self.params.r_prime() as u64;
        (0..spec.servers)
            .map(|s| {
                (0..spec.ell)
                    .map(|l| {
                        let powers: Vec<u64> = (0..spec.kc)
                            .map(|k| field.pow(self.shift(l * spec.kc + k, s), rp))
                            .collect();
                        let mut share = self
                            .noise_poly(s, &noise.groups[l])?
                            .scale(self.delta(s, l));
                        for k in 0..spec.kc {
                            let t = l * spec.kc + k;
                            // Delta / (f - alpha)^{R'} without inverting
                            let w = (0..spec.kc)
                                .filter(|&o| o != k)
                                .fold(1, |acc, o| field.mul(acc, powers[o]));
                            share.add_scaled(w, &ep::encode_a(&grids[t], self.shift(t, s)))?;
                        }
                        Ok(share)
                    })
                    .collect()
            })
            .collect()
    }

    /// Shares of the B batch, indexed `[server][group]`.
    pub fn share_b(
        &self,
        inputs: &[FieldMatrix],
        noise: &SourceNoise,
    ) -> Result<Vec<Vec<FieldMatrix>>> {
        let spec = *self.params.spec();
        self.check_inputs(inputs, (spec.kappa, spec.mu), "B")?;
        let grids: Vec<BlockGrid> = inputs
            .iter()
            .map(|b| partition(b, spec.p, spec.n))
            .collect::<Result<_>>()?;
        let field = self.params.field();
        let rp = self.params.r_prime() as u64;
        (0..spec.servers)
            .map(|s| {
                (0..spec.ell)
                    .map(|l| {
                        let mut share = self.noise_poly(s, &noise.groups[l])?;
                        for k in 0..spec.kc {
                            let t = l * spec.kc + k;
                            let x = self.shift(t, s);
                            let w = field.inv(field.pow(x, rp))?;
                            share.add_scaled(w, &ep::encode_b(&grids[t], spec.m, x))?;
                        }
                        Ok(share)
                    })
                    .collect()
            })
            .collect()
    }

    /// Draws fresh source noise and builds every server's shares.
    pub fn make_shares<R1: Rng + ?Sized, R2: Rng + ?Sized>(
        &self,
        a: &[FieldMatrix],
        b: &[FieldMatrix],
        rng_a: &mut R1,
        rng_b: &mut R2,
    ) -> Result<(ShareBundle, SourceNoise, SourceNoise)> {
        let noise_a = SourceNoise::random(&self.params, self.params.a_block_shape(), rng_a);
        let noise_b = SourceNoise::random(&self.params, self.params.b_block_shape(), rng_b);
        let bundle = self.shares_with_noise(a, b, &noise_a, &noise_b)?;
        Ok((bundle, noise_a, noise_b))
    }

    pub fn shares_with_noise(
        &self,
        a: &[FieldMatrix],
        b: &[FieldMatrix],
        noise_a: &SourceNoise,
        noise_b: &SourceNoise,
    ) -> Result<ShareBundle> {
        let sa = self.share_a(a, noise_a)?;
        let sb = self.share_b(b, noise_b)?;
        Ok(ShareBundle {
            servers: sa
                .into_iter()
                .zip(sb)
                .map(|(a, b)| ServerShare { a, b })
                .collect(),
        })
    }

    /// The aligned noise `M~_s` for server `s`. Depends only on the noise
    /// bundle and public points.
    pub fn noise_share(&self, noise: &NoiseBundle, s: usize) -> Result<FieldMatrix> {
        let field = self.params.field();
        let rp = self.params.r_prime();
        let mut out = self.noise_poly(s, &noise.aligned)?;
        for (t, cross) in noise.cross.iter().enumerate() {
            let inv = field.inv(self.shift(t, s))?;
            let c = &self.psi[t];
            for i in 0..rp {
                let weight = field.pow(inv, (rp - i) as u64);
                for (ip, z) in cross.iter().enumerate().take(i + 1) {
                    let coeff = c.get(i - ip).copied().unwrap_or(0);
                    if coeff != 0 {
                        out.add_scaled(field.mul(weight, coeff), z)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// The `R x R` decoding matrix for the given server points.
    pub fn decoding_matrix(&self, alphas: &[u64]) -> Result<FieldMatrix> {
        let field = self.params.field();
        let rp = self.params.r_prime();
        let r = self.params.recovery_threshold();
        if alphas.len() != r {
            return Err(Error::NotEnoughAnswers {
                needed: r,
                got: alphas.len(),
            });
        }
        let cauchy = cauchy_power(field, alphas, &self.points.f, rp)?;
        let vand = vandermonde(field, alphas, self.params.poly_terms())?;
        let mut v = FieldMatrix::zeros(field, r, r);
        v.paste(0, 0, &cauchy)?;
        v.paste(0, cauchy.cols(), &vand)?;
        let mut v2 = FieldMatrix::identity(field, r);
        for (t, c) in self.psi.iter().enumerate() {
            let first: Vec<u64> = (0..rp).map(|i| c.get(i).copied().unwrap_or(0)).collect();
            v2.paste(t * rp, t * rp, &lower_toeplitz(field, &first))?;
        }
        v.mul(&v2)
    }

    /// Solves for the masked coefficients from the first `R` responsive answers.
    pub fn decode_terms(&self, answers: &[Answer]) -> Result<DecodedTerms> {
        let r = self.params.recovery_threshold();
        let mut seen = HashSet::new();
        let mut responsive: Vec<(usize, &FieldMatrix)> = Vec::new();
        for a in answers {
            if a.server >= self.params.servers() {
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
        if responsive.len() < r {
            return Err(Error::NotEnoughAnswers {
                needed: r,
                got: responsive.len(),
            });
        }
        responsive.sort_by_key(|(s, _)| *s);
        responsive.truncate(r);

        let shape = self.params.answer_shape();
        if let Some((s, _)) = responsive.iter().find(|(_, v)| v.shape() != shape) {
            return Err(Error::Shape(format!(
                "answer from server {s} has the wrong shape"
            )));
        }
        let alphas: Vec<u64> = responsive
            .iter()
            .map(|(s, _)| self.points.alpha[*s])
            .collect();
        let system = self.decoding_matrix(&alphas)?;
        let field = self.params.field();
        let width = shape.0 * shape.1;
        let rhs = FieldMatrix::new(
            field,
            r,
            width,
            responsive
                .iter()
                .flat_map(|(_, v)| v.as_slice().iter().copied())
                .collect(),
        )?;
        let solution = system.solve(&rhs).map_err(|e| match e {
            Error::SingularMatrix => Error::Internal("decoding matrix is singular".into()),
            other => other,
        })?;
        let unpack = |row: usize| {
            FieldMatrix::new(field, shape.0, shape.1, solution.row(row).to_vec())
                .expect("row width")
        };
        let rp = self.params.r_prime();
        let masked = (0..self.params.batch())
            .map(|t| (0..rp).map(|i| unpack(t * rp + i)).collect())
            .collect();
        let poly = (self.params.batch() * rp..r).map(unpack).collect();
        Ok(DecodedTerms { masked, poly })
    }

    /// Recovers the batch of products `A^(t) B^(t)`, in batch order.
    pub fn reconstruct(&self, answers: &[Answer]) -> Result<Vec<FieldMatrix>> {
        let terms = self.decode_terms(answers)?;
        let spec = self.params.spec();
        let positions = product_positions(spec.p, spec.m, spec.n);
        terms
            .masked
            .iter()
            .map(|coeffs| {
                let blocks: BTreeMap<(usize, usize), FieldMatrix> = positions
                    .iter()
                    .map(|&(key, pos)| (key, coeffs[pos - 1].clone()))
                    .collect();
                reassemble(&blocks, spec.m, spec.n)
            })
            .collect()
    }

    /// The `X x X` matrix with entries `Delta_s^l alpha_s^(x-1)` for the given
    /// servers; invertible iff those servers' A-shares of group `l` are a
    /// bijective image of the source noise.
    pub fn collusion_matrix_a(&self, servers: &[usize], l: usize) -> FieldMatrix {
        let field = self.params.field();
        let x = self.params.security();
        let mut m = FieldMatrix::zeros(field, servers.len(), x);
        for (row, &s) in servers.iter().enumerate() {
            let d = self.delta(s, l);
            for col in 0..x {
                m.set(
                    row,
                    col,
                    field.mul(d, field.pow(self.points.alpha[s], col as u64)),
                );
            }
        }
        m
    }

    /// B-side counterpart of [`Self::collusion_matrix_a`]: entries `alpha_s^(x-1)`.
    pub fn collusion_matrix_b(&self, servers: &[usize]) -> FieldMatrix {
        let alphas: Vec<u64> = servers.iter().map(|&s| self.points.alpha[s]).collect();
        vandermonde(self.params.field(), &alphas, self.params.security())
            .expect("server points are distinct")
    }
}

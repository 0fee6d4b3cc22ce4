//! Polynomial-sharing baseline for a single product with `m = n = 1`.
//!
//! Each server multiplies its shares, weights the product with a Lagrange
//! extraction constant `r_s`, and re-shares it to every other server with a
//! fresh degree-`X` noise polynomial. The aggregate each server returns is
//! `AB + sum_x alpha_s^x (sum_j Z_{j,x})`, so any `X + 1` of them decode `AB`.

use rand::Rng;

use crate::block::BlockGrid;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FieldMatrix;
use crate::structured::vandermonde;

/// Number of servers polynomial sharing needs, `2p + 2X - 1`.
pub fn ps_threshold(p: usize, security: usize) -> usize {
    2 * p + 2 * security - 1
}

/// Shares for the server at point `alpha`:
/// `A~ = sum A_j a^(j-1) + sum_x a^(p-1+x) ZA_x` and
/// `B~ = sum B_i a^(p-i) + sum_x a^(p-1+x) ZB_x`.
pub fn ps_share(
    a_blocks: &BlockGrid,
    b_blocks: &BlockGrid,
    alpha: u64,
    noise_a: &[FieldMatrix],
    noise_b: &[FieldMatrix],
) -> Result<(FieldMatrix, FieldMatrix)> {
    if a_blocks.grid_rows() != 1 || b_blocks.grid_cols() != 1 {
        return Err(Error::UnsupportedPartition {
            m: a_blocks.grid_rows(),
            n: b_blocks.grid_cols(),
        });
    }
    let p = a_blocks.grid_cols();
    if b_blocks.grid_rows() != p || noise_a.len() != noise_b.len() {
        return Err(Error::Shape("inconsistent PS partition or noise".into()));
    }
    let field = a_blocks.block(0, 0).field();
    let (ar, ac) = a_blocks.block_shape();
    let (br, bc) = b_blocks.block_shape();
    let mut sa = FieldMatrix::zeros(field, ar, ac);
    let mut sb = FieldMatrix::zeros(field, br, bc);
    for j in 0..p {
        sa.add_scaled(field.pow(alpha, j as u64), a_blocks.block(0, j))?;
        sb.add_scaled(field.pow(alpha, (p - 1 - j) as u64), b_blocks.block(j, 0))?;
    }
    for (x, (za, zb)) in noise_a.iter().zip(noise_b).enumerate() {
        let w = field.pow(alpha, (p + x) as u64);
        sa.add_scaled(w, za)?;
        sb.add_scaled(w, zb)?;
    }
    Ok((sa, sb))
}

/// Public parameters of one polynomial-sharing run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsInstance {
    field: PrimeField,
    p: usize,
    security: usize,
    alpha: Vec<u64>,
    r: Vec<u64>,
}

/// Messages and aggregates of the re-sharing round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsRound {
    /// `messages[from][to]`, `None` on the diagonal.
    pub messages: Vec<Vec<Option<FieldMatrix>>>,
    pub aggregates: Vec<FieldMatrix>,
}

impl PsRound {
    pub fn message_count(&self) -> usize {
        self.messages
            .iter()
            .flatten()
            .filter(|m| m.is_some())
            .count()
    }
}

impl PsInstance {
    /// Instance with points `alpha_s = s + 1`.
    pub fn new(field: PrimeField, p: usize, security: usize, servers: usize) -> Result<Self> {
        let needed = servers as u64 + 1;
        if field.modulus() < needed {
            return Err(Error::FieldTooSmall {
                modulus: field.modulus(),
                needed,
            });
        }
        Self::with_points(field, p, security, (1..=servers as u64).collect())
    }

    pub fn with_points(
        field: PrimeField,
        p: usize,
        security: usize,
        alpha: Vec<u64>,
    ) -> Result<Self> {
        if p == 0 || security == 0 {
            return Err(Error::InvalidParams("p and X must be at least 1".into()));
        }
        let threshold = ps_threshold(p, security);
        if alpha.len() < threshold {
            return Err(Error::InsufficientServers {
                servers: alpha.len(),
                threshold,
            });
        }
        if alpha.len() > threshold {
            return Err(Error::InvalidParams(format!(
                "polynomial sharing runs with exactly {threshold} servers, got {}",
                alpha.len()
            )));
        }
        // r^T V = e_p: row p of V^-1 extracts the coefficient of a^(p-1)
        let v = vandermonde(field, &alpha, threshold)?;
        let mut target = FieldMatrix::zeros(field, threshold, 1);
        target.set(p - 1, 0, 1);
        let r = v.transpose().solve(&target)?.into_vec();
        Ok(Self {
            field,
            p,
            security,
            alpha,
            r,
        })
    }

    pub fn servers(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    pub fn extraction_constants(&self) -> &[u64] {
        &self.r
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn security(&self) -> usize {
        self.security
    }

    pub fn share(
        &self,
        a_blocks: &BlockGrid,
        b_blocks: &BlockGrid,
        noise_a: &[FieldMatrix],
        noise_b: &[FieldMatrix],
        server: usize,
    ) -> Result<(FieldMatrix, FieldMatrix)> {
        if noise_a.len() != self.security {
            return Err(Error::Shape(format!(
                "expected {} noise matrices",
                self.security
            )));
        }
        ps_share(a_blocks, b_blocks, self.alpha[server], noise_a, noise_b)
    }

    /// Draws `X` noise matrices of the given shape for one server.
    pub fn draw_noise<R: Rng + ?Sized>(
        &self,
        shape: (usize, usize),
        rng: &mut R,
    ) -> Vec<FieldMatrix> {
        (0..self.security)
            .map(|_| FieldMatrix::random(self.field, shape.0, shape.1, rng))
            .collect()
    }

    /// Re-sharing round: `M_{s->j} = r_s P_s + sum_x alpha_j^x Z_{s,x}` and
    /// `Y_j = sum_s M_{s->j}`. Every server must have its product.
    pub fn round(
        &self,
        products: &[Option<FieldMatrix>],
        server_noise: &[Vec<FieldMatrix>],
    ) -> Result<PsRound> {
        let s_count = self.servers();
        if products.len() != s_count || server_noise.len() != s_count {
            return Err(Error::Shape(
                "one product and one noise set per server".into(),
            ));
        }
        if let Some(missing) = products.iter().position(Option::is_none) {
            return Err(Error::MissingServer(missing));
        }
        let f = self.field;
        let mut messages = vec![vec![None; s_count]; s_count];
        let mut aggregates = Vec::with_capacity(s_count);
        for (to, &alpha_to) in self.alpha.iter().enumerate() {
            let mut agg: Option<FieldMatrix> = None;
            for from in 0..s_count {
                let product = products[from].as_ref().expect("checked above");
                let mut msg = product.scale(self.r[from]);
                for (x, z) in server_noise[from].iter().enumerate() {
                    msg.add_scaled(f.pow(alpha_to, x as u64 + 1), z)?;
                }
                match agg.as_mut() {
                    Some(acc) => acc.add_scaled(1, &msg)?,
                    None => agg = Some(msg.clone()),
                }
                if from != to {
                    messages[from][to] = Some(msg);
                }
            }
            aggregates.push(agg.expect("at least one server"));
        }
        Ok(PsRound {
            messages,
            aggregates,
        })
    }

    /// Interpolates the constant term of the degree-`X` aggregate polynomial
    /// from the first `X + 1` responses, given as `(server, Y_s)`.
    pub fn decode(&self, responses: &[(usize, FieldMatrix)]) -> Result<FieldMatrix> {
        let needed = self.security + 1;
        if responses.len() < needed {
            return Err(Error::NotEnoughAnswers {
                needed,
                got: responses.len(),
            });
        }
        let f = self.field;
        let used = &responses[..needed];
        let points: Vec<u64> = used.iter().map(|(s, _)| self.alpha[*s]).collect();
        let (r, c) = used[0].1.shape();
        let mut out = FieldMatrix::zeros(f, r, c);
        for (i, (_, y)) in used.iter().enumerate() {
            let mut w = 1;
            for (j, &pj) in points.iter().enumerate() {
                if j != i {
                    let denom = f.sub(points[i], pj);
                    w = f.mul(
                        w,
                        f.div(f.neg(pj), denom)
                            .map_err(|_| Error::DegeneratePoints("repeated responder".into()))?,
                    );
                }
            }
            out.add_scaled(w, y)?;
        }
        Ok(out)
    }
}

//! Executable privacy, security and correctness suites shared by the
//! `selftest` command and the acceptance target.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::cost::Scheme;
use crate::error::Result;
use crate::field::PrimeField;
use crate::gcsa::{GcsaNa, NoiseBundle, ParamSpec, SchemeParams, SourceNoise};
use crate::matrix::FieldMatrix;
use crate::sim::{run_simulation, SimConfig};
use crate::strassen::{legacy_noise, noise_design, BilinearScheme, StrassenNa};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self::new(name, passed, detail),
            Err(e) => Self::new(name, false, format!("error: {e}")),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn scalar_spec(servers: usize) -> ParamSpec {
    ParamSpec {
        servers,
        security: 1,
        ell: 1,
        kc: 1,
        p: 1,
        m: 1,
        n: 1,
        lambda: 1,
        kappa: 1,
        mu: 1,
    }
}

fn gf5_scalar() -> Result<GcsaNa> {
    let field = PrimeField::new(5)?;
    GcsaNa::sequential(SchemeParams::derive(scalar_spec(3), field)?)
}

/// The master's view `(Y_1, Y_2, Y_3)` for scalar inputs and scalar noise.
fn gf5_view(scheme: &GcsaNa, a: u64, b: u64, za: u64, zb: u64, z: u64) -> Result<Vec<u64>> {
    let f = scheme.params().field();
    let na = SourceNoise {
        groups: vec![vec![FieldMatrix::scalar(f, za)]],
    };
    let nb = SourceNoise {
        groups: vec![vec![FieldMatrix::scalar(f, zb)]],
    };
    let mut bundle = NoiseBundle::zeros(scheme.params());
    bundle.aligned = vec![FieldMatrix::scalar(f, z)];
    let shares = scheme.shares_with_noise(
        &[FieldMatrix::scalar(f, a)],
        &[FieldMatrix::scalar(f, b)],
        &na,
        &nb,
    )?;
    shares
        .servers
        .iter()
        .enumerate()
        .map(|(s, sh)| {
            let m = scheme.noise_share(&bundle, s)?;
            Ok(crate::gcsa::server_answer(sh, &m)?.get(0, 0))
        })
        .collect()
}

/// For every product value, the multiset of answer vectors over all noise
/// assignments must be the same for every input pair with that product.
/// `server_noise = false` pins the server noise to zero as a control.
pub fn master_privacy_gf5(server_noise: bool) -> Result<(bool, String)> {
    let scheme = gf5_scalar()?;
    let f = scheme.params().field();
    let mut by_product: BTreeMap<u64, Vec<Vec<Vec<u64>>>> = BTreeMap::new();
    for a in 0..5 {
        for b in 0..5 {
            let mut views = Vec::with_capacity(125);
            for za in 0..5 {
                for zb in 0..5 {
                    for z in 0..5 {
                        let z = if server_noise { z } else { 0 };
                        views.push(gf5_view(&scheme, a, b, za, zb, z)?);
                    }
                }
            }
            views.sort();
            by_product.entry(f.mul(a, b)).or_default().push(views);
        }
    }
    let mismatched: Vec<u64> = by_product
        .iter()
        .filter(|(_, group)| group.iter().any(|v| v != &group[0]))
        .map(|(c, _)| *c)
        .collect();
    let detail = format!(
        "25 input pairs x 125 noise draws; products with differing view distributions: {mismatched:?}"
    );
    Ok((mismatched.is_empty(), detail))
}

/// Each single server's `(A~, B~)` is uniform over GF(5)^2 for every input.
pub fn share_uniformity_gf5() -> Result<(bool, String)> {
    let scheme = gf5_scalar()?;
    let f = scheme.params().field();
    let all: Vec<(u64, u64)> = (0..5).cartesian_product(0..5).collect();
    let mut bad = Vec::new();
    for s in 0..3 {
        for (a, b) in (0..5).cartesian_product(0..5) {
            let mut seen = Vec::with_capacity(25);
            for (za, zb) in (0..5).cartesian_product(0..5) {
                let na = SourceNoise {
                    groups: vec![vec![FieldMatrix::scalar(f, za)]],
                };
                let nb = SourceNoise {
                    groups: vec![vec![FieldMatrix::scalar(f, zb)]],
                };
                let sh = scheme.shares_with_noise(
                    &[FieldMatrix::scalar(f, a)],
                    &[FieldMatrix::scalar(f, b)],
                    &na,
                    &nb,
                )?;
                let share = &sh.servers[s];
                seen.push((share.a[0].get(0, 0), share.b[0].get(0, 0)));
            }
            seen.sort_unstable();
            if seen != all {
                bad.push((s, a, b));
            }
        }
    }
    Ok((
        bad.is_empty(),
        format!("3 servers x 25 inputs; non-uniform cases: {}", bad.len()),
    ))
}

/// Every `X`-subset of servers sees an invertible noise map, for
/// configurations with `S <= 12` and `X <= 3`.
pub fn collusion_ranks(modulus: u64) -> Result<(bool, String)> {
    let field = PrimeField::new(modulus)?;
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for x in 1..=3 {
        for (ell, kc, p, m, n) in [
            (1, 1, 1, 1, 1),
            (2, 1, 1, 1, 1),
            (1, 2, 1, 1, 1),
            (1, 1, 2, 1, 1),
            (1, 1, 1, 2, 1),
        ] {
            let mut spec = ParamSpec {
                servers: 12,
                security: x,
                ell,
                kc,
                p,
                m,
                n,
                lambda: 2,
                kappa: 2,
                mu: 2,
            };
            if spec.recovery_threshold() > 12 {
                continue;
            }
            spec.servers = 12;
            let scheme = GcsaNa::sequential(SchemeParams::derive(spec, field)?)?;
            for subset in (0..12).combinations(x) {
                for l in 0..ell {
                    checked += 1;
                    if scheme.collusion_matrix_a(&subset, l).rank() != x {
                        failures.push(format!("A X={x} {subset:?}"));
                    }
                }
                checked += 1;
                if scheme.collusion_matrix_b(&subset).rank() != x {
                    failures.push(format!("B X={x} {subset:?}"));
                }
            }
        }
    }
    Ok((
        failures.is_empty(),
        format!(
            "{checked} coefficient matrices, {} singular",
            failures.len()
        ),
    ))
}

/// Offline payloads are identical for two different datasets under one
/// noise seed, and every offline message precedes every upload.
pub fn strong_security(seed: u64) -> Result<(bool, String)> {
    let spec = ParamSpec {
        servers: 11,
        security: 1,
        ell: 1,
        kc: 2,
        p: 2,
        m: 1,
        n: 1,
        lambda: 2,
        kappa: 2,
        mu: 2,
    };
    let mut config = SimConfig::new(Scheme::GcsaNa, spec);
    config.seed = seed;
    config.input_seed = Some(seed.wrapping_add(1));
    let first = run_simulation(&config)?;
    config.input_seed = Some(seed.wrapping_add(2));
    let second = run_simulation(&config)?;
    let bytes = |o: &crate::sim::SimOutcome| -> Vec<u8> {
        o.noise_shares
            .iter()
            .flat_map(|m| m.as_slice().iter().flat_map(|v| v.to_le_bytes()))
            .collect()
    };
    let inputs_differ = first.expected != second.expected;
    let same = bytes(&first) == bytes(&second);
    let ordered = first.trace.offline_first() && second.trace.offline_first();
    Ok((
        inputs_differ && same && ordered,
        format!(
            "inputs differ: {inputs_differ}, payloads identical: {same}, offline first: {ordered}"
        ),
    ))
}

/// Strassen variant decodes `AB` for random scalar-block instances.
pub fn strassen_correctness(modulus: u64, trials: usize, seed: u64) -> Result<(bool, String)> {
    let field = PrimeField::new(modulus)?;
    let na = StrassenNa::new(field, 15)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut wrong = 0;
    for _ in 0..trials {
        let a = FieldMatrix::random(field, 2, 2, &mut rng);
        let b = FieldMatrix::random(field, 2, 2, &mut rng);
        if na.run(&a, &b, &[], &mut rng)?.product != a.mul(&b)? {
            wrong += 1;
        }
    }
    Ok((
        wrong == 0,
        format!("{trials} instances over GF({modulus}), {wrong} wrong"),
    ))
}

/// `recon * N = 0` and `rank(N) = 3`.
pub fn strassen_noise(modulus: u64) -> Result<(bool, String)> {
    let field = PrimeField::new(modulus)?;
    let recon = BilinearScheme::strassen()?.recon(field);
    let n = noise_design(&recon)?.n;
    let cancels = recon.mul(&n)?.is_zero();
    let rank = n.rank();
    Ok((
        cancels && rank == 3,
        format!("recon*N = 0: {cancels}, rank(N) = {rank}"),
    ))
}

/// The legacy sign pattern leaves `2 Z1` and `-2 Z1` in the first two output
/// blocks. Passing means that residue is reproduced.
pub fn strassen_legacy_residue(modulus: u64) -> Result<(bool, String)> {
    let field = PrimeField::new(modulus)?;
    let recon = BilinearScheme::strassen()?.recon(field);
    let residue = recon.mul(&legacy_noise(field))?;
    let expect = FieldMatrix::from_signed(
        field,
        &[vec![2, 0, 0], vec![-2, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
    )?;
    Ok((
        residue == expect,
        format!("residue rows {:?}", residue.to_rows()),
    ))
}

/// Every suite run by `selftest`.
pub fn selftest() -> Vec<Check> {
    vec![
        Check::from_result("master privacy, scalar GF(5)", master_privacy_gf5(true)),
        Check::from_result(
            "single-server share uniformity, GF(5)",
            share_uniformity_gf5(),
        ),
        Check::from_result("X-subset noise ranks, S = 12", collusion_ranks(65537)),
        Check::from_result("strong security", strong_security(7)),
        Check::from_result(
            "Strassen correctness, GF(101)",
            strassen_correctness(101, 100, 11),
        ),
        Check::from_result("Strassen noise cancellation", strassen_noise(101)),
        Check::from_result(
            "legacy noise residue reproduced",
            strassen_legacy_residue(101),
        ),
    ]
}

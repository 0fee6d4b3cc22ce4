//! With one product, `S = R` and the pole at zero, GCSA-NA shares coincide
//! with polynomial-sharing shares at `-alpha` once the source noise is
//! re-signed and each B-share is scaled by `(-alpha)^p`.

use gcsa_core::block::partition;
use gcsa_core::gcsa::{EvalPoints, GcsaNa, ParamSpec, SchemeParams, SourceNoise};
use gcsa_core::ps::{ps_share, ps_threshold};
use gcsa_core::{FieldMatrix, PrimeField};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn check(p: usize, x: usize, seed: u64) {
    let field = PrimeField::new(65537).unwrap();
    let servers = ps_threshold(p, x);
    let spec = ParamSpec {
        servers,
        security: x,
        ell: 1,
        kc: 1,
        p,
        m: 1,
        n: 1,
        lambda: 2,
        kappa: 2 * p,
        mu: 3,
    };
    assert_eq!(spec.recovery_threshold(), servers);
    let params = SchemeParams::derive(spec, field).unwrap();
    let alphas: Vec<u64> = (1..=servers as u64).collect();
    let scheme = GcsaNa::new(
        params,
        EvalPoints::new(field, vec![0], alphas.clone()).unwrap(),
    )
    .unwrap();

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = FieldMatrix::random(field, 2, 2 * p, &mut rng);
    let b = FieldMatrix::random(field, 2 * p, 3, &mut rng);
    let na = SourceNoise::random(&params, params.a_block_shape(), &mut rng);
    let nb = SourceNoise::random(&params, params.b_block_shape(), &mut rng);
    let shares = scheme
        .shares_with_noise(std::slice::from_ref(&a), std::slice::from_ref(&b), &na, &nb)
        .unwrap();

    let resign = |zs: &[FieldMatrix]| -> Vec<FieldMatrix> {
        zs.iter()
            .enumerate()
            .map(|(i, z)| {
                if i % 2 == 0 {
                    z.clone()
                } else {
                    z.scale(field.neg(1))
                }
            })
            .collect()
    };
    let za = resign(&na.groups[0]);
    let zb = resign(&nb.groups[0]);
    let ag = partition(&a, 1, p).unwrap();
    let bg = partition(&b, p, 1).unwrap();
    let mut raw_b_equal = 0;
    for (s, &alpha) in alphas.iter().enumerate() {
        let point = field.neg(alpha);
        let (pa, pb) = ps_share(&ag, &bg, point, &za, &zb).unwrap();
        let g = &shares.servers[s];
        assert_eq!(g.a[0], pa, "A-share, server {s}");
        assert_eq!(
            g.b[0].scale(field.pow(point, p as u64)),
            pb,
            "scaled B-share, server {s}"
        );
        if g.b[0] == pb {
            raw_b_equal += 1;
        }
    }
    assert!(
        raw_b_equal < servers,
        "B-shares should differ before scaling"
    );
}

#[test]
fn single_block() {
    check(1, 1, 1);
}

#[test]
fn toy_partition() {
    check(2, 1, 2);
}

#[test]
fn wider_collusion() {
    check(3, 2, 3);
}

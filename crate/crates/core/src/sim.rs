//! Deterministic three-phase simulator: offline noise propagation over a
//! connected server graph, share upload, answers with stragglers, and
//! reconstruction checked against direct multiplication.

use std::collections::VecDeque;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::block::partition;
use crate::cost::Scheme;
use crate::error::{Error, Result};
use crate::field::{PrimeField, DEFAULT_MODULUS};
use crate::gcsa::{
    server_answer, Answer, EvalPoints, GcsaNa, NoiseBundle, ParamSpec, PointPolicy, SchemeParams,
};
use crate::matrix::{field_ops, reset_field_ops, FieldMatrix};
use crate::ps::PsInstance;
use crate::rng::{stream_rng, Stream};
use crate::strassen::{StrassenNa, StrassenNoise};

/// Inter-server graph. Server indices are 0-based; server 0 generates the noise.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    #[default]
    Complete,
    /// Every server linked to server 0.
    Star,
    /// `0 - 1 - ... - (S-1)`.
    Line,
    Edges(Vec<(usize, usize)>),
}

impl Topology {
    fn adjacency(&self, servers: usize) -> Result<Vec<Vec<usize>>> {
        let mut adj = vec![Vec::new(); servers];
        let mut link = |a: usize, b: usize| -> Result<()> {
            if a >= servers || b >= servers {
                return Err(Error::Config(format!(
                    "edge ({a}, {b}) names a server outside 0..{servers}"
                )));
            }
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
            Ok(())
        };
        match self {
            Topology::Complete => {
                for a in 0..servers {
                    for b in a + 1..servers {
                        link(a, b)?;
                    }
                }
            }
            Topology::Star => (1..servers).try_for_each(|b| link(0, b))?,
            Topology::Line => (1..servers).try_for_each(|b| link(b - 1, b))?,
            Topology::Edges(edges) => edges.iter().try_for_each(|&(a, b)| link(a, b))?,
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(adj)
    }

    /// Breadth-first spanning tree rooted at server 0, as parent links.
    pub fn spanning_tree(&self, servers: usize) -> Result<Vec<Option<usize>>> {
        let adj = self.adjacency(servers)?;
        let mut parent = vec![None; servers];
        let mut seen = vec![false; servers];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        if let Some(lost) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!(
                "topology is not connected: server {lost} is unreachable"
            )));
        }
        Ok(parent)
    }
}

/// Hops from server 0 to `dest` along the tree.
fn route(parent: &[Option<usize>], dest: usize) -> Vec<(usize, usize)> {
    let mut hops = Vec::new();
    let mut at = dest;
    while let Some(up) = parent[at] {
        hops.push((up, at));
        at = up;
    }
    hops.reverse();
    hops
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stragglers {
    /// A seeded uniform choice of this many servers.
    Count(usize),
    Servers(Vec<usize>),
}

impl Default for Stragglers {
    fn default() -> Self {
        Stragglers::Count(0)
    }
}

fn default_scheme() -> Scheme {
    Scheme::GcsaNa
}

fn default_modulus() -> u64 {
    DEFAULT_MODULUS
}

/// One simulation. Field names double as JSON keys; protocol integers sit at
/// the top level (`servers`/`S`, `security`/`X`, `ell`, `kc`/`Kc`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(flatten)]
    pub params: ParamSpec,
    #[serde(default = "default_modulus")]
    pub modulus: u64,
    #[serde(default)]
    pub seed: u64,
    /// Seed for the random inputs only; defaults to `seed`.
    #[serde(default)]
    pub input_seed: Option<u64>,
    #[serde(default)]
    pub stragglers: Stragglers,
    #[serde(default)]
    pub topology: Topology,
    /// Point choice for GCSA-NA; the other schemes use fixed points.
    #[serde(default)]
    pub points: PointPolicy,
}

impl SimConfig {
    pub fn new(scheme: Scheme, params: ParamSpec) -> Self {
        Self {
            scheme,
            params,
            modulus: DEFAULT_MODULUS,
            seed: 0,
            input_seed: None,
            stragglers: Stragglers::default(),
            topology: Topology::default(),
            points: PointPolicy::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn straggler_set(&self) -> Result<Vec<usize>> {
        let servers = self.params.servers;
        let mut set = match &self.stragglers {
            Stragglers::Count(k) => {
                if *k > servers {
                    return Err(Error::Config(format!(
                        "{k} stragglers among {servers} servers"
                    )));
                }
                let mut rng = stream_rng(self.seed, Stream::StragglerSelection);
                sample(&mut rng, servers, *k).into_vec()
            }
            Stragglers::Servers(list) => {
                if let Some(bad) = list.iter().find(|&&s| s >= servers) {
                    return Err(Error::Config(format!("straggler {bad} is not a server")));
                }
                list.clone()
            }
        };
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    OfflineNoise,
    Sharing,
    /// Data-dependent server exchange of the polynomial-sharing baseline.
    Resharing,
    Answer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Party {
    SourceA,
    SourceB,
    Server(usize),
    Master,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub phase: Phase,
    pub from: Party,
    pub to: Party,
    pub symbols: u64,
    /// Final recipient of a relayed payload.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub payload_for: Option<usize>,
}

/// Field multiplications counted per phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FieldOps {
    pub offline: u64,
    pub sharing: u64,
    pub answers: u64,
    pub decoding: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub scheme: Scheme,
    pub spec: ParamSpec,
    pub modulus: u64,
    pub seed: u64,
    pub stragglers: Vec<usize>,
    pub messages: Vec<Message>,
    /// Servers whose answers the master used.
    pub decoded_from: Vec<usize>,
    pub complete: bool,
    pub field_ops: FieldOps,
}

impl TraceReport {
    fn new(config: &SimConfig, spec: ParamSpec, stragglers: Vec<usize>) -> Self {
        Self {
            scheme: config.scheme,
            spec,
            modulus: config.modulus,
            seed: config.seed,
            stragglers,
            messages: Vec::new(),
            decoded_from: Vec::new(),
            complete: false,
            field_ops: FieldOps::default(),
        }
    }

    fn log(&mut self, phase: Phase, from: Party, to: Party, symbols: usize) {
        self.messages.push(Message {
            phase,
            from,
            to,
            symbols: symbols as u64,
            payload_for: None,
        });
    }

    fn propagate(&mut self, parent: &[Option<usize>], symbols: usize) {
        for dest in 1..parent.len() {
            for (from, to) in route(parent, dest) {
                self.messages.push(Message {
                    phase: Phase::OfflineNoise,
                    from: Party::Server(from),
                    to: Party::Server(to),
                    symbols: symbols as u64,
                    payload_for: Some(dest),
                });
            }
        }
    }

    pub fn count(&self, phase: Phase) -> usize {
        self.messages.iter().filter(|m| m.phase == phase).count()
    }

    /// True when no offline message follows a sharing message.
    pub fn offline_first(&self) -> bool {
        let first_share = self.messages.iter().position(|m| m.phase == Phase::Sharing);
        let last_offline = self
            .messages
            .iter()
            .rposition(|m| m.phase == Phase::OfflineNoise);
        match (first_share, last_offline) {
            (Some(s), Some(o)) => o < s,
            _ => true,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub trace: TraceReport,
    pub products: Vec<FieldMatrix>,
    pub expected: Vec<FieldMatrix>,
    /// The offline payloads `M~_s`, indexed by server; empty for PS.
    pub noise_shares: Vec<FieldMatrix>,
    pub verdict: Verdict,
}

fn random_inputs(
    field: PrimeField,
    seed: u64,
    count: usize,
    a: (usize, usize),
    b: (usize, usize),
) -> (Vec<FieldMatrix>, Vec<FieldMatrix>) {
    let mut ra = stream_rng(seed, Stream::InputsA);
    let mut rb = stream_rng(seed, Stream::InputsB);
    let av = (0..count)
        .map(|_| FieldMatrix::random(field, a.0, a.1, &mut ra))
        .collect();
    let bv = (0..count)
        .map(|_| FieldMatrix::random(field, b.0, b.1, &mut rb))
        .collect();
    (av, bv)
}

fn take_ops() -> u64 {
    let n = field_ops();
    reset_field_ops();
    n
}

pub fn run_simulation(config: &SimConfig) -> Result<SimOutcome> {
    let field = PrimeField::new(config.modulus)?;
    let stragglers = config.straggler_set()?;
    let parent = config
        .topology
        .spanning_tree(config.params.servers.max(1))?;
    match config.scheme {
        Scheme::GcsaNa => run_gcsa(config, field, stragglers, &parent),
        Scheme::Ps => run_ps(config, field, stragglers),
        Scheme::StrassenNa => run_strassen(config, field, stragglers, &parent),
    }
}

fn finish(
    trace: TraceReport,
    products: Vec<FieldMatrix>,
    expected: Vec<FieldMatrix>,
    noise_shares: Vec<FieldMatrix>,
) -> SimOutcome {
    let verdict = if products == expected {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    SimOutcome {
        trace,
        products,
        expected,
        noise_shares,
        verdict,
    }
}

fn run_gcsa(
    config: &SimConfig,
    field: PrimeField,
    stragglers: Vec<usize>,
    parent: &[Option<usize>],
) -> Result<SimOutcome> {
    let params = SchemeParams::derive(config.params, field)?;
    let spec = *params.spec();
    let mut trace = TraceReport::new(config, spec, stragglers.clone());
    let points = EvalPoints::choose(
        config.points,
        field,
        params.batch(),
        params.servers(),
        &mut stream_rng(config.seed, Stream::Points),
    )?;
    let scheme = GcsaNa::new(params, points)?;
    reset_field_ops();

    // phase 0: server 0 draws the bundle and ships each M~_s
    let bundle = NoiseBundle::generate(&params, &mut stream_rng(config.seed, Stream::Server));
    let noise_shares = (0..params.servers())
        .map(|s| scheme.noise_share(&bundle, s))
        .collect::<Result<Vec<_>>>()?;
    let (yr, yc) = params.answer_shape();
    trace.propagate(parent, yr * yc);
    trace.field_ops.offline = take_ops();

    // phase 1
    let input_seed = config.input_seed.unwrap_or(config.seed);
    let (a, b) = random_inputs(
        field,
        input_seed,
        params.batch(),
        (spec.lambda, spec.kappa),
        (spec.kappa, spec.mu),
    );
    reset_field_ops();
    let (shares, _, _) = scheme.make_shares(
        &a,
        &b,
        &mut stream_rng(config.seed, Stream::SourceA),
        &mut stream_rng(config.seed, Stream::SourceB),
    )?;
    for (s, share) in shares.servers.iter().enumerate() {
        let (sa, sb) = share.symbols();
        trace.log(Phase::Sharing, Party::SourceA, Party::Server(s), sa);
        trace.log(Phase::Sharing, Party::SourceB, Party::Server(s), sb);
    }
    trace.field_ops.sharing = take_ops();

    // phase 2
    let answers = shares
        .servers
        .iter()
        .enumerate()
        .map(|(s, share)| {
            if stragglers.contains(&s) {
                Ok(Answer::straggler(s))
            } else {
                Ok(Answer::responsive(
                    s,
                    server_answer(share, &noise_shares[s])?,
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    trace.field_ops.answers = take_ops();

    // phase 3: the master collects the first R responsive answers
    let used: Vec<usize> = answers
        .iter()
        .filter(|a| a.is_responsive())
        .map(|a| a.server)
        .take(params.recovery_threshold())
        .collect();
    let products = scheme.reconstruct(&answers)?;
    trace.field_ops.decoding = take_ops();
    for &s in &used {
        trace.log(Phase::Answer, Party::Server(s), Party::Master, yr * yc);
    }
    trace.decoded_from = used;
    trace.complete = true;
    let expected = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.mul(y))
        .collect::<Result<Vec<_>>>()?;
    reset_field_ops();
    Ok(finish(trace, products, expected, noise_shares))
}

fn run_ps(config: &SimConfig, field: PrimeField, stragglers: Vec<usize>) -> Result<SimOutcome> {
    let spec = config.params;
    if spec.m != 1 || spec.n != 1 {
        return Err(Error::UnsupportedPartition {
            m: spec.m,
            n: spec.n,
        });
    }
    if !spec.kappa.is_multiple_of(spec.p) {
        return Err(Error::NotDivisible {
            dim: spec.kappa,
            parts: spec.p,
        });
    }
    let inst = PsInstance::new(field, spec.p, spec.security, spec.servers)?;
    let mut trace = TraceReport::new(config, spec, stragglers.clone());
    let input_seed = config.input_seed.unwrap_or(config.seed);
    let (a, b) = random_inputs(
        field,
        input_seed,
        spec.batch(),
        (spec.lambda, spec.kappa),
        (spec.kappa, spec.mu),
    );
    let mut rng_a = stream_rng(config.seed, Stream::SourceA);
    let mut rng_b = stream_rng(config.seed, Stream::SourceB);
    let mut rng_s = stream_rng(config.seed, Stream::Server);
    let mut products = Vec::with_capacity(a.len());
    reset_field_ops();
    for (at, bt) in a.iter().zip(&b) {
        let ag = partition(at, 1, spec.p)?;
        let bg = partition(bt, spec.p, 1)?;
        let za = inst.draw_noise(ag.block_shape(), &mut rng_a);
        let zb = inst.draw_noise(bg.block_shape(), &mut rng_b);
        let mut local = Vec::with_capacity(inst.servers());
        for s in 0..inst.servers() {
            let (sa, sb) = inst.share(&ag, &bg, &za, &zb, s)?;
            trace.log(Phase::Sharing, Party::SourceA, Party::Server(s), sa.len());
            trace.log(Phase::Sharing, Party::SourceB, Party::Server(s), sb.len());
            local.push((sa, sb));
        }
        trace.field_ops.sharing += take_ops();

        let prods: Vec<Option<FieldMatrix>> = local
            .iter()
            .enumerate()
            .map(|(s, (sa, sb))| {
                if stragglers.contains(&s) {
                    Ok(None)
                } else {
                    sa.mul(sb).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let server_noise: Vec<Vec<FieldMatrix>> = (0..inst.servers())
            .map(|_| inst.draw_noise((spec.lambda, spec.mu), &mut rng_s))
            .collect();
        let round = inst.round(&prods, &server_noise)?;
        for (from, row) in round.messages.iter().enumerate() {
            for (to, msg) in row.iter().enumerate() {
                if let Some(m) = msg {
                    trace.log(
                        Phase::Resharing,
                        Party::Server(from),
                        Party::Server(to),
                        m.len(),
                    );
                }
            }
        }
        trace.field_ops.answers += take_ops();

        let used: Vec<(usize, FieldMatrix)> = round
            .aggregates
            .iter()
            .cloned()
            .enumerate()
            .take(spec.security + 1)
            .collect();
        for (s, y) in &used {
            trace.log(Phase::Answer, Party::Server(*s), Party::Master, y.len());
        }
        products.push(inst.decode(&used)?);
        trace.decoded_from = used.iter().map(|(s, _)| *s).collect();
        trace.field_ops.decoding += take_ops();
    }
    trace.complete = true;
    let expected = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.mul(y))
        .collect::<Result<Vec<_>>>()?;
    reset_field_ops();
    Ok(finish(trace, products, expected, Vec::new()))
}

fn run_strassen(
    config: &SimConfig,
    field: PrimeField,
    stragglers: Vec<usize>,
    parent: &[Option<usize>],
) -> Result<SimOutcome> {
    let given = config.params;
    if given.security != 1 || given.batch() != 1 {
        return Err(Error::InvalidParams(
            "the Strassen variant supports X = 1 and a single product".into(),
        ));
    }
    let spec = ParamSpec {
        p: 2,
        m: 2,
        n: 2,
        ..given
    };
    for dim in [spec.lambda, spec.kappa, spec.mu] {
        if dim % 2 != 0 {
            return Err(Error::NotDivisible { dim, parts: 2 });
        }
    }
    let na = StrassenNa::new(field, spec.servers)?;
    let mut trace = TraceReport::new(config, spec, stragglers.clone());
    let answer_shape = (spec.lambda / 2, spec.mu / 2);
    reset_field_ops();

    let noise = StrassenNoise::generate(
        field,
        answer_shape,
        &mut stream_rng(config.seed, Stream::Server),
    );
    let noise_shares = (0..na.servers())
        .map(|s| na.noise_share(&noise, s))
        .collect::<Result<Vec<_>>>()?;
    trace.propagate(parent, answer_shape.0 * answer_shape.1);
    trace.field_ops.offline = take_ops();

    let input_seed = config.input_seed.unwrap_or(config.seed);
    let (a, b) = random_inputs(
        field,
        input_seed,
        1,
        (spec.lambda, spec.kappa),
        (spec.kappa, spec.mu),
    );
    reset_field_ops();
    let ag = partition(&a[0], 2, 2)?;
    let bg = partition(&b[0], 2, 2)?;
    let za = FieldMatrix::random(
        field,
        spec.lambda / 2,
        spec.kappa / 2,
        &mut stream_rng(config.seed, Stream::SourceA),
    );
    let zb = FieldMatrix::random(
        field,
        spec.kappa / 2,
        spec.mu / 2,
        &mut stream_rng(config.seed, Stream::SourceB),
    );
    let shares = (0..na.servers())
        .map(|s| na.share(&ag, &bg, &za, &zb, s))
        .collect::<Result<Vec<_>>>()?;
    for (s, (sa, sb)) in shares.iter().enumerate() {
        trace.log(Phase::Sharing, Party::SourceA, Party::Server(s), sa.len());
        trace.log(Phase::Sharing, Party::SourceB, Party::Server(s), sb.len());
    }
    trace.field_ops.sharing = take_ops();

    let answers = shares
        .iter()
        .enumerate()
        .map(|(s, share)| {
            if stragglers.contains(&s) {
                Ok(Answer::straggler(s))
            } else {
                Ok(Answer::responsive(s, na.answer(share, &noise_shares[s])?))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    trace.field_ops.answers = take_ops();

    let used: Vec<usize> = answers
        .iter()
        .filter(|a| a.is_responsive())
        .map(|a| a.server)
        .take(crate::strassen::STRASSEN_THRESHOLD)
        .collect();
    let decoded = na.decode(&answers)?;
    trace.field_ops.decoding = take_ops();
    for &s in &used {
        trace.log(
            Phase::Answer,
            Party::Server(s),
            Party::Master,
            answer_shape.0 * answer_shape.1,
        );
    }
    trace.decoded_from = used;
    trace.complete = true;
    let expected = vec![a[0].mul(&b[0])?];
    reset_field_ops();
    Ok(finish(trace, vec![decoded.product], expected, noise_shares))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{measured_costs, theoretical_costs};

    #[allow(clippy::too_many_arguments)]
    fn spec(
        s: usize,
        x: usize,
        ell: usize,
        kc: usize,
        p: usize,
        m: usize,
        n: usize,
        dim: usize,
    ) -> ParamSpec {
        ParamSpec {
            servers: s,
            security: x,
            ell,
            kc,
            p,
            m,
            n,
            lambda: dim,
            kappa: dim,
            mu: dim,
        }
    }

    #[test]
    fn scalar_gf5_star() {
        let mut c = SimConfig::new(Scheme::GcsaNa, spec(3, 1, 1, 1, 1, 1, 1, 1));
        c.modulus = 5;
        c.topology = Topology::Star;
        let out = run_simulation(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Pass);
        assert_eq!(out.trace.count(Phase::OfflineNoise), 2);
        let m = measured_costs(&out.trace).unwrap();
        assert_eq!(m.counts.upload_a, 3);
        assert_eq!(
            m,
            theoretical_costs(&out.trace.spec, Scheme::GcsaNa).unwrap()
        );
    }

    #[test]
    fn toy_with_stragglers() {
        let mut c = SimConfig::new(Scheme::GcsaNa, spec(11, 1, 1, 2, 2, 1, 1, 2));
        c.modulus = 13;
        c.stragglers = Stragglers::Count(2);
        let out = run_simulation(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Pass);
        assert_eq!(out.trace.stragglers.len(), 2);
        assert_eq!(out.trace.count(Phase::Answer), 9);
        let m = measured_costs(&out.trace).unwrap();
        assert_eq!(m.recovery_threshold, 9);
        assert_eq!(
            m,
            theoretical_costs(&out.trace.spec, Scheme::GcsaNa).unwrap()
        );
        c.stragglers = Stragglers::Count(3);
        assert_eq!(
            run_simulation(&c).err(),
            Some(Error::NotEnoughAnswers { needed: 9, got: 8 })
        );
    }

    #[test]
    fn ps_straggler_is_fatal() {
        let mut c = SimConfig::new(Scheme::Ps, spec(5, 1, 1, 1, 2, 1, 1, 2));
        let out = run_simulation(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Pass);
        assert_eq!(out.trace.count(Phase::Resharing), 20);
        assert_eq!(out.trace.decoded_from.len(), 2);
        assert_eq!(
            measured_costs(&out.trace).unwrap(),
            theoretical_costs(&c.params, Scheme::Ps).unwrap()
        );
        c.stragglers = Stragglers::Servers(vec![3]);
        assert_eq!(run_simulation(&c).err(), Some(Error::MissingServer(3)));
    }

    #[test]
    fn ps_batch_repeats() {
        let c = SimConfig::new(Scheme::Ps, spec(5, 1, 1, 3, 2, 1, 1, 2));
        let out = run_simulation(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Pass);
        assert_eq!(out.products.len(), 3);
        assert_eq!(
            measured_costs(&out.trace).unwrap(),
            theoretical_costs(&c.params, Scheme::Ps).unwrap()
        );
    }

    #[test]
    fn strassen_run() {
        let mut c = SimConfig::new(Scheme::StrassenNa, spec(16, 1, 1, 1, 1, 1, 1, 4));
        c.modulus = 101;
        c.stragglers = Stragglers::Count(1);
        c.topology = Topology::Line;
        let out = run_simulation(&c).unwrap();
        assert_eq!(out.verdict, Verdict::Pass);
        let m = measured_costs(&out.trace).unwrap();
        assert_eq!(
            m,
            theoretical_costs(&out.trace.spec, Scheme::StrassenNa).unwrap()
        );
        assert!(out.trace.offline_first());
    }

    #[test]
    fn deterministic_bytes() {
        let mut c = SimConfig::new(Scheme::GcsaNa, spec(12, 1, 2, 1, 1, 2, 1, 2));
        c.seed = 77;
        c.stragglers = Stragglers::Count(1);
        c.points = PointPolicy::Random;
        let a = run_simulation(&c).unwrap();
        let b = run_simulation(&c).unwrap();
        assert_eq!(a.trace.to_json(), b.trace.to_json());
        assert_eq!(a.products, b.products);
    }

    #[test]
    fn topology_independence() {
        let base = SimConfig::new(Scheme::GcsaNa, spec(9, 1, 1, 2, 2, 1, 1, 2));
        let mut reports = Vec::new();
        for topo in [
            Topology::Complete,
            Topology::Star,
            Topology::Line,
            Topology::Edges(vec![
                (0, 4),
                (4, 1),
                (1, 2),
                (2, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 8),
            ]),
        ] {
            let c = SimConfig {
                topology: topo,
                ..base.clone()
            };
            let out = run_simulation(&c).unwrap();
            assert!(out.trace.offline_first());
            reports.push((out.products, measured_costs(&out.trace).unwrap()));
        }
        assert!(reports.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn line_relays_more_hops_same_deliveries() {
        let base = SimConfig::new(Scheme::GcsaNa, spec(9, 1, 1, 2, 2, 1, 1, 2));
        let line = run_simulation(&SimConfig {
            topology: Topology::Line,
            ..base.clone()
        })
        .unwrap();
        assert_eq!(line.trace.count(Phase::OfflineNoise), (1..9).sum::<usize>());
        assert_eq!(
            measured_costs(&line.trace).unwrap().counts.server_messages,
            8
        );
    }

    #[test]
    fn disconnected_topology_is_rejected() {
        let mut c = SimConfig::new(Scheme::GcsaNa, spec(3, 1, 1, 1, 1, 1, 1, 1));
        c.topology = Topology::Edges(vec![(0, 1)]);
        assert!(matches!(run_simulation(&c), Err(Error::Config(_))));
        c.topology = Topology::Edges(vec![(0, 1), (1, 7)]);
        assert!(matches!(run_simulation(&c), Err(Error::Config(_))));
    }

    #[test]
    fn noise_payloads_ignore_inputs() {
        let mut c = SimConfig::new(Scheme::GcsaNa, spec(11, 1, 1, 2, 2, 1, 1, 2));
        c.input_seed = Some(1);
        let first = run_simulation(&c).unwrap();
        c.input_seed = Some(2);
        let second = run_simulation(&c).unwrap();
        assert_ne!(first.expected, second.expected);
        assert_eq!(first.noise_shares, second.noise_shares);
    }

    #[test]
    fn config_json() {
        let c = SimConfig::from_json(
            r#"{"scheme":"gcsa-na","S":11,"X":1,"ell":1,"Kc":2,"p":2,"m":1,"n":1,
                "lambda":2,"kappa":2,"mu":2,"modulus":13,"stragglers":[0,5],
                "topology":{"edges":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8],[8,9],[9,10]]}}"#,
        )
        .unwrap();
        assert_eq!(c.params.kc, 2);
        assert_eq!(c.stragglers, Stragglers::Servers(vec![0, 5]));
        assert_eq!(run_simulation(&c).unwrap().verdict, Verdict::Pass);
        let back = SimConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(matches!(SimConfig::from_json("{}"), Err(Error::Config(_))));
    }
}

//! Closed-form and measured communication costs.
//!
//! Normalizations: `U_A = sum_s |A~^s| / (L lambda kappa)`,
//! `U_B = sum_s |B~^s| / (L kappa mu)`, `CC = |M| / (L lambda mu)` and
//! `D = sum |Y_s| / (L lambda mu)` over the answers the master downloads.

use std::io::Write;
use std::ops::RangeInclusive;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcsa::ParamSpec;
use crate::ps::ps_threshold;
use crate::sim::{Party, Phase, TraceReport};
use crate::strassen::STRASSEN_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    GcsaNa,
    Ps,
    StrassenNa,
}

impl Scheme {
    pub fn tag(&self) -> &'static str {
        match self {
            Scheme::GcsaNa => "GCSA-NA",
            Scheme::Ps => "PS",
            Scheme::StrassenNa => "Strassen-NA",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcsa-na" => Ok(Scheme::GcsaNa),
            "ps" => Ok(Scheme::Ps),
            "strassen-na" => Ok(Scheme::StrassenNa),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Raw totals behind the normalized costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SymbolCounts {
    pub upload_a: u64,
    pub upload_b: u64,
    pub server_messages: u64,
    pub server_symbols: u64,
    pub download_answers: u64,
    pub download_symbols: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub scheme: Scheme,
    pub spec: ParamSpec,
    pub recovery_threshold: usize,
    pub upload_a: Ratio<u64>,
    pub upload_b: Ratio<u64>,
    pub server_comm: Ratio<u64>,
    pub download: Ratio<u64>,
    pub counts: SymbolCounts,
}

impl CostReport {
    fn from_counts(
        scheme: Scheme,
        spec: ParamSpec,
        recovery_threshold: usize,
        counts: SymbolCounts,
    ) -> Self {
        let l = spec.batch() as u64;
        let (lam, kap, mu) = (spec.lambda as u64, spec.kappa as u64, spec.mu as u64);
        Self {
            scheme,
            spec,
            recovery_threshold,
            upload_a: Ratio::new(counts.upload_a, l * lam * kap),
            upload_b: Ratio::new(counts.upload_b, l * kap * mu),
            server_comm: Ratio::new(counts.server_symbols, l * lam * mu),
            download: Ratio::new(counts.download_symbols, l * lam * mu),
            counts,
        }
    }
}

impl std::fmt::Display for CostReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = &self.spec;
        writeln!(
            f,
            "{} p={} m={} n={} ell={} Kc={} L={} X={} S={}",
            self.scheme.tag(),
            s.p,
            s.m,
            s.n,
            s.ell,
            s.kc,
            s.batch(),
            s.security,
            s.servers
        )?;
        writeln!(f, "R={}", self.recovery_threshold)?;
        writeln!(f, "U_A={}", self.upload_a)?;
        writeln!(f, "U_B={}", self.upload_b)?;
        writeln!(f, "CC={}", self.server_comm)?;
        write!(f, "D={}", self.download)
    }
}

fn check_spec(spec: &ParamSpec) -> Result<()> {
    let counts = [
        spec.servers,
        spec.security,
        spec.ell,
        spec.kc,
        spec.p,
        spec.m,
        spec.n,
        spec.lambda,
        spec.kappa,
        spec.mu,
    ];
    if counts.contains(&0) {
        return Err(Error::InvalidParams(
            "all parameters must be at least 1".into(),
        ));
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
    Ok(())
}

/// Closed-form costs for a configuration.
pub fn theoretical_costs(spec: &ParamSpec, scheme: Scheme) -> Result<CostReport> {
    check_spec(spec)?;
    let s = spec.servers as u64;
    let (p, m, n) = (spec.p as u64, spec.m as u64, spec.n as u64);
    let (lam, kap, mu) = (spec.lambda as u64, spec.kappa as u64, spec.mu as u64);
    let ell = spec.ell as u64;
    let l = spec.batch() as u64;
    let a_block = lam * kap / (p * m);
    let b_block = kap * mu / (p * n);
    let y_block = lam * mu / (m * n);
    let (r, counts) = match scheme {
        Scheme::GcsaNa => {
            let r = spec.recovery_threshold();
            if r > spec.servers {
                return Err(Error::InsufficientServers {
                    servers: spec.servers,
                    threshold: r,
                });
            }
            let counts = SymbolCounts {
                upload_a: s * ell * a_block,
                upload_b: s * ell * b_block,
                server_messages: s - 1,
                server_symbols: (s - 1) * y_block,
                download_answers: r as u64,
                download_symbols: r as u64 * y_block,
            };
            (r, counts)
        }
        Scheme::Ps => {
            let r = ps_threshold(spec.r_prime(), spec.security);
            if spec.servers != r {
                return Err(Error::InvalidParams(format!(
                    "polynomial sharing runs with exactly {r} servers, got {}",
                    spec.servers
                )));
            }
            let answers = l * (m * n + spec.security as u64);
            let counts = SymbolCounts {
                upload_a: l * s * a_block,
                upload_b: l * s * b_block,
                server_messages: l * s * (s - 1),
                server_symbols: l * s * (s - 1) * y_block,
                download_answers: answers,
                download_symbols: answers * y_block,
            };
            (r, counts)
        }
        Scheme::StrassenNa => {
            if (spec.p, spec.m, spec.n, spec.security, spec.batch()) != (2, 2, 2, 1, 1) {
                return Err(Error::InvalidParams(
                    "the Strassen variant needs p = m = n = 2, X = 1 and a single product".into(),
                ));
            }
            if spec.servers < STRASSEN_THRESHOLD {
                return Err(Error::InsufficientServers {
                    servers: spec.servers,
                    threshold: STRASSEN_THRESHOLD,
                });
            }
            let r = STRASSEN_THRESHOLD as u64;
            // every share and answer is a single 2x2 block
            let counts = SymbolCounts {
                upload_a: s * lam * kap / 4,
                upload_b: s * kap * mu / 4,
                server_messages: s - 1,
                server_symbols: (s - 1) * y_block,
                download_answers: r,
                download_symbols: r * y_block,
            };
            (STRASSEN_THRESHOLD, counts)
        }
    };
    Ok(CostReport::from_counts(scheme, *spec, r, counts))
}

/// Costs counted from a simulation log. Inter-server traffic counts each
/// payload once at its destination, so relaying does not inflate it.
pub fn measured_costs(trace: &TraceReport) -> Result<CostReport> {
    if !trace.complete {
        return Err(Error::IncompleteTrace(
            "the run did not reach reconstruction".into(),
        ));
    }
    let mut counts = SymbolCounts::default();
    let mut saw_answer = false;
    for msg in &trace.messages {
        match (msg.phase, msg.from, msg.to) {
            (Phase::Sharing, Party::SourceA, Party::Server(_)) => counts.upload_a += msg.symbols,
            (Phase::Sharing, Party::SourceB, Party::Server(_)) => counts.upload_b += msg.symbols,
            (Phase::OfflineNoise | Phase::Resharing, _, Party::Server(to)) => {
                if msg.payload_for.is_none_or(|dest| dest == to) {
                    counts.server_messages += 1;
                    counts.server_symbols += msg.symbols;
                }
            }
            (Phase::Answer, Party::Server(_), Party::Master) => {
                saw_answer = true;
                counts.download_answers += 1;
                counts.download_symbols += msg.symbols;
            }
            _ => {
                return Err(Error::IncompleteTrace(format!(
                    "unexpected {:?} message from {:?} to {:?}",
                    msg.phase, msg.from, msg.to
                )))
            }
        }
    }
    if !saw_answer {
        return Err(Error::IncompleteTrace("no answers were downloaded".into()));
    }
    let r = match trace.scheme {
        Scheme::Ps => trace.spec.servers,
        _ => counts.download_answers as usize,
    };
    Ok(CostReport::from_counts(trace.scheme, trace.spec, r, counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// `p = m = n` varies, batch fixed.
    Partition,
    /// `L = K_c` varies with `ell = 1`, partition fixed.
    Batch,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "partition" => Ok(SweepAxis::Partition),
            "batch" => Ok(SweepAxis::Batch),
            other => Err(Error::Config(format!("unknown sweep axis '{other}'"))),
        }
    }
}

/// Sweeps one axis with `S = R` for both GCSA-NA and PS, returning one row
/// per point per scheme.
pub fn sweep(
    axis: SweepAxis,
    security: usize,
    partition: usize,
    batch: usize,
    range: RangeInclusive<usize>,
) -> Result<Vec<CostReport>> {
    let mut rows = Vec::new();
    for v in range {
        let (pmn, l) = match axis {
            SweepAxis::Partition => (v, batch),
            SweepAxis::Batch => (partition, v),
        };
        let base = ParamSpec {
            servers: 0,
            security,
            ell: 1,
            kc: l,
            p: pmn,
            m: pmn,
            n: pmn,
            lambda: pmn,
            kappa: pmn,
            mu: pmn,
        };
        let gcsa = ParamSpec {
            servers: base.recovery_threshold(),
            ..base
        };
        rows.push(theoretical_costs(&gcsa, Scheme::GcsaNa)?);
        let ps = ParamSpec {
            servers: ps_threshold(base.r_prime(), security),
            ..base
        };
        rows.push(theoretical_costs(&ps, Scheme::Ps)?);
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 18] = [
    "scheme", "p", "m", "n", "ell", "Kc", "L", "X", "S", "R", "UA_num", "UA_den", "UB_num",
    "UB_den", "CC_num", "CC_den", "D_num", "D_den",
];

pub fn write_csv<W: Write>(rows: &[CostReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        let s = &r.spec;
        let mut rec = vec![
            r.scheme.tag().to_string(),
            s.p.to_string(),
            s.m.to_string(),
            s.n.to_string(),
            s.ell.to_string(),
            s.kc.to_string(),
            s.batch().to_string(),
            s.security.to_string(),
            s.servers.to_string(),
            r.recovery_threshold.to_string(),
        ];
        for q in [r.upload_a, r.upload_b, r.server_comm, r.download] {
            rec.push(q.numer().to_string());
            rec.push(q.denom().to_string());
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: usize, x: usize, ell: usize, kc: usize, p: usize, m: usize, n: usize) -> ParamSpec {
        ParamSpec {
            servers: s,
            security: x,
            ell,
            kc,
            p,
            m,
            n,
            lambda: 4,
            kappa: 4,
            mu: 4,
        }
    }

    fn q(n: u64, d: u64) -> Ratio<u64> {
        Ratio::new(n, d)
    }

    #[test]
    fn gcsa_toy() {
        let r = theoretical_costs(&spec(9, 1, 1, 2, 2, 1, 1), Scheme::GcsaNa).unwrap();
        assert_eq!(r.recovery_threshold, 9);
        assert_eq!(r.server_comm, q(4, 1));
        assert_eq!(r.download, q(9, 2));
        assert_eq!(r.upload_a, q(9, 4));
        assert_eq!(r.upload_b, q(9, 4));
        assert_eq!(r.counts.server_messages, 8);
    }

    #[test]
    fn ps_toy() {
        let r = theoretical_costs(&spec(5, 1, 1, 1, 2, 1, 1), Scheme::Ps).unwrap();
        assert_eq!(r.recovery_threshold, 5);
        assert_eq!(r.download, q(2, 1));
        assert_eq!(r.server_comm, q(20, 1));
        assert_eq!(r.counts.server_messages, 20);
        assert!(matches!(
            theoretical_costs(&spec(6, 1, 1, 1, 2, 1, 1), Scheme::Ps),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn scalar_upload() {
        let mut s = spec(3, 1, 1, 1, 1, 1, 1);
        s.lambda = 1;
        s.kappa = 1;
        s.mu = 1;
        let r = theoretical_costs(&s, Scheme::GcsaNa).unwrap();
        assert_eq!(r.counts.upload_a, 3);
        assert_eq!(r.upload_a, q(3, 1));
        assert_eq!(r.counts.server_messages, 2);
    }

    #[test]
    fn partition_point() {
        let rows = sweep(SweepAxis::Partition, 5, 0, 1, 2..=2).unwrap();
        assert_eq!(rows[0].spec.servers, 25);
        assert_eq!(rows[0].server_comm, q(6, 1));
        assert_eq!(rows[1].spec.servers, 25);
        assert_eq!(rows[1].server_comm, q(150, 1));
    }

    #[test]
    fn batch_axis() {
        let rows = sweep(SweepAxis::Batch, 5, 2, 0, 1..=8).unwrap();
        let gcsa: Vec<_> = rows
            .iter()
            .filter(|r| r.scheme == Scheme::GcsaNa)
            .map(|r| r.server_comm)
            .collect();
        let ps: Vec<_> = rows
            .iter()
            .filter(|r| r.scheme == Scheme::Ps)
            .map(|r| r.server_comm)
            .collect();
        assert!(gcsa.windows(2).all(|w| w[1] < w[0]));
        assert!(ps.iter().all(|c| *c == ps[0]));
        assert_eq!(gcsa[0], q(6, 1));
        for (g, p) in gcsa.iter().zip(&ps) {
            assert!(g < p);
        }
    }

    #[test]
    fn gcsa_below_ps_on_grid() {
        for x in 1..=5 {
            for pmn in 1..=4 {
                for l in 1..=4 {
                    let rows = sweep(SweepAxis::Partition, x, 0, l, pmn..=pmn).unwrap();
                    assert!(
                        rows[0].server_comm < rows[1].server_comm,
                        "X={x} pmn={pmn} L={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(SweepAxis::Partition, 5, 0, 1, 2..=2).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines[1], "GCSA-NA,2,2,2,1,1,1,5,25,25,25,4,25,4,6,1,25,4");
        assert!(lines[2].starts_with("PS,2,2,2,1,1,1,5,25,25,"));
        assert!(lines[2].contains(",150,1,"));
    }

    #[test]
    fn strassen_costs() {
        let r = theoretical_costs(&spec(15, 1, 1, 1, 2, 2, 2), Scheme::StrassenNa).unwrap();
        assert_eq!(r.recovery_threshold, 15);
        assert_eq!(r.server_comm, q(14, 4).reduced());
        assert_eq!(r.download, q(15, 4));
        assert!(theoretical_costs(&spec(15, 2, 1, 1, 2, 2, 2), Scheme::StrassenNa).is_err());
    }

    #[test]
    fn scheme_parse() {
        assert_eq!("gcsa-na".parse::<Scheme>().unwrap(), Scheme::GcsaNa);
        assert_eq!("PS".parse::<Scheme>().unwrap(), Scheme::Ps);
        assert!("bgw".parse::<Scheme>().is_err());
    }
}

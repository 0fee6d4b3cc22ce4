use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gcsa_core::cost::{measured_costs, sweep, theoretical_costs, write_csv, Scheme, SweepAxis};
use gcsa_core::gcsa::ParamSpec;
use gcsa_core::ps::ps_threshold;
use gcsa_core::sim::{run_simulation, Phase, SimConfig, Stragglers, Topology, Verdict};
use gcsa_core::strassen::STRASSEN_THRESHOLD;
use gcsa_core::verify;

/// Secure batch matrix multiplication simulator.
#[derive(Parser)]
#[command(name = "gcsa-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print its report.
    Run(RunArgs),
    /// Emit the cost comparison sweep as CSV.
    Sweep(SweepArgs),
    /// Print closed-form costs for one configuration.
    Costs(CostArgs),
    /// Run the exhaustive privacy and security suites and the Strassen checks.
    Selftest,
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Number of servers; defaults to the scheme's threshold.
    #[arg(short = 'S', long)]
    servers: Option<usize>,
    /// Collusion tolerance.
    #[arg(short = 'X', long, default_value_t = 1)]
    security: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = 1)]
    kc: usize,
    #[arg(short, default_value_t = 1)]
    p: usize,
    #[arg(short, default_value_t = 1)]
    m: usize,
    #[arg(short, default_value_t = 1)]
    n: usize,
    /// Rows of A; defaults to 2m.
    #[arg(long)]
    lambda: Option<usize>,
    /// Columns of A; defaults to 2p.
    #[arg(long)]
    kappa: Option<usize>,
    /// Columns of B; defaults to 2n.
    #[arg(long)]
    mu: Option<usize>,
}

impl ParamArgs {
    fn spec(&self, scheme: Scheme) -> ParamSpec {
        let (p, m, n) = match scheme {
            Scheme::StrassenNa => (2, 2, 2),
            _ => (self.p, self.m, self.n),
        };
        let mut spec = ParamSpec {
            servers: 0,
            security: self.security,
            ell: self.ell,
            kc: self.kc,
            p,
            m,
            n,
            lambda: self.lambda.unwrap_or(2 * m),
            kappa: self.kappa.unwrap_or(2 * p),
            mu: self.mu.unwrap_or(2 * n),
        };
        spec.servers = self.servers.unwrap_or(match scheme {
            Scheme::GcsaNa => spec.recovery_threshold(),
            Scheme::Ps => ps_threshold(spec.r_prime(), spec.security),
            Scheme::StrassenNa => STRASSEN_THRESHOLD,
        });
        spec
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    modulus: Option<u64>,
    /// Number of stragglers, chosen with the seed.
    #[arg(long)]
    stragglers: Option<usize>,
    /// complete, star, line, or `path-file PATH` with a JSON list of edges.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "PATH"])]
    topology: Option<Vec<String>>,
    /// Write the trace as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "partition")]
    axis: SweepAxis,
    #[arg(short = 'X', long, default_value_t = 5)]
    security: usize,
    /// `p = m = n` for the batch axis.
    #[arg(long, default_value_t = 2)]
    partition: usize,
    /// Batch size for the partition axis.
    #[arg(long, default_value_t = 1)]
    batch: usize,
    #[arg(long, default_value_t = 1)]
    from: usize,
    #[arg(long, default_value_t = 8)]
    to: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[arg(long, default_value = "gcsa-na")]
    scheme: Scheme,
    #[command(flatten)]
    params: ParamArgs,
}

fn parse_topology(words: &[String]) -> Result<Topology> {
    match words {
        [kind] if kind == "complete" => Ok(Topology::Complete),
        [kind] if kind == "star" => Ok(Topology::Star),
        [kind] if kind == "line" => Ok(Topology::Line),
        [kind, path] if kind == "path-file" => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let edges: Vec<(usize, usize)> =
                serde_json::from_str(&text).with_context(|| format!("parsing edge list {path}"))?;
            Ok(Topology::Edges(edges))
        }
        _ => bail!("unknown topology {words:?}; expected complete, star, line or path-file PATH"),
    }
}

fn run(args: RunArgs) -> Result<bool> {
    let mut config = match &args.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SimConfig::from_json(&text)?
        }
        None => {
            let scheme = args.scheme.unwrap_or(Scheme::GcsaNa);
            SimConfig::new(scheme, args.params.spec(scheme))
        }
    };
    if let Some(scheme) = args.scheme {
        config.scheme = scheme;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(q) = args.modulus {
        config.modulus = q;
    }
    if let Some(k) = args.stragglers {
        config.stragglers = Stragglers::Count(k);
    }
    if let Some(words) = &args.topology {
        config.topology = parse_topology(words)?;
    }

    let out = run_simulation(&config)?;
    let trace = &out.trace;
    let measured = measured_costs(trace)?;
    let theory = theoretical_costs(&trace.spec, trace.scheme)?;
    println!("scheme: {}", trace.scheme.tag());
    println!("field: GF({})  seed: {}", trace.modulus, trace.seed);
    println!("stragglers: {:?}", trace.stragglers);
    for phase in [
        Phase::OfflineNoise,
        Phase::Sharing,
        Phase::Resharing,
        Phase::Answer,
    ] {
        println!("messages {phase:?}: {}", trace.count(phase));
    }
    println!("decoded from servers: {:?}", trace.decoded_from);
    println!("measured costs:\n{measured}");
    println!("costs match closed form: {}", measured == theory);
    let ops = trace.field_ops;
    println!(
        "field multiplications: offline {} sharing {} answers {} decoding {}",
        ops.offline, ops.sharing, ops.answers, ops.decoding
    );
    let verdict = match out.verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
    };
    println!("verdict: {verdict}");
    if let Some(path) = &args.out {
        fs::write(path, trace.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(out.verdict == Verdict::Pass && measured == theory)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep(args) => (|| {
            if args.from == 0 || args.from > args.to {
                bail!("empty or invalid range {}..={}", args.from, args.to);
            }
            let rows = sweep(
                args.axis,
                args.security,
                args.partition,
                args.batch,
                args.from..=args.to,
            )?;
            match &args.out {
                Some(path) => write_csv(&rows, fs::File::create(path)?)?,
                None => write_csv(&rows, std::io::stdout().lock())?,
            }
            Ok(true)
        })(),
        Command::Costs(args) => theoretical_costs(&args.params.spec(args.scheme), args.scheme)
            .map(|report| {
                println!("{report}");
                true
            })
            .map_err(Into::into),
        Command::Selftest => {
            let checks = verify::selftest();
            for c in &checks {
                println!("{c}");
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

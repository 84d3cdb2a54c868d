//! `pireg`: run traces through FIFO systems and regulators, report delays,
//! and check regularity properties.
//!
//! Exit status: 0 success, 1 failed check or golden mismatch, 2 usage or
//! parse error, 3 semantic error in the configuration or arguments.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pireg::literal::{parse_curve, parse_bindings, parse_operator, parse_system};
use pireg::scenario;
use pireg::systems::{packet_delays, per_flow_worst_case_delay_dates, worst_case_delay_dates};
use pireg::trace_io::{parse_records, parse_trace, write_records, TraceRecords};
use pireg::verify::gen::{self, TraceShape};
use pireg::verify::{self, ShapingMode};
use pireg::{CheckReport, Error, FifoSystem, OperatorMap, PacketSequence};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::PipelineConfig;

#[derive(Parser)]
#[command(name = "pireg", version, about = "Packet-level traffic regulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trace through the stages of a configuration file.
    Regulate {
        trace: PathBuf,
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Worst-case delays between an input trace and an output trace.
    Delays {
        input: PathBuf,
        output: PathBuf,
        /// Also list the delay of every packet.
        #[arg(long)]
        per_packet: bool,
    },
    /// Run one checker and print its report.
    Check(CheckArgs),
    /// Recompute the two-flow example and compare it with the expected figures.
    Example {
        /// Expected figures, one series per line; defaults to the built-in set.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckName {
    Theorem1,
    Minimality,
    ShapingForFree,
    Dominance,
    Regularity,
    CConditions,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PerFlow,
    Interleaved,
}

#[derive(clap::Args)]
struct CheckArgs {
    name: CheckName,
    /// One operator bound to every flow of the trace, e.g. `ps 5`.
    #[arg(long, conflicts_with = "ops")]
    op: Option<String>,
    /// Operators per flow, e.g. `{1: ps 5, 2: ps 10}`.
    #[arg(long)]
    ops: Option<String>,
    /// Arrival curve, e.g. `affine 1 2`.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Trace to test for minimality against the regulator of `--trace`.
    #[arg(long)]
    candidate: Option<PathBuf>,
    /// FIFO system, e.g. `pserver 1 [0,3]`.
    #[arg(long)]
    system: Option<String>,
    #[arg(long, value_enum, default_value = "interleaved")]
    mode: Mode,
    /// Seed for generated traces and randomized checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    trials: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidSequence(_) => 2,
            _ => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn in_file(path: &Path, e: Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn load_trace(path: &Path) -> Result<PacketSequence, Failure> {
    parse_trace(&read(path)?).map_err(|e| in_file(path, e))
}

fn regulate(trace: &Path, config: &Path, output: &Path) -> Outcome {
    let input = load_trace(trace)?;
    let config = PipelineConfig::parse(&read(config)?).map_err(|e| in_file(config, e))?;
    let records = config.run(&input)?;
    fs::write(output, write_records(&records)).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", output.display()),
    })?;
    Ok(0)
}

fn delays(input: &Path, output: &Path, per_packet: bool) -> Outcome {
    let a = load_trace(input)?;
    let d: TraceRecords = parse_records(&read(output)?).map_err(|e| in_file(output, e))?;
    if d.lengths != a.lengths() || d.flows != a.flows() {
        return Err(Error::Mismatch("packet lengths or flows differ".into()).into());
    }
    let mut table = String::from("flow\tworst_case_delay\n");
    for (f, v) in per_flow_worst_case_delay_dates(&a, &d.dates)? {
        writeln!(table, "{f}\t{v}").unwrap();
    }
    writeln!(table, "all\t{}", worst_case_delay_dates(&a, &d.dates)?).unwrap();
    if per_packet {
        table.push_str("\npacket\tflow\tarrival\tdeparture\tdelay\n");
        for (n, delay) in packet_delays(&a, &d.dates)?.into_iter().enumerate() {
            writeln!(table, "{}\t{}\t{}\t{}\t{delay}", n + 1, a.flows()[n], a.dates()[n], d.dates[n]).unwrap();
        }
    }
    print!("{table}");
    Ok(0)
}

fn operators(args: &CheckArgs, seq: &PacketSequence) -> Result<Option<OperatorMap>, Failure> {
    if let Some(ops) = &args.ops {
        return Ok(Some(parse_bindings(ops)?));
    }
    let Some(op) = &args.op else { return Ok(None) };
    let op = parse_operator(op)?;
    let mut flows = seq.flow_ids();
    if flows.is_empty() {
        flows.push(1);
    }
    Ok(Some(flows.into_iter().map(|f| (f, op.clone())).collect()))
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Failure> {
    value.as_deref().ok_or_else(|| Failure {
        code: 2,
        message: format!("this check needs --{flag}"),
    })
}

/// Runs a check. Without `--trace` the two-flow example supplies the trace,
/// operators and system, except for checks on a single operator, which use
/// a trace generated from `--seed`.
fn check(args: &CheckArgs) -> Outcome {
    let example = scenario::two_flow();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let trace = |fallback: &dyn Fn(&mut ChaCha8Rng) -> Result<PacketSequence, Failure>,
                 rng: &mut ChaCha8Rng| match &args.trace {
        Some(p) => load_trace(p),
        None => fallback(rng),
    };
    let generated = |rng: &mut ChaCha8Rng| Ok(gen::trace(rng, &TraceShape::single_flow(12)));
    let example_input = |_: &mut ChaCha8Rng| Ok(example.input.clone());
    let example_output = |_: &mut ChaCha8Rng| Ok(example.system.apply(&example.input)?);
    let with_default_ops = |seq: &PacketSequence| -> Result<OperatorMap, Failure> {
        Ok(operators(args, seq)?.unwrap_or_else(|| example.ops.clone()))
    };

    let report: CheckReport = match args.name {
        CheckName::Theorem1 => {
            let sigma = parse_curve(required(&args.sigma, "sigma")?)?;
            verify::check_theorem1(&trace(&generated, &mut rng)?, &sigma)?
        }
        CheckName::CConditions => {
            let op = parse_operator(required(&args.op, "op")?)?;
            let seq = trace(&generated, &mut rng)?;
            verify::check_c_conditions(&op, &seq, args.seed, args.trials)?
        }
        CheckName::Regularity => {
            let seq = trace(&example_input, &mut rng)?;
            verify::check_regularity(&with_default_ops(&seq)?, &seq)?
        }
        CheckName::Dominance => {
            let seq = trace(&example_output, &mut rng)?;
            verify::check_dominance(&with_default_ops(&seq)?, &seq)?
        }
        CheckName::Minimality => {
            let seq = trace(&example_output, &mut rng)?;
            let ops = with_default_ops(&seq)?;
            let candidate = match &args.candidate {
                Some(p) => load_trace(p)?,
                None => gen::slack_candidate(&mut rng, &ops, &seq)?,
            };
            verify::check_minimality(&ops, &seq, &candidate)?
        }
        CheckName::ShapingForFree => {
            let seq = trace(&example_input, &mut rng)?;
            let ops = with_default_ops(&seq)?;
            let system: FifoSystem = match &args.system {
                Some(s) => parse_system(s)?,
                None => example.system.clone(),
            };
            let mode = match args.mode {
                Mode::PerFlow => ShapingMode::PerFlow,
                Mode::Interleaved => ShapingMode::Interleaved,
            };
            verify::check_shaping_for_free(&system, &ops, &seq, mode)?
        }
    };
    println!("{report}");
    Ok(if report.passed() { 0 } else { 1 })
}

fn example(golden: Option<&Path>) -> Outcome {
    let expected = match golden {
        Some(p) => scenario::Figures::parse(&read(p)?).map_err(|e| in_file(p, e))?,
        None => scenario::golden(),
    };
    let figures = scenario::two_flow().run()?;
    print!("{}", figures.render());
    match figures.first_difference(&expected) {
        None => {
            println!("MATCH");
            Ok(0)
        }
        Some(d) => {
            println!("MISMATCH {d}");
            Ok(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Regulate { trace, config, output } => regulate(trace, config, output),
        Command::Delays {
            input,
            output,
            per_packet,
        } => delays(input, output, *per_packet),
        Command::Check(args) => check(args),
        Command::Example { golden } => example(golden.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pireg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

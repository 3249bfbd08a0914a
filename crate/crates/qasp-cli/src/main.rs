mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qasp::bench::GenParams;
use qasp::solve::Reduct;

use commands::{Ctx, Outcome};
use report::{digest, Caps, ErrorPayload, RunReport, Timer};

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

/// Evaluate quantified answer set programs and rewrite weak constraints away.
#[derive(Parser, Debug)]
#[command(name = "qasp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Branching decisions allowed on one search path of a ground subprogram
    #[arg(long, global = true, default_value_t = 22)]
    max_atoms: usize,

    /// Ground rules allowed per subprogram
    #[arg(long, global = true, default_value_t = 50_000)]
    max_ground: usize,

    /// Wall-clock budget in seconds
    #[arg(long, global = true, default_value_t = 600)]
    timeout: u64,

    /// Reduct used to define answer sets
    #[arg(long, global = true, value_enum, default_value_t = ReductArg::Strip)]
    reduct: ReductArg,

    /// Evaluate candidates on one thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReductArg {
    /// Drop false rules and strip negative literals
    Strip,
    /// Drop false rules, keep bodies intact
    FlpClassic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide coherence and optionally list (optimal) quantified answer sets
    Solve {
        file: PathBuf,
        #[arg(long, conflicts_with = "optimal")]
        enumerate: bool,
        #[arg(long)]
        optimal: bool,
    },
    /// Compile into a plain, alternating program without weak constraints
    Rewrite {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Include the applied transformations in the report
        #[arg(long)]
        trace: bool,
    },
    /// Check that the rewriting agrees with direct evaluation
    Verify {
        file: PathBuf,
        /// Also check this many seeded random programs
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate a benchmark instance and its encoding
    Gen {
        problem: String,
        #[command(flatten)]
        params: GenArgs,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Variables per quantifier block (QBF) or the variable count (abduction)
    #[arg(long, num_args = 1..)]
    vars: Option<Vec<usize>>,
    /// Matrix terms (QBF) or clauses (abduction)
    #[arg(long, alias = "clauses")]
    conjuncts: Option<usize>,
    #[arg(long)]
    formulas: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long = "i")]
    i: Option<usize>,
    #[arg(long = "j")]
    j: Option<usize>,
    /// Percent chance of each edge
    #[arg(long)]
    edge_percent: Option<u32>,
    #[arg(long)]
    hypotheses: Option<usize>,
    #[arg(long)]
    manifestations: Option<usize>,
    /// Prefer solutions containing the first hypothesis
    #[arg(long)]
    relevance: bool,
}

impl GenArgs {
    fn params(&self, problem: &str) -> GenParams {
        let mut p = GenParams::default();
        if let Some(v) = &self.vars {
            if problem.starts_with("pap") {
                p.pap_vars = v[0];
            } else {
                p.vars = v.clone();
            }
        }
        p.terms = self.conjuncts.unwrap_or(p.terms);
        p.formulas = self.formulas.unwrap_or(p.formulas);
        p.nodes = self.nodes.unwrap_or(p.nodes);
        p.i = self.i.unwrap_or(p.i);
        p.j = self.j.unwrap_or(p.j);
        p.edge_percent = self.edge_percent.unwrap_or(p.edge_percent);
        p.hypotheses = self.hypotheses.unwrap_or(p.hypotheses);
        p.manifestations = self.manifestations.unwrap_or(p.manifestations);
        p.relevance = self.relevance;
        p
    }
}

fn exit_code(e: &anyhow::Error) -> (u8, &'static str) {
    if let Some(q) = e.downcast_ref::<qasp::Error>() {
        return if q.is_resource() {
            (EXIT_RESOURCE, "resource")
        } else if q.is_input() {
            (EXIT_INPUT, "input")
        } else {
            (EXIT_INTERNAL, "internal")
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return (EXIT_INPUT, "io");
    }
    (EXIT_INTERNAL, "internal")
}

fn read(file: &PathBuf) -> Result<Vec<u8>> {
    std::fs::read(file).with_context(|| format!("reading {}", file.display()))
}

fn dispatch(cli: &Cli, ctx: &mut Ctx, digest_out: &mut String) -> Result<Outcome> {
    let text = |bytes: &[u8]| String::from_utf8_lossy(bytes).into_owned();
    match &cli.command {
        Command::Solve { file, enumerate, optimal } => {
            let bytes = read(file)?;
            *digest_out = digest(&bytes);
            commands::solve(ctx, &text(&bytes), *enumerate, *optimal)
        }
        Command::Rewrite { file, output, trace } => {
            let bytes = read(file)?;
            *digest_out = digest(&bytes);
            commands::rewrite(ctx, &text(&bytes), output, *trace)
        }
        Command::Verify { file, samples, seed } => {
            let bytes = read(file)?;
            *digest_out = digest(&bytes);
            commands::verify(ctx, &text(&bytes), *samples, *seed)
        }
        Command::Gen { problem, params, seed, output } => {
            let params = params.params(problem);
            *digest_out = digest(serde_json::to_string(&(problem, &params, seed))?.as_bytes());
            commands::gen(ctx, problem, &params, *seed, output)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Rewrite { .. } => "rewrite",
        Command::Verify { .. } => "verify",
        Command::Gen { .. } => "gen",
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let caps = Caps { max_atoms: cli.max_atoms, max_ground: cli.max_ground, timeout_secs: cli.timeout };
    let reduct = match cli.reduct {
        ReductArg::Strip => Reduct::Flp,
        ReductArg::FlpClassic => Reduct::FlpClassic,
    };
    let mut ctx = Ctx { caps: caps.clone(), reduct, parallel: !cli.sequential, timer: Timer::default() };
    let mut input_digest = String::new();
    let outcome = dispatch(&cli, &mut ctx, &mut input_digest);
    let (result, error, code) = match outcome {
        Ok(Outcome { result, mismatch: None }) => (Some(result), None, 0),
        Ok(Outcome { result, mismatch: Some(m) }) => {
            (Some(result), Some(ErrorPayload { kind: "mismatch", message: m }), EXIT_MISMATCH)
        }
        Err(e) => {
            let (code, kind) = exit_code(&e);
            eprintln!("error: {e:#}");
            (None, Some(ErrorPayload { kind, message: format!("{e:#}") }), code)
        }
    };
    let report = RunReport {
        command: command_name(&cli.command),
        input_digest,
        result,
        error,
        timings: ctx.timer.into_map(),
        caps,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    ExitCode::from(code)
}

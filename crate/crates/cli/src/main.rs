// SPDX-License-Identifier: MIT
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "teamsem",
    version,
    about = "Team semantics toolkit for hidden-variable models"
)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate a formula on a team.
    Eval(EvalArgs),
    /// Check the named hidden-variable properties.
    #[command(alias = "check")]
    Property(PropertyArgs),
    /// Build a hidden-variable realization of an empirical team.
    Realize(RealizeArgs),
    /// The maximum-entropy probabilistic lift of a z-independent team.
    Lift(LiftArgs),
    /// Entropies of the lift, compared with a given realization.
    EntropyReport(EntropyArgs),
    /// Randomized search for a probabilistic realization with given properties.
    PrProbe(ProbeArgs),
    /// Derive an independence atom from premises.
    Entail(EntailArgs),
    /// The EPR, GHZ, Hardy and Kochen-Specker cases.
    Nogo(NogoArgs),
    /// Distributions of the built-in quantum systems.
    Quantum(QuantumArgs),
    /// Turn a non-local game into the team of its winning answers.
    Game(GameArgs),
}

#[derive(Args, Debug)]
struct TeamInput {
    /// Team file (CSV, or JSON if it starts with `{`).
    #[arg(long)]
    team: PathBuf,
    /// Use probabilistic semantics. Plain teams get the uniform distribution.
    #[arg(long)]
    prob: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    input: TeamInput,
    #[arg(long, required_unless_present = "formula_file")]
    formula: Option<String>,
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<PathBuf>,
    /// Largest fresh domain for the new-sort quantifiers.
    #[arg(long, default_value_t = 4)]
    k_max: usize,
    /// Search node budget.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Args, Debug)]
struct PropertyArgs {
    #[command(flatten)]
    input: TeamInput,
    /// Properties to check (WD, SD, NS, SV, ZI, PI, OI, ML, LOCAL). All if omitted.
    #[arg(long = "check", value_delimiter = ',')]
    check: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RealizeMode {
    /// Single-valued hidden variables.
    Sv,
    /// Strongly deterministic.
    Sd,
    /// Weakly deterministic and z-independent.
    Wdzi,
    /// Strongly deterministic and z-independent, from a local team.
    Canon,
}

#[derive(Args, Debug)]
struct RealizeArgs {
    #[arg(long)]
    team: PathBuf,
    #[arg(long, value_enum)]
    mode: RealizeMode,
    /// Number of hidden variables for `sv`.
    #[arg(long, default_value_t = 1)]
    hidden: usize,
    /// Largest candidate set a construction may enumerate.
    #[arg(long, default_value_t = teamsem_core::constructions::DEFAULT_CAP)]
    cap: usize,
    /// Write the team here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[arg(long)]
    team: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    /// A hidden-variable team; if it carries weights they are compared with the lift of its support.
    #[arg(long)]
    team: PathBuf,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[arg(long)]
    team: PathBuf,
    #[arg(long = "prop", value_delimiter = ',', required = true)]
    props: Vec<String>,
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Write a witness here if one is found.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EntailArgs {
    /// One atom (or conjunction of atoms) per line; `#` starts a comment.
    #[arg(long)]
    premises: Option<PathBuf>,
    #[arg(long)]
    goal: String,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    side_len: usize,
    #[arg(long, default_value_t = 2_000_000)]
    max_facts: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum NogoCase {
    Epr,
    Ghz,
    Hardy,
    Ks,
}

#[derive(Args, Debug)]
struct NogoArgs {
    #[arg(long, value_enum)]
    case: NogoCase,
    /// Write the case's team here.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuantumArgs {
    /// epr, ghz or hardy.
    #[arg(long)]
    preset: teamsem_quantum::Preset,
    /// Write the probabilistic team here.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GameArgs {
    /// JSON with I_A, I_B, O_A, O_B and V as [a, b, c, d, value] entries.
    #[arg(long, required_unless_present = "chsh")]
    spec: Option<PathBuf>,
    /// Use the built-in CHSH game.
    #[arg(long, conflicts_with = "spec")]
    chsh: bool,
    #[arg(long)]
    to_team: Option<PathBuf>,
}

fn set_threads() -> anyhow::Result<()> {
    if let Ok(s) = std::env::var("TEAMSEM_THREADS") {
        let n: usize = s
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("TEAMSEM_THREADS must be a number, got `{s}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn dispatch(cmd: Cmd) -> anyhow::Result<Report> {
    match cmd {
        Cmd::Eval(a) => commands::eval(a),
        Cmd::Property(a) => commands::property(a),
        Cmd::Realize(a) => commands::realize(a),
        Cmd::Lift(a) => commands::lift(a),
        Cmd::EntropyReport(a) => commands::entropy_report(a),
        Cmd::PrProbe(a) => commands::pr_probe(a),
        Cmd::Entail(a) => commands::entail(a),
        Cmd::Nogo(a) => commands::nogo(a),
        Cmd::Quantum(a) => commands::quantum(a),
        Cmd::Game(a) => commands::game(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let json = cli.json;
    let res = set_threads().and_then(|_| dispatch(cli.cmd));
    match res {
        Ok(r) => {
            r.print(json);
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

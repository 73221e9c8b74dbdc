//! Batch runner over the tourney-core routines. Every subcommand writes one
//! deterministic JSON document (stdout or `--json-out`) and a short human
//! summary plus wall time on stderr.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{alloc, binom, decompose, embed, gen, hampath, regular, sumner};
use output::{CliError, Ctx};

#[derive(Parser)]
#[command(name = "tourney", version, about = "Directed tree embedding experiments on tournaments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Base seed; batch instance i uses a seed derived from (seed, i).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Parameter preset file (default: the shipped desk preset).
    #[arg(long, global = true)]
    preset: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a tournament, tree or cluster cycle as JSON.
    Gen(gen::GenArgs),
    /// Hamilton directed path by insertion, validated.
    Hampath(hampath::HampathArgs),
    /// Embed trees: the full pipeline, the cluster-cycle embedding, or exact search.
    Embed(embed::EmbedArgs),
    /// Check that every tree of one size embeds in every (or sampled) host.
    VerifySumner(sumner::SumnerArgs),
    /// Decompose a host and audit the logged invariants.
    Decompose(decompose::DecomposeArgs),
    /// Verify density and regularity of a cluster cycle.
    CheckRegular(regular::RegularArgs),
    /// Cluster load and semi-canonicity statistics of random allocations.
    AllocStats(alloc::AllocArgs),
    /// Exact distribution of a binomial variable modulo k.
    BinomMod(binom::BinomArgs),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let ctx = Ctx::new(cli.global.seed, cli.global.preset.as_deref(), cli.global.json_out)?;
    let (name, outcome) = match &cli.cmd {
        Cmd::Gen(a) => ("gen", gen::run(&ctx, a)?),
        Cmd::Hampath(a) => ("hampath", hampath::run(&ctx, a)?),
        Cmd::Embed(a) => ("embed", embed::run(&ctx, a)?),
        Cmd::VerifySumner(a) => ("verify-sumner", sumner::run(&ctx, a)?),
        Cmd::Decompose(a) => ("decompose", decompose::run(&ctx, a)?),
        Cmd::CheckRegular(a) => ("check-regular", regular::run(&ctx, a)?),
        Cmd::AllocStats(a) => ("alloc-stats", alloc::run(&ctx, a)?),
        Cmd::BinomMod(a) => ("binom-mod", binom::run(&ctx, a)?),
    };
    ctx.emit(name, outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

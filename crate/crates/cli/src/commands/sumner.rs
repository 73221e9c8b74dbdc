use clap::{Args, ValueEnum};
use tourney_core::exact::{verify_universality, Mode};

use crate::output::{CliResult, Ctx, Outcome};

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Every tournament on --host vertices against every tree on --tree vertices.
    Exhaustive,
    /// --count random (tournament, tree) pairs.
    Sample,
}

#[derive(Args)]
pub struct SumnerArgs {
    #[arg(long)]
    host: usize,
    #[arg(long)]
    tree: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1000)]
    count: u64,
}

pub fn run(ctx: &Ctx, a: &SumnerArgs) -> CliResult<Outcome> {
    let mode = match a.mode {
        ModeArg::Exhaustive => Mode::Exhaustive,
        ModeArg::Sample => Mode::Sample { count: a.count, seed: ctx.seed },
    };
    let r = verify_universality(a.host, a.tree, mode)?;
    let ok = r.counterexamples.is_empty() && r.failing_hosts.is_empty() && r.limit_hits == 0;
    let mut lines = vec![format!("{} counterexamples / {} hosts", r.failing_hosts.len(), r.hosts_checked)];
    if r.limit_hits > 0 {
        lines.push(format!("{} pairs hit the node limit", r.limit_hits));
    }
    Outcome::new(r, ok, lines)
}

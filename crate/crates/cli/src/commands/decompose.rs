use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tourney_core::num::round_half_up;
use tourney_core::pipeline::{audit, decompose, DecomposeAudit, DecomposeOutcome, Decomposition, SplitKind};

use crate::input::{self, Family};
use crate::output::{CliError, CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct DecomposeArgs {
    #[arg(long, conflicts_with_all = ["family", "n"])]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Family::Random)]
    family: Family,
    /// Host size of a generated family.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    flip: f64,
    /// Tree size the thresholds are computed for (default: host size / 2.6).
    #[arg(long)]
    tree_size: Option<usize>,
    /// Include the full partition and step log.
    #[arg(long)]
    full: bool,
}

#[derive(Serialize)]
struct Counts {
    low_out: usize,
    low_in: usize,
    non_expander: usize,
}

#[derive(Serialize)]
struct DecomposeReport {
    host_size: usize,
    tree_size: usize,
    outcome: &'static str,
    iterations: usize,
    piece_sizes: Vec<usize>,
    robust_piece: Option<[usize; 3]>,
    backward_count: Option<usize>,
    deleted: usize,
    bad_count: usize,
    splits: Counts,
    audit: DecomposeAudit,
    full: Option<Decomposition>,
}

pub fn run(ctx: &Ctx, a: &DecomposeArgs) -> CliResult<Outcome> {
    let g = match (&a.input, a.n) {
        (Some(p), _) => input::read_host(p)?,
        (None, Some(n)) => input::host(a.family, n, a.flip, ctx.seed)?,
        _ => return Err(CliError::Usage("need --input or --n".into())),
    };
    let n = a.tree_size.unwrap_or_else(|| round_half_up(g.n() as f64 / 2.6).max(1));
    let dec = decompose(&g, n, &ctx.params, ctx.seed)?;
    let checks = audit(&g, &dec, &ctx.params);
    let count = |k: SplitKind| dec.state.log.iter().filter(|s| s.kind == k).count();
    let (outcome, robust_piece, backward_count) = match &dec.outcome {
        DecomposeOutcome::RobustPiece { s, s_minus, s_plus, .. } => ("robust-piece", Some([s_minus.len(), s.len(), s_plus.len()]), None),
        DecomposeOutcome::AlmostTransitive { backward_count, .. } => ("almost-transitive", None, Some(*backward_count)),
    };
    let mut lines = vec![format!(
        "{} iterations, {} pieces, outcome {outcome}, {} bad arcs, {} deleted",
        dec.iterations,
        dec.state.sets.len(),
        dec.state.bad_count,
        dec.state.deleted.len()
    )];
    if let Some([m, s, p]) = robust_piece {
        lines.push(format!("robust piece |S-| = {m}, |S| = {s}, |S+| = {p}"));
    }
    lines.push(format!("audit: {}", if checks.all() { "all invariants hold" } else { "VIOLATION" }));
    let report = DecomposeReport {
        host_size: g.n(),
        tree_size: n,
        outcome,
        iterations: dec.iterations,
        piece_sizes: dec.state.sets.iter().map(Vec::len).collect(),
        robust_piece,
        backward_count,
        deleted: dec.state.deleted.len(),
        bad_count: dec.state.bad_count,
        splits: Counts { low_out: count(SplitKind::LowOut), low_in: count(SplitKind::LowIn), non_expander: count(SplitKind::NonExpander) },
        audit: checks,
        full: a.full.then_some(dec),
    };
    Outcome::new(report, checks.all(), lines)
}

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use tourney_core::digraph::generate::gen_random_tournament;
use tourney_core::exact::{hamilton_directed_path, is_hamilton_path};

use crate::input;
use crate::output::{CliError, CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct HampathArgs {
    /// Size of a random tournament drawn from --seed.
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    /// Host file instead of a random tournament.
    #[arg(long, conflicts_with = "n")]
    input: Option<PathBuf>,
    /// Include the path itself in the report.
    #[arg(long)]
    print_path: bool,
}

#[derive(Serialize)]
struct HampathReport {
    n: usize,
    valid: bool,
    path: Option<Vec<usize>>,
}

pub fn run(ctx: &Ctx, a: &HampathArgs) -> CliResult<Outcome> {
    let g = match (&a.input, a.n) {
        (Some(p), _) => input::read_host(p)?,
        (None, Some(n)) if n > 0 => gen_random_tournament(n, ctx.seed),
        _ => return Err(CliError::Usage("need --n >= 1 or --input".into())),
    };
    let path = hamilton_directed_path(&g);
    let valid = is_hamilton_path(&g, &path);
    let line = format!("hamilton path on {} vertices: {}", g.n(), if valid { "valid" } else { "INVALID" });
    Outcome::new(HampathReport { n: g.n(), valid, path: a.print_path.then_some(path) }, valid, vec![line])
}

use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use serde_json::json;
use tourney_core::digraph::formats::TournamentJson;
use tourney_core::digraph::generate::gen_cluster_cycle;
use tourney_core::digraph::Tournament;
use tourney_core::regular::{check_cluster_cycle, ClusterCycle};

use crate::input::read_payload;
use crate::output::{CliError, CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct RegularArgs {
    /// JSON file `{tournament, cycle}` as written by `gen cycle`; otherwise a cycle is generated.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    /// Forward density of the generated cycle.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    pad: Option<f64>,
    /// Regularity to check (default: preset eps).
    #[arg(long)]
    eps: Option<f64>,
    /// Density each pair must reach (default: half the preset d).
    #[arg(long)]
    min_density: Option<f64>,
    /// Random subset pairs per sampled pair check (default: preset).
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Deserialize)]
struct CycleFile {
    tournament: TournamentJson,
    cycle: ClusterCycle,
}

pub fn run(ctx: &Ctx, a: &RegularArgs) -> CliResult<Outcome> {
    let p = &ctx.params;
    let (g, cycle) = match &a.input {
        Some(path) => {
            let s = read_payload(path, None)?;
            let f: CycleFile = serde_json::from_str(&s).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            (Tournament::try_from(f.tournament)?, f.cycle)
        }
        None => gen_cluster_cycle(a.k.unwrap_or(p.k), a.m.unwrap_or(p.m), a.d.unwrap_or(p.d), a.pad.unwrap_or(p.alpha), ctx.seed)?,
    };
    let eps = a.eps.unwrap_or(p.eps);
    let dmin = a.min_density.unwrap_or(p.d / 2.0);
    let v = check_cluster_cycle(&g, &cycle, eps, dmin, a.samples.unwrap_or(p.regularity_samples), ctx.seed)?;
    let lines = v
        .pairs
        .iter()
        .map(|q| format!("pair {}: density {:.4}, max deviation {:.4}, {}", q.index, q.density, q.max_deviation, if q.dense && q.regular { "ok" } else { "FAIL" }))
        .collect();
    Outcome::new(json!({ "k": cycle.k(), "cluster_size": cycle.m(), "eps": eps, "min_density": dmin, "verdict": v }), v.pass, lines)
}

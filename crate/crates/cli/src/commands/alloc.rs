use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use tourney_core::allocate::{allocate, is_semi_canonical};
use tourney_core::digraph::generate::TREE_GENERATOR;

use super::instance_seed;
use crate::input;
use crate::output::{write_csv, CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct AllocArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// A run is within bound when its heaviest cluster holds at most load_bound·n/k vertices.
    #[arg(long, default_value_t = 1.1)]
    load_bound: f64,
    /// Per-run rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    instance: usize,
    max_load: usize,
    min_load: usize,
    /// Heaviest load over n/k.
    max_ratio: f64,
    within_bound: bool,
    semi_canonical: bool,
}

#[derive(Serialize)]
struct AllocReport {
    n: usize,
    k: usize,
    max_degree: usize,
    tree_generator: &'static str,
    runs: usize,
    within_bound: usize,
    semi_canonical_violations: usize,
    worst_ratio: f64,
    rows: Vec<Row>,
}

pub fn run(ctx: &Ctx, a: &AllocArgs) -> CliResult<Outcome> {
    let k = a.k.unwrap_or(ctx.params.k);
    let rows: Vec<Row> = (0..a.runs)
        .into_par_iter()
        .map(|i| -> CliResult<Row> {
            let t = input::tree(a.n, Some(a.max_degree), instance_seed(ctx.seed, i, 1))?;
            let al = allocate(&t, t.root(), k, instance_seed(ctx.seed, i, 2))?;
            let loads = al.loads();
            let max_load = *loads.iter().max().unwrap();
            let max_ratio = max_load as f64 * k as f64 / a.n as f64;
            Ok(Row {
                instance: i,
                max_load,
                min_load: *loads.iter().min().unwrap(),
                max_ratio,
                within_bound: max_ratio <= a.load_bound + 1e-12,
                semi_canonical: is_semi_canonical(&t, &al).is_ok(),
            })
        })
        .collect::<CliResult<_>>()?;
    if let Some(p) = &a.csv {
        write_csv(p, &rows)?;
    }
    let within = rows.iter().filter(|r| r.within_bound).count();
    let violations = rows.iter().filter(|r| !r.semi_canonical).count();
    let worst = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let lines = vec![
        format!("{within} / {} runs with max load <= {}·n/k (worst {worst:.4})", a.runs, a.load_bound),
        format!("{violations} semi-canonicity violations"),
    ];
    let report = AllocReport {
        n: a.n,
        k,
        max_degree: a.max_degree,
        tree_generator: TREE_GENERATOR,
        runs: a.runs,
        within_bound: within,
        semi_canonical_violations: violations,
        worst_ratio: worst,
        rows,
    };
    Outcome::new(report, violations == 0, lines)
}

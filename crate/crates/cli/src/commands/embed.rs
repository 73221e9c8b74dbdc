use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use tourney_core::allocate::{check_root_vertex, embed_bounded_tree_in_cycle};
use tourney_core::digraph::generate::{gen_cluster_cycle, TREE_GENERATOR};
use tourney_core::digraph::{validate_embedding, DirectedTree, Embedding, Tournament};
use tourney_core::exact::{find_embedding, EmbedRequest, SearchOutcome};
use tourney_core::num::{floor, round_half_up};
use tourney_core::pipeline::embed_main;
use tourney_core::Error;

use super::instance_seed;
use crate::input::{self, Family};
use crate::output::{write_csv, CliError, CliResult, Ctx, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedMode {
    /// Decompose the host and route the tree (expander, almost-transitive or split).
    Main,
    /// Allocate-then-embed into a generated cluster cycle.
    Bounded,
    /// Backtracking search.
    Exact,
}

#[derive(Args)]
pub struct EmbedArgs {
    #[arg(long, value_enum, default_value_t = EmbedMode::Main)]
    mode: EmbedMode,
    /// Tree file; otherwise random trees of --n vertices.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Host file; otherwise hosts from --family (main, exact) or a cluster cycle (bounded).
    #[arg(long)]
    host: Option<PathBuf>,
    /// Tree size of generated trees (bounded default: floor(k·m/(1+alpha))).
    #[arg(long)]
    n: Option<usize>,
    /// Maximum degree of generated trees; 0 means uncapped.
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, value_enum, default_value_t = Family::Random)]
    family: Family,
    /// Generated host size (default: round(2.6·n)).
    #[arg(long)]
    host_size: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    flip: f64,
    /// Bounded mode: clusters, cluster size, forward density, padding.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pad: f64,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Exit 1 when the success rate falls below this.
    #[arg(long)]
    min_rate: Option<f64>,
    /// Include each run's full route report.
    #[arg(long)]
    reports: bool,
    /// Include the embedding map of each success.
    #[arg(long)]
    print_embedding: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    instance: usize,
    tree_size: usize,
    host_size: usize,
    ok: bool,
    valid: Option<bool>,
    route: Option<String>,
    attempts: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Run {
    #[serde(flatten)]
    row: Row,
    report: Option<Value>,
    embedding: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct EmbedReport {
    mode: EmbedMode,
    tree_generator: &'static str,
    runs: usize,
    successes: usize,
    invalid: usize,
    violations: usize,
    success_rate: f64,
    results: Vec<Run>,
}

struct Done {
    embedding: Embedding,
    route: String,
    attempts: usize,
    report: Value,
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn one(ctx: &Ctx, a: &EmbedArgs, i: usize) -> CliResult<Run> {
    let p = &ctx.params;
    let cap = (a.max_degree > 0).then_some(a.max_degree);
    let tree_of = |default: Option<usize>| -> CliResult<DirectedTree> {
        match (&a.tree, a.n.or(default)) {
            (Some(f), _) => input::read_tree(f),
            (None, Some(n)) => input::tree(n, cap, instance_seed(ctx.seed, i, 1)),
            _ => Err(CliError::Usage("need --tree or --n".into())),
        }
    };
    let host_for = |t: &DirectedTree| -> CliResult<Tournament> {
        match &a.host {
            Some(f) => input::read_host(f),
            None => input::host(a.family, a.host_size.unwrap_or(round_half_up(2.6 * t.n() as f64)), a.flip, instance_seed(ctx.seed, i, 2)),
        }
    };
    let seed = instance_seed(ctx.seed, i, 3);
    let (t, g, res): (DirectedTree, Tournament, Result<Done, Error>) = match a.mode {
        EmbedMode::Main => {
            let t = tree_of(None)?;
            let g = host_for(&t)?;
            let r = embed_main(&t, &g, p, seed).map(|e| Done {
                route: format!("{:?}", e.report.route).to_lowercase(),
                attempts: e.report.attempts,
                report: to_value(&e.report),
                embedding: e.embedding,
            });
            (t, g, r)
        }
        EmbedMode::Exact => {
            let t = tree_of(None)?;
            let g = host_for(&t)?;
            let req = EmbedRequest { node_limit: Some(p.node_limit), ..Default::default() };
            let r = find_embedding(&t, &g, &req).and_then(|o| match o {
                SearchOutcome::Found(e) => Ok(Done { embedding: e, route: "exact".into(), attempts: 1, report: Value::Null }),
                other => Err(Error::EmbedFailed { step: "search".into(), reason: other.label().into() }),
            });
            (t, g, r)
        }
        EmbedMode::Bounded => {
            let (k, m, d) = (a.k.unwrap_or(p.k), a.m.unwrap_or(p.m), a.d.unwrap_or(p.d));
            let (g, cycle) = gen_cluster_cycle(k, m, d, a.pad, instance_seed(ctx.seed, i, 2))?;
            let ep = p.embed_params()?;
            let t = tree_of(Some(floor(k as f64 * cycle.m() as f64 / (1.0 + p.alpha))))?;
            let root = cycle.cluster(0).iter().copied().find(|&v| check_root_vertex(&g, &cycle, v, &ep).is_ok());
            let r = match root {
                None => Err(Error::EmbedFailed { step: "root".into(), reason: "no vertex of the first cluster qualifies".into() }),
                Some(v) => embed_bounded_tree_in_cycle(&g, &t, &cycle, v, p.cycle_retries, &ep, seed).map(|e| Done {
                    route: "bounded".into(),
                    attempts: e.attempts,
                    report: serde_json::json!({ "root_vertex": v, "cluster_size": cycle.m(), "loads": e.allocation.loads() }),
                    embedding: e.embedding,
                }),
            };
            (t, g, r)
        }
    };
    let mut row = Row { instance: i, tree_size: t.n(), host_size: g.n(), ok: false, valid: None, route: None, attempts: None, error: None };
    let (mut report, mut embedding) = (None, None);
    match res {
        Ok(done) => {
            let valid = validate_embedding(&t, &g, &done.embedding).is_ok();
            row.ok = valid;
            row.valid = Some(valid);
            row.route = Some(done.route);
            row.attempts = Some(done.attempts);
            report = a.reports.then_some(done.report);
            embedding = a.print_embedding.then(|| done.embedding.total());
        }
        Err(Error::BoundViolated(m)) => {
            row.error = Some(format!("bound violated: {m}"));
            row.valid = Some(false);
        }
        Err(e @ (Error::InvalidArgument(_) | Error::Parse(_))) => return Err(e.into()),
        Err(e) => row.error = Some(e.to_string()),
    }
    Ok(Run { row, report, embedding })
}

pub fn run(ctx: &Ctx, a: &EmbedArgs) -> CliResult<Outcome> {
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    let results: Vec<Run> = (0..a.runs).into_par_iter().map(|i| one(ctx, a, i)).collect::<CliResult<_>>()?;
    if let Some(p) = &a.csv {
        write_csv(p, &results.iter().map(|r| &r.row).collect::<Vec<_>>())?;
    }
    let successes = results.iter().filter(|r| r.row.ok).count();
    let invalid = results.iter().filter(|r| r.row.valid == Some(false) && r.row.route.is_some()).count();
    let violations = results.iter().filter(|r| r.row.valid == Some(false)).count();
    let rate = successes as f64 / a.runs as f64;
    let ok = violations == 0 && a.min_rate.is_none_or(|m| rate + 1e-12 >= m);
    let mut lines = vec![format!("{successes} / {} embeddings succeeded ({:.1}%), {violations} invalid or bound violations", a.runs, 100.0 * rate)];
    for r in results.iter().filter(|r| r.row.error.is_some()).take(5) {
        lines.push(format!("instance {}: {}", r.row.instance, r.row.error.as_deref().unwrap_or("")));
    }
    let report = EmbedReport {
        mode: a.mode,
        tree_generator: TREE_GENERATOR,
        runs: a.runs,
        successes,
        invalid,
        violations,
        success_rate: rate,
        results,
    };
    Outcome::new(report, ok, lines)
}

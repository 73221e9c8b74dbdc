use clap::{Args, Subcommand};
use serde_json::json;
use tourney_core::digraph::formats::{TournamentJson, TreeJson};
use tourney_core::digraph::generate::{gen_broom, gen_cluster_cycle, TREE_GENERATOR};

use crate::input::{self, Family};
use crate::output::{CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct GenArgs {
    #[command(subcommand)]
    what: What,
}

#[derive(Subcommand)]
enum What {
    Tournament {
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Flip probability of the almost-transitive family.
        #[arg(long, default_value_t = 0.01)]
        flip: f64,
    },
    /// Random tree: uniform attachment to a vertex with spare degree, fair-coin orientations.
    Tree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: Option<usize>,
        /// A directed-broom shape: a spine of n - leaves vertices with that many leaves on vertex 0.
        #[arg(long)]
        broom_leaves: Option<usize>,
    },
    /// Random cluster cycle with forward density d between consecutive clusters.
    Cycle {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        d: Option<f64>,
        /// Cluster padding: clusters hold round(m(1 + pad)) vertices (default alpha).
        #[arg(long)]
        pad: Option<f64>,
    },
}

pub fn run(ctx: &Ctx, a: &GenArgs) -> CliResult<Outcome> {
    let p = &ctx.params;
    match &a.what {
        What::Tournament { family, n, flip } => {
            let g = input::host(*family, *n, *flip, ctx.seed)?;
            Outcome::new(
                json!({ "family": family, "tournament": TournamentJson::from(&g) }),
                true,
                vec![format!("tournament on {n} vertices ({family:?})")],
            )
        }
        What::Tree { n, max_degree, broom_leaves } => {
            let t = match broom_leaves {
                Some(l) if l < n => gen_broom(n - l, *l, ctx.seed),
                Some(l) => return Err(crate::output::CliError::Usage(format!("broom needs fewer than n = {n} leaves, got {l}"))),
                None => input::tree(*n, *max_degree, ctx.seed)?,
            };
            let generator = if broom_leaves.is_some() { "broom" } else { TREE_GENERATOR };
            Outcome::new(
                json!({ "generator": generator, "max_degree": t.max_degree(), "tree": TreeJson::from(&t) }),
                true,
                vec![format!("tree on {n} vertices, max degree {}", t.max_degree())],
            )
        }
        What::Cycle { k, m, d, pad } => {
            let (k, m, d, pad) = (k.unwrap_or(p.k), m.unwrap_or(p.m), d.unwrap_or(p.d), pad.unwrap_or(p.alpha));
            let (g, cycle) = gen_cluster_cycle(k, m, d, pad, ctx.seed)?;
            Outcome::new(
                json!({ "tournament": TournamentJson::from(&g), "cycle": cycle }),
                true,
                vec![format!("cluster cycle: {k} clusters of {}", cycle.m())],
            )
        }
    }
}

//! Reading hosts and trees from files, or generating them by family.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use tourney_core::digraph::formats::{tournament_from_edge_list, tournament_from_json, tree_from_edge_list, tree_from_json};
use tourney_core::digraph::generate::{
    gen_almost_transitive, gen_random_tournament, gen_random_tree, gen_rotational_tournament, gen_transitive_tournament,
    gen_two_block,
};
use tourney_core::digraph::{DirectedTree, Tournament};

use crate::output::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Random,
    Transitive,
    Rotational,
    /// A random block on the first half beating a transitive block.
    TwoBlock,
    /// Transitive with each arc flipped with probability `--flip`.
    AlmostTransitive,
}

pub fn host(family: Family, n: usize, flip: f64, seed: u64) -> CliResult<Tournament> {
    Ok(match family {
        Family::Random => gen_random_tournament(n, seed),
        Family::Transitive => gen_transitive_tournament(n),
        Family::Rotational => gen_rotational_tournament(n)?,
        Family::TwoBlock => gen_two_block(n / 2, n - n / 2, seed),
        Family::AlmostTransitive => gen_almost_transitive(n, flip, seed)?.0,
    })
}

pub fn tree(n: usize, max_degree: Option<usize>, seed: u64) -> CliResult<DirectedTree> {
    Ok(gen_random_tree(n, max_degree, seed)?)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// Reads a JSON file, unwrapping a report written by `gen` to its result
/// (or the `key` field of it) so generated files load directly.
pub fn read_payload(path: &Path, key: Option<&str>) -> CliResult<String> {
    let s = read(path)?;
    let bad = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let v: Value = serde_json::from_str(&s).map_err(bad)?;
    let Some(result) = v.get("command").and(v.get("result")) else { return Ok(s) };
    let inner = key.and_then(|k| result.get(k)).unwrap_or(result);
    serde_json::to_string(inner).map_err(bad)
}

/// `.json` files hold `{n, arcs}` or a `gen tournament` report; anything
/// else is an edge list.
pub fn read_host(path: &Path) -> CliResult<Tournament> {
    Ok(if is_json(path) {
        tournament_from_json(&read_payload(path, Some("tournament"))?)?
    } else {
        tournament_from_edge_list(&read(path)?)?
    })
}

/// `.json` files hold `{n, root, edges}` or a `gen tree` report; anything
/// else is an edge list rooted at 0.
pub fn read_tree(path: &Path) -> CliResult<DirectedTree> {
    Ok(if is_json(path) { tree_from_json(&read_payload(path, Some("tree"))?)? } else { tree_from_edge_list(&read(path)?)? })
}

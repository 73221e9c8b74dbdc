use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::enumerate_directed_trees;
use super::search::{EmbedRequest, find_embedding, SearchOutcome};
use crate::digraph::formats::{TournamentJson, TreeJson};
use crate::digraph::generate::{gen_random_tournament, gen_random_tree, TREE_GENERATOR};
use crate::digraph::{validate_embedding, DirectedTree, Tournament};
use crate::error::{invalid, Result};
use crate::rng::derive;

pub const MAX_EXHAUSTIVE_HOST: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Mode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    /// Host mask (exhaustive) or pair index (sampled).
    pub instance: u64,
    pub outcome: String,
    pub host: TournamentJson,
    pub tree: TreeJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalityReport {
    pub host_size: usize,
    pub tree_size: usize,
    pub mode: Mode,
    pub trees: usize,
    pub hosts_checked: u64,
    pub pairs_checked: u64,
    pub limit_hits: u64,
    /// Hosts (by instance id) that missed at least one tree.
    pub failing_hosts: Vec<u64>,
    pub counterexamples: Vec<Counterexample>,
    /// Random-tree source, present when trees were sampled.
    pub tree_generator: Option<String>,
}

/// Tournament on `h` vertices whose pair `(u,v)`, `u < v`, in lexicographic
/// position `i` is oriented `u → v` iff bit `i` of `mask` is set.
pub fn tournament_from_mask(h: usize, mask: u64) -> Tournament {
    let mut bit = 0;
    Tournament::from_fn(h, |_, _| {
        let f = mask >> bit & 1 == 1;
        bit += 1;
        f
    })
}

struct Checked {
    instance: u64,
    failures: Vec<(usize, SearchOutcome)>,
}

fn check_host(g: &Tournament, trees: &[DirectedTree], instance: u64, limit: u64) -> Checked {
    let req = EmbedRequest {
        node_limit: Some(limit),
        ..Default::default()
    };
    let mut failures = Vec::new();
    for (i, t) in trees.iter().enumerate() {
        let out = find_embedding(t, g, &req).expect("unpinned search");
        match &out {
            SearchOutcome::Found(e) => {
                assert_eq!(validate_embedding(t, g, e), Ok(()), "search returned an invalid copy");
            }
            _ => failures.push((i, out)),
        }
    }
    Checked { instance, failures }
}

/// Runs the exact search for every (host, tree) pair over all trees on
/// `tree_size` vertices (up to isomorphism) or, in sample mode, over random
/// (tournament, tree) pairs.
pub fn verify_universality(host_size: usize, tree_size: usize, mode: Mode) -> Result<UniversalityReport> {
    match mode {
        Mode::Exhaustive => {
            let trees = enumerate_directed_trees(tree_size)?;
            verify_universality_with(host_size, &trees, mode, super::DEFAULT_NODE_LIMIT)
        }
        Mode::Sample { count, seed } => {
            if tree_size == 0 || host_size == 0 {
                return invalid("sizes must be positive");
            }
            let results: Vec<(Checked, Tournament, DirectedTree)> = (0..count)
                .into_par_iter()
                .map(|i| {
                    let g = gen_random_tournament(host_size, derive(seed, 2 * i));
                    let t = gen_random_tree(tree_size, None, derive(seed, 2 * i + 1)).expect("tree");
                    (check_host(&g, std::slice::from_ref(&t), i, super::DEFAULT_NODE_LIMIT), g, t)
                })
                .collect();
            let mut report = empty_report(host_size, tree_size, mode, 1);
            report.tree_generator = Some(TREE_GENERATOR.to_string());
            for (c, g, t) in results {
                report.hosts_checked += 1;
                report.pairs_checked += 1;
                merge(&mut report, c, &g, std::slice::from_ref(&t));
            }
            Ok(report)
        }
    }
}

fn empty_report(host_size: usize, tree_size: usize, mode: Mode, trees: usize) -> UniversalityReport {
    UniversalityReport {
        host_size,
        tree_size,
        mode,
        trees,
        hosts_checked: 0,
        pairs_checked: 0,
        limit_hits: 0,
        failing_hosts: Vec::new(),
        counterexamples: Vec::new(),
        tree_generator: None,
    }
}

fn merge(report: &mut UniversalityReport, c: Checked, g: &Tournament, trees: &[DirectedTree]) {
    if c.failures.is_empty() {
        return;
    }
    report.failing_hosts.push(c.instance);
    for (i, out) in c.failures {
        if out == SearchOutcome::LimitExceeded {
            report.limit_hits += 1;
        }
        report.counterexamples.push(Counterexample {
            instance: c.instance,
            outcome: out.label().to_string(),
            host: TournamentJson::from(g),
            tree: TreeJson::from(&trees[i]),
        });
    }
}

/// As [`verify_universality`] with an explicit tree list. Sample mode
/// draws `count` random hosts and checks every listed tree in each.
pub fn verify_universality_with(
    host_size: usize,
    trees: &[DirectedTree],
    mode: Mode,
    node_limit: u64,
) -> Result<UniversalityReport> {
    let tree_size = trees.first().map_or(0, DirectedTree::n);
    let mut report = empty_report(host_size, tree_size, mode, trees.len());
    let checked: Vec<Checked> = match mode {
        Mode::Exhaustive => {
            if host_size > MAX_EXHAUSTIVE_HOST {
                return invalid(format!(
                    "exhaustive mode supports hosts up to {MAX_EXHAUSTIVE_HOST} vertices, got {host_size}"
                ));
            }
            let hosts = 1u64 << (host_size * host_size.saturating_sub(1) / 2);
            report.hosts_checked = hosts;
            (0..hosts)
                .into_par_iter()
                .map(|mask| check_host(&tournament_from_mask(host_size, mask), trees, mask, node_limit))
                .filter(|c| !c.failures.is_empty())
                .collect()
        }
        Mode::Sample { count, seed } => {
            report.hosts_checked = count;
            (0..count)
                .into_par_iter()
                .map(|i| check_host(&gen_random_tournament(host_size, derive(seed, i)), trees, i, node_limit))
                .filter(|c| !c.failures.is_empty())
                .collect()
        }
    };
    report.pairs_checked = report.hosts_checked * trees.len() as u64;
    for c in checked {
        let g = match mode {
            Mode::Exhaustive => tournament_from_mask(host_size, c.instance),
            Mode::Sample { seed, .. } => gen_random_tournament(host_size, derive(seed, c.instance)),
        };
        merge(&mut report, c, &g, trees);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_enumerate_distinct_tournaments() {
        let all: std::collections::HashSet<Vec<(usize, usize)>> =
            (0..8).map(|m| tournament_from_mask(3, m).arcs()).collect();
        assert_eq!(all.len(), 8);
        assert!(tournament_from_mask(3, 0b111).has_arc(0, 2));
    }

    #[test]
    fn out_star_fails_exactly_on_regular_hosts() {
        let star = DirectedTree::star(3, true);
        let r = verify_universality_with(5, &[star], Mode::Exhaustive, 1_000_000).unwrap();
        assert_eq!(r.hosts_checked, 1024);
        let regular: Vec<u64> = (0..1024u64)
            .filter(|&m| {
                let g = tournament_from_mask(5, m);
                (0..5).all(|v| g.out_degree(v) == 2)
            })
            .collect();
        assert_eq!(regular.len(), 24);
        assert_eq!(r.failing_hosts, regular);
        assert_eq!(r.limit_hits, 0);
    }

    #[test]
    fn host_five_contains_trees_on_four_except_out_and_in_stars() {
        let r = verify_universality(5, 4, Mode::Exhaustive).unwrap();
        assert_eq!(r.trees, 8);
        assert!(r.counterexamples.iter().all(|c| c.outcome == "none"));
        assert!(!r.counterexamples.is_empty());
        assert!(verify_universality(7, 4, Mode::Exhaustive).is_err());
    }
}

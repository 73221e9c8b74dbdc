//! JSON and plain edge-list encodings.
//!
//! Tournament: `{"n": 3, "arcs": [[0,1],[1,2],[2,0]]}`.
//! Tree: `{"n": 3, "root": 0, "edges": [[0,1,"down"],[1,2,"up"]]}` where
//! `down` means parent → child.
//! Edge list: one `u v` arc per line; `#` starts a comment; an optional
//! `n <count>` line fixes the vertex count.

use serde::{Deserialize, Serialize};

use super::{Dir, DirectedTree, Tournament};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TournamentJson {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub root: usize,
    pub edges: Vec<(usize, usize, Dir)>,
}

impl From<&Tournament> for TournamentJson {
    fn from(g: &Tournament) -> Self {
        TournamentJson {
            n: g.n(),
            arcs: g.arcs(),
        }
    }
}

impl TryFrom<TournamentJson> for Tournament {
    type Error = Error;
    fn try_from(j: TournamentJson) -> Result<Self> {
        Tournament::from_arcs(j.n, &j.arcs)
    }
}

impl From<&DirectedTree> for TreeJson {
    fn from(t: &DirectedTree) -> Self {
        let edges = (0..t.n())
            .filter_map(|v| {
                t.parent(v)
                    .map(|p| (p, v, if t.is_down(v) { Dir::Down } else { Dir::Up }))
            })
            .collect();
        TreeJson {
            n: t.n(),
            root: t.root(),
            edges,
        }
    }
}

impl TryFrom<TreeJson> for DirectedTree {
    type Error = Error;
    fn try_from(j: TreeJson) -> Result<Self> {
        let arcs: Vec<_> = j
            .edges
            .iter()
            .map(|&(p, c, d)| if d == Dir::Down { (p, c) } else { (c, p) })
            .collect();
        let t = DirectedTree::from_arcs(j.n, &arcs, j.root)?;
        for &(p, c, _) in &j.edges {
            if t.parent(c) != Some(p) {
                return Err(Error::Parse(format!("edge ({p},{c}) is not parent-to-child")));
            }
        }
        Ok(t)
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn tournament_to_json(g: &Tournament) -> String {
    serde_json::to_string(&TournamentJson::from(g)).expect("serializable")
}

pub fn tournament_from_json(s: &str) -> Result<Tournament> {
    serde_json::from_str::<TournamentJson>(s).map_err(parse_err)?.try_into()
}

pub fn tree_to_json(t: &DirectedTree) -> String {
    serde_json::to_string(&TreeJson::from(t)).expect("serializable")
}

pub fn tree_from_json(s: &str) -> Result<DirectedTree> {
    serde_json::from_str::<TreeJson>(s).map_err(parse_err)?.try_into()
}

pub fn arcs_to_edge_list(n: usize, arcs: &[(usize, usize)]) -> String {
    let mut s = format!("n {n}\n");
    for (u, v) in arcs {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// Parses an edge list into `(n, arcs)`.
pub fn parse_edge_list(s: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut n = None;
    let mut arcs = Vec::new();
    for (lineno, line) in s.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {}: bad integer {f:?}", lineno + 1)))
        };
        match fields.as_slice() {
            ["n", c] => n = Some(num(c)?),
            [u, v] => arcs.push((num(u)?, num(v)?)),
            _ => return Err(Error::Parse(format!("line {}: expected two fields", lineno + 1))),
        }
    }
    let seen = arcs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    Ok((n.unwrap_or(seen.max(1)), arcs))
}

pub fn tournament_from_edge_list(s: &str) -> Result<Tournament> {
    let (n, arcs) = parse_edge_list(s)?;
    Tournament::from_arcs(n, &arcs)
}

/// Trees read from an edge list are rooted at vertex 0.
pub fn tree_from_edge_list(s: &str) -> Result<DirectedTree> {
    let (n, arcs) = parse_edge_list(s)?;
    DirectedTree::from_arcs(n, &arcs, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_random_tournament, gen_random_tree};

    #[test]
    fn json_round_trips() {
        let g = gen_random_tournament(9, 2);
        assert_eq!(tournament_from_json(&tournament_to_json(&g)).unwrap(), g);
        let t = gen_random_tree(30, Some(4), 2).unwrap();
        assert_eq!(tree_from_json(&tree_to_json(&t)).unwrap(), t);
        let small = DirectedTree::path(&[true, false]);
        assert_eq!(
            tree_to_json(&small),
            r#"{"n":3,"root":0,"edges":[[0,1,"down"],[1,2,"up"]]}"#
        );
    }

    #[test]
    fn edge_list_round_trips() {
        let g = gen_random_tournament(7, 3);
        let text = arcs_to_edge_list(7, &g.arcs());
        assert_eq!(tournament_from_edge_list(&text).unwrap(), g);
        let t = tree_from_edge_list("# a path\n0 1\n2 1\n").unwrap();
        assert_eq!(t.arc_between(2, 1), Some(true));
        assert!(parse_edge_list("0 x").is_err());
    }
}

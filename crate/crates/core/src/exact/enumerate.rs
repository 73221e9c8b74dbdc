use std::collections::HashSet;

use crate::digraph::DirectedTree;
use crate::error::{invalid, Result};

pub const MAX_ENUMERATE: usize = 10;

const OPEN: u8 = 0;
const CLOSE: u8 = 1;
const DOWN: u8 = 2;
const UP: u8 = 3;

/// Adjacency with arc flags: `(neighbour, true if v → neighbour)`.
fn adjacency(t: &DirectedTree) -> Vec<Vec<(usize, bool)>> {
    let mut adj = vec![Vec::new(); t.n()];
    for (a, b) in t.arcs() {
        adj[a].push((b, true));
        adj[b].push((a, false));
    }
    adj
}

fn rooted_code(adj: &[Vec<(usize, bool)>], v: usize, parent: usize) -> Vec<u8> {
    let mut kids: Vec<Vec<u8>> = adj[v]
        .iter()
        .filter(|&&(u, _)| u != parent)
        .map(|&(u, out)| {
            let mut c = vec![if out { DOWN } else { UP }];
            c.extend(rooted_code(adj, u, v));
            c
        })
        .collect();
    kids.sort_unstable();
    let mut code = vec![OPEN];
    for k in kids {
        code.extend(k);
    }
    code.push(CLOSE);
    code
}

/// Rooted canonical encoding with direction flags, minimised over roots.
/// Two oriented trees are isomorphic iff their codes agree.
pub fn canonical_code(t: &DirectedTree) -> Vec<u8> {
    let adj = adjacency(t);
    (0..t.n())
        .map(|r| rooted_code(&adj, r, usize::MAX))
        .min()
        .unwrap()
}

/// One representative of each isomorphism class of oriented trees on `n`
/// vertices, sorted by canonical code. Built by attaching a leaf in every
/// position and direction to the classes on `n − 1` vertices.
pub fn enumerate_directed_trees(n: usize) -> Result<Vec<DirectedTree>> {
    if n == 0 || n > MAX_ENUMERATE {
        return invalid(format!("enumeration supports 1 <= n <= {MAX_ENUMERATE}, got {n}"));
    }
    let mut level = vec![DirectedTree::single()];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next: Vec<(Vec<u8>, DirectedTree)> = Vec::new();
        for t in &level {
            let arcs = t.arcs();
            for v in 0..t.n() {
                for out in [true, false] {
                    let mut a = arcs.clone();
                    a.push(if out { (v, size - 1) } else { (size - 1, v) });
                    let grown = DirectedTree::from_arcs(size, &a, 0).expect("leaf attachment");
                    let code = canonical_code(&grown);
                    if seen.insert(code.clone()) {
                        next.push((code, grown));
                    }
                }
            }
        }
        next.sort_by(|a, b| a.0.cmp(&b.0));
        level = next.into_iter().map(|p| p.1).collect();
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Labelled trees from Prüfer sequences.
    fn labelled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
        if n == 1 {
            return vec![vec![]];
        }
        if n == 2 {
            return vec![vec![(0, 1)]];
        }
        let mut out = Vec::new();
        let total = n.pow((n - 2) as u32);
        for mut code in 0..total {
            let mut seq = Vec::new();
            for _ in 0..n - 2 {
                seq.push(code % n);
                code /= n;
            }
            let mut degree = vec![1; n];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::new();
            for &s in &seq {
                let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
                edges.push((leaf, s));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            out.push(edges);
        }
        out
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Independent canonical form: lexicographically least sorted arc list
    /// over all relabellings.
    fn brute_count(n: usize) -> usize {
        let perms = permutations(n);
        let mut classes = HashSet::new();
        for edges in labelled_trees(n) {
            for mask in 0..(1u32 << edges.len()) {
                let arcs: Vec<(usize, usize)> = edges
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if mask >> i & 1 == 1 { (a, b) } else { (b, a) })
                    .collect();
                let best = perms
                    .iter()
                    .map(|p| {
                        let mut r: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (p[a], p[b])).collect();
                        r.sort_unstable();
                        r
                    })
                    .min()
                    .unwrap();
                classes.insert(best);
            }
        }
        classes.len()
    }

    #[test]
    fn counts_match_brute_force() {
        let expected: Vec<usize> = (1..=5).map(brute_count).collect();
        assert_eq!(expected, vec![1, 1, 3, 8, 27]);
        for n in 1..=5 {
            assert_eq!(enumerate_directed_trees(n).unwrap().len(), expected[n - 1], "n={n}");
        }
    }

    #[test]
    fn canonical_code_ignores_labels() {
        let a = DirectedTree::from_arcs(4, &[(0, 1), (2, 1), (1, 3)], 0).unwrap();
        let b = DirectedTree::from_arcs(4, &[(3, 0), (2, 0), (0, 1)], 1).unwrap();
        assert_eq!(canonical_code(&a), canonical_code(&b));
        let c = DirectedTree::from_arcs(4, &[(0, 1), (1, 2), (1, 3)], 0).unwrap();
        assert_ne!(canonical_code(&a), canonical_code(&c));
        assert!(enumerate_directed_trees(11).is_err());
        assert!(enumerate_directed_trees(0).is_err());
    }
}

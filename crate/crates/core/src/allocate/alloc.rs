use rand::Rng;
use serde::Serialize;

use crate::digraph::DirectedTree;
use crate::error::{invalid, precondition, Result};
use crate::rng;
use crate::structure::contract;

/// Cluster index (0-based, mod `k`) of every tree vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Allocation {
    pub root: usize,
    pub k: usize,
    pub cluster: Vec<usize>,
}

impl Allocation {
    /// Number of tree vertices per cluster.
    pub fn loads(&self) -> Vec<usize> {
        let mut l = vec![0; self.k];
        for &c in &self.cluster {
            l[c] += 1;
        }
        l
    }

    /// Whether the arc `a → b` goes from some cluster to the next one.
    pub fn is_canonical_arc(&self, a: usize, b: usize) -> bool {
        self.cluster[b] == (self.cluster[a] + 1) % self.k
    }
}

/// Runs the allocation over a BFS order from `root`. `stay(v)` is consulted
/// for vertices at even positive distance and returns `true` to put `v` in
/// its parent's cluster.
pub fn allocate_with(
    t: &DirectedTree,
    root: usize,
    k: usize,
    mut stay: impl FnMut(usize) -> bool,
) -> Result<Allocation> {
    if k < 3 {
        return invalid(format!("allocation needs k >= 3, got {k}"));
    }
    if root >= t.n() {
        return invalid("root out of range");
    }
    let r = t.rerooted(root);
    let mut cluster = vec![0usize; t.n()];
    let mut depth = vec![0usize; t.n()];
    for v in r.preorder() {
        let Some(p) = r.parent(v) else { continue };
        depth[v] = depth[p] + 1;
        let canonical = if r.is_down(v) { (cluster[p] + 1) % k } else { (cluster[p] + k - 1) % k };
        cluster[v] = if depth[v].is_multiple_of(2) && stay(v) { cluster[p] } else { canonical };
    }
    Ok(Allocation { root, k, cluster })
}

/// The randomized allocation: each even-distance coin is fair.
pub fn allocate(t: &DirectedTree, root: usize, k: usize, seed: u64) -> Result<Allocation> {
    let mut r = rng::stream(seed, 0xa11c);
    allocate_with(t, root, k, |_| r.gen_bool(0.5))
}

/// Every vertex canonically placed relative to its parent.
pub fn canonical_allocation(t: &DirectedTree, root: usize, k: usize) -> Result<Allocation> {
    allocate_with(t, root, k, |_| false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SemiCanonicalViolation {
    /// Clause (i): an edge neither canonical nor within a cluster.
    Edge(usize, usize),
    /// Clause (ii): a root edge allocated within a cluster.
    RootEdge(usize, usize),
    /// Clause (iii): a within-cluster component larger than `Δ(T)`.
    Component(Vec<usize>),
}

/// Components of the within-cluster edges.
fn within_components(t: &DirectedTree, alloc: &Allocation) -> Vec<Vec<usize>> {
    let same: Vec<bool> = (0..t.n())
        .map(|v| t.parent(v).is_some_and(|p| alloc.cluster[p] == alloc.cluster[v]))
        .collect();
    let mut comp = vec![usize::MAX; t.n()];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for v in t.preorder() {
        if t.parent(v).is_some() && same[v] {
            let c = comp[t.parent(v).unwrap()];
            comp[v] = c;
            out[c].push(v);
        } else {
            comp[v] = out.len();
            out.push(vec![v]);
        }
    }
    out
}

pub fn is_semi_canonical(t: &DirectedTree, alloc: &Allocation) -> std::result::Result<(), SemiCanonicalViolation> {
    for (a, b) in t.arcs() {
        let within = alloc.cluster[a] == alloc.cluster[b];
        if !within && !alloc.is_canonical_arc(a, b) {
            return Err(SemiCanonicalViolation::Edge(a, b));
        }
        if within && (a == alloc.root || b == alloc.root) {
            return Err(SemiCanonicalViolation::RootEdge(a, b));
        }
    }
    let cap = t.max_degree().max(1);
    match within_components(t, alloc).into_iter().find(|c| c.len() > cap) {
        Some(c) => Err(SemiCanonicalViolation::Component(c)),
        None => Ok(()),
    }
}

/// `T` with every within-cluster component contracted. Part 0 holds the
/// root; each part lists first its vertex nearest the root.
#[derive(Clone, Debug)]
pub struct CanonicalTree {
    pub tree: DirectedTree,
    pub members: Vec<Vec<usize>>,
    pub part_of: Vec<usize>,
}

pub fn canonical_tree(t: &DirectedTree, alloc: &Allocation) -> Result<CanonicalTree> {
    if let Err(v) = is_semi_canonical(t, alloc) {
        return precondition(format!("allocation is not semi-canonical: {v:?}"));
    }
    let rt = t.rerooted(alloc.root);
    let members = within_components(&rt, alloc);
    let c = contract(t, &members, &[0])?;
    Ok(CanonicalTree {
        tree: c.tree,
        members,
        part_of: c.part_of,
    })
}

/// `P(X ≡ r mod k)` for `X ~ Bin(n, p)`, by dynamic programming over the
/// trials.
pub fn binom_mod_k_exact(n: usize, p: f64, k: usize) -> Result<Vec<f64>> {
    if k < 2 || !(p > 0.0 && p < 1.0) {
        return invalid("need k >= 2 and 0 < p < 1");
    }
    let mut dist = vec![0.0; k];
    dist[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0; k];
        for r in 0..k {
            next[r] += (1.0 - p) * dist[r];
            next[(r + 1) % k] += p * dist[r];
        }
        dist = next;
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::gen_random_tree;

    #[test]
    fn forced_canonical_path() {
        let t = DirectedTree::directed_path(3);
        let a = allocate_with(&t, 0, 5, |_| false).unwrap();
        assert_eq!(a.cluster, vec![0, 1, 2]);
        assert_eq!(is_semi_canonical(&t, &a), Ok(()));
        let ct = canonical_tree(&t, &a).unwrap();
        assert_eq!(ct.tree.n(), 3);
        assert!(allocate(&t, 0, 2, 0).is_err());
    }

    #[test]
    fn semi_canonical_violations() {
        let t = DirectedTree::directed_path(4);
        let bad_root = Allocation { root: 0, k: 4, cluster: vec![0, 0, 1, 2] };
        assert!(matches!(is_semi_canonical(&t, &bad_root), Err(SemiCanonicalViolation::RootEdge(0, 1))));
        let bad_edge = Allocation { root: 0, k: 4, cluster: vec![0, 1, 3, 0] };
        assert!(matches!(is_semi_canonical(&t, &bad_edge), Err(SemiCanonicalViolation::Edge(1, 2))));
        // path of max degree 2 with a within-cluster component of 3 vertices
        let big = Allocation { root: 0, k: 4, cluster: vec![0, 1, 1, 1] };
        assert_eq!(
            is_semi_canonical(&t, &big),
            Err(SemiCanonicalViolation::Component(vec![1, 2, 3]))
        );
        let one = Allocation { root: 0, k: 4, cluster: vec![0, 1, 1, 2] };
        assert_eq!(is_semi_canonical(&t, &one), Ok(()));
        assert_eq!(canonical_tree(&t, &one).unwrap().tree.n(), 3);
    }

    #[test]
    fn random_allocations_are_semi_canonical() {
        for seed in 0..200 {
            let t = gen_random_tree(1 + seed as usize % 80, None, seed).unwrap();
            let root = seed as usize % t.n();
            let a = allocate(&t, root, 3 + seed as usize % 5, seed).unwrap();
            assert_eq!(a.cluster[root], 0);
            assert_eq!(is_semi_canonical(&t, &a), Ok(()));
            let ct = canonical_tree(&t, &a).unwrap();
            assert_eq!(ct.members.iter().map(Vec::len).sum::<usize>(), t.n());
            assert!(ct.members[0] == vec![root]);
            for (i, m) in ct.members.iter().enumerate() {
                assert!(m.iter().all(|&v| ct.part_of[v] == i && a.cluster[v] == a.cluster[m[0]]));
            }
        }
    }

    /// `Σ_{i ≡ r} C(n, i)` by Pascal's rule.
    fn residue_counts(n: usize, k: usize) -> Vec<u128> {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        let mut out = vec![0u128; k];
        for (i, c) in row.into_iter().enumerate() {
            out[i % k] += c;
        }
        out
    }

    #[test]
    fn binomial_residues() {
        let p = binom_mod_k_exact(12, 0.5, 3).unwrap();
        assert_eq!(residue_counts(12, 3)[0], 1366);
        assert_eq!(p[0], 1366.0 / 4096.0);
        assert_eq!(binom_mod_k_exact(0, 0.3, 4).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        for k in 3usize..=8 {
            let n = (k * k * k).div_ceil(6);
            let probs = binom_mod_k_exact(n, 0.5, k).unwrap();
            let counts = residue_counts(n, k);
            let total = 2f64.powi(n as i32);
            for r in 0..k {
                assert!((probs[r] - counts[r] as f64 / total).abs() < 1e-12);
                assert!((probs[r] * k as f64 - 1.0).abs() < 0.2);
                assert!((probs[r] - probs[(n + k - r % k) % k]).abs() < 1e-12);
            }
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

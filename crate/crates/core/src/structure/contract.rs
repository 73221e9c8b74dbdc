use crate::digraph::DirectedTree;
use crate::error::{invalid, Result};

/// A tree whose vertices are the parts of a partition of `T` into
/// subtrees.
#[derive(Clone, Debug)]
pub struct Contracted {
    pub tree: DirectedTree,
    pub part_of: Vec<usize>,
    /// Parts in processing order: the caller's prefix, then an ancestral
    /// order of the rest.
    pub order: Vec<usize>,
}

/// Contracts each part to a vertex. `prefix` lists parts to place first;
/// every part then has at most `prefix.len()` earlier neighbours (one if
/// the prefix is empty).
pub fn contract(t: &DirectedTree, parts: &[Vec<usize>], prefix: &[usize]) -> Result<Contracted> {
    let n = t.n();
    let mut part_of = vec![usize::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for &v in p {
            if v >= n || part_of[v] != usize::MAX {
                return invalid(format!("vertex {v} missing from range or in two parts"));
            }
            part_of[v] = i;
        }
    }
    if part_of.contains(&usize::MAX) {
        return invalid("parts do not cover the tree");
    }
    let mut arcs = Vec::new();
    for (a, b) in t.arcs() {
        let (pa, pb) = (part_of[a], part_of[b]);
        if pa != pb {
            arcs.push((pa, pb));
        }
    }
    if arcs.len() + 1 != parts.len() {
        return invalid("a part does not induce a connected subtree");
    }
    let start = prefix.first().copied().unwrap_or(0);
    let tree = DirectedTree::from_arcs(parts.len(), &arcs, start)
        .map_err(|_| crate::Error::InvalidArgument("a part does not induce a connected subtree".into()))?;
    let mut placed = vec![false; parts.len()];
    let mut order = Vec::with_capacity(parts.len());
    for &p in prefix {
        if p >= parts.len() || placed[p] {
            return invalid("bad prefix");
        }
        placed[p] = true;
        order.push(p);
    }
    for p in tree.preorder() {
        if !placed[p] {
            order.push(p);
        }
    }
    Ok(Contracted { tree, part_of, order })
}

impl Contracted {
    /// Largest number of neighbours preceding a part in `order`.
    pub fn max_preceding(&self) -> usize {
        let mut pos = vec![0; self.order.len()];
        for (i, &p) in self.order.iter().enumerate() {
            pos[p] = i;
        }
        (0..self.order.len())
            .map(|p| self.tree.neighbours(p).filter(|&q| pos[q] < pos[p]).count())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singletons_and_halves() {
        let t = DirectedTree::path(&[true, false, true, false, true]);
        let singles: Vec<Vec<usize>> = (0..6).map(|v| vec![v]).collect();
        let c = contract(&t, &singles, &[]).unwrap();
        assert_eq!(c.tree.arcs(), t.arcs());
        let halves = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let c = contract(&t, &halves, &[1]).unwrap();
        assert_eq!(c.tree.n(), 2);
        assert_eq!(c.tree.arc_between(0, 1), Some(true));
        assert_eq!(c.order, vec![1, 0]);
        assert!(contract(&t, &[vec![0, 2], vec![1, 3, 4, 5]], &[]).is_err());
    }
}

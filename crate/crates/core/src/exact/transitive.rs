use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::digraph::{DirectedTree, Embedding};
use crate::error::{invalid, Result};

/// Maps the `r`-th vertex of a topological order of `t` (smallest id first
/// among ready vertices) to `order[r]`. Valid whenever `order` lists a
/// transitive subtournament from its source end.
pub fn embed_in_transitive_order(t: &DirectedTree, order: &[usize]) -> Result<Embedding> {
    let n = t.n();
    if order.len() < n {
        return invalid(format!("order has {} vertices, tree has {n}", order.len()));
    }
    let mut indeg: Vec<usize> = (0..n).map(|v| t.in_degree(v)).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut map = vec![0; n];
    let mut rank = 0;
    while let Some(Reverse(x)) = ready.pop() {
        map[x] = order[rank];
        rank += 1;
        for y in t.neighbours(x) {
            if t.arc_between(x, y) == Some(true) {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.push(Reverse(y));
                }
            }
        }
    }
    Ok(Embedding::from_total(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::*;
    use crate::digraph::validate_embedding;

    #[test]
    fn paths_and_stars() {
        let g = gen_transitive_tournament(7);
        let order: Vec<usize> = (0..7).collect();
        let p = DirectedTree::directed_path(5);
        assert_eq!(embed_in_transitive_order(&p, &order).unwrap().total(), vec![0, 1, 2, 3, 4]);
        let s = DirectedTree::star(4, false);
        let e = embed_in_transitive_order(&s, &order).unwrap();
        assert_eq!(e.get(0), Some(4));
        let anti = DirectedTree::path(&[true, false, true, false]);
        let e = embed_in_transitive_order(&anti, &order).unwrap();
        assert_eq!(validate_embedding(&anti, &g, &e), Ok(()));
        assert!(embed_in_transitive_order(&anti, &order[..3]).is_err());
    }

    #[test]
    fn random_trees_into_shuffled_transitive_order() {
        for seed in 0..30 {
            let (g, _) = gen_almost_transitive(60, 0.0, seed).unwrap();
            let t = gen_random_tree(40, None, seed).unwrap();
            let order: Vec<usize> = (10..60).collect();
            let e = embed_in_transitive_order(&t, &order).unwrap();
            assert_eq!(validate_embedding(&t, &g, &e), Ok(()));
        }
    }
}

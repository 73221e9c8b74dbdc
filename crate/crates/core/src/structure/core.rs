use super::weights::edge_weights;
use crate::digraph::DirectedTree;
use crate::error::{invalid, Result};

/// Vertices all of whose incident edge weights are at most `(1 − 1/Δ)n`,
/// in increasing id order.
pub fn core_tree(t: &DirectedTree, delta: usize) -> Result<Vec<usize>> {
    if delta < 2 {
        return invalid(format!("core tree needs delta >= 2, got {delta}"));
    }
    let n = t.n();
    let w = edge_weights(t);
    Ok((0..n)
        .filter(|&v| t.neighbours(v).all(|u| w.weight(v, u) * delta <= (delta - 1) * n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cores() {
        let p = DirectedTree::path(&[true, false, true, true, false]);
        assert_eq!(core_tree(&p, 2).unwrap(), vec![2, 3]);
        let s = DirectedTree::star(5, false);
        assert_eq!(core_tree(&s, 2).unwrap(), vec![0]);
        assert_eq!(core_tree(&DirectedTree::single(), 3).unwrap(), vec![0]);
        assert!(core_tree(&s, 1).is_err());
    }
}

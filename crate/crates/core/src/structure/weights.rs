use crate::digraph::DirectedTree;

/// Edge weights `w_e(x)`: the number of vertices reached from `x` through
/// `e`, plus the per-vertex sums `w⁺(x)` and `w⁻(x)` over out- and in-edges.
#[derive(Clone, Debug)]
pub struct WeightTable {
    n: usize,
    parent: Vec<Option<usize>>,
    size: Vec<usize>,
    pub w_plus: Vec<usize>,
    pub w_minus: Vec<usize>,
}

impl WeightTable {
    /// `w_e(x)` for the edge between adjacent `x` and `y`.
    pub fn weight(&self, x: usize, y: usize) -> usize {
        if self.parent[y] == Some(x) {
            self.size[y]
        } else {
            debug_assert_eq!(self.parent[x], Some(y), "{x} and {y} are not adjacent");
            self.n - self.size[x]
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub fn edge_weights(t: &DirectedTree) -> WeightTable {
    let n = t.n();
    let size = t.subtree_sizes();
    let parent: Vec<_> = (0..n).map(|v| t.parent(v)).collect();
    let mut w_plus = vec![0; n];
    let mut w_minus = vec![0; n];
    for v in 0..n {
        if let Some(p) = parent[v] {
            let (below, above) = (size[v], n - size[v]);
            if t.is_down(v) {
                w_plus[p] += below;
                w_minus[v] += above;
            } else {
                w_minus[p] += below;
                w_plus[v] += above;
            }
        }
    }
    WeightTable {
        n,
        parent,
        size,
        w_plus,
        w_minus,
    }
}

/// `(w⁺(S), w⁻(S))` for a connected vertex set `S`: total size of the
/// components of `T − S` hanging off out-edges, respectively in-edges.
pub fn set_weights(t: &DirectedTree, table: &WeightTable, in_set: &[bool]) -> (usize, usize) {
    let mut plus = 0;
    let mut minus = 0;
    for x in 0..t.n() {
        if !in_set[x] {
            continue;
        }
        for y in t.neighbours(x) {
            if !in_set[y] {
                let w = table.weight(x, y);
                if t.arc_between(x, y) == Some(true) {
                    plus += w;
                } else {
                    minus += w;
                }
            }
        }
    }
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_star_weights() {
        let p = DirectedTree::directed_path(3);
        let w = edge_weights(&p);
        assert_eq!(w.weight(0, 1), 2);
        assert_eq!(w.weight(1, 0), 1);
        assert_eq!((w.w_plus[1], w.w_minus[1]), (1, 1));
        let s = DirectedTree::star(5, true);
        let w = edge_weights(&s);
        for leaf in 1..=5 {
            assert_eq!(w.weight(0, leaf), 1);
            assert_eq!(w.weight(leaf, 0), 5);
        }
        assert_eq!(w.w_plus[0], 5);
    }

    #[test]
    fn set_weights_partition_the_rest() {
        let t = DirectedTree::path(&[true, false, true, true]);
        let w = edge_weights(&t);
        let in_set = [false, true, true, false, false];
        let (plus, minus) = set_weights(&t, &w, &in_set);
        assert_eq!(plus + minus + 2, 5);
        assert_eq!((plus, minus), (2, 1));
    }
}

use crate::digraph::DirectedTree;

/// Ancestral order from `root` visiting child subtrees smallest first, so
/// every prefix has at most `log₂ n` open vertices.
pub fn tidy_ancestral_order(t: &DirectedTree, root: usize) -> Vec<usize> {
    let rooted;
    let t = if root == t.root() {
        t
    } else {
        rooted = t.rerooted(root);
        &rooted
    };
    let size = t.subtree_sizes();
    let mut order = Vec::with_capacity(t.n());
    let mut stack = vec![root];
    let mut kids = Vec::new();
    while let Some(v) = stack.pop() {
        order.push(v);
        kids.clear();
        kids.extend_from_slice(t.children(v));
        kids.sort_unstable_by_key(|&c| (size[c], c));
        stack.extend(kids.iter().rev());
    }
    order
}

/// Largest number of open vertices (placed, with an unplaced child) over
/// all prefixes of `order`, children taken with respect to `root`.
/// Returns `None` if `order` is not an ancestral order.
pub fn max_open(t: &DirectedTree, root: usize, order: &[usize]) -> Option<usize> {
    let rooted;
    let t = if root == t.root() {
        t
    } else {
        rooted = t.rerooted(root);
        &rooted
    };
    if order.len() != t.n() || order.first() != Some(&root) {
        return None;
    }
    let mut placed = vec![false; t.n()];
    let mut pending: Vec<usize> = (0..t.n()).map(|v| t.children(v).len()).collect();
    let mut open = 0usize;
    let mut worst = 0;
    for &v in order {
        if placed[v] {
            return None;
        }
        if let Some(p) = t.parent(v) {
            if !placed[p] {
                return None;
            }
            pending[p] -= 1;
            if pending[p] == 0 {
                open -= 1;
            }
        }
        placed[v] = true;
        if pending[v] > 0 {
            open += 1;
        }
        worst = worst.max(open);
    }
    Some(worst)
}

use std::collections::BinaryHeap;

use serde::Serialize;

use super::weights::edge_weights;
use crate::digraph::DirectedTree;
use crate::error::{invalid, precondition, Result};

/// Two subtrees sharing exactly the vertex `shared` and partitioning the
/// edges. Both vertex lists contain `shared`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitPair {
    pub shared: usize,
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Splits at a vertex all of whose branch weights are at most `n/2`,
/// grouping branches so both sides get between `(n−1)/3` and `2(n−1)/3`
/// edges.
pub fn single_split(t: &DirectedTree) -> Result<SplitPair> {
    let n = t.n();
    if n < 3 {
        return invalid(format!("single_split needs n >= 3, got {n}"));
    }
    let w = edge_weights(t);
    let v = (0..n)
        .find(|&v| t.neighbours(v).all(|u| 2 * w.weight(v, u) <= n))
        .expect("a tree has a vertex with all branch weights at most n/2");
    let m = n - 1;
    let branches: Vec<usize> = t.neighbours(v).collect();
    let mut chosen = vec![false; branches.len()];
    if let Some(i) = branches.iter().position(|&u| 3 * w.weight(v, u) >= m) {
        chosen[i] = true;
    } else {
        let mut sum = 0;
        for (i, &u) in branches.iter().enumerate() {
            chosen[i] = true;
            sum += w.weight(v, u);
            if 3 * sum >= m {
                break;
            }
        }
    }
    let mut side = vec![0u8; n];
    let mut first = vec![v];
    let mut second = vec![v];
    for (i, &u) in branches.iter().enumerate() {
        let mark = if chosen[i] { 1 } else { 2 };
        let mut stack = vec![u];
        side[v] = 3;
        side[u] = mark;
        while let Some(x) = stack.pop() {
            if chosen[i] {
                first.push(x);
            } else {
                second.push(x);
            }
            for y in t.neighbours(x) {
                if side[y] == 0 {
                    side[y] = mark;
                    stack.push(y);
                }
            }
        }
    }
    Ok(SplitPair {
        shared: v,
        first,
        second,
    })
}

/// The family `(F_i, v_i)` of disjoint vertex sets with anchors.
///
/// `subtrees[i]` is the piece `T_i` from which `parts[i]` was cut, listed in
/// an ancestral order of the piece adjacency tree. The root piece is
/// included with anchor `root`.
#[derive(Clone, Debug, Serialize)]
pub struct TreeSplit {
    pub parts: Vec<Vec<usize>>,
    pub anchors: Vec<usize>,
    pub subtrees: Vec<Vec<usize>>,
    pub steps: usize,
}

pub fn segment_split(
    t: &DirectedTree,
    root: usize,
    k: usize,
    eps: f64,
    delta_bound: usize,
) -> Result<TreeSplit> {
    let n = t.n();
    if root >= n {
        return invalid("root out of range");
    }
    if t.max_degree() > delta_bound {
        return precondition(format!(
            "max degree {} exceeds delta_bound {delta_bound}",
            t.max_degree()
        ));
    }
    let nf = n as f64;
    let k3 = (k as f64).powi(3);
    let lhs = 3.0 * nf.cbrt() * (delta_bound as f64).powf(k3);
    if !(lhs <= eps * nf) {
        return precondition(format!(
            "3·n^(1/3)·delta_bound^(k³) = {lhs:.4e} exceeds eps·n = {:.4e}",
            eps * nf
        ));
    }
    let cap = nf.powf(2.0 / 3.0);

    let mut pieces: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut alive = vec![true];
    let mut heap = BinaryHeap::from([(n, 0usize)]);
    let mut steps = 0;
    while let Some(&(size, idx)) = heap.peek() {
        if (size as f64) <= cap || size < 3 {
            break;
        }
        heap.pop();
        let local = t.induced(&pieces[idx])?;
        let split = single_split(&local)?;
        alive[idx] = false;
        for side in [&split.first, &split.second] {
            let verts: Vec<usize> = side.iter().map(|&i| pieces[idx][i]).collect();
            heap.push((verts.len(), pieces.len()));
            pieces.push(verts);
            alive.push(true);
        }
        steps += 1;
    }
    let pieces: Vec<Vec<usize>> = pieces
        .into_iter()
        .zip(alive)
        .filter_map(|(p, a)| a.then_some(p))
        .collect();

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, p) in pieces.iter().enumerate() {
        for &v in p {
            holders[v].push(i);
        }
    }
    let first = holders[root][0];
    let mut anchor = vec![usize::MAX; pieces.len()];
    anchor[first] = root;
    let mut order = vec![first];
    let mut i = 0;
    while i < order.len() {
        let p = order[i];
        i += 1;
        for &v in &pieces[p] {
            for &q in &holders[v] {
                if anchor[q] == usize::MAX {
                    anchor[q] = v;
                    order.push(q);
                }
            }
        }
    }
    debug_assert_eq!(order.len(), pieces.len());

    let radius = k3 as usize;
    let mut dist = vec![usize::MAX; n];
    let mut member = vec![false; n];
    let mut parts = Vec::with_capacity(order.len());
    let mut anchors = Vec::with_capacity(order.len());
    let mut subtrees = Vec::with_capacity(order.len());
    for &p in &order {
        let piece = &pieces[p];
        for &v in piece {
            member[v] = true;
        }
        let a = anchor[p];
        dist[a] = 0;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            if dist[x] + 1 >= radius {
                continue;
            }
            for y in t.neighbours(x) {
                if member[y] && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        parts.push(piece.iter().copied().filter(|&v| dist[v] >= radius).collect());
        for &v in piece {
            member[v] = false;
            dist[v] = usize::MAX;
        }
        anchors.push(a);
        subtrees.push(piece.clone());
    }
    Ok(TreeSplit {
        parts,
        anchors,
        subtrees,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::gen_random_tree;

    fn check_pair(t: &DirectedTree, s: &SplitPair) {
        let m = t.n() - 1;
        let e1 = s.first.len() - 1;
        let e2 = s.second.len() - 1;
        assert_eq!(e1 + e2, m);
        assert!(3 * e1 >= m && 3 * e2 >= m, "{e1} {e2}");
        let mut both: Vec<usize> = s.first.iter().filter(|v| s.second.contains(v)).copied().collect();
        both.sort();
        assert_eq!(both, vec![s.shared]);
        assert!(t.induced(&s.first).is_ok() && t.induced(&s.second).is_ok());
    }

    #[test]
    fn small_splits() {
        let p4 = DirectedTree::directed_path(4);
        let s = single_split(&p4).unwrap();
        assert!(s.shared == 1 || s.shared == 2);
        check_pair(&p4, &s);
        let star = DirectedTree::star(3, true);
        let s = single_split(&star).unwrap();
        assert_eq!(s.shared, 0);
        check_pair(&star, &s);
        let p3 = DirectedTree::directed_path(3);
        let s = single_split(&p3).unwrap();
        assert_eq!((s.shared, s.first.len(), s.second.len()), (1, 2, 2));
        assert!(single_split(&DirectedTree::directed_path(2)).is_err());
    }

    #[test]
    fn random_splits() {
        for seed in 0..200 {
            let t = gen_random_tree(3 + seed as usize % 60, None, seed).unwrap();
            check_pair(&t, &single_split(&t).unwrap());
        }
    }

    #[test]
    fn segment_split_guard() {
        let t = DirectedTree::directed_path(1000);
        let err = segment_split(&t, 0, 2, 0.5, 2).unwrap_err();
        assert!(err.to_string().contains("exceeds eps"));
    }

    /// Checks conclusions (1)–(4) directly.
    pub(crate) fn check_segment_split(t: &DirectedTree, root: usize, k: usize, eps: f64, s: &TreeSplit) {
        let n = t.n();
        let mut owner = vec![usize::MAX; n];
        for (i, f) in s.parts.iter().enumerate() {
            assert!((f.len() as f64) <= (n as f64).powf(2.0 / 3.0) + 1e-9);
            for &v in f {
                assert_eq!(owner[v], usize::MAX, "parts overlap");
                owner[v] = i;
            }
        }
        let covered = owner.iter().filter(|&&o| o != usize::MAX).count();
        assert!(covered as f64 >= (1.0 - eps) * n as f64);
        let k3 = k * k * k;
        for (i, f) in s.parts.iter().enumerate() {
            let d = t.distances_from(&[s.anchors[i]]);
            assert!(f.iter().all(|&y| d[y] >= k3));
        }
        assert!(s.steps as f64 <= 3.0 * (n as f64).cbrt() + 1e-9);
        // path separation, sampled
        let mut rng = crate::rng::stream(n as u64, 0);
        use rand::Rng;
        for _ in 0..200 {
            let i = rng.gen_range(0..s.parts.len());
            if s.parts[i].is_empty() {
                continue;
            }
            let y = s.parts[i][rng.gen_range(0..s.parts[i].len())];
            let earlier: Vec<usize> = std::iter::once(root)
                .chain(s.parts[..i].iter().flatten().copied())
                .collect();
            let x = earlier[rng.gen_range(0..earlier.len())];
            assert!(t.path_between(x, y).contains(&s.anchors[i]));
        }
    }

    #[test]
    fn segment_split_long_path() {
        let n = 70_000;
        let t = DirectedTree::directed_path(n);
        let s = segment_split(&t, 0, 2, 0.5, 2).unwrap();
        check_segment_split(&t, 0, 2, 0.5, &s);
    }

    #[test]
    fn segment_split_random_bounded() {
        for seed in 0..3 {
            let t = gen_random_tree(20_000, Some(3), seed).unwrap();
            let s = segment_split(&t, 0, 1, 0.5, 3).unwrap();
            check_segment_split(&t, 0, 1, 0.5, &s);
        }
    }
}

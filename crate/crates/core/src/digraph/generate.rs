//! Seeded instance generators. All are pure functions of their arguments.

use rand::{Rng as _, RngCore};

use super::{DirectedTree, Tournament};
use crate::error::{invalid, Result};
use crate::num;
use crate::regular::ClusterCycle;
use crate::rng::stream;

/// Name reported next to every statistic computed on random trees.
pub const TREE_GENERATOR: &str = "uniform-attachment-with-degree-cap";

/// Each pair oriented by an independent fair coin.
pub fn gen_random_tournament(n: usize, seed: u64) -> Tournament {
    let mut rng = stream(seed, 0);
    let mut word = 0u64;
    let mut left = 0;
    Tournament::from_fn(n, |_, _| {
        if left == 0 {
            word = rng.next_u64();
            left = 64;
        }
        let bit = word & 1 == 1;
        word >>= 1;
        left -= 1;
        bit
    })
}

/// `i → i + j (mod n)` for `1 ≤ j ≤ (n−1)/2`; regular for odd `n`.
pub fn gen_rotational_tournament(n: usize) -> Result<Tournament> {
    if n.is_multiple_of(2) {
        return invalid(format!("rotational tournament needs odd n, got {n}"));
    }
    let half = (n - 1) / 2;
    Ok(Tournament::from_fn(n, |u, v| v - u <= half))
}

/// `i → j` for all `i < j`.
pub fn gen_transitive_tournament(n: usize) -> Tournament {
    Tournament::from_fn(n, |_, _| true)
}

/// A random block on `0..n1` beating a transitive block on `n1..n1+n2`:
/// every arc between the blocks runs from the first to the second.
pub fn gen_two_block(n1: usize, n2: usize, seed: u64) -> Tournament {
    let h1 = gen_random_tournament(n1, seed);
    Tournament::from_fn(n1 + n2, |u, v| if v < n1 { h1.has_arc(u, v) } else { true })
}

/// Transitive tournament with each arc reversed independently with
/// probability `eps`. Returns the generating order.
pub fn gen_almost_transitive(n: usize, eps: f64, seed: u64) -> Result<(Tournament, Vec<usize>)> {
    if !(0.0..=1.0).contains(&eps) {
        return invalid(format!("eps must lie in [0,1], got {eps}"));
    }
    let mut rng = stream(seed, 0);
    let g = Tournament::from_fn(n, |_, _| !rng.gen_bool(eps));
    Ok((g, (0..n).collect()))
}

/// `k` clusters of `round(m·(1+alpha_pad))` vertices each. Between
/// consecutive clusters an arc runs forward with probability `d`; every
/// other pair is a fair coin. Cluster `i` holds a contiguous id range. The
/// declared regularity is the nominal `1/√size` of a random pair.
pub fn gen_cluster_cycle(
    k: usize,
    m: usize,
    d: f64,
    alpha_pad: f64,
    seed: u64,
) -> Result<(Tournament, ClusterCycle)> {
    if k < 3 {
        return invalid(format!("a cluster cycle needs k >= 3, got {k}"));
    }
    if m == 0 || !(d > 0.0 && d <= 1.0) || alpha_pad < 0.0 {
        return invalid("need m >= 1, 0 < d <= 1 and alpha_pad >= 0");
    }
    let size = num::round_half_up(m as f64 * (1.0 + alpha_pad)).max(1);
    let n = k * size;
    let mut rng = stream(seed, 0);
    let g = Tournament::from_fn(n, |u, v| {
        let (cu, cv) = (u / size, v / size);
        if cv == (cu + 1) % k {
            rng.gen_bool(d)
        } else if cu == (cv + 1) % k {
            !rng.gen_bool(d)
        } else {
            rng.gen_bool(0.5)
        }
    });
    let clusters = (0..k).map(|i| (i * size..(i + 1) * size).collect()).collect();
    let eps = 1.0 / (size as f64).sqrt();
    Ok((g, ClusterCycle { clusters, eps, d }))
}

/// Vertex `v ≥ 1` attaches to a uniformly chosen earlier vertex that still
/// has degree capacity; each edge gets a fair-coin orientation. Root is 0.
pub fn gen_random_tree(n: usize, max_degree: Option<usize>, seed: u64) -> Result<DirectedTree> {
    if n == 0 {
        return invalid("a tree needs at least one vertex");
    }
    let cap = max_degree.unwrap_or(usize::MAX);
    if (n >= 3 && cap < 2) || (n == 2 && cap < 1) {
        return invalid(format!("no tree on {n} vertices has maximum degree {cap}"));
    }
    let mut rng = stream(seed, 0);
    let mut parent = vec![None; n];
    let mut down = vec![true; n];
    let mut degree = vec![0usize; n];
    let mut open = vec![0usize];
    let mut slot = vec![usize::MAX; n];
    slot[0] = 0;
    for v in 1..n {
        let i = rng.gen_range(0..open.len());
        let p = open[i];
        parent[v] = Some(p);
        down[v] = rng.gen_bool(0.5);
        degree[p] += 1;
        degree[v] = 1;
        if degree[p] >= cap {
            let last = *open.last().unwrap();
            open.swap_remove(slot[p]);
            if last != p {
                slot[last] = slot[p];
            }
            slot[p] = usize::MAX;
        }
        if degree[v] < cap {
            slot[v] = open.len();
            open.push(v);
        }
    }
    DirectedTree::new(0, parent, down)
}

/// A fixed-shape test tree: a path of `spine` vertices with `leaves`
/// out-leaves on vertex 0 (a broom). Orientations from the seed.
pub fn gen_broom(spine: usize, leaves: usize, seed: u64) -> DirectedTree {
    let mut rng = stream(seed, 0);
    let n = spine + leaves;
    let mut parent = vec![None; n];
    let mut down = vec![true; n];
    for v in 1..spine {
        parent[v] = Some(v - 1);
        down[v] = rng.gen_bool(0.5);
    }
    for v in spine..n {
        parent[v] = Some(0);
        down[v] = rng.gen_bool(0.5);
    }
    DirectedTree::new(0, parent, down).expect("a broom is a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_block_orients_across() {
        let g = gen_two_block(7, 5, 2);
        assert!((0..7).all(|u| (7..12).all(|v| g.has_arc(u, v))));
        assert!((7..12).all(|u| (u + 1..12).all(|v| g.has_arc(u, v))));
        assert_eq!(g.induced(&(0..7).collect::<Vec<_>>()), gen_random_tournament(7, 2));
    }

    #[test]
    fn tiny_tournaments() {
        assert_eq!(gen_random_tournament(1, 3).arcs(), vec![]);
        assert_eq!(gen_random_tournament(2, 3).arcs().len(), 1);
        assert_eq!(gen_random_tournament(6, 11), gen_random_tournament(6, 11));
        assert_ne!(gen_random_tournament(40, 11), gen_random_tournament(40, 12));
    }

    #[test]
    fn rotational_is_regular() {
        let g = gen_rotational_tournament(3).unwrap();
        assert!(g.has_arc(0, 1) && g.has_arc(1, 2) && g.has_arc(2, 0));
        let g = gen_rotational_tournament(5).unwrap();
        assert!((0..5).all(|v| g.out_degree(v) == 2));
        assert!(gen_rotational_tournament(4).is_err());
    }

    #[test]
    fn almost_transitive_extremes() {
        let (g, order) = gen_almost_transitive(4, 0.0, 1).unwrap();
        assert_eq!(g, gen_transitive_tournament(4));
        assert_eq!(order, vec![0, 1, 2, 3]);
        let (g, _) = gen_almost_transitive(6, 1.0, 1).unwrap();
        assert_eq!(g.backward_count(&[0, 1, 2, 3, 4, 5]), 15);
        assert!(gen_almost_transitive(3, 1.5, 1).is_err());
    }

    #[test]
    fn backward_count_is_binomial() {
        // 4950 pairs at p = 0.05: mean 247.5, sd ~15.3
        let (g, order) = gen_almost_transitive(100, 0.05, 9).unwrap();
        let b = g.backward_count(&order) as f64;
        assert!((b - 247.5).abs() < 3.0 * 15.34, "{b}");
    }

    #[test]
    fn singleton_cluster_triangle() {
        let (g, c) = gen_cluster_cycle(3, 1, 1.0, 0.0, 5).unwrap();
        assert!(g.has_arc(0, 1) && g.has_arc(1, 2) && g.has_arc(2, 0));
        assert_eq!(c.clusters, vec![vec![0], vec![1], vec![2]]);
        assert!(gen_cluster_cycle(2, 5, 0.5, 0.0, 5).is_err());
    }

    #[test]
    fn random_trees_respect_bound() {
        assert_eq!(gen_random_tree(1, None, 0).unwrap().n(), 1);
        let t = gen_random_tree(10_000, Some(3), 4).unwrap();
        assert!(t.max_degree() <= 3);
        assert_eq!(t.arcs().len(), 9_999);
        assert!(gen_random_tree(3, Some(1), 0).is_err());
        assert_eq!(gen_random_tree(2, Some(1), 0).unwrap().n(), 2);
        let p = gen_random_tree(50, Some(2), 8).unwrap();
        assert!(p.max_degree() <= 2);
    }
}

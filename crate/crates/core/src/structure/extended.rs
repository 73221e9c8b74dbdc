use serde::Serialize;

use super::{core_tree, leading_paths};
use crate::digraph::DirectedTree;
use crate::error::{invalid, precondition, Result};

/// `T_ext` and its heavy anchors `H`.
#[derive(Clone, Debug, Serialize)]
pub struct ExtendedTree {
    /// A core vertex used as the root.
    pub root: usize,
    pub core: Vec<usize>,
    pub ext: Vec<usize>,
    pub heavy: Vec<usize>,
    /// `P_k(H)` rooted at `root`.
    pub leading: Vec<usize>,
    /// Chosen heaviness level `t`; anchors have pendant trees of at least
    /// `delta^(k^t)` vertices.
    pub level: u32,
    /// For every vertex, the core vertex whose pendant tree contains it.
    pub owner: Vec<usize>,
}

/// Core tree plus every pendant tree that is not heavy. The level `t` is
/// the smallest in `[1/ω, 3/ω]` for which the pendant trees of the light
/// core vertices within distance `k³` of `P_k(H_t)` total at most `ωn`.
pub fn extended_tree(t: &DirectedTree, delta: usize, k: usize, omega: f64) -> Result<ExtendedTree> {
    if delta < 2 || k < 2 || !(omega > 0.0 && omega < 1.0) {
        return invalid("extended tree needs delta >= 2, k >= 2, 0 < omega < 1");
    }
    let n = t.n();
    let core = core_tree(t, delta)?;
    let root = if core.contains(&t.root()) { t.root() } else { core[0] };
    let mut in_core = vec![false; n];
    for &v in &core {
        in_core[v] = true;
    }
    // owner via search from the core through non-core vertices
    let mut owner = vec![usize::MAX; n];
    let mut stack = Vec::new();
    for &v in &core {
        owner[v] = v;
        stack.push(v);
    }
    while let Some(x) = stack.pop() {
        for y in t.neighbours(x) {
            if owner[y] == usize::MAX {
                owner[y] = owner[x];
                stack.push(y);
            }
        }
    }
    let mut pendant = vec![0usize; n];
    for &o in &owner {
        pendant[o] += 1;
    }
    let k3 = k.pow(3);
    let lo = (1.0 / omega - 1e-9).ceil() as u32;
    let hi = (3.0 / omega + 1e-9).floor() as u32;
    for level in lo.max(1)..=hi {
        let threshold = (delta as f64).powf((k as f64).powi(level as i32));
        let heavy: Vec<usize> = core
            .iter()
            .copied()
            .filter(|&v| pendant[v] as f64 >= threshold)
            .collect();
        let leading = leading_paths(t, root, &heavy, k);
        let near_weight: usize = if leading.is_empty() {
            0
        } else {
            let dist = t.distances_within(&leading, Some(&in_core));
            core.iter()
                .filter(|&&v| dist[v] <= k3)
                .filter(|&&v| (pendant[v] as f64) < threshold)
                .map(|&v| pendant[v])
                .sum()
        };
        if near_weight as f64 <= omega * n as f64 {
            let mut is_heavy = vec![false; n];
            for &v in &heavy {
                is_heavy[v] = true;
            }
            let ext = (0..n).filter(|&x| in_core[x] || !is_heavy[owner[x]]).collect();
            return Ok(ExtendedTree {
                root,
                core,
                ext,
                heavy,
                leading,
                level,
                owner,
            });
        }
    }
    precondition(format!("no heaviness level in [{lo}, {hi}] satisfies the weight bound for omega={omega}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn light_tree_is_its_own_extension() {
        let t = crate::digraph::generate::gen_random_tree(300, Some(3), 1).unwrap();
        let e = extended_tree(&t, 3, 3, 0.5).unwrap();
        assert!(e.heavy.is_empty());
        assert_eq!(e.ext.len(), 300);
    }

    #[test]
    fn heavy_star_centre() {
        // centre 0 with a short spine and many leaves: with delta=2, k=2,
        // omega=0.9 the level is 2 and the threshold 2^4 = 16
        let t = crate::digraph::generate::gen_broom(3, 200, 4);
        let e = extended_tree(&t, 2, 2, 0.9).unwrap();
        assert_eq!(e.level, 2);
        assert!(e.heavy.contains(&0), "{:?}", e.heavy);
        assert!(e.ext.len() < 10);
    }
}

use std::collections::BTreeSet;

use serde::Serialize;

use crate::digraph::DirectedTree;
use crate::error::{invalid, Result};

/// Vertex tripartition with every cross arc running `T⁻ → T⁰ → T⁺` or
/// `T⁻ → T⁺`.
#[derive(Clone, Debug, Serialize)]
pub struct Peel {
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub plus: Vec<usize>,
}

/// Repeatedly removes the lowest-id sink (if `sinks`) or source of the
/// forest on `alive` until `keep` vertices remain; returns removed ones.
fn peel(t: &DirectedTree, alive: &mut [bool], keep: usize, sinks: bool) -> Vec<usize> {
    let n = t.n();
    let mut count = vec![0usize; n];
    let mut remaining = 0;
    for x in 0..n {
        if alive[x] {
            remaining += 1;
            count[x] = t
                .neighbours(x)
                .filter(|&y| alive[y] && t.arc_between(x, y) == Some(sinks))
                .count();
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&x| alive[x] && count[x] == 0).collect();
    let mut removed = Vec::new();
    while remaining > keep {
        let x = ready.pop_first().expect("a forest always has a sink and a source");
        alive[x] = false;
        remaining -= 1;
        removed.push(x);
        for y in t.neighbours(x) {
            if alive[y] && t.arc_between(y, x) == Some(sinks) {
                count[y] -= 1;
                if count[y] == 0 {
                    ready.insert(y);
                }
            }
        }
    }
    removed
}

/// `T⁰` is grown from the sinks peeled off `T` until `minus_size` vertices
/// remain (these form `T⁻`); then sources are peeled off `T⁰` until
/// `plus_size` remain (these form `T⁺`). Ties go to the lowest id.
pub fn peel_split(t: &DirectedTree, minus_size: usize, plus_size: usize) -> Result<Peel> {
    let n = t.n();
    if minus_size + plus_size > n {
        return invalid(format!("{minus_size} + {plus_size} exceeds tree size {n}"));
    }
    let mut alive = vec![true; n];
    let rest = peel(t, &mut alive, minus_size, true);
    let minus: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut alive = vec![false; n];
    for &v in &rest {
        alive[v] = true;
    }
    let mut zero = peel(t, &mut alive, plus_size, false);
    let plus: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    zero.sort_unstable();
    Ok(Peel { minus, zero, plus })
}

/// First cross arc violating the required directions, if any.
pub fn peel_violation(t: &DirectedTree, p: &Peel) -> Option<(usize, usize)> {
    let mut rank = vec![0u8; t.n()];
    for &v in &p.zero {
        rank[v] = 1;
    }
    for &v in &p.plus {
        rank[v] = 2;
    }
    t.arcs().into_iter().find(|&(a, b)| rank[a] > rank[b])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_path_plus_two() {
        let t = DirectedTree::directed_path(5);
        let p = peel_split(&t, 0, 2).unwrap();
        assert_eq!(p.plus, vec![3, 4]);
        assert_eq!(p.zero, vec![0, 1, 2]);
        let p = peel_split(&t, 2, 0).unwrap();
        assert_eq!(p.minus, vec![0, 1]);
        let p = peel_split(&t, 0, 0).unwrap();
        assert_eq!(p.zero.len(), 5);
        assert!(peel_split(&t, 3, 3).is_err());
    }

    #[test]
    fn random_cross_arcs() {
        for seed in 0..300 {
            let t = crate::digraph::generate::gen_random_tree(40, None, seed).unwrap();
            let a = seed as usize % 15;
            let b = (seed as usize / 15) % 20;
            let p = peel_split(&t, a, b).unwrap();
            assert_eq!((p.minus.len(), p.plus.len()), (a, b));
            assert_eq!(peel_violation(&t, &p), None);
        }
    }
}

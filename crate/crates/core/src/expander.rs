//! Robust outexpansion: `RN⁺_μ(S)`, exhaustive and sampled checkers, and the
//! split of a non-expander into two almost one-directional halves.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::digraph::{vertex_set, Tournament};
use crate::error::{invalid, Result};
use crate::num;
use crate::rng;

pub const MAX_EXHAUSTIVE: usize = 22;

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CheckMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpanderVerdict {
    pub is_expander: bool,
    pub witness: Option<Vec<usize>>,
    pub mu: f64,
    pub nu: f64,
}

/// In-neighbour count from `S` that puts a vertex into `RN⁺_μ(S)`.
pub fn rn_threshold(n: usize, mu: f64) -> usize {
    num::ceil(mu * n as f64)
}

/// Whether `|S| = size` lies strictly inside `(νn, (1−ν)n)`.
pub fn in_window(n: usize, nu: f64, size: usize) -> bool {
    let (s, n) = (size as f64, n as f64);
    s > nu * n + TOL && s < (1.0 - nu) * n - TOL
}

fn falsifies(n: usize, mu: f64, size: usize, rn: usize) -> bool {
    (rn as f64) + TOL < size as f64 + mu * n as f64
}

/// `{v : |N⁻(v) ∩ S| ≥ ⌈μn⌉}`.
pub fn robust_outneighbourhood(g: &Tournament, s: &FixedBitSet, mu: f64) -> FixedBitSet {
    let n = g.n();
    let c = rn_threshold(n, mu);
    let mut out = FixedBitSet::with_capacity(n);
    if s.count_ones(..) == 0 {
        return out;
    }
    for v in 0..n {
        if g.in_set(v).intersection_count(s) >= c {
            out.insert(v);
        }
    }
    out
}

/// Whether `S` falsifies expansion: inside the window with a small `RN⁺_μ`.
pub fn is_witness(g: &Tournament, s: &FixedBitSet, mu: f64, nu: f64) -> bool {
    let n = g.n();
    let size = s.count_ones(..);
    in_window(n, nu, size) && falsifies(n, mu, size, robust_outneighbourhood(g, s, mu).count_ones(..))
}

fn in_masks(g: &Tournament) -> Vec<u32> {
    (0..g.n())
        .map(|v| g.in_set(v).ones().fold(0u32, |m, u| m | 1 << u))
        .collect()
}

fn mask_is_witness(n: usize, ins: &[u32], c: usize, mu: f64, nu: f64, s: u32) -> bool {
    let size = s.count_ones() as usize;
    if !in_window(n, nu, size) {
        return false;
    }
    if c == 0 {
        return falsifies(n, mu, size, n);
    }
    let mut rn = 0;
    for &m in ins {
        if (m & s).count_ones() as usize >= c {
            rn += 1;
            if !falsifies(n, mu, size, rn) {
                return false;
            }
        }
    }
    true
}

fn mask_to_vec(s: u32) -> Vec<usize> {
    (0..32).filter(|&i| s >> i & 1 == 1).collect()
}

fn check_exhaustive_size(n: usize) -> Result<()> {
    if n > MAX_EXHAUSTIVE {
        return invalid(format!("exhaustive expander check supports n <= {MAX_EXHAUSTIVE}, got {n}"));
    }
    Ok(())
}

/// Every falsifying set of an `n ≤ 22` tournament, as bitmasks in
/// increasing order.
pub fn exhaustive_witnesses(g: &Tournament, mu: f64, nu: f64) -> Result<Vec<u32>> {
    let n = g.n();
    check_exhaustive_size(n)?;
    let ins = in_masks(g);
    let c = rn_threshold(n, mu);
    Ok((0..1u32 << n)
        .into_par_iter()
        .filter(|&s| mask_is_witness(n, &ins, c, mu, nu, s))
        .collect())
}

fn exhaustive_first(g: &Tournament, mu: f64, nu: f64) -> Result<Option<Vec<usize>>> {
    let n = g.n();
    check_exhaustive_size(n)?;
    let ins = in_masks(g);
    let c = rn_threshold(n, mu);
    Ok((0..1u32 << n)
        .into_par_iter()
        .find_first(|&s| mask_is_witness(n, &ins, c, mu, nu, s))
        .map(mask_to_vec))
}

/// Order with few backward arcs: randomized pivot partitioning followed by
/// adjacent-swap passes.
pub fn feedback_order(g: &Tournament, seed: u64) -> Vec<usize> {
    let mut rng = rng::stream(seed, 0xfa5);
    let mut out = Vec::with_capacity(g.n());
    let mut stack = vec![(0..g.n()).collect::<Vec<usize>>()];
    while let Some(block) = stack.pop() {
        if block.len() <= 1 {
            out.extend(block);
            continue;
        }
        let p = block[rng.gen_range(0..block.len())];
        let (before, after): (Vec<usize>, Vec<usize>) =
            block.iter().copied().filter(|&u| u != p).partition(|&u| g.has_arc(u, p));
        stack.push(after);
        stack.push(vec![p]);
        stack.push(before);
    }
    for _ in 0..4 {
        let mut changed = false;
        for i in 0..out.len().saturating_sub(1) {
            if g.has_arc(out[i + 1], out[i]) {
                out.swap(i, i + 1);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    out
}

/// Grows `S` along `order` and returns the first prefix that falsifies.
fn scan_prefixes(g: &Tournament, order: &[usize], mu: f64, nu: f64) -> Option<Vec<usize>> {
    let n = g.n();
    let c = rn_threshold(n, mu);
    let mut cnt = vec![0usize; n];
    let mut rn = if c == 0 { n } else { 0 };
    for (i, &u) in order.iter().enumerate() {
        for v in g.out_set(u).ones() {
            cnt[v] += 1;
            if cnt[v] == c {
                rn += 1;
            }
        }
        let size = i + 1;
        if in_window(n, nu, size) && falsifies(n, mu, size, rn) {
            let mut s = order[..size].to_vec();
            s.sort_unstable();
            return Some(s);
        }
    }
    None
}

fn sampled(g: &Tournament, mu: f64, nu: f64, count: usize, seed: u64) -> Option<Vec<usize>> {
    let n = g.n();
    let lo = (0..=n).find(|&s| in_window(n, nu, s))?;
    let hi = (0..=n).rev().find(|&s| in_window(n, nu, s))?;
    let mut by_in: Vec<usize> = (0..n).collect();
    by_in.sort_by_key(|&v| (std::cmp::Reverse(g.in_degree(v)), v));
    let fas = feedback_order(g, seed);
    for order in [by_in, fas] {
        let rev: Vec<usize> = order.iter().rev().copied().collect();
        for o in [&order, &rev] {
            if let Some(s) = scan_prefixes(g, o, mu, nu) {
                return Some(s);
            }
        }
    }
    let mut rng = rng::stream(seed, 0x5e7);
    let mut all: Vec<usize> = (0..n).collect();
    for _ in 0..count {
        let size = rng.gen_range(lo..=hi);
        let (pick, _) = all.partial_shuffle(&mut rng, size);
        let s = vertex_set(n, pick);
        if is_witness(g, &s, mu, nu) {
            let mut w: Vec<usize> = s.ones().collect();
            w.sort_unstable();
            return Some(w);
        }
    }
    None
}

/// Exhaustive mode is exact. Sampled mode reports `is_expander = true` when
/// no falsifying set was found among degree-ordered and feedback-ordered
/// prefixes/suffixes and `count` random window-sized sets.
pub fn is_robust_outexpander(g: &Tournament, mu: f64, nu: f64, mode: CheckMode) -> Result<ExpanderVerdict> {
    if !(mu > 0.0 && mu < 1.0 && nu > 0.0 && nu < 1.0) {
        return invalid(format!("mu, nu must lie in (0,1), got {mu}, {nu}"));
    }
    let witness = match mode {
        CheckMode::Exhaustive => exhaustive_first(g, mu, nu)?,
        CheckMode::Sampled { count, seed } => sampled(g, mu, nu, count, seed),
    };
    Ok(ExpanderVerdict {
        is_expander: witness.is_none(),
        witness,
        mu,
        nu,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpanderSplit {
    pub s: Vec<usize>,
    pub s_prime: Vec<usize>,
    /// `e(S → S')` by direct count.
    pub forward_arcs: usize,
    /// `4μn²`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Partitions `V(G)` into the witness `S` and its complement. A result with
/// `within_bound == false` breaks the split bound and callers treat it
/// as fatal.
pub fn split_non_expander(g: &Tournament, mu: f64, nu: f64, witness: &[usize]) -> Result<ExpanderSplit> {
    let n = g.n();
    if witness.iter().any(|&v| v >= n) {
        return invalid("witness vertex out of range");
    }
    let s = vertex_set(n, witness);
    if s.count_ones(..) != witness.len() {
        return invalid("witness has repeated vertices");
    }
    if !is_witness(g, &s, mu, nu) {
        return invalid("set does not falsify robust outexpansion");
    }
    let mut sp = s.clone();
    sp.toggle_range(..);
    let s_prime: Vec<usize> = sp.ones().collect();
    if !in_window(n, nu, s_prime.len()) {
        return invalid("complement outside the size window");
    }
    let forward_arcs = witness.iter().map(|&v| g.out_set(v).intersection_count(&sp)).sum();
    let bound = 4.0 * mu * (n * n) as f64;
    let mut s: Vec<usize> = witness.to_vec();
    s.sort_unstable();
    Ok(ExpanderSplit {
        s,
        s_prime,
        forward_arcs,
        bound,
        within_bound: forward_arcs as f64 <= bound + TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_random_tournament, gen_rotational_tournament, gen_transitive_tournament};

    #[test]
    fn outneighbourhood_examples() {
        let t4 = gen_transitive_tournament(4);
        assert_eq!(robust_outneighbourhood(&t4, &vertex_set(4, &[]), 0.25).count_ones(..), 0);
        let rn: Vec<usize> = robust_outneighbourhood(&t4, &vertex_set(4, &[0, 1]), 0.25).ones().collect();
        assert_eq!(rn, vec![1, 2, 3]);
        let g = gen_random_tournament(30, 3);
        let c = rn_threshold(30, 0.1);
        let full = robust_outneighbourhood(&g, &g.full_set(), 0.1);
        for v in 0..30 {
            assert_eq!(full.contains(v), g.in_degree(v) >= c);
        }
    }

    #[test]
    fn transitive_is_not_expander() {
        let g = gen_transitive_tournament(10);
        let s = vertex_set(10, &[7, 8, 9]);
        assert_eq!(robust_outneighbourhood(&g, &s, 0.1).count_ones(..), 2);
        assert!(is_witness(&g, &s, 0.1, 0.2));
        let v = is_robust_outexpander(&g, 0.1, 0.2, CheckMode::Exhaustive).unwrap();
        assert!(!v.is_expander);
        let v = is_robust_outexpander(&g, 0.1, 0.2, CheckMode::Sampled { count: 10, seed: 1 }).unwrap();
        assert!(!v.is_expander);
        let split = split_non_expander(&g, 0.1, 0.2, &[7, 8, 9]).unwrap();
        assert_eq!(split.forward_arcs, 0);
        assert!(split.within_bound);
    }

    #[test]
    fn reversed_transitive_is_symmetric() {
        let g = Tournament::from_fn(10, |_, _| false);
        let split = split_non_expander(&g, 0.1, 0.2, &[0, 1, 2]).unwrap();
        assert_eq!(split.forward_arcs, 0);
        assert_eq!(split.s_prime, (3..10).collect::<Vec<_>>());
    }

    #[test]
    fn rotational_is_expander() {
        let g = gen_rotational_tournament(11).unwrap();
        let v = is_robust_outexpander(&g, 0.05, 0.3, CheckMode::Exhaustive).unwrap();
        assert!(v.is_expander && v.witness.is_none());
    }

    #[test]
    fn empty_window_is_vacuous() {
        let g = gen_transitive_tournament(4);
        for mode in [CheckMode::Exhaustive, CheckMode::Sampled { count: 5, seed: 0 }] {
            assert!(is_robust_outexpander(&g, 0.1, 0.5, mode).unwrap().is_expander);
        }
        assert!(is_robust_outexpander(&gen_transitive_tournament(23), 0.1, 0.2, CheckMode::Exhaustive).is_err());
    }

    #[test]
    fn split_rejects_non_witness() {
        let g = gen_rotational_tournament(11).unwrap();
        assert!(split_non_expander(&g, 0.05, 0.3, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn exhaustive_witnesses_respect_the_split_bound() {
        for seed in 0..20 {
            let g = gen_random_tournament(12, seed);
            for s in exhaustive_witnesses(&g, 0.1, 0.2).unwrap() {
                let split = split_non_expander(&g, 0.1, 0.2, &mask_to_vec(s)).unwrap();
                assert!(split.within_bound, "seed {seed} set {s:b}");
            }
        }
    }

    #[test]
    fn sampled_never_contradicts_exhaustive() {
        for seed in 0..40 {
            let g = gen_random_tournament(9 + (seed as usize % 6), seed);
            for (mu, nu) in [(0.1, 0.2), (0.2, 0.25)] {
                let e = is_robust_outexpander(&g, mu, nu, CheckMode::Exhaustive).unwrap();
                let s = is_robust_outexpander(&g, mu, nu, CheckMode::Sampled { count: 50, seed }).unwrap();
                if !s.is_expander {
                    assert!(!e.is_expander);
                    assert!(is_witness(&g, &vertex_set(g.n(), s.witness.as_ref().unwrap()), mu, nu));
                }
            }
        }
    }

    #[test]
    fn feedback_order_on_transitive_is_exact() {
        let g = gen_transitive_tournament(50);
        assert_eq!(g.backward_count(&feedback_order(&g, 4)), 0);
        let p = feedback_order(&gen_random_tournament(40, 2), 1);
        let mut q = p.clone();
        q.sort_unstable();
        assert_eq!(q, (0..40).collect::<Vec<_>>());
    }
}

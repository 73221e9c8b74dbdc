use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ClusterCycle;
use crate::digraph::Tournament;
use crate::error::{failed, invalid, precondition, Result};
use crate::num;
use crate::rng;

pub const GOOD_SET_RETRIES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodSetParams {
    pub c: f64,
    pub gamma: f64,
}

impl GoodSetParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(0.0 < gamma && gamma < c && c < 1.0) {
            return invalid(format!("need 0 < gamma < c < 1, got c={c}, gamma={gamma}"));
        }
        Ok(GoodSetParams { c, gamma })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurrogateVerdict {
    pub pass: bool,
    pub qualifying_pairs: u64,
    pub failing_pairs: u64,
    /// `7εm²/(γd)`: failing pairs tolerated.
    pub budget: f64,
    /// `d²√m/25`: common neighbours in `S` a pair needs.
    pub threshold: f64,
}

fn bits_over(s: &[usize], words: usize, f: impl Fn(usize) -> bool) -> Vec<u64> {
    let mut m = vec![0u64; words];
    for (j, &x) in s.iter().enumerate() {
        if f(x) {
            m[j / 64] |= 1 << (j % 64);
        }
    }
    m
}

/// Counts pairs `(u, w) ∈ V_{i−1} × V_{i+1}` with at least `d²√m/25`
/// vertices `s ∈ S` such that `u → s → w`. Passes when the failing pairs fit
/// the budget and at least one pair qualifies.
pub fn is_good_set_surrogate(
    g: &Tournament,
    cycle: &ClusterCycle,
    i: usize,
    s: &[usize],
    params: GoodSetParams,
) -> SurrogateVerdict {
    let m = cycle.m() as f64;
    let (eps, d) = (cycle.eps, cycle.d);
    let threshold = d * d * m.sqrt() / 25.0;
    let budget = 7.0 * eps * m * m / (params.gamma * d);
    let need = num::ceil(threshold) as u32;
    let words = s.len().div_ceil(64).max(1);
    let prev = cycle.cluster(i as isize - 1);
    let next = cycle.cluster(i as isize + 1);
    let ins: Vec<Vec<u64>> = next
        .iter()
        .map(|&w| bits_over(s, words, |x| g.has_arc(x, w)))
        .collect();
    let qualifying: u64 = prev
        .par_iter()
        .map(|&u| {
            let out = bits_over(s, words, |x| g.has_arc(u, x));
            ins.iter()
                .filter(|inw| out.iter().zip(inw.iter()).map(|(a, b)| (a & b).count_ones()).sum::<u32>() >= need)
                .count() as u64
        })
        .sum();
    let failing = (prev.len() * next.len()) as u64 - qualifying;
    SurrogateVerdict {
        pass: qualifying > 0 && failing as f64 <= budget,
        qualifying_pairs: qualifying,
        failing_pairs: failing,
        budget,
        threshold,
    }
}

/// The pass bit of [`is_good_set_surrogate`], stopping as soon as it is
/// decided.
pub fn surrogate_passes(g: &Tournament, cycle: &ClusterCycle, i: usize, s: &[usize], params: GoodSetParams) -> bool {
    let m = cycle.m() as f64;
    let (eps, d) = (cycle.eps, cycle.d);
    let budget = 7.0 * eps * m * m / (params.gamma * d);
    let need = num::ceil(d * d * m.sqrt() / 25.0) as u32;
    let words = s.len().div_ceil(64).max(1);
    let prev = cycle.cluster(i as isize - 1);
    let next = cycle.cluster(i as isize + 1);
    let ins: Vec<Vec<u64>> = next
        .iter()
        .map(|&w| bits_over(s, words, |x| g.has_arc(x, w)))
        .collect();
    let total = (prev.len() * next.len()) as f64;
    let (mut qualifying, mut failing) = (0u64, 0u64);
    for &u in prev {
        let out = bits_over(s, words, |x| g.has_arc(u, x));
        for inw in &ins {
            let common: u32 = out.iter().zip(inw.iter()).map(|(a, b)| (a & b).count_ones()).sum();
            if common >= need {
                qualifying += 1;
            } else {
                failing += 1;
                if failing as f64 > budget {
                    return false;
                }
            }
            let undecided = total - (qualifying + failing) as f64;
            if qualifying > 0 && failing as f64 + undecided <= budget {
                return true;
            }
        }
    }
    qualifying > 0 && failing as f64 <= budget
}

/// Trims `V'_i` to its first `⌈γm/2⌉` vertices and keeps each with
/// probability `1/(γ√m)`, retrying until the sample has at most `√m`
/// vertices and passes the surrogate check.
pub fn find_good_set(
    g: &Tournament,
    cycle: &ClusterCycle,
    i: usize,
    v_prime: &[usize],
    params: GoodSetParams,
    seed: u64,
) -> Result<Vec<usize>> {
    let m = cycle.m() as f64;
    let want = num::ceil(params.gamma * m / 2.0).max(1);
    if v_prime.len() < want {
        return precondition(format!("|V'| = {} is below gamma*m/2 = {want}", v_prime.len()));
    }
    let home = cycle.cluster(i as isize);
    if v_prime.iter().any(|v| !home.contains(v)) {
        return invalid("V' must lie inside the cluster");
    }
    let pool = &v_prime[..want];
    let p = (1.0 / (params.gamma * m.sqrt())).min(1.0);
    let cap = m.sqrt().floor() as usize;
    let mut r = rng::stream(seed, 0x900d);
    for _ in 0..GOOD_SET_RETRIES {
        let s: Vec<usize> = pool.iter().copied().filter(|_| r.gen_bool(p)).collect();
        if s.is_empty() || s.len() > cap {
            continue;
        }
        if surrogate_passes(g, cycle, i, &s, params) {
            return Ok(s);
        }
    }
    failed("good-set", format!("no good set within {GOOD_SET_RETRIES} attempts"))
}

/// A good set of exactly `size` vertices drawn from the first
/// `max(size, ⌈γm/2⌉)` vertices of `pool` (which the caller orders by
/// preference), retrying until the surrogate check passes.
pub fn good_set_of_size(
    g: &Tournament,
    cycle: &ClusterCycle,
    i: usize,
    pool: &[usize],
    size: usize,
    params: GoodSetParams,
    seed: u64,
) -> Result<Vec<usize>> {
    if size == 0 || pool.len() < size {
        return precondition(format!("pool of {} cannot supply a good set of {size}", pool.len()));
    }
    let window = num::ceil(params.gamma * cycle.m() as f64 / 2.0).max(size).min(pool.len());
    let mut cand = pool[..window].to_vec();
    let mut r = rng::stream(seed, 0x5e7);
    for _ in 0..GOOD_SET_RETRIES {
        let mut s = cand.partial_shuffle(&mut r, size).0.to_vec();
        s.sort_unstable();
        if surrogate_passes(g, cycle, i, &s, params) {
            return Ok(s);
        }
        if window == size {
            break;
        }
    }
    failed("good-set", format!("no good set of size {size} within {GOOD_SET_RETRIES} attempts"))
}

/// Uniform `m'`-subsets `U_i ⊆ V_i` (kept in cluster order), declared
/// `eps_prime`-regular with density `d/2`.
pub fn random_restriction(cycle: &ClusterCycle, m_prime: usize, eps_prime: f64, seed: u64) -> Result<ClusterCycle> {
    let m = cycle.m();
    if (m_prime as f64) < (m as f64).cbrt() - 1e-9 || m_prime > m || m_prime == 0 {
        return invalid(format!("need m^(1/3) <= m' <= m, got m'={m_prime}, m={m}"));
    }
    let mut r = rng::stream(seed, 0x7e5);
    let clusters = cycle
        .clusters
        .iter()
        .map(|c| {
            let mut idx: Vec<usize> = (0..c.len()).collect();
            let mut pick = idx.partial_shuffle(&mut r, m_prime).0.to_vec();
            pick.sort_unstable();
            pick.into_iter().map(|j| c[j]).collect()
        })
        .collect();
    ClusterCycle::new(clusters, eps_prime, cycle.d / 2.0)
}

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::ClusterCycle;
use crate::digraph::{vertex_set, Tournament};
use crate::error::{invalid, Result};
use crate::expander::CheckMode;
use crate::num;
use crate::rng;

pub const MAX_EXHAUSTIVE_SIDE: usize = 15;

fn arcs_into(g: &Tournament, xs: &[usize], ys: &FixedBitSet) -> usize {
    xs.iter().map(|&x| g.out_set(x).intersection_count(ys)).sum()
}

fn check_sides(g: &Tournament, xs: &[usize], ys: &[usize]) -> Result<()> {
    if xs.is_empty() || ys.is_empty() {
        return invalid("density needs two nonempty sides");
    }
    if xs.iter().chain(ys).any(|&v| v >= g.n()) {
        return invalid("side vertex outside the host");
    }
    let x = vertex_set(g.n(), xs);
    if ys.iter().any(|&y| x.contains(y)) {
        return invalid("sides must be disjoint");
    }
    Ok(())
}

/// `e(X → Y) / (|X||Y|)`.
pub fn density(g: &Tournament, xs: &[usize], ys: &[usize]) -> Result<f64> {
    check_sides(g, xs, ys)?;
    Ok(arcs_into(g, xs, &vertex_set(g.n(), ys)) as f64 / (xs.len() * ys.len()) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    pub density: f64,
    /// Largest `|d(X',Y') − d(X,Y)|` seen over qualifying subsets.
    pub max_deviation: f64,
    pub counterexample: Option<(Vec<usize>, Vec<usize>)>,
}

fn min_side(eps: f64, len: usize) -> usize {
    num::ceil(eps * len as f64).max(1).min(len)
}

struct Best {
    dev: f64,
    weight: usize,
    pair: Option<(Vec<usize>, Vec<usize>)>,
}

impl Best {
    fn offer(&mut self, dev: f64, weight: usize, make: impl FnOnce() -> (Vec<usize>, Vec<usize>)) {
        if dev > self.dev + 1e-12 || (dev > self.dev - 1e-12 && weight > self.weight) {
            self.dev = dev;
            self.weight = weight;
            self.pair = Some(make());
        }
    }
}

/// Every subset `X'` is scanned. For fixed `X'` the extreme densities over
/// `|Y'| = s` come from the `s` vertices of `Y` with the most (fewest)
/// in-neighbours in `X'`, so those two candidates per size suffice.
fn exhaustive(g: &Tournament, xs: &[usize], ys: &[usize], eps: f64, d: f64) -> Best {
    let (lx, ly) = (min_side(eps, xs.len()), min_side(eps, ys.len()));
    let in_mask: Vec<u32> = ys
        .iter()
        .map(|&y| xs.iter().enumerate().filter(|&(_, &x)| g.has_arc(x, y)).fold(0, |m, (i, _)| m | 1 << i))
        .collect();
    let mut best = Best { dev: -1.0, weight: 0, pair: None };
    let mut idx: Vec<usize> = (0..ys.len()).collect();
    for xm in 1u32..1 << xs.len() {
        let sx = xm.count_ones() as usize;
        if sx < lx {
            continue;
        }
        let c: Vec<u32> = in_mask.iter().map(|&m| (m & xm).count_ones()).collect();
        idx.sort_by_key(|&j| (std::cmp::Reverse(c[j]), j));
        let mut top = 0u32;
        for s in 1..=ys.len() {
            top += c[idx[s - 1]];
            if s < ly {
                continue;
            }
            let low: u32 = idx[ys.len() - s..].iter().map(|&j| c[j]).sum();
            for (sum, hi) in [(top, true), (low, false)] {
                let dev = (sum as f64 / (sx * s) as f64 - d).abs();
                best.offer(dev, sx + s, || {
                    let xp = (0..xs.len()).filter(|&i| xm >> i & 1 == 1).map(|i| xs[i]).collect();
                    let sel = if hi { &idx[..s] } else { &idx[ys.len() - s..] };
                    let mut yp: Vec<usize> = sel.iter().map(|&j| ys[j]).collect();
                    yp.sort_unstable();
                    (xp, yp)
                });
            }
        }
    }
    best
}

/// Random qualifying pairs plus degree-extremal pairs (the highest and
/// lowest degree vertices of each side at two sizes).
fn sampled(g: &Tournament, xs: &[usize], ys: &[usize], eps: f64, d: f64, count: usize, seed: u64) -> Best {
    let n = g.n();
    let (xset, yset) = (vertex_set(n, xs), vertex_set(n, ys));
    let (lx, ly) = (min_side(eps, xs.len()), min_side(eps, ys.len()));
    let mut best = Best { dev: -1.0, weight: 0, pair: None };
    let eval = |xp: Vec<usize>, yp: Vec<usize>, best: &mut Best| {
        let dens = arcs_into(g, &xp, &vertex_set(n, &yp)) as f64 / (xp.len() * yp.len()) as f64;
        let w = xp.len() + yp.len();
        best.offer((dens - d).abs(), w, || (xp, yp));
    };
    let mut bx: Vec<usize> = xs.to_vec();
    bx.sort_by_key(|&x| (std::cmp::Reverse(g.out_set(x).intersection_count(&yset)), x));
    let mut by: Vec<usize> = ys.to_vec();
    by.sort_by_key(|&y| (std::cmp::Reverse(g.in_set(y).intersection_count(&xset)), y));
    let sizes = |lo: usize, len: usize| [lo, (lo + len).div_ceil(2)];
    for sx in sizes(lx, xs.len()) {
        for sy in sizes(ly, ys.len()) {
            for x_hi in [true, false] {
                for y_hi in [true, false] {
                    let xp = if x_hi { bx[..sx].to_vec() } else { bx[xs.len() - sx..].to_vec() };
                    let yp = if y_hi { by[..sy].to_vec() } else { by[ys.len() - sy..].to_vec() };
                    eval(xp, yp, &mut best);
                }
            }
        }
    }
    let mut r = rng::stream(seed, 0x2e9);
    let (mut ax, mut ay) = (xs.to_vec(), ys.to_vec());
    for _ in 0..count {
        let sx = r.gen_range(lx..=xs.len());
        let sy = r.gen_range(ly..=ys.len());
        let xp = ax.partial_shuffle(&mut r, sx).0.to_vec();
        let yp = ay.partial_shuffle(&mut r, sy).0.to_vec();
        eval(xp, yp, &mut best);
    }
    best
}

/// Looks for `X' ⊆ X`, `Y' ⊆ Y` with `|X'| ≥ ε|X|`, `|Y'| ≥ ε|Y|` and
/// `|d(X',Y') − d(X,Y)| ≥ ε`. Exhaustive mode is exact; sampled mode is
/// one-sided.
pub fn check_eps_regular(
    g: &Tournament,
    xs: &[usize],
    ys: &[usize],
    eps: f64,
    mode: CheckMode,
) -> Result<RegularityVerdict> {
    let d = density(g, xs, ys)?;
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0,1), got {eps}"));
    }
    let best = match mode {
        CheckMode::Exhaustive => {
            if xs.len() > MAX_EXHAUSTIVE_SIDE || ys.len() > MAX_EXHAUSTIVE_SIDE {
                return invalid(format!("exhaustive regularity check supports sides up to {MAX_EXHAUSTIVE_SIDE}"));
            }
            exhaustive(g, xs, ys, eps, d)
        }
        CheckMode::Sampled { count, seed } => sampled(g, xs, ys, eps, d, count, seed),
    };
    let regular = best.dev < eps - 1e-12;
    Ok(RegularityVerdict {
        regular,
        density: d,
        max_deviation: best.dev.max(0.0),
        counterexample: if regular { None } else { best.pair },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub index: usize,
    pub density: f64,
    pub dense: bool,
    pub regular: bool,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleVerdict {
    pub pass: bool,
    pub pairs: Vec<PairCheck>,
}

/// Checks density `≥ d` and `eps`-regularity of every `V_i → V_{i+1}`.
/// Pairs with both sides of at most 15 vertices are checked exhaustively,
/// larger ones with `samples` random subset pairs.
pub fn check_cluster_cycle(
    g: &Tournament,
    cycle: &ClusterCycle,
    eps: f64,
    d: f64,
    samples: usize,
    seed: u64,
) -> Result<CycleVerdict> {
    cycle.check_hosted(g)?;
    let k = cycle.k();
    let mut pairs = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (cycle.cluster(i as isize), cycle.cluster(i as isize + 1));
        let mode = if a.len() <= MAX_EXHAUSTIVE_SIDE && b.len() <= MAX_EXHAUSTIVE_SIDE {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled { count: samples, seed: rng::derive(seed, i as u64) }
        };
        let v = check_eps_regular(g, a, b, eps, mode)?;
        pairs.push(PairCheck {
            index: i,
            density: v.density,
            dense: v.density >= d - 1e-12,
            regular: v.regular,
            max_deviation: v.max_deviation,
        });
    }
    Ok(CycleVerdict {
        pass: pairs.iter().all(|p| p.dense && p.regular),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_cluster_cycle, gen_random_tournament, gen_transitive_tournament};

    fn bipartite(nx: usize, ny: usize, arc: impl Fn(usize, usize) -> bool) -> (Tournament, Vec<usize>, Vec<usize>) {
        let g = Tournament::from_fn(nx + ny, |u, v| if u < nx && v >= nx { arc(u, v - nx) } else { true });
        (g, (0..nx).collect(), (nx..nx + ny).collect())
    }

    /// Independent oracle: every pair of qualifying subsets.
    fn brute_max_deviation(g: &Tournament, xs: &[usize], ys: &[usize], eps: f64) -> f64 {
        let d = density(g, xs, ys).unwrap();
        let (lx, ly) = (min_side(eps, xs.len()), min_side(eps, ys.len()));
        let mut best: f64 = 0.0;
        for xm in 1u32..1 << xs.len() {
            if (xm.count_ones() as usize) < lx {
                continue;
            }
            for ym in 1u32..1 << ys.len() {
                if (ym.count_ones() as usize) < ly {
                    continue;
                }
                let mut e = 0;
                for (i, &x) in xs.iter().enumerate() {
                    for (j, &y) in ys.iter().enumerate() {
                        if xm >> i & 1 == 1 && ym >> j & 1 == 1 && g.has_arc(x, y) {
                            e += 1;
                        }
                    }
                }
                let dens = e as f64 / (xm.count_ones() * ym.count_ones()) as f64;
                best = best.max((dens - d).abs());
            }
        }
        best
    }

    #[test]
    fn density_basics() {
        let (g, x, y) = bipartite(3, 4, |_, _| true);
        assert_eq!(density(&g, &x, &y).unwrap(), 1.0);
        assert_eq!(density(&g, &y, &x).unwrap(), 0.0);
        assert!(density(&g, &[], &y).is_err());
        assert!(density(&g, &[0, 1], &[1, 2]).is_err());
        let g = gen_random_tournament(200, 9);
        let (x, y): (Vec<usize>, Vec<usize>) = ((0..100).collect(), (100..200).collect());
        let d = density(&g, &x, &y).unwrap();
        assert!((d - 0.5).abs() <= 0.15);
        assert!((d + density(&g, &y, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_pair_is_regular() {
        let (g, x, y) = bipartite(6, 6, |_, _| true);
        for eps in [0.05, 0.3, 0.9] {
            assert!(check_eps_regular(&g, &x, &y, eps, CheckMode::Exhaustive).unwrap().regular);
        }
    }

    #[test]
    fn half_split_is_irregular() {
        let (g, x, y) = bipartite(10, 10, |i, _| i < 5);
        let v = check_eps_regular(&g, &x, &y, 0.4, CheckMode::Exhaustive).unwrap();
        assert!(!v.regular);
        let (xp, yp) = v.counterexample.unwrap();
        assert_eq!(xp, (0..5).collect::<Vec<_>>());
        assert_eq!(yp, y);
        assert!((v.max_deviation - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        for seed in 0..12 {
            let g = gen_random_tournament(14, seed);
            let (x, y): (Vec<usize>, Vec<usize>) = ((0..7).collect(), (7..14).collect());
            for eps in [0.2, 0.35] {
                let v = check_eps_regular(&g, &x, &y, eps, CheckMode::Exhaustive).unwrap();
                assert!((v.max_deviation - brute_max_deviation(&g, &x, &y, eps)).abs() < 1e-12);
                let r = check_eps_regular(&g, &y, &x, eps, CheckMode::Exhaustive).unwrap();
                assert!((v.max_deviation - r.max_deviation).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_pair_passes_sampled() {
        let g = gen_random_tournament(400, 5);
        let (x, y): (Vec<usize>, Vec<usize>) = ((0..200).collect(), (200..400).collect());
        let v = check_eps_regular(&g, &x, &y, 0.2, CheckMode::Sampled { count: 200, seed: 1 }).unwrap();
        assert!(v.regular, "{}", v.max_deviation);
        assert!(check_eps_regular(&g, &x, &y, 0.2, CheckMode::Exhaustive).is_err());
    }

    #[test]
    fn cluster_cycle_checks() {
        let mut passes = 0;
        for seed in 0..20 {
            let (g, c) = gen_cluster_cycle(5, 50, 0.5, 0.0, seed).unwrap();
            passes += check_cluster_cycle(&g, &c, 0.25, 0.3, 100, seed).unwrap().pass as usize;
        }
        assert!(passes >= 18, "{passes}");

        let g = gen_transitive_tournament(30);
        let c = ClusterCycle::new((0..3).map(|i| (i * 10..i * 10 + 10).collect()).collect(), 0.1, 0.3).unwrap();
        let v = check_cluster_cycle(&g, &c, 0.25, 0.3, 10, 0).unwrap();
        assert!(!v.pass);
        assert_eq!(v.pairs[2].density, 0.0);

        let (g, c) = gen_cluster_cycle(3, 1, 1.0, 0.0, 0).unwrap();
        let v = check_cluster_cycle(&g, &c, 0.25, 0.3, 10, 0).unwrap();
        assert!(v.pairs.iter().all(|p| p.density == 1.0));
    }
}

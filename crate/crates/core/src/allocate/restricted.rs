use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::alloc::{allocate, Allocation};
use super::embed::{check_root_vertex, embed_allocated, embed_small_tree_uniform, EmbedParams};
use super::leading::{embed_leading_path_component, LeadingOptions};
use crate::digraph::{DirectedTree, Embedding, Tournament};
use crate::error::{failed, invalid, precondition, Error, Result};
use crate::exact::{Search, SearchOutcome};
use crate::num;
use crate::regular::ClusterCycle;
use crate::rng::{self, derive};
use crate::structure::leading_paths;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictParams {
    pub embed: EmbedParams,
    /// `|U| ≥ λn`; also sizes the `Y` sets.
    pub lambda: f64,
    /// Declared regularity of the random restrictions.
    pub eps_prime: f64,
    /// Lower bound on `|Y_i|` for `i` past the first cluster.
    pub y_floor: usize,
    /// Large components get clusters of `(1+l_pad)|T_τ|/k` vertices, or all
    /// the free `X` space when that is smaller.
    pub l_pad: f64,
    /// Smallest restriction cluster, so reserved sets still find room.
    pub z_floor: usize,
    /// Skip the `|H| ≤ δn/7k` guard.
    pub override_h_budget: bool,
    /// Attempts per component (fresh restrictions and allocations).
    pub retries: usize,
    /// Full reruns with fresh seeds after a failed run.
    pub restarts: usize,
    /// Allocations drawn per large component; the best balanced is kept.
    pub alloc_tries: usize,
}

impl RestrictParams {
    /// `δ = dλ/8k`.
    pub fn delta(&self, d: f64, k: usize) -> f64 {
        d * self.lambda / (8.0 * k as f64)
    }

    /// Largest `H` the guard admits for a tree on `n` vertices.
    pub fn h_budget(&self, d: f64, k: usize, n: usize) -> f64 {
        self.delta(d, k) * n as f64 / (7.0 * k as f64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComponentCounts {
    pub j: usize,
    pub l: usize,
    pub q: usize,
}

#[derive(Clone, Debug)]
pub struct RestrictedEmbedding {
    pub embedding: Embedding,
    /// `H` with the root added.
    pub h: Vec<usize>,
    /// Cluster treated as first (largest overlap with `U`).
    pub rotation: usize,
    pub components: ComponentCounts,
}

/// Disjoint `X_i, Y_i ⊆ V_i` with `Y_1 ⊆ U`: `Y` sets are pruned until
/// every member has `dλm/2` in-neighbours in the previous and out-neighbours
/// in the next `Y`; `X_i` takes up to `(1+α/2)m` vertices meeting the same
/// condition.
fn carve(
    g: &Tournament,
    cycle: &ClusterCycle,
    u: &FixedBitSet,
    m: f64,
    p: &RestrictParams,
) -> Result<(Vec<FixedBitSet>, Vec<FixedBitSet>)> {
    let k = cycle.k();
    let d = cycle.d;
    let y_target = num::round_half_up(3.0 * p.lambda * m / 4.0).max(1);
    let y = y_target.max(p.y_floor);
    let y_wide = y + num::ceil(d * d * y as f64);
    let thr = num::ceil(d * p.lambda * m / 2.0);
    let mut ys: Vec<FixedBitSet> = (0..k)
        .map(|i| {
            let pick: Vec<usize> = if i == 0 {
                cycle.cluster(0).iter().copied().filter(|&v| u.contains(v)).take(y_wide).collect()
            } else {
                cycle.cluster(i as isize).iter().copied().take(y_wide).collect()
            };
            g.set_of(&pick)
        })
        .collect();
    let ok = |ys: &[FixedBitSet], i: usize, v: usize| {
        g.in_degree_in(v, &ys[(i + k - 1) % k]) >= thr && g.out_degree_in(v, &ys[(i + 1) % k]) >= thr
    };
    loop {
        let mut changed = false;
        for i in 0..k {
            let drop: Vec<usize> = ys[i].ones().filter(|&v| !ok(&ys, i, v)).collect();
            changed |= !drop.is_empty();
            for v in drop {
                ys[i].set(v, false);
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(i) = (0..k).find(|&i| ys[i].count_ones(..) < y_target) {
        return failed("carve", format!("Y_{i} keeps {} vertices, needs {y_target}", ys[i].count_ones(..)));
    }
    let x_size = num::floor((1.0 + p.embed.alpha / 2.0) * m);
    let xs = (0..k)
        .map(|i| {
            let pick: Vec<usize> = cycle
                .cluster(i as isize)
                .iter()
                .copied()
                .filter(|&v| !ys[i].contains(v) && ok(&ys, i, v))
                .take(x_size)
                .collect();
            g.set_of(&pick)
        })
        .collect();
    Ok((xs, ys))
}

/// Embeds `T` rooted at `root` with every vertex of `H` on `U`. Vertices of
/// `P_k(H ∪ {root})` and their children go to the `Y` sets, everything else
/// to the `X` sets. Components of `T[P_k]` are embedded as leading-path
/// components, large components of the rest by allocate-then-embed on a
/// random restriction, small ones by the small-tree embedding.
#[allow(clippy::too_many_arguments)]
pub fn embed_with_restrictions(
    g: &Tournament,
    t: &DirectedTree,
    h: &[usize],
    root: usize,
    cycle: &ClusterCycle,
    u: &[usize],
    p: &RestrictParams,
    seed: u64,
) -> Result<RestrictedEmbedding> {
    let mut last = None;
    for r in 0..=p.restarts {
        match run_once(g, t, h, root, cycle, u, p, derive(seed, r as u64)) {
            Err(e @ Error::EmbedFailed { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap())
}

#[allow(clippy::too_many_arguments)]
fn run_once(
    g: &Tournament,
    t: &DirectedTree,
    h: &[usize],
    root: usize,
    cycle: &ClusterCycle,
    u: &[usize],
    p: &RestrictParams,
    seed: u64,
) -> Result<RestrictedEmbedding> {
    let n = t.n();
    let k = cycle.k();
    let alpha = p.embed.alpha;
    if root >= n || h.iter().any(|&x| x >= n) {
        return invalid("tree vertex out of range");
    }
    if !(p.lambda > 0.0 && p.lambda <= alpha / 4.0 + 1e-12) {
        return invalid(format!("need 0 < lambda <= alpha/4, got lambda={}", p.lambda));
    }
    cycle.check_hosted(g)?;
    if (u.len() as f64) < p.lambda * n as f64 - 1e-9 {
        return precondition(format!("|U| = {} is below lambda*n = {:.1}", u.len(), p.lambda * n as f64));
    }
    let budget = p.h_budget(cycle.d, k, n);
    if !p.override_h_budget && h.len() as f64 > budget + 1e-9 {
        return precondition(format!("|H| = {} exceeds delta*n/7k = {budget:.3}", h.len()));
    }
    let u_set = g.set_of(u);
    let rotation = (0..k)
        .max_by_key(|&i| (cycle.cluster(i as isize).iter().filter(|&&v| u_set.contains(v)).count(), k - i))
        .unwrap();
    let cyc = cycle.rotated(rotation);
    let m = cyc.m() as f64 / (1.0 + alpha);
    let mut hh: Vec<usize> = h.to_vec();
    if !hh.contains(&root) {
        hh.push(root);
    }
    let pk = leading_paths(t, root, &hh, k);
    let rt = t.rerooted(root);
    let mut in_p = vec![false; n];
    for &x in &pk {
        in_p[x] = true;
    }
    let out_p: Vec<bool> = in_p.iter().map(|b| !b).collect();
    let pos = {
        let mut pos = vec![0; n];
        for (i, v) in rt.preorder().into_iter().enumerate() {
            pos[v] = i;
        }
        pos
    };
    let mut parts: Vec<(bool, Vec<usize>)> = rt.components(&in_p).into_iter().map(|c| (true, c)).collect();
    parts.extend(rt.components(&out_p).into_iter().map(|c| (false, c)));
    parts.sort_by_key(|(_, c)| pos[c[0]]);

    let (mut xs, mut ys) = carve(g, &cyc, &u_set, m, p)?;
    let idx = cyc.index_of(g.n());
    let in_h = {
        let mut v = vec![false; n];
        for &x in &hh {
            v[x] = true;
        }
        v
    };
    let mut phi = Embedding::empty(n);
    let mut counts = ComponentCounts::default();
    let sqrt_n = (n as f64).sqrt();
    let v_need = num::ceil(alpha * cyc.d * m / 8.0);

    for (tau, (is_j, comp)) in parts.iter().enumerate() {
        let sub = rt.induced(comp)?;
        let s = comp.len();
        let taken: Vec<usize>;
        if tau == 0 {
            counts.j += 1;
            let out = Search::new(&sub, g).avail(ys[0].clone()).node_limit(p.embed.node_limit).run()?;
            let SearchOutcome::Found(e) = out else {
                return failed("root-part", format!("{} embedding {s} vertices in Y_1", out.label()));
            };
            taken = e.total();
        } else {
            let room = s as f64 / k as f64 + alpha * m / 4.0;
            if let Some(i) = (0..k).find(|&i| (xs[i].count_ones(..) as f64) < room - 1e-9) {
                return failed("capacity", format!("X_{i} has {} free, needs {room:.1}", xs[i].count_ones(..)));
            }
            let x0 = comp[0];
            let parent = rt.parent(x0).expect("non-root part has a parent");
            let anchor = phi.get(parent).expect("parent part embedded");
            let down = rt.is_down(x0);
            let j = if down { (idx[anchor] + 1) % k } else { (idx[anchor] + k - 1) % k };
            let nbrs = g.nbr_set(anchor, down);
            let seed_tau = derive(seed, tau as u64);
            if *is_j {
                counts.j += 1;
                taken = embed_j(g, &sub, comp, &in_h, hh.len(), &ys, j, nbrs, &cyc, p)?;
            } else {
                let v_tau = ys[j]
                    .ones()
                    .find(|&w| {
                        nbrs.contains(w)
                            && g.out_degree_in(w, &xs[(j + 1) % k]) >= v_need
                            && g.in_degree_in(w, &xs[(j + k - 1) % k]) >= v_need
                    })
                    .ok_or_else(|| Error::EmbedFailed {
                        step: "v_tau".into(),
                        reason: format!("no vertex of Y_{j} next to the parent with {v_need} X-neighbours"),
                    })?;
                let large = s as f64 >= sqrt_n;
                let room = (0..k).map(|i| xs[i].count_ones(..)).min().unwrap();
                let (z, params) = if large {
                    counts.l += 1;
                    // capped by the free X space; the slack actually left sets the inner alpha
                    let z = num::ceil((1.0 + p.l_pad) * s as f64 / k as f64).max(p.z_floor).min(room);
                    let slack = z as f64 * k as f64 / s as f64 - 1.0;
                    if slack <= 0.0 {
                        return failed("capacity", format!("X space {room} cannot host a component of {s}"));
                    }
                    (z, EmbedParams { alpha: slack.min(1.0), ..p.embed })
                } else {
                    counts.q += 1;
                    let need = num::ceil((1.0 + alpha) * s as f64);
                    if room < need {
                        return failed("capacity", format!("X space {room} cannot host a component of {s}"));
                    }
                    (num::ceil(alpha * m / 8.0).max(need).max(p.z_floor).min(room), p.embed)
                };
                let (eps, d) = if large { (2.0 * p.eps_prime, cyc.d / 8.0) } else { (16.0 * cyc.eps / alpha, cyc.d / 2.0) };
                let mut last = None;
                let mut got = None;
                for a in 0..p.retries.max(1) {
                    let zc = restriction(&xs, j, v_tau, z, eps.min(1.0), d, derive(seed_tau, a as u64))?;
                    if check_root_vertex(g, &zc, v_tau, &params).is_err() {
                        last = Some(Error::EmbedFailed {
                            step: "restriction".into(),
                            reason: "v_tau lacks neighbours in the restriction".into(),
                        });
                        continue;
                    }
                    let r = if large {
                        let free: Vec<usize> = (0..k).map(|i| xs[(j + i) % k].count_ones(..)).collect();
                        let alloc = balanced_allocation(&sub, &free, p.alloc_tries, derive(seed_tau, 1000 + a as u64))?;
                        embed_allocated(g, &sub, &zc, &alloc, v_tau, &params, derive(seed_tau, 2000 + a as u64))
                            .map(|b| b.embedding)
                    } else {
                        embed_small_tree_uniform(g, &sub, &zc, v_tau, &params, derive(seed_tau, 1000 + a as u64))
                            .map(|b| b.embedding)
                    };
                    match r {
                        Ok(e) => {
                            got = Some(e);
                            break;
                        }
                        Err(e @ (Error::EmbedFailed { .. } | Error::Precondition(_))) => last = Some(e),
                        Err(e) => return Err(e),
                    }
                }
                let Some(e) = got else {
                    let why = last.map_or(String::new(), |e| e.to_string());
                    return failed(if large { "L" } else { "Q" }, format!("component of {s}: {why}"));
                };
                taken = e.total();
            }
        }
        for (i, &x) in comp.iter().enumerate() {
            let v = taken[i];
            phi.set(x, v);
            let c = idx[v];
            xs[c].set(v, false);
            ys[c].set(v, false);
        }
    }
    debug_assert!(phi.is_total());
    if let Some(&x) = hh.iter().find(|&&x| !u_set.contains(phi.get(x).unwrap())) {
        return Err(Error::BoundViolated(format!("H vertex {x} embedded outside U")));
    }
    Ok(RestrictedEmbedding {
        embedding: phi,
        h: hh,
        rotation,
        components: counts,
    })
}

#[allow(clippy::too_many_arguments)]
fn embed_j(
    g: &Tournament,
    sub: &DirectedTree,
    comp: &[usize],
    in_h: &[bool],
    h_total: usize,
    ys: &[FixedBitSet],
    j: usize,
    nbrs: &FixedBitSet,
    cyc: &ClusterCycle,
    p: &RestrictParams,
) -> Result<Vec<usize>> {
    let k = ys.len();
    let lists: Vec<Vec<usize>> = (0..k)
        .map(|i| ys[i].ones().filter(|&v| i != j || nbrs.contains(v)).collect())
        .collect();
    let z = lists.iter().map(Vec::len).min().unwrap();
    if z == 0 {
        return failed("J", "an empty Y set");
    }
    let lam = p.lambda;
    let zc = ClusterCycle::new(
        lists.into_iter().map(|l| l[..z].to_vec()).collect(),
        (8.0 * cyc.eps / (cyc.d * lam)).min(1.0),
        cyc.d / 2.0,
    )?;
    let h_local: Vec<usize> = (0..comp.len()).filter(|&i| in_h[comp[i]]).collect();
    let opts = LeadingOptions {
        override_budget: p.override_h_budget,
        node_limit: p.embed.node_limit,
        ..Default::default()
    };
    let r = embed_leading_path_component(g, sub, &h_local, h_total, &zc, j, &opts)?;
    Ok(r.embedding.total())
}

/// Of `tries` allocations of `t` from its root, the one whose heaviest
/// cluster uses the smallest share of that cluster's free space.
fn balanced_allocation(t: &DirectedTree, free: &[usize], tries: usize, seed: u64) -> Result<Allocation> {
    let k = free.len();
    let mut best: Option<(f64, Allocation)> = None;
    for a in 0..tries.max(1) {
        let alloc = allocate(t, t.root(), k, derive(seed, a as u64))?;
        let score = alloc
            .loads()
            .iter()
            .zip(free)
            .map(|(&l, &f)| l as f64 / f.max(1) as f64)
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(b, _)| score < *b) {
            best = Some((score, alloc));
        }
    }
    Ok(best.unwrap().1)
}

/// Uniform `z`-subsets of the free `X_i`, with `v_tau` swapped into
/// cluster `j`, rotated so cluster `j` comes first.
#[allow(clippy::too_many_arguments)]
fn restriction(
    xs: &[FixedBitSet],
    j: usize,
    v_tau: usize,
    z: usize,
    eps: f64,
    d: f64,
    seed: u64,
) -> Result<ClusterCycle> {
    let k = xs.len();
    let mut r = rng::stream(seed, 0x2e5);
    let mut clusters = Vec::with_capacity(k);
    for off in 0..k {
        let i = (j + off) % k;
        let mut free: Vec<usize> = xs[i].ones().collect();
        if free.len() < z {
            return failed("capacity", format!("X_{i} has {} free, restriction needs {z}", free.len()));
        }
        let mut pick = free.partial_shuffle(&mut r, z).0.to_vec();
        pick.sort_unstable();
        if off == 0 {
            pick.pop();
            pick.insert(0, v_tau);
        }
        clusters.push(pick);
    }
    ClusterCycle::new(clusters, eps, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_cluster_cycle, gen_random_tree};
    use crate::digraph::validate_embedding;

    fn params() -> RestrictParams {
        RestrictParams {
            embed: EmbedParams::new(0.25, 0.05, 0.3).unwrap(),
            lambda: 0.075,
            eps_prime: 0.2,
            y_floor: 32,
            l_pad: 0.3,
            z_floor: 48,
            override_h_budget: false,
            retries: 3,
            restarts: 2,
            alloc_tries: 64,
        }
    }

    #[test]
    fn root_only_lands_in_u() {
        let (g, c) = gen_cluster_cycle(3, 100, 0.6, 0.3, 0).unwrap();
        let p = params();
        let t = gen_random_tree(40, Some(3), 0).unwrap();
        let u: Vec<usize> = c.cluster(0).to_vec();
        let r = embed_with_restrictions(&g, &t, &[], 0, &c, &u, &p, 0).unwrap();
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
        assert!(u.contains(&r.embedding.get(0).unwrap()));
        assert_eq!(r.rotation, 0);
        assert_eq!(r.h, vec![0]);
    }

    #[test]
    fn guards() {
        let (g, c) = gen_cluster_cycle(3, 100, 0.6, 0.3, 0).unwrap();
        let p = params();
        let t = gen_random_tree(200, Some(3), 0).unwrap();
        let few: Vec<usize> = c.cluster(1)[..10].to_vec();
        assert!(matches!(
            embed_with_restrictions(&g, &t, &[], 0, &c, &few, &p, 0),
            Err(Error::Precondition(_))
        ));
        let u: Vec<usize> = c.cluster(1).to_vec();
        assert!(matches!(
            embed_with_restrictions(&g, &t, &[5], 0, &c, &u, &p, 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn far_endpoint_of_path_in_u() {
        let (g, c) = gen_cluster_cycle(5, 400, 0.5, 0.0, 3).unwrap();
        let mut p = params();
        p.override_h_budget = true;
        let n = 1500;
        let mut coin = rng::stream(9, 0);
        let down: Vec<bool> = (1..n).map(|_| rand::Rng::gen_bool(&mut coin, 0.5)).collect();
        let t = DirectedTree::path(&down);
        let u: Vec<usize> = c.cluster(2)[..150].to_vec();
        let mut ok = 0;
        for seed in 0..5 {
            match embed_with_restrictions(&g, &t, &[n - 1], 0, &c, &u, &p, seed) {
                Ok(r) => {
                    ok += 1;
                    assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
                    assert!(u.contains(&r.embedding.get(n - 1).unwrap()));
                    assert_eq!(r.rotation, 2);
                    assert!(r.components.j >= 2);
                }
                Err(e) => println!("{e}"),
            }
        }
        assert!(ok >= 4, "{ok}");
    }
}

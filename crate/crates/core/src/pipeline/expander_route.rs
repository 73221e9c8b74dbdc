//! Embedding into a robust expander: exact search for small trees, a
//! verified cluster cycle and allocate-then-embed for bounded degree, and
//! the extended tree with restricted embedding and greedy attachment
//! otherwise.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::Serialize;

use super::Params;
use crate::allocate::{check_root_vertex, embed_bounded_tree_in_cycle, embed_with_restrictions};
use crate::digraph::{validate_embedding, DirectedTree, Embedding, Tournament};
use crate::error::{failed, precondition, Error, Result};
use crate::exact::{Search, SearchOutcome};
use crate::expander::{is_robust_outexpander, CheckMode, MAX_EXHAUSTIVE};
use crate::num;
use crate::regular::{check_cluster_cycle, ClusterCycle};
use crate::rng::{derive, stream};
use crate::structure::extended_tree;

/// Clusters smaller than this make the restricted embedding pointless;
/// the extended tree then goes to exact search.
pub const MIN_RESTRICTED_CLUSTER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpanderPath {
    Exact,
    Bounded,
    Restricted,
    /// Extended tree placed by exact search inside `U'`.
    ExactCore,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleInfo {
    /// Partitions drawn, including the accepted one.
    pub attempts: usize,
    pub cluster_size: usize,
    /// Declared density of the accepted cycle.
    pub min_density: f64,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpanderReport {
    pub path: ExpanderPath,
    pub cycle: Option<CycleInfo>,
    /// Allocations tried by the bounded route.
    pub allocations: usize,
    pub ext_size: usize,
    pub heavy: usize,
    /// Components of `T − T_ext`.
    pub attached: usize,
    /// Attachments that needed the whole free pool.
    pub wide_attachments: usize,
    pub u_size: usize,
    pub lambda: Option<f64>,
    /// Which of the two degree profiles `U'` was chosen for: out-first or in-first.
    pub out_first: Option<bool>,
}

impl ExpanderReport {
    fn new(path: ExpanderPath) -> Self {
        ExpanderReport {
            path,
            cycle: None,
            allocations: 0,
            ext_size: 0,
            heavy: 0,
            attached: 0,
            wide_attachments: 0,
            u_size: 0,
            lambda: None,
            out_first: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpanderEmbedding {
    pub embedding: Embedding,
    pub report: ExpanderReport,
}

fn check_mode(n: usize, params: &Params, seed: u64) -> CheckMode {
    if n <= MAX_EXHAUSTIVE {
        CheckMode::Exhaustive
    } else {
        CheckMode::Sampled { count: params.expander_samples, seed }
    }
}

/// Embeds `T` into `G` after the expander check passes. Needs
/// `|G| ≥ 2(1+α)|T|`, or `(1+α)|T|` when `Δ(T)` is at most the preset's
/// bounded degree.
pub fn embed_unbounded_in_expander(t: &DirectedTree, g: &Tournament, params: &Params, seed: u64) -> Result<ExpanderEmbedding> {
    let v = is_robust_outexpander(g, params.mu, params.nu, check_mode(g.n(), params, derive(seed, 0)))?;
    if !v.is_expander {
        return precondition("host fails the robust outexpander check");
    }
    let pool: Vec<usize> = (0..g.n()).collect();
    embed_in_pool(t, g, &pool, params, derive(seed, 1))
}

/// The same on the host vertices `pool`, without the expander check.
pub(crate) fn embed_in_pool(t: &DirectedTree, g: &Tournament, pool: &[usize], params: &Params, seed: u64) -> Result<ExpanderEmbedding> {
    let n = t.n();
    let (p, a) = (pool.len() as f64, params.alpha);
    let bounded = t.max_degree() <= params.max_degree;
    if p + 1e-9 < 2.0 * (1.0 + a) * n as f64 && !(bounded && p + 1e-9 >= (1.0 + a) * n as f64) {
        return precondition(format!("{} host vertices for a {n}-vertex tree of max degree {}", pool.len(), t.max_degree()));
    }
    let out = if n <= params.exact_cutoff || pool.len() >= 3 * n {
        match Search::new(t, g).avail(g.set_of(pool)).node_limit(params.node_limit).run()? {
            SearchOutcome::Found(e) => Some(ExpanderEmbedding { embedding: e, report: ExpanderReport::new(ExpanderPath::Exact) }),
            _ => None,
        }
    } else {
        None
    };
    let out = match out {
        Some(o) => o,
        None if bounded => bounded_route(t, g, pool, params, seed)?,
        None => unbounded_route(t, g, pool, params, seed)?,
    };
    if let Err(v) = validate_embedding(t, g, &out.embedding) {
        return Err(Error::BoundViolated(format!("expander route output invalid: {v:?}")));
    }
    Ok(out)
}

/// A cycle of `k` equal random clusters from `pool`, the first one
/// holding all of `must` (which must fit in it), ordered greedily by forward density and verified at density
/// `d/2`. Clusters hold between `(1+α)·size/k` and `2(1+α)·size/k`
/// vertices and leave at least `spare` pool vertices outside. The accepted
/// cycle declares its measured minimum density.
fn build_cycle(
    g: &Tournament,
    pool: &[usize],
    must: &[usize],
    size: usize,
    spare: usize,
    params: &Params,
    seed: u64,
) -> Result<(ClusterCycle, CycleInfo)> {
    let k = params.k;
    let a = params.alpha;
    let m_min = num::ceil((1.0 + a) * size as f64 / k as f64).max(1);
    let m = (pool.len().saturating_sub(spare) / k).min(num::ceil(2.0 * (1.0 + a) * size as f64 / k as f64)).max(m_min);
    if k * m > pool.len() || must.len() > m {
        return precondition(format!("{} vertices cannot hold {k} clusters of {m}", pool.len()));
    }
    let mut rng = stream(seed, 0);
    let must_set = g.set_of(must);
    let mut rest: Vec<usize> = pool.iter().copied().filter(|&v| !must_set.contains(v)).collect();
    rest.shuffle(&mut rng);
    // `must` fills the front of the first cluster
    let chosen: Vec<usize> = must.iter().copied().chain(rest).take(k * m).collect();
    let clusters: Vec<Vec<usize>> = chosen.chunks(m).map(|c| c.to_vec()).collect();
    let sets: Vec<FixedBitSet> = clusters.iter().map(|c| g.set_of(c)).collect();
    let mut order = vec![0];
    let mut left: Vec<usize> = (1..k).collect();
    while !left.is_empty() {
        let cur = *order.last().unwrap();
        let (i, _) = left
            .iter()
            .enumerate()
            .max_by_key(|&(_, &j)| (g.arcs_between(&clusters[cur], &sets[j]), std::cmp::Reverse(j)))
            .unwrap();
        order.push(left.remove(i));
    }
    let ordered: Vec<Vec<usize>> = order.iter().map(|&i| clusters[i].clone()).collect();
    let cycle = ClusterCycle::new(ordered, params.eps, params.d)?;
    let v = check_cluster_cycle(g, &cycle, params.eps, params.d / 2.0, params.regularity_samples, derive(seed, 1))?;
    let min_density = v.pairs.iter().map(|p| p.density).fold(f64::INFINITY, f64::min);
    let max_deviation = v.pairs.iter().map(|p| p.max_deviation).fold(0.0, f64::max);
    if !v.pass {
        return failed("cycle", format!("partition fails verification: min density {min_density:.3}, max deviation {max_deviation:.3}"));
    }
    let info = CycleInfo { attempts: 1, cluster_size: m, min_density, max_deviation };
    Ok((ClusterCycle { d: min_density, ..cycle }, info))
}

fn cycle_with_retries(
    g: &Tournament,
    pool: &[usize],
    must: &[usize],
    size: usize,
    spare: usize,
    params: &Params,
    seed: u64,
) -> Result<(ClusterCycle, CycleInfo)> {
    let mut last = None;
    for attempt in 0..params.cycle_attempts.max(1) {
        match build_cycle(g, pool, must, size, spare, params, derive(seed, attempt as u64)) {
            Ok((c, mut info)) => {
                info.attempts = attempt + 1;
                return Ok((c, info));
            }
            Err(e @ Error::EmbedFailed { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn bounded_route(t: &DirectedTree, g: &Tournament, pool: &[usize], params: &Params, seed: u64) -> Result<ExpanderEmbedding> {
    let ep = params.embed_params()?;
    let mut last = None;
    let mut allocations = 0;
    for attempt in 0..params.cycle_attempts.max(1) {
        let s = derive(seed, attempt as u64);
        let (cycle, info) = match build_cycle(g, pool, &[], t.n(), 0, params, s) {
            Ok(c) => c,
            Err(e @ Error::EmbedFailed { .. }) => {
                last = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        };
        let Some(v_star) = cycle.cluster(0).iter().copied().find(|&v| check_root_vertex(g, &cycle, v, &ep).is_ok()) else {
            last = Some(Error::EmbedFailed { step: "root".into(), reason: "no first-cluster vertex passes the root check".into() });
            continue;
        };
        match embed_bounded_tree_in_cycle(g, t, &cycle, v_star, params.cycle_retries, &ep, derive(s, 1)) {
            Ok(b) => {
                allocations += b.attempts;
                let mut report = ExpanderReport::new(ExpanderPath::Bounded);
                report.cycle = Some(CycleInfo { attempts: attempt + 1, ..info });
                report.allocations = allocations;
                report.ext_size = t.n();
                return Ok(ExpanderEmbedding { embedding: b.embedding, report });
            }
            Err(e @ (Error::EmbedFailed { .. } | Error::Precondition(_))) => {
                allocations += params.cycle_retries;
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    let why = last.map_or_else(String::new, |e| e.to_string());
    failed("bounded", format!("{} cycles tried; last: {why}", params.cycle_attempts))
}

struct Branch {
    verts: Vec<usize>,
    /// Vertex of the branch joined to `T_ext`.
    entry: usize,
    anchor: usize,
    away: bool,
}

fn unbounded_route(t: &DirectedTree, g: &Tournament, pool: &[usize], params: &Params, seed: u64) -> Result<ExpanderEmbedding> {
    let n = t.n();
    let nf = n as f64;
    let a = params.alpha;
    let (root, in_ext, heavy) = match extended_tree(t, params.ext_delta, params.ext_k, params.omega) {
        Ok(e) => {
            let mut flags = vec![false; n];
            for &x in &e.ext {
                flags[x] = true;
            }
            (e.root, flags, e.heavy)
        }
        // no heaviness level: keep the whole tree
        Err(Error::Precondition(_)) => (t.root(), vec![true; n], Vec::new()),
        Err(e) => return Err(e),
    };
    let ext: Vec<usize> = std::iter::once(root).chain((0..n).filter(|&x| in_ext[x] && x != root)).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &x) in ext.iter().enumerate() {
        local[x] = i;
    }
    let text = t.induced(&ext)?;
    let outside: Vec<bool> = in_ext.iter().map(|&b| !b).collect();
    let branches: Vec<Branch> = t
        .components(&outside)
        .into_iter()
        .map(|verts| {
            let (entry, anchor) = verts
                .iter()
                .find_map(|&y| t.neighbours(y).find(|&u| in_ext[u]).map(|u| (y, u)))
                .expect("every branch hangs from the extended tree");
            let away = t.arc_between(anchor, entry) == Some(true);
            Branch { verts, entry, anchor, away }
        })
        .collect();
    let x = ext.len();
    let y: usize = branches.iter().filter(|b| b.away).map(|b| b.verts.len()).sum();
    let z = n - x - y;
    let pool_set = g.set_of(pool);

    // U_0: vertices with room for the branches on both sides
    let need_out = y as f64 + x as f64 / 2.0 + a * nf / 4.0;
    let need_in = z as f64 + x as f64 / 2.0 + a * nf / 4.0;
    let mut ranked: Vec<(f64, usize)> = pool
        .iter()
        .map(|&v| {
            let (o, i) = (g.out_degree_in(v, &pool_set) as f64, g.in_degree_in(v, &pool_set) as f64);
            ((o - need_out).min(i - need_in), v)
        })
        .filter(|&(margin, _)| margin >= 0.0)
        .collect();
    ranked.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
    let u0: Vec<usize> = ranked.iter().take(num::round_half_up(a * nf / 8.0).max(1)).map(|&(_, v)| v).collect();
    if u0.is_empty() {
        return failed("u0", "no vertex has the required in- and out-degree");
    }

    let mut report;
    let mut phi = Embedding::empty(n);
    let mut used = FixedBitSet::with_capacity(g.n());
    let out_first;
    let m_needed = num::ceil((1.0 + a) * x as f64 / params.k as f64);
    if x as f64 >= a * nf / 50.0 && m_needed >= MIN_RESTRICTED_CLUSTER {
        // outside X: about twice the branch sizes plus slack, so
        // anchors keep y + z + αn/20 neighbours there
        let spare = 2 * (y + z) + num::ceil(a * nf / 5.0);
        let (cycle, info) = cycle_with_retries(g, pool, &u0, x, spare, params, derive(seed, 1))?;
        let xset = g.set_of(&cycle.all_vertices());
        let mut rest = pool_set.clone();
        rest.difference_with(&xset);
        let (u_prime, of) = choose_u_prime(g, &u0, &rest, y, z, a * nf / 20.0);
        if u_prime.is_empty() {
            return failed("u-prime", "no vertex of U meets either degree profile outside X");
        }
        out_first = of;
        let lambda = params.lambda.min(u_prime.len() as f64 / x as f64).min(a / 4.0);
        let rp = params.restrict_params(lambda)?;
        let h: Vec<usize> = heavy.iter().map(|&v| local[v]).collect();
        let r = embed_with_restrictions(g, &text, &h, 0, &cycle, &u_prime, &rp, derive(seed, 2))?;
        for (i, &xv) in ext.iter().enumerate() {
            let v = r.embedding.get(i).unwrap();
            phi.set(xv, v);
            used.insert(v);
        }
        report = ExpanderReport::new(ExpanderPath::Restricted);
        report.cycle = Some(info);
        report.u_size = u_prime.len();
        report.lambda = Some(lambda);
    } else {
        let mut rest = pool_set.clone();
        for &v in &u0 {
            rest.set(v, false);
        }
        let (u_prime, of) = choose_u_prime(g, &u0, &rest, y, z, a * nf / 20.0);
        out_first = of;
        let uset = g.set_of(if u_prime.is_empty() { &u0 } else { &u_prime });
        let h: Vec<usize> = heavy.iter().map(|&v| local[v]).collect();
        let mut found = Search::new(&text, g).avail(uset.clone()).node_limit(params.node_limit).run()?.found();
        if found.is_none() {
            found = Search::new(&text, g).avail(pool_set.clone()).domain(&h, &uset).node_limit(params.node_limit).run()?.found();
        }
        let e = found.ok_or_else(|| Error::EmbedFailed { step: "core-exact".into(), reason: format!("no copy of the {x}-vertex extended tree") })?;
        for (i, &xv) in ext.iter().enumerate() {
            let v = e.get(i).unwrap();
            phi.set(xv, v);
            used.insert(v);
        }
        report = ExpanderReport::new(ExpanderPath::ExactCore);
        report.u_size = uset.count_ones(..);
    }
    report.ext_size = x;
    report.heavy = heavy.len();
    report.out_first = Some(out_first);

    // branches on the chosen first side, then the rest, larger first
    let mut branches = branches;
    branches.sort_by_key(|b| (b.away != out_first, std::cmp::Reverse(b.verts.len())));
    for b in &branches {
        let u = phi.get(b.anchor).unwrap();
        let mut free = pool_set.clone();
        free.difference_with(&used);
        let mut nbrs = g.nbr_set(u, b.away).clone();
        nbrs.intersect_with(&free);
        let mut verts = vec![b.entry];
        verts.extend(b.verts.iter().copied().filter(|&v| v != b.entry));
        let sub = t.induced(&verts)?;
        let mut e = Search::new(&sub, g).avail(nbrs.clone()).node_limit(params.node_limit).run()?.found();
        if e.is_none() {
            report.wide_attachments += 1;
            e = Search::new(&sub, g).avail(free).domain(&[0], &nbrs).node_limit(params.node_limit).run()?.found();
        }
        let e = e.ok_or_else(|| Error::EmbedFailed {
            step: "attach".into(),
            reason: format!("no room for a {}-vertex branch at its anchor", verts.len()),
        })?;
        for (i, &xv) in verts.iter().enumerate() {
            let v = e.get(i).unwrap();
            phi.set(xv, v);
            used.insert(v);
        }
        report.attached += 1;
    }
    Ok(ExpanderEmbedding { embedding: phi, report })
}

/// The larger of the two vertex classes of `U` with room outside `X`:
/// `y + s` out- and `y + z + s` in-neighbours (out-branches go first), or
/// `y + z + s` out- and `z + s` in-neighbours (in-branches go first).
fn choose_u_prime(g: &Tournament, u: &[usize], outside: &FixedBitSet, y: usize, z: usize, s: f64) -> (Vec<usize>, bool) {
    let (y, z) = (y as f64, z as f64);
    let deg = |v: usize| (g.out_degree_in(v, outside) as f64, g.in_degree_in(v, outside) as f64);
    let a: Vec<usize> = u.iter().copied().filter(|&v| deg(v).0 >= y + s && deg(v).1 >= y + z + s).collect();
    let b: Vec<usize> = u.iter().copied().filter(|&v| deg(v).0 >= y + z + s && deg(v).1 >= z + s).collect();
    if a.len() >= b.len() {
        (a, true)
    } else {
        (b, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_broom, gen_random_tournament, gen_random_tree, gen_transitive_tournament};

    #[test]
    fn small_tree_goes_to_exact_search() {
        let g = gen_random_tournament(120, 1);
        let t = gen_random_tree(40, None, 1).unwrap();
        let r = embed_unbounded_in_expander(&t, &g, &Params::desk(), 0).unwrap();
        assert_eq!(r.report.path, ExpanderPath::Exact);
    }

    #[test]
    fn bounded_tree_uses_a_verified_cycle() {
        let p = Params::desk();
        let g = gen_random_tournament(1040, 2);
        let t = gen_random_tree(400, Some(3), 2).unwrap();
        let r = embed_unbounded_in_expander(&t, &g, &p, 0).unwrap();
        assert_eq!(r.report.path, ExpanderPath::Bounded);
        let c = r.report.cycle.unwrap();
        assert!(c.min_density >= p.d / 2.0);
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
    }

    #[test]
    fn light_tree_is_all_extended() {
        // unbounded degree but no heavy pendant tree: at ext_delta 8 the
        // lowest threshold is 8^4, so T_ext = T and nothing is attached
        let mut p = Params::desk();
        p.exact_cutoff = 0;
        p.max_degree = 2;
        p.ext_delta = 8;
        let g = gen_random_tournament(2600, 3);
        let t = gen_random_tree(1000, Some(5), 3).unwrap();
        let e = extended_tree(&t, p.ext_delta, p.ext_k, p.omega).unwrap();
        assert!(e.heavy.is_empty());
        // the restricted embedding is randomized; the first of a few seeds
        // that succeeds must have gone through it with nothing to attach
        let r = (0..4).find_map(|s| embed_unbounded_in_expander(&t, &g, &p, s).ok()).expect("some seed succeeds");
        assert_eq!(r.report.ext_size, 1000);
        assert_eq!(r.report.attached, 0);
        assert_eq!(r.report.path, ExpanderPath::Restricted);
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
    }

    #[test]
    fn broom_attaches_at_its_heavy_centre() {
        let mut p = Params::desk();
        p.exact_cutoff = 0;
        let t = gen_broom(100, 300, 5);
        let g = gen_random_tournament(1040, 5);
        let r = embed_unbounded_in_expander(&t, &g, &p, 0).unwrap();
        assert!(r.report.heavy >= 1);
        assert!(r.report.attached >= 1);
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
    }

    #[test]
    fn guards() {
        let p = Params::desk();
        let t = gen_random_tree(50, None, 1).unwrap();
        let g = gen_transitive_tournament(200);
        assert!(matches!(embed_unbounded_in_expander(&t, &g, &p, 0), Err(Error::Precondition(_))));
        let g = gen_random_tournament(60, 1);
        assert!(matches!(embed_unbounded_in_expander(&t, &g, &p, 0), Err(Error::Precondition(_))));
    }
}

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::alloc::{allocate, canonical_tree, Allocation};
use crate::digraph::{DirectedTree, Embedding, Tournament};
use crate::error::{failed, invalid, precondition, Error, Result};
use crate::exact::{Search, SearchOutcome, DEFAULT_NODE_LIMIT};
use crate::num;
use crate::regular::{good_set_of_size, ClusterCycle, GoodSetParams};
use crate::rng::derive;
use crate::structure::tidy_ancestral_order;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub good: GoodSetParams,
    /// Cluster slack: clusters have `(1+α)m` vertices for `m` tree vertices.
    pub alpha: f64,
    pub node_limit: u64,
}

impl EmbedParams {
    pub fn new(c: f64, gamma: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return invalid(format!("need 0 < alpha <= 1, got {alpha}"));
        }
        Ok(EmbedParams {
            good: GoodSetParams::new(c, gamma)?,
            alpha,
            node_limit: DEFAULT_NODE_LIMIT,
        })
    }

    /// Tree vertices per cluster the slack is sized for.
    pub fn nominal_m(&self, cycle: &ClusterCycle) -> f64 {
        cycle.m() as f64 / (1.0 + self.alpha)
    }

    fn degree_need(&self, cycle: &ClusterCycle) -> usize {
        num::ceil(self.good.gamma * self.nominal_m(cycle))
    }
}

/// Reservation state after embedding one contracted vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub tau: usize,
    /// Embedded tree vertices with a child still to embed.
    pub open: usize,
    /// Vertices held in reserved sets.
    pub reserved: usize,
}

#[derive(Clone, Debug)]
pub struct AllocatedEmbedding {
    pub embedding: Embedding,
    pub trace: Vec<TraceStep>,
}

/// Checks that `v` sits in the first cluster with enough in-neighbours in
/// the last and out-neighbours in the second.
pub fn check_root_vertex(g: &Tournament, cycle: &ClusterCycle, v: usize, params: &EmbedParams) -> Result<()> {
    if !cycle.cluster(0).contains(&v) {
        return precondition(format!("v* = {v} is not in the first cluster"));
    }
    let need = params.degree_need(cycle);
    let sets = cycle.sets(g.n());
    let (ins, outs) = (g.in_degree_in(v, &sets[cycle.k() - 1]), g.out_degree_in(v, &sets[1]));
    if ins < need || outs < need {
        return precondition(format!("v* = {v} has {ins} in / {outs} out neighbours, needs {need}"));
    }
    Ok(())
}

struct State<'a> {
    g: &'a Tournament,
    k: usize,
    free: Vec<FixedBitSet>,
    /// `reserve[x][dir]`: vertices held for children of `x`; `dir` 1 is a
    /// child reached by an arc out of `x`.
    reserve: Vec<[Vec<usize>; 2]>,
    need: usize,
    reserved: usize,
}

impl State<'_> {
    fn next(&self, j: usize, dir: usize) -> usize {
        if dir == 1 { (j + 1) % self.k } else { (j + self.k - 1) % self.k }
    }

    /// Degree condition for a vertex placed in cluster `j`.
    fn qualifies(&self, v: usize, j: usize) -> bool {
        self.g.out_degree_in(v, &self.free[self.next(j, 1)]) >= self.need
            && self.g.in_degree_in(v, &self.free[self.next(j, 0)]) >= self.need
    }

    fn release(&mut self, x: usize, j: usize) {
        for dir in 0..2 {
            let q = self.next(j, dir);
            for v in std::mem::take(&mut self.reserve[x][dir]) {
                self.free[q].insert(v);
                self.reserved -= 1;
            }
        }
    }
}

/// Embeds `T` with every vertex inside its allocated cluster and the
/// allocation root on `v_star`. Contracted vertices are processed in a tidy
/// order; each within-cluster component goes onto `3s` qualifying vertices
/// of its parent's reserved set by exact search, and every vertex with
/// children in a direction reserves a good set there.
pub fn embed_allocated(
    g: &Tournament,
    t: &DirectedTree,
    cycle: &ClusterCycle,
    alloc: &Allocation,
    v_star: usize,
    params: &EmbedParams,
    seed: u64,
) -> Result<AllocatedEmbedding> {
    let k = cycle.k();
    if alloc.k != k || alloc.cluster.len() != t.n() {
        return invalid("allocation does not match the tree and cycle");
    }
    cycle.check_hosted(g)?;
    check_root_vertex(g, cycle, v_star, params)?;
    let cap = num::floor((1.0 + params.alpha / 2.0) * params.nominal_m(cycle));
    if let Some((i, l)) = alloc.loads().into_iter().enumerate().find(|&(_, l)| l > cap) {
        return precondition(format!("cluster {i} carries {l} tree vertices, limit {cap}"));
    }
    let ct = canonical_tree(t, alloc)?;
    let rt = t.rerooted(alloc.root);
    let n = t.n();
    let mut st = State {
        g,
        k,
        free: cycle.sets(g.n()),
        reserve: vec![[Vec::new(), Vec::new()]; n],
        need: params.degree_need(cycle),
        reserved: 0,
    };
    let base = num::ceil(params.good.gamma * cycle.m() as f64 / 2.0).max(1);
    let a_cap = num::floor(2.0 * params.nominal_m(cycle).sqrt());
    let mut phi = Embedding::empty(n);
    let mut pending = vec![0usize; n];
    let mut open = 0usize;
    let mut trace = Vec::with_capacity(ct.tree.n());

    let reserve = |st: &mut State, x: usize, v: usize, pending: &mut Vec<usize>, open: &mut usize| -> Result<()> {
        let j = alloc.cluster[x];
        for dir in 0..2 {
            let kids: Vec<usize> = rt
                .children(x)
                .iter()
                .copied()
                .filter(|&c| alloc.cluster[c] != j && rt.is_down(c) == (dir == 1))
                .collect();
            if kids.is_empty() {
                continue;
            }
            pending[x] += kids.len();
            let sizes: Vec<usize> = kids.iter().map(|&c| ct.members[ct.part_of[c]].len()).collect();
            let want = sizes.iter().sum::<usize>() + 2 * sizes.iter().max().unwrap();
            let mut size = base.max(want);
            if size > a_cap {
                size = a_cap.max(want);
            }
            let q = st.next(j, dir);
            let nbrs = g.nbr_set(v, dir == 1);
            let (mut good, mut rest) = (Vec::new(), Vec::new());
            for w in st.free[q].ones() {
                if nbrs.contains(w) {
                    if st.qualifies(w, q) { good.push(w) } else { rest.push(w) }
                }
            }
            good.extend(rest);
            if good.len() < size {
                return failed("3", format!("only {} free neighbours in cluster {q}, need {size}", good.len()));
            }
            let a = good_set_of_size(g, cycle, q, &good, size, params.good, derive(seed, 2 * x as u64 + dir as u64))
                .map_err(|e| match e {
                    Error::Precondition(r) => Error::EmbedFailed { step: "3".into(), reason: r },
                    e => e,
                })?;
            for &w in &a {
                st.free[q].set(w, false);
            }
            st.reserved += a.len();
            st.reserve[x][dir] = a;
        }
        if pending[x] > 0 {
            *open += 1;
        }
        Ok(())
    };

    let root = alloc.root;
    phi.set(root, v_star);
    st.free[0].set(v_star, false);
    reserve(&mut st, root, v_star, &mut pending, &mut open)?;
    trace.push(TraceStep { tau: 0, open, reserved: st.reserved });

    let order = tidy_ancestral_order(&ct.tree, 0);
    for (tau, &part) in order.iter().enumerate().skip(1) {
        let members = &ct.members[part];
        let x0 = members[0];
        let p = rt.parent(x0).expect("non-root part has a parent");
        let dir = rt.is_down(x0) as usize;
        let j = alloc.cluster[x0];
        let s = members.len();
        let cand: Vec<usize> = {
            let mut a = st.reserve[p][dir].clone();
            a.sort_unstable();
            a.into_iter().filter(|&w| st.qualifies(w, j)).take(3 * s).collect()
        };
        if cand.len() < 3 * s {
            return failed("2.2", format!("{} qualifying reserved vertices for a component of {s}", cand.len()));
        }
        let sub = rt.induced(members)?;
        let out = Search::new(&sub, g)
            .avail(g.set_of(&cand))
            .node_limit(params.node_limit)
            .run()?;
        let SearchOutcome::Found(e) = out else {
            return failed("2.3", format!("no copy of a {s}-vertex component on {} vertices", cand.len()));
        };
        let used: Vec<usize> = e.total();
        for (i, &x) in members.iter().enumerate() {
            phi.set(x, used[i]);
        }
        st.reserve[p][dir].retain(|w| !used.contains(w));
        st.reserved -= s;
        pending[p] -= 1;
        if pending[p] == 0 {
            st.release(p, alloc.cluster[p]);
            open -= 1;
        }
        for (i, &x) in members.iter().enumerate() {
            reserve(&mut st, x, used[i], &mut pending, &mut open)?;
        }
        trace.push(TraceStep { tau, open, reserved: st.reserved });
    }
    debug_assert!(phi.is_total());
    Ok(AllocatedEmbedding { embedding: phi, trace })
}

#[derive(Clone, Debug)]
pub struct BoundedEmbedding {
    pub embedding: Embedding,
    pub allocation: Allocation,
    /// Allocations tried, including the successful one.
    pub attempts: usize,
    pub trace: Vec<TraceStep>,
}

/// Allocate-then-embed with up to `retries` fresh allocations, rooted at
/// the tree's root on `v_star`.
pub fn embed_bounded_tree_in_cycle(
    g: &Tournament,
    t: &DirectedTree,
    cycle: &ClusterCycle,
    v_star: usize,
    retries: usize,
    params: &EmbedParams,
    seed: u64,
) -> Result<BoundedEmbedding> {
    let limit = num::floor(cycle.k() as f64 * params.nominal_m(cycle));
    if t.n() > limit {
        return precondition(format!("|T| = {} exceeds k*m/(1+alpha) = {limit}", t.n()));
    }
    check_root_vertex(g, cycle, v_star, params)?;
    let mut last = None;
    for a in 0..retries {
        let alloc = allocate(t, t.root(), cycle.k(), derive(seed, 2 * a as u64))?;
        match embed_allocated(g, t, cycle, &alloc, v_star, params, derive(seed, 2 * a as u64 + 1)) {
            Ok(r) => {
                return Ok(BoundedEmbedding {
                    embedding: r.embedding,
                    allocation: alloc,
                    attempts: a + 1,
                    trace: r.trace,
                })
            }
            Err(e @ (Error::EmbedFailed { .. } | Error::Precondition(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let why = last.map_or("no attempts".to_string(), |e| e.to_string());
    failed("retries", format!("all {retries} allocations failed; last: {why}"))
}

#[derive(Clone, Debug)]
pub struct SmallTreeEmbedding {
    pub embedding: Embedding,
    /// Vertices at distance at least `k³` from the root, per host cluster.
    pub far_counts: Vec<usize>,
    pub far_total: usize,
}

/// One draw from the allocate-then-embed distribution for a tree that fits
/// in a single cluster.
pub fn embed_small_tree_uniform(
    g: &Tournament,
    t: &DirectedTree,
    cycle: &ClusterCycle,
    v_star: usize,
    params: &EmbedParams,
    seed: u64,
) -> Result<SmallTreeEmbedding> {
    let k = cycle.k();
    if t.n() > cycle.m() {
        return precondition(format!("|T| = {} exceeds the cluster size {}", t.n(), cycle.m()));
    }
    let alloc = allocate(t, t.root(), k, derive(seed, 0))?;
    let r = embed_allocated(g, t, cycle, &alloc, v_star, params, derive(seed, 1))?;
    let far = k.saturating_pow(3);
    let dist = t.distances_from(&[t.root()]);
    let idx = cycle.index_of(g.n());
    let mut far_counts = vec![0; k];
    let mut far_total = 0;
    for x in 0..t.n() {
        if dist[x] >= far {
            far_counts[idx[r.embedding.get(x).unwrap()]] += 1;
            far_total += 1;
        }
    }
    Ok(SmallTreeEmbedding {
        embedding: r.embedding,
        far_counts,
        far_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocate::alloc::{allocate_with, canonical_allocation, is_semi_canonical};
    use crate::digraph::generate::{gen_cluster_cycle, gen_random_tree};
    use crate::digraph::validate_embedding;
    use crate::structure::max_open;

    fn desk() -> EmbedParams {
        EmbedParams::new(0.25, 0.05, 0.3).unwrap()
    }

    fn root_vertex(g: &Tournament, c: &ClusterCycle, p: &EmbedParams) -> usize {
        *c.cluster(0).iter().find(|&&v| check_root_vertex(g, c, v, p).is_ok()).unwrap()
    }

    fn assert_in_clusters(g: &Tournament, c: &ClusterCycle, a: &Allocation, e: &Embedding) {
        let idx = c.index_of(g.n());
        for x in 0..a.cluster.len() {
            assert_eq!(idx[e.get(x).unwrap()], a.cluster[x], "vertex {x}");
        }
    }

    #[test]
    fn single_vertex() {
        let (g, c) = gen_cluster_cycle(3, 40, 0.8, 0.3, 0).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let t = DirectedTree::single();
        let a = canonical_allocation(&t, 0, 3).unwrap();
        let r = embed_allocated(&g, &t, &c, &a, v, &p, 0).unwrap();
        assert_eq!(r.embedding.total(), vec![v]);
        assert!(check_root_vertex(&g, &c, c.cluster(1)[0], &p).is_err());
    }

    #[test]
    fn canonical_path_cycles_through_clusters() {
        let k = 4;
        let (g, c) = gen_cluster_cycle(k, 60, 0.95, 0.3, 2).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let t = DirectedTree::directed_path(3 * k);
        let a = canonical_allocation(&t, 0, k).unwrap();
        assert!(a.cluster.iter().enumerate().all(|(i, &j)| j == i % k));
        let r = embed_allocated(&g, &t, &c, &a, v, &p, 7).unwrap();
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
        assert_in_clusters(&g, &c, &a, &r.embedding);
        assert_eq!(r.embedding.get(0), Some(v));
    }

    #[test]
    fn overloaded_cluster_is_rejected() {
        let (g, c) = gen_cluster_cycle(3, 20, 0.9, 0.3, 0).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let t = DirectedTree::star(30, true);
        let a = canonical_allocation(&t, 0, 3).unwrap();
        assert!(matches!(embed_allocated(&g, &t, &c, &a, v, &p, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_trees_with_trace_bounds() {
        let (g, c) = gen_cluster_cycle(5, 120, 0.5, 0.3, 11).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let m = p.nominal_m(&c);
        let mut ok = 0;
        for seed in 0..10 {
            let t = gen_random_tree(300, Some(3), seed).unwrap();
            let mut coin = crate::rng::stream(seed, 1);
            let a = allocate_with(&t, 0, 5, |_| rand::Rng::gen_bool(&mut coin, 0.5)).unwrap();
            assert_eq!(is_semi_canonical(&t, &a), Ok(()));
            let Ok(r) = embed_allocated(&g, &t, &c, &a, v, &p, seed) else { continue };
            ok += 1;
            assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
            assert_in_clusters(&g, &c, &a, &r.embedding);
            let lg = num::log2(t.n());
            for s in &r.trace {
                assert!(s.open as f64 <= 3.0 * lg, "{s:?}");
                assert!(s.reserved as f64 <= 4.0 * 3.0 * m.sqrt() * lg, "{s:?}");
            }
            let ct = canonical_tree(&t, &a).unwrap();
            let order = tidy_ancestral_order(&ct.tree, 0);
            assert!(max_open(&ct.tree, 0, &order).unwrap() as f64 <= num::log2(ct.tree.n()).max(1.0));
        }
        assert!(ok >= 8, "{ok}");
    }

    #[test]
    fn bounded_retries_and_size_guard() {
        let (g, c) = gen_cluster_cycle(3, 50, 0.6, 0.3, 5).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let big = gen_random_tree(151, Some(3), 0).unwrap();
        let r = embed_bounded_tree_in_cycle(&g, &big, &c, v, 5, &p, 0);
        assert!(matches!(r, Err(Error::Precondition(_))), "{r:?}");
        let t = gen_random_tree(90, Some(3), 1).unwrap();
        let r = embed_bounded_tree_in_cycle(&g, &t, &c, v, 10, &p, 3).unwrap();
        assert_eq!(validate_embedding(&t, &g, &r.embedding), Ok(()));
        assert!(r.attempts >= 1);
        let again = embed_bounded_tree_in_cycle(&g, &t, &c, v, 10, &p, 3).unwrap();
        assert_eq!(again.embedding, r.embedding);
    }

    #[test]
    fn small_tree_far_counts() {
        let (g, c) = gen_cluster_cycle(3, 100, 0.8, 0.3, 4).unwrap();
        let p = desk();
        let v = root_vertex(&g, &c, &p);
        let star = DirectedTree::star(5, false);
        let r = embed_small_tree_uniform(&g, &star, &c, v, &p, 0).unwrap();
        assert_eq!((r.far_total, r.far_counts.clone()), (0, vec![0, 0, 0]));
        let path = DirectedTree::directed_path(100);
        let mut sums = [0usize; 3];
        let mut runs = 0;
        let mut far = 0;
        for seed in 0..200 {
            if let Ok(r) = embed_small_tree_uniform(&g, &path, &c, v, &p, seed) {
                assert_eq!(validate_embedding(&path, &g, &r.embedding), Ok(()));
                far = r.far_total;
                for i in 0..3 {
                    sums[i] += r.far_counts[i];
                }
                runs += 1;
            }
        }
        assert_eq!(far, 73);
        assert!(runs >= 180, "{runs}");
        for s in sums {
            let mean = s as f64 / runs as f64;
            assert!((mean / (far as f64 / 3.0) - 1.0).abs() <= 0.15, "{sums:?}");
        }
    }
}

use fixedbitset::FixedBitSet;

use crate::digraph::{DirectedTree, Embedding, Tournament};
use crate::error::{failed, invalid, precondition, Result};
use crate::exact::{Search, SearchOutcome, DEFAULT_NODE_LIMIT};
use crate::num;
use crate::regular::ClusterCycle;

#[derive(Clone, Debug)]
pub struct LeadingOptions {
    /// Host vertices that may be used; `None` allows the whole cycle.
    pub avail: Option<FixedBitSet>,
    /// Skip the `|H| ≤ m/10k` guard.
    pub override_budget: bool,
    pub node_limit: u64,
}

impl Default for LeadingOptions {
    fn default() -> Self {
        LeadingOptions {
            avail: None,
            override_budget: false,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeadingEmbedding {
    pub embedding: Embedding,
    /// Cluster each tree vertex was allocated to.
    pub cluster: Vec<usize>,
}

/// Cluster of every vertex of `tp` when its root goes to cluster `j` and
/// the leading path walks to the first cluster: backward steps when enough
/// arcs point toward the root, forward steps around the cycle otherwise.
/// Everything past the walk stays in the first cluster.
pub fn leading_path_allocation(tp: &DirectedTree, k: usize, j: usize) -> Result<Vec<usize>> {
    if j >= k {
        return invalid(format!("target cluster {j} out of range for k = {k}"));
    }
    let mut path = vec![tp.root()];
    while path.len() < k {
        match tp.children(*path.last().unwrap()) {
            [c] => path.push(*c),
            _ => break,
        }
    }
    let forward: Vec<usize> = (1..path.len()).filter(|&s| tp.is_down(path[s])).collect();
    let backward: Vec<usize> = (1..path.len()).filter(|&s| !tp.is_down(path[s])).collect();
    let (steps, delta) = if j == 0 {
        (Vec::new(), 0)
    } else if backward.len() >= j {
        (backward[..j].to_vec(), k - 1)
    } else if forward.len() >= k - j {
        (forward[..k - j].to_vec(), 1)
    } else {
        return precondition(format!(
            "leading path of {} vertices has {} forward and {} backward arcs, cannot reach the first cluster from {j}",
            path.len(),
            forward.len(),
            backward.len()
        ));
    };
    let mut cluster = vec![0; tp.n()];
    let mut c = j;
    cluster[path[0]] = c;
    for s in 1..path.len() {
        if steps.contains(&s) {
            c = (c + delta) % k;
        }
        cluster[path[s]] = c;
    }
    debug_assert_eq!(c, 0);
    Ok(cluster)
}

/// Embeds a leading-path component with its root in cluster `j` and all of
/// `h` in the first cluster. The first cluster's part is embedded first,
/// then each path segment among the neighbours of the vertex it hangs
/// from, inside clusters pruned to vertices with `dm/2` out-neighbours in
/// the next and in-neighbours in the previous cluster.
pub fn embed_leading_path_component(
    g: &Tournament,
    tp: &DirectedTree,
    h: &[usize],
    h_total: usize,
    cycle: &ClusterCycle,
    j: usize,
    opts: &LeadingOptions,
) -> Result<LeadingEmbedding> {
    let k = cycle.k();
    let m = cycle.m();
    if !opts.override_budget && h_total as f64 > m as f64 / (10.0 * k as f64) + 1e-9 {
        return precondition(format!("|H| = {h_total} exceeds m/10k = {:.3}", m as f64 / (10.0 * k as f64)));
    }
    if h.iter().any(|&x| x >= tp.n()) {
        return invalid("H vertex outside the component");
    }
    let cluster = leading_path_allocation(tp, k, j)?;
    if let Some(&x) = h.iter().find(|&&x| cluster[x] != 0) {
        return precondition(format!("H vertex {x} lies on the leading path before the first cluster"));
    }
    let sets = prune(g, cycle, opts.avail.as_ref())?;

    let mut phi = Embedding::empty(tp.n());
    let mut used = FixedBitSet::with_capacity(g.n());
    let mut place = |verts: &[usize], avail: FixedBitSet, step: &str, phi: &mut Embedding| -> Result<()> {
        let sub = tp.induced(verts)?;
        let mut avail = avail;
        avail.difference_with(&used);
        match Search::new(&sub, g).avail(avail).node_limit(opts.node_limit).run()? {
            SearchOutcome::Found(e) => {
                for (i, &x) in verts.iter().enumerate() {
                    let v = e.get(i).unwrap();
                    phi.set(x, v);
                    used.insert(v);
                }
                Ok(())
            }
            o => failed(step, format!("{} for a {}-vertex part", o.label(), verts.len())),
        }
    };

    // The first-cluster part is connected and listed from its top vertex.
    let first: Vec<usize> = tp.preorder().into_iter().filter(|&x| cluster[x] == 0).collect();
    place(&first, sets[0].clone(), "first-cluster", &mut phi)?;
    // Remaining path vertices, from the first cluster back to the root.
    let mut path: Vec<usize> = Vec::new();
    let mut x = first[0];
    while let Some(p) = tp.parent(x) {
        path.push(p);
        x = p;
    }
    let mut i = 0;
    while i < path.len() {
        let c = cluster[path[i]];
        let mut end = i;
        while end + 1 < path.len() && cluster[path[end + 1]] == c {
            end += 1;
        }
        let seg = &path[i..=end];
        let below = if i == 0 { first[0] } else { path[i - 1] };
        let anchor = phi.get(below).unwrap();
        // the arc between seg[0] and `below` is seg[0] → below iff below is down
        let nbrs = g.nbr_set(anchor, !tp.is_down(below));
        let mut avail = sets[c].clone();
        avail.intersect_with(nbrs);
        place(seg, avail, "segment", &mut phi)?;
        i = end + 1;
    }
    Ok(LeadingEmbedding { embedding: phi, cluster })
}

fn prune(g: &Tournament, cycle: &ClusterCycle, avail: Option<&FixedBitSet>) -> Result<Vec<FixedBitSet>> {
    let k = cycle.k();
    let mut sets = cycle.sets(g.n());
    if let Some(a) = avail {
        for s in &mut sets {
            s.intersect_with(a);
        }
    }
    let start: Vec<usize> = sets.iter().map(|s| s.count_ones(..)).collect();
    let thr = num::ceil(cycle.d * cycle.m() as f64 / 2.0);
    loop {
        let mut changed = false;
        for i in 0..k {
            let (next, prev) = (&sets[(i + 1) % k], &sets[(i + k - 1) % k]);
            let drop: Vec<usize> = sets[i]
                .ones()
                .filter(|&v| g.out_degree_in(v, next) < thr || g.in_degree_in(v, prev) < thr)
                .collect();
            changed |= !drop.is_empty();
            for v in drop {
                sets[i].set(v, false);
            }
        }
        if !changed {
            break;
        }
    }
    for i in 0..k {
        if (sets[i].count_ones(..) as f64) < 0.9 * start[i] as f64 - 1e-9 {
            return failed("prune", format!("cluster {i} keeps {} of {}", sets[i].count_ones(..), start[i]));
        }
    }
    Ok(sets)
}

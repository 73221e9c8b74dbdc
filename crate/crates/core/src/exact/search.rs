//! Backtracking search for a copy of a tree in a tournament.
//!
//! Variables are the tree vertices in a tidy ancestral order from the
//! search root, so every vertex after the root has exactly one earlier
//! neighbour (its parent) and its candidates are one bitset intersection:
//! parent image's out- or in-set, minus used vertices, within the vertex's
//! domain. Values are tried most-slack-first: candidates whose free out-
//! and in-neighbourhoods exceed what the subtree below still needs by the
//! largest margin come first.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::digraph::{DirectedTree, Embedding, Tournament};
use crate::error::{invalid, Result};
use crate::structure::tidy_ancestral_order;

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

/// Candidate sets at most this large are fully scored.
const FULL_SCORE: usize = 256;
/// Larger sets are probed at this many evenly spaced candidates.
const PROBES: usize = 48;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Embedding),
    /// The search space was exhausted.
    None,
    LimitExceeded,
}

impl SearchOutcome {
    pub fn found(self) -> Option<Embedding> {
        match self {
            SearchOutcome::Found(e) => Some(e),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::None => "none",
            SearchOutcome::LimitExceeded => "limit-exceeded",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
}

/// Configurable search. Host vertices outside `avail` are never used;
/// `domain` narrows individual tree vertices further.
pub struct Search<'a> {
    t: &'a DirectedTree,
    g: &'a Tournament,
    avail: Option<FixedBitSet>,
    pins: Vec<(usize, usize)>,
    domains: Vec<FixedBitSet>,
    domain_of: Vec<usize>,
    root: Option<usize>,
    node_limit: u64,
}

impl<'a> Search<'a> {
    pub fn new(t: &'a DirectedTree, g: &'a Tournament) -> Self {
        Search {
            t,
            g,
            avail: None,
            pins: Vec::new(),
            domains: Vec::new(),
            domain_of: vec![usize::MAX; t.n()],
            root: None,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }

    pub fn avail(mut self, set: FixedBitSet) -> Self {
        self.avail = Some(set);
        self
    }

    pub fn pin(mut self, x: usize, v: usize) -> Self {
        self.pins.push((x, v));
        self
    }

    /// Restricts every vertex in `xs` to `set` (intersected with any earlier
    /// domain of the same vertex).
    pub fn domain(mut self, xs: &[usize], set: &FixedBitSet) -> Self {
        let id = self.domains.len();
        self.domains.push(set.clone());
        for &x in xs {
            if self.domain_of[x] == usize::MAX {
                self.domain_of[x] = id;
            } else {
                let mut merged = self.domains[self.domain_of[x]].clone();
                merged.intersect_with(set);
                self.domains.push(merged);
                self.domain_of[x] = self.domains.len() - 1;
            }
        }
        self
    }

    pub fn root(mut self, r: usize) -> Self {
        self.root = Some(r);
        self
    }

    pub fn node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    pub fn run(self) -> Result<SearchOutcome> {
        Ok(self.run_with_stats()?.0)
    }

    pub fn run_with_stats(self) -> Result<(SearchOutcome, SearchStats)> {
        let (t, g) = (self.t, self.g);
        let n = g.n();
        let tn = t.n();
        let mut avail = self.avail.clone().unwrap_or_else(|| g.full_set());
        avail.grow(n);

        // pins: validate, then turn into singleton domains and reserve images
        let mut pin_of = vec![usize::MAX; tn];
        let mut pinned_img = FixedBitSet::with_capacity(n);
        for &(x, v) in &self.pins {
            if x >= tn || v >= n {
                return invalid(format!("pin {x}->{v} out of range"));
            }
            if pin_of[x] != usize::MAX && pin_of[x] != v {
                return invalid(format!("tree vertex {x} pinned twice"));
            }
            if pinned_img.contains(v) && pin_of[x] != v {
                return invalid(format!("host vertex {v} pinned twice"));
            }
            pin_of[x] = v;
            pinned_img.insert(v);
        }
        for (x, y) in t.arcs() {
            if pin_of[x] != usize::MAX && pin_of[y] != usize::MAX && !g.has_arc(pin_of[x], pin_of[y]) {
                return invalid(format!("pins of arc {x}->{y} are not an arc of the host"));
            }
        }
        for x in 0..tn {
            if pin_of[x] != usize::MAX && self.domain_of[x] != usize::MAX && !self.domains[self.domain_of[x]].contains(pin_of[x]) {
                return invalid(format!("pin of {x} lies outside its domain"));
            }
        }
        if tn > n {
            return Ok((SearchOutcome::None, SearchStats::default()));
        }

        let root = self
            .root
            .or_else(|| self.pins.first().map(|p| p.0))
            .unwrap_or(t.root());
        let rooted = t.rerooted(root);
        let order = tidy_ancestral_order(&rooted, root);
        let size = rooted.subtree_sizes();

        // per-vertex candidate filter: singleton for pins, domain minus pinned
        // images otherwise
        let mut filters: Vec<FixedBitSet> = Vec::new();
        let mut filter_of = vec![usize::MAX; tn];
        let mut base = avail.clone();
        base.difference_with(&pinned_img);
        let mut cache: Vec<(usize, usize)> = Vec::new();
        for x in 0..tn {
            if pin_of[x] != usize::MAX {
                let mut f = FixedBitSet::with_capacity(n);
                f.insert(pin_of[x]);
                filters.push(f);
                filter_of[x] = filters.len() - 1;
                continue;
            }
            let d = self.domain_of[x];
            if let Some(&(_, id)) = cache.iter().find(|&&(dd, _)| dd == d) {
                filter_of[x] = id;
                continue;
            }
            let mut f = base.clone();
            if d != usize::MAX {
                f.intersect_with(&self.domains[d]);
            }
            filters.push(f);
            filter_of[x] = filters.len() - 1;
            cache.push((d, filters.len() - 1));
        }

        // demand of each vertex's subtree, split by first-edge direction
        let mut need_out = vec![0usize; tn];
        let mut need_in = vec![0usize; tn];
        let mut kids_out = vec![0usize; tn];
        let mut kids_in = vec![0usize; tn];
        for c in 0..tn {
            if let Some(p) = rooted.parent(c) {
                if rooted.is_down(c) {
                    need_out[p] += size[c];
                    kids_out[p] += 1;
                } else {
                    need_in[p] += size[c];
                    kids_in[p] += 1;
                }
            }
        }

        let mut st = State {
            g,
            order: &order,
            rooted: &rooted,
            filters: &filters,
            filter_of: &filter_of,
            need: (&need_out, &need_in),
            kids: (&kids_out, &kids_in),
            free: {
                let mut f = avail.clone();
                f.union_with(&pinned_img);
                f
            },
            image: vec![usize::MAX; tn],
            frames: Vec::with_capacity(tn),
            nodes: 0,
        };
        let outcome = st.solve(self.node_limit);
        Ok((outcome, SearchStats { nodes: st.nodes }))
    }
}

struct Frame {
    /// Scored candidates, best first.
    ranked: Vec<usize>,
    next: usize,
    /// Remaining unscored candidates (iterated in id order) for large sets.
    rest: Option<FixedBitSet>,
    cursor: usize,
}

struct State<'s> {
    g: &'s Tournament,
    order: &'s [usize],
    rooted: &'s DirectedTree,
    filters: &'s [FixedBitSet],
    filter_of: &'s [usize],
    need: (&'s [usize], &'s [usize]),
    kids: (&'s [usize], &'s [usize]),
    free: FixedBitSet,
    image: Vec<usize>,
    frames: Vec<Frame>,
    nodes: u64,
}

impl State<'_> {
    fn candidates(&self, x: usize) -> FixedBitSet {
        let mut c = match self.rooted.parent(x) {
            Some(p) => self.g.nbr_set(self.image[p], self.rooted.is_down(x)).clone(),
            None => self.free.clone(),
        };
        c.intersect_with(&self.free);
        c.intersect_with(&self.filters[self.filter_of[x]]);
        c
    }

    /// `None` if `v` cannot host `x` because it lacks free neighbours for
    /// the children; otherwise the slack score.
    fn score(&self, x: usize, v: usize) -> Option<i64> {
        let (ko, ki) = (self.kids.0[x], self.kids.1[x]);
        if ko + ki == 0 {
            return Some(0);
        }
        let a_out = self.g.out_set(v).intersection_count(&self.free) as i64;
        let a_in = self.g.in_set(v).intersection_count(&self.free) as i64;
        if a_out < ko as i64 || a_in < ki as i64 {
            return None;
        }
        Some((a_out - self.need.0[x] as i64).min(a_in - self.need.1[x] as i64))
    }

    fn build_frame(&self, x: usize) -> Frame {
        let c = self.candidates(x);
        let count = c.count_ones(..);
        let leaf = self.kids.0[x] + self.kids.1[x] == 0;
        if leaf {
            return Frame {
                ranked: Vec::new(),
                next: 0,
                rest: Some(c),
                cursor: 0,
            };
        }
        if count <= FULL_SCORE {
            let mut scored: Vec<(i64, usize)> = c
                .ones()
                .filter_map(|v| self.score(x, v).map(|s| (s, v)))
                .collect();
            scored.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            return Frame {
                ranked: scored.into_iter().map(|p| p.1).collect(),
                next: 0,
                rest: None,
                cursor: 0,
            };
        }
        let all: Vec<usize> = c.ones().collect();
        let mut probes: Vec<(i64, usize)> = (0..PROBES)
            .map(|i| all[i * all.len() / PROBES])
            .filter_map(|v| self.score(x, v).map(|s| (s, v)))
            .collect();
        probes.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut rest = c;
        for &(_, v) in &probes {
            rest.remove(v);
        }
        Frame {
            ranked: probes.into_iter().map(|p| p.1).collect(),
            next: 0,
            rest: Some(rest),
            cursor: 0,
        }
    }

    fn next_value(&mut self, depth: usize) -> Option<usize> {
        let frame = &mut self.frames[depth];
        if frame.next < frame.ranked.len() {
            frame.next += 1;
            return Some(frame.ranked[frame.next - 1]);
        }
        let rest = frame.rest.as_ref()?;
        let blocks = rest.as_slice();
        let bits = usize::BITS as usize;
        while frame.cursor < rest.len() {
            let b = frame.cursor / bits;
            let word = blocks[b] >> (frame.cursor % bits);
            if word == 0 {
                frame.cursor = (b + 1) * bits;
                continue;
            }
            let v = frame.cursor + word.trailing_zeros() as usize;
            frame.cursor = v + 1;
            if v < rest.len() {
                return Some(v);
            }
        }
        None
    }

    fn solve(&mut self, limit: u64) -> SearchOutcome {
        let len = self.order.len();
        let mut depth = 0;
        self.frames.push(self.build_frame(self.order[0]));
        loop {
            let x = self.order[depth];
            if self.image[x] != usize::MAX {
                self.free.insert(self.image[x]);
                self.image[x] = usize::MAX;
            }
            match self.next_value(depth) {
                Some(v) => {
                    self.nodes += 1;
                    if self.nodes > limit {
                        return SearchOutcome::LimitExceeded;
                    }
                    self.image[x] = v;
                    self.free.remove(v);
                    depth += 1;
                    if depth == len {
                        return SearchOutcome::Found(Embedding::from_total(self.image.clone()));
                    }
                    let f = self.build_frame(self.order[depth]);
                    self.frames.push(f);
                }
                None => {
                    self.frames.pop();
                    if depth == 0 {
                        return SearchOutcome::None;
                    }
                    depth -= 1;
                }
            }
        }
    }
}

/// Options mirroring the public entry point.
#[derive(Clone, Debug, Default)]
pub struct EmbedRequest {
    pub pins: Vec<(usize, usize)>,
    /// Tree vertices `H` that must land in host set `U`.
    pub restrict: Option<(Vec<usize>, Vec<usize>)>,
    pub node_limit: Option<u64>,
}

/// Finds a copy of `t` in `g` extending the pins, with `H` mapped into `U`.
pub fn find_embedding(t: &DirectedTree, g: &Tournament, req: &EmbedRequest) -> Result<SearchOutcome> {
    let mut s = Search::new(t, g).node_limit(req.node_limit.unwrap_or(DEFAULT_NODE_LIMIT));
    for &(x, v) in &req.pins {
        s = s.pin(x, v);
    }
    if let Some((h, u)) = &req.restrict {
        if h.iter().any(|&x| x >= t.n()) || u.iter().any(|&v| v >= g.n()) {
            return invalid("restriction vertex out of range");
        }
        s = s.domain(h, &g.set_of(u));
    }
    s.run()
}

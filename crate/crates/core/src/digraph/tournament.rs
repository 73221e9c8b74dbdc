use fixedbitset::FixedBitSet;

use crate::error::{invalid, Result};

/// A complete orientation on `n` labelled vertices, stored as per-vertex
/// out- and in-neighbourhood bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    out: Vec<FixedBitSet>,
    inn: Vec<FixedBitSet>,
}

impl Tournament {
    /// Builds a tournament from a rule deciding each pair `u < v`:
    /// `forward(u, v)` true means the arc `u→v`.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        let mut inn = vec![FixedBitSet::with_capacity(n); n];
        for u in 0..n {
            for v in u + 1..n {
                let (a, b) = if forward(u, v) { (u, v) } else { (v, u) };
                out[a].insert(b);
                inn[b].insert(a);
            }
        }
        Tournament { n, out, inn }
    }

    /// Builds from an explicit arc list that must orient every pair once.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut out = vec![FixedBitSet::with_capacity(n); n];
        let mut inn = vec![FixedBitSet::with_capacity(n); n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return invalid(format!("arc ({u},{v}) out of range for n={n}"));
            }
            if u == v {
                return invalid(format!("self-loop at {u}"));
            }
            if out[u].contains(v) || out[v].contains(u) {
                return invalid(format!("pair {{{u},{v}}} oriented twice"));
            }
            out[u].insert(v);
            inn[v].insert(u);
        }
        let expected = n * n.saturating_sub(1) / 2;
        if arcs.len() != expected {
            return invalid(format!(
                "{} arcs given, a tournament on {n} vertices has {expected}",
                arcs.len()
            ));
        }
        Ok(Tournament { n, out, inn })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    pub fn out_set(&self, v: usize) -> &FixedBitSet {
        &self.out[v]
    }

    pub fn in_set(&self, v: usize) -> &FixedBitSet {
        &self.inn[v]
    }

    /// Out-set when `forward`, in-set otherwise.
    pub fn nbr_set(&self, v: usize, forward: bool) -> &FixedBitSet {
        if forward {
            &self.out[v]
        } else {
            &self.inn[v]
        }
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].count_ones(..)
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].count_ones(..)
    }

    /// Out-neighbours of `v` inside `set`.
    pub fn out_degree_in(&self, v: usize, set: &FixedBitSet) -> usize {
        self.out[v].intersection_count(set)
    }

    pub fn in_degree_in(&self, v: usize, set: &FixedBitSet) -> usize {
        self.inn[v].intersection_count(set)
    }

    /// Every arc, listed as `(tail, head)` in lexicographic order of the pair.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            for v in u + 1..self.n {
                arcs.push(if self.has_arc(u, v) { (u, v) } else { (v, u) });
            }
        }
        arcs
    }

    /// Number of arcs from `xs` to `ys` (sets may overlap; each ordered pair
    /// is counted once).
    pub fn arcs_between(&self, xs: &[usize], ys: &FixedBitSet) -> usize {
        xs.iter().map(|&x| self.out[x].intersection_count(ys)).sum()
    }

    /// The subtournament on `verts`, relabelled `0..verts.len()` in order.
    pub fn induced(&self, verts: &[usize]) -> Tournament {
        Tournament::from_fn(verts.len(), |i, j| self.has_arc(verts[i], verts[j]))
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, verts: &[usize]) -> FixedBitSet {
        vertex_set(self.n, verts)
    }

    /// Arcs running against `order` (from a later to an earlier position)
    /// among the listed vertices.
    pub fn backward_count(&self, order: &[usize]) -> usize {
        let mut earlier = FixedBitSet::with_capacity(self.n);
        let mut count = 0;
        for &v in order {
            count += self.out[v].intersection_count(&earlier);
            earlier.insert(v);
        }
        count
    }

    /// Minimum semidegree δ⁰.
    pub fn min_semidegree(&self) -> usize {
        (0..self.n)
            .map(|v| self.out_degree(v).min(self.in_degree(v)))
            .min()
            .unwrap_or(0)
    }
}

pub fn vertex_set(n: usize, verts: &[usize]) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    for &v in verts {
        s.insert(v);
    }
    s
}

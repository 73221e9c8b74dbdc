use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::digraph::{vertex_set, Tournament};
use crate::error::{invalid, Result};

/// An ordered partition `V₁ … V_k` of host vertices with declared
/// regularity `eps` and density `d` for each consecutive pair. Indices are
/// 0-based and taken mod `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterCycle {
    pub clusters: Vec<Vec<usize>>,
    pub eps: f64,
    pub d: f64,
}

impl ClusterCycle {
    pub fn new(clusters: Vec<Vec<usize>>, eps: f64, d: f64) -> Result<Self> {
        if clusters.len() < 3 {
            return invalid("a cluster cycle needs at least three clusters");
        }
        let size = clusters[0].len();
        if size == 0 || clusters.iter().any(|c| c.len() != size) {
            return invalid("clusters must be nonempty and of equal size");
        }
        let mut seen = std::collections::HashSet::new();
        for v in clusters.iter().flatten() {
            if !seen.insert(*v) {
                return invalid(format!("vertex {v} lies in two clusters"));
            }
        }
        Ok(ClusterCycle { clusters, eps, d })
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    /// Smallest cluster size.
    pub fn m(&self) -> usize {
        self.clusters.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn cluster(&self, i: isize) -> &[usize] {
        &self.clusters[self.wrap(i)]
    }

    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.k() as isize) as usize
    }

    pub fn total(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn sets(&self, n: usize) -> Vec<FixedBitSet> {
        self.clusters.iter().map(|c| vertex_set(n, c)).collect()
    }

    /// Cluster index of every host vertex (`usize::MAX` outside the cycle).
    pub fn index_of(&self, n: usize) -> Vec<usize> {
        let mut idx = vec![usize::MAX; n];
        for (i, c) in self.clusters.iter().enumerate() {
            for &v in c {
                idx[v] = i;
            }
        }
        idx
    }

    /// The same cycle started at cluster `r`.
    pub fn rotated(&self, r: usize) -> ClusterCycle {
        let k = self.k();
        ClusterCycle {
            clusters: (0..k).map(|i| self.clusters[(i + r) % k].clone()).collect(),
            eps: self.eps,
            d: self.d,
        }
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        self.clusters.iter().flatten().copied().collect()
    }

    pub fn check_hosted(&self, g: &Tournament) -> Result<()> {
        if self.clusters.iter().flatten().any(|&v| v >= g.n()) {
            return invalid("cluster vertex outside the host tournament");
        }
        Ok(())
    }
}

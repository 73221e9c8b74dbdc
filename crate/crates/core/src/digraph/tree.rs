use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Orientation of a tree edge relative to the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    /// parent → child
    Down,
    /// child → parent
    Up,
}

/// A rooted oriented tree: parent links plus one direction flag per
/// non-root vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    down: Vec<bool>,
    children: Vec<Vec<usize>>,
}

impl DirectedTree {
    /// `down[v]` is the direction of the edge between `v` and its parent
    /// (ignored for the root).
    pub fn new(root: usize, parent: Vec<Option<usize>>, down: Vec<bool>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return invalid("a tree needs at least one vertex");
        }
        if down.len() != n {
            return invalid("parent and direction arrays differ in length");
        }
        if root >= n || parent[root].is_some() {
            return invalid("root must exist and have no parent");
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None if v != root => return invalid(format!("vertex {v} has no parent")),
                Some(p) if p >= n || p == v => return invalid(format!("bad parent of {v}")),
                Some(p) => children[p].push(v),
                None => {}
            }
        }
        let tree = DirectedTree {
            root,
            parent,
            down,
            children,
        };
        if tree.preorder().len() != n {
            return invalid("parent links contain a cycle");
        }
        Ok(tree)
    }

    pub fn single() -> Self {
        DirectedTree {
            root: 0,
            parent: vec![None],
            down: vec![true],
            children: vec![Vec::new()],
        }
    }

    /// Builds from the `n − 1` arcs of an oriented tree, rooted at `root`.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)], root: usize) -> Result<Self> {
        if n == 0 || root >= n {
            return invalid("empty tree or root out of range");
        }
        if arcs.len() + 1 != n {
            return invalid(format!("{} arcs for {n} vertices", arcs.len()));
        }
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
        for &(u, v) in arcs {
            if u >= n || v >= n || u == v {
                return invalid(format!("bad arc ({u},{v})"));
            }
            adj[u].push((v, true));
            adj[v].push((u, false));
        }
        let mut parent = vec![None; n];
        let mut down = vec![true; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(v, forward) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    down[v] = forward;
                    queue.push_back(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("arcs do not connect all vertices");
        }
        DirectedTree::new(root, parent, down)
    }

    /// Path `0 − 1 − … − n−1` rooted at 0; `down[i]` orients edge i as `i → i+1`.
    pub fn path(down: &[bool]) -> Self {
        let n = down.len() + 1;
        let parent = (0..n).map(|v| v.checked_sub(1)).collect();
        let mut d = vec![true];
        d.extend_from_slice(down);
        DirectedTree::new(0, parent, d).expect("a path is a tree")
    }

    /// Directed path `0 → 1 → … → n−1`.
    pub fn directed_path(n: usize) -> Self {
        DirectedTree::path(&vec![true; n.saturating_sub(1)])
    }

    /// Star with centre 0 and `leaves` leaves, arcs out of the centre if `out`.
    pub fn star(leaves: usize, out: bool) -> Self {
        let mut parent = vec![None];
        parent.extend((0..leaves).map(|_| Some(0)));
        DirectedTree::new(0, parent, vec![out; leaves + 1]).expect("a star is a tree")
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// True if the edge to the parent runs parent → `v`.
    pub fn is_down(&self, v: usize) -> bool {
        self.down[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.parent[v].into_iter().chain(self.children[v].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `Some(true)` if `u → v` is a tree arc, `Some(false)` if `v → u`,
    /// `None` if not adjacent.
    pub fn arc_between(&self, u: usize, v: usize) -> Option<bool> {
        if self.parent[v] == Some(u) {
            Some(self.down[v])
        } else if self.parent[u] == Some(v) {
            Some(!self.down[u])
        } else {
            None
        }
    }

    /// All arcs `(tail, head)`, one per non-root vertex in id order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .filter_map(|v| {
                self.parent[v].map(|p| if self.down[v] { (p, v) } else { (v, p) })
            })
            .collect()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.neighbours(v)
            .filter(|&u| self.arc_between(v, u) == Some(true))
            .count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.degree(v) - self.out_degree(v)
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.out_degree(v) == 0).collect()
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.in_degree(v) == 0).collect()
    }

    /// Breadth-first order from the root (an ancestral order).
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.n());
        order.push(self.root);
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            order.extend_from_slice(&self.children[u]);
            i += 1;
        }
        order
    }

    /// Sizes of the subtrees below each vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.n()];
        for &v in self.preorder().iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n()];
        for v in self.preorder() {
            if let Some(p) = self.parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        depth
    }

    /// The same oriented tree rooted at `r`.
    pub fn rerooted(&self, r: usize) -> DirectedTree {
        if r == self.root {
            return self.clone();
        }
        DirectedTree::from_arcs(self.n(), &self.arcs(), r).expect("re-rooting a tree")
    }

    /// Multi-source breadth-first distances (`usize::MAX` if unreached).
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        self.distances_within(sources, None)
    }

    /// Distances restricted to vertices with `allowed[v]`.
    pub fn distances_within(&self, sources: &[usize], allowed: Option<&[bool]>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for v in self.neighbours(u) {
                if dist[v] == usize::MAX && allowed.is_none_or(|a| a[v]) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Components of the forest induced by `keep`, each listed in
    /// breadth-first order from its vertex closest to the root.
    pub fn components(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut comps = Vec::new();
        let mut seen = vec![false; self.n()];
        for v in self.preorder() {
            if !keep[v] || seen[v] {
                continue;
            }
            seen[v] = true;
            let mut comp = vec![v];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for w in self.neighbours(u) {
                    if keep[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// The subtree induced by `verts` (which must be connected), rooted at
    /// `verts[0]`; local vertex `i` stands for `verts[i]`.
    pub fn induced(&self, verts: &[usize]) -> Result<DirectedTree> {
        if verts.is_empty() {
            return invalid("empty vertex set");
        }
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in verts.iter().enumerate() {
            if local[v] != usize::MAX {
                return invalid(format!("vertex {v} listed twice"));
            }
            local[v] = i;
        }
        let mut arcs = Vec::with_capacity(verts.len() - 1);
        for &v in verts {
            if let Some(p) = self.parent[v] {
                if local[p] != usize::MAX {
                    let (a, b) = if self.down[v] { (p, v) } else { (v, p) };
                    arcs.push((local[a], local[b]));
                }
            }
        }
        DirectedTree::from_arcs(verts.len(), &arcs, 0)
    }

    /// Unique path between two vertices, inclusive.
    pub fn path_between(&self, a: usize, b: usize) -> Vec<usize> {
        let depth = self.depths();
        let (mut x, mut y) = (a, b);
        let mut left = vec![];
        let mut right = vec![];
        while depth[x] > depth[y] {
            left.push(x);
            x = self.parent[x].unwrap();
        }
        while depth[y] > depth[x] {
            right.push(y);
            y = self.parent[y].unwrap();
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent[x].unwrap();
            y = self.parent[y].unwrap();
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_arcs_and_reroot_preserve_arcs() {
        let arcs = [(0, 1), (2, 1), (1, 3), (4, 3)];
        let t = DirectedTree::from_arcs(5, &arcs, 0).unwrap();
        assert_eq!(t.arc_between(2, 1), Some(true));
        assert_eq!(t.arc_between(1, 2), Some(false));
        assert_eq!(t.arc_between(0, 4), None);
        let r = t.rerooted(4);
        let mut a = r.arcs();
        a.sort();
        let mut b = arcs.to_vec();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(r.root(), 4);
        assert_eq!(t.sinks(), vec![3]);
        assert_eq!(t.sources(), vec![0, 2, 4]);
    }

    #[test]
    fn rejects_cycles_and_disconnected_input() {
        assert!(DirectedTree::new(0, vec![None, Some(2), Some(1)], vec![true; 3]).is_err());
        assert!(DirectedTree::from_arcs(4, &[(0, 1), (1, 0), (2, 3)], 0).is_err());
        assert!(DirectedTree::from_arcs(3, &[(0, 1)], 0).is_err());
    }

    #[test]
    fn components_paths_and_induced() {
        let t = DirectedTree::directed_path(6);
        let keep = [true, true, false, true, true, true];
        assert_eq!(t.components(&keep), vec![vec![0, 1], vec![3, 4, 5]]);
        assert_eq!(t.path_between(5, 2), vec![5, 4, 3, 2]);
        let s = t.induced(&[4, 3, 5]).unwrap();
        assert_eq!(s.arc_between(1, 0), Some(true));
        assert_eq!(s.arc_between(0, 2), Some(true));
        assert!(t.induced(&[0, 2]).is_err());
        assert_eq!(t.distances_from(&[2])[5], 3);
    }
}

use serde::{Deserialize, Serialize};

use super::{DirectedTree, Tournament};

/// Partial injective map from tree vertices to host vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: Vec<Option<usize>>,
}

impl Embedding {
    pub fn empty(n: usize) -> Self {
        Embedding { map: vec![None; n] }
    }

    pub fn from_total(map: Vec<usize>) -> Self {
        Embedding {
            map: map.into_iter().map(Some).collect(),
        }
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.map[x]
    }

    pub fn set(&mut self, x: usize, v: usize) {
        self.map[x] = Some(v);
    }

    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }

    /// Host vertices in tree-vertex order; panics if not total.
    pub fn total(&self) -> Vec<usize> {
        self.map.iter().map(|v| v.expect("total embedding")).collect()
    }

    pub fn image(&self) -> Vec<usize> {
        self.map.iter().flatten().copied().collect()
    }
}

/// Why an embedding is not a copy of the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Unmapped(usize),
    OutOfRange(usize),
    /// Two tree vertices share an image.
    Collision(usize, usize),
    /// Tree arc `x → y` whose image is reversed.
    Arc(usize, usize),
}

/// Checks that `map` is total, injective and arc-preserving. On failure
/// returns the first problem found, scanning vertices then arcs in id order.
pub fn validate_embedding(t: &DirectedTree, g: &Tournament, map: &Embedding) -> Result<(), Violation> {
    let mut owner = vec![usize::MAX; g.n()];
    for x in 0..t.n() {
        let v = map.map.get(x).copied().flatten().ok_or(Violation::Unmapped(x))?;
        if v >= g.n() {
            return Err(Violation::OutOfRange(x));
        }
        if owner[v] != usize::MAX {
            return Err(Violation::Collision(owner[v], x));
        }
        owner[v] = x;
    }
    for (x, y) in t.arcs() {
        if !g.has_arc(map.map[x].unwrap(), map.map[y].unwrap()) {
            return Err(Violation::Arc(x, y));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_path_identity() {
        let t = DirectedTree::directed_path(2);
        let g = Tournament::from_fn(2, |_, _| true);
        assert_eq!(validate_embedding(&t, &g, &Embedding::from_total(vec![0, 1])), Ok(()));
        let r = Tournament::from_fn(2, |_, _| false);
        assert_eq!(
            validate_embedding(&t, &r, &Embedding::from_total(vec![0, 1])),
            Err(Violation::Arc(0, 1))
        );
    }

    #[test]
    fn reports_partiality_and_collisions() {
        let t = DirectedTree::directed_path(3);
        let g = Tournament::from_fn(3, |_, _| true);
        let mut e = Embedding::empty(3);
        assert_eq!(validate_embedding(&t, &g, &e), Err(Violation::Unmapped(0)));
        e.map = vec![Some(0), Some(1), Some(1)];
        assert_eq!(validate_embedding(&t, &g, &e), Err(Violation::Collision(1, 2)));
        e.map = vec![Some(0), Some(1), Some(7)];
        assert_eq!(validate_embedding(&t, &g, &e), Err(Violation::OutOfRange(2)));
    }
}

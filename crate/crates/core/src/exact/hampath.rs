use crate::digraph::Tournament;

/// A directed Hamilton path of `g[verts]` by binary insertion: each new
/// vertex goes in front if it beats the head, at the end if the tail beats
/// it, and otherwise between some `p[i] → v → p[i+1]` found by bisection.
pub fn hamilton_path_on(g: &Tournament, verts: &[usize]) -> Vec<usize> {
    let mut path: Vec<usize> = Vec::with_capacity(verts.len());
    for &v in verts {
        if path.is_empty() || g.has_arc(v, path[0]) {
            path.insert(0, v);
        } else if g.has_arc(*path.last().unwrap(), v) {
            path.push(v);
        } else {
            // invariant: path[lo] → v and v → path[hi]
            let (mut lo, mut hi) = (0, path.len() - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if g.has_arc(path[mid], v) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            path.insert(hi, v);
        }
    }
    path
}

pub fn hamilton_directed_path(g: &Tournament) -> Vec<usize> {
    let verts: Vec<usize> = (0..g.n()).collect();
    hamilton_path_on(g, &verts)
}

/// True if consecutive entries are arcs and every vertex appears once.
pub fn is_hamilton_path(g: &Tournament, path: &[usize]) -> bool {
    let mut seen = vec![false; g.n()];
    path.len() == g.n()
        && path.iter().all(|&v| v < g.n() && !std::mem::replace(&mut seen[v], true))
        && path.windows(2).all(|w| g.has_arc(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::*;

    #[test]
    fn transitive_and_triangle() {
        let g = gen_transitive_tournament(8);
        assert_eq!(hamilton_directed_path(&g), (0..8).collect::<Vec<_>>());
        let c = gen_rotational_tournament(3).unwrap();
        let p = hamilton_directed_path(&c);
        assert!([vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]].contains(&p));
    }

    #[test]
    fn random_paths_are_valid() {
        for seed in 0..50 {
            let g = gen_random_tournament(80, seed);
            assert!(is_hamilton_path(&g, &hamilton_directed_path(&g)));
        }
        assert!(!is_hamilton_path(&gen_transitive_tournament(3), &[2, 1, 0]));
    }
}

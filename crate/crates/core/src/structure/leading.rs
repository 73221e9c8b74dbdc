use crate::digraph::DirectedTree;

/// `P_k(H)`: starting from the first `k` vertices of each root path from
/// `H`, repeatedly add the first `k` root-path vertices of every vertex
/// that has at least two children in the set. Returned sorted.
pub fn leading_paths(t: &DirectedTree, root: usize, h: &[usize], k: usize) -> Vec<usize> {
    let rooted;
    let t = if root == t.root() {
        t
    } else {
        rooted = t.rerooted(root);
        &rooted
    };
    let n = t.n();
    let mut in_set = vec![false; n];
    let mut kids_in = vec![0usize; n];
    let mut done = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();

    let add_path = |x: usize, in_set: &mut Vec<bool>, kids_in: &mut Vec<usize>, queue: &mut Vec<usize>| {
        let mut y = x;
        for _ in 0..k {
            if !in_set[y] {
                in_set[y] = true;
                if kids_in[y] >= 2 {
                    queue.push(y);
                }
                if let Some(p) = t.parent(y) {
                    kids_in[p] += 1;
                    if kids_in[p] >= 2 && in_set[p] {
                        queue.push(p);
                    }
                }
            }
            match t.parent(y) {
                Some(p) => y = p,
                None => break,
            }
        }
    };

    for &x in h {
        if !done[x] {
            done[x] = true;
            add_path(x, &mut in_set, &mut kids_in, &mut queue);
        }
    }
    while let Some(x) = queue.pop() {
        if !done[x] {
            done[x] = true;
            add_path(x, &mut in_set, &mut kids_in, &mut queue);
        }
    }
    (0..n).filter(|&v| in_set[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_and_path_cases() {
        let p = DirectedTree::directed_path(10);
        assert_eq!(leading_paths(&p, 0, &[0], 4), vec![0]);
        assert_eq!(leading_paths(&p, 0, &[9], 3), vec![7, 8, 9]);
        assert_eq!(leading_paths(&p, 9, &[0], 2), vec![0, 1]);
    }

    #[test]
    fn branch_points_extend() {
        // spine 0-1-2-3-4, leaves 5 and 6 on 4; H = {5, 6}, k = 2
        let t = DirectedTree::new(
            0,
            vec![None, Some(0), Some(1), Some(2), Some(3), Some(4), Some(4)],
            vec![true; 7],
        )
        .unwrap();
        // P_5 = {5,4}, P_6 = {6,4}; 4 then has two children in the set, P_4 = {4,3}
        assert_eq!(leading_paths(&t, 0, &[5, 6], 2), vec![3, 4, 5, 6]);
    }
}

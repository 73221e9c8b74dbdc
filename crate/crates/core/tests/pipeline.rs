use tourney_core::digraph::generate::{gen_random_tournament, gen_random_tree};
use tourney_core::digraph::{validate_embedding, Tournament};
use tourney_core::pipeline::{embed_main, MainRoute, Params, SplitCase};

/// Blocks in order, every arc running from an earlier block to a later one.
/// `true` blocks are random, `false` blocks transitive.
fn blocks(sizes: &[(usize, bool)], seed: u64) -> Tournament {
    let mut block = Vec::new();
    let mut inner = Vec::new();
    for (b, &(s, random)) in sizes.iter().enumerate() {
        let r = random.then(|| gen_random_tournament(s, seed ^ b as u64));
        for i in 0..s {
            block.push(b);
            inner.push((i, r.clone()));
        }
    }
    Tournament::from_fn(block.len(), |u, v| {
        if block[u] != block[v] {
            return block[u] < block[v];
        }
        match &inner[u].1 {
            Some(g) => g.has_arc(inner[u].0, inner[v].0),
            None => inner[u].0 < inner[v].0,
        }
    })
}

fn params() -> Params {
    Params { exact_cutoff: 0, ..Params::desk() }
}

#[test]
fn transitive_block_first_peels_sources() {
    let g = blocks(&[(520, false), (520, true)], 3);
    let t = gen_random_tree(400, Some(3), 4).unwrap();
    let out = embed_main(&t, &g, &params(), 5).unwrap();
    assert_eq!(validate_embedding(&t, &g, &out.embedding), Ok(()));
    assert_eq!(out.report.route, MainRoute::Split);
    let split = out.report.split.as_ref().unwrap();
    assert_eq!(split.case, SplitCase::Minus);
    assert_eq!(split.plus_size, 0);
    assert!(split.minus_size > 0 && split.peel_ok);
    let image = out.embedding.total();
    assert_eq!(image.iter().filter(|&&v| v < 520).count(), split.minus_size);
}

#[test]
fn random_block_between_transitive_blocks_peels_both_sides() {
    let g = blocks(&[(400, false), (560, true), (400, false)], 7);
    let t = gen_random_tree(500, Some(3), 8).unwrap();
    let out = embed_main(&t, &g, &params(), 9).unwrap();
    assert_eq!(validate_embedding(&t, &g, &out.embedding), Ok(()));
    assert_eq!(out.report.route, MainRoute::Split);
    let split = out.report.split.as_ref().unwrap();
    assert_eq!(split.case, SplitCase::Both);
    assert!(split.minus_size > 0 && split.plus_size > 0 && split.peel_ok);
}

#[test]
fn seeds_reproduce_the_embedding() {
    let g = blocks(&[(600, true), (600, false)], 1);
    let t = gen_random_tree(450, None, 2).unwrap();
    let a = embed_main(&t, &g, &params(), 11).unwrap();
    let b = embed_main(&t, &g, &params(), 11).unwrap();
    assert_eq!(a.embedding, b.embedding);
    assert_eq!(a.report.route, b.report.route);
}

#[test]
fn unbounded_trees_embed_in_every_family() {
    let p = Params::desk();
    for (i, g) in [blocks(&[(1040, true)], 1), blocks(&[(1040, false)], 1), blocks(&[(520, true), (520, false)], 1)]
        .iter()
        .enumerate()
    {
        let t = gen_random_tree(400, None, 30 + i as u64).unwrap();
        let out = embed_main(&t, g, &p, i as u64).unwrap();
        assert_eq!(validate_embedding(&t, g, &out.embedding), Ok(()), "family {i}");
    }
}

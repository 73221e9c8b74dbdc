//! Ordered partition of a host into a robust piece with one-sided
//! surroundings, or into small pieces that leave it almost transitive.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::Params;
use crate::digraph::Tournament;
use crate::error::{invalid, Error, Result};
use crate::expander::{is_robust_outexpander, split_non_expander, CheckMode, MAX_EXHAUSTIVE};
use crate::rng::derive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    /// A vertex of low out-degree moved behind the piece.
    LowOut,
    /// A vertex of low in-degree moved in front of the piece.
    LowIn,
    /// The piece cut along a non-expansion witness.
    NonExpander,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub tau: usize,
    /// Size of the piece that was split.
    pub size: usize,
    pub kind: SplitKind,
    /// Arcs added to `B`.
    pub new_bad: usize,
    /// `e(S'' → S')` against `4μ|S|²` for witness splits.
    pub split_bound: Option<f64>,
    pub deleted: Vec<usize>,
}

/// The ordered family `S_1 … S_τ`, the bad arcs `B` and the deletion log.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionState {
    pub sets: Vec<Vec<usize>>,
    #[serde(skip)]
    pub bad: Vec<FixedBitSet>,
    pub bad_count: usize,
    pub deleted: Vec<usize>,
    pub log: Vec<StepRecord>,
}

impl PartitionState {
    pub fn is_bad(&self, u: usize, v: usize) -> bool {
        self.bad[u].contains(v)
    }
}

/// Largest count of arcs pointing the wrong way across the robust piece:
/// out-arcs of `S⁺` into `S ∪ S⁻`, out-arcs of `S` into `S⁻`, in-arcs of
/// `S` from `S⁺`, in-arcs of `S⁻` from `S ∪ S⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSided {
    pub plus_out: usize,
    pub core_out: usize,
    pub core_in: usize,
    pub minus_in: usize,
    /// `√η·n`.
    pub limit: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecomposeOutcome {
    RobustPiece {
        index: usize,
        s: Vec<usize>,
        s_minus: Vec<usize>,
        s_plus: Vec<usize>,
        min_semidegree: usize,
        one_sided: OneSided,
    },
    AlmostTransitive {
        order: Vec<usize>,
        backward_count: usize,
        /// `2γn²`.
        bound: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub outcome: DecomposeOutcome,
    pub state: PartitionState,
    pub iterations: usize,
    /// Tree size `n` the thresholds were computed for.
    pub n: usize,
}

struct Run<'a> {
    g: &'a Tournament,
    members: Vec<FixedBitSet>,
    sizes: Vec<usize>,
    order: Vec<usize>,
    piece: Vec<usize>,
    dout: Vec<usize>,
    din: Vec<usize>,
    bad: Vec<FixedBitSet>,
    bad_deg: Vec<usize>,
    bad_count: usize,
}

const GONE: usize = usize::MAX;

impl Run<'_> {
    fn size(&self, p: usize) -> usize {
        self.sizes[p]
    }

    fn new_piece(&mut self, verts: &[usize]) -> usize {
        let id = self.members.len();
        let mut s = FixedBitSet::with_capacity(self.g.n());
        for &v in verts {
            s.insert(v);
            self.piece[v] = id;
        }
        self.members.push(s);
        self.sizes.push(verts.len());
        id
    }

    fn recount(&mut self, p: usize) {
        let s = self.members[p].clone();
        for v in s.ones() {
            self.dout[v] = self.g.out_set(v).intersection_count(&s);
            self.din[v] = self.g.in_set(v).intersection_count(&s);
        }
    }

    /// Takes `v` out of its piece, keeping the degrees of the rest current.
    fn detach(&mut self, v: usize) {
        let p = self.piece[v];
        self.members[p].set(v, false);
        self.sizes[p] -= 1;
        for u in self.g.out_set(v).intersection(&self.members[p]) {
            self.din[u] -= 1;
        }
        for u in self.g.in_set(v).intersection(&self.members[p]) {
            self.dout[u] -= 1;
        }
        self.piece[v] = GONE;
        self.dout[v] = 0;
        self.din[v] = 0;
    }

    fn add_bad(&mut self, u: usize, v: usize) {
        if !self.bad[u].put(v) {
            self.bad_count += 1;
            self.bad_deg[u] += 1;
            self.bad_deg[v] += 1;
        }
    }
}

/// Runs the six-step partition loop on `G` for a tree of `n` vertices.
/// Pieces smaller than `max(γn, 2)` end the loop as almost transitive; a
/// piece that is a robust `(μ, ν)`-outexpander with `δ⁰ ≥ ηn` ends it as the
/// robust piece. Expansion is decided exhaustively up to 22 vertices and by
/// the sampled checker above.
pub fn decompose(g: &Tournament, n: usize, params: &Params, seed: u64) -> Result<Decomposition> {
    if n == 0 {
        return invalid("tree size must be positive");
    }
    let chain = params.decomposition_chain();
    if let Some(v) = chain.iter().find(|v| ["mu", "nu", "eta"].contains(&v.smaller.as_str())) {
        return invalid(format!("{} = {} is not below {} = {}", v.smaller, v.smaller_value, v.larger, v.larger_value));
    }
    let gn = g.n();
    let nf = n as f64;
    let deg_floor = params.eta * nf;
    let piece_floor = (params.gamma * nf).max(2.0);
    let delete_above = params.eta.sqrt() * nf;
    let mut run = Run {
        g,
        members: Vec::new(),
        sizes: Vec::new(),
        order: Vec::new(),
        piece: vec![GONE; gn],
        dout: vec![0; gn],
        din: vec![0; gn],
        bad: vec![FixedBitSet::with_capacity(gn); gn],
        bad_deg: vec![0; gn],
        bad_count: 0,
    };
    let all: Vec<usize> = (0..gn).collect();
    let first = run.new_piece(&all);
    run.order.push(first);
    run.recount(first);
    let mut log = Vec::new();
    let mut deleted = Vec::new();
    let mut tau = 0;
    let robust = loop {
        if tau > gn {
            return Err(Error::BoundViolated(format!("decomposition ran past {gn} iterations")));
        }
        // (1) the largest piece, earliest on ties
        let (pos, &lp) = run
            .order
            .iter()
            .enumerate()
            .max_by_key(|&(i, &p)| (run.size(p), std::cmp::Reverse(i)))
            .expect("at least one piece");
        let size = run.size(lp);
        if (size as f64) < piece_floor {
            break None;
        }
        let verts: Vec<usize> = run.members[lp].ones().collect();
        let min_out = verts.iter().map(|&v| (run.dout[v], v)).min().unwrap();
        let min_in = verts.iter().map(|&v| (run.din[v], v)).min().unwrap();
        let semi = min_out.0.min(min_in.0);
        // (2) expansion is only consulted when the semidegree floor holds
        let mut witness = None;
        if semi as f64 >= deg_floor {
            let sub = g.induced(&verts);
            let mode = if size <= MAX_EXHAUSTIVE {
                CheckMode::Exhaustive
            } else {
                CheckMode::Sampled { count: params.expander_samples, seed: derive(seed, tau as u64) }
            };
            let verdict = is_robust_outexpander(&sub, params.mu, params.nu, mode)?;
            match verdict.witness {
                None => break Some((pos, lp, semi)),
                Some(w) => witness = Some(w.into_iter().map(|i| verts[i]).collect::<Vec<usize>>()),
            }
        }
        let before = run.bad_count;
        let mut record = StepRecord { tau, size, kind: SplitKind::LowOut, new_bad: 0, split_bound: None, deleted: vec![] };
        if (min_out.0 as f64) < deg_floor {
            // (3) {v} goes behind; its out-arcs into the rest become bad
            let v = min_out.1;
            let targets: Vec<usize> = g.out_set(v).intersection(&run.members[lp]).collect();
            for u in targets {
                run.add_bad(v, u);
            }
            run.detach(v);
            let id = run.new_piece(&[v]);
            run.order.insert(pos + 1, id);
        } else if (min_in.0 as f64) < deg_floor {
            // (4) {v} goes in front; arcs from the rest into it become bad
            let v = min_in.1;
            record.kind = SplitKind::LowIn;
            let sources: Vec<usize> = g.in_set(v).intersection(&run.members[lp]).collect();
            for u in sources {
                run.add_bad(u, v);
            }
            run.detach(v);
            let id = run.new_piece(&[v]);
            run.order.insert(pos, id);
        } else {
            // (5) S' = complement of the witness, S'' = witness, in that order
            let w = witness.expect("semidegree floor holds, so expansion was checked");
            let (sub_w, local) = {
                let mut idx = vec![GONE; gn];
                for (i, &v) in verts.iter().enumerate() {
                    idx[v] = i;
                }
                (w.iter().map(|&v| idx[v]).collect::<Vec<usize>>(), verts.clone())
            };
            let split = split_non_expander(&g.induced(&local), params.mu, params.nu, &sub_w)?;
            record.kind = SplitKind::NonExpander;
            record.split_bound = Some(split.bound);
            if !split.within_bound {
                return Err(Error::BoundViolated(format!(
                    "split leaves {} arcs against the order, bound {}",
                    split.forward_arcs, split.bound
                )));
            }
            let s1: Vec<usize> = split.s_prime.iter().map(|&i| local[i]).collect();
            let s2: Vec<usize> = split.s.iter().map(|&i| local[i]).collect();
            let s2_set = g.set_of(&s2);
            for &v in &s1 {
                let from: Vec<usize> = g.in_set(v).intersection(&s2_set).collect();
                for u in from {
                    run.add_bad(u, v);
                }
            }
            run.members[lp].clear();
            run.sizes[lp] = 0;
            let a = run.new_piece(&s1);
            let b = run.new_piece(&s2);
            run.order.splice(pos..=pos, [a, b]);
            run.recount(a);
            run.recount(b);
        }
        record.new_bad = run.bad_count - before;
        // (6) drop vertices on too many bad arcs
        for v in 0..gn {
            if run.piece[v] != GONE && run.bad_deg[v] as f64 > delete_above {
                run.detach(v);
                record.deleted.push(v);
                deleted.push(v);
            }
        }
        log.push(record);
        tau += 1;
    };

    let sets: Vec<Vec<usize>> = run.order.iter().map(|&p| run.members[p].ones().collect()).collect();
    let outcome = match robust {
        Some((pos, _, semi)) => {
            let s = sets[pos].clone();
            let s_minus: Vec<usize> = sets[..pos].iter().flatten().copied().collect();
            let s_plus: Vec<usize> = sets[pos + 1..].iter().flatten().copied().collect();
            let one_sided = one_sided(g, &s, &s_minus, &s_plus, delete_above);
            DecomposeOutcome::RobustPiece { index: pos, s, s_minus, s_plus, min_semidegree: semi, one_sided }
        }
        None => {
            // within a piece, higher in-piece out-degree first
            let mut order = Vec::with_capacity(gn);
            for s in &sets {
                let set = g.set_of(s);
                let mut part = s.clone();
                part.sort_by_key(|&v| (std::cmp::Reverse(g.out_set(v).intersection_count(&set)), v));
                order.extend(part);
            }
            let backward_count = g.backward_count(&order);
            DecomposeOutcome::AlmostTransitive { order, backward_count, bound: 2.0 * params.gamma * nf * nf }
        }
    };
    deleted.sort_unstable();
    Ok(Decomposition {
        outcome,
        state: PartitionState { sets, bad: run.bad, bad_count: run.bad_count, deleted, log },
        iterations: tau,
        n,
    })
}

fn one_sided(g: &Tournament, s: &[usize], minus: &[usize], plus: &[usize], limit: f64) -> OneSided {
    let (ss, sm, sp) = (g.set_of(s), g.set_of(minus), g.set_of(plus));
    let mut s_or_minus = ss.clone();
    s_or_minus.union_with(&sm);
    let mut s_or_plus = ss.clone();
    s_or_plus.union_with(&sp);
    let max = |vs: &[usize], f: &dyn Fn(usize) -> usize| vs.iter().map(|&v| f(v)).max().unwrap_or(0);
    OneSided {
        plus_out: max(plus, &|v| g.out_set(v).intersection_count(&s_or_minus)),
        core_out: max(s, &|v| g.out_set(v).intersection_count(&sm)),
        core_in: max(s, &|v| g.in_set(v).intersection_count(&sp)),
        minus_in: max(minus, &|v| g.in_set(v).intersection_count(&s_or_plus)),
        limit,
    }
}

/// Results of the logged-invariant scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DecomposeAudit {
    pub disjoint: bool,
    /// Every arc from a later piece to an earlier one is in `B`.
    pub backward_in_bad: bool,
    /// `|B| ≤ (degree splits)·ηn + (witness splits)·4μ|G|²`.
    pub bad_edges_bounded: bool,
    /// Deleted vertices at most `2|B|/(√η·n)`.
    pub deletions_bounded: bool,
    /// Witness splits at most `|G|/(γνn)`.
    pub witness_splits_bounded: bool,
    /// At most `|G|` iterations, one new piece each.
    pub iterations_bounded: bool,
    pub outcome_bounded: bool,
}

impl DecomposeAudit {
    pub fn all(&self) -> bool {
        self.disjoint
            && self.backward_in_bad
            && self.bad_edges_bounded
            && self.deletions_bounded
            && self.witness_splits_bounded
            && self.iterations_bounded
            && self.outcome_bounded
    }
}

pub fn audit(g: &Tournament, dec: &Decomposition, params: &Params) -> DecomposeAudit {
    let gn = g.n();
    let nf = dec.n as f64;
    let st = &dec.state;
    let mut seen = FixedBitSet::with_capacity(gn);
    let mut disjoint = true;
    for v in st.sets.iter().flatten() {
        disjoint &= !seen.put(*v);
    }
    disjoint &= st.deleted.iter().all(|&v| !seen.contains(v));
    let mut earlier = FixedBitSet::with_capacity(gn);
    let mut backward_in_bad = true;
    for s in &st.sets {
        for &v in s {
            backward_in_bad &= g.out_set(v).intersection(&earlier).all(|u| st.bad[v].contains(u));
        }
        for &v in s {
            earlier.insert(v);
        }
    }
    let degree_splits = st.log.iter().filter(|r| r.kind != SplitKind::NonExpander).count();
    let witness_splits = st.log.len() - degree_splits;
    let bad_bound = degree_splits as f64 * params.eta * nf + witness_splits as f64 * 4.0 * params.mu * (gn * gn) as f64;
    let outcome_bounded = match &dec.outcome {
        DecomposeOutcome::AlmostTransitive { backward_count, bound, .. } => *backward_count as f64 <= *bound + 1e-9,
        DecomposeOutcome::RobustPiece { min_semidegree, .. } => *min_semidegree as f64 >= params.eta * nf - 1e-9,
    };
    DecomposeAudit {
        disjoint,
        backward_in_bad,
        bad_edges_bounded: st.bad_count as f64 <= bad_bound + 1e-9,
        deletions_bounded: st.deleted.len() as f64 <= 2.0 * st.bad_count as f64 / (params.eta.sqrt() * nf) + 1e-9,
        witness_splits_bounded: witness_splits as f64 <= gn as f64 / (params.gamma * params.nu * nf) + 1e-9,
        iterations_bounded: dec.iterations <= gn && st.sets.len() == dec.iterations + 1,
        outcome_bounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::generate::{gen_random_tournament, gen_transitive_tournament};
    use crate::expander::is_witness;

    fn small_params() -> Params {
        let mut p = Params::desk();
        p.expander_samples = 16;
        p
    }

    #[test]
    fn transitive_host_is_almost_transitive() {
        let g = gen_transitive_tournament(120);
        let p = small_params();
        let dec = decompose(&g, 50, &p, 0).unwrap();
        match &dec.outcome {
            DecomposeOutcome::AlmostTransitive { order, backward_count, .. } => {
                assert_eq!(*backward_count, 0);
                assert_eq!(order.len(), 120);
                assert_eq!(g.backward_count(order), 0);
            }
            o => panic!("unexpected {o:?}"),
        }
        assert_eq!(dec.state.bad_count, 0);
        assert!(audit(&g, &dec, &p).all());
    }

    #[test]
    fn random_host_is_one_robust_piece() {
        let g = gen_random_tournament(200, 4);
        let p = small_params();
        let dec = decompose(&g, 80, &p, 0).unwrap();
        match &dec.outcome {
            DecomposeOutcome::RobustPiece { s, s_minus, s_plus, .. } => {
                assert_eq!(s.len(), 200);
                assert!(s_minus.is_empty() && s_plus.is_empty());
            }
            o => panic!("unexpected {o:?}"),
        }
        assert_eq!(dec.iterations, 0);
        // exhaustive check on 18-vertex subsamples finds no witness either
        for off in [0usize, 50, 100] {
            let verts: Vec<usize> = (off..off + 18).collect();
            let sub = g.induced(&verts);
            let ex = is_robust_outexpander(&sub, 0.1, 0.2, CheckMode::Exhaustive).unwrap();
            let sa = is_robust_outexpander(&sub, 0.1, 0.2, CheckMode::Sampled { count: 64, seed: 1 }).unwrap();
            assert!(ex.is_expander || !sa.is_expander || ex.witness.is_some());
            if let Some(w) = &sa.witness {
                assert!(is_witness(&sub, &sub.set_of(w), 0.1, 0.2));
            }
        }
    }

    #[test]
    fn joined_blocks_are_split() {
        // A → B for every pair across, random inside
        let (a, b) = (90, 90);
        let inner = gen_random_tournament(a + b, 8);
        let g = Tournament::from_fn(a + b, |u, v| if (u < a) != (v < a) { u < a } else { inner.has_arc(u, v) });
        let p = small_params();
        let dec = decompose(&g, 60, &p, 0).unwrap();
        assert!(dec.state.log.iter().any(|r| r.kind == SplitKind::NonExpander));
        match &dec.outcome {
            DecomposeOutcome::RobustPiece { s, s_plus, s_minus, one_sided, .. } => {
                let in_a = s.iter().filter(|&&v| v < a).count();
                assert!(in_a == 0 || in_a == s.len(), "piece mixes blocks");
                assert!(s_minus.len() + s_plus.len() > 0);
                assert!((one_sided.plus_out as f64) <= one_sided.limit);
            }
            o => panic!("unexpected {o:?}"),
        }
        assert_eq!(dec.state.bad_count, 0);
        assert!(audit(&g, &dec, &p).all(), "{:?}", audit(&g, &dec, &p));
    }

    #[test]
    fn rejects_unordered_constants() {
        let mut p = small_params();
        p.mu = 0.2;
        assert!(decompose(&gen_transitive_tournament(5), 3, &p, 0).is_err());
    }
}

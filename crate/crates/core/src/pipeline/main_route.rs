//! The whole pipeline: decompose the host, then embed into the robust
//! piece alone, along the almost-transitive order, or split the tree into
//! `T⁻ → T⁰ → T⁺` across the piece and its one-sided surroundings.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::decompose::{audit, decompose, DecomposeAudit, DecomposeOutcome};
use super::expander_route::{embed_in_pool, ExpanderReport};
use super::transitive::{embed_almost_transitive, TransitiveStats, EXACT_BASE};
use super::Params;
use crate::digraph::{validate_embedding, DirectedTree, Embedding, Tournament};
use crate::error::{failed, precondition, Error, Result};
use crate::exact::{Search, SearchOutcome};
use crate::num;
use crate::rng::derive;
use crate::structure::{contract, peel_split, peel_violation};

/// Nesting limit for pieces of `T⁻` or `T⁺` embedded by a fresh run.
pub const MAX_MAIN_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MainRoute {
    /// The host had three times the tree's size.
    Exact,
    AlmostTransitive,
    /// All of `T` in the robust piece.
    Expander,
    Split,
}

/// Which sides of the robust piece receive part of the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCase {
    Minus,
    Plus,
    Both,
}

/// `|S|, |S⁺|, |S⁻|` as fractions of the undeleted host.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Betas {
    pub beta: f64,
    pub plus: f64,
    pub minus: f64,
    /// `αβ²/20`: sides at most this large stay empty.
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub iterations: usize,
    pub pieces: usize,
    pub deleted: usize,
    pub bad_count: usize,
}

/// How one part of the contracted tree was placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartMethod {
    /// Exact search inside the common neighbourhood `S*`.
    Exact,
    /// A fresh run on the tournament induced by `S*`.
    Recursive,
    /// Exact search on the whole free side, only the anchored vertices
    /// restricted.
    Wide,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitReport {
    pub case: SplitCase,
    pub minus_size: usize,
    pub zero_size: usize,
    pub plus_size: usize,
    /// `T⁰` components of at least `n/Δ'` vertices, embedded first.
    pub large: usize,
    pub large_size: usize,
    pub parts: usize,
    pub max_preceding: usize,
    /// Smallest `|S*|/|P|` over the parts placed after the large ones.
    pub min_room: Option<f64>,
    pub exact_parts: usize,
    pub recursive_parts: usize,
    pub wide_parts: usize,
    pub peel_ok: bool,
    pub large_report: Option<ExpanderReport>,
    pub recursive: Vec<MainReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainReport {
    pub route: MainRoute,
    /// Whole runs tried, counting the successful one.
    pub attempts: usize,
    pub depth: usize,
    pub tree_size: usize,
    pub host_size: usize,
    pub decomposition: Option<DecompositionSummary>,
    pub audit: Option<DecomposeAudit>,
    pub betas: Option<Betas>,
    pub expander: Option<ExpanderReport>,
    pub transitive: Option<TransitiveStats>,
    pub split: Option<SplitReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub depth: usize,
    pub millis: f64,
}

#[derive(Clone, Debug)]
pub struct MainEmbedding {
    pub embedding: Embedding,
    pub report: MainReport,
    /// Wall-clock times, kept apart from the deterministic report.
    pub timings: Vec<StageTiming>,
}

fn host_suffices(t: &DirectedTree, host: usize, params: &Params) -> bool {
    let (h, n) = (host as f64 + 1e-9, t.n() as f64);
    h >= 2.0 * (1.0 + params.alpha) * n || (t.max_degree() <= params.max_degree && h >= (1.0 + params.alpha) * n)
}

/// Embeds `T` into `G`, which needs `2(1+α)|T|` vertices, or `(1+α)|T|`
/// when `Δ(T)` is at most the preset's bounded degree. A failed run is
/// repeated with a fresh seed up to `main_retries` times.
pub fn embed_main(t: &DirectedTree, g: &Tournament, params: &Params, seed: u64) -> Result<MainEmbedding> {
    if !host_suffices(t, g.n(), params) {
        return precondition(format!("{} host vertices for a {}-vertex tree of max degree {}", g.n(), t.n(), t.max_degree()));
    }
    let mut timings = Vec::new();
    let mut last = None;
    for attempt in 0..=params.main_retries {
        match run(t, g, params, derive(seed, attempt as u64), 0, &mut timings) {
            Ok((embedding, mut report)) => {
                report.attempts = attempt + 1;
                return Ok(MainEmbedding { embedding, report, timings });
            }
            Err(e @ Error::EmbedFailed { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Turns a precondition miss inside a stage into a failure of that stage.
fn at<T>(stage: &str, r: Result<T>) -> Result<T> {
    match r {
        Err(Error::Precondition(reason)) => Err(Error::EmbedFailed { step: stage.to_string(), reason }),
        Err(Error::EmbedFailed { step, reason }) => Err(Error::EmbedFailed { step: format!("{stage}/{step}"), reason }),
        other => other,
    }
}

fn timed<T>(timings: &mut Vec<StageTiming>, stage: &str, depth: usize, f: impl FnOnce(&mut Vec<StageTiming>) -> T) -> T {
    let start = Instant::now();
    let out = f(timings);
    timings.push(StageTiming { stage: stage.to_string(), depth, millis: start.elapsed().as_secs_f64() * 1e3 });
    out
}

fn report(route: MainRoute, depth: usize, t: &DirectedTree, g: &Tournament) -> MainReport {
    MainReport {
        route,
        attempts: 1,
        depth,
        tree_size: t.n(),
        host_size: g.n(),
        decomposition: None,
        audit: None,
        betas: None,
        expander: None,
        transitive: None,
        split: None,
    }
}

fn run(
    t: &DirectedTree,
    g: &Tournament,
    params: &Params,
    seed: u64,
    depth: usize,
    timings: &mut Vec<StageTiming>,
) -> Result<(Embedding, MainReport)> {
    if depth > MAX_MAIN_DEPTH {
        return failed("depth", format!("nesting exceeds {MAX_MAIN_DEPTH}"));
    }
    let n = t.n();
    if n <= EXACT_BASE || g.n() >= 3 * n {
        let found = timed(timings, "exact", depth, |_| Search::new(t, g).node_limit(params.node_limit).run())?;
        if let SearchOutcome::Found(e) = found {
            return Ok((e, report(MainRoute::Exact, depth, t, g)));
        }
    }
    let dec = timed(timings, "decompose", depth, |_| decompose(g, n, params, derive(seed, 0)))?;
    let checks = audit(g, &dec, params);
    if !checks.all() {
        return Err(Error::BoundViolated(format!("decomposition audit failed: {checks:?}")));
    }
    let summary = DecompositionSummary {
        iterations: dec.iterations,
        pieces: dec.state.sets.len(),
        deleted: dec.state.deleted.len(),
        bad_count: dec.state.bad_count,
    };
    let (embedding, mut rep) = match &dec.outcome {
        DecomposeOutcome::AlmostTransitive { order, backward_count, .. } => {
            let h = order.len() as f64;
            let eps = *backward_count as f64 / (h * h).max(1.0);
            let out = timed(timings, "almost-transitive", depth, |_| {
                at("almost-transitive", embed_almost_transitive(t, g, order, eps, params.alpha / 2.0, params))
            })?;
            let mut rep = report(MainRoute::AlmostTransitive, depth, t, g);
            rep.transitive = Some(out.stats);
            (out.embedding, rep)
        }
        DecomposeOutcome::RobustPiece { s, s_minus, s_plus, .. } => {
            let total = (s.len() + s_minus.len() + s_plus.len()) as f64;
            let beta = s.len() as f64 / total;
            let betas = Betas {
                beta,
                plus: s_plus.len() as f64 / total,
                minus: s_minus.len() as f64 / total,
                threshold: params.alpha * beta * beta / 20.0,
            };
            let (e, mut rep) = if betas.plus <= betas.threshold && betas.minus <= betas.threshold {
                let out = timed(timings, "expander", depth, |_| at("expander", embed_in_pool(t, g, s, params, derive(seed, 1))))?;
                let mut rep = report(MainRoute::Expander, depth, t, g);
                rep.expander = Some(out.report);
                (out.embedding, rep)
            } else {
                let sides = Sides { minus: s_minus, zero: s, plus: s_plus };
                let (e, split) = timed(timings, "split", depth, |tm| split_route(t, g, &sides, betas, params, seed, depth, tm))?;
                let mut rep = report(MainRoute::Split, depth, t, g);
                rep.split = Some(split);
                (e, rep)
            };
            rep.betas = Some(betas);
            (e, rep)
        }
    };
    rep.decomposition = Some(summary);
    rep.audit = Some(checks);
    if let Err(v) = validate_embedding(t, g, &embedding) {
        return Err(Error::BoundViolated(format!("pipeline output invalid: {v:?}")));
    }
    Ok((embedding, rep))
}

struct Sides<'a> {
    minus: &'a [usize],
    zero: &'a [usize],
    plus: &'a [usize],
}

/// One forest on the listed components, joined into a single tree by an
/// arc between a leaf of each component and a leaf of the next; degrees
/// grow to at most two, so bounded trees stay bounded. Returns the tree on
/// local ids (local `i` is `verts[i]`) and `verts`.
fn join_components(t: &DirectedTree, comps: &[&Vec<usize>]) -> Result<(DirectedTree, Vec<usize>)> {
    let verts: Vec<usize> = comps.iter().flat_map(|c| c.iter().copied()).collect();
    let mut arcs = Vec::with_capacity(verts.len());
    let mut base = 0;
    let mut prev_leaf: Option<usize> = None;
    for c in comps {
        let sub = t.induced(c)?;
        arcs.extend(sub.arcs().into_iter().map(|(a, b)| (base + a, base + b)));
        let leaves: Vec<usize> = (0..sub.n()).filter(|&x| sub.degree(x) <= 1).collect();
        if let Some(p) = prev_leaf {
            arcs.push((p, base + leaves[0]));
        }
        prev_leaf = Some(base + *leaves.last().unwrap());
        base += c.len();
    }
    Ok((DirectedTree::from_arcs(verts.len(), &arcs, 0)?, verts))
}

#[allow(clippy::too_many_arguments)]
fn split_route(
    t: &DirectedTree,
    g: &Tournament,
    sides: &Sides,
    betas: Betas,
    params: &Params,
    seed: u64,
    depth: usize,
    timings: &mut Vec<StageTiming>,
) -> Result<(Embedding, SplitReport)> {
    let n = t.n();
    let nf = n as f64;
    let ab = params.alpha * betas.beta;
    let minus_on = betas.minus > betas.threshold;
    let plus_on = betas.plus > betas.threshold;
    let case = match (minus_on, plus_on) {
        (true, true) => SplitCase::Both,
        (true, false) => SplitCase::Minus,
        _ => SplitCase::Plus,
    };
    let size = |on: bool, b: f64| if on { num::round_half_up(b * (1.0 - ab) * nf) } else { 0 };
    let (minus_size, plus_size) = (size(minus_on, betas.minus), size(plus_on, betas.plus));
    let peel = peel_split(t, minus_size, plus_size)?;
    if let Some((a, b)) = peel_violation(t, &peel) {
        return Err(Error::BoundViolated(format!("tree split arc {a} -> {b} points the wrong way")));
    }
    // 0 = T⁻, 1 = T⁰, 2 = T⁺
    let mut side = vec![1u8; n];
    peel.minus.iter().for_each(|&v| side[v] = 0);
    peel.plus.iter().for_each(|&v| side[v] = 2);
    let comps_of = |s: u8| t.components(&side.iter().map(|&x| x == s).collect::<Vec<_>>());
    let zero_comps = comps_of(1);
    let large_idx: Vec<usize> = (0..zero_comps.len()).filter(|&i| zero_comps[i].len() * params.delta_prime >= n).collect();
    let mut parts: Vec<(u8, Vec<usize>)> = zero_comps.into_iter().map(|c| (1, c)).collect();
    parts.extend(comps_of(0).into_iter().map(|c| (0, c)));
    parts.extend(comps_of(2).into_iter().map(|c| (2, c)));

    let mut phi = Embedding::empty(n);
    let mut used = FixedBitSet::with_capacity(g.n());
    let mut rep = SplitReport {
        case,
        minus_size: peel.minus.len(),
        zero_size: peel.zero.len(),
        plus_size: peel.plus.len(),
        large: large_idx.len(),
        large_size: large_idx.iter().map(|&i| parts[i].1.len()).sum(),
        parts: parts.len(),
        max_preceding: 0,
        min_room: None,
        exact_parts: 0,
        recursive_parts: 0,
        wide_parts: 0,
        peel_ok: true,
        large_report: None,
        recursive: Vec::new(),
    };

    if !large_idx.is_empty() {
        let comps: Vec<&Vec<usize>> = large_idx.iter().map(|&i| &parts[i].1).collect();
        let (joined, verts) = join_components(t, &comps)?;
        let out = timed(timings, "large-components", depth, |_| {
            at("large-components", embed_in_pool(&joined, g, sides.zero, params, derive(seed, 2)))
        })?;
        for (i, &x) in verts.iter().enumerate() {
            let v = out.embedding.get(i).expect("total");
            phi.set(x, v);
            used.insert(v);
        }
        rep.large_report = Some(out.report);
    }

    let con = contract(t, &parts.iter().map(|p| p.1.clone()).collect::<Vec<_>>(), &large_idx)?;
    rep.max_preceding = con.max_preceding();
    let regions: Vec<FixedBitSet> = [sides.minus, sides.zero, sides.plus].iter().map(|s| g.set_of(s)).collect();
    let beta_side = [betas.minus, betas.beta, betas.plus];
    let bounded = t.max_degree() <= params.max_degree;
    for (step, &p) in con.order.iter().enumerate().skip(large_idx.len()) {
        let (s, verts) = (&parts[p].0, &parts[p].1);
        let mut free = regions[*s as usize].clone();
        free.difference_with(&used);
        let mut star = free.clone();
        let mut anchored: Vec<(usize, FixedBitSet)> = Vec::new();
        for &x in verts {
            let mut allowed: Option<FixedBitSet> = None;
            for y in t.neighbours(x) {
                if let Some(hy) = phi.get(y) {
                    let nb = g.nbr_set(hy, t.arc_between(y, x) == Some(true));
                    star.intersect_with(nb);
                    let a = allowed.get_or_insert_with(|| free.clone());
                    a.intersect_with(nb);
                }
            }
            if let Some(a) = allowed {
                anchored.push((x, a));
            }
        }
        let sub = t.induced(verts)?;
        let room = star.count_ones(..) as f64 / verts.len() as f64;
        rep.min_room = Some(rep.min_room.map_or(room, |r: f64| r.min(room)));
        let star_list: Vec<usize> = star.ones().collect();
        let b = beta_side[*s as usize];
        let big = *s != 1 && verts.len() as f64 >= if bounded { b * params.alpha * nf / 2.0 } else { b * nf / 2.0 };
        let part_seed = derive(seed, 16 + step as u64);

        let exact = |avail: FixedBitSet, doms: &[(usize, FixedBitSet)]| -> Result<Option<Embedding>> {
            let mut search = Search::new(&sub, g).avail(avail).node_limit(params.node_limit);
            for (x, a) in doms {
                let lx = verts.iter().position(|v| v == x).unwrap();
                search = search.domain(&[lx], a);
            }
            Ok(search.run()?.found())
        };
        let mut placed: Option<(Embedding, PartMethod)> = None;
        let order: &[PartMethod] =
            if big { &[PartMethod::Recursive, PartMethod::Exact, PartMethod::Wide] } else if *s == 1 { &[PartMethod::Exact, PartMethod::Wide] } else { &[PartMethod::Exact, PartMethod::Recursive, PartMethod::Wide] };
        for &method in order {
            let got = match method {
                PartMethod::Exact => exact(star.clone(), &[])?,
                PartMethod::Wide => exact(free.clone(), &anchored)?,
                PartMethod::Recursive => {
                    if !host_suffices(&sub, star_list.len(), params) && star_list.len() < 3 * sub.n() {
                        None
                    } else {
                        let h = g.induced(&star_list);
                        match run(&sub, &h, params, part_seed, depth + 1, timings) {
                            Ok((e, r)) => {
                                rep.recursive.push(r);
                                Some(Embedding { map: e.map.iter().map(|v| v.map(|l| star_list[l])).collect() })
                            }
                            Err(Error::EmbedFailed { .. }) => None,
                            Err(e) => return Err(e),
                        }
                    }
                }
            };
            if let Some(e) = got {
                placed = Some((e, method));
                break;
            }
        }
        let Some((e, method)) = placed else {
            let which = ["minus", "zero", "plus"][*s as usize];
            return failed("split-part", format!("no copy of a {}-vertex {which} part in {} candidates", verts.len(), star_list.len()));
        };
        match method {
            PartMethod::Exact => rep.exact_parts += 1,
            PartMethod::Recursive => rep.recursive_parts += 1,
            PartMethod::Wide => rep.wide_parts += 1,
        }
        for (i, &x) in verts.iter().enumerate() {
            let v = e.get(i).expect("total");
            phi.set(x, v);
            used.insert(v);
        }
    }
    Ok((phi, rep))
}

use clap::Args;
use serde::Serialize;
use tourney_core::allocate::binom_mod_k_exact;

use crate::output::{CliError, CliResult, Ctx, Outcome};

#[derive(Args)]
pub struct BinomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long)]
    k: usize,
    /// Pass when every residue probability lies in (1 ± tol)/k.
    #[arg(long, default_value_t = 0.2)]
    tol: f64,
}

#[derive(Serialize)]
struct BinomReport {
    n: usize,
    p: f64,
    k: usize,
    probabilities: Vec<f64>,
    /// `2ⁿ·P(r)` when `p = 1/2` and `n ≤ 52`, where every value is an exact
    /// dyadic rational.
    counts_over_2n: Option<Vec<u64>>,
    min_ratio: f64,
    max_ratio: f64,
    within_tolerance: bool,
}

pub fn run(_ctx: &Ctx, a: &BinomArgs) -> CliResult<Outcome> {
    if !(a.tol >= 0.0) {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    let probs = binom_mod_k_exact(a.n, a.p, a.k)?;
    let kf = a.k as f64;
    let ratios: Vec<f64> = probs.iter().map(|q| q * kf).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let within = ratios.iter().all(|&r| (r - 1.0).abs() < a.tol);
    let counts = (a.p == 0.5 && a.n <= 52).then(|| probs.iter().map(|q| (q * (1u64 << a.n) as f64) as u64).collect::<Vec<u64>>());
    let mut lines: Vec<String> = probs.iter().enumerate().map(|(r, q)| format!("residue {r}: {q:.9}")).collect();
    if let Some(c) = &counts {
        lines.push(format!("residue 0: {}/{}", c[0], 1u64 << a.n));
    }
    let report = BinomReport {
        n: a.n,
        p: a.p,
        k: a.k,
        probabilities: probs,
        counts_over_2n: counts,
        min_ratio,
        max_ratio,
        within_tolerance: within,
    };
    Outcome::new(report, within, lines)
}

use serde::{Deserialize, Serialize};

use crate::allocate::{EmbedParams, RestrictParams};
use crate::error::{invalid, Error, Result};

/// The shipped desk preset, byte for byte.
pub const DESK_PRESET: &str = include_str!("../../../../presets/desk.json");

/// Every constant the pipeline uses. Orderings between them are checked
/// by [`Params::hierarchy`], never assumed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub notes: Vec<String>,
    /// Clusters per cycle.
    pub k: usize,
    /// Nominal cluster size of the desk cycle.
    pub m: usize,
    pub eps: f64,
    pub d: f64,
    /// Good-set degree fraction; also the piece threshold `γn` of the
    /// decomposition.
    pub gamma: f64,
    pub c: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
    /// Semidegree floor `ηn` of a robust piece.
    pub eta: f64,
    /// `T⁰` components of at least `n/Δ'` vertices go through the
    /// expander machinery.
    pub delta_prime: usize,
    /// Trees with `Δ(T)` at most this take the bounded-degree route.
    pub max_degree: usize,
    /// Core-tree parameter of the almost-transitive recursion and of `T_ext`.
    pub core_delta: usize,
    /// Core parameter of the extended tree; its heaviness thresholds are
    /// `ext_delta^(ext_k^t)`.
    pub ext_delta: usize,
    /// Level base of the extended tree.
    pub ext_k: usize,
    pub omega: f64,
    /// The small constant in the pivot position of the almost-transitive
    /// recursion.
    pub transitive_gamma: f64,
    pub lambda: f64,
    pub eps_prime: f64,
    pub y_floor: usize,
    pub l_pad: f64,
    pub z_floor: usize,
    pub override_h_budget: bool,
    pub retries: usize,
    pub restarts: usize,
    pub alloc_tries: usize,
    /// Allocations per bounded-degree cycle embedding.
    pub cycle_retries: usize,
    /// Random cluster partitions tried before giving up on a cycle.
    pub cycle_attempts: usize,
    pub regularity_samples: usize,
    pub expander_samples: usize,
    /// Trees up to this size are first tried by exact search.
    pub exact_cutoff: usize,
    pub node_limit: u64,
    /// Whole `embed_main` runs with fresh seeds after a failure.
    pub main_retries: usize,
    /// Each constant of a chain must be at most `1/factor` of the next.
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyViolation {
    pub smaller: String,
    pub larger: String,
    pub smaller_value: f64,
    pub larger_value: f64,
}

impl Params {
    pub fn desk() -> Params {
        Params::from_json(DESK_PRESET).expect("shipped preset parses")
    }

    pub fn from_json(s: &str) -> Result<Params> {
        let p: Params = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if self.k < 3 || self.m == 0 {
            return invalid("need k >= 3 and m >= 1");
        }
        if ![self.eps, self.d, self.gamma, self.c, self.mu, self.nu, self.eta, self.lambda, self.omega, self.transitive_gamma]
            .into_iter()
            .all(unit)
        {
            return invalid("eps, d, gamma, c, mu, nu, eta, lambda, omega and transitive_gamma must lie in (0,1)");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !(self.eps_prime > 0.0) {
            return invalid("need 0 < alpha <= 1 and eps_prime > 0");
        }
        if self.delta_prime < 2 || self.max_degree < 1 || self.core_delta < 2 || self.ext_delta < 2 || self.ext_k < 2 {
            return invalid("need delta_prime, core_delta, ext_delta, ext_k >= 2 and max_degree >= 1");
        }
        if self.factor < 1.0 {
            return invalid("factor must be at least 1");
        }
        Ok(())
    }

    fn chain(&self, names: &[(&str, f64)]) -> Vec<HierarchyViolation> {
        names
            .windows(2)
            .filter(|w| w[0].1 * self.factor > w[1].1 + 1e-12)
            .map(|w| HierarchyViolation {
                smaller: w[0].0.to_string(),
                larger: w[1].0.to_string(),
                smaller_value: w[0].1,
                larger_value: w[1].1,
            })
            .collect()
    }

    /// `μ ≪ ν ≪ η ≪ 1/Δ' ≪ γ ≪ α`.
    pub fn decomposition_chain(&self) -> Vec<HierarchyViolation> {
        self.chain(&[
            ("mu", self.mu),
            ("nu", self.nu),
            ("eta", self.eta),
            ("1/delta_prime", 1.0 / self.delta_prime as f64),
            ("gamma", self.gamma),
            ("alpha", self.alpha),
        ])
    }

    /// All three chains: the cluster-cycle chain `1/m ≪ 1/k ≪ ε ≪ γ ≪ c ≪
    /// d ≪ α`, the decomposition chain, and `γ_t ≪ 1/Δ ≪ α` of the
    /// almost-transitive recursion.
    pub fn hierarchy(&self) -> Vec<HierarchyViolation> {
        let mut out = self.chain(&[
            ("1/m", 1.0 / self.m as f64),
            ("1/k", 1.0 / self.k as f64),
            ("eps", self.eps),
            ("gamma", self.gamma),
            ("c", self.c),
            ("d", self.d),
            ("alpha", self.alpha),
        ]);
        out.extend(self.decomposition_chain());
        out.extend(self.chain(&[
            ("transitive_gamma", self.transitive_gamma),
            ("1/core_delta", 1.0 / self.core_delta as f64),
            ("alpha", self.alpha),
        ]));
        out
    }

    pub fn embed_params(&self) -> Result<EmbedParams> {
        let mut p = EmbedParams::new(self.c, self.gamma, self.alpha)?;
        p.node_limit = self.node_limit;
        Ok(p)
    }

    pub fn restrict_params(&self, lambda: f64) -> Result<RestrictParams> {
        Ok(RestrictParams {
            embed: self.embed_params()?,
            lambda,
            eps_prime: self.eps_prime,
            y_floor: self.y_floor,
            l_pad: self.l_pad,
            z_floor: self.z_floor,
            override_h_budget: self.override_h_budget,
            retries: self.retries,
            restarts: self.restarts,
            alloc_tries: self.alloc_tries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_preset_values() {
        let p = Params::desk();
        assert_eq!((p.k, p.m, p.eps, p.d, p.gamma, p.c, p.alpha), (5, 400, 0.2, 0.5, 0.05, 0.25, 0.3));
        assert!(p.decomposition_chain().is_empty());
        let v: Vec<(String, String)> = p.hierarchy().into_iter().map(|v| (v.smaller, v.larger)).collect();
        let want = [("1/k", "eps"), ("eps", "gamma"), ("d", "alpha")];
        assert_eq!(v, want.map(|(a, b)| (a.to_string(), b.to_string())));
    }

    #[test]
    fn rejects_bad_presets() {
        assert!(matches!(Params::from_json("{"), Err(Error::Parse(_))));
        let mut v: serde_json::Value = serde_json::from_str(DESK_PRESET).unwrap();
        v["mu"] = serde_json::json!(1.5);
        assert!(Params::from_json(&v.to_string()).is_err());
        v["mu"] = serde_json::json!(0.0025);
        v["surprise"] = serde_json::json!(1);
        assert!(Params::from_json(&v.to_string()).is_err());
    }
}

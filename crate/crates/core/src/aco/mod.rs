//! Ant colony routing with stench pheromones.
//!
//! Evaporation is destination dependent: hops into a gateway (set G) use a
//! boosted, lower evaporation rate, hops into a less desirable trail (set U)
//! a stench rate, everything else the base rate. Each ant that completes a
//! walk deposits `(1 − ρ_sd)·Φ_sd + ρ_sd / TRC` on the edges it used.

mod colony;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gateways::ClusterRoutingSpec;
use crate::metrics::{DcSign, FeatureWeights};

pub use colony::{find_route, run_inter_cluster, traverse_all};

/// Lower bound applied to costs before they are used as divisors.
pub const COST_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcoParams {
    /// Probability threshold T: a hop is greedy when f ≤ T.
    pub threshold: f64,
    pub ants: usize,
    pub iterations: usize,
    pub initial_pheromone: f64,
    pub rho: f64,
    pub weights: FeatureWeights,
    pub dc_sign: DcSign,
    pub boost_factor: f64,
    pub stench_factor: f64,
    pub seed: u64,
    /// Evaluate the ants of an iteration concurrently against a pheromone
    /// snapshot; deposits are applied in ant order after the iteration.
    pub parallel: bool,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            threshold: 0.8,
            ants: 1000,
            iterations: 100,
            initial_pheromone: 0.2,
            rho: 0.2,
            weights: FeatureWeights::default(),
            dc_sign: DcSign::Plus,
            boost_factor: 0.25,
            stench_factor: 0.75,
            seed: 0,
            parallel: false,
        }
    }
}

impl AcoParams {
    /// Defaults for routing across cluster gateways: 100 ants, 50 iterations.
    pub fn inter_cluster() -> Self {
        AcoParams {
            ants: 100,
            iterations: 50,
            ..AcoParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad(format!("threshold {} outside [0, 1]", self.threshold));
        }
        if self.ants == 0 || self.iterations == 0 {
            return bad("ants and iterations must be positive".into());
        }
        if !(self.initial_pheromone > 0.0 && self.initial_pheromone.is_finite()) {
            return bad(format!("initial pheromone {} must be > 0", self.initial_pheromone));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho {} outside (0, 1)", self.rho));
        }
        if !(self.boost_factor > 0.0 && self.boost_factor < self.stench_factor) {
            return bad("boost factor must be positive and below the stench factor".into());
        }
        if !(self.stench_factor > 0.0 && self.stench_factor < 1.0 / self.rho) {
            return bad("stench factor must keep the evaporation rate below 1".into());
        }
        FeatureWeights::new(self.weights.alpha, self.weights.beta, self.weights.gamma)?;
        Ok(())
    }
}

/// Evaporation rate for a hop into `d`.
pub fn evaporation_rate(d: &str, spec: &ClusterRoutingSpec, params: &AcoParams) -> f64 {
    if spec.is_gateway(d) {
        params.rho * params.boost_factor
    } else if spec.is_ldt(d) {
        params.rho * params.stench_factor
    } else {
        params.rho
    }
}

/// Pheromone after one deposit with evaporation `rho_sd` and route cost
/// `cost` (clamped to [`COST_EPSILON`]).
pub fn deposit_update(phi: f64, rho_sd: f64, cost: f64) -> f64 {
    (1.0 - rho_sd) * phi + rho_sd / cost.max(COST_EPSILON)
}

/// Dense per-directed-edge pheromone levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    data: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn new(n: usize, initial: f64) -> Self {
        PheromoneMatrix {
            n,
            data: vec![initial; n * n],
        }
    }

    #[inline]
    pub fn get(&self, s: usize, d: usize) -> f64 {
        self.data[s * self.n + d]
    }

    #[inline]
    pub fn set(&mut self, s: usize, d: usize, v: f64) {
        self.data[s * self.n + d] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Candidate with the largest Φ/Δ; ties go to the smallest `key`.
pub fn next_node_greedy<K: Ord>(
    candidates: &[usize],
    phi: impl Fn(usize) -> f64,
    cost: impl Fn(usize) -> f64,
    key: impl Fn(usize) -> K,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &c in candidates {
        let score = phi(c) / cost(c).max(COST_EPSILON);
        best = match best {
            None => Some((c, score)),
            Some((b, bs)) if score > bs || (score == bs && key(c) < key(b)) => Some((c, score)),
            keep => keep,
        };
    }
    best.map(|(c, _)| c)
}

/// Samples a candidate with probability proportional to Φ/Δ.
pub fn next_node_probabilistic<R: Rng + ?Sized>(
    candidates: &[usize],
    phi: impl Fn(usize) -> f64,
    cost: impl Fn(usize) -> f64,
    rng: &mut R,
) -> Option<usize> {
    match candidates {
        [] => None,
        [only] => Some(*only),
        _ => {
            let weights: Vec<f64> =
                candidates.iter().map(|&c| phi(c) / cost(c).max(COST_EPSILON)).collect();
            let total: f64 = weights.iter().sum();
            let mut r = rng.gen::<f64>() * total;
            for (&c, w) in candidates.iter().zip(&weights) {
                if r < *w {
                    return Some(c);
                }
                r -= w;
            }
            candidates.last().copied()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteMode {
    ToGateway,
    TraverseAll,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub mode: RouteMode,
    pub path: Vec<String>,
    /// Δ of each hop; `hop_costs.len() + 1 == path.len()`.
    pub hop_costs: Vec<f64>,
    /// Total route cost: the sum of `hop_costs`.
    pub trc: f64,
    pub iterations_run: usize,
    /// 1-based iteration in which the final best route was first found.
    pub best_iteration: usize,
    /// Best TRC seen after each iteration (infinite until a route is found).
    pub best_history: Vec<f64>,
    /// False when no ant completed the task; `path` is then the longest
    /// partial walk seen.
    pub complete: bool,
    pub parallel: bool,
}

impl RouteResult {
    pub fn hops(&self) -> usize {
        self.hop_costs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn spec() -> ClusterRoutingSpec {
        let members = ["g", "u", "n"].iter().map(|s| s.to_string()).collect();
        ClusterRoutingSpec::new(
            "t",
            members,
            BTreeSet::from(["g".to_string()]),
            BTreeSet::from(["u".to_string()]),
        )
        .unwrap()
    }

    #[test]
    fn evaporation_branches() {
        let p = AcoParams::default();
        let s = spec();
        assert_eq!(evaporation_rate("g", &s, &p), 0.2 * 0.25);
        assert_eq!(evaporation_rate("u", &s, &p), 0.2 * 0.75);
        assert_eq!(evaporation_rate("n", &s, &p), 0.2);
        assert!((evaporation_rate("g", &s, &p) - 0.05).abs() < 1e-15);
        assert!((evaporation_rate("u", &s, &p) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn deposit_examples() {
        assert!((deposit_update(0.2, 0.2, 1.0) - 0.36).abs() < 1e-12);
        assert_eq!(deposit_update(0.7, 0.0, 3.0), 0.7);
        assert!((deposit_update(0.2, 0.05, 0.5) - 0.29).abs() < 1e-12);
        assert!(deposit_update(0.2, 0.2, 0.0).is_finite());
    }

    #[test]
    fn deposit_ordering_with_large_cost() {
        // With Δ = 10 and Φ = 0.2 the update is 0.2 − 0.1·ρ_sd, decreasing in
        // ρ_sd. Both multipliers are below 1, so ρ_G < ρ_U < ρ and the edge
        // into U keeps more pheromone than the neutral one.
        let p = AcoParams::default();
        let s = spec();
        let into = |d: &str| deposit_update(0.2, evaporation_rate(d, &s, &p), 10.0);
        assert!((into("g") - 0.195).abs() < 1e-12);
        assert!((into("u") - 0.185).abs() < 1e-12);
        assert!((into("n") - 0.18).abs() < 1e-12);
        assert!(into("g") > into("u") && into("u") > into("n"));
    }

    #[test]
    fn greedy_selection() {
        let key = |c: usize| c;
        assert_eq!(next_node_greedy(&[4], |_| 0.1, |_| 1.0, key), Some(4));
        assert_eq!(next_node_greedy(&[], |_| 0.1, |_| 1.0, key), None);
        let phi = |c: usize| if c == 1 { 0.3 } else { 0.2 };
        assert_eq!(next_node_greedy(&[0, 1], phi, |_| 0.5, key), Some(1));
        assert_eq!(next_node_greedy(&[3, 2], |_| 0.2, |_| 0.5, key), Some(2));
    }

    #[test]
    fn greedy_matches_exhaustive_ratio() {
        let phi = [0.2, 0.35, 0.1, 0.5, 0.25];
        let cost = [0.4, 0.9, 0.05, 1.2, 0.3];
        let cands = [0, 1, 2, 3, 4];
        let pick = next_node_greedy(&cands, |c| phi[c], |c| cost[c], |c| c).unwrap();
        let brute = (0..5).max_by(|&a, &b| (phi[a] / cost[a]).total_cmp(&(phi[b] / cost[b])));
        assert_eq!(Some(pick), brute);
    }

    fn frequencies(ratios: &[f64], draws: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cands: Vec<usize> = (0..ratios.len()).collect();
        let mut hits = vec![0usize; ratios.len()];
        for _ in 0..draws {
            hits[next_node_probabilistic(&cands, |c| ratios[c], |_| 1.0, &mut rng).unwrap()] += 1;
        }
        hits.iter().map(|&h| h as f64 / draws as f64).collect()
    }

    #[test]
    fn probabilistic_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(next_node_probabilistic(&[9], |_| 1.0, |_| 1.0, &mut rng), Some(9));
        let f = frequencies(&[1.0, 1.0], 10_000);
        assert!((f[0] - 0.5).abs() < 0.02);
        let f = frequencies(&[1.0, 2.0, 3.0], 10_000);
        for (got, want) in f.iter().zip([1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]) {
            assert!((got - want).abs() < 0.02, "{f:?}");
        }
    }

    #[test]
    fn params_validation() {
        assert!(AcoParams::default().validate().is_ok());
        let p = AcoParams {
            rho: 1.0,
            ..AcoParams::default()
        };
        assert!(p.validate().is_err());
        let p = AcoParams {
            ants: 0,
            ..AcoParams::default()
        };
        assert!(p.validate().is_err());
    }
}

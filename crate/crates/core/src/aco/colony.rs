use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    deposit_update, evaporation_rate, next_node_greedy, next_node_probabilistic, AcoParams,
    PheromoneMatrix, RouteMode, RouteResult, COST_EPSILON,
};
use crate::dataset::AdjacencyGraph;
use crate::error::{Error, Result};
use crate::gateways::ClusterRoutingSpec;
use crate::metrics::NormalizedFeatures;
use crate::seeds;

/// The routing problem in local indices.
struct Colony<'a> {
    ids: Vec<String>,
    adj: Vec<Vec<usize>>,
    cost: Vec<Vec<f64>>,
    rho_into: Vec<f64>,
    goal: Vec<bool>,
    params: &'a AcoParams,
    mode: RouteMode,
}

enum Walk {
    Done(Vec<usize>),
    DeadEnd(Vec<usize>),
}

impl<'a> Colony<'a> {
    fn new(
        graph: &AdjacencyGraph,
        spec: &ClusterRoutingSpec,
        params: &'a AcoParams,
        nf: &NormalizedFeatures,
        mode: RouteMode,
    ) -> Result<Self> {
        let ids = graph.nodes().to_vec();
        let nf_idx = ids.iter().map(|id| nf.index_of(id)).collect::<Result<Vec<_>>>()?;
        let n = ids.len();
        let adj = (0..n).map(|i| graph.neighbor_indices(i).collect()).collect();
        let cost = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            0.0
                        } else {
                            nf.cost(nf_idx[i], nf_idx[j], &params.weights, params.dc_sign)
                        }
                    })
                    .collect()
            })
            .collect();
        let rho_into = ids.iter().map(|id| evaporation_rate(id, spec, params)).collect();
        let goal = ids.iter().map(|id| spec.is_gateway(id)).collect();
        Ok(Colony {
            ids,
            adj,
            cost,
            rho_into,
            goal,
            params,
            mode,
        })
    }

    fn finished(&self, path: &[usize]) -> bool {
        match self.mode {
            RouteMode::ToGateway => self.goal[*path.last().unwrap()],
            RouteMode::TraverseAll => path.len() == self.ids.len(),
        }
    }

    fn walk<R: Rng>(&self, start: usize, pher: &PheromoneMatrix, rng: &mut R) -> Walk {
        let n = self.ids.len();
        let mut visited = vec![false; n];
        let mut path = vec![start];
        visited[start] = true;
        let mut candidates = Vec::with_capacity(n);
        loop {
            if self.finished(&path) {
                return Walk::Done(path);
            }
            let s = *path.last().unwrap();
            candidates.clear();
            candidates.extend(self.adj[s].iter().copied().filter(|&d| !visited[d]));
            let phi = |d: usize| pher.get(s, d);
            let cost = |d: usize| self.cost[s][d];
            let f: f64 = rng.gen();
            let next = if f <= self.params.threshold {
                next_node_greedy(&candidates, phi, cost, |d| &self.ids[d])
            } else {
                next_node_probabilistic(&candidates, phi, cost, rng)
            };
            match next {
                Some(d) => {
                    visited[d] = true;
                    path.push(d);
                }
                None => return Walk::DeadEnd(path),
            }
        }
    }

    fn path_cost(&self, path: &[usize]) -> f64 {
        path.windows(2).fold(0.0, |acc, w| acc + self.cost[w[0]][w[1]])
    }

    fn deposit(&self, pher: &mut PheromoneMatrix, path: &[usize]) {
        let trc = self.path_cost(path).max(COST_EPSILON);
        for w in path.windows(2) {
            let (s, d) = (w[0], w[1]);
            pher.set(s, d, deposit_update(pher.get(s, d), self.rho_into[d], trc));
        }
    }

    fn run(&self, start: Option<usize>) -> RouteResult {
        let p = self.params;
        let n = self.ids.len();
        let mut pher = PheromoneMatrix::new(n, p.initial_pheromone);
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let mut best: Option<(f64, Vec<usize>, usize)> = None;
        let mut longest_partial: Vec<usize> = Vec::new();
        let mut history = Vec::with_capacity(p.iterations);

        let mut consider = |walk: &Walk, iteration: usize, best: &mut Option<(f64, Vec<usize>, usize)>| {
            match walk {
                Walk::Done(path) => {
                    let c = self.path_cost(path);
                    if best.as_ref().is_none_or(|b| c < b.0) {
                        *best = Some((c, path.clone(), iteration));
                    }
                }
                Walk::DeadEnd(path) => {
                    if path.len() > longest_partial.len() {
                        longest_partial = path.clone();
                    }
                }
            }
        };

        for iteration in 1..=p.iterations {
            if p.parallel {
                let walks: Vec<Walk> = (0..p.ants)
                    .into_par_iter()
                    .map(|ant| {
                        let mut ant_rng = ChaCha8Rng::seed_from_u64(seeds::derive_indexed(
                            p.seed,
                            iteration as u64,
                            ant as u64,
                        ));
                        let s = start.unwrap_or_else(|| ant_rng.gen_range(0..n));
                        self.walk(s, &pher, &mut ant_rng)
                    })
                    .collect();
                for walk in &walks {
                    if let Walk::Done(path) = walk {
                        self.deposit(&mut pher, path);
                    }
                    consider(walk, iteration, &mut best);
                }
            } else {
                for _ in 0..p.ants {
                    let s = start.unwrap_or_else(|| rng.gen_range(0..n));
                    let walk = self.walk(s, &pher, &mut rng);
                    if let Walk::Done(path) = &walk {
                        self.deposit(&mut pher, path);
                    }
                    consider(&walk, iteration, &mut best);
                }
            }
            history.push(best.as_ref().map_or(f64::INFINITY, |b| b.0));
        }

        let (path, complete, best_iteration) = match best {
            Some((_, path, it)) => (path, true, it),
            None => (longest_partial, false, 0),
        };
        let hop_costs: Vec<f64> = path.windows(2).map(|w| self.cost[w[0]][w[1]]).collect();
        RouteResult {
            mode: self.mode,
            path: path.iter().map(|&i| self.ids[i].clone()).collect(),
            trc: hop_costs.iter().fold(0.0, |a, c| a + c),
            hop_costs,
            iterations_run: p.iterations,
            best_iteration,
            best_history: history,
            complete,
            parallel: p.parallel,
        }
    }
}

fn reachable_goal(graph: &AdjacencyGraph, source: usize, goal: &[bool]) -> bool {
    let mut seen = vec![false; graph.nodes().len()];
    let mut queue = VecDeque::from([source]);
    seen[source] = true;
    while let Some(u) = queue.pop_front() {
        if goal[u] {
            return true;
        }
        for v in graph.neighbor_indices(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

/// Lowest-cost simple path from `source` to any gateway of `spec`, over the
/// nodes of `graph`. Every ant starts at `source`.
pub fn find_route(
    graph: &AdjacencyGraph,
    source: &str,
    spec: &ClusterRoutingSpec,
    params: &AcoParams,
    nf: &NormalizedFeatures,
) -> Result<RouteResult> {
    params.validate()?;
    let s = graph.index_of(source).ok_or_else(|| Error::UnknownId(source.to_string()))?;
    let colony = Colony::new(graph, spec, params, nf, RouteMode::ToGateway)?;
    if !reachable_goal(graph, s, &colony.goal) {
        return Err(Error::Routing(format!(
            "no gateway of `{}` is reachable from `{source}`",
            spec.label
        )));
    }
    let result = colony.run(Some(s));
    if !result.complete {
        return Err(Error::Routing(format!(
            "no ant reached a gateway of `{}` from `{source}`",
            spec.label
        )));
    }
    Ok(result)
}

/// Lowest-cost open path visiting every node of `node_set` exactly once,
/// using only edges of `graph` among those nodes. Ants start at random
/// nodes. If no ant completes a traversal the result is flagged incomplete.
pub fn traverse_all(
    graph: &AdjacencyGraph,
    node_set: &[String],
    spec: &ClusterRoutingSpec,
    params: &AcoParams,
    nf: &NormalizedFeatures,
) -> Result<RouteResult> {
    params.validate()?;
    if node_set.is_empty() {
        return Err(Error::Routing("cannot traverse an empty node set".into()));
    }
    let sub = graph.induced(node_set)?;
    let colony = Colony::new(&sub, spec, params, nf, RouteMode::TraverseAll)?;
    Ok(colony.run(None))
}

/// Traversal across cluster gateways: `traverse_all` over every member of
/// `spec`. Callers typically pass [`AcoParams::inter_cluster`]-sized budgets.
pub fn run_inter_cluster(
    graph: &AdjacencyGraph,
    spec: &ClusterRoutingSpec,
    params: &AcoParams,
    nf: &NormalizedFeatures,
) -> Result<RouteResult> {
    if spec.members.is_empty() {
        return Err(Error::Routing("inter-cluster run without gateways".into()));
    }
    traverse_all(graph, &spec.members, spec, params, nf)
}

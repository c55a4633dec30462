//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use continet::dataset::{AdjacencyGraph, Country, CountryDataset, GeoPoint, SubRegion};
use continet::metrics::{DcSign, FeatureWeights, NormalizedFeatures};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub fn set(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// A random connected instance: countries with random attributes and a
/// random spanning tree plus extra edges.
pub struct Instance {
    pub ds: CountryDataset,
    pub graph: AdjacencyGraph,
    pub nf: NormalizedFeatures,
}

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, extra_edge_p: f64) -> Instance {
    let countries: Vec<Country> = (0..n)
        .map(|i| Country {
            id: format!("n{i}"),
            name: format!("Node {i}"),
            sub_region: SubRegion::Central,
            centroid: GeoPoint::new(rng.gen_range(-35.0..35.0), rng.gen_range(-20.0..50.0))
                .unwrap(),
            population: rng.gen_range(100_000..200_000_000),
            dc_count: rng.gen_range(0..20),
            landings: 0,
        })
        .collect();
    let ds = CountryDataset::new(countries).unwrap();
    let names = ds.ids();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((names[order[i]].clone(), names[parent].clone()));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen::<f64>() < extra_edge_p {
                edges.push((names[a].clone(), names[b].clone()));
            }
        }
    }
    let graph = AdjacencyGraph::from_edges(names.clone(), &edges).unwrap();
    let nf = NormalizedFeatures::new(&ds, &names).unwrap();
    Instance { ds, graph, nf }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cost_matrix(g: &AdjacencyGraph, nf: &NormalizedFeatures, w: &FeatureWeights) -> Vec<Vec<f64>> {
    let idx: Vec<usize> = g.nodes().iter().map(|id| nf.index_of(id).unwrap()).collect();
    let n = idx.len();
    (0..n)
        .map(|i| (0..n).map(|j| nf.cost(idx[i], idx[j], w, DcSign::Plus)).collect())
        .collect()
}

/// Dijkstra from `source` to the cheapest member of `targets`.
pub fn dijkstra_to_set(
    g: &AdjacencyGraph,
    nf: &NormalizedFeatures,
    w: &FeatureWeights,
    source: &str,
    targets: &BTreeSet<String>,
) -> Option<f64> {
    let c = cost_matrix(g, nf, w);
    let n = g.nodes().len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[g.index_of(source).unwrap()] = 0.0;
    loop {
        let u = (0..n).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&a, &b| {
            dist[a].total_cmp(&dist[b])
        })?;
        if targets.contains(&g.nodes()[u]) {
            return Some(dist[u]);
        }
        done[u] = true;
        for v in g.neighbor_indices(u) {
            let nd = dist[u] + c[u][v];
            if nd < dist[v] {
                dist[v] = nd;
            }
        }
    }
}

/// Cheapest open path over all nodes of `g`, by enumerating permutations.
pub fn best_hamiltonian_path(
    g: &AdjacencyGraph,
    nf: &NormalizedFeatures,
    w: &FeatureWeights,
) -> Option<f64> {
    let c = cost_matrix(g, nf, w);
    let n = g.nodes().len();
    let mut best = None::<f64>;
    let mut perm: Vec<usize> = (0..n).collect();
    fn rec(
        k: usize,
        perm: &mut Vec<usize>,
        cost: f64,
        c: &[Vec<f64>],
        g: &AdjacencyGraph,
        best: &mut Option<f64>,
    ) {
        let n = perm.len();
        if k == n {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            let ok = k == 0 || g.neighbor_indices(perm[k - 1]).any(|x| x == perm[k]);
            if ok {
                let add = if k == 0 { 0.0 } else { c[perm[k - 1]][perm[k]] };
                rec(k + 1, perm, cost + add, c, g, best);
            }
            perm.swap(k, i);
        }
    }
    rec(0, &mut perm, 0.0, &c, g, &mut best);
    best
}

//! End-to-end planning: cluster → gateways → member routes and per-cluster
//! traversals → inter-cluster traversal → optional unclustered traversal.
//!
//! Every route is described by a self-contained [`RouteJob`] (node set,
//! graph mode, G/U sets, normalization bounds, parameters with a derived
//! seed). The plan keeps the jobs, so any result can be recomputed from the
//! manifest alone.

mod config;
mod export;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aco::{find_route, traverse_all, AcoParams, RouteResult};
use crate::clustering::{
    au_reference, cluster_names, hac_complete, kmeans_with, kmedoids, optics_xi,
    ClusterAssignment, DistanceMatrix, FeatureMatrix, KMeansOptions, Label,
};
use crate::dataset::{
    self, build_adjacency, AdjacencyGraph, AdjacencyMode, CountryDataset, Link,
};
use crate::error::{Error, Result};
use crate::gateways::{derive_spec, select_pcgs, ClusterRoutingSpec, GatewayConfig};
use crate::metrics::{FeatureBounds, NormScope, NormalizedFeatures};
use crate::seeds;

pub use config::{Clustering, Features, RunConfig, SetOverride};
pub use export::{
    assignments_csv, costs_csv, dot, export_csv, export_dot, export_geojson, geojson, routes_csv,
    traversals_csv, write_outputs, Manifest, OUTPUT_FILES,
};

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Loaded input tables plus content digests.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub dataset: CountryDataset,
    pub borders: Vec<Link>,
    pub maritime: Vec<Link>,
    pub digests: BTreeMap<String, String>,
}

impl Inputs {
    /// The bundled reference tables.
    pub fn reference() -> Inputs {
        Inputs::load(&RunConfig::default()).expect("bundled tables are valid")
    }

    pub fn load(cfg: &RunConfig) -> Result<Inputs> {
        let read = |path: &Option<std::path::PathBuf>, bundled: &'static str| -> Result<Vec<u8>> {
            match path {
                Some(p) => std::fs::read(p).map_err(|e| Error::io(p, e)),
                None => Ok(bundled.as_bytes().to_vec()),
            }
        };
        let name = |path: &Option<std::path::PathBuf>, bundled: &str| {
            path.as_ref().map_or(bundled.to_string(), |p| p.display().to_string())
        };
        use dataset::reference as r;
        let countries = read(&cfg.countries, r::COUNTRIES_CSV)?;
        let cables = read(&cfg.cables, r::CABLES_CSV)?;
        let borders = read(&cfg.borders, r::BORDERS_CSV)?;
        let maritime = read(&cfg.maritime, r::MARITIME_CSV)?;

        let mut ds = dataset::load_countries(countries.as_slice())?;
        let cable_rows = dataset::load_cables(cables.as_slice())?;
        ds.set_landings(&dataset::landings_per_country(&cable_rows));
        let borders_links =
            dataset::load_links(borders.as_slice(), &name(&cfg.borders, "borders.csv"))?;
        let maritime_links =
            dataset::load_links(maritime.as_slice(), &name(&cfg.maritime, "maritime.csv"))?;

        let digests = [
            ("countries", &countries),
            ("cables", &cables),
            ("borders", &borders),
            ("maritime", &maritime),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), sha256_hex(v)))
        .collect();
        Ok(Inputs {
            dataset: ds,
            borders: borders_links,
            maritime: maritime_links,
            digests,
        })
    }

    pub fn graph(&self, mode: AdjacencyMode) -> Result<AdjacencyGraph> {
        build_adjacency(&self.dataset, mode, &self.borders, &self.maritime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    /// Member → nearest gateway of its cluster.
    Intra,
    /// All members of one cluster, each once.
    Traverse,
    /// Across cluster gateways.
    Inter,
    /// All countries as one set.
    Unclustered,
}

/// Everything needed to (re)compute one route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteJob {
    pub id: String,
    pub kind: JobKind,
    pub label: String,
    /// Start node for `Intra` jobs.
    pub source: Option<String>,
    pub nodes: Vec<String>,
    pub adjacency: AdjacencyMode,
    pub gateways: BTreeSet<String>,
    pub ldts: BTreeSet<String>,
    pub bounds: FeatureBounds,
    pub params: AcoParams,
}

impl RouteJob {
    pub fn spec(&self) -> Result<ClusterRoutingSpec> {
        ClusterRoutingSpec::new(
            self.label.clone(),
            self.nodes.clone(),
            self.gateways.clone(),
            self.ldts.clone(),
        )
    }

    /// Runs the job against `inputs`.
    pub fn run(&self, inputs: &Inputs) -> Result<RouteResult> {
        let ds = &inputs.dataset;
        let graph = inputs.graph(self.adjacency)?.induced(&self.nodes)?;
        let nf = NormalizedFeatures::with_bounds(ds, &self.nodes, self.bounds)?;
        let spec = self.spec()?;
        match self.kind {
            JobKind::Intra => {
                let source = self
                    .source
                    .as_deref()
                    .ok_or_else(|| Error::Parameter(format!("job `{}` has no source", self.id)))?;
                find_route(&graph, source, &spec, &self.params, &nf)
            }
            _ => traverse_all(&graph, &self.nodes, &spec, &self.params, &nf),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPlan {
    pub label: String,
    pub spec: ClusterRoutingSpec,
    /// One route per member, in member order.
    pub routes: Vec<RouteResult>,
    pub traversal: RouteResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRoute {
    pub spec: ClusterRoutingSpec,
    pub result: RouteResult,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostSummary {
    /// (label, member count, traversal TRC) per cluster.
    pub per_cluster: Vec<(String, usize, f64)>,
    pub intra_total: f64,
    pub inter_nodes: usize,
    pub inter_total: f64,
    pub continental_total: f64,
    pub unclustered_total: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinentalPlan {
    pub name: String,
    pub seed: u64,
    pub assignment: Option<ClusterAssignment>,
    pub clusters: Vec<ClusterPlan>,
    /// Countries left unclustered (OPTICS noise); they get no member route.
    pub noise: Vec<String>,
    pub inter: Option<StageRoute>,
    pub unclustered: Option<StageRoute>,
    pub summary: CostSummary,
    pub jobs: Vec<RouteJob>,
}

impl ContinentalPlan {
    /// Every route in the plan, in job order.
    pub fn routes(&self) -> Vec<&RouteResult> {
        let mut out = Vec::new();
        for c in &self.clusters {
            out.extend(c.routes.iter());
        }
        for c in &self.clusters {
            out.push(&c.traversal);
        }
        out.extend(self.inter.iter().map(|s| &s.result));
        out.extend(self.unclustered.iter().map(|s| &s.result));
        out
    }

    pub fn total_hops(&self) -> usize {
        self.routes().iter().map(|r| r.hops()).sum()
    }
}

/// Partition of the dataset plus display labels, one per cluster; `None`
/// for unclustered runs.
pub fn cluster(cfg: &RunConfig, ds: &CountryDataset) -> Result<Option<(ClusterAssignment, Vec<String>)>> {
    let w = &cfg.aco.weights;
    let assignment = match &cfg.clustering {
        Clustering::None => return Ok(None),
        Clustering::Au => au_reference(ds),
        Clustering::KMeans { k, features } => {
            let fm = match features {
                Features::Geo => FeatureMatrix::geo(ds),
                Features::Multi => FeatureMatrix::multi(ds)?,
            };
            let opts = KMeansOptions {
                seed: seeds::derive(cfg.seed, "clustering"),
                ..KMeansOptions::default()
            };
            kmeans_with(&fm, *k, &opts)?.assignment
        }
        Clustering::KMedoids { k, metric } => kmedoids(ds, *k, *metric, w)?.assignment,
        Clustering::Hac { cut, metric } => {
            hac_complete(&DistanceMatrix::for_dataset(ds, *metric, w)?, *cut)?.0
        }
        Clustering::Optics { min_pts, xi, metric } => {
            optics_xi(&DistanceMatrix::for_dataset(ds, *metric, w)?, *min_pts, *xi)?.assignment
        }
        Clustering::Declared { clusters } => {
            let mut of: BTreeMap<&str, usize> = BTreeMap::new();
            for (c, (label, members)) in clusters.iter().enumerate() {
                for m in members {
                    ds.require(m)?;
                    if of.insert(m, c).is_some() {
                        return Err(Error::Validation(format!(
                            "`{m}` is declared in more than one cluster (again in `{label}`)"
                        )));
                    }
                }
            }
            if let Some(missing) = ds.ids().into_iter().find(|id| !of.contains_key(id.as_str())) {
                return Err(Error::Validation(format!("`{missing}` is not in any declared cluster")));
            }
            let raw: Vec<Option<usize>> = ds.iter().map(|c| Some(of[c.id.as_str()])).collect();
            let a = ClusterAssignment::new(ds.ids(), &raw, "declared");
            let names = a
                .clusters()
                .iter()
                .map(|m| clusters[of[m[0].as_str()]].0.clone())
                .collect();
            return Ok(Some((a, names)));
        }
    };
    let names = cluster_names(ds, &assignment);
    Ok(Some((assignment, names)))
}

/// Declared G/U sets restricted to `members`; falls back to the derived
/// sets when nothing declared survives.
fn resolve_spec(
    label: &str,
    members: Vec<String>,
    ds: &CountryDataset,
    gw: &GatewayConfig,
    over: Option<&SetOverride>,
) -> Result<ClusterRoutingSpec> {
    let derived = derive_spec(label, members.clone(), ds, gw)?;
    let Some(over) = over else { return Ok(derived) };
    let keep = |s: &BTreeSet<String>| -> BTreeSet<String> {
        s.iter().filter(|id| members.contains(id)).cloned().collect()
    };
    let gateways = match &over.gateways {
        Some(g) if !keep(g).is_empty() => keep(g),
        _ => derived.gateways.clone(),
    };
    let ldts = match &over.ldts {
        Some(u) => keep(u),
        None => derived.ldts.clone(),
    };
    let ldts = ldts.difference(&gateways).cloned().collect();
    ClusterRoutingSpec::new(label, members, gateways, ldts)
}

fn check_ids(ds: &CountryDataset, ids: &BTreeSet<String>) -> Result<()> {
    ids.iter().try_for_each(|id| ds.require(id).map(|_| ()))
}

fn validate(cfg: &RunConfig, ds: &CountryDataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::Validation("the country table is empty".into()));
    }
    check_ids(ds, &cfg.gateways.desert)?;
    check_ids(ds, &cfg.gateways.neutral)?;
    for o in cfg.overrides.values().chain([&cfg.inter, &cfg.unclustered_sets]) {
        for s in [&o.gateways, &o.ldts].into_iter().flatten() {
            check_ids(ds, s)?;
        }
    }
    if cfg.inter.ldts.is_some() && cfg.inter.gateways.is_none() {
        return Err(Error::Validation("`inter_ldts` needs `inter_gateways`".into()));
    }
    Ok(())
}

/// Builds every route job of the run without executing any.
pub fn plan_jobs(
    cfg: &RunConfig,
    inputs: &Inputs,
) -> Result<(Option<(ClusterAssignment, Vec<String>)>, Vec<ClusterRoutingSpec>, Vec<RouteJob>)> {
    let ds = &inputs.dataset;
    validate(cfg, ds).map_err(|e| e.in_stage("validation"))?;
    let clustered = cluster(cfg, ds).map_err(|e| e.in_stage("clustering"))?;

    let gateway_stage = || -> Result<Vec<ClusterRoutingSpec>> {
        let Some((a, names)) = &clustered else { return Ok(Vec::new()) };
        if let Some(label) = cfg.overrides.keys().find(|l| !names.contains(l)) {
            return Err(Error::Validation(format!(
                "G/U override for unknown cluster `{label}` (clusters: {})",
                names.join(", ")
            )));
        }
        names
            .iter()
            .enumerate()
            .map(|(c, label)| resolve_spec(label, a.members(c), ds, &cfg.gateways, cfg.overrides.get(label)))
            .collect()
    };
    let specs = gateway_stage().map_err(|e| e.in_stage("gateways"))?;

    let mut jobs = Vec::new();
    let job = |kind: JobKind, id: String, source: Option<String>, spec: &ClusterRoutingSpec,
               adjacency: AdjacencyMode, scope: NormScope, params: AcoParams|
     -> Result<RouteJob> {
        let bounds = match scope {
            NormScope::Cluster => FeatureBounds::over(ds, &spec.members)?,
            NormScope::Global => FeatureBounds::global(ds)?,
        };
        Ok(RouteJob {
            params: AcoParams {
                seed: seeds::derive(cfg.seed, &id),
                ..params
            },
            id,
            kind,
            label: spec.label.clone(),
            source,
            nodes: spec.members.clone(),
            adjacency,
            gateways: spec.gateways.clone(),
            ldts: spec.ldts.clone(),
            bounds,
        })
    };
    let build = |jobs: &mut Vec<RouteJob>| -> Result<()> {
        for spec in &specs {
            for m in &spec.members {
                jobs.push(job(
                    JobKind::Intra,
                    format!("intra/{}/{m}", spec.label),
                    Some(m.clone()),
                    spec,
                    cfg.adjacency,
                    cfg.norm_scope,
                    cfg.aco,
                )?);
            }
        }
        for spec in &specs {
            jobs.push(job(
                JobKind::Traverse,
                format!("traverse/{}", spec.label),
                None,
                spec,
                cfg.traverse_adjacency,
                cfg.norm_scope,
                cfg.aco,
            )?);
        }
        if !specs.is_empty() {
            let spec = inter_spec(cfg, ds, &specs)?;
            jobs.push(job(
                JobKind::Inter,
                "inter".into(),
                None,
                &spec,
                AdjacencyMode::Complete,
                cfg.inter_norm_scope,
                cfg.inter_params(),
            )?);
        }
        if cfg.unclustered {
            let mut spec = derive_spec("continent", ds.ids(), ds, &cfg.gateways)?;
            if let Some(g) = &cfg.unclustered_sets.gateways {
                spec.gateways = g.clone();
            }
            if let Some(u) = &cfg.unclustered_sets.ldts {
                spec.ldts = u.clone();
            }
            let spec = ClusterRoutingSpec::new(spec.label, spec.members, spec.gateways, spec.ldts)?;
            jobs.push(job(
                JobKind::Unclustered,
                "unclustered".into(),
                None,
                &spec,
                cfg.traverse_adjacency,
                NormScope::Global,
                cfg.aco,
            )?);
        }
        Ok(())
    };
    build(&mut jobs).map_err(|e| e.in_stage("routing"))?;
    Ok((clustered, specs, jobs))
}

/// Declared inter-cluster sets, or: G = every cluster gateway, plus the
/// neutral PCGs as ordinary (base-rate) nodes.
fn inter_spec(cfg: &RunConfig, ds: &CountryDataset, specs: &[ClusterRoutingSpec]) -> Result<ClusterRoutingSpec> {
    if let Some(g) = &cfg.inter.gateways {
        let u = cfg.inter.ldts.clone().unwrap_or_default();
        let nodes: Vec<String> = g.union(&u).cloned().collect();
        return ClusterRoutingSpec::new("inter", nodes, g.clone(), u);
    }
    let g: BTreeSet<String> = specs.iter().flat_map(|s| s.gateways.iter().cloned()).collect();
    let pcgs = select_pcgs(&ds.landings(), cfg.gateways.pcg_threshold);
    let extra: BTreeSet<String> = pcgs.intersection(&cfg.gateways.neutral).cloned().collect();
    let nodes: Vec<String> = g.union(&extra).cloned().collect();
    ClusterRoutingSpec::new("inter", nodes, g, BTreeSet::new())
}

/// Runs the full pipeline. Jobs are independent and run concurrently; each
/// has its own derived seed, so the result does not depend on scheduling.
pub fn run_plan(cfg: &RunConfig, inputs: &Inputs) -> Result<ContinentalPlan> {
    let (clustered, specs, jobs) = plan_jobs(cfg, inputs)?;
    let results: Vec<RouteResult> = jobs
        .par_iter()
        .map(|j| {
            j.run(inputs).map_err(|e| match e {
                Error::Routing(m) => Error::Routing(format!("{}: {m}", j.id)),
                other => other,
            })
        })
        .collect::<Result<_>>()
        .map_err(|e| e.in_stage("routing"))?;

    let mut by_id: BTreeMap<&str, &RouteResult> = BTreeMap::new();
    for (j, r) in jobs.iter().zip(&results) {
        by_id.insert(&j.id, r);
    }
    let clusters: Vec<ClusterPlan> = specs
        .iter()
        .map(|spec| ClusterPlan {
            label: spec.label.clone(),
            spec: spec.clone(),
            routes: spec
                .members
                .iter()
                .map(|m| by_id[format!("intra/{}/{m}", spec.label).as_str()].clone())
                .collect(),
            traversal: by_id[format!("traverse/{}", spec.label).as_str()].clone(),
        })
        .collect();
    let stage = |kind: JobKind| -> Result<Option<StageRoute>> {
        jobs.iter()
            .zip(&results)
            .find(|(j, _)| j.kind == kind)
            .map(|(j, r)| Ok(StageRoute { spec: j.spec()?, result: r.clone() }))
            .transpose()
    };
    let inter = stage(JobKind::Inter)?;
    let unclustered = stage(JobKind::Unclustered)?;

    let per_cluster: Vec<(String, usize, f64)> = clusters
        .iter()
        .map(|c| (c.label.clone(), c.spec.members.len(), c.traversal.trc))
        .collect();
    let intra_total = per_cluster.iter().fold(0.0, |acc, r| acc + r.2);
    let inter_total = inter.as_ref().map_or(0.0, |s| s.result.trc);
    let summary = CostSummary {
        intra_total,
        inter_nodes: inter.as_ref().map_or(0, |s| s.spec.members.len()),
        inter_total,
        continental_total: intra_total + inter_total,
        unclustered_total: unclustered.as_ref().map(|s| s.result.trc),
        per_cluster,
    };
    let (assignment, noise) = match clustered {
        Some((a, _)) => {
            let noise = a
                .ids
                .iter()
                .zip(&a.labels)
                .filter(|(_, l)| **l == Label::Noise)
                .map(|(id, _)| id.clone())
                .collect();
            (Some(a), noise)
        }
        None => (None, Vec::new()),
    };
    Ok(ContinentalPlan {
        name: cfg.name.clone(),
        seed: cfg.seed,
        assignment,
        clusters,
        noise,
        inter,
        unclustered,
        summary,
        jobs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub cluster: String,
    pub countries: usize,
    pub cost: f64,
}

/// Per-cluster country counts and traversal costs with totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostTable {
    pub rows: Vec<CostRow>,
    pub intra_countries: usize,
    pub intra_total: f64,
    pub inter_nodes: usize,
    pub inter_total: f64,
    pub continental_total: f64,
    pub unclustered_total: Option<f64>,
}

pub fn report_costs(plan: &ContinentalPlan) -> CostTable {
    let s = &plan.summary;
    let rows: Vec<CostRow> = s
        .per_cluster
        .iter()
        .map(|(cluster, countries, cost)| CostRow {
            cluster: cluster.clone(),
            countries: *countries,
            cost: *cost,
        })
        .collect();
    CostTable {
        intra_countries: rows.iter().map(|r| r.countries).sum(),
        rows,
        intra_total: s.intra_total,
        inter_nodes: s.inter_nodes,
        inter_total: s.inter_total,
        continental_total: s.continental_total,
        unclustered_total: s.unclustered_total,
    }
}

impl fmt::Display for CostTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:>9} {:>12}", "cluster", "countries", "route cost")?;
        for r in &self.rows {
            writeln!(f, "{:<24} {:>9} {:>12.4}", r.cluster, r.countries, r.cost)?;
        }
        writeln!(f, "{:<24} {:>9} {:>12.4}", "intra-cluster total", self.intra_countries, self.intra_total)?;
        writeln!(f, "{:<24} {:>9} {:>12.4}", "inter-cluster total", self.inter_nodes, self.inter_total)?;
        writeln!(f, "{:<24} {:>9} {:>12.4}", "continental total", "", self.continental_total)?;
        if let Some(u) = self.unclustered_total {
            writeln!(f, "{:<24} {:>9} {:>12.4}", "unclustered traversal", "", u)?;
        }
        Ok(())
    }
}

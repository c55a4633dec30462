//! Plan exports: CSV tables, GeoJSON, Graphviz DOT and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{report_costs, sha256_hex, ContinentalPlan, CostSummary, Inputs, JobKind, RouteJob, RunConfig};
use crate::aco::RouteResult;
use crate::clustering::Label;
use crate::dataset::CountryDataset;
use crate::error::{Error, Result};

/// Files written by [`write_outputs`], besides `manifest.json`.
pub const OUTPUT_FILES: [&str; 6] = [
    "assignments.csv",
    "routes.csv",
    "traversals.csv",
    "costs.csv",
    "plan.geojson",
    "plan.dot",
];

fn jobs_with_results(plan: &ContinentalPlan) -> impl Iterator<Item = (&RouteJob, &RouteResult)> {
    plan.jobs.iter().zip(plan.routes())
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn join<'a>(it: impl IntoIterator<Item = &'a String>) -> String {
    it.into_iter().cloned().collect::<Vec<_>>().join(";")
}

/// Label name per country, when the plan is clustered.
fn cluster_of(plan: &ContinentalPlan) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for c in &plan.clusters {
        for m in &c.spec.members {
            out.insert(m.clone(), c.label.clone());
        }
    }
    out
}

pub fn assignments_csv(plan: &ContinentalPlan) -> String {
    let names = cluster_of(plan);
    let rows = plan.assignment.iter().flat_map(|a| {
        let names = &names;
        a.ids.iter().zip(&a.labels).map(move |(id, l)| {
            let name = match l {
                Label::Noise => String::new(),
                Label::Cluster(_) => names.get(id).cloned().unwrap_or_default(),
            };
            vec![id.clone(), a.method.clone(), l.to_string(), name]
        })
    });
    csv_string(&["country_id", "method", "label", "cluster"], rows)
}

/// Member → gateway routes: `source,destination_set,path,cost`.
pub fn routes_csv(plan: &ContinentalPlan) -> String {
    let rows = jobs_with_results(plan).filter(|(j, _)| j.kind == JobKind::Intra).map(|(j, r)| {
        vec![
            j.source.clone().unwrap_or_default(),
            join(&j.gateways),
            join(&r.path),
            r.trc.to_string(),
        ]
    });
    csv_string(&["source", "destination_set", "path", "cost"], rows)
}

/// All-node traversals: per cluster, across clusters and unclustered.
pub fn traversals_csv(plan: &ContinentalPlan) -> String {
    let rows = jobs_with_results(plan).filter(|(j, _)| j.kind != JobKind::Intra).map(|(j, r)| {
        let kind = serde_json::to_value(j.kind).unwrap();
        vec![
            kind.as_str().unwrap().to_string(),
            j.label.clone(),
            join(&r.path),
            r.trc.to_string(),
            r.complete.to_string(),
        ]
    });
    csv_string(&["kind", "label", "path", "cost", "complete"], rows)
}

pub fn costs_csv(plan: &ContinentalPlan) -> String {
    let t = report_costs(plan);
    let mut rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| vec![r.cluster.clone(), r.countries.to_string(), r.cost.to_string()])
        .collect();
    rows.push(vec!["intra_total".into(), t.intra_countries.to_string(), t.intra_total.to_string()]);
    rows.push(vec!["inter_total".into(), t.inter_nodes.to_string(), t.inter_total.to_string()]);
    rows.push(vec!["continental_total".into(), String::new(), t.continental_total.to_string()]);
    if let Some(u) = t.unclustered_total {
        rows.push(vec!["unclustered_total".into(), String::new(), u.to_string()]);
    }
    csv_string(&["cluster", "countries", "cost"], rows)
}

/// RFC 7946 FeatureCollection: a Point per country (with its cluster) and a
/// LineString per route hop. Coordinates are `[lon, lat]`.
pub fn geojson(plan: &ContinentalPlan, ds: &CountryDataset) -> Result<Value> {
    let names = cluster_of(plan);
    let mut countries: Vec<String> = match &plan.assignment {
        Some(a) => a.ids.clone(),
        None => Vec::new(),
    };
    if countries.is_empty() {
        if let Some(u) = &plan.unclustered {
            countries = u.spec.members.clone();
        }
    }
    let mut features = Vec::new();
    for id in &countries {
        let c = ds.require(id)?;
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [c.centroid.lon, c.centroid.lat]},
            "properties": {"id": c.id, "name": c.name, "cluster": names.get(id)},
        }));
    }
    for (j, r) in jobs_with_results(plan) {
        for (hop, w) in r.path.windows(2).enumerate() {
            let (a, b) = (ds.require(&w[0])?, ds.require(&w[1])?);
            features.push(json!({
                "type": "Feature",
                "geometry": {
                    "type": "LineString",
                    "coordinates": [[a.centroid.lon, a.centroid.lat], [b.centroid.lon, b.centroid.lat]],
                },
                "properties": {
                    "route": j.id,
                    "kind": j.kind,
                    "hop": hop,
                    "from": a.id,
                    "to": b.id,
                    "cost": r.hop_costs[hop],
                },
            }));
        }
    }
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

/// Graphviz digraph with one edge per route hop.
pub fn dot(plan: &ContinentalPlan) -> String {
    let names = cluster_of(plan);
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", plan.name.replace('"', "'"));
    let _ = writeln!(out, "  node [shape=ellipse];");
    for (id, cluster) in &names {
        let _ = writeln!(out, "  \"{id}\" [cluster=\"{cluster}\"];");
    }
    for (j, r) in jobs_with_results(plan) {
        for (hop, w) in r.path.windows(2).enumerate() {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [route=\"{}\", label=\"{:.4}\"];",
                w[0], w[1], j.id, r.hop_costs[hop]
            );
        }
    }
    out.push_str("}\n");
    out
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes the CSV tables into `dir`.
pub fn export_csv(plan: &ContinentalPlan, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("assignments.csv"), &assignments_csv(plan))?;
    write(&dir.join("routes.csv"), &routes_csv(plan))?;
    write(&dir.join("traversals.csv"), &traversals_csv(plan))?;
    write(&dir.join("costs.csv"), &costs_csv(plan))
}

pub fn export_geojson(plan: &ContinentalPlan, ds: &CountryDataset, path: &Path) -> Result<()> {
    let v = geojson(plan, ds)?;
    write(path, &(serde_json::to_string_pretty(&v).expect("json value") + "\n"))
}

pub fn export_dot(plan: &ContinentalPlan, path: &Path) -> Result<()> {
    write(path, &dot(plan))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDigest {
    pub id: String,
    pub trc: f64,
    pub hops: usize,
    pub complete: bool,
    pub parallel: bool,
    /// SHA-256 of the `;`-joined path.
    pub path_sha256: String,
}

impl ResultDigest {
    fn of(id: &str, r: &RouteResult) -> ResultDigest {
        ResultDigest {
            id: id.to_string(),
            trc: r.trc,
            hops: r.hops(),
            complete: r.complete,
            parallel: r.parallel,
            path_sha256: sha256_hex(r.path.join(";").as_bytes()),
        }
    }
}

/// Everything needed to audit or regenerate a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub config: String,
    pub inputs: BTreeMap<String, String>,
    /// Deposits divide by the depositing ant's whole route cost.
    pub deposit_cost: String,
    pub jobs: Vec<RouteJob>,
    pub results: Vec<ResultDigest>,
    pub summary: CostSummary,
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(plan: &ContinentalPlan, cfg: &RunConfig, inputs: &Inputs) -> Manifest {
        Manifest {
            name: plan.name.clone(),
            seed: plan.seed,
            config: cfg.to_text(),
            inputs: inputs.digests.clone(),
            deposit_cost: "route".into(),
            results: jobs_with_results(plan).map(|(j, r)| ResultDigest::of(&j.id, r)).collect(),
            jobs: plan.jobs.clone(),
            summary: plan.summary.clone(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Manifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            row: e.line(),
            message: e.to_string(),
        })
    }

    /// Re-runs every job and checks it reproduces the recorded digest.
    pub fn verify(&self, inputs: &Inputs) -> Result<Vec<RouteResult>> {
        if inputs.digests != self.inputs {
            return Err(Error::Validation("input tables differ from the manifest's".into()));
        }
        let mut out = Vec::with_capacity(self.jobs.len());
        for (job, want) in self.jobs.iter().zip(&self.results) {
            let r = job.run(inputs)?;
            if ResultDigest::of(&job.id, &r) != *want {
                return Err(Error::Validation(format!("job `{}` did not reproduce", job.id)));
            }
            out.push(r);
        }
        Ok(out)
    }
}

/// Writes all exports plus `manifest.json` (with output digests) into `dir`.
pub fn write_outputs(
    plan: &ContinentalPlan,
    cfg: &RunConfig,
    inputs: &Inputs,
    dir: &Path,
) -> Result<Manifest> {
    export_csv(plan, dir)?;
    export_geojson(plan, &inputs.dataset, &dir.join("plan.geojson"))?;
    export_dot(plan, &dir.join("plan.dot"))?;
    let mut manifest = Manifest::new(plan, cfg, inputs);
    for f in OUTPUT_FILES {
        let p = dir.join(f);
        let bytes = std::fs::read(&p).map_err(|e| Error::io(&p, e))?;
        manifest.outputs.insert(f.to_string(), sha256_hex(&bytes));
    }
    let text = serde_json::to_string_pretty(&manifest).expect("serializable manifest") + "\n";
    write(&dir.join("manifest.json"), &text)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_plan_exports() {
        let plan = ContinentalPlan::default();
        let ds = CountryDataset::reference();
        let v = geojson(&plan, &ds).unwrap();
        assert_eq!(v["type"], "FeatureCollection");
        assert_eq!(v["features"].as_array().unwrap().len(), 0);
        assert_eq!(routes_csv(&plan), "source,destination_set,path,cost\n");
        assert!(dot(&plan).starts_with("digraph"));
    }
}

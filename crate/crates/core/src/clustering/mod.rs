//! Partitioning the node set: K-Means, PAM K-Medoids, complete-linkage HAC,
//! OPTICS with Xi extraction, elbow scans and partition comparison.

mod compare;
mod elbow;
mod hac;
mod kmeans;
mod kmedoids;
mod optics;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{CountryDataset, SubRegion};
use crate::error::{Error, Result};
use crate::metrics::{euclidean_deg, haversine, FeatureWeights, NormalizedFeatures};

pub use compare::{compare_assignments, Comparison};
pub use elbow::{elbow_calinski, elbow_distortion, knee_calinski, knee_distortion, ElbowReport};
pub use hac::{hac_complete, Dendrogram, Merge};
pub use kmeans::{kmeans, kmeans_with, KMeansFit, KMeansOptions};
pub use kmedoids::{kmedoids, pam, PamFit};
pub use optics::{optics, optics_xi, xi_clusters, OpticsFit, OpticsGraph};
pub use elbow::calinski_harabasz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Cluster(usize),
    Noise,
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(c) => Some(c),
            Label::Noise => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Cluster(c) => write!(f, "{c}"),
            Label::Noise => f.write_str("noise"),
        }
    }
}

/// Labels for every node of a universe, plus how they were produced.
///
/// Cluster labels are canonical: numbered 0.. in order of first appearance
/// along `ids`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub ids: Vec<String>,
    pub labels: Vec<Label>,
    pub method: String,
    pub params: BTreeMap<String, String>,
}

impl ClusterAssignment {
    /// Builds an assignment from raw labels, renumbering clusters canonically.
    pub fn new(ids: Vec<String>, raw: &[Option<usize>], method: impl Into<String>) -> Self {
        assert_eq!(ids.len(), raw.len(), "one label per id");
        let mut remap = HashMap::new();
        let labels = raw
            .iter()
            .map(|l| match l {
                Some(l) => {
                    let next = remap.len();
                    Label::Cluster(*remap.entry(*l).or_insert(next))
                }
                None => Label::Noise,
            })
            .collect();
        ClusterAssignment {
            ids,
            labels,
            method: method.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of non-noise clusters.
    pub fn k(&self) -> usize {
        self.labels.iter().filter_map(|l| l.cluster()).max().map_or(0, |m| m + 1)
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Noise).count()
    }

    pub fn label_of(&self, id: &str) -> Option<Label> {
        self.ids.iter().position(|x| x == id).map(|i| self.labels[i])
    }

    pub fn members(&self, cluster: usize) -> Vec<String> {
        self.ids
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| **l == Label::Cluster(cluster))
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn clusters(&self) -> Vec<Vec<String>> {
        (0..self.k()).map(|c| self.members(c)).collect()
    }

    pub fn same_cluster(&self, a: &str, b: &str) -> bool {
        match (self.label_of(a), self.label_of(b)) {
            (Some(Label::Cluster(x)), Some(Label::Cluster(y))) => x == y,
            _ => false,
        }
    }

    /// `country_id,method,label` rows with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("country_id,method,label\n");
        for (id, l) in self.ids.iter().zip(&self.labels) {
            out.push_str(&format!("{id},{},{l}\n", self.method));
        }
        out
    }
}

/// The five AU sub-regions as a partition.
pub fn au_reference(ds: &CountryDataset) -> ClusterAssignment {
    // Labels follow region order (not first appearance) so they are stable
    // across datasets; absent regions are skipped.
    let present: Vec<SubRegion> =
        SubRegion::ALL.into_iter().filter(|r| ds.iter().any(|c| c.sub_region == *r)).collect();
    let labels = ds
        .iter()
        .map(|c| Label::Cluster(present.iter().position(|r| *r == c.sub_region).unwrap()))
        .collect();
    ClusterAssignment {
        ids: ds.ids(),
        labels,
        method: "au".into(),
        params: BTreeMap::new(),
    }
}

/// The sub-region holding most of `members` (ties → enum order).
pub fn dominant_region(ds: &CountryDataset, members: &[String]) -> Option<SubRegion> {
    let mut counts = BTreeMap::new();
    for id in members {
        if let Some(c) = ds.get(id) {
            *counts.entry(c.sub_region).or_insert(0usize) += 1;
        }
    }
    let max = counts.values().copied().max()?;
    counts.into_iter().find(|(_, n)| *n == max).map(|(r, _)| r)
}

/// Human-readable cluster names derived from the dominant sub-region;
/// repeated regions get a numeric suffix.
pub fn cluster_names(ds: &CountryDataset, a: &ClusterAssignment) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    a.clusters()
        .iter()
        .map(|members| {
            let base = dominant_region(ds, members).map_or("Mixed".to_string(), |r| r.to_string());
            let n = seen.entry(base.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base} {n}")
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Haversine,
    /// Multi-feature dissimilarity over normalized distance, population and
    /// data-centre count.
    Weighted,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "haversine" => Ok(Metric::Haversine),
            "weighted" | "multi" => Ok(Metric::Weighted),
            other => Err(Error::Parameter(format!("unknown metric `{other}`"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Haversine => "haversine",
            Metric::Weighted => "weighted",
        })
    }
}

/// One feature vector per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::Parameter("feature rows and ids differ in length".into()));
        }
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len() || r.iter().any(|v| !v.is_finite())) {
                return Err(Error::Parameter("feature rows must be finite and equal length".into()));
            }
        }
        Ok(FeatureMatrix { ids, rows })
    }

    /// Raw (lat, lon) degrees.
    pub fn geo(ds: &CountryDataset) -> Self {
        let rows = ds.iter().map(|c| vec![c.centroid.lat, c.centroid.lon]).collect();
        FeatureMatrix { ids: ds.ids(), rows }
    }

    /// (lat, lon, population_norm, dc_norm).
    pub fn multi(ds: &CountryDataset) -> Result<Self> {
        let nf = NormalizedFeatures::new(ds, &ds.ids())?;
        let rows = ds
            .iter()
            .enumerate()
            .map(|(i, c)| vec![c.centroid.lat, c.centroid.lon, nf.q(i), nf.c(i)])
            .collect();
        Ok(FeatureMatrix { ids: ds.ids(), rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Symmetric pairwise dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(ids: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = ids.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { ids, data }
    }

    pub fn euclidean(fm: &FeatureMatrix) -> Self {
        Self::from_fn(fm.ids.clone(), |i, j| sq_dist(&fm.rows[i], &fm.rows[j]).sqrt())
    }

    /// Country-centroid distances under a geographic or weighted metric.
    pub fn for_dataset(ds: &CountryDataset, metric: Metric, w: &FeatureWeights) -> Result<Self> {
        let cs = ds.countries();
        Ok(match metric {
            Metric::Euclidean => {
                Self::from_fn(ds.ids(), |i, j| euclidean_deg(cs[i].centroid, cs[j].centroid))
            }
            Metric::Haversine => {
                Self::from_fn(ds.ids(), |i, j| haversine(cs[i].centroid, cs[j].centroid))
            }
            Metric::Weighted => {
                let nf = NormalizedFeatures::new(ds, &ds.ids())?;
                Self::from_fn(ds.ids(), |i, j| nf.dissimilarity(i, j, w))
            }
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.data[i * n..(i + 1) * n]
    }
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} must lie in 1..={n}")));
    }
    Ok(())
}

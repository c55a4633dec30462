//! Flat `key = value` run configuration. Keys mirror the CLI flags; `#`
//! starts a comment; list values are comma separated. Keyed families such as
//! `members.<Label>` or `gateways.<Label>` take the cluster label after the
//! dot.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aco::AcoParams;
use crate::clustering::Metric;
use crate::dataset::AdjacencyMode;
use crate::error::{Error, Result};
use crate::gateways::GatewayConfig;
use crate::metrics::{FeatureWeights, NormScope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Features {
    /// Raw latitude/longitude.
    Geo,
    /// Latitude/longitude plus normalized population and data-centre count.
    Multi,
}

impl FromStr for Features {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "geo" => Ok(Features::Geo),
            "multi" => Ok(Features::Multi),
            other => Err(Error::Parameter(format!("unknown feature set `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Clustering {
    /// No clusters; only the continental traversal is meaningful.
    None,
    Au,
    KMeans { k: usize, features: Features },
    KMedoids { k: usize, metric: Metric },
    Hac { cut: f64, metric: Metric },
    Optics { min_pts: usize, xi: f64, metric: Metric },
    /// Explicit labelled memberships, in declaration order.
    Declared { clusters: Vec<(String, Vec<String>)> },
}

impl Clustering {
    pub fn name(&self) -> &'static str {
        match self {
            Clustering::None => "none",
            Clustering::Au => "au",
            Clustering::KMeans { .. } => "kmeans",
            Clustering::KMedoids { .. } => "kmedoids",
            Clustering::Hac { .. } => "hac",
            Clustering::Optics { .. } => "optics",
            Clustering::Declared { .. } => "declared",
        }
    }
}

/// Optional per-cluster G/U declarations; they replace the derived sets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SetOverride {
    pub gateways: Option<BTreeSet<String>>,
    pub ldts: Option<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    /// Input tables; `None` selects the bundled reference copy.
    pub countries: Option<PathBuf>,
    pub cables: Option<PathBuf>,
    pub borders: Option<PathBuf>,
    pub maritime: Option<PathBuf>,
    pub clustering: Clustering,
    /// Graph for member → gateway routes.
    pub adjacency: AdjacencyMode,
    /// Graph for the all-members traversals.
    pub traverse_adjacency: AdjacencyMode,
    pub norm_scope: NormScope,
    pub inter_norm_scope: NormScope,
    pub gateways: GatewayConfig,
    pub aco: AcoParams,
    pub inter_ants: usize,
    pub inter_iterations: usize,
    pub overrides: BTreeMap<String, SetOverride>,
    pub inter: SetOverride,
    /// Also traverse every country as a single unclustered set.
    pub unclustered: bool,
    pub unclustered_sets: SetOverride,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let inter = AcoParams::inter_cluster();
        RunConfig {
            name: "run".into(),
            countries: None,
            cables: None,
            borders: None,
            maritime: None,
            clustering: Clustering::Au,
            adjacency: AdjacencyMode::Borders,
            traverse_adjacency: AdjacencyMode::Complete,
            norm_scope: NormScope::Cluster,
            inter_norm_scope: NormScope::Global,
            gateways: GatewayConfig::default(),
            aco: AcoParams::default(),
            inter_ants: inter.ants,
            inter_iterations: inter.iterations,
            overrides: BTreeMap::new(),
            inter: SetOverride::default(),
            unclustered: false,
            unclustered_sets: SetOverride::default(),
            seed: 0,
            output: None,
        }
    }
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn id_set(v: &str) -> BTreeSet<String> {
    list(v).into_iter().collect()
}

fn boolean(v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Parameter(format!("expected a boolean, got `{other}`"))),
    }
}

fn num<T: FromStr>(v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parameter(format!("`{v}` is not a valid number")))
}

impl RunConfig {
    /// Parses a config file; relative input paths resolve against its
    /// directory.
    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = RunConfig::parse(&text, &path.display().to_string())?;
        for p in [&mut cfg.countries, &mut cfg.cables, &mut cfg.borders, &mut cfg.maritime, &mut cfg.output]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<RunConfig> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut declared: Vec<(String, Vec<String>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let row = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                source_name: source_name.to_string(),
                row,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if let Some(label) = key.strip_prefix("members.") {
                declared.push((label.to_string(), list(&value)));
            }
            if entries.insert(key.clone(), (row, value)).is_some() {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
        }

        let mut cfg = RunConfig::default();
        let mut weights = [None::<f64>; 3];
        let (mut method, mut k, mut metric, mut features) = (None, None, None, None);
        let (mut cut, mut min_pts, mut xi) = (None, None, None);
        for (key, (row, v)) in &entries {
            let v = v.as_str();
            let res: Result<()> = (|| {
                match key.as_str() {
                    "name" => cfg.name = v.to_string(),
                    "countries" => cfg.countries = Some(v.into()),
                    "cables" => cfg.cables = Some(v.into()),
                    "borders" => cfg.borders = Some(v.into()),
                    "maritime" => cfg.maritime = Some(v.into()),
                    "output" => cfg.output = Some(v.into()),
                    "method" => method = Some(v.to_string()),
                    "k" => k = Some(num::<usize>(v)?),
                    "metric" => metric = Some(v.parse::<Metric>()?),
                    "features" => features = Some(v.parse::<Features>()?),
                    "cut" => cut = Some(num::<f64>(v)?),
                    "min_pts" => min_pts = Some(num::<usize>(v)?),
                    "xi" => xi = Some(num::<f64>(v)?),
                    "adjacency" => cfg.adjacency = v.parse()?,
                    "traverse_adjacency" => cfg.traverse_adjacency = v.parse()?,
                    "norm_scope" => cfg.norm_scope = v.parse()?,
                    "inter_norm_scope" => cfg.inter_norm_scope = v.parse()?,
                    "dc_sign" => cfg.aco.dc_sign = v.parse()?,
                    "alpha" => weights[0] = Some(num(v)?),
                    "beta" => weights[1] = Some(num(v)?),
                    "gamma" => weights[2] = Some(num(v)?),
                    "threshold" => cfg.aco.threshold = num(v)?,
                    "ants" => cfg.aco.ants = num(v)?,
                    "iterations" => cfg.aco.iterations = num(v)?,
                    "initial_pheromone" => cfg.aco.initial_pheromone = num(v)?,
                    "rho" => cfg.aco.rho = num(v)?,
                    "boost_factor" => cfg.aco.boost_factor = num(v)?,
                    "stench_factor" => cfg.aco.stench_factor = num(v)?,
                    "parallel" => cfg.aco.parallel = boolean(v)?,
                    "inter_ants" => cfg.inter_ants = num(v)?,
                    "inter_iterations" => cfg.inter_iterations = num(v)?,
                    "pcg_threshold" => cfg.gateways.pcg_threshold = num(v)?,
                    "desert" => cfg.gateways.desert = id_set(v),
                    "neutral" => cfg.gateways.neutral = id_set(v),
                    "inter_gateways" => cfg.inter.gateways = Some(id_set(v)),
                    "inter_ldts" => cfg.inter.ldts = Some(id_set(v)),
                    "unclustered" => cfg.unclustered = boolean(v)?,
                    "unclustered_gateways" => cfg.unclustered_sets.gateways = Some(id_set(v)),
                    "unclustered_ldts" => cfg.unclustered_sets.ldts = Some(id_set(v)),
                    "seed" => cfg.seed = num(v)?,
                    other => {
                        if let Some(label) = other.strip_prefix("gateways.") {
                            cfg.overrides.entry(label.to_string()).or_default().gateways =
                                Some(id_set(v));
                        } else if let Some(label) = other.strip_prefix("ldts.") {
                            cfg.overrides.entry(label.to_string()).or_default().ldts =
                                Some(id_set(v));
                        } else if !other.starts_with("members.") {
                            return Err(Error::Parameter(format!("unknown key `{other}`")));
                        }
                    }
                }
                Ok(())
            })();
            res.map_err(|e| Error::Parse {
                source_name: source_name.to_string(),
                row: *row,
                message: e.to_string(),
            })?;
        }

        if weights.iter().any(Option::is_some) {
            let d = FeatureWeights::default();
            cfg.aco.weights = FeatureWeights::new(
                weights[0].unwrap_or(d.alpha),
                weights[1].unwrap_or(d.beta),
                weights[2].unwrap_or(d.gamma),
            )?;
        }
        let need_k = || k.ok_or_else(|| Error::Parameter("method needs `k`".into()));
        cfg.clustering = match method.as_deref().unwrap_or(if declared.is_empty() { "au" } else { "declared" }) {
            "none" => Clustering::None,
            "au" => Clustering::Au,
            "kmeans" => Clustering::KMeans {
                k: need_k()?,
                features: features.unwrap_or(Features::Geo),
            },
            "kmedoids" => Clustering::KMedoids {
                k: need_k()?,
                metric: metric.unwrap_or(Metric::Haversine),
            },
            "hac" => Clustering::Hac {
                cut: cut.ok_or_else(|| Error::Parameter("hac needs `cut`".into()))?,
                metric: metric.unwrap_or(Metric::Euclidean),
            },
            "optics" => Clustering::Optics {
                min_pts: min_pts.unwrap_or(3),
                xi: xi.unwrap_or(0.05),
                metric: metric.unwrap_or(Metric::Weighted),
            },
            "declared" => {
                if declared.is_empty() {
                    return Err(Error::Parameter("declared clustering needs `members.<label>` keys".into()));
                }
                Clustering::Declared { clusters: declared }
            }
            other => return Err(Error::Parameter(format!("unknown clustering method `{other}`"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Routing parameters for the inter-cluster traversal.
    pub fn inter_params(&self) -> AcoParams {
        AcoParams {
            ants: self.inter_ants,
            iterations: self.inter_iterations,
            ..self.aco
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.aco.validate()?;
        self.inter_params().validate()?;
        if let Clustering::Optics { xi, .. } = self.clustering {
            if !(xi > 0.0 && xi < 1.0) {
                return Err(Error::Parameter(format!("xi {xi} outside (0, 1)")));
            }
        }
        if self.clustering == Clustering::None && !self.unclustered {
            return Err(Error::Parameter(
                "method `none` requires `unclustered = true`".into(),
            ));
        }
        Ok(())
    }

    /// Renders the config back into the flat text format.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push(format!("{k} = {v}"));
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
        put("name", self.name.clone());
        for (k, p) in [
            ("countries", &self.countries),
            ("cables", &self.cables),
            ("borders", &self.borders),
            ("maritime", &self.maritime),
            ("output", &self.output),
        ] {
            if let Some(p) = p {
                put(k, p.display().to_string());
            }
        }
        put("method", self.clustering.name().into());
        match &self.clustering {
            Clustering::KMeans { k, features } => {
                put("k", k.to_string());
                put("features", format!("{features:?}").to_lowercase());
            }
            Clustering::KMedoids { k, metric } => {
                put("k", k.to_string());
                put("metric", metric.to_string());
            }
            Clustering::Hac { cut, metric } => {
                put("cut", cut.to_string());
                put("metric", metric.to_string());
            }
            Clustering::Optics { min_pts, xi, metric } => {
                put("min_pts", min_pts.to_string());
                put("xi", xi.to_string());
                put("metric", metric.to_string());
            }
            Clustering::Declared { clusters } => {
                for (label, m) in clusters {
                    put(&format!("members.{label}"), m.join(", "));
                }
            }
            Clustering::None | Clustering::Au => {}
        }
        put("adjacency", self.adjacency.to_string());
        put("traverse_adjacency", self.traverse_adjacency.to_string());
        put("norm_scope", self.norm_scope.to_string());
        put("inter_norm_scope", self.inter_norm_scope.to_string());
        put("dc_sign", self.aco.dc_sign.to_string());
        put("alpha", self.aco.weights.alpha.to_string());
        put("beta", self.aco.weights.beta.to_string());
        put("gamma", self.aco.weights.gamma.to_string());
        put("threshold", self.aco.threshold.to_string());
        put("ants", self.aco.ants.to_string());
        put("iterations", self.aco.iterations.to_string());
        put("initial_pheromone", self.aco.initial_pheromone.to_string());
        put("rho", self.aco.rho.to_string());
        put("boost_factor", self.aco.boost_factor.to_string());
        put("stench_factor", self.aco.stench_factor.to_string());
        put("parallel", self.aco.parallel.to_string());
        put("inter_ants", self.inter_ants.to_string());
        put("inter_iterations", self.inter_iterations.to_string());
        put("pcg_threshold", self.gateways.pcg_threshold.to_string());
        put("desert", join(&self.gateways.desert));
        put("neutral", join(&self.gateways.neutral));
        for (label, o) in &self.overrides {
            if let Some(g) = &o.gateways {
                put(&format!("gateways.{label}"), join(g));
            }
            if let Some(u) = &o.ldts {
                put(&format!("ldts.{label}"), join(u));
            }
        }
        if let Some(g) = &self.inter.gateways {
            put("inter_gateways", join(g));
        }
        if let Some(u) = &self.inter.ldts {
            put("inter_ldts", join(u));
        }
        put("unclustered", self.unclustered.to_string());
        if let Some(g) = &self.unclustered_sets.gateways {
            put("unclustered_gateways", join(g));
        }
        if let Some(u) = &self.unclustered_sets.ldts {
            put("unclustered_ldts", join(u));
        }
        put("seed", self.seed.to_string());
        out.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_simple_keys() {
        let cfg = RunConfig::parse("# comment\nseed = 7\nants = 10  # trailing\n", "t").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.aco.ants, 10);
        assert_eq!(cfg.clustering, Clustering::Au);
        assert_eq!(cfg.traverse_adjacency, AdjacencyMode::Complete);
        assert_eq!(cfg.inter_params().iterations, 50);
    }

    #[test]
    fn declared_layout_and_overrides() {
        let text = "members.West = ghana, togo\nmembers.East = kenya\n\
                    gateways.West = ghana\nldts.West = togo\ninter_gateways = ghana, kenya\n";
        let cfg = RunConfig::parse(text, "t").unwrap();
        match &cfg.clustering {
            Clustering::Declared { clusters } => {
                assert_eq!(clusters[0].0, "West");
                assert_eq!(clusters[0].1, vec!["ghana", "togo"]);
                assert_eq!(clusters[1].0, "East");
            }
            other => panic!("{other:?}"),
        }
        let o = &cfg.overrides["West"];
        assert!(o.gateways.as_ref().unwrap().contains("ghana"));
        assert!(o.ldts.as_ref().unwrap().contains("togo"));
        assert_eq!(cfg.inter.gateways.as_ref().unwrap().len(), 2);
    }

    #[test]
    fn errors_carry_rows() {
        match RunConfig::parse("seed = 1\nbogus = 2\n", "cfg") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        match RunConfig::parse("seed = 1\nants = many\n", "cfg") {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::parse("no equals sign\n", "cfg"), Err(Error::Parse { row: 1, .. })));
        assert!(RunConfig::parse("seed = 1\nseed = 2\n", "cfg").is_err());
        assert!(RunConfig::parse("method = kmeans\n", "cfg").is_err());
        assert!(RunConfig::parse("method = none\n", "cfg").is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "name = x\nmethod = kmedoids\nk = 6\nmetric = haversine\nalpha = 0.5\nbeta = 0.25\n\
                    gamma = 0.25\ngateways.Western = ghana\nunclustered = true\nseed = 9\n";
        let cfg = RunConfig::parse(text, "t").unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_text(), "t").unwrap(), cfg);
    }
}

//! Distances, min-max normalization and the weighted hop cost.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{CountryDataset, GeoPoint};
use crate::error::{Error, Result};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in kilometres.
pub fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Plain Euclidean distance on (lat, lon) degrees.
pub fn euclidean_deg(a: GeoPoint, b: GeoPoint) -> f64 {
    (a.lat - b.lat).hypot(a.lon - b.lon)
}

/// Closed range used by a min-max mapping. `min == max` maps everything to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: f64,
    pub max: f64,
}

impl Bounds {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Bounds> {
        values.into_iter().fold(None, |acc, v| match acc {
            None => Some(Bounds { min: v, max: v }),
            Some(b) => Some(Bounds {
                min: b.min.min(v),
                max: b.max.max(v),
            }),
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            0.0
        } else {
            ((x - self.min) / span).clamp(0.0, 1.0)
        }
    }
}

pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    match Bounds::of(values.iter().copied()) {
        Some(b) => values.iter().map(|&v| b.apply(v)).collect(),
        None => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FeatureWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let ok = [alpha, beta, gamma].iter().all(|w| w.is_finite() && *w >= 0.0);
        if !ok || (alpha + beta + gamma - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "weights must be non-negative and sum to 1, got ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(FeatureWeights { alpha, beta, gamma })
    }

    pub const DISTANCE_ONLY: FeatureWeights = FeatureWeights {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
    };
}

impl Default for FeatureWeights {
    /// Equal influence of distance, population and data centres.
    fn default() -> Self {
        FeatureWeights {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        }
    }
}

/// How the data-centre term enters the hop cost: `Plus` adds C_d as written,
/// `Minus` adds (1 − C_d) so data-centre-rich destinations become cheaper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DcSign {
    #[default]
    Plus,
    Minus,
}

impl FromStr for DcSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(DcSign::Plus),
            "-1" | "-" | "minus" => Ok(DcSign::Minus),
            other => Err(Error::Parameter(format!("dc-sign must be +1 or -1, got `{other}`"))),
        }
    }
}

impl fmt::Display for DcSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DcSign::Plus => "+1",
            DcSign::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormScope {
    #[default]
    Cluster,
    Global,
}

impl FromStr for NormScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cluster" => Ok(NormScope::Cluster),
            "global" => Ok(NormScope::Global),
            other => Err(Error::Parameter(format!(
                "norm-scope must be `cluster` or `global`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for NormScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormScope::Cluster => "cluster",
            NormScope::Global => "global",
        })
    }
}

/// Min-max bounds for the three cost features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    pub population: Bounds,
    pub dc_count: Bounds,
    /// Over distinct pairs, in km.
    pub distance: Bounds,
}

impl FeatureBounds {
    /// Bounds over the countries named in `ids`.
    pub fn over(ds: &CountryDataset, ids: &[String]) -> Result<FeatureBounds> {
        if ids.is_empty() {
            return Err(Error::Validation("cannot normalize an empty node set".into()));
        }
        let countries = ids.iter().map(|id| ds.require(id)).collect::<Result<Vec<_>>>()?;
        let population = Bounds::of(countries.iter().map(|c| c.population as f64)).unwrap();
        let dc_count = Bounds::of(countries.iter().map(|c| c.dc_count as f64)).unwrap();
        let mut pairs = Vec::new();
        for (i, a) in countries.iter().enumerate() {
            for b in &countries[i + 1..] {
                pairs.push(haversine(a.centroid, b.centroid));
            }
        }
        let distance = Bounds::of(pairs).unwrap_or(Bounds { min: 0.0, max: 0.0 });
        Ok(FeatureBounds {
            population,
            dc_count,
            distance,
        })
    }

    pub fn global(ds: &CountryDataset) -> Result<FeatureBounds> {
        FeatureBounds::over(ds, &ds.ids())
    }
}

/// Normalized population Q, data-centre count C and pairwise haversine H for
/// an active node set.
#[derive(Debug, Clone)]
pub struct NormalizedFeatures {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    q: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
    raw_km: Vec<f64>,
    bounds: FeatureBounds,
}

impl NormalizedFeatures {
    /// Normalizes `ids` against their own bounds.
    pub fn new(ds: &CountryDataset, ids: &[String]) -> Result<Self> {
        let bounds = FeatureBounds::over(ds, ids)?;
        Self::with_bounds(ds, ids, bounds)
    }

    /// Normalizes `ids` against externally supplied bounds (e.g. global ones).
    pub fn with_bounds(ds: &CountryDataset, ids: &[String], bounds: FeatureBounds) -> Result<Self> {
        let n = ids.len();
        let countries = ids.iter().map(|id| ds.require(id)).collect::<Result<Vec<_>>>()?;
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Validation(format!("duplicate node `{id}`")));
            }
        }
        let q = countries.iter().map(|c| bounds.population.apply(c.population as f64)).collect();
        let c = countries.iter().map(|c| bounds.dc_count.apply(c.dc_count as f64)).collect();
        let mut raw_km = vec![0.0; n * n];
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let km = haversine(countries[i].centroid, countries[j].centroid);
                let hn = bounds.distance.apply(km);
                raw_km[i * n + j] = km;
                raw_km[j * n + i] = km;
                h[i * n + j] = hn;
                h[j * n + i] = hn;
            }
        }
        Ok(NormalizedFeatures {
            ids: ids.to_vec(),
            index,
            q,
            c,
            h,
            raw_km,
            bounds,
        })
    }

    pub fn for_scope(
        ds: &CountryDataset,
        ids: &[String],
        scope: NormScope,
    ) -> Result<NormalizedFeatures> {
        match scope {
            NormScope::Cluster => Self::new(ds, ids),
            NormScope::Global => Self::with_bounds(ds, ids, FeatureBounds::global(ds)?),
        }
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

    pub fn bounds(&self) -> &FeatureBounds {
        &self.bounds
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q[i]
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.ids.len() + j]
    }

    pub fn km(&self, i: usize, j: usize) -> f64 {
        self.raw_km[i * self.ids.len() + j]
    }

    /// Hop cost into `j` from `i`, by index.
    pub fn cost(&self, i: usize, j: usize, w: &FeatureWeights, sign: DcSign) -> f64 {
        let c = match sign {
            DcSign::Plus => self.c[j],
            DcSign::Minus => 1.0 - self.c[j],
        };
        w.alpha * self.h(i, j) + w.beta * self.q[j] + w.gamma * c
    }

    /// Dense `n × n` hop-cost matrix (diagonal zero).
    pub fn cost_matrix(&self, w: &FeatureWeights, sign: DcSign) -> Vec<Vec<f64>> {
        let n = self.ids.len();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { self.cost(i, j, w, sign) }).collect())
            .collect()
    }

    /// Symmetric dissimilarity used for multi-feature clustering.
    pub fn dissimilarity(&self, i: usize, j: usize, w: &FeatureWeights) -> f64 {
        w.alpha * self.h(i, j)
            + w.beta * (self.q[i] - self.q[j]).abs()
            + w.gamma * (self.c[i] - self.c[j]).abs()
    }
}

/// Hop cost Δ_sd from `s` to `d`; depends on the destination's Q and C, so it
/// is not symmetric.
pub fn weighted_distance(
    s: &str,
    d: &str,
    w: &FeatureWeights,
    nf: &NormalizedFeatures,
    sign: DcSign,
) -> Result<f64> {
    if s == d {
        return Err(Error::Parameter(format!("source and destination are both `{s}`")));
    }
    let (i, j) = (nf.index_of(s)?, nf.index_of(d)?);
    Ok(nf.cost(i, j, w, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    /// Spherical law of cosines, an independent formulation.
    fn cosine_law_km(a: GeoPoint, b: GeoPoint) -> f64 {
        let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
        let dl = (b.lon - a.lon).to_radians();
        let cos = p1.sin() * p2.sin() + p1.cos() * p2.cos() * dl.cos();
        EARTH_RADIUS_KM * cos.clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn haversine_basics() {
        assert_eq!(haversine(p(10.0, 20.0), p(10.0, 20.0)), 0.0);
        let anti = haversine(p(0.0, 0.0), p(0.0, 180.0));
        assert_abs_diff_eq!(anti, std::f64::consts::PI * EARTH_RADIUS_KM, epsilon = 1e-6);
        assert_abs_diff_eq!(anti, 20015.1, epsilon = 0.1);
    }

    #[test]
    fn haversine_morocco_algeria_matches_cosine_law() {
        let ds = CountryDataset::reference();
        let ma = ds.get("morocco").unwrap().centroid;
        let dz = ds.get("algeria").unwrap().centroid;
        assert_abs_diff_eq!(haversine(ma, dz), cosine_law_km(ma, dz), epsilon = 0.1);
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_deg(p(0.0, 0.0), p(3.0, 4.0)), 5.0);
        assert_eq!(euclidean_deg(p(1.5, -2.0), p(1.5, -2.0)), 0.0);
        let (a, b) = (p(-12.25, 33.5), p(40.0, -7.125));
        let oracle = ((a.lat - b.lat).powi(2) + (a.lon - b.lon).powi(2)).sqrt();
        assert_abs_diff_eq!(euclidean_deg(a, b), oracle, epsilon = 1e-12);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(min_max_normalize(&[2.0, 4.0, 6.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(min_max_normalize(&[7.0, 7.0, 7.0]), vec![0.0, 0.0, 0.0]);
        assert!(min_max_normalize(&[]).is_empty());
    }

    #[test]
    fn population_extremes() {
        let ds = CountryDataset::reference();
        let nf = NormalizedFeatures::new(&ds, &ds.ids()).unwrap();
        assert_eq!(nf.q(nf.index_of("nigeria").unwrap()), 1.0);
        assert_eq!(nf.q(nf.index_of("seychelles").unwrap()), 0.0);
    }

    #[test]
    fn weight_projections() {
        let ds = CountryDataset::reference();
        let nf = NormalizedFeatures::new(&ds, &ds.ids()).unwrap();
        let w = FeatureWeights::DISTANCE_ONLY;
        let (i, j) = (nf.index_of("ghana").unwrap(), nf.index_of("togo").unwrap());
        assert_eq!(weighted_distance("ghana", "togo", &w, &nf, DcSign::Plus).unwrap(), nf.h(i, j));
        let pop = FeatureWeights::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(weighted_distance("benin", "nigeria", &pop, &nf, DcSign::Plus).unwrap(), 1.0);
    }

    #[test]
    fn tunisia_cheaper_than_morocco_into_algeria() {
        let ds = CountryDataset::reference();
        let northern: Vec<String> = ds
            .iter()
            .filter(|c| c.sub_region == crate::dataset::SubRegion::Northern)
            .map(|c| c.id.clone())
            .collect();
        let nf = NormalizedFeatures::new(&ds, &northern).unwrap();
        let w = FeatureWeights::new(0.33, 0.33, 0.34).unwrap();
        let tn = weighted_distance("tunisia", "algeria", &w, &nf, DcSign::Plus).unwrap();
        let ma = weighted_distance("morocco", "algeria", &w, &nf, DcSign::Plus).unwrap();
        assert!(tn < ma, "{tn} !< {ma}");
    }

    #[test]
    fn weights_validation_and_errors() {
        assert!(FeatureWeights::new(0.5, 0.5, 0.1).is_err());
        assert!(FeatureWeights::new(-0.1, 0.6, 0.5).is_err());
        let ds = CountryDataset::reference();
        let nf = NormalizedFeatures::new(&ds, &ds.ids()).unwrap();
        let w = FeatureWeights::default();
        assert!(matches!(
            weighted_distance("ghana", "atlantis", &w, &nf, DcSign::Plus),
            Err(Error::UnknownId(_))
        ));
        assert!(weighted_distance("ghana", "ghana", &w, &nf, DcSign::Plus).is_err());
    }

    #[test]
    fn dc_sign_flips_preference() {
        let ds = CountryDataset::reference();
        let nf = NormalizedFeatures::new(&ds, &ds.ids()).unwrap();
        let w = FeatureWeights::new(0.0, 0.0, 1.0).unwrap();
        let sa = nf.index_of("south_africa").unwrap();
        let er = nf.index_of("eritrea").unwrap();
        assert!(nf.cost(er, sa, &w, DcSign::Plus) > nf.cost(sa, er, &w, DcSign::Plus));
        assert!(nf.cost(er, sa, &w, DcSign::Minus) < nf.cost(sa, er, &w, DcSign::Minus));
    }
}

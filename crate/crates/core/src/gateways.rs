//! Gateway selection: Prime Continental Gateways (PCGs) from cable landings,
//! per-cluster gateways with a fallback for PCG-less clusters, and the
//! less-desirable-trail (LDT) sets that the router discourages.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::CountryDataset;
use crate::error::{Error, Result};

pub const DEFAULT_PCG_THRESHOLD: u32 = 5;

fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatewayConfig {
    pub pcg_threshold: u32,
    /// Countries inside the Sahara; candidates for LDTs.
    pub desert: BTreeSet<String>,
    /// Excluded from both G and U, so their hops use the base evaporation.
    pub neutral: BTreeSet<String>,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        GatewayConfig {
            pcg_threshold: DEFAULT_PCG_THRESHOLD,
            desert: set(&[
                "chad",
                "mali",
                "mauritania",
                "niger",
                "sudan",
                "tunisia",
                "western_sahara",
            ]),
            neutral: set(&["algeria", "egypt", "libya"]),
        }
    }
}

/// Encouraged (G) and discouraged (U) destinations for one routing run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRoutingSpec {
    pub label: String,
    pub members: Vec<String>,
    pub gateways: BTreeSet<String>,
    pub ldts: BTreeSet<String>,
}

impl ClusterRoutingSpec {
    pub fn new(
        label: impl Into<String>,
        members: Vec<String>,
        gateways: BTreeSet<String>,
        ldts: BTreeSet<String>,
    ) -> Result<Self> {
        let label = label.into();
        if gateways.is_empty() {
            return Err(Error::Validation(format!("cluster `{label}` has no gateway")));
        }
        if let Some(g) = gateways.iter().find(|g| !members.contains(g)) {
            return Err(Error::Validation(format!("gateway `{g}` is not a member of `{label}`")));
        }
        if let Some(u) = ldts.iter().find(|u| !members.contains(u)) {
            return Err(Error::Validation(format!("LDT `{u}` is not a member of `{label}`")));
        }
        if let Some(x) = gateways.intersection(&ldts).next() {
            return Err(Error::Validation(format!("`{x}` is both gateway and LDT in `{label}`")));
        }
        Ok(ClusterRoutingSpec {
            label,
            members,
            gateways,
            ldts,
        })
    }

    pub fn is_gateway(&self, id: &str) -> bool {
        self.gateways.contains(id)
    }

    pub fn is_ldt(&self, id: &str) -> bool {
        self.ldts.contains(id)
    }
}

/// Countries with at least `threshold` landings.
pub fn select_pcgs(landings: &BTreeMap<String, u32>, threshold: u32) -> BTreeSet<String> {
    landings
        .iter()
        .filter(|(_, &n)| n >= threshold)
        .map(|(id, _)| id.clone())
        .collect()
}

/// Non-neutral PCG members of the cluster; if there are none, the single
/// best member ranked by (has a landing, data centres, landings, lowest id).
pub fn cluster_gateways(
    members: &[String],
    pcgs: &BTreeSet<String>,
    ds: &CountryDataset,
    neutral: &BTreeSet<String>,
) -> Result<BTreeSet<String>> {
    if members.is_empty() {
        return Err(Error::Validation("cannot pick a gateway for an empty cluster".into()));
    }
    let direct: BTreeSet<String> = members
        .iter()
        .filter(|m| pcgs.contains(*m) && !neutral.contains(*m))
        .cloned()
        .collect();
    if !direct.is_empty() {
        return Ok(direct);
    }
    let mut candidates: Vec<&String> = members.iter().filter(|m| !neutral.contains(*m)).collect();
    if candidates.is_empty() {
        candidates = members.iter().collect();
    }
    let mut best: Option<((bool, u32, u32), &String)> = None;
    for id in candidates {
        let c = ds.require(id)?;
        let key = (c.landings > 0, c.dc_count, c.landings);
        let better = match &best {
            None => true,
            Some((bk, bid)) => key > *bk || (key == *bk && id < *bid),
        };
        if better {
            best = Some((key, id));
        }
    }
    Ok(BTreeSet::from([best.unwrap().1.clone()]))
}

/// Desert members that are neither gateways nor neutral.
pub fn cluster_ldts(
    members: &[String],
    gateways: &BTreeSet<String>,
    config: &GatewayConfig,
) -> BTreeSet<String> {
    members
        .iter()
        .filter(|m| config.desert.contains(*m))
        .filter(|m| !gateways.contains(*m) && !config.neutral.contains(*m))
        .cloned()
        .collect()
}

/// Derives G and U for a cluster from landing data and the gateway config.
pub fn derive_spec(
    label: impl Into<String>,
    members: Vec<String>,
    ds: &CountryDataset,
    config: &GatewayConfig,
) -> Result<ClusterRoutingSpec> {
    let pcgs = select_pcgs(&ds.landings(), config.pcg_threshold);
    let gateways = cluster_gateways(&members, &pcgs, ds, &config.neutral)?;
    let ldts = cluster_ldts(&members, &gateways, config);
    ClusterRoutingSpec::new(label, members, gateways, ldts)
}

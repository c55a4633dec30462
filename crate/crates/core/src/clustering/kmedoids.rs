use super::{check_k, ClusterAssignment, DistanceMatrix, Metric};
use crate::dataset::CountryDataset;
use crate::error::Result;
use crate::metrics::FeatureWeights;

#[derive(Debug, Clone)]
pub struct PamFit {
    pub assignment: ClusterAssignment,
    pub medoids: Vec<String>,
    /// Sum of distances from every point to its medoid.
    pub cost: f64,
    /// Cost after BUILD and after each accepted swap.
    pub history: Vec<f64>,
}

/// K-Medoids over the reference centroids with the given metric.
pub fn kmedoids(
    ds: &CountryDataset,
    k: usize,
    metric: Metric,
    weights: &FeatureWeights,
) -> Result<PamFit> {
    let dm = DistanceMatrix::for_dataset(ds, metric, weights)?;
    let mut fit = pam(&dm, k)?;
    fit.assignment.method = "kmedoids".into();
    fit.assignment.params.insert("metric".into(), metric.to_string());
    Ok(fit)
}

/// Partitioning Around Medoids: greedy BUILD, then best-improvement SWAP
/// until no swap lowers the total cost. Fully deterministic; ties go to the
/// lexicographically smaller id.
pub fn pam(dm: &DistanceMatrix, k: usize) -> Result<PamFit> {
    let n = dm.len();
    check_k(k, n)?;
    let ids = dm.ids();
    let id_less = |a: usize, b: usize| ids[a] < ids[b];

    let mut first = 0;
    let mut first_sum = f64::INFINITY;
    for i in 0..n {
        let s: f64 = dm.row(i).iter().sum();
        if s < first_sum || (s == first_sum && id_less(i, first)) {
            first = i;
            first_sum = s;
        }
    }
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = dm.row(first).to_vec();
    while medoids.len() < k {
        let mut pick = None;
        let mut pick_gain = f64::NEG_INFINITY;
        for i in (0..n).filter(|i| !medoids.contains(i)) {
            let gain: f64 = (0..n).map(|j| (nearest[j] - dm.get(i, j)).max(0.0)).sum();
            let better = match pick {
                None => true,
                Some(p) => gain > pick_gain || (gain == pick_gain && id_less(i, p)),
            };
            if better {
                pick = Some(i);
                pick_gain = gain;
            }
        }
        let i = pick.expect("k <= n leaves a candidate");
        medoids.push(i);
        for (j, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dm.get(i, j));
        }
    }

    let total = |m: &[usize]| -> f64 {
        (0..n).map(|j| m.iter().map(|&c| dm.get(c, j)).fold(f64::INFINITY, f64::min)).sum()
    };
    let mut cost = total(&medoids);
    let mut history = vec![cost];
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for slot in 0..k {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let mut trial = medoids.clone();
                trial[slot] = h;
                let c = total(&trial);
                if c < best.map_or(cost, |b| b.2) - 1e-12 {
                    best = Some((slot, h, c));
                }
            }
        }
        match best {
            Some((slot, h, c)) => {
                medoids[slot] = h;
                cost = c;
                history.push(c);
            }
            None => break,
        }
    }

    let raw: Vec<Option<usize>> = (0..n)
        .map(|j| {
            let mut best = 0;
            for s in 1..k {
                let (d, bd) = (dm.get(medoids[s], j), dm.get(medoids[best], j));
                if d < bd || (d == bd && id_less(medoids[s], medoids[best])) {
                    best = s;
                }
            }
            Some(best)
        })
        .collect();
    let assignment = ClusterAssignment::new(ids.to_vec(), &raw, "pam").with_param("k", k);
    Ok(PamFit {
        assignment,
        medoids: medoids.iter().map(|&m| ids[m].clone()).collect(),
        cost,
        history,
    })
}

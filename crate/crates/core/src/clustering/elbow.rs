use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{kmeans_with, sq_dist, FeatureMatrix, KMeansOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ElbowReport {
    pub scores: BTreeMap<usize, f64>,
    pub chosen_k: usize,
}

impl ElbowReport {
    /// `k,score,chosen` rows with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,score,chosen\n");
        for (k, s) in &self.scores {
            out.push_str(&format!("{k},{s},{}\n", *k == self.chosen_k));
        }
        out
    }
}

fn check_range(ks: &[usize], n: usize) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::Parameter("empty k range".into()));
    }
    if let Some(&bad) = ks.iter().find(|&&k| k < 2 || k + 1 > n) {
        return Err(Error::Parameter(format!("k = {bad} outside [2, {}]", n.saturating_sub(1))));
    }
    Ok(())
}

fn scan<F>(fm: &FeatureMatrix, ks: &[usize], seed: u64, score: F) -> Result<BTreeMap<usize, f64>>
where
    F: Fn(&FeatureMatrix, &[usize], &[Vec<f64>], f64) -> f64 + Sync,
{
    check_range(ks, fm.len())?;
    ks.par_iter()
        .map(|&k| {
            let opts = KMeansOptions {
                seed,
                ..KMeansOptions::default()
            };
            let fit = kmeans_with(fm, k, &opts)?;
            Ok((k, score(fm, &fit.raw_labels, &fit.centroids, fit.distortion)))
        })
        .collect()
}

/// Knee of a decreasing distortion curve: the interior k where the drop into
/// k is largest relative to the drop out of it.
pub fn knee_distortion(scores: &BTreeMap<usize, f64>) -> usize {
    let pts: Vec<(usize, f64)> = scores.iter().map(|(k, v)| (*k, *v)).collect();
    if pts.len() < 3 {
        return pts[0].0;
    }
    let mut best = (pts[1].0, f64::NEG_INFINITY);
    for w in pts.windows(3) {
        let before = w[0].1 - w[1].1;
        let after = (w[1].1 - w[2].1).max(f64::MIN_POSITIVE);
        let r = before / after;
        if r > best.1 {
            best = (w[1].0, r);
        }
    }
    best.0
}

/// Knee of a Calinski-Harabasz curve: the most prominent interior local
/// peak, measured by the discrete second difference.
pub fn knee_calinski(scores: &BTreeMap<usize, f64>) -> usize {
    let pts: Vec<(usize, f64)> = scores.iter().map(|(k, v)| (*k, *v)).collect();
    if pts.len() < 3 {
        return pts[0].0;
    }
    let mut best = (pts[1].0, f64::NEG_INFINITY);
    for w in pts.windows(3) {
        let p = 2.0 * w[1].1 - w[0].1 - w[2].1;
        if p > best.1 {
            best = (w[1].0, p);
        }
    }
    best.0
}

pub fn elbow_distortion(fm: &FeatureMatrix, ks: &[usize], seed: u64) -> Result<ElbowReport> {
    let scores = scan(fm, ks, seed, |_, _, _, distortion| distortion)?;
    Ok(ElbowReport {
        chosen_k: knee_distortion(&scores),
        scores,
    })
}

pub fn calinski_harabasz(fm: &FeatureMatrix, labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    let n = fm.len();
    let k = centroids.len();
    let dim = fm.rows[0].len();
    let mut mean = vec![0.0; dim];
    for r in &fm.rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v / n as f64;
        }
    }
    let mut counts = vec![0usize; k];
    let mut within = 0.0;
    for (r, &l) in fm.rows.iter().zip(labels) {
        counts[l] += 1;
        within += sq_dist(r, &centroids[l]);
    }
    let between: f64 =
        (0..k).map(|c| counts[c] as f64 * sq_dist(&centroids[c], &mean)).sum();
    if within == 0.0 {
        return 1.0;
    }
    (between / (k as f64 - 1.0)) / (within / (n as f64 - k as f64))
}

pub fn elbow_calinski(fm: &FeatureMatrix, ks: &[usize], seed: u64) -> Result<ElbowReport> {
    let scores = scan(fm, ks, seed, |fm, labels, centroids, _| {
        calinski_harabasz(fm, labels, centroids)
    })?;
    Ok(ElbowReport {
        chosen_k: knee_calinski(&scores),
        scores,
    })
}

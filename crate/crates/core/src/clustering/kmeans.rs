use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_k, sq_dist, ClusterAssignment, FeatureMatrix};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub seed: u64,
    pub max_iter: usize,
    /// Independent k-means++ restarts; the lowest distortion wins.
    pub restarts: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            seed: 0,
            max_iter: 300,
            restarts: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub assignment: ClusterAssignment,
    pub centroids: Vec<Vec<f64>>,
    /// Mean squared distance of each point to its centroid.
    pub distortion: f64,
    /// Distortion after each Lloyd step of the winning restart.
    pub history: Vec<f64>,
    /// Raw cluster index per point (not canonicalized).
    pub raw_labels: Vec<usize>,
}

pub fn kmeans(fm: &FeatureMatrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansFit> {
    kmeans_with(
        fm,
        k,
        &KMeansOptions {
            seed,
            max_iter,
            ..KMeansOptions::default()
        },
    )
}

pub fn kmeans_with(fm: &FeatureMatrix, k: usize, opts: &KMeansOptions) -> Result<KMeansFit> {
    check_k(k, fm.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<Vec<f64>>, Vec<usize>, Vec<f64>)> = None;
    for _ in 0..opts.restarts.max(1) {
        let init = plus_plus(&fm.rows, k, &mut rng);
        let run = lloyd(&fm.rows, init, opts.max_iter);
        let better = match &best {
            None => true,
            Some(b) => run.2.last() < b.2.last(),
        };
        if better {
            best = Some(run);
        }
    }
    let (centroids, raw_labels, history) = best.expect("at least one restart");
    let raw: Vec<Option<usize>> = raw_labels.iter().map(|&l| Some(l)).collect();
    let assignment = ClusterAssignment::new(fm.ids.clone(), &raw, "kmeans")
        .with_param("k", k)
        .with_param("seed", opts.seed)
        .with_param("restarts", opts.restarts);
    Ok(KMeansFit {
        assignment,
        centroids,
        distortion: *history.last().unwrap(),
        history,
        raw_labels,
    })
}

/// Greedy k-means++: each new centre is the best of `2 + ln k` candidates
/// sampled proportionally to squared distance.
fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let trials = 2 + (k as f64).ln() as usize;
    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for _ in 0..trials {
            let pick = if total <= 0.0 {
                rng.gen_range(0..n)
            } else {
                let mut r = rng.gen::<f64>() * total;
                let mut chosen = n - 1;
                for (i, &w) in d2.iter().enumerate() {
                    if r < w {
                        chosen = i;
                        break;
                    }
                    r -= w;
                }
                chosen
            };
            let next: Vec<f64> =
                points.iter().zip(&d2).map(|(p, &d)| d.min(sq_dist(p, &points[pick]))).collect();
            let potential: f64 = next.iter().sum();
            if best.as_ref().is_none_or(|b| potential < b.0) {
                best = Some((potential, pick, next));
            }
        }
        let (_, pick, next) = best.expect("at least one trial");
        centers.push(points[pick].clone());
        d2 = next;
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centre) in centers.iter().enumerate() {
        let d = sq_dist(p, centre);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(
    points: &[Vec<f64>],
    mut centers: Vec<Vec<f64>>,
    max_iter: usize,
) -> (Vec<Vec<f64>>, Vec<usize>, Vec<f64>) {
    let n = points.len() as f64;
    let dim = points[0].len();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    let mut history = Vec::new();
    for _ in 0..max_iter.max(1) {
        let k = centers.len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        let distortion: f64 =
            points.iter().zip(&next).map(|(p, &l)| sq_dist(p, &centers[l])).sum::<f64>() / n;
        history.push(distortion);
        if next == labels {
            break;
        }
        labels = next;
    }
    refine(points, &mut centers, &mut labels, &mut history);
    (centers, labels, history)
}

/// Hartigan-style single-point transfers after Lloyd has converged: move a
/// point to another cluster whenever that strictly lowers the total squared
/// error (accounting for both centroids shifting). Lloyd fixpoints are often
/// not local optima under such moves on small, irregular data.
fn refine(
    points: &[Vec<f64>],
    centers: &mut [Vec<f64>],
    labels: &mut [usize],
    history: &mut Vec<f64>,
) {
    let n = points.len();
    let k = centers.len();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    loop {
        let mut moved = false;
        for i in 0..n {
            let a = labels[i];
            if counts[a] <= 1 {
                continue;
            }
            let na = counts[a] as f64;
            let remove_gain = na / (na - 1.0) * sq_dist(&points[i], &centers[a]);
            let mut best: Option<(usize, f64)> = None;
            for b in (0..k).filter(|&b| b != a) {
                let nb = counts[b] as f64;
                let add_cost = nb / (nb + 1.0) * sq_dist(&points[i], &centers[b]);
                if add_cost < remove_gain - 1e-12 && best.is_none_or(|(_, c)| add_cost < c) {
                    best = Some((b, add_cost));
                }
            }
            if let Some((b, _)) = best {
                let (na, nb) = (counts[a] as f64, counts[b] as f64);
                for d in 0..points[i].len() {
                    let x = points[i][d];
                    centers[a][d] = (centers[a][d] * na - x) / (na - 1.0);
                    centers[b][d] = (centers[b][d] * nb + x) / (nb + 1.0);
                }
                counts[a] -= 1;
                counts[b] += 1;
                labels[i] = b;
                moved = true;
            }
        }
        if !moved {
            break;
        }
        let distortion: f64 = points
            .iter()
            .zip(labels.iter())
            .map(|(p, &l)| sq_dist(p, &centers[l]))
            .sum::<f64>()
            / n as f64;
        history.push(distortion);
    }
}

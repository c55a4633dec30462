//! OPTICS ordering with Xi-steep-area cluster extraction.
//!
//! The ordering and the Xi extraction follow the reference formulation used
//! by scikit-learn (including predecessor correction and the trailing
//! infinity on the reachability plot), so results can be cross-checked
//! against it point for point.

use super::{ClusterAssignment, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct OpticsGraph {
    /// Point indices in processing order.
    pub ordering: Vec<usize>,
    /// Indexed by point.
    pub reachability: Vec<f64>,
    pub core_distance: Vec<f64>,
    /// `None` for points reached first in their component.
    pub predecessor: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub struct OpticsFit {
    pub graph: OpticsGraph,
    /// Xi clusters as inclusive `(start, end)` ranges over the ordering,
    /// innermost clusters before the ones containing them.
    pub hierarchy: Vec<(usize, usize)>,
    /// Flat labels: each point takes its innermost Xi cluster. Points whose
    /// innermost cluster leaves fewer than `min_pts` of them, or that lie in
    /// no cluster, are noise.
    pub assignment: ClusterAssignment,
}

// Reachability values are rounded the same way as the reference
// implementation so that ties in the ordering resolve identically.
fn round15(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let scaled = x * 1e15;
    if !scaled.is_finite() {
        return x;
    }
    scaled.round_ties_even() / 1e15
}

/// OPTICS with unbounded epsilon.
pub fn optics(dm: &DistanceMatrix, min_pts: usize) -> Result<OpticsGraph> {
    let n = dm.len();
    if min_pts < 2 {
        return Err(Error::Parameter(format!("min_pts must be >= 2, got {min_pts}")));
    }
    // Core distance counts the point itself as its first neighbour.
    let core_distance: Vec<f64> = (0..n)
        .map(|i| {
            if min_pts > n {
                return f64::INFINITY;
            }
            let mut row = dm.row(i).to_vec();
            row.sort_by(f64::total_cmp);
            row[min_pts - 1]
        })
        .collect();
    let mut reachability = vec![f64::INFINITY; n];
    let mut predecessor = vec![None; n];
    let mut processed = vec![false; n];
    let mut ordering = Vec::with_capacity(n);
    for _ in 0..n {
        let mut point = usize::MAX;
        for i in (0..n).filter(|&i| !processed[i]) {
            if point == usize::MAX || reachability[i] < reachability[point] {
                point = i;
            }
        }
        processed[point] = true;
        ordering.push(point);
        if core_distance[point].is_finite() {
            for j in (0..n).filter(|&j| !processed[j]) {
                let r = round15(dm.get(point, j).max(core_distance[point]));
                if r < reachability[j] {
                    reachability[j] = r;
                    predecessor[j] = Some(point);
                }
            }
        }
    }
    Ok(OpticsGraph {
        ordering,
        reachability,
        core_distance,
        predecessor,
    })
}

/// Grows a steep area from `start`; `reverse` marks points moving the other
/// way, which end the area immediately.
fn extend_region(steep: &[bool], reverse: &[bool], start: usize, min_pts: usize) -> usize {
    let mut flat_run = 0;
    let mut end = start;
    for index in start..steep.len() {
        if steep[index] {
            flat_run = 0;
            end = index;
        } else if !reverse[index] {
            flat_run += 1;
            if flat_run > min_pts {
                break;
            }
        } else {
            break;
        }
    }
    end
}

struct SteepDown {
    start: usize,
    end: usize,
    mib: f64,
}

fn update_filter(sdas: &mut Vec<SteepDown>, mib: f64, xi_complement: f64, plot: &[f64]) {
    if mib.is_infinite() {
        sdas.clear();
        return;
    }
    sdas.retain(|sda| mib <= plot[sda.start] * xi_complement);
    for sda in sdas.iter_mut() {
        sda.mib = sda.mib.max(mib);
    }
}

fn correct_predecessor(
    plot: &[f64],
    pred_plot: &[Option<usize>],
    ordering: &[usize],
    s: usize,
    mut e: usize,
) -> Option<(usize, usize)> {
    while s < e {
        if plot[s] > plot[e] {
            return Some((s, e));
        }
        let p_e = pred_plot[e];
        if ordering[s..e].iter().any(|&o| Some(o) == p_e) {
            return Some((s, e));
        }
        e -= 1;
    }
    None
}

/// Xi steep-area extraction over an OPTICS graph. Returns inclusive ranges
/// over the ordering.
pub fn xi_clusters(g: &OpticsGraph, min_pts: usize, xi: f64) -> Vec<(usize, usize)> {
    let n = g.ordering.len();
    let min_cluster_size = min_pts;
    let mut plot: Vec<f64> = g.ordering.iter().map(|&p| g.reachability[p]).collect();
    plot.push(f64::INFINITY);
    let pred_plot: Vec<Option<usize>> = g.ordering.iter().map(|&p| g.predecessor[p]).collect();
    let xi_complement = 1.0 - xi;

    let ratio: Vec<f64> = (0..n).map(|i| plot[i] / plot[i + 1]).collect();
    let steep_up: Vec<bool> = ratio.iter().map(|&r| r <= xi_complement).collect();
    let steep_down: Vec<bool> = ratio.iter().map(|&r| r >= 1.0 / xi_complement).collect();
    let down: Vec<bool> = ratio.iter().map(|&r| r > 1.0).collect();
    let up: Vec<bool> = ratio.iter().map(|&r| r < 1.0).collect();

    let mut sdas: Vec<SteepDown> = Vec::new();
    let mut clusters = Vec::new();
    let mut index = 0;
    let mut mib = 0.0f64;
    for steep_index in 0..n {
        if !(steep_up[steep_index] || steep_down[steep_index]) || steep_index < index {
            continue;
        }
        mib = plot[index..=steep_index].iter().copied().fold(mib, f64::max);
        update_filter(&mut sdas, mib, xi_complement, &plot);
        if steep_down[steep_index] {
            let d_end = extend_region(&steep_down, &up, steep_index, min_pts);
            sdas.push(SteepDown {
                start: steep_index,
                end: d_end,
                mib: 0.0,
            });
            index = d_end + 1;
            mib = plot[index];
        } else {
            let u_start = steep_index;
            let u_end = extend_region(&steep_up, &down, u_start, min_pts);
            index = u_end + 1;
            mib = plot[index];
            let mut u_clusters = Vec::new();
            for d in &sdas {
                let mut c_start = d.start;
                let mut c_end = u_end;
                if plot[c_end + 1] * xi_complement < d.mib {
                    continue;
                }
                let d_max = plot[d.start];
                if d_max * xi_complement >= plot[c_end + 1] {
                    while plot[c_start + 1] > plot[c_end + 1] && c_start < d.end {
                        c_start += 1;
                    }
                } else if plot[c_end + 1] * xi_complement >= d_max {
                    while plot[c_end - 1] > d_max && c_end > u_start {
                        c_end -= 1;
                    }
                }
                match correct_predecessor(&plot, &pred_plot, &g.ordering, c_start, c_end) {
                    Some((s, e)) => {
                        c_start = s;
                        c_end = e;
                    }
                    None => continue,
                }
                if c_end + 1 - c_start < min_cluster_size || c_start > d.end || c_end < u_start {
                    continue;
                }
                u_clusters.push((c_start, c_end));
            }
            u_clusters.reverse();
            clusters.extend(u_clusters);
        }
    }
    clusters
}

/// OPTICS followed by Xi extraction.
pub fn optics_xi(dm: &DistanceMatrix, min_pts: usize, xi: f64) -> Result<OpticsFit> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Parameter(format!("xi must lie in (0, 1), got {xi}")));
    }
    let graph = optics(dm, min_pts)?;
    let hierarchy = xi_clusters(&graph, min_pts, xi);
    let n = dm.len();

    // Innermost = smallest enclosing range.
    let mut innermost: Vec<Option<usize>> = vec![None; n];
    for pos in 0..n {
        innermost[pos] = hierarchy
            .iter()
            .enumerate()
            .filter(|(_, &(s, e))| s <= pos && pos <= e)
            .min_by_key(|(c, &(s, e))| (e - s, *c))
            .map(|(c, _)| c);
    }
    let mut own = vec![0usize; hierarchy.len()];
    for c in innermost.iter().flatten() {
        own[*c] += 1;
    }
    let mut raw = vec![None; n];
    for (pos, c) in innermost.iter().enumerate() {
        if let Some(c) = c {
            if own[*c] >= min_pts {
                raw[graph.ordering[pos]] = Some(*c);
            }
        }
    }
    let assignment = ClusterAssignment::new(dm.ids().to_vec(), &raw, "optics_xi")
        .with_param("min_pts", min_pts)
        .with_param("xi", xi);
    Ok(OpticsFit {
        graph,
        hierarchy,
        assignment,
    })
}

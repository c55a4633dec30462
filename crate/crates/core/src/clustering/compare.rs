use std::collections::HashMap;

use super::{ClusterAssignment, Label};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Members per cluster label of each side, in label order.
    pub counts_a: Vec<usize>,
    pub counts_b: Vec<usize>,
    pub noise_a: usize,
    pub noise_b: usize,
    /// Fraction of unordered node pairs both partitions treat alike (Rand
    /// index). Noise points never share a cluster.
    pub agreement: f64,
}

fn counts(a: &ClusterAssignment) -> Vec<usize> {
    let mut out = vec![0; a.k()];
    for l in &a.labels {
        if let Label::Cluster(c) = l {
            out[*c] += 1;
        }
    }
    out
}

pub fn compare_assignments(a: &ClusterAssignment, b: &ClusterAssignment) -> Result<Comparison> {
    let b_index: HashMap<&str, usize> =
        b.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    if a.len() != b.len() || a.ids.iter().any(|id| !b_index.contains_key(id.as_str())) {
        return Err(Error::Parameter("assignments cover different node sets".into()));
    }
    let lb: Vec<Label> = a.ids.iter().map(|id| b.labels[b_index[id.as_str()]]).collect();
    let same = |ls: &[Label], i: usize, j: usize| ls[i] == ls[j] && ls[i] != Label::Noise;
    let n = a.len();
    let (mut agree, mut total) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            total += 1;
            if same(&a.labels, i, j) == same(&lb, i, j) {
                agree += 1;
            }
        }
    }
    Ok(Comparison {
        counts_a: counts(a),
        counts_b: counts(b),
        noise_a: a.noise_count(),
        noise_b: b.noise_count(),
        agreement: if total == 0 { 1.0 } else { agree as f64 / total as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::au_reference;
    use crate::dataset::CountryDataset;

    #[test]
    fn identical_and_relabelled() {
        let ds = CountryDataset::reference();
        let au = au_reference(&ds);
        assert_eq!(compare_assignments(&au, &au).unwrap().agreement, 1.0);
        let mut permuted = au.clone();
        for l in permuted.labels.iter_mut() {
            if let Label::Cluster(c) = l {
                *c = 4 - *c;
            }
        }
        assert_eq!(compare_assignments(&au, &permuted).unwrap().agreement, 1.0);
    }

    #[test]
    fn different_universe_is_error() {
        let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let a = ClusterAssignment::new(ids(&["x", "y"]), &[Some(0), Some(0)], "t");
        let b = ClusterAssignment::new(ids(&["x", "z"]), &[Some(0), Some(0)], "t");
        assert!(compare_assignments(&a, &b).is_err());
    }

    #[test]
    fn order_independent_alignment() {
        let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let a = ClusterAssignment::new(ids(&["x", "y", "z"]), &[Some(0), Some(0), Some(1)], "t");
        let b = ClusterAssignment::new(ids(&["z", "y", "x"]), &[Some(0), Some(1), Some(1)], "t");
        assert_eq!(compare_assignments(&a, &b).unwrap().agreement, 1.0);
    }
}

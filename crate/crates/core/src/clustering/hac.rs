use super::{ClusterAssignment, DistanceMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Cluster ids merged; leaves are `0..n`, the merge at step `s` creates `n + s`.
    pub a: usize,
    pub b: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone)]
pub struct Dendrogram {
    pub ids: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Complete-linkage agglomeration. Ties merge the pair with the smallest
    /// (lower, higher) active-cluster ids.
    pub fn complete(dm: &DistanceMatrix) -> Dendrogram {
        let n = dm.len();
        // Active clusters: (cluster id, member leaves).
        let mut active: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
        let mut link: Vec<Vec<f64>> = (0..n).map(|i| dm.row(i).to_vec()).collect();
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        while active.len() > 1 {
            let m = active.len();
            let (mut bi, mut bj, mut bh) = (0, 1, f64::INFINITY);
            for i in 0..m {
                for j in i + 1..m {
                    if link[i][j] < bh {
                        (bi, bj, bh) = (i, j, link[i][j]);
                    }
                }
            }
            let (id_i, leaves_i) = active[bi].clone();
            let (id_j, leaves_j) = active[bj].clone();
            let mut leaves = leaves_i;
            leaves.extend(leaves_j);
            merges.push(Merge {
                a: id_i.min(id_j),
                b: id_i.max(id_j),
                height: bh,
                size: leaves.len(),
            });
            // Complete linkage: new distance is the max of the two old ones.
            let merged_row: Vec<f64> = (0..m).map(|x| link[bi][x].max(link[bj][x])).collect();
            for x in 0..m {
                link[bi][x] = merged_row[x];
                link[x][bi] = merged_row[x];
            }
            link[bi][bi] = 0.0;
            active[bi] = (n + merges.len() - 1, leaves);
            active.remove(bj);
            link.remove(bj);
            for row in link.iter_mut() {
                row.remove(bj);
            }
        }
        Dendrogram {
            ids: dm.ids().to_vec(),
            merges,
        }
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Flat partition keeping every merge strictly below `h`.
    pub fn cut(&self, h: f64) -> ClusterAssignment {
        let n = self.ids.len();
        let mut parent: Vec<usize> = (0..2 * n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (s, m) in self.merges.iter().enumerate() {
            if m.height < h {
                let node = n + s;
                let ra = find(&mut parent, m.a);
                let rb = find(&mut parent, m.b);
                parent[ra] = node;
                parent[rb] = node;
            }
        }
        let raw: Vec<Option<usize>> = (0..n).map(|i| Some(find(&mut parent, i))).collect();
        ClusterAssignment::new(self.ids.clone(), &raw, "hac").with_param("cut", h)
    }
}

pub fn hac_complete(dm: &DistanceMatrix, cut_distance: f64) -> Result<(ClusterAssignment, Dendrogram)> {
    if !(cut_distance > 0.0) {
        return Err(Error::Parameter(format!("cut distance must be > 0, got {cut_distance}")));
    }
    let dendro = Dendrogram::complete(dm);
    Ok((dendro.cut(cut_distance), dendro))
}

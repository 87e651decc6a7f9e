//! Ward-linkage agglomerative clustering and inconsistency-based flat cuts.
//!
//! Leaves are numbered `0..n`; the cluster created by merge `s` gets node id
//! `n + s`. Heights follow the usual Euclidean Ward convention: two
//! singletons merge at their Euclidean distance, and the Lance-Williams
//! update is applied to squared dissimilarities.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    /// Smaller node id of the pair.
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Merge index of an internal node id, `None` for leaves.
    pub fn link_of(&self, node: usize) -> Option<usize> {
        node.checked_sub(self.leaves)
    }

    fn leaves_under(&self, node: usize, out: &mut Vec<usize>) {
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            match self.link_of(x) {
                None => out.push(x),
                Some(l) => {
                    stack.push(self.merges[l].right);
                    stack.push(self.merges[l].left);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Cluster id per point; ids are dense and numbered in order of each
    /// cluster's first member.
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ClusterAssignment {
    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }
}

fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    n * i - i * (i + 1) / 2 + (j - i - 1)
}

#[derive(Clone, Copy)]
struct Candidate {
    dist: f64,
    lo: usize,
    hi: usize,
    slot: usize,
}

/// Relative gap below which two dissimilarities count as tied. The
/// Lance-Williams update and a direct centroid computation round equal
/// costs differently, so exact float equality is too strict.
pub const WARD_TIE_REL: f64 = 1e-12;

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        let scale = self.dist.abs().max(other.dist.abs());
        if (self.dist - other.dist).abs() <= WARD_TIE_REL * scale {
            (self.lo, self.hi) < (other.lo, other.hi)
        } else {
            self.dist < other.dist
        }
    }
}

struct WardState {
    n: usize,
    dist: Vec<f64>,
    size: Vec<usize>,
    node: Vec<usize>,
    active: Vec<bool>,
    nearest: Vec<Option<Candidate>>,
}

impl WardState {
    fn d(&self, a: usize, b: usize) -> f64 {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.dist[condensed_index(self.n, i, j)]
    }

    fn candidate(&self, i: usize, j: usize) -> Candidate {
        let (a, b) = (self.node[i], self.node[j]);
        Candidate {
            dist: self.d(i, j),
            lo: a.min(b),
            hi: a.max(b),
            slot: j,
        }
    }

    fn rescan(&mut self, i: usize) {
        let mut best: Option<Candidate> = None;
        for j in i + 1..self.n {
            if !self.active[j] {
                continue;
            }
            let c = self.candidate(i, j);
            if best.map_or(true, |b| c.beats(&b)) {
                best = Some(c);
            }
        }
        self.nearest[i] = best;
    }
}

/// Ward-linkage HAC on the rows of `points` with Euclidean distance.
///
/// Each step merges the pair with the smallest Ward dissimilarity; ties
/// (within [`WARD_TIE_REL`]) go to the lexicographically smallest `(left id, right id)`. Memory
/// is one condensed `n(n-1)/2` distance matrix.
pub fn hac_ward(points: &FeatureMatrix) -> Result<Dendrogram> {
    let n = points.nrows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let data = &points.data;
    for c in 0..data.ncols() {
        for r in 0..n {
            if !data[(r, c)].is_finite() {
                return Err(Error::NonFinite { row: r, column: c });
            }
        }
    }

    let mut dist = vec![0.0; n * (n - 1) / 2];
    for i in 0..n {
        let ri = data.row(i);
        for j in i + 1..n {
            dist[condensed_index(n, i, j)] = (ri - data.row(j)).norm();
        }
    }

    let mut st = WardState {
        n,
        dist,
        size: vec![1; n],
        node: (0..n).collect(),
        active: vec![true; n],
        nearest: vec![None; n],
    };
    for i in 0..n {
        st.rescan(i);
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let (i, best) = (0..n)
            .filter(|&i| st.active[i])
            .filter_map(|i| st.nearest[i].map(|c| (i, c)))
            .reduce(|a, b| if b.1.beats(&a.1) { b } else { a })
            .ok_or_else(|| Error::Internal("no mergeable pair".into()))?;
        let j = best.slot;
        let (ni, nj) = (st.size[i] as f64, st.size[j] as f64);
        let dij2 = best.dist * best.dist;

        merges.push(Merge {
            left: best.lo,
            right: best.hi,
            height: best.dist,
            count: st.size[i] + st.size[j],
        });

        for k in 0..n {
            if !st.active[k] || k == i || k == j {
                continue;
            }
            let nk = st.size[k] as f64;
            let (dik, djk) = (st.d(i, k), st.d(j, k));
            let updated = ((ni + nk) * dik * dik + (nj + nk) * djk * djk - nk * dij2)
                / (ni + nj + nk);
            let (a, b) = if i < k { (i, k) } else { (k, i) };
            st.dist[condensed_index(n, a, b)] = updated.max(0.0).sqrt();
        }
        st.size[i] += st.size[j];
        st.node[i] = n + step;
        st.active[j] = false;
        st.nearest[j] = None;

        st.rescan(i);
        for k in 0..n {
            if !st.active[k] || k == i {
                continue;
            }
            let Some(cur) = st.nearest[k] else { continue };
            if cur.slot == i || cur.slot == j {
                st.rescan(k);
            } else if k < i {
                let c = st.candidate(k, i);
                if c.beats(&cur) {
                    st.nearest[k] = Some(c);
                }
            }
        }
    }

    Ok(Dendrogram { leaves: n, merges })
}

/// Inconsistency coefficient of every link.
///
/// The comparison set of a link holds its own height plus the heights of
/// descendant links down to `depth` levels, counting the link itself as the
/// first level (so `depth = 2` adds its direct child links).
pub fn inconsistency(d: &Dendrogram, depth: usize) -> Vec<f64> {
    let depth = depth.max(1);
    let mut out = Vec::with_capacity(d.merges.len());
    let mut heights = Vec::new();
    let mut stack = Vec::new();
    for (l, m) in d.merges.iter().enumerate() {
        heights.clear();
        stack.clear();
        stack.push((l, 1usize));
        while let Some((link, level)) = stack.pop() {
            heights.push(d.merges[link].height);
            if level < depth {
                for child in [d.merges[link].left, d.merges[link].right] {
                    if let Some(cl) = d.link_of(child) {
                        stack.push((cl, level + 1));
                    }
                }
            }
        }
        let k = heights.len();
        if k <= 1 {
            out.push(0.0);
            continue;
        }
        let mean = heights.iter().sum::<f64>() / k as f64;
        let var = heights.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / (k as f64 - 1.0);
        let sd = var.sqrt();
        out.push(if sd > 0.0 { (m.height - mean) / sd } else { 0.0 });
    }
    out
}

/// Flat clusters: maximal subtrees whose links all have coefficient
/// `<= cutoff`. Points not covered by such a subtree become singletons.
pub fn cut_dendrogram(d: &Dendrogram, coefficients: &[f64], cutoff: f64) -> ClusterAssignment {
    let n = d.leaves;
    let mut subtree_max = vec![f64::NEG_INFINITY; d.merges.len()];
    for (l, m) in d.merges.iter().enumerate() {
        let mut worst = coefficients[l];
        for child in [m.left, m.right] {
            if let Some(cl) = d.link_of(child) {
                worst = worst.max(subtree_max[cl]);
            }
        }
        subtree_max[l] = worst;
    }

    let mut raw = vec![usize::MAX; n];
    let mut groups = 0;
    let mut members = Vec::new();
    let mut stack = vec![2 * n - 2];
    while let Some(node) = stack.pop() {
        match d.link_of(node) {
            Some(l) if subtree_max[l] > cutoff => {
                stack.push(d.merges[l].right);
                stack.push(d.merges[l].left);
            }
            _ => {
                members.clear();
                d.leaves_under(node, &mut members);
                for &leaf in &members {
                    raw[leaf] = groups;
                }
                groups += 1;
            }
        }
    }

    let mut remap = vec![usize::MAX; groups];
    let mut sizes = Vec::with_capacity(groups);
    let labels = raw
        .iter()
        .map(|&g| {
            if remap[g] == usize::MAX {
                remap[g] = sizes.len();
                sizes.push(0);
            }
            sizes[remap[g]] += 1;
            remap[g]
        })
        .collect();
    ClusterAssignment { labels, sizes }
}

//! Cluster e-values, structural uniqueness scores (SUS) and per-LPR profiles.

use crate::clustering::ClusterAssignment;
use crate::error::{Error, Result};
use crate::lpr::{Lpr, LprKey};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterScore {
    pub cluster: usize,
    pub size: usize,
    /// Number of clusters strictly larger than this one.
    pub larger: usize,
    pub evalue: f64,
    pub sus: f64,
}

/// `evalue(C) = alpha / |clusters|`, `alpha` = number of clusters strictly
/// larger than `C`. Returns `(alpha, evalue)` per cluster, indexed like
/// `sizes`.
pub fn cluster_evalues(sizes: &[usize]) -> Vec<(usize, f64)> {
    let total = sizes.len();
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sizes
        .iter()
        .map(|&s| {
            let larger = total - sorted.partition_point(|&x| x <= s);
            (larger, larger as f64 / total as f64)
        })
        .collect()
}

/// Z-score over clusters (one entry per cluster, sample standard deviation).
pub fn sus_scores(evalues: &[f64]) -> Result<Vec<f64>> {
    let n = evalues.len();
    if n < 2 {
        return Err(Error::DegenerateClustering);
    }
    let mean = evalues.iter().sum::<f64>() / n as f64;
    let var = evalues.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::DegenerateClustering);
    }
    Ok(evalues.iter().map(|e| (e - mean) / sd).collect())
}

/// Score table for a flat clustering, ordered by cluster id.
pub fn score_clusters(assignment: &ClusterAssignment) -> Result<Vec<ClusterScore>> {
    let ev = cluster_evalues(&assignment.sizes);
    let values: Vec<f64> = ev.iter().map(|&(_, e)| e).collect();
    let sus = sus_scores(&values)?;
    Ok(assignment
        .sizes
        .iter()
        .zip(ev)
        .zip(sus)
        .enumerate()
        .map(|(cluster, ((&size, (larger, evalue)), sus))| ClusterScore {
            cluster,
            size,
            larger,
            evalue,
            sus,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SusProfile {
    pub lpr: LprKey,
    pub values: Vec<f64>,
}

/// Profile of an LPR whose fragments occupy registry rows
/// `first_row .. first_row + 2k-3`.
pub fn build_profile(
    r: &Lpr,
    first_row: usize,
    assignment: &ClusterAssignment,
    scores: &[ClusterScore],
) -> Result<SusProfile> {
    let values = (first_row..first_row + r.fragment_count())
        .map(|row| {
            let cluster = *assignment.labels.get(row).ok_or_else(|| {
                Error::Internal(format!("tetrapeptide {row} of {} has no cluster", r.key))
            })?;
            scores
                .get(cluster)
                .map(|s| s.sus)
                .ok_or_else(|| Error::Internal(format!("cluster {cluster} has no score")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SusProfile {
        lpr: r.key.clone(),
        values,
    })
}

//! End-to-end batch run: every LPR of the dataset is clustered jointly, so
//! scores for one protein depend on the whole input.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::{cut_dendrogram, hac_ward, inconsistency, ClusterAssignment, Dendrogram};
use crate::demarcation::{demarcate, maximal_scoring_subsequences, LinkerCall, Subsequence};
use crate::error::{Error, Result};
use crate::features::{
    fit_pca, select_components, standardize, transform, ComponentPolicy, FeatureMatrix, PcaModel,
};
use crate::invariants::{compute_invariants, GiVector, GI_COUNT, GI_LABELS};
use crate::lpr::{discretize_lpr, extract_all, Lpr, Tetrapeptide, FRAGMENT_LEN};
use crate::scoring::{build_profile, score_clusters, ClusterScore, SusProfile};
use crate::structure_io::ValidatedEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Ward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub fragment_length: usize,
    pub pc_policy: ComponentPolicy,
    pub inconsistency_depth: usize,
    pub inconsistency_cutoff: f64,
    pub linkage: Linkage,
    pub deterministic: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k: 6,
            fragment_length: FRAGMENT_LEN,
            pc_policy: ComponentPolicy::default(),
            inconsistency_depth: 2,
            inconsistency_cutoff: 1.15,
            linkage: Linkage::Ward,
            deterministic: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("k must be >= 2, got {}", self.k)));
        }
        if self.fragment_length != FRAGMENT_LEN {
            return Err(Error::Config(format!(
                "fragment length is fixed at {FRAGMENT_LEN}, got {}",
                self.fragment_length
            )));
        }
        if !(self.inconsistency_cutoff > 0.0) {
            return Err(Error::Config(format!(
                "inconsistency cutoff must be > 0, got {}",
                self.inconsistency_cutoff
            )));
        }
        if self.inconsistency_depth < 1 {
            return Err(Error::Config("inconsistency depth must be >= 1".into()));
        }
        if let ComponentPolicy::Variance(t) = self.pc_policy {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::VarianceThreshold(t));
            }
        }
        if !self.deterministic {
            return Err(Error::Config("non-deterministic runs are not supported".into()));
        }
        Ok(())
    }
}

/// Row of the global tetrapeptide registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegistryRow {
    pub lpr: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub dataset_hash: String,
    pub lprs: Vec<Lpr>,
    /// Canonical row order for every matrix below.
    pub registry: Vec<RegistryRow>,
    pub invariants: FeatureMatrix,
    pub standardized: FeatureMatrix,
    pub pca: PcaModel,
    pub components_used: usize,
    pub projected: FeatureMatrix,
    pub dendrogram: Dendrogram,
    pub coefficients: Vec<f64>,
    pub assignment: ClusterAssignment,
    pub scores: Vec<ClusterScore>,
    pub profiles: Vec<SusProfile>,
    pub subsequences: Vec<Vec<Subsequence>>,
    pub calls: Vec<LinkerCall>,
}

impl RunArtifacts {
    pub fn tetrapeptide_id(&self, row: usize) -> String {
        let r = self.registry[row];
        format!("{}#{}", self.lprs[r.lpr].key, r.index)
    }
}

/// SHA-256 over the entries' identifiers, endpoints and Cα coordinates, in
/// input order.
pub fn dataset_hash(entries: &[ValidatedEntry]) -> String {
    let mut h = Sha256::new();
    for e in entries {
        h.update(e.structure_id.as_bytes());
        h.update([0]);
        h.update(e.chain_id.to_string().as_bytes());
        for d in &e.endpoints {
            h.update(d.to_le_bytes());
        }
        h.update([0xff]);
        for r in &e.chain().residues {
            h.update(r.seq_pos.to_le_bytes());
            h.update(r.insertion_code.unwrap_or(' ').to_string().as_bytes());
            for c in r.ca.iter() {
                h.update(c.to_bits().to_le_bytes());
            }
        }
        for g in &e.chain().gaps {
            h.update(g.to_le_bytes());
        }
        h.update([0xfe]);
    }
    hex::encode(h.finalize())
}

fn tetrapeptide_label(lpr: &Lpr, t: &Tetrapeptide) -> String {
    format!("{}#{}", lpr.key, t.index)
}

/// Extract, describe, cluster, score and demarcate every internal boundary.
pub fn run_pipeline(entries: &[ValidatedEntry], cfg: &PipelineConfig) -> Result<RunArtifacts> {
    cfg.validate()?;
    if entries.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: entries.len(),
        });
    }
    let k = cfg.k;

    let per_entry: Vec<Vec<Lpr>> = entries
        .par_iter()
        .map(|e| extract_all(e, k).map_err(|err| err.at_stage("extract", e.label())))
        .collect::<Result<_>>()?;
    let lprs: Vec<Lpr> = per_entry.into_iter().flatten().collect();

    let fragments: Vec<Tetrapeptide> = lprs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, r)| discretize_lpr(r, i))
        .collect();
    let registry: Vec<RegistryRow> = fragments
        .iter()
        .map(|t| RegistryRow {
            lpr: t.lpr,
            index: t.index,
        })
        .collect();
    let expected = lprs.len() * (2 * k - (FRAGMENT_LEN - 1));
    if fragments.len() != expected {
        return Err(Error::Internal(format!(
            "expected {expected} tetrapeptides, found {}",
            fragments.len()
        )));
    }

    let gis: Vec<GiVector> = fragments.par_iter().map(compute_invariants).collect();
    let row_ids: Vec<String> = fragments
        .iter()
        .map(|t| tetrapeptide_label(&lprs[t.lpr], t))
        .collect();
    let raw = DMatrix::from_fn(gis.len(), GI_COUNT, |r, c| gis[r].0[c]);
    let invariants = FeatureMatrix::new(
        row_ids,
        GI_LABELS.iter().map(|s| s.to_string()).collect(),
        raw,
    )
    .map_err(|e| e.at_stage("invariants", "dataset"))?;

    let (standardized, scaling) =
        standardize(&invariants).map_err(|e| e.at_stage("standardize", "dataset"))?;
    let pca = fit_pca(&standardized, &scaling).map_err(|e| e.at_stage("pca", "dataset"))?;
    let components_used =
        select_components(&pca, cfg.pc_policy).map_err(|e| e.at_stage("pca", "dataset"))?;
    let projected = transform(&standardized, &pca, components_used)
        .map_err(|e| e.at_stage("pca", "dataset"))?;

    let dendrogram = hac_ward(&projected).map_err(|e| e.at_stage("cluster", "dataset"))?;
    let coefficients = inconsistency(&dendrogram, cfg.inconsistency_depth);
    let assignment = cut_dendrogram(&dendrogram, &coefficients, cfg.inconsistency_cutoff);

    let scores = score_clusters(&assignment).map_err(|e| e.at_stage("score", "dataset"))?;

    let stride = 2 * k - (FRAGMENT_LEN - 1);
    let profiles: Vec<SusProfile> = lprs
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            build_profile(r, i * stride, &assignment, &scores)
                .map_err(|e| e.at_stage("profile", r.key.to_string()))
        })
        .collect::<Result<_>>()?;
    let subsequences: Vec<Vec<Subsequence>> = profiles
        .par_iter()
        .map(|p| maximal_scoring_subsequences(&p.values))
        .collect();
    let calls: Vec<LinkerCall> = profiles
        .par_iter()
        .map(|p| demarcate(p, k).map_err(|e| e.at_stage("demarcate", p.lpr.to_string())))
        .collect::<Result<_>>()?;

    Ok(RunArtifacts {
        dataset_hash: dataset_hash(entries),
        lprs,
        registry,
        invariants,
        standardized,
        pca,
        components_used,
        projected,
        dendrogram,
        coefficients,
        assignment,
        scores,
        profiles,
        subsequences,
        calls,
    })
}

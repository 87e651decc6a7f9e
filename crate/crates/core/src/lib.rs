//! Structure-based demarcation of protein domain linkers.
//!
//! A window of `2k` residues around every domain boundary is cut into
//! overlapping four-residue fragments. Each fragment is described by 15
//! rigid-motion invariants of its Cα tetrahedron, the descriptors are
//! standardized and projected onto leading principal components, and all
//! fragments of the dataset are clustered together with Ward linkage. Rare
//! fragments (small clusters) receive high structural uniqueness scores, and
//! the linker is the maximal-scoring run of fragments in each window.

pub mod artifacts;
pub mod clustering;
pub mod demarcation;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod invariants;
pub mod lpr;
pub mod pipeline;
pub mod scoring;
pub mod structure_io;
pub mod synthetic;

pub use error::{Error, Result};
pub use pipeline::{run_pipeline, PipelineConfig, RunArtifacts};

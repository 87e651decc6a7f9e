//! Deterministic synthetic multi-domain chains for tests and demos.
//!
//! Each chain is a square-section helix domain followed by a planar zigzag
//! strand domain, joined by a short random-walk segment. All coordinates lie
//! on a 1/8 Å grid, so they survive the 3-decimal PDB format unchanged and
//! every fully regular fragment yields bit-identical invariants.

use std::fmt::Write as _;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::structure_io::DomainDefinition;

const HELIX_RADIUS: f64 = 2.5;
const HELIX_RISE: f64 = 1.5;
const HELIX_XY: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
const STRAND_STEP: (f64, f64) = (3.5, 1.5);
const WALK_STEP: f64 = 3.8;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEntry {
    pub structure_id: String,
    pub pdb: String,
    pub definition: DomainDefinition,
    /// Residues of the irregular segment, if any.
    pub irregular: Option<(i32, i32)>,
}

fn snap(x: f64) -> f64 {
    (x * 8.0).round() / 8.0
}

fn helix_point(i: i32) -> Vector3<f64> {
    let (x, y) = HELIX_XY[i.rem_euclid(4) as usize];
    Vector3::new(HELIX_RADIUS * x, HELIX_RADIUS * y, HELIX_RISE * i as f64)
}

fn random_step(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.2 && n <= 1.0 {
            let step: Vector3<f64> = v / n * WALK_STEP;
            return step.map(snap);
        }
    }
}

/// Cα positions for residues `1..=len`: helix up to `walk.0 - 1`, random walk
/// over `walk`, strand afterwards. `walk = None` makes a helix/strand chain
/// that switches at `switch`.
fn trace(
    len: i32,
    walk: Option<(i32, i32)>,
    switch: i32,
    offset: Vector3<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<Vector3<f64>> {
    let helix_end = walk.map_or(switch, |(a, _)| a - 1);
    let walk_end = walk.map_or(switch, |(_, b)| b);
    let mut pts = Vec::with_capacity(len as usize);
    for i in 1..=len {
        let p = if i <= helix_end {
            offset + helix_point(i)
        } else if i <= walk_end {
            pts[pts.len() - 1] + random_step(rng)
        } else {
            let sign = if (i - walk_end) % 2 == 0 { 1.0 } else { -1.0 };
            pts[pts.len() - 1] + Vector3::new(STRAND_STEP.0, sign * STRAND_STEP.1, 0.0)
        };
        pts.push(p);
    }
    pts
}

/// Cα-only PDB text for chain `A`, residues numbered from 1.
pub fn pdb_text(points: &[Vector3<f64>]) -> String {
    let mut out = String::new();
    for (i, p) in points.iter().enumerate() {
        let seq = i + 1;
        let _ = writeln!(
            out,
            "ATOM  {seq:>5}  CA  ALA A{seq:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00           C",
            p.x, p.y, p.z
        );
    }
    out.push_str("TER\nEND\n");
    out
}

fn entry(
    id: String,
    len: i32,
    boundary: i32,
    walk: Option<(i32, i32)>,
    rng: &mut ChaCha8Rng,
) -> SyntheticEntry {
    let offset = Vector3::new(
        rng.gen_range(-20..20) as f64,
        rng.gen_range(-20..20) as f64,
        rng.gen_range(-20..20) as f64,
    );
    let points = trace(len, walk, boundary, offset, rng);
    SyntheticEntry {
        definition: DomainDefinition {
            structure_id: id.clone(),
            chain_id: 'A',
            endpoints: vec![boundary, len],
        },
        structure_id: id,
        pdb: pdb_text(&points),
        irregular: walk,
    }
}

/// `designed` two-domain chains, each with an irregular 3-5 residue segment
/// next to its boundary, followed by `regular` chains whose boundary window
/// is entirely helical.
pub fn synthetic_dataset(designed: usize, regular: usize, seed: u64) -> Vec<SyntheticEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(designed + regular);
    for i in 0..designed {
        let len = rng.gen_range(100..=130);
        let boundary = rng.gen_range(45..=65);
        let walk_len = rng.gen_range(3..=5);
        let start = boundary + rng.gen_range(-2..=1);
        let walk = (start, start + walk_len - 1);
        out.push(entry(format!("syn{i:03}"), len, boundary, Some(walk), &mut rng));
    }
    for i in 0..regular {
        let len = rng.gen_range(100..=130);
        let boundary = rng.gen_range(30..=40);
        // helix runs to residue 70, well past the window
        let mut e = entry(format!("reg{i:03}"), len, 70, None, &mut rng);
        e.definition.endpoints = vec![boundary, len];
        out.push(e);
    }
    out
}

/// Domain table rows for a set of entries.
pub fn domains_tsv(entries: &[SyntheticEntry]) -> String {
    let mut out = String::from("# structure_id\tchain_id\tendpoints\n");
    for e in entries {
        let ends: Vec<String> = e.definition.endpoints.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "{}\t{}\t{}", e.structure_id, e.definition.chain_id, ends.join(","));
    }
    out
}

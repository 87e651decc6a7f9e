#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use linker_scout_core::clustering::WARD_TIE_REL;
use linker_scout_core::structure_io::{parse_pdb, validate_entry, ValidatedEntry};
use linker_scout_core::synthetic::SyntheticEntry;
use nalgebra::{DMatrix, Quaternion, UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Rows of a tab-separated fixture, comments skipped.
pub fn fixture_rows(name: &str) -> Vec<Vec<String>> {
    fixture(name)
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').map(|s| s.trim().to_string()).collect())
        .collect()
}

pub fn published_cluster_sizes() -> Vec<usize> {
    fixture_rows("cluster_sizes.tsv")
        .iter()
        .flat_map(|r| {
            let size: usize = r[0].parse().unwrap();
            let count: usize = r[1].parse().unwrap();
            std::iter::repeat(size).take(count)
        })
        .collect()
}

pub fn parse_range(s: &str) -> (i32, i32) {
    let (a, b) = s.split_once('-').unwrap();
    (a.parse().unwrap(), b.parse().unwrap())
}

/// Per-residue set arithmetic: `(tp, fp, fn)` of `pred` against `gold`.
pub fn interval_set_counts(pred: (i32, i32), gold: (i32, i32)) -> (usize, usize, usize) {
    let p: HashSet<i32> = (pred.0..=pred.1).collect();
    let g: HashSet<i32> = (gold.0..=gold.1).collect();
    (
        p.intersection(&g).count(),
        p.difference(&g).count(),
        g.difference(&p).count(),
    )
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> UnitQuaternion<f64> {
    let q = Quaternion::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    );
    UnitQuaternion::from_quaternion(q)
}

pub fn random_fragment<R: Rng>(rng: &mut R) -> [Vector3<f64>; 4] {
    let mut pts = [Vector3::zeros(); 4];
    for i in 1..4 {
        let dir = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
        .normalize();
        pts[i] = pts[i - 1] + dir * 3.8;
    }
    let shift = Vector3::new(
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-50.0..50.0),
    );
    pts.map(|p| p + shift)
}

/// Unit-edge regular tetrahedron.
pub fn regular_tetrahedron() -> [Vector3<f64>; 4] {
    let s = 1.0 / (2.0 * 2f64.sqrt());
    [
        Vector3::new(1.0, 1.0, 1.0) * s,
        Vector3::new(1.0, -1.0, -1.0) * s,
        Vector3::new(-1.0, 1.0, -1.0) * s,
        Vector3::new(-1.0, -1.0, 1.0) * s,
    ]
}

/// Ward merge recomputed from scratch each step. Cluster dissimilarity is
/// `sqrt(2 |A||B| / (|A|+|B|)) * |centroid(A) - centroid(B)|`; costs within
/// `WARD_TIE_REL` of each other go to the smallest `(left id, right id)`. Returns `(left, right, height, count)`.
pub fn ward_oracle(points: &DMatrix<f64>) -> Vec<(usize, usize, f64, usize)> {
    let n = points.nrows();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let centroid = |members: &[usize]| {
        let mut c = points.row(members[0]).into_owned() * 0.0;
        for &m in members {
            c += points.row(m);
        }
        c / members.len() as f64
    };
    let mut out = Vec::new();
    for step in 0..n - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (ia, ma) = &clusters[a];
                let (ib, mb) = &clusters[b];
                let (na, nb) = (ma.len() as f64, mb.len() as f64);
                let cost = (2.0 * na * nb / (na + nb)).sqrt() * (centroid(ma) - centroid(mb)).norm();
                let (lo, hi) = ((*ia).min(*ib), (*ia).max(*ib));
                let better = match best {
                    None => true,
                    Some((c, l, h, _, _)) => {
                        if (cost - c).abs() <= WARD_TIE_REL * cost.max(c) {
                            (lo, hi) < (l, h)
                        } else {
                            cost < c
                        }
                    }
                };
                if better {
                    best = Some((cost, lo, hi, a, b));
                }
            }
        }
        let (cost, lo, hi, a, b) = best.unwrap();
        let mut members = clusters[a].1.clone();
        members.extend(clusters[b].1.iter().copied());
        out.push((lo, hi, cost, members.len()));
        clusters.remove(b);
        clusters.remove(a);
        clusters.push((n + step, members));
    }
    out
}

/// Best contiguous-range sum, enumerated over all `i <= j`.
pub fn brute_force_max(values: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..values.len() {
        let mut s = 0.0;
        for v in &values[i..] {
            s += v;
            best = best.max(s);
        }
    }
    best
}

pub fn load_entries(data: &[SyntheticEntry], k: usize) -> Vec<ValidatedEntry> {
    data.iter()
        .map(|e| {
            let model = parse_pdb(&e.structure_id, &e.pdb).unwrap();
            validate_entry(&model, &e.definition, k).unwrap()
        })
        .collect()
}

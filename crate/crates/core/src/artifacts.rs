//! Tab-separated text formats for run outputs and audit files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::clustering::Dendrogram;
use crate::demarcation::{CallStatus, LinkerCall};
use crate::error::{Error, Result};
use crate::features::write_model;
use crate::invariants::{GiVector, GI_LABELS};
use crate::lpr::FRAGMENT_LEN;
use crate::pipeline::RunArtifacts;
use crate::scoring::ClusterScore;

pub const LINKERS_HEADER: &str =
    "structure_id\tchain_id\tboundary\tlpr_start\tlpr_end\tstatus\tlinker_start\tlinker_end\tcum_sus";

pub const SCORES_FILE: &str = "cluster_scores.tsv";

pub fn write_linkers_tsv(calls: &[LinkerCall]) -> String {
    let mut out = String::from(LINKERS_HEADER);
    out.push('\n');
    for c in calls {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t",
            c.structure_id,
            c.chain_id,
            c.boundary,
            c.lpr_start(),
            c.lpr_end()
        );
        match c.status {
            CallStatus::Linker {
                start_res,
                end_res,
                cum_sus,
                ..
            } => {
                let _ = writeln!(out, "linker\t{start_res}\t{end_res}\t{cum_sus:.4}");
            }
            CallStatus::NoLinker => out.push_str("no_linker\tNA\tNA\tNA\n"),
        }
    }
    out
}

/// Read calls written by [`write_linkers_tsv`]. Cumulative scores come back
/// at the written precision.
pub fn read_linkers_tsv(text: &str) -> Result<Vec<LinkerCall>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("structure_id\t") {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 9 {
            return Err(Error::parse(lineno, format!("expected 9 columns, found {}", f.len())));
        }
        let int = |s: &str| {
            s.parse::<i32>()
                .map_err(|_| Error::parse(lineno, format!("bad integer {s:?}")))
        };
        let mut chars = f[1].chars();
        let chain_id = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::parse(lineno, format!("bad chain id {:?}", f[1]))),
        };
        let boundary = int(f[2])?;
        let lpr_start = int(f[3])?;
        let lpr_end = int(f[4])?;
        let k = boundary - lpr_start + 1;
        if k < 2 || lpr_end != boundary + k {
            return Err(Error::parse(lineno, "LPR bounds inconsistent with boundary"));
        }
        let origin = boundary - k;
        let status = match f[5] {
            "no_linker" => CallStatus::NoLinker,
            "linker" => {
                let (start_res, end_res) = (int(f[6])?, int(f[7])?);
                let cum_sus: f64 = f[8]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad score {:?}", f[8])))?;
                let tetra_end = end_res - origin - (FRAGMENT_LEN as i32 - 1);
                let tetra_start = start_res - origin;
                if tetra_start < 1 || tetra_end < tetra_start || end_res > lpr_end {
                    return Err(Error::parse(lineno, "linker outside its LPR"));
                }
                CallStatus::Linker {
                    start_res,
                    end_res,
                    cum_sus,
                    tetra_start: tetra_start as usize,
                    tetra_end: tetra_end as usize,
                }
            }
            other => return Err(Error::parse(lineno, format!("unknown status {other:?}"))),
        };
        out.push(LinkerCall {
            structure_id: f[0].to_string(),
            chain_id,
            boundary,
            k: k as usize,
            status,
        });
    }
    Ok(out)
}

/// Debug dump: `lpr_ref, index` then the 15 invariants at 6 decimals.
pub fn write_invariants_tsv<'a>(rows: impl IntoIterator<Item = (String, usize, &'a GiVector)>) -> String {
    let mut out = String::from("lpr_ref\tindex");
    for l in GI_LABELS {
        out.push('\t');
        out.push_str(l);
    }
    out.push('\n');
    for (lpr, index, g) in rows {
        let _ = write!(out, "{lpr}\t{index}");
        for v in g.0 {
            let _ = write!(out, "\t{v:.6}");
        }
        out.push('\n');
    }
    out
}

pub fn write_dendrogram_tsv(d: &Dendrogram) -> String {
    let mut out = String::from("left\tright\theight\tcount\n");
    for m in &d.merges {
        let _ = writeln!(out, "{}\t{}\t{:.16e}\t{}", m.left, m.right, m.height, m.count);
    }
    out
}

pub fn write_scores_tsv(scores: &[ClusterScore]) -> String {
    let mut out = String::from("cluster\tsize\tevalue\tsus\n");
    for s in scores {
        let _ = writeln!(out, "{}\t{}\t{:.16e}\t{:.16e}", s.cluster, s.size, s.evalue, s.sus);
    }
    out
}

/// Cluster sizes from a score table, in file order.
pub fn read_scores_sizes(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with("cluster\t") && !l.starts_with('#'))
        .map(|(idx, l)| {
            l.split('\t')
                .nth(1)
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&s| s > 0)
                .ok_or_else(|| Error::parse(idx + 1, "bad cluster size"))
        })
        .collect()
}

/// Cluster size -> number of clusters of that size.
pub fn size_histogram(sizes: &[usize]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for &s in sizes {
        *h.entry(s).or_insert(0) += 1;
    }
    h
}

/// Every audit file of a run as `(file name, contents)`.
pub fn audit_files(run: &RunArtifacts) -> Vec<(&'static str, String)> {
    let gis: Vec<GiVector> = (0..run.invariants.nrows())
        .map(|r| {
            let mut g = [0.0; 15];
            for (c, v) in g.iter_mut().enumerate() {
                *v = run.invariants.data[(r, c)];
            }
            GiVector(g)
        })
        .collect();
    let invariants = write_invariants_tsv(
        run.registry
            .iter()
            .zip(&gis)
            .map(|(row, g)| (run.lprs[row.lpr].key.to_string(), row.index, g)),
    );

    let mut assignments = String::from("tetrapeptide_id\tcluster_id\n");
    for (row, label) in run.assignment.labels.iter().enumerate() {
        let _ = writeln!(assignments, "{}\t{}", run.tetrapeptide_id(row), label);
    }

    let mut coefficients = String::from("link\tinconsistency\n");
    for (i, c) in run.coefficients.iter().enumerate() {
        let _ = writeln!(coefficients, "{i}\t{c:.16e}");
    }

    let mut profiles = String::from("lpr_ref\tvalues\n");
    for p in &run.profiles {
        let vals: Vec<String> = p.values.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(profiles, "{}\t{}", p.lpr, vals.join(","));
    }

    let mut subs = String::from("lpr_ref\tstart\tend\tscore\n");
    for (p, list) in run.profiles.iter().zip(&run.subsequences) {
        for s in list {
            let _ = writeln!(subs, "{}\t{}\t{}\t{:.16e}", p.lpr, s.start, s.end, s.score);
        }
    }

    let mut projected = String::from("tetrapeptide_id");
    for l in &run.projected.col_labels {
        projected.push('\t');
        projected.push_str(l);
    }
    projected.push('\n');
    for r in 0..run.projected.nrows() {
        projected.push_str(&run.projected.row_ids[r]);
        for c in 0..run.projected.ncols() {
            let _ = write!(projected, "\t{:.16e}", run.projected.data[(r, c)]);
        }
        projected.push('\n');
    }

    vec![
        ("invariants.tsv", invariants),
        ("pca_model.txt", write_model(&run.pca)),
        ("projected.tsv", projected),
        ("dendrogram.tsv", write_dendrogram_tsv(&run.dendrogram)),
        ("inconsistency.tsv", coefficients),
        ("assignments.tsv", assignments),
        (SCORES_FILE, write_scores_tsv(&run.scores)),
        ("profiles.tsv", profiles),
        ("subsequences.tsv", subs),
    ]
}

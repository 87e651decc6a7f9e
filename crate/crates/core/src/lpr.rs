//! Linker-probable regions (LPRs) and their tetrapeptide discretization.

use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::structure_io::{Residue, ValidatedEntry};

/// Number of residues per fragment.
pub const FRAGMENT_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LprKey {
    pub structure_id: String,
    pub chain_id: char,
    pub boundary: i32,
}

impl fmt::Display for LprKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.structure_id, self.chain_id, self.boundary)
    }
}

/// The `2k` residues `boundary-k+1 ..= boundary+k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lpr {
    pub key: LprKey,
    pub k: usize,
    pub residues: Vec<Residue>,
}

impl Lpr {
    pub fn boundary(&self) -> i32 {
        self.key.boundary
    }

    pub fn start(&self) -> i32 {
        self.key.boundary - self.k as i32 + 1
    }

    pub fn end(&self) -> i32 {
        self.key.boundary + self.k as i32
    }

    /// Number of fragments the window discretizes into.
    pub fn fragment_count(&self) -> usize {
        fragment_count(self.k)
    }
}

pub fn fragment_count(k: usize) -> usize {
    2 * k - (FRAGMENT_LEN - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tetrapeptide {
    /// Position of the parent LPR in the run's LPR list.
    pub lpr: usize,
    /// 1-based index within the LPR.
    pub index: usize,
    pub vertices: [Vector3<f64>; FRAGMENT_LEN],
}

/// Cut the LPR around internal endpoint `boundary` out of a validated entry.
pub fn extract_lpr(entry: &ValidatedEntry, boundary: i32, k: usize) -> Result<Lpr> {
    let pos = entry
        .endpoints
        .iter()
        .position(|&d| d == boundary)
        .ok_or_else(|| Error::NotAnEndpoint {
            structure_id: entry.structure_id.clone(),
            chain_id: entry.chain_id,
            boundary,
        })?;
    if pos + 1 == entry.endpoints.len() {
        return Err(Error::TerminalEndpoint { boundary });
    }
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let k_i = k as i32;
    let residues = (boundary - k_i + 1..=boundary + k_i)
        .map(|seq_pos| {
            entry
                .chain()
                .residue(seq_pos)
                .cloned()
                .ok_or(Error::MissingResidue { seq_pos })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Lpr {
        key: LprKey {
            structure_id: entry.structure_id.clone(),
            chain_id: entry.chain_id,
            boundary,
        },
        k,
        residues,
    })
}

/// Every LPR of an entry, in endpoint order.
pub fn extract_all(entry: &ValidatedEntry, k: usize) -> Result<Vec<Lpr>> {
    entry
        .internal_boundaries()
        .iter()
        .map(|&d| extract_lpr(entry, d, k))
        .collect()
}

/// Overlapping fragments `i..i+3` for `i = 1 ..= 2k-3`. `lpr` tags the
/// fragments with the parent's position in the caller's registry.
pub fn discretize_lpr(r: &Lpr, lpr: usize) -> Vec<Tetrapeptide> {
    r.residues
        .windows(FRAGMENT_LEN)
        .enumerate()
        .map(|(i, w)| Tetrapeptide {
            lpr,
            index: i + 1,
            vertices: [w[0].ca, w[1].ca, w[2].ca, w[3].ca],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure_io::{validate_entry, Chain, DomainDefinition, StructureModel};

    fn entry(len: i32, endpoints: Vec<i32>, k: usize) -> ValidatedEntry {
        let residues = (1..=len)
            .map(|i| Residue::new(i, Vector3::new(i as f64, (i * i) as f64, 0.0)))
            .collect();
        let s = StructureModel {
            id: "syn".into(),
            chains: vec![Chain {
                id: 'A',
                residues,
                gaps: vec![],
            }],
        };
        let d = DomainDefinition {
            structure_id: "syn".into(),
            chain_id: 'A',
            endpoints,
        };
        validate_entry(&s, &d, k).unwrap()
    }

    #[test]
    fn window_arithmetic() {
        let e = entry(200, vec![100, 200], 6);
        let r = extract_lpr(&e, 100, 6).unwrap();
        assert_eq!(r.residues.len(), 12);
        assert_eq!((r.start(), r.end()), (95, 106));
        assert_eq!(r.residues.first().unwrap().seq_pos, 95);
        assert_eq!(r.residues[5].seq_pos, 100);
        assert_eq!(r.residues.last().unwrap().seq_pos, 106);
    }

    #[test]
    fn lpr_counts() {
        assert_eq!(extract_all(&entry(200, vec![100, 200], 6), 6).unwrap().len(), 1);
        let four = entry(400, vec![100, 200, 300, 400], 6);
        let lprs = extract_all(&four, 6).unwrap();
        assert_eq!(
            lprs.iter().map(|l| l.boundary()).collect::<Vec<_>>(),
            vec![100, 200, 300]
        );
    }

    #[test]
    fn terminal_endpoint_rejected() {
        let e = entry(200, vec![100, 200], 6);
        assert_eq!(
            extract_lpr(&e, 200, 6),
            Err(Error::TerminalEndpoint { boundary: 200 })
        );
        assert!(matches!(
            extract_lpr(&e, 150, 6),
            Err(Error::NotAnEndpoint { .. })
        ));
    }

    #[test]
    fn discretization() {
        let e = entry(200, vec![100, 200], 6);
        let r = extract_lpr(&e, 100, 6).unwrap();
        let t = discretize_lpr(&r, 0);
        assert_eq!(t.len(), 9);
        assert_eq!(t[0].vertices[0], r.residues[0].ca);
        assert_eq!(t[0].vertices[3].x, 98.0);
        assert_eq!(t[8].vertices[0].x, 103.0);
        assert_eq!(t[8].vertices[3].x, 106.0);
        for pair in t.windows(2) {
            assert_eq!(pair[0].vertices[1..], pair[1].vertices[..3]);
        }

        let e = entry(20, vec![10, 20], 2);
        let r = extract_lpr(&e, 10, 2).unwrap();
        let t = discretize_lpr(&r, 3);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].lpr, 3);
        assert_eq!(t[0].vertices[0].x, 9.0);
        assert_eq!(t[0].vertices[3].x, 12.0);
    }

    #[test]
    fn overlapping_lprs_are_independent() {
        let e = entry(100, vec![40, 45, 100], 6);
        let lprs = extract_all(&e, 6).unwrap();
        assert_eq!(lprs.len(), 2);
        assert_eq!((lprs[1].start(), lprs[1].end()), (40, 51));
    }
}

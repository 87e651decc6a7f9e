//! Cα trace extraction from PDB files, domain-definition tables and entry
//! validation.
//!
//! Only `ATOM` records whose atom name is `CA` and whose residue name is one
//! of the twenty standard amino acids are retained. Parsing stops at the
//! first `ENDMDL`, so multi-model files contribute their first model only.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};

const STANDARD_RESIDUES: [&str; 20] = [
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE", "LEU", "LYS", "MET",
    "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    pub seq_pos: i32,
    pub insertion_code: Option<char>,
    pub ca: Vector3<f64>,
}

impl Residue {
    pub fn new(seq_pos: i32, ca: Vector3<f64>) -> Self {
        Residue {
            seq_pos,
            insertion_code: None,
            ca,
        }
    }

    fn key(&self) -> (i32, char) {
        (self.seq_pos, self.insertion_code.unwrap_or(' '))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub id: char,
    /// Ordered by `(seq_pos, insertion_code)`, blank insertion code first.
    pub residues: Vec<Residue>,
    /// Sequence positions without a Cα atom, ascending.
    pub gaps: Vec<i32>,
}

impl Chain {
    /// Residue at `seq_pos` without an insertion code.
    pub fn residue(&self, seq_pos: i32) -> Option<&Residue> {
        self.residues
            .binary_search_by_key(&(seq_pos, ' '), Residue::key)
            .ok()
            .map(|i| &self.residues[i])
    }

    /// Whether any residue at `seq_pos` carries an insertion code.
    pub fn has_insertion_at(&self, seq_pos: i32) -> bool {
        self.residues
            .iter()
            .any(|r| r.seq_pos == seq_pos && r.insertion_code.is_some())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureModel {
    pub id: String,
    pub chains: Vec<Chain>,
}

impl StructureModel {
    pub fn chain(&self, id: char) -> Option<&Chain> {
        self.chains.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDefinition {
    pub structure_id: String,
    pub chain_id: char,
    /// Domain endpoints, strictly increasing. The last one closes the chain.
    pub endpoints: Vec<i32>,
}

impl DomainDefinition {
    /// Endpoints that have an LPR, i.e. all but the last.
    pub fn internal_boundaries(&self) -> &[i32] {
        &self.endpoints[..self.endpoints.len().saturating_sub(1)]
    }
}

struct CaCandidate {
    altloc: char,
    occupancy: f64,
    ca: Vector3<f64>,
}

#[derive(Default)]
struct ChainBuilder {
    cas: BTreeMap<(i32, char), CaCandidate>,
    seen: HashSet<(i32, char)>,
}

fn column(line: &str, from: usize, to: usize) -> Option<&str> {
    let end = to.min(line.len());
    if from >= end {
        return Some("");
    }
    line.get(from..end)
}

fn parse_coord(line: &str, lineno: usize, from: usize, name: &str) -> Result<f64> {
    let raw = column(line, from, from + 8)
        .ok_or_else(|| Error::parse(lineno, format!("unreadable {name} field")))?
        .trim();
    let value: f64 = raw
        .parse()
        .map_err(|_| Error::parse(lineno, format!("malformed {name} coordinate {raw:?}")))?;
    if !value.is_finite() {
        return Err(Error::parse(lineno, format!("non-finite {name} coordinate")));
    }
    Ok(value)
}

/// Parse a PDB-format file into per-chain Cα traces.
pub fn parse_pdb(id: &str, text: &str) -> Result<StructureModel> {
    let mut order: Vec<char> = Vec::new();
    let mut builders: BTreeMap<char, ChainBuilder> = BTreeMap::new();
    let mut any_atom = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM  ") {
            continue;
        }
        any_atom = true;
        if !line.is_ascii() {
            return Err(Error::parse(lineno, "non-ASCII ATOM record"));
        }
        if line.len() < 54 {
            return Err(Error::parse(lineno, "ATOM record shorter than coordinate columns"));
        }
        let res_name = column(line, 17, 20).unwrap_or("").trim();
        if !STANDARD_RESIDUES.contains(&res_name) {
            continue;
        }
        let atom_name = column(line, 12, 16).unwrap_or("").trim();
        let altloc = line.as_bytes()[16] as char;
        let chain_id = line.as_bytes()[21] as char;
        let seq_raw = column(line, 22, 26).unwrap_or("").trim();
        let seq_pos: i32 = seq_raw
            .parse()
            .map_err(|_| Error::parse(lineno, format!("malformed residue number {seq_raw:?}")))?;
        let icode = line.as_bytes()[26] as char;
        let key = (seq_pos, icode);

        if !builders.contains_key(&chain_id) {
            order.push(chain_id);
        }
        let builder = builders.entry(chain_id).or_default();
        builder.seen.insert(key);
        if atom_name != "CA" {
            continue;
        }

        let ca = Vector3::new(
            parse_coord(line, lineno, 30, "x")?,
            parse_coord(line, lineno, 38, "y")?,
            parse_coord(line, lineno, 46, "z")?,
        );
        let occ_raw = column(line, 54, 60).unwrap_or("").trim();
        let occupancy = if occ_raw.is_empty() {
            1.0
        } else {
            occ_raw
                .parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("malformed occupancy {occ_raw:?}")))?
        };
        let candidate = CaCandidate {
            altloc,
            occupancy,
            ca,
        };
        match builder.cas.get(&key) {
            Some(existing)
                if existing.occupancy > candidate.occupancy
                    || (existing.occupancy == candidate.occupancy
                        && existing.altloc <= candidate.altloc) => {}
            _ => {
                builder.cas.insert(key, candidate);
            }
        }
    }

    if !any_atom {
        return Err(Error::NoAtomRecords);
    }

    let chains = order
        .into_iter()
        .map(|chain_id| {
            let builder = builders.remove(&chain_id).unwrap_or_default();
            let residues: Vec<Residue> = builder
                .cas
                .into_iter()
                .map(|((seq_pos, icode), c)| Residue {
                    seq_pos,
                    insertion_code: (icode != ' ').then_some(icode),
                    ca: c.ca,
                })
                .collect();
            let present: HashSet<i32> = residues.iter().map(|r| r.seq_pos).collect();
            let mut gaps: Vec<i32> = builder
                .seen
                .iter()
                .map(|&(pos, _)| pos)
                .filter(|pos| !present.contains(pos))
                .collect();
            if let (Some(first), Some(last)) = (residues.first(), residues.last()) {
                gaps.extend((first.seq_pos..=last.seq_pos).filter(|p| !present.contains(p)));
            }
            gaps.sort_unstable();
            gaps.dedup();
            Chain {
                id: chain_id,
                residues,
                gaps,
            }
        })
        .collect();

    Ok(StructureModel {
        id: id.to_string(),
        chains,
    })
}

const TRACE_HEADER: &str = "# linker-scout trace v1";

/// Serialize a model to the internal tab-separated trace format.
///
/// Coordinates use the shortest representation that round-trips exactly.
pub fn write_trace(model: &StructureModel) -> String {
    let mut out = String::new();
    out.push_str(TRACE_HEADER);
    out.push('\n');
    out.push_str(&format!("structure\t{}\n", model.id));
    for chain in &model.chains {
        out.push_str(&format!("chain\t{}\n", chain.id));
        for r in &chain.residues {
            out.push_str(&format!(
                "res\t{}\t{}\t{}\t{:?}\t{:?}\t{:?}\n",
                chain.id,
                r.seq_pos,
                r.insertion_code.unwrap_or('-'),
                r.ca.x,
                r.ca.y,
                r.ca.z
            ));
        }
        for g in &chain.gaps {
            out.push_str(&format!("gap\t{}\t{}\n", chain.id, g));
        }
    }
    out
}

/// Read a model previously written by [`write_trace`].
pub fn read_trace(text: &str) -> Result<StructureModel> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l == TRACE_HEADER => {}
        _ => return Err(Error::parse(1, "missing trace header")),
    }
    let mut id = None;
    let mut chains: Vec<Chain> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        let chain_char = |s: &str| -> Result<char> {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::parse(lineno, format!("bad chain id {s:?}"))),
            }
        };
        let current = |chains: &mut Vec<Chain>, c: char| -> Result<usize> {
            chains
                .iter()
                .position(|ch| ch.id == c)
                .ok_or_else(|| Error::parse(lineno, format!("undeclared chain {c:?}")))
        };
        let int = |s: &str| -> Result<i32> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad integer {s:?}")))
        };
        let float = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad number {s:?}")))
        };
        match fields.as_slice() {
            ["structure", name] => id = Some(name.to_string()),
            ["chain", c] => chains.push(Chain {
                id: chain_char(c)?,
                residues: Vec::new(),
                gaps: Vec::new(),
            }),
            ["res", c, pos, icode, x, y, z] => {
                let i = current(&mut chains, chain_char(c)?)?;
                let icode = chain_char(icode)?;
                chains[i].residues.push(Residue {
                    seq_pos: int(pos)?,
                    insertion_code: (icode != '-').then_some(icode),
                    ca: Vector3::new(float(x)?, float(y)?, float(z)?),
                });
            }
            ["gap", c, pos] => {
                let i = current(&mut chains, chain_char(c)?)?;
                chains[i].gaps.push(int(pos)?);
            }
            [""] => {}
            _ => return Err(Error::parse(lineno, "unrecognized trace record")),
        }
    }
    let id = id.ok_or_else(|| Error::parse(1, "missing structure line"))?;
    Ok(StructureModel { id, chains })
}

/// Parse a domain-definition table: `structure_id  chain_id  d1,d2,...,de`.
///
/// Fields are separated by tabs (any run of whitespace is accepted). Lines
/// starting with `#` and blank lines are skipped. Row numbers in errors are
/// 1-based line numbers.
pub fn parse_domain_definitions(text: &str) -> Result<Vec<DomainDefinition>> {
    let mut out = Vec::new();
    let mut keys = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::DomainTable { row, message };
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let [structure_id, chain, endpoints] = fields.as_slice() else {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        };
        let mut chars = chain.chars();
        let chain_id = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return Err(err(format!("chain id must be one character, got {chain:?}"))),
        };
        let endpoints = endpoints
            .split(',')
            .map(|e| {
                e.trim()
                    .parse::<i32>()
                    .map_err(|_| err(format!("non-integer endpoint {e:?}")))
            })
            .collect::<Result<Vec<i32>>>()?;
        if endpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(err(format!("endpoints not strictly increasing: {endpoints:?}")));
        }
        if endpoints.len() < 2 {
            return Err(err("at least two domains are required".into()));
        }
        if !keys.insert((structure_id.to_string(), chain_id)) {
            return Err(err(format!("duplicate entry for {structure_id}:{chain_id}")));
        }
        out.push(DomainDefinition {
            structure_id: structure_id.to_string(),
            chain_id,
            endpoints,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    ChainNotFound { chain_id: char },
    MissingResidue { boundary: i32, seq_pos: i32 },
    InsertionCode { boundary: i32, seq_pos: i32 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::ChainNotFound { chain_id } => write!(f, "chain not found: {chain_id}"),
            Rejection::MissingResidue { boundary, seq_pos } => write!(
                f,
                "LPR window at boundary {boundary} spans a gap (residue {seq_pos} missing)"
            ),
            Rejection::InsertionCode { boundary, seq_pos } => write!(
                f,
                "LPR window at boundary {boundary} contains insertion code at residue {seq_pos}"
            ),
        }
    }
}

/// An entry whose every LPR window is fully resolvable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedEntry {
    pub structure_id: String,
    pub chain_id: char,
    pub endpoints: Vec<i32>,
    pub k: usize,
    chain: Chain,
}

impl ValidatedEntry {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn internal_boundaries(&self) -> &[i32] {
        &self.endpoints[..self.endpoints.len() - 1]
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.structure_id, self.chain_id)
    }
}

/// Accept an entry iff every window `d-k+1 ..= d+k` around an internal
/// endpoint is present without gaps or insertion codes.
pub fn validate_entry(
    s: &StructureModel,
    d: &DomainDefinition,
    k: usize,
) -> std::result::Result<ValidatedEntry, Rejection> {
    let chain = s.chain(d.chain_id).ok_or(Rejection::ChainNotFound {
        chain_id: d.chain_id,
    })?;
    let k = k as i32;
    for &boundary in d.internal_boundaries() {
        for seq_pos in boundary - k + 1..=boundary + k {
            if chain.has_insertion_at(seq_pos) {
                return Err(Rejection::InsertionCode { boundary, seq_pos });
            }
            if chain.residue(seq_pos).is_none() {
                return Err(Rejection::MissingResidue { boundary, seq_pos });
            }
        }
    }
    Ok(ValidatedEntry {
        structure_id: d.structure_id.clone(),
        chain_id: d.chain_id,
        endpoints: d.endpoints.clone(),
        k: k as usize,
        chain: chain.clone(),
    })
}

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use linker_scout_core::structure_io::{
    parse_domain_definitions, parse_pdb, validate_entry, DomainDefinition, Rejection, StructureModel,
    ValidatedEntry,
};

/// Structure files in a directory, keyed by lowercase file name.
pub struct PdbDir {
    files: HashMap<String, PathBuf>,
}

impl PdbDir {
    pub fn open(dir: &Path) -> Result<Self> {
        let mut files = HashMap::new();
        for item in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
            let path = item?.path();
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                files.insert(name.to_ascii_lowercase(), path);
            }
        }
        Ok(PdbDir { files })
    }

    /// `<id>.pdb`, `<id>.ent` or `pdb<id>.ent`, case-insensitively.
    pub fn find(&self, id: &str) -> Option<&Path> {
        let id = id.to_ascii_lowercase();
        [format!("{id}.pdb"), format!("{id}.ent"), format!("pdb{id}.ent")]
            .iter()
            .find_map(|name| self.files.get(name))
            .map(PathBuf::as_path)
    }
}

pub struct Loaded {
    pub entries: Vec<ValidatedEntry>,
    pub rejected: Vec<(DomainDefinition, Rejection)>,
}

pub fn read_domains(path: &Path) -> Result<Vec<DomainDefinition>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_domain_definitions(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Parse every structure named in `domains` and validate its windows.
/// Unreadable or malformed files are hard errors; window problems become
/// rejections.
pub fn load(pdb_dir: &Path, domains: &Path, k: usize) -> Result<Loaded> {
    let defs = read_domains(domains)?;
    let dir = PdbDir::open(pdb_dir)?;
    let mut models: HashMap<String, StructureModel> = HashMap::new();
    let mut entries = Vec::new();
    let mut rejected = Vec::new();
    for d in defs {
        if !models.contains_key(&d.structure_id) {
            let Some(path) = dir.find(&d.structure_id) else {
                bail!("no structure file for {} in {}", d.structure_id, pdb_dir.display());
            };
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let model = parse_pdb(&d.structure_id, &text)
                .with_context(|| format!("parsing {}", path.display()))?;
            models.insert(d.structure_id.clone(), model);
        }
        match validate_entry(&models[&d.structure_id], &d, k) {
            Ok(e) => entries.push(e),
            Err(r) => rejected.push((d, r)),
        }
    }
    Ok(Loaded { entries, rejected })
}

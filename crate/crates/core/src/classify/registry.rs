//! Sets of class representatives keyed by certificate, with a directory
//! layout on disk.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::canonical::Flavor;
use crate::collection::Collection;
use crate::error::{usage, Error, Result};

pub const REGISTRY_FORMAT: &str = "perfcodes-registry/1";

#[derive(Clone, Debug, PartialEq)]
pub struct ClassEntry {
    pub digest: [u8; 32],
    pub aut_order: BigUint,
    pub type_vector: Vec<u8>,
    pub counts: BTreeMap<String, u64>,
    pub rep: Collection,
}

impl ClassEntry {
    pub fn hex(&self) -> String {
        hex::encode(self.digest)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassRegistry {
    flavor: Flavor,
    entries: Vec<ClassEntry>,
}

#[derive(Serialize, Deserialize)]
struct IndexRow {
    digest: String,
    aut_order: String,
    type_vector: Vec<u8>,
    counts: BTreeMap<String, u64>,
    file: String,
}

#[derive(Serialize, Deserialize)]
struct Index {
    format: String,
    flavor: String,
    classes: Vec<IndexRow>,
}

impl ClassRegistry {
    pub fn new(flavor: Flavor) -> Self {
        Self {
            flavor,
            entries: Vec::new(),
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn entries(&self) -> &[ClassEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn position(&self, digest: &[u8; 32]) -> Option<usize> {
        self.entries.iter().position(|e| &e.digest == digest)
    }

    /// Adds a class; a certificate already present is an error.
    pub fn insert(&mut self, entry: ClassEntry) -> Result<()> {
        if self.position(&entry.digest).is_some() {
            return Err(usage!("class {} registered twice", entry.hex()));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Writes `index.json` and one representative file per class.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut classes = Vec::new();
        for e in &self.entries {
            let file = format!("{}.txt", e.hex());
            fs::write(dir.join(&file), e.rep.to_text())?;
            classes.push(IndexRow {
                digest: e.hex(),
                aut_order: e.aut_order.to_string(),
                type_vector: e.type_vector.clone(),
                counts: e.counts.clone(),
                file,
            });
        }
        let index = Index {
            format: REGISTRY_FORMAT.to_string(),
            flavor: self.flavor.to_string(),
            classes,
        };
        fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)? + "\n")?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let index: Index = serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
        if index.format != REGISTRY_FORMAT {
            return Err(Error::Parse(format!("unknown registry format {:?}", index.format)));
        }
        let mut reg = ClassRegistry::new(index.flavor.parse()?);
        for row in index.classes {
            let mut digest = [0u8; 32];
            hex::decode_to_slice(&row.digest, &mut digest)
                .map_err(|_| Error::Parse(format!("bad digest {:?}", row.digest)))?;
            let aut_order = row
                .aut_order
                .parse()
                .map_err(|_| Error::Parse(format!("bad automorphism order {:?}", row.aut_order)))?;
            let rep = Collection::from_text(&fs::read_to_string(dir.join(&row.file))?)?;
            reg.insert(ClassEntry {
                digest,
                aut_order,
                type_vector: row.type_vector,
                counts: row.counts,
                rep,
            })
            .map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(reg)
    }
}

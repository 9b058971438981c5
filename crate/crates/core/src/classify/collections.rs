//! Collections of pairwise disjoint RM-like subcodes of `M`, classified
//! one block at a time.
//!
//! For each representative prefix, the continuations by a code of a given
//! class are split into orbits of the prefix's automorphism group (strong
//! equivalence); the orbit representatives are then merged across prefixes
//! by full certificates.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partial::LEN;
use super::mcanon::MCollectionCanon;
use super::registry::{ClassEntry, ClassRegistry};
use super::rmlike::{full_index, m_index, m_table, ClassOrbit, MSet, RmLikeClassification, M_SIZE};
use crate::canonical::{certify_collection, Flavor};
use crate::collection::Collection;
use crate::error::{invariant, usage, Result};
use crate::gf3::{pack, Code};
use crate::linalg::EchelonBasis;
use crate::perfect::{is_rm_like, parity_code};

#[derive(Clone, Debug, Default)]
pub struct CollectionOptions {
    /// Largest class index allowed for the new block.
    pub max_type: Option<u8>,
    /// Where strong-equivalence batches are stored and resumed from.
    pub checkpoint_dir: Option<PathBuf>,
}

/// One representative continuation of a prefix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrongRep {
    pub class: u8,
    /// Point indices of the new block.
    pub words: Vec<u32>,
    /// Number of continuations strongly equivalent to it.
    pub orbit: u64,
}

#[derive(Serialize, Deserialize)]
struct Batch {
    prefix: String,
    max_type: u8,
    reps: Vec<StrongRep>,
}

/// Classes of 1-collections, one per RM-like class.
pub fn collections_k1(rm: &RmLikeClassification, canon: &MCollectionCanon) -> Result<ClassRegistry> {
    let mut reg = ClassRegistry::new(Flavor::Full);
    for (t, e) in rm.registry.entries().iter().enumerate() {
        let cert = canon.certify(&e.rep, false)?;
        if cert.aut_order != e.aut_order {
            return Err(invariant!("class {t}: normal form and graph certificate disagree on automorphisms"));
        }
        reg.insert(ClassEntry {
            digest: cert.digest,
            aut_order: cert.aut_order,
            type_vector: vec![t as u8],
            counts: BTreeMap::new(),
            rep: e.rep.clone(),
        })?;
    }
    Ok(reg)
}

/// Translations by words of `M` that permute the blocks.
fn translation_basis(blocks: &[MSet], members: &[Vec<u16>]) -> EchelonBasis {
    let mut basis = EchelonBasis::new();
    for v in 1..M_SIZE as u16 {
        let pv = pack(v as u32);
        if basis.contains(pv) {
            continue;
        }
        let ok = members.iter().all(|b| {
            let first = crate::gf3::unpack(crate::gf3::padd(pack(b[0] as u32), pv)) as u16;
            let Some(target) = blocks.iter().position(|s| s.contains(first)) else {
                return false;
            };
            b.iter()
                .all(|&x| blocks[target].contains(crate::gf3::unpack(crate::gf3::padd(pack(x as u32), pv)) as u16))
        });
        if ok {
            basis.insert(pv);
        }
    }
    basis
}

fn checkpoint_path(dir: &Path, prefix: &ClassEntry) -> PathBuf {
    dir.join(format!("step1-{}.json", prefix.hex()))
}

/// Strong-equivalence representatives of the continuations of `prefix` by
/// codes of classes from its last type up to `max_type`.
pub fn strong_continuations(
    prefix: &ClassEntry,
    canon: &MCollectionCanon,
    orbits: &[ClassOrbit],
    max_type: u8,
) -> Result<Vec<StrongRep>> {
    let tables: Vec<Vec<u16>> = if prefix.rep.k() == 1 {
        canon.class_generators(prefix.type_vector[0]).to_vec()
    } else {
        let cert = certify_collection(&prefix.rep, Flavor::Full)?;
        cert.aut_generators.iter().map(m_table).collect::<Result<_>>()?
    };
    let members: Vec<Vec<u16>> = prefix
        .rep
        .blocks()
        .iter()
        .map(|b| b.iter().map(m_index).collect())
        .collect();
    let sets: Vec<MSet> = prefix.rep.blocks().iter().map(MSet::from_code).collect::<Result<_>>()?;
    let mut avoid = MSet::empty();
    for s in &sets {
        avoid.union_with(s);
    }
    let shifts = translation_basis(&sets, &members);
    let first = *prefix.type_vector.last().ok_or_else(|| usage!("empty prefix"))?;
    let mut out = Vec::new();
    for t in first..=max_type.min(orbits.len() as u8 - 1) {
        let orbit = &orbits[t as usize];
        let mut seen: HashSet<(usize, u16)> = HashSet::new();
        let mut fresh: Vec<(usize, u16)> = Vec::new();
        orbit.for_each_translate(
            &avoid,
            |v| shifts.reduce(pack(v as u32)) == pack(v as u32),
            |e, v| fresh.push((e, v)),
        );
        for (e, v) in fresh {
            let code: Vec<u16> = orbit.translate(e, v);
            let key = orbit.key_of(&code).ok_or_else(|| invariant!("continuation left its class"))?;
            if seen.contains(&key) {
                continue;
            }
            seen.insert(key);
            let mut size = 1u64;
            let mut stack = vec![code.clone()];
            while let Some(d) = stack.pop() {
                for tab in &tables {
                    let img: Vec<u16> = d.iter().map(|&x| tab[x as usize]).collect();
                    let k = orbit.key_of(&img).ok_or_else(|| invariant!("automorphism image left its class"))?;
                    if seen.insert(k) {
                        size += 1;
                        stack.push(img);
                    }
                }
            }
            let mut words: Vec<u32> = code.iter().map(|&x| full_index(x)).collect();
            words.sort_unstable();
            out.push(StrongRep {
                class: t,
                words,
                orbit: size,
            });
        }
    }
    Ok(out)
}

fn load_batch(path: &Path, max_type: u8) -> Result<Option<Vec<StrongRep>>> {
    if !path.exists() {
        return Ok(None);
    }
    let b: Batch = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok((b.max_type == max_type).then_some(b.reps))
}

fn step_one(
    prefix: &ClassEntry,
    canon: &MCollectionCanon,
    orbits: &[ClassOrbit],
    max_type: u8,
    dir: Option<&Path>,
) -> Result<Vec<StrongRep>> {
    if let Some(dir) = dir {
        if let Some(reps) = load_batch(&checkpoint_path(dir, prefix), max_type)? {
            return Ok(reps);
        }
    }
    let reps = strong_continuations(prefix, canon, orbits, max_type)?;
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        let batch = Batch {
            prefix: prefix.hex(),
            max_type,
            reps: reps.clone(),
        };
        let path = checkpoint_path(dir, prefix);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string(&batch)?)?;
        fs::rename(tmp, path)?;
    }
    Ok(reps)
}

/// Classes of `(k+1)`-collections of sorted type continuing the classes of
/// `prev` (the `k`-collections).
pub fn classify_collections(
    rm: &RmLikeClassification,
    canon: &MCollectionCanon,
    orbits: &[ClassOrbit],
    prev: &ClassRegistry,
    opts: &CollectionOptions,
) -> Result<ClassRegistry> {
    if orbits.len() != rm.num_classes() {
        return Err(usage!("need one orbit per RM-like class"));
    }
    let max_type = opts.max_type.unwrap_or(orbits.len() as u8 - 1);
    let dir = opts.checkpoint_dir.as_deref();
    let batches: Vec<Vec<StrongRep>> = prev
        .entries()
        .par_iter()
        .map(|p| step_one(p, canon, orbits, max_type, dir))
        .collect::<Result<_>>()?;

    let host = parity_code(LEN);
    let mut reg = ClassRegistry::new(Flavor::Full);
    for (prefix, reps) in prev.entries().iter().zip(batches) {
        let aut = &prefix.aut_order;
        for r in reps {
            let mut blocks = prefix.rep.blocks().to_vec();
            blocks.push(Code::from_indices(LEN, r.words.iter().copied()));
            let col = Collection::new(LEN, blocks)?;
            let strong = canon.certify(&col, true)?;
            if strong.aut_order.clone() * BigUint::from(r.orbit) != *aut {
                return Err(invariant!(
                    "continuation orbit {} times stabilizer {} differs from prefix group {}",
                    r.orbit,
                    strong.aut_order,
                    aut
                ));
            }
            let cert = canon.certify(&col, false)?;
            if reg.position(&cert.digest).is_none() {
                if !is_rm_like(col.block(col.k() - 1), &host)? {
                    return Err(invariant!("continuation block is not RM-like"));
                }
                let mut tv = prefix.type_vector.clone();
                tv.push(r.class);
                reg.insert(ClassEntry {
                    digest: cert.digest,
                    aut_order: cert.aut_order,
                    type_vector: tv,
                    counts: BTreeMap::new(),
                    rep: col,
                })?;
            }
        }
    }
    Ok(reg)
}

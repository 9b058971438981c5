//! 1-perfect codes of length 4 and the partitions of `F_3^4` into them.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::registry::{ClassEntry, ClassRegistry};
use crate::canonical::{certify_code, certify_collection, Flavor};
use crate::collection::Collection;
use crate::error::{invariant, Result};
use crate::exactcover::{all_solutions, CoverInstance};
use crate::gf3::{num_points, pack, packed_of_weight, padd, unpack, Code};
use crate::linalg::{hamming_code, kernel};
use crate::perfect::is_1perfect;

const N: usize = 4;

/// Order of the automorphism group of `H(4,3)`: `4! * 6^4`.
pub const HAMMING_GRAPH_AUT: u64 = 31_104;

/// All 1-perfect codes in `F_3^4`, as exact covers of the points by balls.
pub fn perfect_codes_len4() -> Result<Vec<Code>> {
    let units = packed_of_weight(N, 1);
    let mut inst = CoverInstance::new(num_points(N));
    for x in 0..num_points(N) as u32 {
        let mut ball = vec![x as usize];
        ball.extend(units.iter().map(|&u| unpack(padd(pack(x), u)) as usize));
        inst.add_row(x as usize, ball)?;
    }
    let codes: Vec<Code> = all_solutions(&inst)
        .into_iter()
        .map(|s| Code::from_indices(N, s.into_iter().map(|i| i as u32)))
        .collect();
    if let Some(c) = codes.iter().find(|c| !is_1perfect(c)) {
        return Err(invariant!("exact cover of balls gave a non-perfect code {c:?}"));
    }
    Ok(codes)
}

/// All partitions of `F_3^4` into 1-perfect codes, blocks ordered by least
/// word.
pub fn perfect_partitions_len4(codes: &[Code]) -> Result<Vec<Collection>> {
    let mut inst = CoverInstance::new(num_points(N));
    for (j, c) in codes.iter().enumerate() {
        inst.add_row(j, c.iter().map(|i| i as usize).collect())?;
    }
    all_solutions(&inst)
        .into_iter()
        .map(|s| {
            let mut blocks: Vec<Code> = s.into_iter().map(|j| codes[j].clone()).collect();
            blocks.sort_by_key(|b| b.first());
            Collection::new(N, blocks)
        })
        .collect()
}

/// For each linear code, keyed by its points, the number of blocks that
/// are its cosets.
pub fn distinct_linear_parts(p: &Collection) -> Result<BTreeMap<Vec<u32>, usize>> {
    let mut out = BTreeMap::new();
    for b in p.blocks() {
        let k = kernel(b)?;
        if k.rank != 2 {
            return Err(invariant!("a perfect code of length 4 is not a Hamming coset"));
        }
        *out.entry(k.points().indices()).or_insert(0) += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct P4Classification {
    pub codes: usize,
    pub partitions: usize,
    /// One entry per class, largest automorphism group first; `counts`
    /// holds the class size under `"partitions"`.
    pub registry: ClassRegistry,
}

/// Classifies the partitions of `F_3^4` into 1-perfect codes up to
/// isometry and block reordering.
pub fn classify_p4_partitions() -> Result<P4Classification> {
    let codes = perfect_codes_len4()?;
    let ham = certify_code(&hamming_code(2)?, Flavor::Full)?;
    for c in &codes {
        if certify_code(c, Flavor::Full)?.digest != ham.digest {
            return Err(invariant!("a perfect code of length 4 is not equivalent to the Hamming code"));
        }
    }
    let parts = perfect_partitions_len4(&codes)?;
    let mut classes: Vec<(ClassEntry, u64)> = Vec::new();
    for p in &parts {
        if !p.is_partition_of(&Code::full(N)) {
            return Err(invariant!("exact cover did not give a partition"));
        }
        let cert = certify_collection(p, Flavor::Full)?;
        match classes.iter_mut().find(|(e, _)| e.digest == cert.digest) {
            Some((_, n)) => *n += 1,
            None => classes.push((
                ClassEntry {
                    digest: cert.digest,
                    aut_order: cert.aut_order,
                    type_vector: Vec::new(),
                    counts: BTreeMap::new(),
                    rep: p.clone(),
                },
                1,
            )),
        }
    }
    classes.sort_by(|a, b| b.0.aut_order.cmp(&a.0.aut_order).then(a.0.digest.cmp(&b.0.digest)));
    let mut registry = ClassRegistry::new(Flavor::Full);
    for (mut e, n) in classes {
        if e.aut_order.clone() * BigUint::from(n) != BigUint::from(HAMMING_GRAPH_AUT) {
            return Err(invariant!("class of {n} partitions has automorphism order {}", e.aut_order));
        }
        e.counts.insert("partitions".into(), n);
        registry.insert(e)?;
    }
    Ok(P4Classification {
        codes: codes.len(),
        partitions: parts.len(),
        registry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventy_two_codes() {
        let codes = perfect_codes_len4().unwrap();
        assert_eq!(codes.len(), 72);
        // each code is a coset of one of the 8 linear ones
        let mut kernels: Vec<Vec<u32>> = codes.iter().map(|c| kernel(c).unwrap().points().indices()).collect();
        kernels.sort();
        kernels.dedup();
        assert_eq!(kernels.len(), 8);
    }
}

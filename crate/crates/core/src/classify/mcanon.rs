//! Canonical forms of collections of RM-like subcodes of `M`.
//!
//! Every isometry between two such collections preserves `M`: each full
//! class of RM-like codes meets `M` in a single orbit of the stabilizer of
//! `M`, and the automorphisms of the representatives preserve `M`. So a
//! collection is put in normal form by moving an anchor block onto its
//! class representative `R` and taking the least image of the remaining
//! blocks under `Aut(R)`, minimised over the anchors.
//!
//! Keys name codes through the stored orbits, so certificates are only
//! comparable between runs that use the same RM-like representatives.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use super::partial::LEN;
use super::rmlike::{full_index, m_index, m_table, ClassOrbit, RmLikeClassification};
use crate::canonical::{certify_code, Flavor};
use crate::collection::Collection;
use crate::error::{invariant, usage, Result};
use crate::permgroup::{closure, Perm, PermGroup};

/// A code of a stored orbit: class, zero member, least `M`-index.
pub type BlockKey = (u8, u32, u16);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MCertificate {
    pub digest: [u8; 32],
    pub aut_order: BigUint,
    /// Block classes in increasing order.
    pub types: Vec<u8>,
    /// Number of isometries of `M` mapping the anchor onto its
    /// representative and the rest onto the normal form, counted per
    /// optimal anchor.
    pub orbit: u64,
}

pub struct MCollectionCanon<'a> {
    orbits: &'a [ClassOrbit],
    gens: Vec<Vec<Vec<u16>>>,
    orders: Vec<BigUint>,
}

impl<'a> MCollectionCanon<'a> {
    pub fn new(rm: &RmLikeClassification, orbits: &'a [ClassOrbit]) -> Result<Self> {
        if orbits.len() != rm.num_classes() {
            return Err(usage!("need one orbit per RM-like class"));
        }
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for t in 0..rm.num_classes() {
            let cert = certify_code(rm.rep(t), Flavor::Full)?;
            gens.push(cert.aut_generators.iter().map(m_table).collect::<Result<Vec<_>>>()?);
            orders.push(cert.aut_order);
        }
        Ok(Self { orbits, gens, orders })
    }

    pub fn class_aut_order(&self, t: u8) -> &BigUint {
        &self.orders[t as usize]
    }

    /// Automorphisms of the representative of class `t` on `M`-indices.
    pub fn class_generators(&self, t: u8) -> &[Vec<u16>] {
        &self.gens[t as usize]
    }

    pub fn key(&self, members: &[u16]) -> Result<BlockKey> {
        for (t, o) in self.orbits.iter().enumerate() {
            if let Some((e, v)) = o.key_of(members) {
                return Ok((t as u8, e as u32, v));
            }
        }
        Err(usage!("block is not an RM-like subcode of the parity code"))
    }

    pub fn members(&self, k: BlockKey) -> Vec<u16> {
        self.orbits[k.0 as usize].translate(k.1 as usize, k.2)
    }

    /// Keys of the images of `blocks`, unsorted.
    fn images(&self, blocks: &[Vec<u16>], table: &[u16]) -> Result<Vec<BlockKey>> {
        blocks
            .iter()
            .map(|b| {
                let img: Vec<u16> = b.iter().map(|&x| table[x as usize]).collect();
                self.key(&img)
            })
            .collect()
    }

    /// Orbit of a sorted set of blocks under `Aut(R_t)`. For every orbit
    /// element `x` reached by `u`, `track[x][i]` is the position in `x` of
    /// the image of `start[i]` under `u`. With `schreier`, also returns the
    /// block permutations of `start` induced by the Schreier generators of
    /// its stabilizer.
    fn explore(&self, t: u8, start: Vec<BlockKey>, schreier: bool) -> Result<Explored> {
        let gens = &self.gens[t as usize];
        let ident: Vec<u8> = (0..start.len() as u8).collect();
        let mut track: HashMap<Vec<BlockKey>, Vec<u8>> = HashMap::new();
        track.insert(start.clone(), ident);
        let mut perms: HashSet<Vec<u8>> = HashSet::new();
        let mut best = start.clone();
        let mut stack = vec![start];
        while let Some(cur) = stack.pop() {
            let blocks: Vec<Vec<u16>> = cur.iter().map(|&k| self.members(k)).collect();
            let pi_x = track[&cur].clone();
            for g in gens {
                let img = self.images(&blocks, g)?;
                let mut sorted = img.clone();
                sorted.sort_unstable();
                let pos: Vec<u8> = img
                    .iter()
                    .map(|k| sorted.binary_search(k).map(|p| p as u8).map_err(|_| invariant!("lost block")))
                    .collect::<Result<_>>()?;
                let through: Vec<u8> = pi_x.iter().map(|&q| pos[q as usize]).collect();
                match track.get(&sorted) {
                    Some(pi_y) => {
                        if schreier {
                            let mut inv = vec![0u8; pi_y.len()];
                            for (i, &q) in pi_y.iter().enumerate() {
                                inv[q as usize] = i as u8;
                            }
                            perms.insert(through.iter().map(|&q| inv[q as usize]).collect());
                        }
                    }
                    None => {
                        if sorted < best {
                            best = sorted.clone();
                        }
                        track.insert(sorted.clone(), through);
                        stack.push(sorted);
                    }
                }
            }
        }
        let best_track = track[&best].clone();
        Ok(Explored {
            size: track.len() as u64,
            best,
            best_track,
            schreier: perms.into_iter().collect(),
        })
    }

    /// Normal form with the anchor at block `j`: the original indices of
    /// the other blocks in start order, and the exploration.
    fn anchored(&self, blocks: &[Vec<u16>], keys: &[BlockKey], j: usize, schreier: bool) -> Result<(Vec<usize>, Explored)> {
        let (t, e, v) = keys[j];
        let h = self.orbits[t as usize].to_rep_table(e as usize, v)?;
        let anchor_img = self.images(&blocks[j..=j], &h)?;
        if anchor_img[0].0 != t || anchor_img[0].2 != 0 {
            return Err(invariant!("anchor was not moved onto its representative"));
        }
        let others: Vec<usize> = (0..blocks.len()).filter(|&i| i != j).collect();
        let rest: Vec<Vec<u16>> = others.iter().map(|&i| blocks[i].clone()).collect();
        let img = self.images(&rest, &h)?;
        let mut order: Vec<usize> = (0..img.len()).collect();
        order.sort_unstable_by_key(|&i| img[i]);
        let start: Vec<BlockKey> = order.iter().map(|&i| img[i]).collect();
        let orig: Vec<usize> = order.iter().map(|&i| others[i]).collect();
        Ok((orig, self.explore(t, start, schreier)?))
    }

    /// Certificate of a collection of RM-like subcodes of `M` under
    /// isometries with block reordering; with `strong` the last block must
    /// stay last.
    pub fn certify(&self, col: &Collection, strong: bool) -> Result<MCertificate> {
        Ok(self.run(col, strong, false)?.0)
    }

    /// Certificate of a collection and the group of block permutations
    /// induced by its automorphisms.
    pub fn certify_with_blocks(&self, col: &Collection) -> Result<(MCertificate, PermGroup)> {
        let (cert, group) = self.run(col, false, true)?;
        Ok((cert, group.ok_or_else(|| invariant!("block group not computed"))?))
    }

    fn run(&self, col: &Collection, strong: bool, with_blocks: bool) -> Result<(MCertificate, Option<PermGroup>)> {
        if col.n() != LEN || col.k() == 0 {
            return Err(usage!("expected a nonempty collection of length-9 codes"));
        }
        let blocks: Vec<Vec<u16>> = col
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|i| {
                        let mi = m_index(i);
                        if full_index(mi) != i {
                            return Err(usage!("word {i} lies outside the parity code"));
                        }
                        Ok(mi)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let keys: Vec<BlockKey> = blocks.iter().map(|b| self.key(b)).collect::<Result<_>>()?;
        let k = keys.len();
        let anchors: Vec<usize> = if strong {
            vec![k - 1]
        } else {
            let top = keys.iter().map(|x| x.0).max().unwrap_or(0);
            (0..k).filter(|&j| keys[j].0 == top).collect()
        };
        // (anchor, original indices in start order, exploration) per optimal anchor
        let mut best: Vec<(usize, Vec<usize>, Explored)> = Vec::new();
        for j in anchors {
            let (orig, ex) = self.anchored(&blocks, &keys, j, with_blocks)?;
            let ord = match best.first() {
                None => std::cmp::Ordering::Less,
                Some((bj, _, bx)) => (keys[j].0, &ex.best).cmp(&(keys[*bj].0, &bx.best)),
            };
            match ord {
                std::cmp::Ordering::Less => best = vec![(j, orig, ex)],
                std::cmp::Ordering::Equal => best.push((j, orig, ex)),
                std::cmp::Ordering::Greater => {}
            }
        }
        let (j0, orig0, ex0) = &best[0];
        let t = keys[*j0].0;
        let size = ex0.size;
        let hits = best.len() as u64;
        let num = BigUint::from(hits) * &self.orders[t as usize];
        if !(&num % size).is_zero() {
            return Err(invariant!("orbit of size {size} does not divide the anchor group"));
        }
        let mut hasher = Sha256::new();
        hasher.update(b"perfcodes-m-collection/1\0");
        hasher.update([strong as u8, k as u8, t]);
        for (ft, fe, fv) in &ex0.best {
            hasher.update([*ft]);
            hasher.update(fe.to_le_bytes());
            hasher.update(fv.to_le_bytes());
        }
        let mut types: Vec<u8> = keys.iter().map(|x| x.0).collect();
        types.sort_unstable();
        let cert = MCertificate {
            digest: hasher.finalize().into(),
            aut_order: num / size,
            types,
            orbit: size,
        };
        if !with_blocks {
            return Ok((cert, None));
        }
        let mut gens: Vec<Perm> = Vec::new();
        for s in &ex0.schreier {
            let mut img: Vec<u8> = (0..k as u8).collect();
            for (i, &q) in s.iter().enumerate() {
                img[orig0[i]] = orig0[q as usize] as u8;
            }
            gens.push(Perm::new(img)?);
        }
        for (j1, orig1, ex1) in &best[1..] {
            // both anchors reach the same normal form; match blocks through it
            let mut at_form = vec![0usize; k - 1];
            for (i, &q) in ex1.best_track.iter().enumerate() {
                at_form[q as usize] = orig1[i];
            }
            let mut img: Vec<u8> = (0..k as u8).collect();
            img[*j0] = *j1 as u8;
            for (i, &q) in ex0.best_track.iter().enumerate() {
                img[orig0[i]] = at_form[q as usize] as u8;
            }
            gens.push(Perm::new(img)?);
        }
        let group = closure(k, &gens)?;
        if !(&cert.aut_order % BigUint::from(group.order())).is_zero() {
            return Err(invariant!("block group order {} does not divide {}", group.order(), cert.aut_order));
        }
        Ok((cert, Some(group)))
    }
}

struct Explored {
    size: u64,
    best: Vec<BlockKey>,
    best_track: Vec<u8>,
    schreier: Vec<Vec<u8>>,
}

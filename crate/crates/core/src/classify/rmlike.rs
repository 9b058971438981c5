//! RM-like `(9, 3^6, 3)` subcodes of the parity code `M` and their orbits
//! under the stabilizer of `M`.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;

use super::partial::{classify_closed, next_level, PartialClass, PartialCode, LEN, PARITY_MONOMIAL_ORDER};
use super::registry::{ClassEntry, ClassRegistry};
use crate::canonical::{certify_code, CanonicalCertificate, Flavor};
use crate::collection::Collection;
use crate::error::{invariant, usage, Result};
use crate::gf3::{pack, padd, Code, Isometry, TernaryWord, POW3};
use crate::perfect::{is_rm_like, parity_code};

/// Number of words of `M`.
pub const M_SIZE: usize = 6561;
/// Number of words of an RM-like code of length 9.
pub const RM_SIZE: usize = 729;
const M_WORDS64: usize = M_SIZE.div_ceil(64);

/// Number of RM-like subcodes of `M`.
pub const RM_LIKE_IN_M: u64 = 1_428_840;
/// Number of RM-like subcodes of `M` containing 0.
pub const RM_LIKE_WITH_ZERO: u64 = 158_760;

/// Index of a word of `M` among the words of `M`: the point index of its
/// first eight coordinates. Addition in `M` is addition of these prefixes.
#[inline]
pub fn m_index(idx: u32) -> u16 {
    (idx % M_SIZE as u32) as u16
}

/// Point index of the word of `M` with the given `M`-index.
#[inline]
pub fn full_index(mi: u16) -> u32 {
    let mut s = 0u32;
    let mut x = mi as u32;
    while x > 0 {
        s += x % 3;
        x /= 3;
    }
    mi as u32 + ((3 - s % 3) % 3) * POW3[8]
}

#[inline]
fn m_add(a: u16, b: u16) -> u16 {
    crate::gf3::unpack(padd(pack(a as u32), pack(b as u32))) as u16
}

#[inline]
fn m_sub(a: u16, b: u16) -> u16 {
    crate::gf3::unpack(crate::gf3::psub(pack(a as u32), pack(b as u32))) as u16
}

/// Bitset over the words of `M`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MSet(Box<[u64; M_WORDS64]>);

impl MSet {
    pub fn empty() -> Self {
        MSet(Box::new([0; M_WORDS64]))
    }

    pub fn from_code(c: &Code) -> Result<Self> {
        let mut s = Self::empty();
        for i in c.iter() {
            let mi = m_index(i);
            if full_index(mi) != i {
                return Err(usage!("word {i} lies outside the parity code"));
            }
            s.insert(mi);
        }
        Ok(s)
    }

    #[inline]
    pub fn insert(&mut self, mi: u16) {
        self.0[mi as usize >> 6] |= 1 << (mi & 63);
    }

    #[inline]
    pub fn contains(&self, mi: u16) -> bool {
        self.0[mi as usize >> 6] >> (mi & 63) & 1 == 1
    }

    pub fn union_with(&mut self, other: &MSet) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }
}

/// Action of an isometry preserving `M` on `M`-indices.
pub fn m_table(g: &Isometry) -> Result<Vec<u16>> {
    if g.n() != LEN {
        return Err(usage!("isometry of length {} on length-9 words", g.n()));
    }
    let t = g.index_table();
    (0..M_SIZE as u16)
        .map(|mi| {
            let img = Isometry::apply_index_with(&t, full_index(mi));
            let out = m_index(img);
            if full_index(out) != img {
                return Err(usage!("isometry does not preserve the parity code"));
            }
            Ok(out)
        })
        .collect()
}

/// Generators of the isometries fixing 0 and preserving `M`: a
/// transposition, a 9-cycle and uniform negation.
pub fn parity_monomial_generators() -> Vec<Isometry> {
    let mut cyc: Vec<u8> = (1..LEN as u8).collect();
    cyc.push(0);
    let mut tr: Vec<u8> = (0..LEN as u8).collect();
    tr.swap(0, 1);
    vec![
        Isometry::coordinate_permutation(tr).expect("transposition"),
        Isometry::coordinate_permutation(cyc).expect("cycle"),
        Isometry::new((0..LEN as u8).collect(), vec![[0, 2, 1]; LEN]).expect("negation"),
    ]
}

/// The RM-like subcodes of `M` in one orbit of the stabilizer of `M`.
///
/// Only the members containing 0 are stored; every member `D` is listed
/// exactly once as `E + v` with `E` a stored member and `v` the least
/// `M`-index in `D`. Each stored member also records how it was reached:
/// `E = g(R - c)` for the representative `R`.
#[derive(Clone, Debug)]
pub struct ClassOrbit {
    zero: Vec<Box<[u16]>>,
    reach: Vec<(Isometry, u16)>,
}

fn sorted_shift(set: &[u16], v: u16) -> Box<[u16]> {
    let mut out: Vec<u16> = set.iter().map(|&e| m_sub(e, v)).collect();
    out.sort_unstable();
    out.into_boxed_slice()
}

/// All codes in the orbit of `rep` under translations by `M`, coordinate
/// permutations and uniform negation.
pub fn enumerate_class_orbit(rep: &Code) -> Result<ClassOrbit> {
    if rep.n() != LEN || !is_rm_like(rep, &parity_code(LEN))? {
        return Err(usage!("representative is not an RM-like subcode of the parity code"));
    }
    let tables: Vec<Vec<u16>> = parity_monomial_generators()
        .iter()
        .map(m_table)
        .collect::<Result<_>>()?;
    let gens = parity_monomial_generators();
    let members: Vec<u16> = rep.iter().map(m_index).collect();
    let mut seen: HashMap<Box<[u16]>, (Isometry, u16)> = HashMap::new();
    let mut queue: Vec<Box<[u16]>> = Vec::new();
    for &c in &members {
        let e = sorted_shift(&members, c);
        if !seen.contains_key(&e) {
            seen.insert(e.clone(), (Isometry::identity(LEN), c));
            queue.push(e);
        }
    }
    while let Some(e) = queue.pop() {
        for (t, g) in tables.iter().zip(&gens) {
            let mut img: Vec<u16> = e.iter().map(|&x| t[x as usize]).collect();
            img.sort_unstable();
            let img = img.into_boxed_slice();
            if !seen.contains_key(&img) {
                let (h, c) = &seen[&e];
                let r = (g.compose(h)?, *c);
                seen.insert(img.clone(), r);
                queue.push(img);
            }
        }
    }
    let mut all: Vec<(Box<[u16]>, (Isometry, u16))> = seen.into_iter().collect();
    all.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let (zero, reach) = all.into_iter().unzip();
    Ok(ClassOrbit { zero, reach })
}

impl ClassOrbit {
    /// Number of codes in the orbit: each code has 729 of the 6561 words of
    /// `M` as members, so it arises from 729 pairs `(E, v)`.
    pub fn len(&self) -> u64 {
        (self.zero.len() * M_SIZE / RM_SIZE) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.zero.is_empty()
    }

    /// Number of codes in the orbit containing 0.
    pub fn with_zero(&self) -> usize {
        self.zero.len()
    }

    pub fn zero_member(&self, e: usize) -> &[u16] {
        &self.zero[e]
    }

    pub fn find_zero_member(&self, sorted: &[u16]) -> Option<usize> {
        self.zero.binary_search_by(|z| (**z).cmp(sorted)).ok()
    }

    /// The code `E_e + v` as a set of point indices.
    pub fn code(&self, e: usize, v: u16) -> Code {
        Code::from_indices(LEN, self.zero[e].iter().map(|&x| full_index(m_add(x, v))))
    }

    /// Whether `v` is the least `M`-index of `E_e + v`.
    #[inline]
    fn is_least(&self, e: usize, v: u16) -> bool {
        let pv = pack(v as u32);
        self.zero[e][1..]
            .iter()
            .all(|&x| crate::gf3::unpack(padd(pack(x as u32), pv)) as u16 > v)
    }

    /// Calls `f(e, v)` once per code `E_e + v` of the orbit disjoint from
    /// `avoid`.
    pub fn for_each_disjoint(&self, avoid: &MSet, mut f: impl FnMut(usize, u16)) {
        for e in 0..self.zero.len() {
            let packed: Vec<u32> = self.zero[e].iter().map(|&x| pack(x as u32)).collect();
            for v in 0..M_SIZE as u16 {
                let pv = pack(v as u32);
                let clear = packed
                    .iter()
                    .all(|&x| !avoid.contains(crate::gf3::unpack(padd(x, pv)) as u16));
                if clear && self.is_least(e, v) {
                    f(e, v);
                }
            }
        }
    }

    /// Calls `f(e, v)` for every translate `E_e + v` disjoint from `avoid`
    /// with `keep(v)`; a code may be reached through several pairs.
    pub fn for_each_translate(&self, avoid: &MSet, keep: impl Fn(u16) -> bool, mut f: impl FnMut(usize, u16)) {
        let shifts: Vec<u16> = (0..M_SIZE as u16).filter(|&v| keep(v)).collect();
        for e in 0..self.zero.len() {
            let packed: Vec<u32> = self.zero[e].iter().map(|&x| pack(x as u32)).collect();
            for &v in &shifts {
                let pv = pack(v as u32);
                if packed
                    .iter()
                    .all(|&x| !avoid.contains(crate::gf3::unpack(padd(x, pv)) as u16))
                {
                    f(e, v);
                }
            }
        }
    }

    /// Action on `M`-indices of an isometry preserving `M` that maps
    /// `E_e + v` onto the representative.
    pub fn to_rep_table(&self, e: usize, v: u16) -> Result<Vec<u16>> {
        let (g, c) = &self.reach[e];
        let word = |mi: u16| TernaryWord::from_index(LEN, full_index(mi));
        let back = Isometry::translation(&word(m_sub(0, v)));
        let fwd = Isometry::translation(&word(*c));
        m_table(&fwd.compose(&g.inverse().compose(&back)?)?)
    }

    /// `M`-indices of `E_e + v`.
    pub fn translate(&self, e: usize, v: u16) -> Vec<u16> {
        self.zero[e].iter().map(|&x| m_add(x, v)).collect()
    }

    /// Calls `f` with every code of the orbit.
    pub fn for_each_code(&self, mut f: impl FnMut(Code)) {
        for e in 0..self.zero.len() {
            for v in 0..M_SIZE as u16 {
                if self.is_least(e, v) {
                    f(self.code(e, v));
                }
            }
        }
    }

    /// The pair `(e, v)` naming a code of the orbit given by its
    /// `M`-indices in any order.
    pub fn key_of(&self, members: &[u16]) -> Option<(usize, u16)> {
        let v = *members.iter().min()?;
        let e = self.find_zero_member(&sorted_shift(members, v))?;
        Some((e, v))
    }
}

/// One equivalence class of RM-like codes under a subgroup of isometries.
#[derive(Clone, Debug)]
pub struct RmSubclass {
    pub rep: Code,
    pub aut_order: BigUint,
    /// Index of the full-equivalence class containing it.
    pub full_class: usize,
}

/// Classes of RM-like subcodes of `M`.
#[derive(Clone, Debug)]
pub struct RmLikeClassification {
    /// Full-equivalence classes in order of decreasing automorphism order;
    /// representatives contain 0.
    pub registry: ClassRegistry,
    /// Classes of codes containing 0 under isometries fixing 0.
    pub monomial: Vec<RmSubclass>,
    /// Classes of codes containing 0 under coordinate permutations.
    pub permutation: Vec<RmSubclass>,
    pub with_zero: u64,
    pub in_m: u64,
}

impl RmLikeClassification {
    pub fn rep(&self, class: usize) -> &Code {
        self.registry.entries()[class].rep.block(0)
    }

    pub fn num_classes(&self) -> usize {
        self.registry.len()
    }

    /// Stored orbits of every full class, in class order.
    pub fn orbits(&self) -> Result<Vec<ClassOrbit>> {
        (0..self.num_classes()).map(|t| enumerate_class_orbit(self.rep(t))).collect()
    }

    /// Full-equivalence class index of an RM-like subcode of `M`.
    pub fn class_of(&self, c: &Code) -> Result<usize> {
        let d = certify_code(c, Flavor::Full)?.digest;
        self.registry
            .position(&d)
            .ok_or_else(|| usage!("code is not RM-like in the parity code"))
    }
}

/// Partial codes of level 9, one per class, from the level-by-level
/// pipeline.
pub fn level9_classes() -> Result<Vec<PartialClass>> {
    let level3 = classify_closed(super::partial::extend_partial(&PartialCode::root())?, 0)?;
    let mut cur: Vec<PartialClass> = level3;
    for _ in 4..=LEN {
        let reps: Vec<PartialCode> = cur.iter().map(|c| c.rep.clone()).collect();
        cur = next_level(&reps)?.into_iter().flatten().collect();
    }
    Ok(cur)
}

/// Classifies RM-like subcodes of `M` up to full, monomial and permutation
/// equivalence, and checks the class sizes against the orbit counts.
pub fn classify_rm_like() -> Result<RmLikeClassification> {
    let host = parity_code(LEN);
    let top = level9_classes()?;
    let stab_m = BigUint::from(M_SIZE as u64 * PARITY_MONOMIAL_ORDER);

    let mut full: Vec<(CanonicalCertificate, Code)> = Vec::new();
    let mut monomial_full = Vec::new();
    let mut with_zero = 0u64;
    let mut zero_by_class: HashMap<[u8; 32], u64> = HashMap::new();
    for pc in &top {
        let c = pc.rep.code();
        if !is_rm_like(c, &host)? {
            return Err(invariant!("level-9 partial code is not RM-like"));
        }
        let fc = certify_code(c, Flavor::Full)?;
        for g in &fc.aut_generators {
            m_table(g).map_err(|_| invariant!("automorphism of an RM-like code moves the parity code"))?;
        }
        let orbit0 = pc.orbit_size()?;
        with_zero += orbit0;
        *zero_by_class.entry(fc.digest).or_default() += orbit0;
        if !full.iter().any(|(f, _)| f.digest == fc.digest) {
            full.push((fc.clone(), c.clone()));
        }
        monomial_full.push((c.clone(), fc.digest));
    }
    full.sort_by(|a, b| b.0.aut_order.cmp(&a.0.aut_order).then(a.0.digest.cmp(&b.0.digest)));
    let index_of = |d: &[u8; 32]| full.iter().position(|(f, _)| f.digest == *d).unwrap();

    let mut registry = ClassRegistry::new(Flavor::Full);
    let mut in_m = 0u64;
    for (t, (cert, rep)) in full.iter().enumerate() {
        if &stab_m % &cert.aut_order != BigUint::from(0u32) {
            return Err(invariant!("automorphism order does not divide the stabilizer of M"));
        }
        let orbit = u64::try_from(&stab_m / &cert.aut_order).map_err(|_| invariant!("orbit overflow"))?;
        let zero = zero_by_class[&cert.digest];
        if orbit * RM_SIZE as u64 != zero * M_SIZE as u64 {
            return Err(invariant!("class {t}: orbit {orbit} inconsistent with {zero} members containing 0"));
        }
        in_m += orbit;
        let mut counts = BTreeMap::new();
        counts.insert("in_parity_code".to_string(), orbit);
        counts.insert("containing_zero".to_string(), zero);
        registry.insert(ClassEntry {
            digest: cert.digest,
            aut_order: cert.aut_order.clone(),
            type_vector: vec![t as u8],
            counts,
            rep: Collection::new(LEN, vec![rep.clone()])?,
        })?;
    }

    let mut monomial = Vec::new();
    for (pc, (c, d)) in top.iter().zip(&monomial_full) {
        let mc = certify_code(c, Flavor::Monomial)?;
        if mc.aut_order != pc.cert.aut_order {
            return Err(invariant!("monomial automorphisms of an RM-like code leave the parity code"));
        }
        monomial.push(RmSubclass {
            rep: c.clone(),
            aut_order: mc.aut_order,
            full_class: index_of(d),
        });
    }

    let mut permutation: Vec<RmSubclass> = Vec::new();
    let mut perm_digests: HashSet<[u8; 32]> = HashSet::new();
    let neg = &parity_monomial_generators()[2];
    for m in &monomial {
        for c in [m.rep.clone(), neg.apply_code(&m.rep)?] {
            let pc = certify_code(&c, Flavor::Permutation)?;
            if perm_digests.insert(pc.digest) {
                permutation.push(RmSubclass {
                    rep: c,
                    aut_order: pc.aut_order,
                    full_class: m.full_class,
                });
            }
        }
    }
    let perm_total: u64 = permutation
        .iter()
        .map(|p| 362_880 / u64::try_from(&p.aut_order).unwrap_or(u64::MAX))
        .sum();
    if perm_total != with_zero {
        return Err(invariant!("permutation classes account for {perm_total} of {with_zero} codes"));
    }
    if with_zero != RM_LIKE_WITH_ZERO || in_m != RM_LIKE_IN_M {
        return Err(invariant!("found {with_zero} RM-like codes through 0 and {in_m} in total"));
    }
    Ok(RmLikeClassification {
        registry,
        monomial,
        permutation,
        with_zero,
        in_m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf3::num_points;

    #[test]
    fn m_indices_round_trip() {
        let host = parity_code(LEN);
        let back: Vec<u32> = (0..M_SIZE as u16).map(full_index).collect();
        assert_eq!(Code::from_indices(LEN, back.iter().copied()), host);
        for i in host.iter() {
            assert_eq!(full_index(m_index(i)), i);
        }
        assert_eq!(num_points(LEN), 3 * M_SIZE);
    }

    #[test]
    fn m_addition_matches_word_addition() {
        for (a, b) in [(5u16, 7u16), (6000, 1234), (0, 6560), (3280, 3280)] {
            let wa = TernaryWord::from_index(LEN, full_index(a));
            let wb = TernaryWord::from_index(LEN, full_index(b));
            assert_eq!(full_index(m_add(a, b)), wa.add(&wb).unwrap().index());
            assert_eq!(m_sub(m_add(a, b), b), a);
        }
    }
}

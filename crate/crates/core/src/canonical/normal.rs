//! Canonical forms of 1-perfect codes too large for the graph search.
//!
//! A 1-perfect code of length 13 is an orthogonal array of strength 8, so
//! equitable refinement of its code graph hardly separates anything and the
//! search tree explodes. Instead the code is translated so that a codeword
//! sits at the origin; every isometry fixing the origin is monomial, and the
//! monomial maps worth trying are those carrying the low-weight codewords
//! onto a canonical form of that small configuration. The canonical code is
//! the least image over all such normalizations.

use std::collections::HashSet;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use super::graph::ColoredGraph;
use super::search::canonical_labeling;
use super::{graph_digest, CanonicalCertificate, Flavor};
use crate::error::{invariant, usage, Result};
use crate::gf3::{digits, packed_of_weight, padd, pneg, psub, ptrit, punit, pweight, Code, Isometry, Packed, MAX_LEN, POW3};
use crate::linalg::{kernel, EchelonBasis};

/// Local configurations whose automorphism group exceeds this are
/// enlarged by the next weight before candidates are enumerated.
const MAX_LOCAL_AUT: u128 = 1 << 18;
const MAX_LOCAL_WEIGHT: u32 = 5;

/// `x -> m(x) + shift` with `m(x)_{perm[i]} = ±x_i`, the sign negative when
/// bit `i` of `neg` is set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Affine {
    perm: [u8; MAX_LEN],
    neg: u16,
    shift: Packed,
}

impl Affine {
    fn identity() -> Self {
        let mut perm = [0u8; MAX_LEN];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        Self { perm, neg: 0, shift: 0 }
    }

    fn linear(&self, x: Packed) -> Packed {
        let mut out = 0;
        for i in 0..MAX_LEN {
            let t = ptrit(x, i);
            if t != 0 {
                let t = if self.neg >> i & 1 == 1 { 3 - t } else { t };
                out |= punit(self.perm[i] as usize, t);
            }
        }
        out
    }

    fn apply(&self, x: Packed) -> Packed {
        padd(self.linear(x), self.shift)
    }

    /// `self ∘ other`.
    fn compose(&self, other: &Affine) -> Affine {
        let mut perm = [0u8; MAX_LEN];
        let mut neg = 0u16;
        for i in 0..MAX_LEN {
            let j = other.perm[i] as usize;
            perm[i] = self.perm[j];
            neg |= ((self.neg >> j & 1) ^ (other.neg >> i & 1)) << i;
        }
        Affine {
            perm,
            neg,
            shift: self.apply(other.shift),
        }
    }

    fn inverse(&self) -> Affine {
        let mut perm = [0u8; MAX_LEN];
        let mut neg = 0u16;
        for i in 0..MAX_LEN {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            neg |= (self.neg >> i & 1) << j;
        }
        let lin = Affine { perm, neg, shift: 0 };
        let shift = pneg(lin.linear(self.shift));
        Affine { perm, neg, shift }
    }

    fn translation(v: Packed) -> Self {
        Self {
            shift: v,
            ..Self::identity()
        }
    }

    /// Index contributions per coordinate and value, as for
    /// [`Isometry::index_table`].
    fn table(&self, n: usize) -> Vec<[u32; 3]> {
        (0..n)
            .map(|i| {
                let p = self.perm[i] as usize;
                let s = ptrit(self.shift, p) as u32;
                let mut row = [0u32; 3];
                for (v, slot) in row.iter_mut().enumerate() {
                    let v = if self.neg >> i & 1 == 1 { (3 - v as u32) % 3 } else { v as u32 };
                    *slot = ((v + s) % 3) * POW3[p];
                }
                row
            })
            .collect()
    }

    fn to_isometry(self, n: usize) -> Result<Isometry> {
        let mut sym = vec![[0u8; 3]; n];
        for i in 0..n {
            let p = self.perm[i] as usize;
            let s = ptrit(self.shift, p);
            for v in 0..3u8 {
                let w = if self.neg >> i & 1 == 1 { (3 - v) % 3 } else { v };
                sym[p][v as usize] = (w + s) % 3;
            }
        }
        Isometry::new(self.perm[..n].to_vec(), sym)
    }
}

/// Codewords of `C - r` with weight in `3..=w`, found by probing.
fn low_words(c: &Code, r: Packed, shells: &[Vec<Packed>], w: u32) -> Vec<Packed> {
    let mut out = Vec::new();
    for shell in &shells[3..=(w as usize)] {
        out.extend(shell.iter().copied().filter(|&u| c.contains_packed(padd(r, u))));
    }
    out
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Invariants of the sign points `(i, v)`, numbered `2i + v - 1`, under the
/// weight-3 words. Each point `p` induces a partial matching
/// `z -> third(p, z)` pairing the other two points of every triple through
/// `p`; two points give a union of paths and cycles whose length profile is
/// a pair invariant, and a point's invariant is the multiset of its pair
/// invariants.
fn point_invariants(n: usize, w3: &[Packed]) -> Vec<u64> {
    const NONE: u8 = u8::MAX;
    let m = 2 * n;
    let mut third = vec![NONE; m * m];
    for &w in w3 {
        let pts: Vec<u8> = (0..n)
            .filter(|&i| ptrit(w, i) != 0)
            .map(|i| (2 * i + ptrit(w, i) as usize - 1) as u8)
            .collect();
        for k in 0..3 {
            let (p, a, b) = (pts[k] as usize, pts[(k + 1) % 3], pts[(k + 2) % 3]);
            third[p * m + a as usize] = b;
            third[p * m + b as usize] = a;
        }
    }
    let mut pair = vec![0u64; m * m];
    let mut seen = vec![false; m];
    let mut parts: Vec<u64> = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let step = |x: usize, via: usize| -> Option<usize> {
                let y = third[via * m + x];
                (y != NONE && y as usize != a && y as usize != b).then_some(y as usize)
            };
            seen.fill(false);
            seen[a] = true;
            seen[b] = true;
            parts.clear();
            // paths first, walked from an end, then the remaining cycles
            for pass in 0..2 {
                for z in 0..m {
                    if seen[z] {
                        continue;
                    }
                    let deg = step(z, a).is_some() as u8 + step(z, b).is_some() as u8;
                    if pass == 0 && deg == 2 {
                        continue;
                    }
                    let mut via = if step(z, a).is_some() { a } else { b };
                    let mut x = z;
                    let mut len = 1u64;
                    seen[x] = true;
                    while let Some(y) = step(x, via) {
                        if seen[y] {
                            break;
                        }
                        seen[y] = true;
                        len += 1;
                        x = y;
                        via = if via == a { b } else { a };
                    }
                    parts.push(2 * len + pass as u64);
                }
            }
            parts.sort_unstable();
            let h = parts.iter().fold(0u64, |h, &x| mix(h, x));
            pair[a * m + b] = h;
            pair[b * m + a] = h;
        }
    }
    (0..m)
        .map(|p| {
            let mut row: Vec<u64> = (0..m).filter(|&q| q != p).map(|q| pair[p * m + q]).collect();
            row.sort_unstable();
            // the partner sign point of the same coordinate is singled out
            let partner = pair[p * m + (p ^ 1)];
            row.iter().fold(mix(0, partner), |h, &x| mix(h, x))
        })
        .collect()
}

/// Coordinate vertices `i`, sign vertices `n + 2i + (v - 1)` colored by
/// their invariants, and one vertex per word joined to the sign vertices of
/// its nonzero entries.
fn local_graph(n: usize, words: &[Packed], inv: &[u64]) -> ColoredGraph {
    const WORD: u32 = 1 << 30;
    const SIGN: u32 = 1 << 31;
    let mut colors = vec![0u32; 3 * n + words.len()];
    for (c, &k) in colors[n..3 * n].iter_mut().zip(inv) {
        *c = SIGN | (k as u32 & (SIGN - 1));
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        edges.push((i, n as u32 + 2 * i));
        edges.push((i, n as u32 + 2 * i + 1));
    }
    for (k, &w) in words.iter().enumerate() {
        let v = (3 * n + k) as u32;
        colors[v as usize] = WORD + pweight(w);
        for i in 0..n {
            let t = ptrit(w, i);
            if t != 0 {
                edges.push(((n + 2 * i) as u32 + t as u32 - 1, v));
            }
        }
    }
    ColoredGraph::new(colors, &edges).with_structural(3 * n as u32)
}

/// The monomial map induced by a vertex map of a local graph.
fn mono_of(n: usize, gamma: &[u32]) -> Affine {
    let mut a = Affine::identity();
    for i in 0..n {
        let j = gamma[i] as usize;
        a.perm[i] = j as u8;
        if gamma[n + 2 * i] as usize != n + 2 * j {
            a.neg |= 1 << i;
        }
    }
    a
}

struct Local {
    digest: [u8; 32],
    /// sends the configuration onto its canonical form
    canon: Affine,
    gens: Vec<Affine>,
    aut_order: u128,
}

fn local_form(n: usize, words: &[Packed], inv: &[u64]) -> Result<Local> {
    let g = local_graph(n, words, inv);
    let lab = canonical_labeling(&g)?;
    let mut pos = vec![0u32; g.num_vertices()];
    for (p, &v) in lab.canon_lab.iter().enumerate() {
        pos[v as usize] = p as u32;
    }
    let mut canon = Affine::identity();
    for i in 0..n {
        canon.perm[i] = pos[i] as u8;
        if pos[n + 2 * i] > pos[n + 2 * i + 1] {
            canon.neg |= 1 << i;
        }
    }
    Ok(Local {
        digest: graph_digest(b"q3-local\0", &g, &pos),
        canon,
        gens: lab.generators.iter().map(|gamma| mono_of(n, gamma)).collect(),
        aut_order: lab.aut_order,
    })
}

fn group_closure(gens: &[Affine], limit: usize) -> Result<Vec<Affine>> {
    let id = Affine::identity();
    let mut seen: HashSet<Affine> = HashSet::from([id]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for g in gens {
            let y = g.compose(&x);
            if seen.insert(y) {
                if out.len() >= limit {
                    return Err(invariant!("local automorphism group exceeds {limit}"));
                }
                out.push(y);
            }
        }
        i += 1;
    }
    Ok(out)
}

/// Lexicographic order of the sorted index lists of two equal-size codes.
fn cmp_codes(a: &Code, b: &Code) -> std::cmp::Ordering {
    for (x, y) in a.bits().iter().zip(b.bits()) {
        if x != y {
            let low = (x ^ y).trailing_zeros();
            return if x >> low & 1 == 1 {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            };
        }
    }
    std::cmp::Ordering::Equal
}

struct Best {
    code: Code,
    map: Affine,
}

/// Certificate of a 1-perfect code under full or monomial equivalence, or
/// `None` when the local configurations are too symmetric to enumerate.
pub(crate) fn certify_perfect(c: &Code, flavor: Flavor) -> Result<Option<CanonicalCertificate>> {
    let n = c.n();
    let words = c.packed_words();
    let digits: Vec<[u8; MAX_LEN]> = c.iter().map(|x| digits(x, n)).collect();
    let shells: Vec<Vec<Packed>> = (0..=MAX_LOCAL_WEIGHT as usize).map(|w| packed_of_weight(n, w)).collect();

    let (ker, reps) = match flavor {
        Flavor::Full => {
            let mut ker = EchelonBasis::new();
            for b in &kernel(c)?.basis {
                ker.insert(b.packed());
            }
            let mut reps: Vec<Packed> = words.iter().map(|&x| ker.reduce(x)).collect();
            reps.sort_unstable();
            reps.dedup();
            (ker, reps)
        }
        Flavor::Monomial => {
            if !c.contains(0) {
                return Err(usage!("monomial flavor needs the zero word in the code"));
            }
            (EchelonBasis::new(), vec![0])
        }
        _ => return Err(usage!("normal forms support full and monomial flavors only")),
    };

    // screen origins by their point invariants, then keep those whose local
    // configuration is least, enlarging the configuration while its
    // symmetry is too large to enumerate
    let mut profiled: Vec<(Vec<u64>, Packed, Vec<u64>)> = reps
        .into_iter()
        .map(|r| {
            let inv = point_invariants(n, &low_words(c, r, &shells, 3));
            let mut key = inv.clone();
            key.sort_unstable();
            (key, r, inv)
        })
        .collect();
    let least = profiled.iter().map(|(k, _, _)| k).min().expect("a code has a codeword").clone();
    profiled.retain(|(k, _, _)| *k == least);
    let mut pool: Vec<(Packed, Vec<u64>)> = profiled.into_iter().map(|(_, r, p)| (r, p)).collect();
    let mut w = 3;
    let cands: Vec<(Packed, Local)> = loop {
        let mut forms: Vec<(Packed, Local)> = pool
            .iter()
            .map(|(r, inv)| Ok((*r, local_form(n, &low_words(c, *r, &shells, w), inv)?)))
            .collect::<Result<_>>()?;
        let min = forms.iter().map(|(_, l)| l.digest).min().expect("pool is nonempty");
        forms.retain(|(_, l)| l.digest == min);
        if forms[0].1.aut_order <= MAX_LOCAL_AUT {
            break forms;
        }
        if w == MAX_LOCAL_WEIGHT {
            return Ok(None);
        }
        pool.retain(|(r, _)| forms.iter().any(|(f, _)| f == r));
        w += 1;
    };

    let mut best: Option<Best> = None;
    let mut ties: u128 = 0;
    let mut tie_maps: Vec<Affine> = Vec::new();
    let mut best_stab: Vec<Affine> = Vec::new();
    for (r, local) in &cands {
        let elems = group_closure(&local.gens, MAX_LOCAL_AUT as usize + 1)?;
        // monomial automorphisms of C - r inside the local group
        let is_aut = |a: &Affine| words.iter().all(|&x| c.contains_packed(padd(a.linear(psub(x, *r)), *r)));
        let mut stab_gens: Vec<Affine> = Vec::new();
        let mut stab: HashSet<Affine> = HashSet::from([Affine::identity()]);
        for a in &elems {
            if !stab.contains(a) && is_aut(a) {
                stab_gens.push(*a);
                stab = group_closure(&stab_gens, usize::MAX)?.into_iter().collect();
            }
        }
        let stab_list: Vec<Affine> = stab.iter().copied().collect();
        let mut covered: HashSet<Affine> = HashSet::new();
        let mut local_best: Option<(Code, Affine)> = None;
        for a in &elems {
            if covered.contains(a) {
                continue;
            }
            for h in &stab_list {
                covered.insert(a.compose(h));
            }
            let map = local.canon.compose(a).compose(&Affine::translation(pneg(*r)));
            let table = map.table(n);
            let img = Code::from_indices(
                n,
                digits.iter().map(|d| (0..n).map(|i| table[i][d[i] as usize]).sum::<u32>()),
            );
            if local_best.as_ref().is_none_or(|(b, _)| cmp_codes(&img, b).is_lt()) {
                local_best = Some((img, map));
            }
        }
        let (img, map) = local_best.expect("the local group is nonempty");
        let ord = best.as_ref().map(|b| cmp_codes(&img, &b.code));
        match ord {
            None | Some(std::cmp::Ordering::Less) => {
                best = Some(Best { code: img, map });
                ties = stab_list.len() as u128;
                tie_maps.clear();
                let to_r = Affine::translation(*r);
                let from_r = Affine::translation(pneg(*r));
                best_stab = stab_gens.iter().map(|h| to_r.compose(h).compose(&from_r)).collect();
            }
            Some(std::cmp::Ordering::Equal) => {
                ties += stab_list.len() as u128;
                tie_maps.push(map);
            }
            Some(std::cmp::Ordering::Greater) => {}
        }
    }
    let best = best.expect("at least one origin");

    let mut gens: Vec<Affine> = ker.vectors().into_iter().map(Affine::translation).collect();
    gens.extend(best_stab);
    let inv = best.map.inverse();
    gens.extend(tie_maps.iter().map(|m| inv.compose(m)));
    for g in &gens {
        if !words.iter().all(|&x| c.contains_packed(g.apply(x))) {
            return Err(invariant!("normal form produced a map that is not an automorphism"));
        }
    }

    let mut hasher = Sha256::new();
    hasher.update(b"q3-perfect-normal\0");
    hasher.update(format!("{flavor}\0").as_bytes());
    hasher.update((n as u64).to_le_bytes());
    for x in best.code.iter() {
        hasher.update(x.to_le_bytes());
    }
    let digest: [u8; 32] = hasher.finalize().into();
    let aut_order = BigUint::from(ties) * BigUint::from(3u32).pow(ker.dim() as u32);
    Ok(Some(CanonicalCertificate {
        digest,
        aut_order,
        aut_generators: gens.into_iter().map(|g| g.to_isometry(n)).collect::<Result<_>>()?,
        block_generators: Vec::new(),
        blocks: None,
        to_canonical: best.map.to_isometry(n)?,
        canonical_block_order: Vec::new(),
    }))
}

//! Partial RM-like codes of length 9, grown one weight level at a time.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::canonical::{certify_code, CanonicalCertificate, Flavor};
use crate::error::{invariant, usage, Result};
use crate::exactcover::{solve_all, CoverInstance};
use crate::gf3::{pack, packed_of_weight, padd, pdist, pweight, unpack, Code, Packed};
use crate::perfect::{min_distance_exceeds, parity_code};

pub const LEN: usize = 9;

/// A code `C` in `F_3^9` with `0 ∈ C`, all weights at most `level`, minimum
/// distance 3, and every word of weight below `level` outside the parity
/// code `M` adjacent to exactly one codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCode {
    level: usize,
    code: Code,
}

fn in_m(p: Packed) -> bool {
    (pweight(p & 0x1fff) + 2 * pweight(p >> 16)) % 3 == 0
}

/// Number of codewords adjacent to `y`.
fn neighbours_in(c: &Code, y: Packed, units: &[Packed]) -> usize {
    units.iter().filter(|&&u| c.contains_packed(padd(y, u))).count()
}

pub fn is_partial_code(level: usize, c: &Code) -> bool {
    if c.n() != LEN || !c.contains(0) || level > LEN {
        return false;
    }
    if c.iter().any(|i| pweight(pack(i)) as usize > level) {
        return false;
    }
    if !min_distance_exceeds(c, 2) {
        return false;
    }
    let units = packed_of_weight(LEN, 1);
    (0..level).all(|w| {
        packed_of_weight(LEN, w)
            .into_iter()
            .filter(|&y| !in_m(y))
            .all(|y| neighbours_in(c, y, &units) == 1)
    })
}

impl PartialCode {
    pub fn new(level: usize, code: Code) -> Result<Self> {
        if !is_partial_code(level, &code) {
            return Err(usage!("not a partial code of level {level}"));
        }
        Ok(Self { level, code })
    }

    /// The singleton `{0}` at level 2.
    pub fn root() -> Self {
        Self {
            level: 2,
            code: Code::from_indices(LEN, [0]),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn into_code(self) -> Code {
        self.code
    }
}

/// Calls `visit` with every level-`(i+1)` partial code containing `pc`
/// until it returns false. Returns the number visited.
pub fn for_each_extension(pc: &PartialCode, mut visit: impl FnMut(PartialCode) -> bool) -> Result<u64> {
    let i = pc.level;
    if i >= LEN {
        return Err(usage!("level {i} partial codes have no continuation"));
    }
    let c = &pc.code;
    let units = packed_of_weight(LEN, 1);
    let within2: Vec<Packed> = [1, 2].iter().flat_map(|&w| packed_of_weight(LEN, w)).collect();
    let covered = |y: Packed| c.contains_packed(y) || neighbours_in(c, y, &units) > 0;
    let cols: Vec<Packed> = packed_of_weight(LEN, i)
        .into_iter()
        .filter(|&y| !in_m(y) && !covered(y))
        .collect();
    let col_of: HashMap<Packed, usize> = cols.iter().enumerate().map(|(j, &y)| (y, j)).collect();
    let rows: Vec<Packed> = packed_of_weight(LEN, i + 1)
        .into_iter()
        .filter(|&x| in_m(x) && !covered(x) && within2.iter().all(|&u| !c.contains_packed(padd(x, u))))
        .collect();
    let mut inst = CoverInstance::new(cols.len());
    for (r, &x) in rows.iter().enumerate() {
        let hit: Vec<usize> = units
            .iter()
            .filter_map(|&u| col_of.get(&padd(x, u)).copied())
            .collect();
        if hit.len() != i + 1 {
            return Err(invariant!("candidate codeword covers {} of its {} lower neighbours", hit.len(), i + 1));
        }
        inst.add_row(r, hit)?;
    }
    let mut err = None;
    let mut accepted = 0;
    solve_all(&inst, |sol| {
        let fresh: Vec<Packed> = sol.iter().map(|&r| rows[r]).collect();
        let far = fresh
            .iter()
            .enumerate()
            .all(|(a, &x)| fresh[a + 1..].iter().all(|&y| pdist(x, y) >= 3));
        if !far {
            return true;
        }
        let mut code = c.clone();
        for &x in &fresh {
            code.insert(unpack(x));
        }
        if cfg!(debug_assertions) && !is_partial_code(i + 1, &code) {
            err = Some(invariant!("exact cover produced an invalid partial code"));
            return false;
        }
        accepted += 1;
        visit(PartialCode { level: i + 1, code })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(accepted),
    }
}

/// All level-`(i+1)` partial codes containing `pc`.
pub fn extend_partial(pc: &PartialCode) -> Result<Vec<PartialCode>> {
    let mut out = Vec::new();
    for_each_extension(pc, |x| {
        out.push(x);
        true
    })?;
    Ok(out)
}

/// One class of partial codes under coordinate permutations and uniform
/// negation, the isometries fixing 0 that preserve `M`.
#[derive(Clone, Debug)]
pub struct PartialClass {
    pub rep: PartialCode,
    pub cert: CanonicalCertificate,
}

impl PartialClass {
    /// Number of partial codes in the class.
    pub fn orbit_size(&self) -> Result<u64> {
        let aut = u64::try_from(&self.cert.aut_order).map_err(|_| invariant!("automorphism order overflow"))?;
        if PARITY_MONOMIAL_ORDER % aut != 0 {
            return Err(invariant!("automorphism order {aut} does not divide {PARITY_MONOMIAL_ORDER}"));
        }
        Ok(PARITY_MONOMIAL_ORDER / aut)
    }
}

/// Order of the group used to compare partial codes: `2 * 9!`.
pub const PARITY_MONOMIAL_ORDER: u64 = 725_760;

/// Groups partial codes into classes. Output order: decreasing automorphism
/// order, then certificate digest.
pub fn dedup_partial(codes: impl IntoIterator<Item = PartialCode>) -> Result<Vec<PartialClass>> {
    let mut by_digest: HashMap<[u8; 32], PartialClass> = HashMap::new();
    for pc in codes {
        let cert = certify_code(&pc.code, Flavor::ParityMonomial)?;
        by_digest.entry(cert.digest).or_insert(PartialClass { rep: pc, cert });
    }
    let mut out: Vec<PartialClass> = by_digest.into_values().collect();
    sort_classes(&mut out);
    Ok(out)
}

/// Classes of a set of partial codes that is closed under the comparison
/// group, such as all continuations of the root. Codes are certified in a
/// seeded random order until the orbits of the classes found account for
/// every code; since the set is a union of orbits, no class is missed.
pub fn classify_closed(mut codes: Vec<PartialCode>, seed: u64) -> Result<Vec<PartialClass>> {
    let total = codes.len() as u64;
    codes.shuffle(&mut StdRng::seed_from_u64(seed));
    let mut found: HashMap<[u8; 32], PartialClass> = HashMap::new();
    let mut covered = 0u64;
    for pc in codes {
        if covered == total {
            break;
        }
        let cert = certify_code(&pc.code, Flavor::ParityMonomial)?;
        if let std::collections::hash_map::Entry::Vacant(e) = found.entry(cert.digest) {
            let class = e.insert(PartialClass { rep: pc, cert });
            covered += class.orbit_size()?;
        }
    }
    if covered != total {
        return Err(invariant!("class orbits cover {covered} of {total} codes"));
    }
    let mut out: Vec<PartialClass> = found.into_values().collect();
    sort_classes(&mut out);
    Ok(out)
}

pub(crate) fn sort_classes(v: &mut [PartialClass]) {
    v.sort_by(|a, b| b.cert.aut_order.cmp(&a.cert.aut_order).then(a.cert.digest.cmp(&b.cert.digest)));
}

/// Nonequivalent continuations of each representative, in input order.
///
/// Continuations of different parents are never equivalent, since dropping
/// the top weight recovers the parent's class.
pub fn next_level(reps: &[PartialCode]) -> Result<Vec<Vec<PartialClass>>> {
    reps.iter()
        .map(|pc| dedup_partial(extend_partial(pc)?))
        .collect()
}

/// The supports of the weight-3 codewords with entries in `{0, v}`, if the
/// level-3 code splits into 0 and two such families of twelve triples, each
/// a Steiner triple system on the nine coordinates.
pub fn steiner_pair(c: &Code) -> Option<[Vec<[u8; 3]>; 2]> {
    if c.len() != 25 {
        return None;
    }
    let mut fam: [Vec<[u8; 3]>; 2] = [Vec::new(), Vec::new()];
    for i in c.iter().filter(|&i| i != 0) {
        let p = pack(i);
        let (ones, twos) = (p & 0x1ff, (p >> 16) & 0x1ff);
        let (slot, bits) = match (ones.count_ones(), twos.count_ones()) {
            (3, 0) => (0, ones),
            (0, 3) => (1, twos),
            _ => return None,
        };
        let mut t = [0u8; 3];
        let mut k = 0;
        for b in 0..LEN as u8 {
            if bits >> b & 1 == 1 {
                t[k] = b;
                k += 1;
            }
        }
        fam[slot].push(t);
    }
    for f in &fam {
        if f.len() != 12 {
            return None;
        }
        let mut pairs = [[0u8; LEN]; LEN];
        for t in f {
            for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
                pairs[a as usize][b as usize] += 1;
            }
        }
        if (0..LEN).any(|a| (a + 1..LEN).any(|b| pairs[a][b] != 1)) {
            return None;
        }
    }
    Some(fam)
}

/// Parity code of length 9.
pub fn host() -> Code {
    parity_code(LEN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_is_valid_at_levels_one_and_two() {
        assert!(is_partial_code(1, &Code::from_indices(LEN, [0])));
        assert!(is_partial_code(2, PartialCode::root().code()));
        assert!(!is_partial_code(3, PartialCode::root().code()));
    }

    #[test]
    fn steiner_pair_rejects_small_codes() {
        assert!(steiner_pair(PartialCode::root().code()).is_none());
    }

    #[test]
    fn first_extensions_are_valid() {
        let mut seen = 0;
        for_each_extension(&PartialCode::root(), |pc| {
            assert!(is_partial_code(3, pc.code()));
            assert!(steiner_pair(pc.code()).is_some());
            seen += 1;
            seen < 50
        })
        .unwrap();
        assert_eq!(seen, 50);
    }
}

//! Predicates for 1-perfect codes, distance-2 MDS codes, and RM-like codes.

use crate::error::{invariant, usage, Result};
use crate::gf3::{num_points, pack, packed_of_weight, padd, pdist, pweight, Code, Packed, POW3};

/// Whether every pair of distinct codewords is at distance greater than `r`.
pub fn min_distance_exceeds(c: &Code, r: usize) -> bool {
    let n = c.n();
    let mut shell: Vec<Packed> = Vec::new();
    for w in 1..=r.min(n) {
        shell.extend(packed_of_weight(n, w));
    }
    let words = c.packed_words();
    if (words.len() as u64) * (words.len() as u64) < (words.len() * shell.len()) as u64 * 2 {
        for (i, &a) in words.iter().enumerate() {
            if words[i + 1..].iter().any(|&b| pdist(a, b) as usize <= r) {
                return false;
            }
        }
        return true;
    }
    words
        .iter()
        .all(|&a| shell.iter().all(|&u| !c.contains_packed(padd(a, u))))
}

/// Whether the radius-1 balls around codewords partition the whole space.
pub fn is_1perfect(c: &Code) -> bool {
    let n = c.n();
    if c.len() * (1 + 2 * n) != num_points(n) {
        return false;
    }
    let units = packed_of_weight(n, 1);
    let mut seen = Code::empty(n);
    for i in c.iter() {
        let p = pack(i);
        if !seen.insert(i) {
            return false;
        }
        for &u in &units {
            if !seen.insert(crate::gf3::unpack(padd(p, u))) {
                return false;
            }
        }
    }
    seen.len() == num_points(n)
}

/// Whether `c` is an `(n, 3^(n-1), 2)` code.
pub fn is_mds2(c: &Code) -> bool {
    let n = c.n();
    n >= 2 && c.len() == num_points(n - 1) && min_distance_exceeds(c, 1)
}

/// The code `{x : x_0 + ... + x_(n-1) = 0}`.
pub fn parity_code(n: usize) -> Code {
    Code::from_predicate(n, |i| {
        let p = pack(i);
        (pweight(p & 0x1fff) + 2 * pweight(p >> 16)) % 3 == 0
    })
}

/// Whether `c` is a `(3^m, 3^(n-m-1), 3)` subcode of the MDS code `m_host`.
///
/// When the parameters match, also checks that every word outside the host
/// is adjacent to exactly one codeword and reports a violation as an
/// invariant failure.
pub fn is_rm_like(c: &Code, m_host: &Code) -> Result<bool> {
    if !is_mds2(m_host) {
        return Err(usage!("host code is not a distance-2 MDS code"));
    }
    let n = c.n();
    if m_host.n() != n {
        return Ok(false);
    }
    let Some(m) = (1..=2).find(|&m| POW3[m] as usize == n) else {
        return Ok(false);
    };
    if c.len() != num_points(n - m - 1) || !c.is_subset(m_host)? || !min_distance_exceeds(c, 2) {
        return Ok(false);
    }
    let units = packed_of_weight(n, 1);
    let mut hits = vec![0u8; num_points(n)];
    for i in c.iter() {
        let p = pack(i);
        for &u in &units {
            let j = crate::gf3::unpack(padd(p, u)) as usize;
            hits[j] = hits[j].saturating_add(1);
        }
    }
    for j in 0..num_points(n) as u32 {
        if !m_host.contains(j) && hits[j as usize] != 1 {
            return Err(invariant!(
                "word {j} outside the host is adjacent to {} codewords",
                hits[j as usize]
            ));
        }
    }
    Ok(true)
}

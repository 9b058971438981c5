//! Length-13 codes glued from a partition of a distance-2 MDS code of
//! length 9 into RM-like codes and a partition of `F_3^4` into 1-perfect
//! codes: `P = ∪_i C_i × P_τ(i)`. Inner coordinates come first.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::canonical::{certify_code, certify_collection, project_block_group, Flavor};
use crate::collection::Collection;
use crate::error::{invariant, usage, Result};
use crate::classify::rmlike::{full_index, ClassOrbit, MSet, M_SIZE};
use crate::exactcover::{solve_all, CoverInstance};
use crate::gf3::{num_points, pack, padd, unpack, Code, POW3};
use crate::linalg::{affine_rank, dual_words, kernel};
use crate::perfect::{is_1perfect, is_mds2, is_rm_like};
use crate::permgroup::{double_cosets, Perm, PermGroup};

pub const INNER: usize = 9;
pub const OUTER: usize = 4;
pub const LEN: usize = INNER + OUTER;
pub const BLOCKS: usize = 9;

fn check_inner(cbar: &Collection) -> Result<Code> {
    if cbar.n() != INNER || cbar.k() != BLOCKS {
        return Err(usage!("inner partition must have 9 blocks of length 9"));
    }
    let host = cbar.union();
    if !is_mds2(&host) {
        return Err(usage!("inner blocks do not cover a distance-2 MDS code"));
    }
    for (j, b) in cbar.blocks().iter().enumerate() {
        if !is_rm_like(b, &host)? {
            return Err(usage!("inner block {j} is not RM-like"));
        }
    }
    Ok(host)
}

fn check_outer(pbar: &Collection) -> Result<()> {
    if pbar.n() != OUTER || pbar.k() != BLOCKS || !pbar.is_partition_of(&Code::full(OUTER)) {
        return Err(usage!("outer partition must split F_3^4 into 9 blocks"));
    }
    if let Some(j) = pbar.blocks().iter().position(|b| !is_1perfect(b)) {
        return Err(usage!("outer block {j} is not 1-perfect"));
    }
    Ok(())
}

/// The linear RM-like code `{x : Σ x_i = Σ a_i x_i = Σ b_i x_i = 0}` with
/// coordinate `i` labelled by `(a_i, b_i) = (i mod 3, i div 3)`, and its
/// nine cosets in the parity code.
pub fn linear_rm_partition() -> Collection {
    let lin = Code::from_predicate(INNER, |i| {
        let d = crate::gf3::digits(i, INNER);
        let (mut s, mut a, mut b) = (0u32, 0u32, 0u32);
        for (k, &x) in d.iter().take(INNER).enumerate() {
            s += x as u32;
            a += (k as u32 % 3) * x as u32;
            b += (k as u32 / 3) * x as u32;
        }
        s % 3 == 0 && a % 3 == 0 && b % 3 == 0
    });
    let blocks = (0..BLOCKS as u32)
        .map(|j| {
            // s (e_1 - e_0) + t (e_3 - e_0) has syndrome (s, t)
            let (s, t) = (j % 3, j / 3);
            let v = ((6 - s - t) % 3) + s * POW3[1] + t * POW3[3];
            lin.translate(&crate::gf3::TernaryWord::from_index(INNER, v))
        })
        .collect::<Result<Vec<_>>>()
        .expect("cosets of a linear code");
    Collection::new(INNER, blocks).expect("cosets are disjoint")
}

/// Random partitions of the parity code of length 9 into RM-like codes.
///
/// The parity code splits into three translates of `{x : Σ (i mod 3) x_i =
/// 0}`; each is covered by three RM-like codes drawn by exact cover over
/// shuffled rows, so blocks of every class appear.
pub struct MdsPartitionSampler {
    region: Vec<u16>,
    inside: Vec<Vec<u16>>,
}

impl MdsPartitionSampler {
    pub fn new(orbits: &[ClassOrbit]) -> Self {
        let mut outside = MSet::empty();
        let mut region = Vec::new();
        for mi in 0..M_SIZE as u16 {
            let d = crate::gf3::digits(full_index(mi), INNER);
            let a: u32 = d.iter().enumerate().map(|(i, &x)| (i as u32 % 3) * x as u32).sum();
            if a % 3 == 0 {
                region.push(mi);
            } else {
                outside.insert(mi);
            }
        }
        let mut inside = Vec::new();
        for o in orbits {
            o.for_each_disjoint(&outside, |e, v| inside.push(o.translate(e, v)));
        }
        Self { region, inside }
    }

    /// Number of RM-like codes inside one translate.
    pub fn num_pieces(&self) -> usize {
        self.inside.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Collection> {
        let mut blocks = Vec::new();
        for s in 0..3u32 {
            // s (e_1 - e_0) has a-value s
            let shift = pack(((3 - s) % 3) + s * POW3[1]);
            let mut rows = self.inside.clone();
            rows.shuffle(rng);
            let mut inst = CoverInstance::new(self.region.len());
            for (j, r) in rows.iter().enumerate() {
                let cols = r
                    .iter()
                    .map(|x| self.region.binary_search(x).map_err(|_| invariant!("piece leaves its region")))
                    .collect::<Result<Vec<_>>>()?;
                inst.add_row(j, cols)?;
            }
            let mut sol = Vec::new();
            solve_all(&inst, |found| {
                sol = found.to_vec();
                false
            });
            if sol.len() != 3 {
                return Err(invariant!("no cover of a hyperplane section of the parity code"));
            }
            for j in sol {
                let words = rows[j].iter().map(|&x| full_index(unpack(padd(pack(x as u32), shift)) as u16));
                blocks.push(Code::from_indices(INNER, words));
            }
        }
        Collection::new(INNER, blocks)
    }
}

/// The code `∪_i C_i × P_τ(i)`.
pub fn build_concatenated(cbar: &Collection, pbar: &Collection, tau: &Perm) -> Result<Code> {
    check_inner(cbar)?;
    check_outer(pbar)?;
    if tau.degree() != BLOCKS {
        return Err(usage!("gluing permutation must have degree 9"));
    }
    Ok(glue(cbar, pbar, tau))
}

fn glue(cbar: &Collection, pbar: &Collection, tau: &Perm) -> Code {
    let mut out = Code::empty(LEN);
    for (i, c) in cbar.blocks().iter().enumerate() {
        let p = pbar.block(tau.apply(i));
        for y in p.iter() {
            let hi = y * POW3[INNER];
            for x in c.iter() {
                out.insert(x + hi);
            }
        }
    }
    out
}

/// Automorphism order of a partition and the block permutations its
/// automorphisms induce.
#[derive(Clone, Debug)]
pub struct PartitionGroup {
    pub aut_order: BigUint,
    pub blocks: PermGroup,
}

/// Block group through the graph certificate.
pub fn block_group(part: &Collection) -> Result<PartitionGroup> {
    let cert = certify_collection(part, Flavor::Full)?;
    let blocks = project_block_group(&cert, part.k())?;
    Ok(PartitionGroup {
        aut_order: cert.aut_order,
        blocks,
    })
}

#[derive(Clone, Debug)]
pub struct ReducedCode {
    pub tau: Perm,
    /// Size of the double coset `T(P̄) τ T(C̄)`.
    pub coset_size: usize,
    /// `|Aut C̄| |Aut P̄| / coset_size`, the automorphism order when the
    /// code is uni-concatenated.
    pub predicted_aut: BigUint,
    pub code: Code,
}

/// Size of the double coset `T(P̄) τ T(C̄)`.
pub fn double_coset_size(inner: &PermGroup, outer: &PermGroup, tau: &Perm) -> usize {
    // |L τ R| = |L| |R| / |L ∩ τ R τ^-1|
    let tinv = tau.inverse();
    let meet = outer
        .elements()
        .iter()
        .filter(|l| inner.contains(&tinv.compose(l).compose(tau)))
        .count();
    outer.order() * inner.order() / meet
}

/// Calls `f` with one concatenated code per double coset
/// `T(P̄) \ Sym(9) / T(C̄)`; codes from one double coset are equivalent.
pub fn for_each_reduced(
    cbar: &Collection,
    cgroup: &PartitionGroup,
    pbar: &Collection,
    pgroup: &PartitionGroup,
    mut f: impl FnMut(ReducedCode) -> Result<()>,
) -> Result<usize> {
    check_inner(cbar)?;
    check_outer(pbar)?;
    let cosets = double_cosets(&pgroup.blocks, &cgroup.blocks)?;
    let n = cosets.len();
    for (tau, size) in cosets {
        let code = glue(cbar, pbar, &tau);
        let predicted_aut = &cgroup.aut_order * &pgroup.aut_order / BigUint::from(size);
        f(ReducedCode {
            tau,
            coset_size: size,
            predicted_aut,
            code,
        })?;
    }
    Ok(n)
}

pub fn generate_reduced(
    cbar: &Collection,
    cgroup: &PartitionGroup,
    pbar: &Collection,
    pgroup: &PartitionGroup,
) -> Result<Vec<ReducedCode>> {
    let mut out = Vec::new();
    for_each_reduced(cbar, cgroup, pbar, pgroup, |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

/// Splits each codeword into its restriction to `support` and to the other
/// coordinates, as point indices of the shorter words.
fn split(c: &Code, support: &[usize]) -> Vec<(u32, u32)> {
    let rest: Vec<usize> = (0..c.n()).filter(|i| !support.contains(i)).collect();
    c.iter()
        .map(|x| {
            let d = crate::gf3::digits(x, c.n());
            let pick = |coords: &[usize]| -> u32 {
                coords.iter().enumerate().map(|(k, &i)| d[i] as u32 * POW3[k]).sum()
            };
            (pick(support), pick(&rest))
        })
        .collect()
}

/// Whether the code is `∪ C_i × P_τ(i)` after moving `support` to the
/// front: the inner fibres over the outer words must be nine RM-like codes
/// partitioning an MDS code, and the outer words over each fibre a
/// 1-perfect code.
pub fn has_concatenation_structure(c: &Code, support: &[usize]) -> Result<bool> {
    if c.n() != LEN || support.len() != INNER {
        return Err(usage!("support of 9 coordinates in a length-13 code expected"));
    }
    let mut fibres: Vec<Vec<u32>> = vec![Vec::new(); num_points(OUTER)];
    for (inner, outer) in split(c, support) {
        fibres[outer as usize].push(inner);
    }
    let mut groups: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
    for (p, mut f) in fibres.into_iter().enumerate() {
        f.sort_unstable();
        groups.entry(f).or_default().push(p as u32);
    }
    if groups.len() != BLOCKS {
        return Ok(false);
    }
    let inner: Vec<Code> = groups.keys().map(|f| Code::from_indices(INNER, f.iter().copied())).collect();
    let mut host = Code::empty(INNER);
    for b in &inner {
        host = host.union(b)?;
    }
    if !is_mds2(&host) {
        return Ok(false);
    }
    for b in &inner {
        if !is_rm_like(b, &host)? {
            return Ok(false);
        }
    }
    Ok(groups
        .values()
        .all(|ps| is_1perfect(&Code::from_indices(OUTER, ps.iter().copied()))))
}

/// Every 9-set of coordinates that is the support of a word orthogonal to
/// the code's affine span and along which the code splits as a
/// concatenation.
pub fn concat_supports(c: &Code) -> Result<Vec<Vec<usize>>> {
    if c.n() != LEN || !is_1perfect(c) {
        return Err(usage!("concatenation supports need a 1-perfect code of length 13"));
    }
    let basis = dual_words(c)?;
    if basis.len() > 6 {
        return Err(usage!("dual of dimension {} is too large to enumerate", basis.len()));
    }
    let mut supports: Vec<Vec<usize>> = Vec::new();
    for combo in 0..3usize.pow(basis.len() as u32) {
        let mut w = vec![0u8; LEN];
        let mut r = combo;
        for b in &basis {
            let k = (r % 3) as u8;
            r /= 3;
            for (i, t) in w.iter_mut().enumerate() {
                *t = (*t + k * b.get(i)) % 3;
            }
        }
        let s: Vec<usize> = (0..LEN).filter(|&i| w[i] != 0).collect();
        if s.len() == INNER && !supports.contains(&s) {
            supports.push(s);
        }
    }
    let mut out = Vec::new();
    for s in supports {
        if has_concatenation_structure(c, &s)? {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

/// Counts of codes by rank and kernel dimension, and by automorphism order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tabulation {
    pub rank_kernel: BTreeMap<(usize, usize), u64>,
    pub aut: BTreeMap<BigUint, u64>,
}

impl Tabulation {
    /// Adds a length-13 1-perfect code; with `with_aut`, also certifies it.
    pub fn add(&mut self, c: &Code, with_aut: bool) -> Result<()> {
        let rank = affine_rank(c)?;
        let ker = kernel(c)?.rank;
        if rank == LEN - 2 && ker < 4 {
            return Err(invariant!("rank {rank} code with kernel dimension {ker} below 4"));
        }
        if ker == INNER && rank > LEN - 2 {
            return Err(invariant!("kernel dimension 9 with rank {rank} above 11"));
        }
        *self.rank_kernel.entry((rank, ker)).or_default() += 1;
        if with_aut {
            let a = certify_code(c, Flavor::Full)?.aut_order;
            *self.aut.entry(a).or_default() += 1;
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.rank_kernel.values().sum()
    }

    /// Ranks down the rows, kernel dimensions across the columns.
    pub fn rank_kernel_csv(&self) -> String {
        let mut s = String::from("rank");
        for k in 0..=LEN - 3 {
            s.push_str(&format!(",kernel{k}"));
        }
        s.push('\n');
        for rank in LEN - 3..=LEN {
            s.push_str(&rank.to_string());
            for k in 0..=LEN - 3 {
                s.push_str(&format!(",{}", self.rank_kernel.get(&(rank, k)).copied().unwrap_or(0)));
            }
            s.push('\n');
        }
        s
    }

    pub fn aut_csv(&self) -> String {
        let mut s = String::from("aut_order,codes\n");
        for (a, n) in &self.aut {
            s.push_str(&format!("{a},{n}\n"));
        }
        s
    }
}

pub fn tabulate<'a>(codes: impl IntoIterator<Item = &'a Code>, with_aut: bool) -> Result<Tabulation> {
    let mut t = Tabulation::default();
    for c in codes {
        t.add(c, with_aut)?;
    }
    if with_aut && t.aut.keys().any(|a| a.is_zero()) {
        return Err(invariant!("zero automorphism order"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::p4::{perfect_codes_len4, perfect_partitions_len4};
    use crate::linalg::hamming_code;

    #[test]
    fn coset_gluing_gives_perfect_codes() {
        let cbar = linear_rm_partition();
        let parts = perfect_partitions_len4(&perfect_codes_len4().unwrap()).unwrap();
        let tau = Perm::identity(9);
        let c = build_concatenated(&cbar, &parts[0], &tau).unwrap();
        assert_eq!(c.len(), 59049);
        assert!(is_1perfect(&c));
        assert!(affine_rank(&c).unwrap() <= 12);
        let s = concat_supports(&c).unwrap();
        assert!(s.contains(&(0..9).collect::<Vec<_>>()));
    }

    #[test]
    fn hamming_code_has_many_supports() {
        let h = hamming_code(3).unwrap();
        let s = concat_supports(&h).unwrap();
        assert!(s.len() >= 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cbar = linear_rm_partition();
        let h4 = hamming_code(2).unwrap();
        let bad = Collection::new(OUTER, vec![h4]).unwrap();
        assert!(build_concatenated(&cbar, &bad, &Perm::identity(9)).is_err());
    }
}

//! Equivalence testing, canonical forms and automorphism groups of codes and
//! collections, through canonical labeling of colored graphs.
//!
//! A code of length `n` becomes a graph on `3n` position-value vertices
//! `(i, v)` (numbered `3i + v`, each coordinate forming a triangle), one
//! vertex per codeword joined to `(i, c_i)` for every `i`, and for a
//! collection one vertex per block joined to the block's codewords. The kind
//! of equivalence is selected by coloring alone.

mod graph;
mod normal;
mod search;

pub use graph::ColoredGraph;
pub use search::{canonical_labeling, Labeling};

use std::fmt;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::collection::Collection;
use crate::error::{usage, Result};
use crate::gf3::{Code, Isometry};
use crate::permgroup::{closure, Perm, PermGroup};

/// Shortest 1-perfect codes certified through normal forms.
pub const NORMAL_FORM_MIN_LEN: usize = 13;

/// The group of maps under which objects are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// All isometries of the Hamming graph (and any block permutation).
    Full,
    /// Isometries fixing the zero word.
    Monomial,
    /// Coordinate permutations only.
    Permutation,
    /// Isometries with block permutations fixing the last block.
    Strong,
    /// Isometries fixing the zero word and preserving the parity code
    /// `x_0 + ... + x_(n-1) = 0`: coordinate permutations, optionally
    /// followed by negating every coordinate.
    ParityMonomial,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::Full => "full",
            Flavor::Monomial => "monomial",
            Flavor::Permutation => "permutation",
            Flavor::Strong => "strong",
            Flavor::ParityMonomial => "parity-monomial",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Flavor {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => Flavor::Full,
            "monomial" => Flavor::Monomial,
            "permutation" => Flavor::Permutation,
            "strong" => Flavor::Strong,
            "parity-monomial" => Flavor::ParityMonomial,
            _ => return Err(usage!("unknown flavor {s:?}")),
        })
    }
}

/// Graph encoding of a code or collection.
#[derive(Clone, Debug)]
pub struct CodeGraph {
    pub graph: ColoredGraph,
    pub n: usize,
    /// Point index of every codeword vertex, in vertex order.
    pub words: Vec<u32>,
    /// Number of block vertices (0 for a plain code).
    pub blocks: usize,
    pub is_collection: bool,
    pub flavor: Flavor,
}

impl CodeGraph {
    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    fn block_base(&self) -> usize {
        3 * self.n + self.words.len()
    }
}

/// Encodes a code.
pub fn encode_code(c: &Code, flavor: Flavor) -> Result<CodeGraph> {
    build(c.n(), std::slice::from_ref(c), false, flavor, None)
}

/// Encodes a collection; one block vertex per block.
pub fn encode_collection(col: &Collection, flavor: Flavor) -> Result<CodeGraph> {
    build(col.n(), col.blocks(), true, flavor, None)
}

/// Like [`encode_code`], with codeword colors refined by an invariant that
/// every map of the flavor's group preserves.
pub fn encode_code_with_invariant(c: &Code, flavor: Flavor, inv: &[u32]) -> Result<CodeGraph> {
    build(c.n(), std::slice::from_ref(c), false, flavor, Some(inv))
}

fn build(n: usize, blocks: &[Code], is_collection: bool, flavor: Flavor, word_inv: Option<&[u32]>) -> Result<CodeGraph> {
    if flavor == Flavor::Strong && !is_collection {
        return Err(usage!("strong flavor applies to collections only"));
    }
    if matches!(flavor, Flavor::Monomial | Flavor::ParityMonomial)
        && !blocks.iter().any(|b| b.contains(0))
    {
        return Err(usage!("monomial flavor needs the zero word in the object"));
    }
    let pv = 3 * n;
    let mut words: Vec<u32> = Vec::new();
    let mut owner: Vec<u32> = Vec::new();
    let mut all: Vec<(u32, u32)> = Vec::new();
    for (j, b) in blocks.iter().enumerate() {
        all.extend(b.iter().map(|x| (x, j as u32)));
    }
    all.sort_unstable();
    for &(x, j) in &all {
        words.push(x);
        owner.push(j);
    }
    let nb = if is_collection { blocks.len() } else { 0 };
    let markers = if flavor == Flavor::ParityMonomial { 2 } else { 0 };
    let total = pv + words.len() + nb + markers;
    let mut colors = vec![0u32; total];
    // position-value colors 0..=2, codewords from 3, blocks and markers after
    for i in 0..n {
        for v in 0..3 {
            colors[3 * i + v] = match flavor {
                Flavor::Full | Flavor::Strong => 0,
                Flavor::Monomial | Flavor::ParityMonomial => (v != 0) as u32,
                Flavor::Permutation => v as u32,
            };
        }
    }
    let word_color_base = 3u32;
    let mut max_word_color = word_color_base;
    for (k, _) in words.iter().enumerate() {
        let c = word_color_base + word_inv.map_or(0, |inv| inv[k]);
        colors[pv + k] = c;
        max_word_color = max_word_color.max(c);
    }
    let block_color = max_word_color + 1;
    for j in 0..nb {
        colors[pv + words.len() + j] = if flavor == Flavor::Strong && j + 1 == nb {
            block_color + 1
        } else {
            block_color
        };
    }
    if markers > 0 {
        colors[total - 2] = block_color + 2;
        colors[total - 1] = block_color + 2;
    }
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(3 * n + words.len() * (n + 1));
    for i in 0..n as u32 {
        edges.push((3 * i, 3 * i + 1));
        edges.push((3 * i, 3 * i + 2));
        edges.push((3 * i + 1, 3 * i + 2));
    }
    for (k, &x) in words.iter().enumerate() {
        let v = (pv + k) as u32;
        let mut r = x;
        for i in 0..n as u32 {
            edges.push((3 * i + r % 3, v));
            r /= 3;
        }
        if is_collection {
            edges.push((v, (pv + words.len()) as u32 + owner[k]));
        }
    }
    if markers > 0 {
        for i in 0..n as u32 {
            edges.push((3 * i + 1, (total - 2) as u32));
            edges.push((3 * i + 2, (total - 1) as u32));
        }
    }
    let graph = ColoredGraph::new(colors, &edges).with_structural(pv as u32);
    Ok(CodeGraph {
        graph,
        n,
        words,
        blocks: nb,
        is_collection,
        flavor,
    })
}

/// Fingerprint of an object's equivalence class together with its
/// automorphism group.
#[derive(Clone, Debug)]
pub struct CanonicalCertificate {
    pub digest: [u8; 32],
    pub aut_order: BigUint,
    pub aut_generators: Vec<Isometry>,
    /// Block permutation of every generator; empty for plain codes.
    pub block_generators: Vec<Perm>,
    /// Number of blocks when the object is a collection.
    pub blocks: Option<usize>,
    /// Maps the object onto the canonical representative of its class.
    pub to_canonical: Isometry,
    /// Block order of the canonical representative (collections only).
    pub canonical_block_order: Vec<usize>,
}

impl CanonicalCertificate {
    pub fn hex(&self) -> String {
        hex::encode(self.digest)
    }
}

impl PartialEq for CanonicalCertificate {
    fn eq(&self, other: &Self) -> bool {
        self.digest == other.digest
    }
}

impl Eq for CanonicalCertificate {}

fn project(cg: &CodeGraph, gamma: &[u32]) -> Result<(Isometry, Option<Perm>)> {
    let n = cg.n;
    let mut perm = vec![0u8; n];
    let mut sym = vec![[0u8; 3]; n];
    for i in 0..n {
        let j = gamma[3 * i] as usize / 3;
        perm[i] = j as u8;
        for v in 0..3 {
            let w = gamma[3 * i + v] as usize;
            if w / 3 != j {
                return Err(crate::error::invariant!("automorphism breaks a coordinate triangle"));
            }
            sym[j][v] = (w % 3) as u8;
        }
    }
    let iso = Isometry::new(perm, sym)?;
    let blocks = if cg.is_collection {
        let base = cg.block_base() as u32;
        let images = (0..cg.blocks as u32).map(|b| (gamma[(base + b) as usize] - base) as u8).collect();
        Some(Perm::new(images)?)
    } else {
        None
    };
    Ok((iso, blocks))
}

/// Hash of a graph relabeled by `pos` (vertex to canonical position),
/// prefixed by its color class sizes.
pub(crate) fn graph_digest(tag: &[u8], g: &ColoredGraph, pos: &[u32]) -> [u8; 32] {
    let nv = g.num_vertices();
    let mut hasher = Sha256::new();
    hasher.update(tag);
    hasher.update((nv as u64).to_le_bytes());
    // color classes in color order
    let mut colors: Vec<u32> = g.colors().to_vec();
    colors.sort_unstable();
    let mut runs: Vec<(u32, u32)> = Vec::new();
    let mut i = 0;
    while i < colors.len() {
        let mut j = i;
        while j < colors.len() && colors[j] == colors[i] {
            j += 1;
        }
        runs.push((colors[i], (j - i) as u32));
        i = j;
    }
    hasher.update((runs.len() as u64).to_le_bytes());
    for (c, r) in &runs {
        hasher.update(c.to_le_bytes());
        hasher.update(r.to_le_bytes());
    }
    let mut edges: Vec<u64> = g
        .edges()
        .map(|(a, b)| {
            let (x, y) = (pos[a as usize] as u64, pos[b as usize] as u64);
            if x < y { (x << 32) | y } else { (y << 32) | x }
        })
        .collect();
    edges.sort_unstable();
    hasher.update((edges.len() as u64).to_le_bytes());
    for e in &edges {
        hasher.update(e.to_le_bytes());
    }
    hasher.finalize().into()
}

/// Canonical labeling of an encoded object.
pub fn canonical_certificate(cg: &CodeGraph) -> Result<CanonicalCertificate> {
    let lab = canonical_labeling(&cg.graph)?;
    let nv = cg.num_vertices();
    let mut pos = vec![0u32; nv];
    for (p, &v) in lab.canon_lab.iter().enumerate() {
        pos[v as usize] = p as u32;
    }
    let digest = graph_digest(b"q3-code-graph\0", &cg.graph, &pos);

    let mut aut_generators = Vec::new();
    let mut block_generators = Vec::new();
    for gamma in &lab.generators {
        let (iso, bp) = project(cg, gamma)?;
        aut_generators.push(iso);
        if let Some(bp) = bp {
            block_generators.push(bp);
        }
    }

    // canonical representative: coordinates ordered by the first canonical
    // position of their triangle, values by canonical position within it
    let n = cg.n;
    let mut coord_order: Vec<usize> = (0..n).collect();
    let tri_min = |i: usize| (0..3).map(|v| pos[3 * i + v]).min().unwrap();
    coord_order.sort_by_key(|&i| tri_min(i));
    let mut perm = vec![0u8; n];
    let mut sym = vec![[0u8; 3]; n];
    for (new_i, &i) in coord_order.iter().enumerate() {
        perm[i] = new_i as u8;
        let mut vals = [0usize, 1, 2];
        vals.sort_by_key(|&v| pos[3 * i + v]);
        for (rank, &v) in vals.iter().enumerate() {
            sym[new_i][v] = rank as u8;
        }
    }
    let to_canonical = Isometry::new(perm, sym)?;
    let canonical_block_order = if cg.is_collection {
        let base = cg.block_base();
        let mut order: Vec<usize> = (0..cg.blocks).collect();
        order.sort_by_key(|&b| pos[base + b]);
        order
    } else {
        Vec::new()
    };
    Ok(CanonicalCertificate {
        digest,
        aut_order: BigUint::from(lab.aut_order),
        aut_generators,
        block_generators,
        blocks: cg.is_collection.then_some(cg.blocks),
        to_canonical,
        canonical_block_order,
    })
}

/// Certificate of a code. Length-13 1-perfect codes under full or monomial
/// equivalence go through normal forms instead of the graph search.
pub fn certify_code(c: &Code, flavor: Flavor) -> Result<CanonicalCertificate> {
    if c.n() >= NORMAL_FORM_MIN_LEN
        && matches!(flavor, Flavor::Full | Flavor::Monomial)
        && crate::perfect::is_1perfect(c)
    {
        if let Some(cert) = normal::certify_perfect(c, flavor)? {
            return Ok(cert);
        }
    }
    canonical_certificate(&encode_code(c, flavor)?)
}

pub fn certify_collection(col: &Collection, flavor: Flavor) -> Result<CanonicalCertificate> {
    canonical_certificate(&encode_collection(col, flavor)?)
}

/// Group of block permutations induced by the automorphisms of a collection.
pub fn project_block_group(cert: &CanonicalCertificate, k: usize) -> Result<PermGroup> {
    match cert.blocks {
        Some(b) if b == k => closure(k, &cert.block_generators),
        Some(b) => Err(usage!("certificate has {b} blocks, not {k}")),
        None => Err(usage!("certificate does not come from a collection")),
    }
}

/// Canonical representative of a code's class.
pub fn canonical_code(c: &Code, cert: &CanonicalCertificate) -> Result<Code> {
    cert.to_canonical.apply_code(c)
}

/// An isometry mapping `a` onto `b` if the two are equivalent.
pub fn find_isometry(a: &Code, b: &Code, flavor: Flavor) -> Result<Option<Isometry>> {
    let ca = certify_code(a, flavor)?;
    let cb = certify_code(b, flavor)?;
    if ca.digest != cb.digest {
        return Ok(None);
    }
    let g = cb.to_canonical.inverse().compose(&ca.to_canonical)?;
    if g.apply_code(a)? != *b {
        return Err(crate::error::invariant!("equal certificates but canonical forms differ"));
    }
    Ok(Some(g))
}

/// Cheap isomorphism invariants used to screen equivalence tests: size,
/// affine rank, kernel dimension and the pairwise distance distribution.
pub fn screening_key(c: &Code) -> Result<Vec<u64>> {
    let mut key = vec![c.n() as u64, c.len() as u64];
    if c.is_empty() {
        return Ok(key);
    }
    key.push(crate::linalg::affine_rank(c)? as u64);
    key.push(crate::linalg::kernel(c)?.rank as u64);
    key.extend(c.distance_pair_counts());
    Ok(key)
}

/// Number of lines `{x, x+u, x+2u}` of weight-3 direction inside the code
/// through each codeword, in codeword order. Every isometry maps such lines
/// onto lines of the same kind, so this is an invariant of full equivalence.
pub fn line_counts(c: &Code) -> Vec<u32> {
    let dirs = crate::gf3::packed_of_weight(c.n(), 3);
    c.iter()
        .map(|x| {
            let p = crate::gf3::pack(x);
            dirs.iter()
                .filter(|&&u| {
                    c.contains_packed(crate::gf3::padd(p, u))
                        && c.contains_packed(crate::gf3::padd(p, crate::gf3::pneg(u)))
                })
                .count() as u32
                / 2
        })
        .collect()
}

//! Words over GF(3), the Hamming metric, and bitset-backed codes.
//!
//! A word of length `n` is identified with its point index
//! `x_0 + 3 x_1 + ... + 3^(n-1) x_(n-1)` (coordinate 0 least significant).
//! Codes store membership as a flat bitset over all `3^n` point indices.
//!
//! Hot loops work on a packed two-plane form of a word: bit `i` of the low
//! half is set when trit `i` equals 1 and bit `i` of the high half when it
//! equals 2. Addition, negation and distance are then a handful of bit
//! operations.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{usage, Error, Result};

/// Largest supported word length.
pub const MAX_LEN: usize = 13;

/// `POW3[i] = 3^i`.
pub const POW3: [u32; MAX_LEN + 2] = {
    let mut t = [1u32; MAX_LEN + 2];
    let mut i = 1;
    while i < MAX_LEN + 2 {
        t[i] = t[i - 1] * 3;
        i += 1;
    }
    t
};

/// Number of points of `F_3^n`.
#[inline]
pub fn num_points(n: usize) -> usize {
    POW3[n] as usize
}

pub(crate) fn check_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LEN {
        return Err(usage!("word length {n} outside [1, {MAX_LEN}]"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// packed words

/// Two-plane packed word (see module docs).
pub type Packed = u32;

const PLANE: u32 = 0x1fff;

struct Tables {
    packed: Vec<u32>,
    idx_lo: [u32; 256],
    idx_hi: [u32; 32],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let total = num_points(MAX_LEN);
        let mut packed = vec![0u32; total];
        for idx in 1..total {
            let d = idx % 3;
            let mut p = packed[idx / 3] << 1;
            if d == 1 {
                p |= 1;
            } else if d == 2 {
                p |= 1 << 16;
            }
            packed[idx] = p;
        }
        let mut idx_lo = [0u32; 256];
        for (b, slot) in idx_lo.iter_mut().enumerate() {
            *slot = (0..8).filter(|i| b >> i & 1 == 1).map(|i| POW3[i]).sum();
        }
        let mut idx_hi = [0u32; 32];
        for (b, slot) in idx_hi.iter_mut().enumerate() {
            *slot = (0..5).filter(|i| b >> i & 1 == 1).map(|i| POW3[i + 8]).sum();
        }
        Tables {
            packed,
            idx_lo,
            idx_hi,
        }
    })
}

/// Packed form of a point index.
#[inline]
pub fn pack(idx: u32) -> Packed {
    tables().packed[idx as usize]
}

#[inline]
fn plane_index(t: &Tables, p: u32) -> u32 {
    t.idx_lo[(p & 0xff) as usize] + t.idx_hi[((p >> 8) & 0x1f) as usize]
}

/// Point index of a packed word.
#[inline]
pub fn unpack(p: Packed) -> u32 {
    let t = tables();
    plane_index(t, p & PLANE) + 2 * plane_index(t, (p >> 16) & PLANE)
}

#[inline]
pub fn padd(a: Packed, b: Packed) -> Packed {
    let (a1, a2) = (a & PLANE, a >> 16);
    let (b1, b2) = (b & PLANE, b >> 16);
    let a0 = !(a1 | a2);
    let b0 = !(b1 | b2);
    let s1 = (a0 & b1) | (a1 & b0) | (a2 & b2);
    let s2 = (a0 & b2) | (a2 & b0) | (a1 & b1);
    (s1 & PLANE) | ((s2 & PLANE) << 16)
}

#[inline]
pub fn pneg(a: Packed) -> Packed {
    (a >> 16) | ((a & PLANE) << 16)
}

#[inline]
pub fn psub(a: Packed, b: Packed) -> Packed {
    padd(a, pneg(b))
}

#[inline]
pub fn pdist(a: Packed, b: Packed) -> u32 {
    let d = a ^ b;
    ((d & PLANE) | (d >> 16)).count_ones()
}

#[inline]
pub fn pweight(a: Packed) -> u32 {
    ((a & PLANE) | (a >> 16)).count_ones()
}

/// Trit at coordinate `i` of a packed word.
#[inline]
pub fn ptrit(a: Packed, i: usize) -> u8 {
    ((a >> i) & 1) as u8 | ((((a >> 16) >> i) & 1) << 1) as u8
}

/// Packed word with a single nonzero trit.
#[inline]
pub fn punit(i: usize, v: u8) -> Packed {
    match v % 3 {
        0 => 0,
        1 => 1 << i,
        _ => 1 << (i + 16),
    }
}

/// Point index addition.
#[inline]
pub fn add_idx(a: u32, b: u32) -> u32 {
    unpack(padd(pack(a), pack(b)))
}

#[inline]
pub fn sub_idx(a: u32, b: u32) -> u32 {
    unpack(psub(pack(a), pack(b)))
}

/// Digits of a point index.
#[inline]
pub fn digits(mut idx: u32, n: usize) -> [u8; MAX_LEN] {
    let mut d = [0u8; MAX_LEN];
    for slot in d.iter_mut().take(n) {
        *slot = (idx % 3) as u8;
        idx /= 3;
    }
    d
}

/// All packed words of the given length and exact weight.
pub fn packed_of_weight(n: usize, w: usize) -> Vec<Packed> {
    let mut out = Vec::new();
    fn rec(n: usize, start: usize, left: usize, acc: Packed, out: &mut Vec<Packed>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < left {
                break;
            }
            for v in 1..=2u8 {
                rec(n, i + 1, left - 1, acc | punit(i, v), out);
            }
        }
    }
    rec(n, 0, w, 0, &mut out);
    out
}

// ---------------------------------------------------------------------------
// words

/// A word of length `n <= 13` over `{0, 1, 2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TernaryWord {
    len: u8,
    trits: [u8; MAX_LEN],
}

impl TernaryWord {
    pub fn new(trits: &[u8]) -> Result<Self> {
        check_len(trits.len())?;
        let mut t = [0u8; MAX_LEN];
        for (i, &x) in trits.iter().enumerate() {
            if x > 2 {
                return Err(usage!("trit {x} at coordinate {i} not in {{0,1,2}}"));
            }
            t[i] = x;
        }
        Ok(Self {
            len: trits.len() as u8,
            trits: t,
        })
    }

    pub fn zero(n: usize) -> Self {
        assert!((1..=MAX_LEN).contains(&n));
        Self {
            len: n as u8,
            trits: [0; MAX_LEN],
        }
    }

    pub fn from_index(n: usize, idx: u32) -> Self {
        debug_assert!((idx as usize) < num_points(n));
        Self {
            len: n as u8,
            trits: digits(idx, n),
        }
    }

    pub fn from_packed(n: usize, p: Packed) -> Self {
        let mut trits = [0u8; MAX_LEN];
        for (i, slot) in trits.iter_mut().enumerate().take(n) {
            *slot = ptrit(p, i);
        }
        Self {
            len: n as u8,
            trits,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn trits(&self) -> &[u8] {
        &self.trits[..self.len as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.trits[i]
    }

    pub fn set(&mut self, i: usize, v: u8) {
        assert!(i < self.len() && v < 3);
        self.trits[i] = v;
    }

    pub fn index(&self) -> u32 {
        self.trits()
            .iter()
            .enumerate()
            .map(|(i, &t)| t as u32 * POW3[i])
            .sum()
    }

    pub fn packed(&self) -> Packed {
        self.trits()
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &t)| acc | punit(i, t))
    }

    pub fn weight(&self) -> usize {
        self.trits().iter().filter(|&&t| t != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.trits[i] != 0).collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u8, u8) -> u8) -> Result<Self> {
        if self.len != other.len {
            return Err(usage!("length mismatch: {} vs {}", self.len, other.len));
        }
        let mut out = *self;
        for i in 0..self.len() {
            out.trits[i] = f(self.trits[i], other.trits[i]);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| (a + b) % 3)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| (a + 3 - b) % 3)
    }

    pub fn scale(&self, k: u8) -> Self {
        let mut out = *self;
        for t in out.trits.iter_mut().take(self.len()) {
            *t = (*t * (k % 3)) % 3;
        }
        out
    }

    /// Standard inner product over GF(3).
    pub fn dot(&self, other: &Self) -> Result<u8> {
        if self.len != other.len {
            return Err(usage!("length mismatch: {} vs {}", self.len, other.len));
        }
        Ok((self
            .trits()
            .iter()
            .zip(other.trits())
            .map(|(&a, &b)| (a * b) as u32)
            .sum::<u32>()
            % 3) as u8)
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let n = self.len() + other.len();
        check_len(n)?;
        let mut t = [0u8; MAX_LEN];
        t[..self.len()].copy_from_slice(self.trits());
        t[self.len()..n].copy_from_slice(other.trits());
        Ok(Self {
            len: n as u8,
            trits: t,
        })
    }
}

impl fmt::Display for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &t in self.trits() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TernaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TernaryWord({self})")
    }
}

impl FromStr for TernaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trits: Vec<u8> = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::Parse(format!("bad trit {c:?} in {s:?}"))),
            })
            .collect::<Result<_>>()?;
        TernaryWord::new(&trits).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Hamming distance between two words of equal length.
pub fn hamming_distance(x: &TernaryWord, y: &TernaryWord) -> Result<usize> {
    if x.len != y.len {
        return Err(usage!("length mismatch: {} vs {}", x.len, y.len));
    }
    Ok(x.trits()
        .iter()
        .zip(y.trits())
        .filter(|(a, b)| a != b)
        .count())
}

// ---------------------------------------------------------------------------
// codes

/// A set of words of a fixed length, stored as a bitset over point indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Code {
    len: u8,
    count: usize,
    bits: Vec<u64>,
}

impl Code {
    pub fn empty(n: usize) -> Self {
        check_len(n).expect("invalid code length");
        Self {
            len: n as u8,
            count: 0,
            bits: vec![0; num_points(n).div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut c = Self::empty(n);
        for i in 0..num_points(n) as u32 {
            c.insert(i);
        }
        c
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = u32>) -> Self {
        let mut c = Self::empty(n);
        for i in idx {
            c.insert(i);
        }
        c
    }

    pub fn from_words<'a>(n: usize, words: impl IntoIterator<Item = &'a TernaryWord>) -> Result<Self> {
        check_len(n)?;
        let mut c = Self::empty(n);
        for w in words {
            if w.len() != n {
                return Err(usage!("word {w} has length {} not {n}", w.len()));
            }
            c.insert(w.index());
        }
        Ok(c)
    }

    /// Code of all points satisfying a predicate.
    pub fn from_predicate(n: usize, mut pred: impl FnMut(u32) -> bool) -> Self {
        Self::from_indices(n, (0..num_points(n) as u32).filter(|&i| pred(i)))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn contains(&self, idx: u32) -> bool {
        let i = idx as usize;
        i < num_points(self.n()) && self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn contains_packed(&self, p: Packed) -> bool {
        let i = unpack(p) as usize;
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    pub fn contains_word(&self, w: &TernaryWord) -> bool {
        w.len() == self.n() && self.contains(w.index())
    }

    /// Inserts a point; returns true if it was absent.
    pub fn insert(&mut self, idx: u32) -> bool {
        let i = idx as usize;
        assert!(i < num_points(self.n()), "point {idx} out of range");
        let m = 1u64 << (i & 63);
        if self.bits[i >> 6] & m != 0 {
            return false;
        }
        self.bits[i >> 6] |= m;
        self.count += 1;
        true
    }

    pub fn remove(&mut self, idx: u32) -> bool {
        let i = idx as usize;
        if i >= num_points(self.n()) {
            return false;
        }
        let m = 1u64 << (i & 63);
        if self.bits[i >> 6] & m == 0 {
            return false;
        }
        self.bits[i >> 6] &= !m;
        self.count -= 1;
        true
    }

    /// Point indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((wi as u32) * 64 + b)
            })
        })
    }

    pub fn indices(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn packed_words(&self) -> Vec<Packed> {
        self.iter().map(pack).collect()
    }

    pub fn words(&self) -> impl Iterator<Item = TernaryWord> + '_ {
        let n = self.n();
        self.iter().map(move |i| TernaryWord::from_index(n, i))
    }

    pub fn first(&self) -> Option<u32> {
        self.iter().next()
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(usage!("codes of lengths {} and {}", self.len, other.len));
        }
        Ok(())
    }

    fn from_bits(n: u8, bits: Vec<u64>) -> Self {
        let count = bits.iter().map(|w| w.count_ones() as usize).sum();
        Self {
            len: n,
            count,
            bits,
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        Ok(Self::from_bits(self.len, bits))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect();
        Ok(Self::from_bits(self.len, bits))
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a & !b).collect();
        Ok(Self::from_bits(self.len, bits))
    }

    pub fn complement(&self) -> Self {
        let total = num_points(self.n());
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        let tail = total % 64;
        if tail != 0 {
            *bits.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        Self::from_bits(self.len, bits)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0))
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    /// The translate `C + v`.
    pub fn translate(&self, v: &TernaryWord) -> Result<Self> {
        if v.len() != self.n() {
            return Err(usage!("translation vector length {} != {}", v.len(), self.n()));
        }
        let pv = v.packed();
        Ok(Self::from_indices(
            self.n(),
            self.iter().map(|i| unpack(padd(pack(i), pv))),
        ))
    }

    /// Whether `v + C = C`.
    pub fn is_period(&self, v: Packed) -> bool {
        self.iter().all(|i| self.contains_packed(padd(pack(i), v)))
    }

    /// Distance distribution between ordered pairs of codewords, divided by
    /// the code size (the usual `A_i`); returned as raw pair counts.
    pub fn distance_pair_counts(&self) -> Vec<u64> {
        let words = self.packed_words();
        let mut counts = vec![0u64; self.n() + 1];
        for (i, &a) in words.iter().enumerate() {
            for &b in &words[i + 1..] {
                counts[pdist(a, b) as usize] += 1;
            }
        }
        counts
    }

    pub fn weight_distribution(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n() + 1];
        for i in self.iter() {
            counts[pweight(pack(i)) as usize] += 1;
        }
        counts
    }

    /// Serializes in the plain text code format.
    pub fn to_text(&self) -> String {
        let mut s = format!("# q=3 n={} size={}\n", self.n(), self.len());
        for w in self.words() {
            s.push_str(&w.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let (n, size) = parse_header(header)?;
        let mut code = Code::empty(n);
        let mut last: Option<u32> = None;
        for line in lines {
            let w: TernaryWord = line.parse()?;
            if w.len() != n {
                return Err(Error::Parse(format!("word {w} has length {} not {n}", w.len())));
            }
            let idx = w.index();
            if let Some(p) = last {
                if idx <= p {
                    return Err(Error::Parse(format!(
                        "codewords not in ascending point order at {w}"
                    )));
                }
            }
            last = Some(idx);
            code.insert(idx);
        }
        if code.len() != size {
            return Err(Error::Parse(format!(
                "header says size={size} but {} codewords follow",
                code.len()
            )));
        }
        Ok(code)
    }
}

pub(crate) fn parse_header(header: &str) -> Result<(usize, usize)> {
    let rest = header
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
    let mut q = None;
    let mut n = None;
    let mut size = None;
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header token {tok:?}")))?;
        let v: usize = v
            .parse()
            .map_err(|_| Error::Parse(format!("bad header value {tok:?}")))?;
        match k {
            "q" => q = Some(v),
            "n" => n = Some(v),
            "size" => size = Some(v),
            _ => {}
        }
    }
    if q != Some(3) {
        return Err(Error::Parse("only q=3 is supported".into()));
    }
    let n = n.ok_or_else(|| Error::Parse("header lacks n=".into()))?;
    check_len(n).map_err(|e| Error::Parse(e.to_string()))?;
    let size = size.ok_or_else(|| Error::Parse("header lacks size=".into()))?;
    Ok((n, size))
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Code(n={}, size={})", self.n(), self.len())
    }
}

/// Minimum distance between distinct codewords.
pub fn min_distance(c: &Code) -> Result<usize> {
    if c.len() < 2 {
        return Err(usage!("minimum distance needs at least two codewords"));
    }
    let n = c.n();
    let words = c.packed_words();
    // Pairwise scan for small codes, ball probing for large ones.
    let pair_cost = (words.len() as u64).pow(2) / 2;
    let mut ball_cost = 0u64;
    for r in 1..=n {
        ball_cost += binom(n, r) * (1 << r);
        if ball_cost * words.len() as u64 >= pair_cost {
            let mut best = n;
            for (i, &a) in words.iter().enumerate() {
                for &b in &words[i + 1..] {
                    best = best.min(pdist(a, b) as usize);
                }
            }
            return Ok(best);
        }
        let shell = packed_of_weight(n, r);
        for &a in &words {
            if shell.iter().any(|&u| c.contains_packed(padd(a, u))) {
                return Ok(r);
            }
        }
    }
    unreachable!("two distinct words are at distance at most n")
}

pub(crate) fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

// ---------------------------------------------------------------------------
// isometries

/// An automorphism of the Hamming graph `H(n,3)`: a coordinate permutation
/// followed by a permutation of symbols at every coordinate.
///
/// The image `y = g(x)` satisfies `y[perm[i]] = sym[perm[i]][x[i]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    perm: Vec<u8>,
    sym: Vec<[u8; 3]>,
}

fn is_sym3(s: &[u8; 3]) -> bool {
    let mut seen = [false; 3];
    for &v in s {
        if v > 2 || seen[v as usize] {
            return false;
        }
        seen[v as usize] = true;
    }
    true
}

fn invert3(s: &[u8; 3]) -> [u8; 3] {
    let mut r = [0u8; 3];
    for (i, &v) in s.iter().enumerate() {
        r[v as usize] = i as u8;
    }
    r
}

impl Isometry {
    pub fn new(perm: Vec<u8>, sym: Vec<[u8; 3]>) -> Result<Self> {
        let n = perm.len();
        check_len(n)?;
        if sym.len() != n {
            return Err(usage!("isometry has {} symbol maps for {n} coordinates", sym.len()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p as usize >= n || seen[p as usize] {
                return Err(usage!("coordinate map {perm:?} is not a permutation"));
            }
            seen[p as usize] = true;
        }
        if !sym.iter().all(is_sym3) {
            return Err(usage!("symbol maps {sym:?} are not permutations of {{0,1,2}}"));
        }
        Ok(Self { perm, sym })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n as u8).collect(),
            sym: vec![[0, 1, 2]; n],
        }
    }

    /// Translation by `v`.
    pub fn translation(v: &TernaryWord) -> Self {
        let n = v.len();
        Self {
            perm: (0..n as u8).collect(),
            sym: v
                .trits()
                .iter()
                .map(|&t| [t, (1 + t) % 3, (2 + t) % 3])
                .collect(),
        }
    }

    /// Pure coordinate permutation: coordinate `i` moves to `perm[i]`.
    pub fn coordinate_permutation(perm: Vec<u8>) -> Result<Self> {
        let n = perm.len();
        Self::new(perm, vec![[0, 1, 2]; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<u8> = (0..n as u8).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        const S3: [[u8; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let sym = (0..n).map(|_| S3[rng.gen_range(0..6)]).collect();
        Self { perm, sym }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[u8] {
        &self.perm
    }

    pub fn sym(&self) -> &[[u8; 3]] {
        &self.sym
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
            && self.sym.iter().all(|s| *s == [0, 1, 2])
    }

    /// Whether the map fixes the zero word, i.e. is monomial.
    pub fn fixes_zero(&self) -> bool {
        self.sym.iter().all(|s| s[0] == 0)
    }

    pub fn apply_word(&self, x: &TernaryWord) -> Result<TernaryWord> {
        if x.len() != self.n() {
            return Err(usage!("word length {} != isometry length {}", x.len(), self.n()));
        }
        let mut y = TernaryWord::zero(self.n());
        for i in 0..self.n() {
            let p = self.perm[i] as usize;
            y.set(p, self.sym[p][x.get(i) as usize]);
        }
        Ok(y)
    }

    /// `table[i][v]` is the contribution of trit `v` at coordinate `i` to
    /// the image point index.
    pub fn index_table(&self) -> Vec<[u32; 3]> {
        (0..self.n())
            .map(|i| {
                let p = self.perm[i] as usize;
                let s = self.sym[p];
                [
                    s[0] as u32 * POW3[p],
                    s[1] as u32 * POW3[p],
                    s[2] as u32 * POW3[p],
                ]
            })
            .collect()
    }

    #[inline]
    pub fn apply_index_with(table: &[[u32; 3]], mut idx: u32) -> u32 {
        let mut out = 0;
        for t in table {
            out += t[(idx % 3) as usize];
            idx /= 3;
        }
        out
    }

    pub fn apply_index(&self, idx: u32) -> u32 {
        Self::apply_index_with(&self.index_table(), idx)
    }

    pub fn apply_code(&self, c: &Code) -> Result<Code> {
        if c.n() != self.n() {
            return Err(usage!("code length {} != isometry length {}", c.n(), self.n()));
        }
        let t = self.index_table();
        Ok(Code::from_indices(
            c.n(),
            c.iter().map(|i| Self::apply_index_with(&t, i)),
        ))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.n() != other.n() {
            return Err(usage!("composing isometries of lengths {} and {}", self.n(), other.n()));
        }
        let n = self.n();
        let mut perm = vec![0u8; n];
        let mut sym = vec![[0u8; 3]; n];
        for i in 0..n {
            let j = other.perm[i] as usize;
            let k = self.perm[j] as usize;
            perm[i] = k as u8;
            let sj = other.sym[j];
            let sk = self.sym[k];
            sym[k] = [sk[sj[0] as usize], sk[sj[1] as usize], sk[sj[2] as usize]];
        }
        Ok(Isometry { perm, sym })
    }

    pub fn inverse(&self) -> Isometry {
        let n = self.n();
        let mut perm = vec![0u8; n];
        let mut sym = vec![[0u8; 3]; n];
        for i in 0..n {
            let j = self.perm[i] as usize;
            perm[j] = i as u8;
            sym[i] = invert3(&self.sym[j]);
        }
        Isometry { perm, sym }
    }
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isometry(perm={:?}, sym={:?})", self.perm, self.sym)
    }
}

/// Image of a code under an isometry.
pub fn apply_isometry(g: &Isometry, c: &Code) -> Result<Code> {
    g.apply_code(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn w(s: &str) -> TernaryWord {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&w("000"), &w("000")).unwrap(), 0);
        assert_eq!(hamming_distance(&w("0120"), &w("0210")).unwrap(), 2);
        assert!(hamming_distance(&w("01"), &w("012")).is_err());
    }

    #[test]
    fn index_is_little_endian() {
        assert_eq!(w("100").index(), 1);
        assert_eq!(w("010").index(), 3);
        assert_eq!(w("002").index(), 18);
        assert_eq!(TernaryWord::from_index(3, 18), w("002"));
    }

    #[test]
    fn index_bijection_exhaustive_small() {
        for n in 1..=6 {
            for idx in 0..num_points(n) as u32 {
                let x = TernaryWord::from_index(n, idx);
                assert_eq!(x.index(), idx);
                assert_eq!(unpack(x.packed()), idx);
                assert_eq!(pack(idx), x.packed());
            }
        }
    }

    #[test]
    fn packed_arithmetic_matches_trits() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(1..=MAX_LEN);
            let a = TernaryWord::from_index(n, rng.gen_range(0..num_points(n) as u32));
            let b = TernaryWord::from_index(n, rng.gen_range(0..num_points(n) as u32));
            assert_eq!(padd(a.packed(), b.packed()), a.add(&b).unwrap().packed());
            assert_eq!(psub(a.packed(), b.packed()), a.sub(&b).unwrap().packed());
            assert_eq!(
                pdist(a.packed(), b.packed()) as usize,
                hamming_distance(&a, &b).unwrap()
            );
        }
    }

    #[test]
    fn identity_and_swap() {
        let c = Code::from_words(2, &[w("01"), w("10")]).unwrap();
        assert_eq!(Isometry::identity(2).apply_code(&c).unwrap(), c);
        let swap = Isometry::coordinate_permutation(vec![1, 0]).unwrap();
        assert_eq!(swap.apply_code(&c).unwrap(), c);
        assert_eq!(swap.apply_word(&w("01")).unwrap(), w("10"));
    }

    #[test]
    fn isometry_group_axioms() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let g = Isometry::random(n, &mut rng);
            let h = Isometry::random(n, &mut rng);
            let k = Isometry::random(n, &mut rng);
            assert!(g.compose(&g.inverse()).unwrap().is_identity());
            assert!(g.inverse().compose(&g).unwrap().is_identity());
            let gh_k = g.compose(&h).unwrap().compose(&k).unwrap();
            let g_hk = g.compose(&h.compose(&k).unwrap()).unwrap();
            assert_eq!(gh_k, g_hk);
            let x = TernaryWord::from_index(n, rng.gen_range(0..num_points(n) as u32));
            let y = TernaryWord::from_index(n, rng.gen_range(0..num_points(n) as u32));
            assert_eq!(
                g.compose(&h).unwrap().apply_word(&x).unwrap(),
                g.apply_word(&h.apply_word(&x).unwrap()).unwrap()
            );
            assert_eq!(
                hamming_distance(&x, &y).unwrap(),
                hamming_distance(&g.apply_word(&x).unwrap(), &g.apply_word(&y).unwrap()).unwrap()
            );
            assert_eq!(g.apply_index(x.index()), g.apply_word(&x).unwrap().index());
        }
    }

    #[test]
    fn min_distance_small() {
        assert_eq!(min_distance(&Code::full(2)).unwrap(), 1);
        assert!(min_distance(&Code::from_words(2, &[w("00")]).unwrap()).is_err());
        let c = Code::from_words(3, &[w("000"), w("111"), w("222")]).unwrap();
        assert_eq!(min_distance(&c).unwrap(), 3);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let c = Code::from_words(3, &[w("210"), w("000"), w("111")]).unwrap();
        let text = c.to_text();
        assert!(text.starts_with("# q=3 n=3 size=3\n000\n210\n111\n"));
        assert_eq!(Code::from_text(&text).unwrap(), c);
        assert!(Code::from_text("# q=3 n=3 size=2\n000\n").is_err());
        assert!(Code::from_text("# q=3 n=3 size=2\n111\n000\n").is_err());
        assert!(Code::from_text("# q=2 n=3 size=0\n").is_err());
    }

    #[test]
    fn set_operations() {
        let a = Code::from_indices(2, [0, 1, 2]);
        let b = Code::from_indices(2, [2, 3]);
        assert_eq!(a.union(&b).unwrap().len(), 4);
        assert_eq!(a.intersection(&b).unwrap().indices(), vec![2]);
        assert!(!a.is_disjoint(&b).unwrap());
        assert_eq!(a.complement().len(), 6);
        assert!(a.is_disjoint(&a.complement()).unwrap());
    }
}

//! Linear algebra over GF(3): matrices, spans, ranks, kernels, and the
//! linear Hamming codes.

use std::collections::HashSet;
use std::fmt;

use crate::error::{usage, Result};
use crate::gf3::{check_len, num_points, pack, padd, pneg, ptrit, punit, unpack, Code, Packed, TernaryWord};

#[inline]
fn inv3(a: u8) -> u8 {
    // 1 and 2 are their own inverses mod 3
    a
}

/// Dense row-major matrix over GF(3).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf3Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Gf3Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(usage!("ragged matrix rows"));
            }
            if r.iter().any(|&x| x > 2) {
                return Err(usage!("matrix entry outside GF(3)"));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_words(words: &[TernaryWord]) -> Result<Self> {
        let rows: Vec<Vec<u8>> = words.iter().map(|w| w.trits().to_vec()).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v % 3;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (self
                    .row(r)
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| (a * b) as u32)
                    .sum::<u32>()
                    % 3) as u8
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (Gf3Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let s = inv3(m.get(r, c));
            for j in 0..m.cols {
                let v = m.get(r, j) * s;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let f = m.get(i, c);
                if i != r && f != 0 {
                    for j in 0..m.cols {
                        let v = m.get(i, j) + 3 * 3 - f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<u8>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u8; self.cols];
                v[f] = 1;
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = (3 - m.get(i, f)) % 3;
                }
                v
            })
            .collect()
    }

    /// The linear code with this matrix as check matrix.
    pub fn null_code(&self) -> Result<Code> {
        let n = self.cols;
        check_len(n)?;
        // syndrome contribution of each coordinate value, as a base-3 integer
        let mut contrib = vec![[0u32; 3]; n];
        for (c, slot) in contrib.iter_mut().enumerate() {
            for v in 1..3u8 {
                let col: Vec<u8> = self.column(c).iter().map(|&x| x * v % 3).collect();
                slot[v as usize] = col.iter().fold(0u32, |acc, &x| acc * 3 + x as u32);
            }
        }
        // syndromes are added digit-wise mod 3, so encode them as packed words
        let rows = self.rows;
        if rows > crate::gf3::MAX_LEN {
            return Err(usage!("check matrix has too many rows"));
        }
        let packed: Vec<[Packed; 3]> = contrib
            .iter()
            .map(|s| [0, pack_digits(s[1], rows), pack_digits(s[2], rows)])
            .collect();
        let mut code = Code::empty(n);
        let total = num_points(n) as u32;
        for idx in 0..total {
            let mut s: Packed = 0;
            let mut x = idx;
            for p in &packed {
                let d = (x % 3) as usize;
                x /= 3;
                if d != 0 {
                    s = padd(s, p[d]);
                }
            }
            if s == 0 {
                code.insert(idx);
            }
        }
        Ok(code)
    }

    /// Rows as trit strings, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            for &x in self.row(r) {
                s.push((b'0' + x) as char);
            }
            s.push('\n');
        }
        s
    }
}

fn pack_digits(v: u32, len: usize) -> Packed {
    let mut p = 0;
    let mut x = v;
    for i in 0..len {
        p |= punit(i, (x % 3) as u8);
        x /= 3;
    }
    p
}

impl fmt::Debug for Gf3Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf3Matrix {}x{}\n{}", self.rows, self.cols, self.to_text())
    }
}

// ---------------------------------------------------------------------------
// incremental echelon basis on packed words

/// A basis kept in echelon form: each vector has a distinct pivot coordinate
/// holding 1 and zeros at the pivots of the others.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    vecs: Vec<(usize, Packed)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    /// Reduces `v` against the basis; the result is a canonical coset
    /// representative modulo the span.
    pub fn reduce(&self, mut v: Packed) -> Packed {
        for &(p, b) in &self.vecs {
            match ptrit(v, p) {
                0 => {}
                1 => v = padd(v, pneg(b)),
                _ => v = padd(v, b),
            }
        }
        v
    }

    pub fn contains(&self, v: Packed) -> bool {
        self.reduce(v) == 0
    }

    /// Adds `v` if independent; returns whether the dimension grew.
    pub fn insert(&mut self, v: Packed) -> bool {
        let mut r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let p = (0..16).find(|&i| ptrit(r, i) != 0).unwrap();
        if ptrit(r, p) == 2 {
            r = pneg(r);
        }
        for (_, b) in self.vecs.iter_mut() {
            match ptrit(*b, p) {
                0 => {}
                1 => *b = padd(*b, pneg(r)),
                _ => *b = padd(*b, r),
            }
        }
        self.vecs.push((p, r));
        true
    }

    pub fn vectors(&self) -> Vec<Packed> {
        let mut v: Vec<_> = self.vecs.clone();
        v.sort();
        v.into_iter().map(|(_, b)| b).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.vecs.iter().map(|&(p, _)| p).collect();
        p.sort();
        p
    }
}

/// A base point together with a basis of directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanInfo {
    pub base_point: TernaryWord,
    pub basis: Vec<TernaryWord>,
    pub rank: usize,
}

impl SpanInfo {
    /// Every point of the affine span.
    pub fn points(&self) -> Code {
        let n = self.base_point.len();
        let base = self.base_point.packed();
        let dirs: Vec<Packed> = self.basis.iter().map(|b| b.packed()).collect();
        let mut pts = vec![base];
        for &d in &dirs {
            let prev = pts.clone();
            for &p in &prev {
                let a = padd(p, d);
                pts.push(a);
                pts.push(padd(a, d));
            }
        }
        Code::from_indices(n, pts.into_iter().map(unpack))
    }
}

fn words_of(n: usize, v: Vec<Packed>) -> Vec<TernaryWord> {
    v.into_iter().map(|p| TernaryWord::from_packed(n, p)).collect()
}

/// Affine span of a nonempty code, based at its first codeword.
pub fn affine_span(c: &Code) -> Result<SpanInfo> {
    let c0 = c.first().ok_or_else(|| usage!("affine span of an empty code"))?;
    let n = c.n();
    let p0 = pneg(pack(c0));
    let mut basis = EchelonBasis::new();
    for i in c.iter() {
        basis.insert(padd(pack(i), p0));
        if basis.dim() == n {
            break;
        }
    }
    let rank = basis.dim();
    Ok(SpanInfo {
        base_point: TernaryWord::from_index(n, c0),
        basis: words_of(n, basis.vectors()),
        rank,
    })
}

/// Dimension of the affine span.
pub fn affine_rank(c: &Code) -> Result<usize> {
    Ok(affine_span(c)?.rank)
}

/// The kernel `{v : v + C = C}` of a nonempty code, as a linear subspace.
pub fn kernel(c: &Code) -> Result<SpanInfo> {
    let c0 = c.first().ok_or_else(|| usage!("kernel of an empty code"))?;
    let n = c.n();
    let words = c.packed_words();
    let p0 = pneg(pack(c0));
    let mut ker = EchelonBasis::new();
    let mut failed: HashSet<Packed> = HashSet::new();
    for &w in &words {
        let v = padd(w, p0);
        let r = ker.reduce(v);
        if r == 0 || failed.contains(&r) {
            continue;
        }
        if words.iter().all(|&x| c.contains_packed(padd(x, v))) {
            ker.insert(v);
            // representatives recorded before the span grew are stale
            failed = failed.into_iter().map(|f| ker.reduce(f)).collect();
        } else {
            failed.insert(r);
        }
    }
    let rank = ker.dim();
    Ok(SpanInfo {
        base_point: TernaryWord::zero(n),
        basis: words_of(n, ker.vectors()),
        rank,
    })
}

/// Basis of the orthogonal complement of the linear span of `{x - c0}`.
pub fn dual_words(c: &Code) -> Result<Vec<TernaryWord>> {
    let span = affine_span(c)?;
    let n = c.n();
    if span.basis.is_empty() {
        return (0..n)
            .map(|i| {
                let mut t = vec![0u8; n];
                t[i] = 1;
                TernaryWord::new(&t)
            })
            .collect();
    }
    let m = Gf3Matrix::from_words(&span.basis)?;
    m.nullspace().iter().map(|v| TernaryWord::new(v)).collect()
}

/// Check matrix of the linear Hamming code with `m` check symbols.
pub fn hamming_check_matrix(m: usize) -> Result<Gf3Matrix> {
    if !(1..=3).contains(&m) {
        return Err(usage!("Hamming code parameter m={m} outside [1,3]"));
    }
    let mut cols: Vec<Vec<u8>> = Vec::new();
    for v in 0..3u32.pow(m as u32) {
        // digit 0 (top row) most significant
        let col: Vec<u8> = (0..m)
            .map(|r| ((v / 3u32.pow((m - 1 - r) as u32)) % 3) as u8)
            .collect();
        if col.iter().find(|&&x| x != 0) == Some(&1) {
            cols.push(col);
        }
    }
    let n = cols.len();
    let mut h = Gf3Matrix::zeros(m, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, &x) in col.iter().enumerate() {
            h.set(r, c, x);
        }
    }
    Ok(h)
}

/// The linear 1-perfect code of length `(3^m - 1)/2`.
pub fn hamming_code(m: usize) -> Result<Code> {
    hamming_check_matrix(m)?.null_code()
}

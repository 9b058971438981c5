//! Codes of rank at most one above the Hamming code: construction from
//! affine quasigroups, exact counting, and two-coordinate switchings.
//!
//! Coordinates of a length `n = (3^m - 1)/2` word are grouped into triples
//! `(3g, 3g+1, 3g+2)` for `g < t = (n-1)/3`, followed by the last coordinate
//! `n-1`. For `mu` in the Hamming code `C*` of length `t`, the component
//! `K_mu` consists of the words with
//! `x_(3g+2) = mu_g - x_(3g) - x_(3g+1)` and
//! `x_(n-1) = lambda_mu(x_1 - x_0, x_4 - x_3, ...)`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invariant, usage, Result};
use crate::gf3::{num_points, pack, packed_of_weight, padd, unpack, Code, Isometry, TernaryWord, POW3};
use crate::linalg::hamming_code;
use crate::perfect::is_1perfect;

/// `f(z) = a_0 z_0 + ... + a_(t-1) z_(t-1) + a` with every `a_i` in `{1,2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineQuasigroup {
    coeffs: Vec<u8>,
    constant: u8,
}

impl AffineQuasigroup {
    pub fn new(coeffs: Vec<u8>, constant: u8) -> Result<Self> {
        if coeffs.iter().any(|&a| a != 1 && a != 2) {
            return Err(usage!("quasigroup coefficients {coeffs:?} must be 1 or 2"));
        }
        if constant > 2 {
            return Err(usage!("quasigroup constant {constant} outside {{0,1,2}}"));
        }
        Ok(Self { coeffs, constant })
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn constant(&self) -> u8 {
        self.constant
    }

    pub fn eval(&self, z: &[u8]) -> u8 {
        debug_assert_eq!(z.len(), self.arity());
        let s: u32 = self
            .coeffs
            .iter()
            .zip(z)
            .map(|(&a, &x)| (a * x) as u32)
            .sum();
        ((s + self.constant as u32) % 3) as u8
    }

    /// All `3 * 2^t` instances of arity `t`, in a fixed order.
    pub fn all(t: usize) -> Vec<AffineQuasigroup> {
        let mut out = Vec::with_capacity(3 << t);
        for mask in 0..1u32 << t {
            let coeffs: Vec<u8> = (0..t).map(|i| 1 + (mask >> i & 1) as u8).collect();
            for a in 0..3 {
                out.push(AffineQuasigroup {
                    coeffs: coeffs.clone(),
                    constant: a,
                });
            }
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(t: usize, rng: &mut R) -> Self {
        Self {
            coeffs: (0..t).map(|_| rng.gen_range(1..=2)).collect(),
            constant: rng.gen_range(0..3),
        }
    }
}

/// Swaps the two values other than `a` in argument `i`.
pub fn gamma_transform(q: &AffineQuasigroup, i: usize, a: u8) -> Result<AffineQuasigroup> {
    if i >= q.arity() {
        return Err(usage!("argument {i} out of range for arity {}", q.arity()));
    }
    if a > 2 {
        return Err(usage!("symbol {a} outside {{0,1,2}}"));
    }
    // z_i -> 2a - z_i
    let ai = q.coeffs[i];
    let mut coeffs = q.coeffs.clone();
    coeffs[i] = 3 - ai;
    Ok(AffineQuasigroup {
        coeffs,
        constant: (q.constant + 2 * a * ai) % 3,
    })
}

/// Length parameters `(n, t)` for a given `m`.
pub fn lengths(m: usize) -> Result<(usize, usize)> {
    if !(2..=3).contains(&m) {
        return Err(usage!("m={m} outside the supported range [2,3]"));
    }
    let n = (POW3[m] as usize - 1) / 2;
    Ok((n, (n - 1) / 3))
}

/// The index code `C*`: Hamming code of length `t`, as words in point order.
pub fn index_code(m: usize) -> Result<Vec<TernaryWord>> {
    lengths(m)?;
    Ok(hamming_code(m - 1)?.words().collect())
}

/// A quasigroup `lambda_mu` for every `mu` in `C*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasigroupAssignment {
    m: usize,
    entries: Vec<(TernaryWord, AffineQuasigroup)>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    m: usize,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    mu: String,
    coeffs: Vec<u8>,
    #[serde(rename = "const")]
    constant: u8,
}

impl QuasigroupAssignment {
    /// Builds an assignment, checking that the domain is exactly `C*` and
    /// every quasigroup has arity `t`. Entries are stored in point order of `mu`.
    pub fn new(m: usize, entries: Vec<(TernaryWord, AffineQuasigroup)>) -> Result<Self> {
        let (_, t) = lengths(m)?;
        let cstar = index_code(m)?;
        let mut map: BTreeMap<u32, (TernaryWord, AffineQuasigroup)> = BTreeMap::new();
        for (mu, q) in entries {
            if mu.len() != t || q.arity() != t {
                return Err(usage!("entry for {mu} has wrong length or arity (expected {t})"));
            }
            if map.insert(mu.index(), (mu, q)).is_some() {
                return Err(usage!("duplicate entry for {mu}"));
            }
        }
        let domain: Vec<u32> = map.keys().copied().collect();
        let expect: Vec<u32> = cstar.iter().map(|w| w.index()).collect();
        if domain != expect {
            return Err(usage!("assignment domain is not the index Hamming code of length {t}"));
        }
        Ok(Self {
            m,
            entries: map.into_values().collect(),
        })
    }

    pub fn uniform(m: usize, q: &AffineQuasigroup) -> Result<Self> {
        let entries = index_code(m)?.into_iter().map(|mu| (mu, q.clone())).collect();
        Self::new(m, entries)
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        let (_, t) = lengths(m)?;
        let entries = index_code(m)?
            .into_iter()
            .map(|mu| (mu, AffineQuasigroup::random(t, rng)))
            .collect();
        Self::new(m, entries)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[(TernaryWord, AffineQuasigroup)] {
        &self.entries
    }

    pub fn get(&self, mu: &TernaryWord) -> Option<&AffineQuasigroup> {
        self.entries.iter().find(|(w, _)| w == mu).map(|(_, q)| q)
    }

    fn set(&mut self, pos: usize, q: AffineQuasigroup) {
        self.entries[pos].1 = q;
    }

    pub fn to_json(&self) -> String {
        let j = AssignmentJson {
            m: self.m,
            entries: self
                .entries
                .iter()
                .map(|(mu, q)| EntryJson {
                    mu: mu.to_string(),
                    coeffs: q.coeffs.clone(),
                    constant: q.constant,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&j).expect("assignment serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: AssignmentJson = serde_json::from_str(s)?;
        let entries = j
            .entries
            .into_iter()
            .map(|e| Ok((e.mu.parse()?, AffineQuasigroup::new(e.coeffs, e.constant)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.m, entries)
    }
}

/// The code `union over mu of K_mu`.
pub fn rank1_build(m: usize, asg: &QuasigroupAssignment) -> Result<Code> {
    if asg.m != m {
        return Err(usage!("assignment is for m={} not m={m}", asg.m));
    }
    let (n, t) = lengths(m)?;
    let mut code = Code::empty(n);
    let free = POW3[2 * t];
    let mut z = vec![0u8; t];
    for (mu, q) in &asg.entries {
        for f in 0..free {
            let mut idx = 0u32;
            let mut r = f;
            for g in 0..t {
                let x0 = (r % 3) as u8;
                let x1 = (r / 3 % 3) as u8;
                r /= 9;
                let x2 = (mu.get(g) + 6 - x0 - x1) % 3;
                z[g] = (x1 + 3 - x0) % 3;
                idx += x0 as u32 * POW3[3 * g] + x1 as u32 * POW3[3 * g + 1] + x2 as u32 * POW3[3 * g + 2];
            }
            idx += q.eval(&z) as u32 * POW3[n - 1];
            code.insert(idx);
        }
    }
    if code.len() != num_points(n - m) {
        return Err(invariant!("built code has {} words, expected 3^{}", code.len(), n - m));
    }
    Ok(code)
}

/// Recovers the assignment of a code in the normal form produced by
/// [`rank1_build`].
pub fn decode_assignment(c: &Code, m: usize) -> Result<QuasigroupAssignment> {
    let (n, t) = lengths(m)?;
    if c.n() != n || c.len() != num_points(n - m) {
        return Err(usage!("code does not have the parameters of a length-{n} perfect code"));
    }
    let cstar: Vec<TernaryWord> = index_code(m)?;
    let mut tables: HashMap<u32, Vec<Option<u8>>> = cstar
        .iter()
        .map(|mu| (mu.index(), vec![None; POW3[t] as usize]))
        .collect();
    for w in c.words() {
        let mut mu = vec![0u8; t];
        let mut zi = 0u32;
        for g in 0..t {
            mu[g] = (w.get(3 * g) + w.get(3 * g + 1) + w.get(3 * g + 2)) % 3;
            zi += ((w.get(3 * g + 1) + 3 - w.get(3 * g)) % 3) as u32 * POW3[g];
        }
        let key = TernaryWord::new(&mu)?.index();
        let table = tables
            .get_mut(&key)
            .ok_or_else(|| usage!("codeword {w} has group sums outside the index code"))?;
        let v = w.get(n - 1);
        match table[zi as usize] {
            Some(prev) if prev != v => {
                return Err(usage!("code is not in normal form: last coordinate is not a function"))
            }
            _ => table[zi as usize] = Some(v),
        }
    }
    let mut entries = Vec::new();
    for mu in cstar {
        let table = &tables[&mu.index()];
        let val = |z: u32| table[z as usize].ok_or_else(|| usage!("code is not in normal form: missing words"));
        let a = val(0)?;
        let mut coeffs = Vec::with_capacity(t);
        for g in 0..t {
            coeffs.push((val(POW3[g])? + 3 - a) % 3);
        }
        let q = AffineQuasigroup::new(coeffs, a)
            .map_err(|_| usage!("code is not in normal form: component function is not a quasigroup"))?;
        for z in 0..POW3[t] {
            let zd = crate::gf3::digits(z, t);
            if q.eval(&zd[..t]) != val(z)? {
                return Err(usage!("code is not in normal form: component function is not affine"));
            }
        }
        entries.push((mu, q));
    }
    let asg = QuasigroupAssignment::new(m, entries)?;
    if rank1_build(m, &asg)? != *c {
        return Err(usage!("code is not in normal form"));
    }
    Ok(asg)
}

/// The assignments whose codes are cosets of a linear Hamming code: one
/// coefficient vector shared by all `mu`, constants an affine function of `mu`.
pub fn hamming_coset_assignments(m: usize) -> Result<Vec<QuasigroupAssignment>> {
    let (_, t) = lengths(m)?;
    let cstar = index_code(m)?;
    // distinct linear functionals on C*, as value vectors
    let mut functionals: Vec<Vec<u8>> = Vec::new();
    for r in 0..POW3[t] {
        let rho = TernaryWord::from_index(t, r);
        let vals: Vec<u8> = cstar.iter().map(|mu| rho.dot(mu).unwrap()).collect();
        if !functionals.contains(&vals) {
            functionals.push(vals);
        }
    }
    let mut out = Vec::new();
    for mask in 0..1u32 << t {
        let coeffs: Vec<u8> = (0..t).map(|i| 1 + (mask >> i & 1) as u8).collect();
        for f in &functionals {
            for c in 0..3u8 {
                let entries = cstar
                    .iter()
                    .zip(f)
                    .map(|(mu, &v)| (*mu, AffineQuasigroup { coeffs: coeffs.clone(), constant: (c + v) % 3 }))
                    .collect();
                out.push(QuasigroupAssignment::new(m, entries)?);
            }
        }
    }
    Ok(out)
}

/// Words with ones on one coordinate triple; they are periods of every
/// code built by [`rank1_build`].
pub fn triple_kernel_words(m: usize) -> Result<Vec<TernaryWord>> {
    let (n, t) = lengths(m)?;
    Ok((0..t)
        .map(|g| {
            let mut w = TernaryWord::zero(n);
            for k in 0..3 {
                w.set(3 * g + k, 1);
            }
            w
        })
        .collect())
}

// ---------------------------------------------------------------------------
// counting

/// Order of `GL_k(3)`.
pub fn gl_order(k: usize) -> BigUint {
    let q = BigUint::from(3u32).pow(k as u32);
    (0..k).fold(BigUint::one(), |acc, i| acc * (&q - BigUint::from(3u32).pow(i as u32)))
}

fn exact_div(a: &BigUint, b: &BigUint) -> Result<BigUint> {
    let (q, r) = a.div_rem(b);
    if !r.is_zero() {
        return Err(invariant!("{a} is not divisible by {b}"));
    }
    Ok(q)
}

fn check_m(m: usize) -> Result<(usize, usize)> {
    if m < 2 {
        return Err(usage!("m={m} must be at least 2"));
    }
    if m > 20 {
        return Err(usage!("m={m} too large"));
    }
    let n = (3usize.pow(m as u32) - 1) / 2;
    Ok((n, (n - 1) / 3))
}

/// Number of assignments giving rank exactly `n - m + 1` with the coordinate
/// grouping held fixed.
pub fn count_fixed_span(m: usize) -> Result<BigUint> {
    let (_, t) = check_m(m)?;
    let base = BigUint::from(3u32) * BigUint::from(2u32).pow(t as u32);
    let total = base.pow(3u32.pow((t + 1 - m) as u32));
    let six_t = BigUint::from(6u32).pow(t as u32);
    let linear = exact_div(&six_t, &BigUint::from(3u32).pow((m - 2) as u32))?;
    Ok(total - linear)
}

/// Number of codes of rank `n - m + 1` in the whole space.
pub fn count_all(m: usize) -> Result<BigUint> {
    let (n, t) = check_m(m)?;
    let fact: BigUint = (1..=n).fold(BigUint::one(), |a, i| a * BigUint::from(i));
    let num = fact * BigUint::from(6u32).pow(n as u32);
    let den = gl_order(m - 1) * BigUint::from(6u32).pow(t as u32) * BigUint::from(3u32).pow((n - m + 1) as u32);
    Ok(exact_div(&num, &den)? * count_fixed_span(m)?)
}

/// Lower bound on the number of equivalence classes of rank `n - m + 1` codes.
pub fn count_classes_lower_bound(m: usize) -> Result<BigUint> {
    let (n, t) = check_m(m)?;
    let den = gl_order(m - 1) * BigUint::from(2u32).pow(t as u32) * BigUint::from(3u32).pow((n - m + 1) as u32);
    Ok(count_fixed_span(m)?.div_ceil(&den))
}

// ---------------------------------------------------------------------------
// switchings

/// A map moving only coordinates `i` and `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    i: usize,
    j: usize,
    beta: Isometry,
}

impl Switch {
    pub fn new(i: usize, j: usize, beta: Isometry) -> Result<Self> {
        let n = beta.n();
        if i == j || i >= n || j >= n {
            return Err(usage!("switch coordinates {i},{j} invalid for length {n}"));
        }
        for k in 0..n {
            if k != i && k != j && (beta.perm()[k] as usize != k || beta.sym()[k] != [0, 1, 2]) {
                return Err(usage!("switch map moves coordinate {k} outside {{{i},{j}}}"));
            }
        }
        Ok(Self { i, j, beta })
    }

    pub fn coords(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn beta(&self) -> &Isometry {
        &self.beta
    }
}

/// Connected components of the inconsistency graph of `C ∪ β(C)`, words at
/// distance 1 or 2 being adjacent. Shared words are left out.
#[derive(Clone, Debug)]
pub struct SwitchComponents {
    pub code: Code,
    pub image: Code,
    /// Words of `C ∩ β(C)`.
    pub common: Code,
    /// `(C-side, β(C)-side)` point lists, ordered by smallest point index.
    pub components: Vec<(Vec<u32>, Vec<u32>)>,
}

impl SwitchComponents {
    /// The code selecting the β side of every component whose bit is set.
    pub fn select(&self, mask: u64) -> Code {
        let mut c = self.common.clone();
        for (k, (a, b)) in self.components.iter().enumerate() {
            let side = if mask >> k & 1 == 1 { b } else { a };
            for &x in side {
                c.insert(x);
            }
        }
        c
    }
}

pub fn switching_components(c: &Code, s: &Switch) -> Result<SwitchComponents> {
    if s.beta.n() != c.n() {
        return Err(usage!("switch length {} != code length {}", s.beta.n(), c.n()));
    }
    let n = c.n();
    let image = s.beta.apply_code(c)?;
    let common = c.intersection(&image)?;
    let only_c = c.difference(&image)?;
    let only_b = image.difference(c)?;
    let mut shell = packed_of_weight(n, 1);
    shell.extend(packed_of_weight(n, 2));
    let mut seen = Code::empty(n);
    let mut components = Vec::new();
    // iterate the union of both sides in ascending point order
    let union = only_c.union(&only_b)?;
    for start in union.iter() {
        if seen.contains(start) {
            continue;
        }
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        while let Some(x) = queue.pop_front() {
            let in_c = only_c.contains(x);
            if in_c {
                a.push(x);
            } else {
                b.push(x);
            }
            let other = if in_c { &only_b } else { &only_c };
            let p = pack(x);
            for &u in &shell {
                let y = unpack(padd(p, u));
                if other.contains(y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        a.sort_unstable();
        b.sort_unstable();
        components.push((a, b));
    }
    Ok(SwitchComponents {
        code: c.clone(),
        image,
        common,
        components,
    })
}

/// Largest component count for which [`find_switchings`] enumerates all
/// side selections.
pub const MAX_SWITCH_COMPONENTS: usize = 16;

/// All 1-perfect codes inside `C ∪ β(C)` obtained by choosing one side of
/// every component of the inconsistency graph.
pub fn find_switchings(c: &Code, s: &Switch) -> Result<Vec<Code>> {
    if !is_1perfect(c) {
        return Err(usage!("find_switchings needs a 1-perfect code"));
    }
    let comps = switching_components(c, s)?;
    let k = comps.components.len();
    if k > MAX_SWITCH_COMPONENTS {
        return Err(usage!(
            "{k} switching components exceed the enumeration limit {MAX_SWITCH_COMPONENTS}"
        ));
    }
    let mut out = Vec::new();
    for mask in 0..1u64 << k {
        let d = comps.select(mask);
        if is_1perfect(&d) {
            out.push(d);
        }
    }
    if out.first() != Some(c) || (k > 0 && out.last() != Some(&comps.image)) {
        return Err(invariant!("a trivial switching was rejected"));
    }
    Ok(out)
}

/// Switch realizing `gamma_(g,a)` on the component `K_mu`.
pub fn component_switch(n: usize, g: usize, a: u8, mu_g: u8) -> Result<Switch> {
    let (i, j) = (3 * g + 1, 3 * g + 2);
    let mut perm: Vec<u8> = (0..n as u8).collect();
    perm.swap(i, j);
    let mut sym = vec![[0u8, 1, 2]; n];
    let d1 = (2 * a + 3 - mu_g) % 3;
    let d2 = (3 - d1) % 3;
    sym[i] = [d1, (d1 + 1) % 3, (d1 + 2) % 3];
    sym[j] = [d2, (d2 + 1) % 3, (d2 + 2) % 3];
    Switch::new(i, j, Isometry::new(perm, sym)?)
}

/// Shortest sequence of `(i, a)` moves turning `from` into `to`.
pub fn gamma_word(from: &AffineQuasigroup, to: &AffineQuasigroup) -> Result<Vec<(usize, u8)>> {
    if from.arity() != to.arity() {
        return Err(usage!("arity mismatch"));
    }
    let t = from.arity();
    let mut prev: HashMap<AffineQuasigroup, Option<(AffineQuasigroup, usize, u8)>> = HashMap::new();
    prev.insert(from.clone(), None);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(q) = queue.pop_front() {
        if &q == to {
            let mut path = Vec::new();
            let mut cur = q;
            while let Some(Some((p, i, a))) = prev.get(&cur).cloned() {
                path.push((i, a));
                cur = p;
            }
            path.reverse();
            return Ok(path);
        }
        for i in 0..t {
            for a in 0..3 {
                let r = gamma_transform(&q, i, a)?;
                if !prev.contains_key(&r) {
                    prev.insert(r.clone(), Some((q.clone(), i, a)));
                    queue.push_back(r);
                }
            }
        }
    }
    Err(invariant!("quasigroup {to:?} unreachable from {from:?}"))
}

/// A sequence of two-coordinate switchings from `c1` to `c2`; each entry
/// holds the switch applied and the resulting code.
pub fn switching_path(c1: &Code, c2: &Code, m: usize) -> Result<Vec<(Switch, Code)>> {
    let (n, _) = lengths(m)?;
    let mut asg = decode_assignment(c1, m)?;
    let target = decode_assignment(c2, m)?;
    let mut cur = c1.clone();
    let mut path = Vec::new();
    for pos in 0..asg.entries.len() {
        let (mu, from) = asg.entries[pos].clone();
        let to = target.entries[pos].1.clone();
        for (g, a) in gamma_word(&from, &to)? {
            let s = component_switch(n, g, a, mu.get(g))?;
            let q = gamma_transform(&asg.entries[pos].1, g, a)?;
            asg.set(pos, q);
            let next = rank1_build(m, &asg)?;
            let host = cur.union(&s.beta.apply_code(&cur)?)?;
            if !next.is_subset(&host)? {
                return Err(invariant!("switched code leaves C ∪ β(C)"));
            }
            if !is_1perfect(&next) {
                return Err(invariant!("intermediate code is not 1-perfect"));
            }
            path.push((s, next.clone()));
            cur = next;
        }
    }
    if cur != *c2 {
        return Err(invariant!("switching path does not reach the target"));
    }
    Ok(path)
}

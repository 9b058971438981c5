//! Permutation groups of small degree: closure, orbits, and double cosets
//! in the full symmetric group.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{usage, Error, Result};

/// A permutation of `[0, degree)` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn new(images: Vec<u8>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x as usize >= images.len() || seen[x as usize] {
                return Err(usage!("{images:?} is not a permutation"));
            }
            seen[x as usize] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n as u8).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u8;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    /// Sorted cycle lengths.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if !seen[i] {
                let mut len = 0;
                let mut j = i;
                while !seen[j] {
                    seen[j] = true;
                    j = self.apply(j);
                    len += 1;
                }
                out.push(len);
            }
        }
        out.sort_unstable();
        out
    }

    /// Position of the permutation in lexicographic order.
    pub fn lex_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0;
        let mut used = 0u32;
        let mut fact = (1..n).product::<usize>().max(1);
        for (k, &x) in self.0.iter().enumerate() {
            let smaller = (0..x).filter(|&y| used >> y & 1 == 0).count();
            rank += smaller * fact;
            used |= 1 << x;
            if k + 1 < n {
                fact /= n - 1 - k;
            }
        }
        rank
    }

    /// Advances to the lexicographic successor; false at the last permutation.
    pub fn next_lex(&mut self) -> bool {
        let v = &mut self.0;
        let n = v.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

impl std::str::FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("bad image {t:?}"))))
            .collect::<Result<Vec<u8>>>()?;
        Perm::new(v)
    }
}

/// A subgroup of `Sym(degree)` held as its full, sorted element list and a
/// generating set.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

pub const MAX_DEGREE: usize = 12;

/// Subgroup generated by `gens`.
pub fn closure(degree: usize, gens: &[Perm]) -> Result<PermGroup> {
    if degree > MAX_DEGREE {
        return Err(usage!("degree {degree} exceeds {MAX_DEGREE}"));
    }
    if gens.iter().any(|g| g.degree() != degree) {
        return Err(usage!("generator degree differs from {degree}"));
    }
    let id = Perm::identity(degree);
    let mut seen: HashSet<Perm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    let mut elements: Vec<Perm> = seen.into_iter().collect();
    elements.sort();
    let mut gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    gens.sort();
    gens.dedup();
    Ok(PermGroup {
        degree,
        gens,
        elements,
    })
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        Self {
            degree,
            gens: Vec::new(),
            elements: vec![Perm::identity(degree)],
        }
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Ok(Self::trivial(degree));
        }
        let cycle = Perm::new((0..degree as u8).map(|i| (i + 1) % degree as u8).collect())?;
        closure(degree, &[Perm::transposition(degree, 0, 1), cycle])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_transitive(&self) -> bool {
        orbits(self.degree, &self.gens).len() <= 1
    }
}

/// Orbits of the group generated by `gens`, each sorted, ordered by minimum.
pub fn orbits(degree: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for g in gens {
        for i in 0..degree {
            let (a, b) = (find(&mut parent, i), find(&mut parent, g.apply(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..degree {
        let r = find(&mut parent, i);
        map.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = map.into_values().collect();
    out.sort();
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

/// Double cosets `left · σ · right` of `Sym(degree)`, each given by its
/// lexicographically smallest element and its size, in increasing order of
/// representative.
pub fn double_cosets(left: &PermGroup, right: &PermGroup) -> Result<Vec<(Perm, usize)>> {
    let n = left.degree;
    if right.degree != n {
        return Err(usage!("double cosets of groups of different degrees"));
    }
    if n > 10 {
        return Err(usage!("double cosets need degree at most 10"));
    }
    let total = factorial(n);
    let mut visited = vec![false; total];
    let mut out = Vec::new();
    let mut sigma = Perm::identity(n);
    loop {
        if !visited[sigma.lex_rank()] {
            // closure of sigma under left and right multiplication by generators
            let mut size = 1;
            visited[sigma.lex_rank()] = true;
            let mut stack = vec![sigma.clone()];
            while let Some(p) = stack.pop() {
                let next = left
                    .gens
                    .iter()
                    .map(|l| l.compose(&p))
                    .chain(right.gens.iter().map(|r| p.compose(r)));
                for q in next {
                    let k = q.lex_rank();
                    if !visited[k] {
                        visited[k] = true;
                        size += 1;
                        stack.push(q);
                    }
                }
            }
            out.push((sigma.clone(), size));
        }
        if !sigma.next_lex() {
            break;
        }
    }
    Ok(out)
}

pub fn double_coset_reps(left: &PermGroup, right: &PermGroup) -> Result<Vec<Perm>> {
    Ok(double_cosets(left, right)?.into_iter().map(|(p, _)| p).collect())
}

/// Memoizes double-coset sweeps by group pair.
#[derive(Default)]
pub struct DoubleCosetCache {
    map: HashMap<(Vec<Perm>, Vec<Perm>), Vec<(Perm, usize)>>,
}

impl DoubleCosetCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, left: &PermGroup, right: &PermGroup) -> Result<&[(Perm, usize)]> {
        let key = (left.elements.clone(), right.elements.clone());
        if !self.map.contains_key(&key) {
            let v = double_cosets(left, right)?;
            self.map.insert(key.clone(), v);
        }
        Ok(&self.map[&key])
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

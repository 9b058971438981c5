//! Individualization-refinement search for canonical labelings and
//! automorphism groups of colored graphs.

use std::cmp::Ordering;
use std::collections::VecDeque;

use super::graph::ColoredGraph;
use crate::error::{invariant, Result};

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Ordered partition of the vertex set.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    /// vertex at each position
    lab: Vec<u32>,
    /// position of each vertex
    inv: Vec<u32>,
    /// start of the cell holding each position
    cell_of: Vec<u32>,
    /// end (exclusive) of the cell starting at each start position
    cell_end: Vec<u32>,
    ncells: usize,
}

impl Partition {
    fn from_colors(colors: &[u32]) -> Self {
        let n = colors.len();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (colors[v as usize], v));
        let mut inv = vec![0u32; n];
        for (p, &v) in lab.iter().enumerate() {
            inv[v as usize] = p as u32;
        }
        let mut cell_of = vec![0u32; n];
        let mut cell_end = vec![0u32; n];
        let mut ncells = 0;
        let mut s = 0;
        while s < n {
            let c = colors[lab[s] as usize];
            let mut e = s;
            while e < n && colors[lab[e] as usize] == c {
                cell_of[e] = s as u32;
                e += 1;
            }
            cell_end[s] = e as u32;
            ncells += 1;
            s = e;
        }
        Self {
            lab,
            inv,
            cell_of,
            cell_end,
            ncells,
        }
    }

    fn is_discrete(&self) -> bool {
        self.ncells == self.lab.len()
    }

    fn cell_starts(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.ncells);
        let mut s = 0;
        while s < self.lab.len() {
            out.push(s as u32);
            s = self.cell_end[s] as usize;
        }
        out
    }

    /// Splits `v` off the front of its cell; returns the singleton start.
    fn individualize(&mut self, v: u32) -> u32 {
        let pos = self.inv[v as usize];
        let s = self.cell_of[pos as usize];
        let e = self.cell_end[s as usize];
        let other = self.lab[s as usize];
        self.lab[s as usize] = v;
        self.lab[pos as usize] = other;
        self.inv[v as usize] = s;
        self.inv[other as usize] = pos;
        if e - s > 1 {
            self.cell_end[s as usize] = s + 1;
            self.cell_end[s as usize + 1] = e;
            for p in s + 1..e {
                self.cell_of[p as usize] = s + 1;
            }
            self.ncells += 1;
        }
        s
    }
}

/// Scratch space reused by all refinements of one search.
struct Workspace {
    count: Vec<u32>,
    touched: Vec<u32>,
    touched_cells: Vec<u32>,
    cell_mark: Vec<bool>,
    tail: Vec<u32>,
    in_queue: Vec<bool>,
    frags: Vec<(u32, u32, u32)>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            count: vec![0; n],
            touched: Vec::new(),
            touched_cells: Vec::new(),
            cell_mark: vec![false; n],
            tail: vec![0; n],
            in_queue: vec![false; n],
            frags: Vec::new(),
        }
    }

    /// Refines `p` to the coarsest equitable refinement reachable from the
    /// given splitters and returns a hash of the split events.
    fn refine(&mut self, g: &ColoredGraph, p: &mut Partition, init: &[u32]) -> u64 {
        let n = p.lab.len();
        let mut h: u64 = 0x5151_5151;
        let mut queue: VecDeque<u32> = VecDeque::new();
        for &s in init {
            if !self.in_queue[s as usize] {
                self.in_queue[s as usize] = true;
                queue.push_back(s);
            }
        }
        while let Some(w) = queue.pop_front() {
            self.in_queue[w as usize] = false;
            if p.ncells == n {
                continue;
            }
            let end = p.cell_end[w as usize];
            self.touched.clear();
            for pos in w..end {
                let v = p.lab[pos as usize];
                for &u in g.neighbors(v) {
                    let c = &mut self.count[u as usize];
                    if *c == 0 {
                        self.touched.push(u);
                    }
                    *c += 1;
                }
            }
            // gather touched vertices at the tail of their cells
            self.touched_cells.clear();
            for &u in &self.touched {
                let pos = p.inv[u as usize];
                let s = p.cell_of[pos as usize];
                if p.cell_end[s as usize] - s == 1 {
                    continue;
                }
                if !self.cell_mark[s as usize] {
                    self.cell_mark[s as usize] = true;
                    self.tail[s as usize] = p.cell_end[s as usize];
                    self.touched_cells.push(s);
                }
                self.tail[s as usize] -= 1;
                let t = self.tail[s as usize];
                let other = p.lab[t as usize];
                p.lab[t as usize] = u;
                p.lab[pos as usize] = other;
                p.inv[u as usize] = t;
                p.inv[other as usize] = pos;
            }
            self.touched_cells.sort_unstable();
            for ci in 0..self.touched_cells.len() {
                let s = self.touched_cells[ci];
                self.cell_mark[s as usize] = false;
                let e = p.cell_end[s as usize];
                let t0 = self.tail[s as usize];
                let count = &self.count;
                let c0 = count[p.lab[t0 as usize] as usize];
                if p.lab[t0 as usize..e as usize].iter().any(|&v| count[v as usize] != c0) {
                    p.lab[t0 as usize..e as usize].sort_unstable_by_key(|&v| count[v as usize]);
                    for pos in t0..e {
                        p.inv[p.lab[pos as usize] as usize] = pos;
                    }
                }
                self.frags.clear();
                if t0 > s {
                    self.frags.push((s, t0, 0));
                }
                let mut a = t0;
                while a < e {
                    let c = self.count[p.lab[a as usize] as usize];
                    let mut b = a + 1;
                    while b < e && self.count[p.lab[b as usize] as usize] == c {
                        b += 1;
                    }
                    self.frags.push((a, b, c));
                    a = b;
                }
                if self.frags.len() == 1 {
                    continue;
                }
                h = mix(h, s as u64);
                h = mix(h, self.frags.len() as u64);
                for &(fs, fe, c) in &self.frags {
                    h = mix(h, ((c as u64) << 32) | (fe - fs) as u64);
                    p.cell_end[fs as usize] = fe;
                    if fs != s {
                        for pos in fs..fe {
                            p.cell_of[pos as usize] = fs;
                        }
                    }
                }
                p.ncells += self.frags.len() - 1;
                let skip = if self.in_queue[s as usize] {
                    Some(0)
                } else {
                    let mut best = 0;
                    for (i, f) in self.frags.iter().enumerate() {
                        if f.1 - f.0 > self.frags[best].1 - self.frags[best].0 {
                            best = i;
                        }
                    }
                    Some(best)
                };
                for (i, &(fs, _, _)) in self.frags.iter().enumerate() {
                    if Some(i) != skip && !self.in_queue[fs as usize] {
                        self.in_queue[fs as usize] = true;
                        queue.push_back(fs);
                    }
                }
            }
            for &u in &self.touched {
                self.count[u as usize] = 0;
            }
        }
        mix(h, p.ncells as u64)
    }
}

#[derive(Clone)]
struct Leaf {
    lab: Vec<u32>,
    path: Vec<u32>,
    traces: Vec<u64>,
    key: u128,
}

/// Result of a canonical labeling search.
#[derive(Clone, Debug)]
pub struct Labeling {
    /// Vertex placed at each canonical position.
    pub canon_lab: Vec<u32>,
    /// Generators of the automorphism group, as vertex maps.
    pub generators: Vec<Vec<u32>>,
    /// Order of the automorphism group.
    pub aut_order: u128,
    pub nodes: u64,
}

struct Searcher<'a> {
    g: &'a ColoredGraph,
    ws: Workspace,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<u32>>,
    nodes: u64,
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn find(uf: &mut [u32], x: u32) -> u32 {
    let mut r = x;
    while uf[r as usize] != r {
        r = uf[r as usize];
    }
    let mut y = x;
    while uf[y as usize] != r {
        let nx = uf[y as usize];
        uf[y as usize] = r;
        y = nx;
    }
    r
}

impl<'a> Searcher<'a> {
    fn edge_key(&self, inv: &[u32]) -> u128 {
        let mut lo: u64 = 0;
        let mut hi: u64 = 0;
        for (a, b) in self.g.edges() {
            let (x, y) = (inv[a as usize] as u64, inv[b as usize] as u64);
            let e = if x < y { (x << 32) | y } else { (y << 32) | x };
            lo = lo.wrapping_add(mix(e, 0x1234_5678));
            hi = hi.wrapping_add(mix(e, 0x8765_4321_0fed_cba9));
        }
        ((hi as u128) << 64) | lo as u128
    }

    fn choose_target(&self, p: &Partition) -> u32 {
        let mut best: Option<(u32, u32)> = None;
        let mut fallback: Option<(u32, u32)> = None;
        for s in p.cell_starts() {
            let size = p.cell_end[s as usize] - s;
            if size == 1 {
                continue;
            }
            if fallback.is_none_or(|(_, bs)| size > bs) {
                fallback = Some((s, size));
            }
            if p.lab[s as usize] < self.g.structural() && best.is_none_or(|(_, bs)| size > bs) {
                best = Some((s, size));
            }
        }
        best.or(fallback).expect("non-discrete partition has a non-singleton cell").0
    }

    fn leaf(&mut self, p: &Partition, path: &[u32], traces: &[u64]) -> Result<Option<usize>> {
        let key = self.edge_key(&p.inv);
        let leaf = Leaf {
            lab: p.lab.clone(),
            path: path.to_vec(),
            traces: traces.to_vec(),
            key,
        };
        let Some(first) = &self.first else {
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return Ok(None);
        };
        if first.traces == leaf.traces && first.key == key {
            let jump = common_prefix(path, &first.path);
            let gamma = map_between(&first.lab, &leaf.lab);
            return self.record(gamma, jump);
        }
        let best = self.best.as_ref().unwrap();
        match (leaf.traces.as_slice(), leaf.key).cmp(&(best.traces.as_slice(), best.key)) {
            Ordering::Greater => {
                self.best = Some(leaf);
                Ok(None)
            }
            Ordering::Equal => {
                let jump = common_prefix(path, &best.path);
                let gamma = map_between(&best.lab, &leaf.lab);
                self.record(gamma, jump)
            }
            Ordering::Less => Ok(None),
        }
    }

    fn record(&mut self, gamma: Vec<u32>, jump: usize) -> Result<Option<usize>> {
        if !self.g.is_automorphism(&gamma) {
            return Err(invariant!("leaf certificate collision without automorphism"));
        }
        if gamma.iter().enumerate().any(|(i, &x)| x as usize != i) {
            self.gens.push(gamma);
        }
        Ok(Some(jump))
    }

    fn node(&mut self, p: &Partition, path: &mut Vec<u32>, traces: &mut Vec<u64>) -> Result<Option<usize>> {
        self.nodes += 1;
        if p.is_discrete() {
            return self.leaf(p, path, traces);
        }
        let level = path.len();
        let s = self.choose_target(p);
        let e = p.cell_end[s as usize];
        let mut cell: Vec<u32> = p.lab[s as usize..e as usize].to_vec();
        cell.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        let mut uf: Vec<u32> = Vec::new();
        let mut uf_gens = usize::MAX;
        for &v in &cell {
            if !explored.is_empty() {
                if uf_gens != self.gens.len() {
                    uf = (0..self.g.num_vertices() as u32).collect();
                    for gamma in &self.gens {
                        if path.iter().all(|&x| gamma[x as usize] == x) {
                            for &u in &cell {
                                let (a, b) = (find(&mut uf, u), find(&mut uf, gamma[u as usize]));
                                if a != b {
                                    uf[a.max(b) as usize] = a.min(b);
                                }
                            }
                        }
                    }
                    uf_gens = self.gens.len();
                }
                let rv = find(&mut uf, v);
                if explored.iter().any(|&u| find(&mut uf, u) == rv) {
                    continue;
                }
            }
            explored.push(v);
            let mut child = p.clone();
            let single = child.individualize(v);
            let t = self.ws.refine(self.g, &mut child, &[single]);
            path.push(v);
            traces.push(t);
            let keep = match (&self.first, &self.best) {
                (Some(f), Some(b)) => {
                    let eq_first = f.traces.len() >= traces.len() && f.traces[..traces.len()] == traces[..];
                    let k = traces.len().min(b.traces.len());
                    eq_first || traces[..k] >= b.traces[..k]
                }
                _ => true,
            };
            let r = if keep { self.node(&child, path, traces)? } else { None };
            path.pop();
            traces.pop();
            if let Some(j) = r {
                if j < level {
                    return Ok(Some(j));
                }
            }
        }
        Ok(None)
    }

    fn aut_order(&self) -> u128 {
        let Some(first) = &self.first else { return 1 };
        let mut order: u128 = 1;
        for l in 0..first.path.len() {
            let prefix = &first.path[..l];
            let fixing: Vec<&Vec<u32>> = self
                .gens
                .iter()
                .filter(|g| prefix.iter().all(|&x| g[x as usize] == x))
                .collect();
            let start = first.path[l];
            let mut seen = vec![start];
            let mut i = 0;
            while i < seen.len() {
                let x = seen[i];
                for g in &fixing {
                    let y = g[x as usize];
                    if !seen.contains(&y) {
                        seen.push(y);
                    }
                }
                i += 1;
            }
            order *= seen.len() as u128;
        }
        order
    }
}

/// The vertex map sending the leaf `from` onto the leaf `to`.
fn map_between(from: &[u32], to: &[u32]) -> Vec<u32> {
    let mut gamma = vec![0u32; from.len()];
    for (a, b) in from.iter().zip(to) {
        gamma[*a as usize] = *b;
    }
    gamma
}

/// Runs the search on `g`.
pub fn canonical_labeling(g: &ColoredGraph) -> Result<Labeling> {
    let n = g.num_vertices();
    let mut s = Searcher {
        g,
        ws: Workspace::new(n.max(1)),
        first: None,
        best: None,
        gens: Vec::new(),
        nodes: 0,
    };
    if n == 0 {
        return Ok(Labeling {
            canon_lab: Vec::new(),
            generators: Vec::new(),
            aut_order: 1,
            nodes: 0,
        });
    }
    let mut root = Partition::from_colors(g.colors());
    let starts = root.cell_starts();
    let t = s.ws.refine(g, &mut root, &starts);
    let mut path = Vec::new();
    let mut traces = vec![t];
    s.node(&root, &mut path, &mut traces)?;
    let aut_order = s.aut_order();
    let best = s.best.take().unwrap();
    Ok(Labeling {
        canon_lab: best.lab,
        generators: s.gens,
        aut_order,
        nodes: s.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> ColoredGraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ColoredGraph::new(vec![0; n as usize], &edges)
    }

    #[test]
    fn cycle_automorphisms() {
        for n in 3..9 {
            let l = canonical_labeling(&cycle(n)).unwrap();
            assert_eq!(l.aut_order, 2 * n as u128);
        }
    }

    #[test]
    fn petersen_automorphisms() {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        let g = ColoredGraph::new(vec![0; 10], &edges);
        assert_eq!(canonical_labeling(&g).unwrap().aut_order, 120);
    }

    #[test]
    fn complete_and_empty() {
        let k5: Vec<(u32, u32)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        assert_eq!(canonical_labeling(&ColoredGraph::new(vec![0; 5], &k5)).unwrap().aut_order, 120);
        assert_eq!(canonical_labeling(&ColoredGraph::new(vec![0; 4], &[])).unwrap().aut_order, 24);
        assert_eq!(canonical_labeling(&ColoredGraph::new(vec![0, 1, 1, 2], &[])).unwrap().aut_order, 2);
    }
}

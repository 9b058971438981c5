//! Vertex-colored simple graphs in compressed adjacency form.

/// An undirected simple graph whose vertices carry ordered colors.
///
/// Color values only matter through their order: the initial partition of a
/// canonical labeling run lists color classes in increasing color order.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    offsets: Vec<u32>,
    adj: Vec<u32>,
    colors: Vec<u32>,
    /// Vertices below this bound are preferred as individualization targets.
    structural: u32,
}

impl ColoredGraph {
    /// Builds the graph; duplicate edges are merged and loops are rejected.
    pub fn new(colors: Vec<u32>, edges: &[(u32, u32)]) -> Self {
        let n = colors.len();
        let mut deg = vec![0u32; n + 1];
        for &(a, b) in edges {
            assert!(a != b, "loop at vertex {a}");
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; offsets[n] as usize];
        for &(a, b) in edges {
            adj[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        // sort and dedup each list, then compact
        let mut new_adj = Vec::with_capacity(adj.len());
        let mut new_off = vec![0u32; n + 1];
        for v in 0..n {
            let s = &mut adj[offsets[v] as usize..offsets[v + 1] as usize];
            s.sort_unstable();
            let start = new_adj.len();
            for &x in s.iter() {
                if new_adj.len() == start || *new_adj.last().unwrap() != x {
                    new_adj.push(x);
                }
            }
            new_off[v + 1] = new_adj.len() as u32;
        }
        Self {
            offsets: new_off,
            adj: new_adj,
            colors,
            structural: n as u32,
        }
    }

    pub fn with_structural(mut self, bound: u32) -> Self {
        self.structural = bound;
        self
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    #[inline]
    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn structural(&self) -> u32 {
        self.structural
    }

    /// Each edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_vertices() as u32).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .filter(move |&&b| b > a)
                .map(move |&b| (a, b))
        })
    }

    /// Whether the vertex map preserves colors and adjacency.
    pub fn is_automorphism(&self, map: &[u32]) -> bool {
        let n = self.num_vertices();
        if map.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for v in 0..n {
            let w = map[v] as usize;
            if w >= n || seen[w] || self.colors[v] != self.colors[w] {
                return false;
            }
            seen[w] = true;
            if self.neighbors(v as u32).len() != self.neighbors(w as u32).len() {
                return false;
            }
        }
        (0..n as u32).all(|v| {
            let w = map[v as usize];
            self.neighbors(v)
                .iter()
                .all(|&u| self.has_edge(w, map[u as usize]))
        })
    }
}

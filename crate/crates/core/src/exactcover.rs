//! Exact cover by dancing links.

use crate::error::{usage, Result};

/// A 0/1 matrix given by the column sets of its rows.
#[derive(Clone, Debug, Default)]
pub struct CoverInstance {
    num_cols: usize,
    rows: Vec<(usize, Vec<usize>)>,
}

impl CoverInstance {
    pub fn new(num_cols: usize) -> Self {
        Self {
            num_cols,
            rows: Vec::new(),
        }
    }

    /// Adds a row; its columns are sorted and must be distinct, in range,
    /// and nonempty.
    pub fn add_row(&mut self, id: usize, mut cols: Vec<usize>) -> Result<()> {
        cols.sort_unstable();
        if cols.is_empty() {
            return Err(usage!("row {id} covers no column"));
        }
        if cols.windows(2).any(|w| w[0] == w[1]) {
            return Err(usage!("row {id} repeats a column"));
        }
        if cols.last().is_some_and(|&c| c >= self.num_cols) {
            return Err(usage!("row {id} has a column outside [0, {})", self.num_cols));
        }
        self.rows.push((id, cols));
        Ok(())
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    pub fn rows(&self) -> &[(usize, Vec<usize>)] {
        &self.rows
    }
}

struct Links {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
}

impl Links {
    fn build(inst: &CoverInstance) -> Self {
        let nc = inst.num_cols;
        let total = 1 + nc + inst.rows.iter().map(|r| r.1.len()).sum::<usize>();
        let mut l = Links {
            left: Vec::with_capacity(total),
            right: Vec::with_capacity(total),
            up: Vec::with_capacity(total),
            down: Vec::with_capacity(total),
            col: Vec::with_capacity(total),
            row: Vec::with_capacity(total),
            size: vec![0; nc + 1],
        };
        // node 0 is the root, nodes 1..=nc the column headers
        for i in 0..=nc {
            l.left.push(if i == 0 { nc } else { i - 1 });
            l.right.push(if i == nc { 0 } else { i + 1 });
            l.up.push(i);
            l.down.push(i);
            l.col.push(i);
            l.row.push(usize::MAX);
        }
        for (ri, (_, cols)) in inst.rows.iter().enumerate() {
            let first = l.left.len();
            for (k, &c) in cols.iter().enumerate() {
                let node = first + k;
                let h = c + 1;
                let last = l.up[h];
                l.left.push(if k == 0 { first + cols.len() - 1 } else { node - 1 });
                l.right.push(if k + 1 == cols.len() { first } else { node + 1 });
                l.up.push(last);
                l.down.push(h);
                l.down[last] = node;
                l.up[h] = node;
                l.col.push(h);
                l.row.push(ri);
                l.size[h] += 1;
            }
        }
        l
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.size[self.col[j]] += 1;
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    fn choose(&self) -> Option<usize> {
        let mut best = None;
        let mut best_size = usize::MAX;
        let mut c = self.right[0];
        while c != 0 {
            if self.size[c] < best_size {
                best_size = self.size[c];
                best = Some(c);
            }
            c = self.right[c];
        }
        best
    }
}

/// Calls `visit` with the sorted row ids of every exact cover until it
/// returns false. Returns the number of covers visited.
pub fn solve_all(inst: &CoverInstance, mut visit: impl FnMut(&[usize]) -> bool) -> u64 {
    let mut links = Links::build(inst);
    let mut chosen: Vec<usize> = Vec::new();
    let mut count = 0;
    search(&mut links, inst, &mut chosen, &mut count, &mut visit);
    count
}

fn search(
    l: &mut Links,
    inst: &CoverInstance,
    chosen: &mut Vec<usize>,
    count: &mut u64,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    let Some(c) = l.choose() else {
        *count += 1;
        let mut ids: Vec<usize> = chosen.iter().map(|&r| inst.rows[r].0).collect();
        ids.sort_unstable();
        return visit(&ids);
    };
    if l.size[c] == 0 {
        return true;
    }
    l.cover(c);
    let mut r = l.down[c];
    let mut go_on = true;
    while r != c {
        chosen.push(l.row[r]);
        let mut j = l.right[r];
        while j != r {
            l.cover(l.col[j]);
            j = l.right[j];
        }
        go_on = search(l, inst, chosen, count, visit);
        let mut j = l.left[r];
        while j != r {
            l.uncover(l.col[j]);
            j = l.left[j];
        }
        chosen.pop();
        if !go_on {
            break;
        }
        r = l.down[r];
    }
    l.uncover(c);
    go_on
}

/// All exact covers, each as sorted row ids.
pub fn all_solutions(inst: &CoverInstance) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    solve_all(inst, |s| {
        out.push(s.to_vec());
        true
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_one_cover() {
        let mut inst = CoverInstance::new(5);
        for i in 0..5 {
            inst.add_row(i, vec![i]).unwrap();
        }
        assert_eq!(all_solutions(&inst), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn no_columns_one_empty_cover() {
        let inst = CoverInstance::new(0);
        assert_eq!(all_solutions(&inst), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn rejects_bad_rows() {
        let mut inst = CoverInstance::new(3);
        assert!(inst.add_row(0, vec![]).is_err());
        assert!(inst.add_row(0, vec![1, 1]).is_err());
        assert!(inst.add_row(0, vec![3]).is_err());
    }

    #[test]
    fn knuth_example() {
        let rows = [
            vec![2, 4, 5],
            vec![0, 3, 6],
            vec![1, 2, 5],
            vec![0, 3],
            vec![1, 6],
            vec![3, 4, 6],
        ];
        let mut inst = CoverInstance::new(7);
        for (i, r) in rows.iter().enumerate() {
            inst.add_row(i, r.clone()).unwrap();
        }
        assert_eq!(all_solutions(&inst), vec![vec![0, 3, 4]]);
    }

    #[test]
    fn early_stop() {
        let mut inst = CoverInstance::new(2);
        inst.add_row(0, vec![0]).unwrap();
        inst.add_row(1, vec![0]).unwrap();
        inst.add_row(2, vec![1]).unwrap();
        let mut seen = 0;
        solve_all(&inst, |_| {
            seen += 1;
            false
        });
        assert_eq!(seen, 1);
    }
}

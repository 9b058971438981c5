//! Ordered tuples of pairwise disjoint codes.

use crate::error::{usage, Error, Result};
use crate::gf3::{check_len, parse_header, Code, Isometry, TernaryWord};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Collection {
    n: usize,
    blocks: Vec<Code>,
}

impl Collection {
    pub fn new(n: usize, blocks: Vec<Code>) -> Result<Self> {
        check_len(n)?;
        let mut union = Code::empty(n);
        for (j, b) in blocks.iter().enumerate() {
            if b.n() != n {
                return Err(usage!("block {j} has length {} not {n}", b.n()));
            }
            if !union.is_disjoint(b)? {
                return Err(usage!("block {j} meets an earlier block"));
            }
            union = union.union(b)?;
        }
        Ok(Self { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Code] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &Code {
        &self.blocks[j]
    }

    pub fn into_blocks(self) -> Vec<Code> {
        self.blocks
    }

    pub fn union(&self) -> Code {
        let mut u = Code::empty(self.n);
        for b in &self.blocks {
            for i in b.iter() {
                u.insert(i);
            }
        }
        u
    }

    pub fn push(&mut self, b: Code) -> Result<()> {
        if b.n() != self.n {
            return Err(usage!("block length {} != {}", b.n(), self.n));
        }
        if !self.union().is_disjoint(&b)? {
            return Err(usage!("new block meets an earlier block"));
        }
        self.blocks.push(b);
        Ok(())
    }

    /// Whether the blocks cover the whole space.
    pub fn is_partition_of(&self, host: &Code) -> bool {
        self.union() == *host
    }

    pub fn apply(&self, g: &Isometry) -> Result<Collection> {
        let blocks = self.blocks.iter().map(|b| g.apply_code(b)).collect::<Result<_>>()?;
        Ok(Self { n: self.n, blocks })
    }

    /// Blocks reordered so that new block `j` is old block `order[j]`.
    pub fn reorder(&self, order: &[usize]) -> Result<Collection> {
        if order.len() != self.k() {
            return Err(usage!("reordering of wrong length"));
        }
        Collection::new(self.n, order.iter().map(|&j| self.blocks[j].clone()).collect())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# q=3 n={} blocks={}\n", self.n, self.k());
        for (j, b) in self.blocks.iter().enumerate() {
            s.push_str(&format!("## block {j} size={}\n", b.len()));
            for w in b.words() {
                s.push_str(&w.to_string());
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty collection file".into()))?;
        let rest = header.trim().strip_prefix('#').unwrap_or("");
        let k: usize = rest
            .split_whitespace()
            .find_map(|t| t.strip_prefix("blocks="))
            .ok_or_else(|| Error::Parse("collection header lacks blocks=".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad blocks= value".into()))?;
        let n: usize = rest
            .split_whitespace()
            .find_map(|t| t.strip_prefix("n="))
            .ok_or_else(|| Error::Parse("collection header lacks n=".into()))?
            .parse()
            .map_err(|_| Error::Parse("bad n= value".into()))?;
        check_len(n).map_err(|e| Error::Parse(e.to_string()))?;
        let mut sections: Vec<(usize, Vec<&str>)> = Vec::new();
        for line in lines {
            if let Some(h) = line.trim().strip_prefix("##") {
                let size: usize = h
                    .split_whitespace()
                    .find_map(|t| t.strip_prefix("size="))
                    .ok_or_else(|| Error::Parse(format!("bad block header {line:?}")))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad block header {line:?}")))?;
                sections.push((size, Vec::new()));
            } else {
                sections
                    .last_mut()
                    .ok_or_else(|| Error::Parse("codeword before first block header".into()))?
                    .1
                    .push(line);
            }
        }
        if sections.len() != k {
            return Err(Error::Parse(format!("expected {k} blocks, found {}", sections.len())));
        }
        let mut blocks = Vec::with_capacity(k);
        for (size, words) in sections {
            let mut text = format!("# q=3 n={n} size={size}\n");
            for w in words {
                text.push_str(w);
                text.push('\n');
            }
            parse_header(text.lines().next().unwrap())?;
            blocks.push(Code::from_text(&text)?);
        }
        Collection::new(n, blocks).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Translates of `c` by `shifts`, as a collection.
pub fn translates(c: &Code, shifts: &[TernaryWord]) -> Result<Collection> {
    let blocks = shifts.iter().map(|v| c.translate(v)).collect::<Result<_>>()?;
    Collection::new(c.n(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hamming_code;

    #[test]
    fn text_round_trip() {
        let h = hamming_code(2).unwrap();
        let shifts: Vec<TernaryWord> = (0..3).map(|i| TernaryWord::from_index(4, i)).collect();
        let c = translates(&h, &shifts).unwrap();
        let back = Collection::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert!(Collection::new(4, vec![h.clone(), h]).is_err());
    }
}

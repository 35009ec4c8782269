//! Adjacency-bitset graphs on up to [`MAX_BIT_VERTICES`] vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_size, Error, Result};
use crate::graph::{parse_count, parse_label, SmallGraph};

pub const MAX_BIT_VERTICES: usize = 10_000;

#[derive(Clone, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

/// A vertex set as a bitset over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { bits: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: usize) {
        self.bits[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.get(v / 64).is_some_and(|w| w >> (v % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &[u64]) {
        for (a, b) in self.bits.iter_mut().zip(other) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    /// `|self ∪ row| - |self|`.
    pub fn gain(&self, row: &[u64]) -> usize {
        self.bits.iter().zip(row).map(|(a, b)| (b & !a).count_ones() as usize).sum()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }
}

impl BitGraph {
    pub fn empty(n: usize) -> Result<Self> {
        ensure_size("vertices", n, MAX_BIT_VERTICES)?;
        let words = n.div_ceil(64);
        Ok(BitGraph { n, words, bits: vec![0; n * words] })
    }

    /// Builds a graph from 0-based edges, rejecting loops and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge {}-{} outside 1..={n}", u + 1, v + 1)));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("loop at vertex {}", u + 1)));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    /// Rows must describe a symmetric relation without loops.
    pub(crate) fn from_rows(n: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (u, row) in rows.into_iter().enumerate() {
            g.bits[u * g.words..(u + 1) * g.words].copy_from_slice(&row);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Neighbourhood of `u` as raw bitset words.
    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// `N(S)`: vertices adjacent to some member of `S`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.n);
        for v in set.iter() {
            out.union_with(self.row(v));
        }
        out
    }

    /// Number of edges with both ends in `set`.
    pub fn edges_within(&self, set: &VertexSet) -> usize {
        set.iter()
            .map(|u| self.row(u).iter().zip(set.words()).map(|(a, b)| (a & b).count_ones() as usize).sum::<usize>())
            .sum::<usize>()
            / 2
    }

    /// Some edge inside `set`, if any.
    pub fn edge_within(&self, set: &VertexSet) -> Option<(usize, usize)> {
        for u in set.iter() {
            for (i, (a, b)) in self.row(u).iter().zip(set.words()).enumerate() {
                let hit = a & b;
                if hit != 0 {
                    let v = i * 64 + hit.trailing_zeros() as usize;
                    return Some((u.min(v), u.max(v)));
                }
            }
        }
        None
    }

    pub fn ensure_independent(&self, set: &VertexSet) -> Result<()> {
        match self.edge_within(set) {
            Some((u, v)) => Err(Error::NotIndependent(u + 1, v + 1)),
            None => Ok(()),
        }
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n).expect("same size");
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn from_small(g: &SmallGraph) -> Self {
        Self::from_edges(g.n(), &g.edges()).expect("small graphs are valid")
    }

    /// Reads the line format: vertex count, then one `u v` pair per line
    /// (1-based). The inline `n;u-v,...` form is also accepted.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (n, pairs): (usize, Vec<(String, String)>) = if let Some((n, rest)) = text.split_once(';') {
            let n = parse_count(n)?;
            let mut pairs = Vec::new();
            for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (u, v) = tok.split_once('-').ok_or_else(|| Error::Parse(format!("bad edge token `{tok}`")))?;
                pairs.push((u.to_string(), v.to_string()));
            }
            (n, pairs)
        } else {
            let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
            let n = parse_count(lines.next().ok_or_else(|| Error::Parse("empty graph text".into()))?)?;
            let mut pairs = Vec::new();
            for line in lines {
                let mut it = line.split_whitespace();
                match (it.next(), it.next(), it.next()) {
                    (Some(u), Some(v), None) => pairs.push((u.to_string(), v.to_string())),
                    _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
                }
            }
            (n, pairs)
        };
        let edges = pairs
            .iter()
            .map(|(u, v)| Ok((parse_label(u, n)?, parse_label(v, n)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }
}

/// Parses a vertex set: whitespace- or comma-separated 1-based labels.
pub fn parse_vertex_set(text: &str, n: usize) -> Result<VertexSet> {
    let mut set = VertexSet::empty(n);
    for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
        if tok.starts_with('#') {
            continue;
        }
        set.insert(parse_label(tok, n)?);
    }
    Ok(set)
}

impl fmt::Debug for BitGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGraph(n={}, m={})", self.n, self.edge_count())
    }
}

#[derive(Serialize, Deserialize)]
struct BitGraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for BitGraph {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let edges = self.edges().into_iter().map(|(u, v)| (u + 1, v + 1)).collect();
        BitGraphRepr { n: self.n, edges }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BitGraphRepr::deserialize(d)?;
        let mut edges = Vec::with_capacity(repr.edges.len());
        for (u, v) in repr.edges {
            if u == 0 || v == 0 {
                return Err(serde::de::Error::custom("vertex labels are 1-based"));
            }
            edges.push((u - 1, v - 1));
        }
        BitGraph::from_edges(repr.n, &edges).map_err(serde::de::Error::custom)
    }
}

impl Serialize for VertexSet {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_seq(self.iter().map(|v| v + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_queries() {
        let g = BitGraph::from_edges(70, &[(0, 69), (1, 2), (65, 69)]).unwrap();
        assert!(g.has_edge(69, 0));
        assert_eq!(g.degree(69), 2);
        assert_eq!(g.edge_count(), 3);
        let s = VertexSet::from_vertices(70, [0, 65, 69]);
        assert_eq!(g.edges_within(&s), 2);
        assert_eq!(g.edge_within(&s), Some((0, 69)));
        assert_eq!(g.neighborhood(&s).to_vec(), vec![0, 65, 69]);
        assert!(matches!(g.ensure_independent(&s), Err(Error::NotIndependent(1, 70))));
        assert_eq!(g.complement().edge_count(), 70 * 69 / 2 - 3);
        assert!(BitGraph::empty(10_001).is_err());
        assert!(BitGraph::from_edges(3, &[(1, 1)]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let g = BitGraph::parse("5\n1 2\n# comment\n4 5\n").unwrap();
        assert_eq!(BitGraph::parse(&g.to_text()).unwrap(), g);
        assert_eq!(BitGraph::parse("5;1-2,4-5").unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<BitGraph>(&json).unwrap(), g);
        assert_eq!(parse_vertex_set("1, 3 5", 5).unwrap().to_vec(), vec![0, 2, 4]);
        assert!(parse_vertex_set("6", 5).is_err());
    }

    #[test]
    fn set_gain() {
        let s = VertexSet::from_vertices(10, [1, 2]);
        let t = VertexSet::from_vertices(10, [2, 3, 4]);
        assert_eq!(s.gain(t.words()), 2);
        assert!(!s.is_subset(&t));
        assert!(!s.is_disjoint(&t));
        assert_eq!(VertexSet::full(3).len(), 3);
    }
}

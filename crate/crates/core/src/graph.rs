//! Small labeled graphs, canonical isomorphism classes and the families of
//! graphs with a fixed number of edges.
//!
//! Vertices are `0..n` in the Rust API. The text formats (`"n;u-v,..."` and
//! the line-based file format) use labels `1..=n`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_size, Error, Result};

/// Largest vertex count a [`SmallGraph`] can hold.
pub const MAX_VERTICES: usize = 12;

/// Largest `k` supported by [`enumerate_gkm`] and [`graph_classes`].
pub const MAX_CATALOG_VERTICES: usize = 8;

/// Simple undirected graph on at most [`MAX_VERTICES`] vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SmallGraph {
    n: usize,
    adj: [u16; MAX_VERTICES],
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

impl SmallGraph {
    pub fn empty(n: usize) -> Result<Self> {
        ensure_size("vertex count", n, MAX_VERTICES)?;
        Ok(SmallGraph { n, adj: [0; MAX_VERTICES] })
    }

    /// Builds a graph from 0-based edges. Rejects loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({}, {}) has an endpoint outside 1..={n}",
                    u + 1,
                    v + 1
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {}", u + 1)));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge ({}, {})",
                    u + 1,
                    v + 1
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1 << v);
        self.adj[v] &= !(1 << u);
    }

    /// Neighbourhood of `v` as a bitmask over `0..n`.
    pub fn neighbor_mask(&self, v: usize) -> u16 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj[..self.n].iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Pairs `(u, v)`, `u < v`, that are not edges.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn complement(&self) -> Self {
        let mut g = *self;
        let full: u16 = if self.n == 0 { 0 } else { (1u32 << self.n) as u16 - 1 };
        for v in 0..self.n {
            g.adj[v] = !self.adj[v] & full & !(1 << v);
        }
        g
    }

    /// Graph whose vertex `perm[v]` plays the role of `v` in `self`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let mut g = SmallGraph { n: self.n, adj: [0; MAX_VERTICES] };
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Subgraph induced on `vertices`, relabeled to `0..vertices.len()` in order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = SmallGraph { n: vertices.len(), adj: [0; MAX_VERTICES] };
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.adj[v] == 0).collect()
    }

    pub fn without_isolated(&self) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&v| self.adj[v] != 0).collect();
        self.induced(&keep)
    }

    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        ensure_size("vertex count", n, MAX_VERTICES)?;
        let mut g = SmallGraph { n, adj: [0; MAX_VERTICES] };
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(u + self.n, v + self.n);
        }
        Ok(g)
    }

    /// Adds a new vertex joined to `attach` by a pendant edge.
    pub fn with_pendant(&self, attach: usize) -> Result<Self> {
        if attach >= self.n {
            return Err(Error::InvalidParameter(format!("no vertex {}", attach + 1)));
        }
        ensure_size("vertex count", self.n + 1, MAX_VERTICES)?;
        let mut g = *self;
        g.n += 1;
        g.add_edge(attach, self.n);
        Ok(g)
    }

    /// Breadth-first distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            let mut nb = self.adj[u];
            while nb != 0 {
                let v = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Diameter by all-pairs BFS; `None` means infinite (disconnected).
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for s in 0..self.n {
            for d in self.distances_from(s) {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let comp: Vec<usize> = self
                .distances_from(s)
                .iter()
                .enumerate()
                .filter_map(|(v, d)| d.map(|_| v))
                .collect();
            for &v in &comp {
                seen[v] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Canonical code of the graph on all of its vertices (isolated ones included).
    pub(crate) fn code(&self) -> u128 {
        let mut code = 0u128;
        for (u, v) in self.edges() {
            code |= 1u128 << (127 - pair_index(u, v));
        }
        code
    }

    fn from_code(n: usize, code: u128) -> Self {
        let mut g = SmallGraph { n, adj: [0; MAX_VERTICES] };
        for j in 1..n {
            for i in 0..j {
                if code >> (127 - pair_index(i, j)) & 1 == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Parses `"n;u-v,u-v"` (1-based) or the line format `n` followed by `u v` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((n, rest)) = text.split_once(';') {
            let n = parse_count(n)?;
            let mut edges = Vec::new();
            for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (u, v) = tok
                    .split_once('-')
                    .ok_or_else(|| Error::Parse(format!("bad edge token `{tok}`")))?;
                edges.push((parse_label(u, n)?, parse_label(v, n)?));
            }
            return Self::from_edges(n, &edges);
        }
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n = parse_count(lines.next().ok_or_else(|| Error::Parse("empty graph text".into()))?)?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace();
            match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) => edges.push((parse_label(u, n)?, parse_label(v, n)?)),
                _ => return Err(Error::Parse(format!("bad edge line `{line}`"))),
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Line-based text format with 1-based labels.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        s
    }
}

pub(crate) fn parse_count(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad vertex count `{}`", s.trim())))
}

pub(crate) fn parse_label(s: &str, n: usize) -> Result<usize> {
    let v: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad vertex label `{}`", s.trim())))?;
    if v == 0 || v > n {
        return Err(Error::Parse(format!("vertex label {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

impl fmt::Display for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.n)?;
        let edges = self.edges();
        for (i, (u, v)) in edges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}-{}", u + 1, v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmallGraph({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for SmallGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { n: self.n, edges: self.edges().into_iter().map(|(u, v)| (u + 1, v + 1)).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SmallGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        let edges: Vec<_> = repr
            .edges
            .iter()
            .map(|&(u, v)| (u.wrapping_sub(1), v.wrapping_sub(1)))
            .collect();
        SmallGraph::from_edges(repr.n, &edges).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// canonical forms

struct CanonSearch<'a> {
    g: &'a SmallGraph,
    twin_rep: Vec<usize>,
    perm: Vec<usize>,
    best: Option<(u128, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn run(&mut self, pos: usize, placed: u16, code: u128) {
        let n = self.g.n;
        if pos == n {
            if self.best.as_ref().is_none_or(|(b, _)| code < *b) {
                self.best = Some((code, self.perm.clone()));
            }
            return;
        }
        let width = (pos + 1) * pos / 2;
        let mask = if width == 0 { 0 } else { !0u128 << (128 - width) };
        // one candidate per twin class among unplaced vertices
        let mut tried: u16 = 0;
        for v in 0..n {
            if placed >> v & 1 == 1 {
                continue;
            }
            let rep = self.twin_rep[v];
            if tried >> rep & 1 == 1 {
                continue;
            }
            tried |= 1 << rep;

            let mut next = code;
            for i in 0..pos {
                if self.g.has_edge(self.perm[i], v) {
                    next |= 1u128 << (127 - pair_index(i, pos));
                }
            }
            if let Some((b, _)) = &self.best {
                if next & mask > b & mask {
                    continue;
                }
            }
            self.perm.push(v);
            self.run(pos + 1, placed | 1 << v, next);
            self.perm.pop();
        }
    }
}

fn twin_representatives(g: &SmallGraph) -> Vec<usize> {
    let n = g.n;
    let mut rep: Vec<usize> = (0..n).collect();
    for v in 0..n {
        for u in 0..v {
            if rep[u] != u {
                continue;
            }
            let (nu, nv) = (g.adj[u] & !(1 << v), g.adj[v] & !(1 << u));
            if nu == nv {
                rep[v] = u;
                break;
            }
        }
    }
    rep
}

/// Lexicographically minimal adjacency code over all relabelings, together
/// with a permutation `order` such that `order[i]` is the vertex placed at
/// canonical position `i`.
pub(crate) fn canonical_code(g: &SmallGraph) -> (u128, Vec<usize>) {
    let mut search = CanonSearch { g, twin_rep: twin_representatives(g), perm: Vec::with_capacity(g.n), best: None };
    search.run(0, 0, 0);
    search.best.expect("at least one labeling exists")
}

/// Canonical isomorphism class of a graph with its isolated vertices discarded.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphClass {
    graph: SmallGraph,
    code: u128,
}

impl GraphClass {
    /// The canonical representative (vertices `0..n`, no isolated vertices).
    pub fn graph(&self) -> &SmallGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Number of automorphisms of the canonical representative.
    pub fn automorphisms(&self) -> u64 {
        automorphism_count(&self.graph)
    }

    /// Number of graphs on `[k]` whose non-isolated part is isomorphic to this class.
    pub fn labeled_copies(&self, k: usize) -> u128 {
        let v = self.graph.n;
        if v > k {
            return 0;
        }
        let mut copies: u128 = 1;
        for i in 0..v {
            copies *= (k - i) as u128;
        }
        copies / self.automorphisms() as u128
    }
}

impl PartialOrd for GraphClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GraphClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.graph.n, self.edge_count(), self.code).cmp(&(other.graph.n, other.edge_count(), other.code))
    }
}

impl fmt::Debug for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GraphClass({})", self.graph)
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.graph.fmt(f)
    }
}

impl Serialize for GraphClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.graph.serialize(s)
    }
}

/// Canonical class of `g` after discarding isolated vertices.
pub fn canonical_form(g: &SmallGraph) -> GraphClass {
    let core = g.without_isolated();
    let (code, _) = canonical_code(&core);
    GraphClass { graph: SmallGraph::from_code(core.n, code), code }
}

/// True when `a` and `b` are isomorphic after discarding isolated vertices.
pub fn isomorphic(a: &SmallGraph, b: &SmallGraph) -> bool {
    canonical_form(a) == canonical_form(b)
}

pub fn automorphism_count(g: &SmallGraph) -> u64 {
    fn extend(g: &SmallGraph, image: &mut Vec<usize>, used: u16) -> u64 {
        let pos = image.len();
        if pos == g.n {
            return 1;
        }
        let mut total = 0;
        for cand in 0..g.n {
            if used >> cand & 1 == 1 || g.degree(cand) != g.degree(pos) {
                continue;
            }
            if (0..pos).all(|i| g.has_edge(i, pos) == g.has_edge(image[i], cand)) {
                image.push(cand);
                total += extend(g, image, used | 1 << cand);
                image.pop();
            }
        }
        total
    }
    extend(g, &mut Vec::with_capacity(g.n), 0)
}

// ---------------------------------------------------------------------------
// catalog

/// All isomorphism classes of graphs on exactly `n` vertices (isolated
/// vertices allowed), sorted by edge count then canonical code.
pub fn graph_classes(n: usize) -> Result<&'static [SmallGraph]> {
    ensure_size("catalog vertex count", n, MAX_CATALOG_VERTICES)?;
    static CACHE: [OnceLock<Vec<SmallGraph>>; MAX_CATALOG_VERTICES + 1] = [const { OnceLock::new() }; MAX_CATALOG_VERTICES + 1];
    if let Some(v) = CACHE[n].get() {
        return Ok(v);
    }
    let built = if n == 0 {
        vec![SmallGraph::default()]
    } else {
        let smaller = graph_classes(n - 1)?;
        let codes: HashSet<u128> = smaller
            .par_iter()
            .flat_map_iter(|base| {
                (0u16..1 << (n - 1)).map(move |nbrs| {
                    let mut g = *base;
                    g.n = n;
                    for u in 0..n - 1 {
                        if nbrs >> u & 1 == 1 {
                            g.add_edge(u, n - 1);
                        }
                    }
                    canonical_code(&g).0
                })
            })
            .collect();
        let mut graphs: Vec<SmallGraph> = codes.into_iter().map(|c| SmallGraph::from_code(n, c)).collect();
        graphs.sort_by_key(|g| (g.edge_count(), g.code()));
        graphs
    };
    Ok(CACHE[n].get_or_init(|| built))
}

/// Connected classes on `1..=max_vertices` vertices, ordered by vertex count,
/// then edge count, then canonical code.
pub fn connected_classes(max_vertices: usize) -> Result<Vec<GraphClass>> {
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        for g in graph_classes(n)? {
            if g.is_connected() {
                out.push(GraphClass { graph: *g, code: g.code() });
            }
        }
    }
    Ok(out)
}

/// A member of the family of graphs with at most `k` vertices and `m` edges,
/// with the number of graphs on `[k]` that reduce to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyEntry {
    pub class: GraphClass,
    pub multiplicity: u128,
}

/// Isomorphism classes of graphs with at most `k` vertices, exactly `m`
/// edges and no isolated vertices, each with its labeled multiplicity on `[k]`.
pub fn enumerate_gkm(k: usize, m: usize) -> Result<Vec<FamilyEntry>> {
    ensure_size("k", k, MAX_CATALOG_VERTICES)?;
    if m == 0 || m > k * k.saturating_sub(1) / 2 {
        return Err(Error::InvalidParameter(format!("m = {m} outside 1..=C({k},2)")));
    }
    let mut out = Vec::new();
    for v in 2..=k {
        for g in graph_classes(v)? {
            if g.edge_count() == m && g.isolated_vertices().is_empty() {
                let class = GraphClass { graph: *g, code: g.code() };
                out.push(FamilyEntry { multiplicity: class.labeled_copies(k), class });
            }
        }
    }
    out.sort_by(|a, b| a.class.cmp(&b.class));
    Ok(out)
}

// ---------------------------------------------------------------------------
// named graphs

pub fn path(k: usize) -> Result<SmallGraph> {
    let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    SmallGraph::from_edges(k, &edges)
}

pub fn cycle(k: usize) -> Result<SmallGraph> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("cycle needs at least 3 vertices, got {k}")));
    }
    let mut edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
    edges.push((0, k - 1));
    SmallGraph::from_edges(k, &edges)
}

pub fn clique(k: usize) -> Result<SmallGraph> {
    let mut g = SmallGraph::empty(k)?;
    for u in 0..k {
        for v in u + 1..k {
            g.add_edge(u, v);
        }
    }
    Ok(g)
}

pub fn complete_bipartite(k: usize, l: usize) -> Result<SmallGraph> {
    let mut g = SmallGraph::empty(k + l)?;
    for u in 0..k {
        for v in k..k + l {
            g.add_edge(u, v);
        }
    }
    Ok(g)
}

/// Parses a graph name. Components joined by `+` form a disjoint union.
///
/// Recognised components: `Pk`, `Ck`, `Kk`, `Kk,l`, `Ek` (edgeless),
/// `K4-` (clique minus an edge), and any of those with a trailing `'`
/// (a pendant edge attached to the first vertex).
pub fn named_graph(name: &str) -> Result<SmallGraph> {
    let mut acc: Option<SmallGraph> = None;
    for part in name.split('+').map(str::trim) {
        let g = named_component(part)?;
        acc = Some(match acc {
            None => g,
            Some(a) => a.disjoint_union(&g)?,
        });
    }
    acc.ok_or_else(|| Error::UnknownGraph(name.to_string()))
}

fn named_component(name: &str) -> Result<SmallGraph> {
    let unknown = || Error::UnknownGraph(name.to_string());
    if let Some(base) = name.strip_suffix('\'') {
        return named_component(base)?.with_pendant(0);
    }
    if let Some(base) = name.strip_suffix('-') {
        let mut g = named_component(base)?;
        let (u, v) = *g.edges().first().ok_or_else(unknown)?;
        g.remove_edge(u, v);
        return Ok(g);
    }
    let mut chars = name.chars();
    let kind = chars.next().ok_or_else(unknown)?;
    let rest = chars.as_str().trim_start_matches('_').trim_matches(|c| c == '{' || c == '}');
    let num = |s: &str| -> Result<usize> { s.trim().parse().map_err(|_| unknown()) };
    match kind {
        'P' => path(num(rest)?),
        'C' => cycle(num(rest)?),
        'E' => SmallGraph::empty(num(rest)?),
        'K' => match rest.split_once(',') {
            Some((a, b)) => complete_bipartite(num(a)?, num(b)?),
            None => clique(num(rest)?),
        },
        _ => Err(unknown()),
    }
}

/// Resolves a graph given by name, inline `n;u-v,...` text or line format.
pub fn parse_graph_spec(spec: &str) -> Result<SmallGraph> {
    if spec.contains(';') || spec.contains('\n') {
        SmallGraph::parse(spec)
    } else {
        named_graph(spec)
    }
}

/// Counts induced paths by length (number of edges); a single vertex is a
/// path of length 0.
pub fn induced_subpath_counts(g: &SmallGraph) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for mask in 1u32..1 << g.n {
        let verts: Vec<usize> = (0..g.n).filter(|&v| mask >> v & 1 == 1).collect();
        let h = g.induced(&verts);
        let is_path = h.is_connected()
            && h.edge_count() + 1 == h.n
            && (0..h.n).all(|v| h.degree(v) <= 2);
        if is_path {
            *out.entry(h.edge_count()).or_insert(0) += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> SmallGraph {
        SmallGraph::parse(text).unwrap()
    }

    #[test]
    fn triangle_with_isolated_vertex_matches_plain_triangle() {
        assert_eq!(canonical_form(&g("3;1-2,2-3,1-3")), canonical_form(&g("4;2-3,3-4,2-4")));
    }

    #[test]
    fn relabeled_paths_match() {
        assert_eq!(canonical_form(&g("4;1-2,2-3,3-4")), canonical_form(&g("4;4-2,2-1,1-3")));
    }

    #[test]
    fn triangle_and_path_differ() {
        assert_ne!(canonical_form(&clique(3).unwrap()), canonical_form(&path(3).unwrap()));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let c = canonical_form(&g("6;1-2,2-3,3-1,4-5,5-6"));
        assert_eq!(canonical_form(c.graph()), c);
    }

    #[test]
    fn twelve_vertex_symmetric_graphs_are_fast() {
        let k12 = clique(12).unwrap();
        assert_eq!(canonical_form(&k12).edge_count(), 66);
        let k66 = complete_bipartite(6, 6).unwrap();
        assert_eq!(canonical_form(&k66).vertex_count(), 12);
    }

    #[test]
    fn g53_matches_named_family() {
        let fam = enumerate_gkm(5, 3).unwrap();
        let got: HashSet<_> = fam.iter().map(|e| e.class).collect();
        let want: HashSet<_> = ["K3", "P4", "P3+K2", "K1,3"]
            .iter()
            .map(|n| canonical_form(&named_graph(n).unwrap()))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn g42_multiplicities() {
        let fam = enumerate_gkm(4, 2).unwrap();
        let p3 = canonical_form(&path(3).unwrap());
        let mm = canonical_form(&named_graph("K2+K2").unwrap());
        assert_eq!(fam.len(), 2);
        for e in fam {
            if e.class == p3 {
                assert_eq!(e.multiplicity, 12);
            } else {
                assert_eq!(e.class, mm);
                assert_eq!(e.multiplicity, 3);
            }
        }
    }

    #[test]
    fn g33_is_triangle() {
        let fam = enumerate_gkm(3, 3).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].class, canonical_form(&clique(3).unwrap()));
        assert_eq!(fam[0].multiplicity, 1);
    }

    #[test]
    fn enumerate_rejects_bad_parameters() {
        assert!(enumerate_gkm(4, 0).is_err());
        assert!(enumerate_gkm(4, 7).is_err());
        assert!(matches!(enumerate_gkm(9, 1), Err(Error::SizeExceeded { .. })));
    }

    #[test]
    fn class_counts_match_known_sequence() {
        // number of graphs on n unlabeled vertices
        let known = [1, 1, 2, 4, 11, 34, 156];
        for (n, &want) in known.iter().enumerate() {
            assert_eq!(graph_classes(n).unwrap().len(), want, "n = {n}");
        }
    }

    #[test]
    fn multiplicities_sum_to_binomial() {
        fn binom(n: u128, k: u128) -> u128 {
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        for k in 2..=6usize {
            let pairs = (k * (k - 1) / 2) as u128;
            for m in 1..=pairs as usize {
                let total: u128 = enumerate_gkm(k, m).unwrap().iter().map(|e| e.multiplicity).sum();
                assert_eq!(total, binom(pairs, m as u128), "k={k} m={m}");
            }
        }
    }

    #[test]
    fn multiplicities_match_brute_force_k4() {
        // every labeled graph on [4], grouped by class
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let mut counts: HashMap<GraphClass, u128> = HashMap::new();
        for mask in 1u32..1 << pairs.len() {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            *counts.entry(canonical_form(&SmallGraph::from_edges(4, &edges).unwrap())).or_default() += 1;
        }
        for m in 1..=6 {
            for e in enumerate_gkm(4, m).unwrap() {
                assert_eq!(counts[&e.class], e.multiplicity);
            }
        }
    }

    #[test]
    fn named_graph_shapes() {
        let k23 = named_graph("K2,3").unwrap();
        assert_eq!((k23.n(), k23.edge_count()), (5, 6));
        let u = named_graph("P5+P3").unwrap();
        assert_eq!((u.n(), u.edge_count()), (8, 6));
        assert_eq!(named_graph("P4+P4").unwrap().diameter(), None);
        assert_eq!(cycle(5).unwrap().diameter(), Some(2));
        let k4m = named_graph("K4-").unwrap();
        assert_eq!((k4m.n(), k4m.edge_count()), (4, 5));
        let k3p = named_graph("K3'").unwrap();
        assert_eq!((k3p.n(), k3p.edge_count()), (4, 4));
        assert!(matches!(named_graph("Q3"), Err(Error::UnknownGraph(_))));
        assert!(matches!(named_graph("K13"), Err(Error::SizeExceeded { .. })));
        assert!(matches!(named_graph("P7+P6"), Err(Error::SizeExceeded { .. })));
    }

    #[test]
    fn rejects_malformed_graphs() {
        assert!(SmallGraph::parse("3;1-1").is_err());
        assert!(SmallGraph::parse("3;1-2,2-1").is_err());
        assert!(SmallGraph::parse("3;1-4").is_err());
        assert!(SmallGraph::parse("13;").is_err());
        assert!(SmallGraph::parse("3\n1 2\n2 3").is_ok());
    }

    #[test]
    fn text_formats_round_trip() {
        let g0 = named_graph("C5+K2").unwrap();
        assert_eq!(SmallGraph::parse(&g0.to_text()).unwrap(), g0);
        assert_eq!(SmallGraph::parse(&g0.to_string()).unwrap(), g0);
    }

    #[test]
    fn path_pair_subpath_counts() {
        let a = named_graph("P4+P4").unwrap();
        let b = named_graph("P5+P3").unwrap();
        let (ca, cb) = (induced_subpath_counts(&a), induced_subpath_counts(&b));
        // d = 2: lengths 0..=d+1 agree, 2d + 4 - 2i each
        for i in 0..=3 {
            assert_eq!(ca[&i], 8 - 2 * i);
            assert_eq!(cb[&i], 8 - 2 * i);
        }
        assert_eq!(ca.get(&4), None);
        assert_eq!(cb[&4], 1);
    }
}

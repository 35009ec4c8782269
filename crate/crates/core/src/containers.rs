//! Fingerprint encoding and container decoding for independent sets.
//!
//! Vertices are processed in their natural order. Thresholds compare
//! neighbourhood growth against `δn/2` exactly: with `δ = p/q` the test
//! `gain ≥ δn/2` is evaluated as `2q·gain ≥ p·n` in integers.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::bitgraph::{BitGraph, VertexSet};
use crate::distribution::log_alpha_k;
use crate::error::{ensure_size, Error, Result};
use crate::graphon::StepGraphon;
use crate::sampler::sample_n_graph;
use crate::scalar::{parse_rational, Scalar};

/// Largest graph on which independent sets are enumerated exhaustively.
pub const MAX_EXHAUSTIVE_VERTICES: usize = 30;

/// A rational `δ = num/den` in `(0, 1]`, in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Delta {
    num: u64,
    den: u64,
}

impl Delta {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {num}/{den}")));
        }
        let g = num::integer::gcd(num, den);
        Ok(Delta { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `gain ≥ δn/2`.
    pub fn reaches_half(&self, gain: usize, n: usize) -> bool {
        2 * self.den as u128 * gain as u128 >= self.num as u128 * n as u128
    }

    /// `⌈2/δ⌉`.
    pub fn fingerprint_limit(&self) -> usize {
        (2 * self.den).div_ceil(self.num) as usize
    }

    /// Whether `edges ≤ t·n + c·δn/2`.
    pub fn within_edge_bound(&self, edges: usize, t: usize, c: usize, n: usize) -> bool {
        let (p, q) = (self.num as u128, self.den as u128);
        2 * q * edges as u128 <= 2 * q * (t as u128) * (n as u128) + p * (n as u128) * (c as u128)
    }

    pub fn edge_bound(&self, t: usize, c: usize, n: usize) -> f64 {
        (t * n) as f64 + c as f64 * self.to_f64() * n as f64 / 2.0
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// Accepts `p/q` or a terminating decimal such as `0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s).ok_or_else(|| Error::Parse(format!("bad delta `{s}`")))?;
        if r <= Zero::zero() {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {s}")));
        }
        match (r.numer().to_u64(), r.denom().to_u64()) {
            (Some(p), Some(q)) => Delta::new(p, q),
            _ => Err(Error::InvalidParameter(format!("delta `{s}` does not fit in 64-bit integers"))),
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Incremental state of the encoding procedure.
#[derive(Clone)]
struct Encoder {
    fingerprint: VertexSet,
    covered: VertexSet,
}

impl Encoder {
    fn new(n: usize) -> Self {
        Encoder { fingerprint: VertexSet::empty(n), covered: VertexSet::empty(n) }
    }

    fn step(&mut self, g: &BitGraph, v: usize, delta: Delta) {
        let row = g.row(v);
        if delta.reaches_half(self.covered.gain(row), g.n()) {
            self.fingerprint.insert(v);
            self.covered.union_with(row);
        }
    }
}

/// The fingerprint `T(I) ⊆ I`.
pub fn encode(g: &BitGraph, independent: &VertexSet, delta: Delta) -> Result<VertexSet> {
    g.ensure_independent(independent)?;
    let mut enc = Encoder::new(g.n());
    for v in independent.iter() {
        enc.step(g, v, delta);
    }
    Ok(enc.fingerprint)
}

/// The container `C(T)`.
pub fn decode(g: &BitGraph, fingerprint: &VertexSet, delta: Delta) -> Result<VertexSet> {
    g.ensure_independent(fingerprint)?;
    let n = g.n();
    let excluded = g.neighborhood(fingerprint);
    let mut container = fingerprint.clone();
    // neighbourhood of the fingerprint vertices preceding the current vertex
    let mut prefix = VertexSet::empty(n);
    for v in 0..n {
        if fingerprint.contains(v) {
            prefix.union_with(g.row(v));
            continue;
        }
        if !excluded.contains(v) && !delta.reaches_half(prefix.gain(g.row(v)), n) {
            container.insert(v);
        }
    }
    Ok(container)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContainerCertificate {
    pub delta: Delta,
    pub n: usize,
    pub fingerprint: VertexSet,
    pub container: VertexSet,
    pub edges_in_container: usize,
    /// `|T|·n + |C|·δn/2`
    pub bound: f64,
    pub fingerprint_in_container: bool,
    pub avoids_neighborhood: bool,
    pub fingerprint_small: bool,
    pub edge_bound_holds: bool,
}

impl ContainerCertificate {
    pub fn new(g: &BitGraph, fingerprint: VertexSet, container: VertexSet, delta: Delta) -> Self {
        let n = g.n();
        let (t, c) = (fingerprint.len(), container.len());
        let edges = g.edges_within(&container);
        ContainerCertificate {
            delta,
            n,
            fingerprint_in_container: fingerprint.is_subset(&container),
            avoids_neighborhood: container.is_disjoint(&g.neighborhood(&fingerprint)),
            fingerprint_small: t <= delta.fingerprint_limit(),
            edge_bound_holds: delta.within_edge_bound(edges, t, c, n),
            bound: delta.edge_bound(t, c, n),
            edges_in_container: edges,
            fingerprint,
            container,
        }
    }

    pub fn holds(&self) -> bool {
        self.fingerprint_in_container && self.avoids_neighborhood && self.fingerprint_small && self.edge_bound_holds
    }
}

/// Encodes then decodes `independent`, returning the certificate.
pub fn certify(g: &BitGraph, independent: &VertexSet, delta: Delta) -> Result<ContainerCertificate> {
    let t = encode(g, independent, delta)?;
    let c = decode(g, &t, delta)?;
    Ok(ContainerCertificate::new(g, t, c, delta))
}

/// Where the independent sets fed to the encoder come from.
#[derive(Clone, Debug)]
pub enum IndependentSource {
    /// Every independent `k`-set (graphs with at most 30 vertices).
    Exhaustive,
    /// Caller-supplied independent sets of size at least `k`.
    Planted(Vec<VertexSet>),
    /// One set from the minimum-degree greedy heuristic.
    Greedy,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostIndependentSet {
    pub set: VertexSet,
    pub certificate: ContainerCertificate,
    pub sets_encoded: u64,
    pub distinct_fingerprints: usize,
}

/// Minimum-degree greedy independent set, ties broken by label.
pub fn greedy_independent_set(g: &BitGraph) -> VertexSet {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut set = VertexSet::empty(n);
    let mut blocked = VertexSet::empty(n);
    for v in order {
        if !blocked.contains(v) {
            set.insert(v);
            blocked.insert(v);
            blocked.union_with(g.row(v));
        }
    }
    set
}

/// Calls `visit` on every independent set of size `k` (or of every size when
/// `k` is `None`) together with its fingerprint.
fn for_each_independent(
    g: &BitGraph,
    k: Option<usize>,
    delta: Delta,
    visit: &mut dyn FnMut(&VertexSet, &VertexSet),
) -> Result<()> {
    ensure_size("vertices for exhaustive enumeration", g.n(), MAX_EXHAUSTIVE_VERTICES)?;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &BitGraph,
        start: usize,
        set: &VertexSet,
        size: usize,
        blocked: &VertexSet,
        enc: &Encoder,
        k: Option<usize>,
        delta: Delta,
        visit: &mut dyn FnMut(&VertexSet, &VertexSet),
    ) {
        if k.is_none_or(|k| k == size) {
            visit(set, &enc.fingerprint);
        }
        if k.is_some_and(|k| size >= k) {
            return;
        }
        for v in start..g.n() {
            if blocked.contains(v) {
                continue;
            }
            let mut next_blocked = blocked.clone();
            next_blocked.union_with(g.row(v));
            let mut next_enc = enc.clone();
            next_enc.step(g, v, delta);
            let mut next_set = set.clone();
            next_set.insert(v);
            rec(g, v + 1, &next_set, size + 1, &next_blocked, &next_enc, k, delta, visit);
        }
    }
    let n = g.n();
    rec(g, 0, &VertexSet::empty(n), 0, &VertexSet::empty(n), &Encoder::new(n), k, delta, visit);
    Ok(())
}

/// Result of checking `I ⊆ C(T(I))` over all independent sets.
#[derive(Clone, Debug, Serialize)]
pub struct ContainmentReport {
    pub sets_checked: u64,
    pub failures: u64,
    pub max_fingerprint: usize,
    pub certificates_hold: bool,
}

pub fn exhaustive_containment(g: &BitGraph, delta: Delta) -> Result<ContainmentReport> {
    let mut report = ContainmentReport { sets_checked: 0, failures: 0, max_fingerprint: 0, certificates_hold: true };
    let mut decoded: std::collections::HashMap<Vec<usize>, ContainerCertificate> = Default::default();
    for_each_independent(g, None, delta, &mut |set, fingerprint| {
        report.sets_checked += 1;
        report.max_fingerprint = report.max_fingerprint.max(fingerprint.len());
        let cert = decoded.entry(fingerprint.to_vec()).or_insert_with(|| {
            let c = decode(g, fingerprint, delta).expect("fingerprints are independent");
            ContainerCertificate::new(g, fingerprint.clone(), c, delta)
        });
        report.certificates_hold &= cert.holds();
        if !set.is_subset(&cert.container) {
            report.failures += 1;
        }
    })?;
    Ok(report)
}

/// The largest container over fingerprints of the independent `k`-sets
/// supplied by `source`.
pub fn almost_independent_set(
    g: &BitGraph,
    k: usize,
    delta: Delta,
    source: &IndependentSource,
) -> Result<AlmostIndependentSet> {
    let mut fingerprints: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut encoded = 0u64;
    match source {
        IndependentSource::Exhaustive => {
            for_each_independent(g, Some(k), delta, &mut |_, t| {
                encoded += 1;
                fingerprints.insert(t.to_vec());
            })?;
        }
        IndependentSource::Planted(sets) => {
            for set in sets.iter().filter(|s| s.len() >= k) {
                encoded += 1;
                fingerprints.insert(encode(g, set, delta)?.to_vec());
            }
        }
        IndependentSource::Greedy => {
            let set = greedy_independent_set(g);
            if set.len() >= k {
                encoded += 1;
                fingerprints.insert(encode(g, &set, delta)?.to_vec());
            }
        }
    }
    let n = g.n();
    let mut best: Option<ContainerCertificate> = None;
    for t in &fingerprints {
        let t = VertexSet::from_vertices(n, t.iter().copied());
        let c = decode(g, &t, delta)?;
        if best.as_ref().is_none_or(|b| c.len() > b.container.len()) {
            best = Some(ContainerCertificate::new(g, t, c, delta));
        }
    }
    let certificate = best.ok_or(Error::NoIndependentSet(k))?;
    Ok(AlmostIndependentSet {
        set: certificate.container.clone(),
        certificate,
        sets_encoded: encoded,
        distinct_fingerprints: fingerprints.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub k: usize,
    pub delta: Delta,
    pub seed: u64,
    /// `planted` or `greedy`.
    pub source: String,
    pub planted_parts: Vec<usize>,
    pub independent_size: usize,
    pub container_size: usize,
    pub container_ratio: f64,
    pub contains_independent_set: bool,
    /// Largest measure of a union of parts on which `W` vanishes.
    pub alpha: f64,
    /// `α_k(W)^{1/k}`.
    pub alpha_k_root: f64,
    pub certificate: ContainerCertificate,
    pub notes: Vec<String>,
}

/// Samples `G(n, W)`, encodes and decodes a planted (or greedy) independent
/// set, and sets the container size against `α(W)` and `α_k(W)^{1/k}`.
pub fn independence_pipeline<S: Scalar>(
    w: &StepGraphon<S>,
    n: usize,
    k: usize,
    delta: Delta,
    seed: u64,
) -> Result<PipelineReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let wf = w.to_f64();
    let sample = sample_n_graph(&wf, n, seed)?;
    let g = &sample.graph;
    let (alpha, parts) = wf.independence_ratio();
    let mut notes = Vec::new();
    let (source, planted_parts, independent) = if alpha > 0.0 {
        ("planted", parts.clone(), sample.vertices_in(&parts))
    } else {
        notes.push("no part-union on which W vanishes; alpha(W) = 0 and the set comes from the greedy heuristic".into());
        ("greedy", Vec::new(), greedy_independent_set(g))
    };
    if independent.len() < k {
        notes.push(format!("independent set has {} < k = {k} vertices", independent.len()));
    }
    let certificate = certify(g, &independent, delta)?;
    let alpha_k_root = (log_alpha_k(&wf, k)? / k as f64).exp();
    Ok(PipelineReport {
        n,
        k,
        delta,
        seed,
        source: source.into(),
        planted_parts,
        independent_size: independent.len(),
        container_size: certificate.container.len(),
        container_ratio: certificate.container.len() as f64 / n.max(1) as f64,
        contains_independent_set: independent.is_subset(&certificate.container),
        alpha,
        alpha_k_root,
        certificate,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_bipartite;

    fn d(s: &str) -> Delta {
        s.parse().unwrap()
    }

    fn star(n: usize) -> BitGraph {
        BitGraph::from_small(&complete_bipartite(1, n - 1).unwrap())
    }

    #[test]
    fn delta_parsing() {
        assert_eq!(d("0.2"), Delta::new(1, 5).unwrap());
        assert_eq!(d("2/10").to_string(), "1/5");
        assert_eq!(d("1"), Delta::new(1, 1).unwrap());
        assert!("0".parse::<Delta>().is_err());
        assert!("3/2".parse::<Delta>().is_err());
        assert!("-0.1".parse::<Delta>().is_err());
        assert_eq!(d("1/5").fingerprint_limit(), 10);
        assert_eq!(d("3/10").fingerprint_limit(), 7);
    }

    #[test]
    fn threshold_is_exact_at_ties() {
        // δn/2 = 1 exactly
        let delta = d("1/5");
        assert!(delta.reaches_half(1, 10));
        assert!(!delta.reaches_half(0, 10));
        // 0.1 + 0.2 style float error cannot flip this comparison
        let delta = d("3/10");
        assert!(delta.reaches_half(3, 20));
        assert!(!delta.reaches_half(2, 20));
    }

    #[test]
    fn empty_graph_has_empty_fingerprint() {
        let g = BitGraph::empty(9).unwrap();
        let i = VertexSet::from_vertices(9, [0, 3, 8]);
        assert!(encode(&g, &i, d("1/2")).unwrap().is_empty());
        assert_eq!(decode(&g, &VertexSet::empty(9), d("1/2")).unwrap().len(), 9);
    }

    #[test]
    fn star_hand_traces() {
        let g = star(10);
        let leaves = VertexSet::from_vertices(10, 1..10);
        // δn/2 = 2.5 > 1
        let delta = d("1/2");
        assert!(encode(&g, &leaves, delta).unwrap().is_empty());
        assert_eq!(decode(&g, &VertexSet::empty(10), delta).unwrap().to_vec(), (1..10).collect::<Vec<_>>());
    }

    #[test]
    fn clique_singleton() {
        let g = BitGraph::from_small(&crate::graph::clique(6).unwrap());
        let v = VertexSet::from_vertices(6, [2]);
        let t = encode(&g, &v, d("1/3")).unwrap();
        assert_eq!(t, v);
        assert_eq!(decode(&g, &t, d("1/3")).unwrap(), v);
        let r = almost_independent_set(&g, 1, d("1/3"), &IndependentSource::Exhaustive).unwrap();
        assert_eq!(r.set.len(), 1);
        assert!(r.certificate.holds());
        assert!(matches!(
            almost_independent_set(&g, 2, d("1/3"), &IndependentSource::Exhaustive),
            Err(Error::NoIndependentSet(2))
        ));
    }

    #[test]
    fn rejects_dependent_sets() {
        let g = star(5);
        let bad = VertexSet::from_vertices(5, [0, 3]);
        assert!(matches!(encode(&g, &bad, d("1/2")), Err(Error::NotIndependent(1, 4))));
        assert!(decode(&g, &bad, d("1/2")).is_err());
    }

    #[test]
    fn matching_complement() {
        let r = 6;
        let mut edges = Vec::new();
        for u in 0..2 * r {
            for v in u + 1..2 * r {
                if !(u % 2 == 0 && v == u + 1) {
                    edges.push((u, v));
                }
            }
        }
        let g = BitGraph::from_edges(2 * r, &edges).unwrap();
        for delta in ["1/10", "1/4", "1/2", "1"] {
            let res = almost_independent_set(&g, 2, d(delta), &IndependentSource::Exhaustive).unwrap();
            assert_eq!(res.sets_encoded, r as u64);
            assert!(res.certificate.holds());
            let rep = exhaustive_containment(&g, d(delta)).unwrap();
            assert_eq!(rep.failures, 0);
            assert_eq!(rep.sets_checked, 1 + 2 * r as u64 + r as u64);
        }
    }

    #[test]
    fn fingerprint_containment_on_random_graphs() {
        for seed in 0..10 {
            let w = StepGraphon::constant(0.3).unwrap();
            let g = sample_n_graph(&w, 12, seed).unwrap().graph;
            for delta in ["1/7", "1/5", "1/2"] {
                let rep = exhaustive_containment(&g, d(delta)).unwrap();
                assert_eq!(rep.failures, 0);
                assert!(rep.certificates_hold);
                assert!(rep.max_fingerprint <= d(delta).fingerprint_limit());
            }
        }
    }

    #[test]
    fn planted_and_greedy_sources() {
        let w = StepGraphon::negated(0.5, 0.8, 0.3).unwrap();
        let s = sample_n_graph(&w, 200, 2).unwrap();
        let planted = s.vertices_in(&[0]);
        let res = almost_independent_set(&s.graph, 5, d("1/5"), &IndependentSource::Planted(vec![planted.clone()])).unwrap();
        assert!(planted.is_subset(&res.set));
        assert!(res.certificate.holds());
        let greedy = almost_independent_set(&s.graph, 5, d("1/5"), &IndependentSource::Greedy).unwrap();
        assert!(greedy.certificate.holds());
        assert!(s.graph.edge_within(&greedy_independent_set(&s.graph)).is_none());
    }

    #[test]
    fn pipeline_extremes() {
        let zero = StepGraphon::constant(0.0).unwrap();
        let rep = independence_pipeline(&zero, 50, 3, d("1/5"), 1).unwrap();
        assert_eq!(rep.container_ratio, 1.0);
        assert_eq!(rep.alpha, 1.0);
        let p = StepGraphon::constant(0.5).unwrap();
        let rep = independence_pipeline(&p, 200, 3, d("1/5"), 1).unwrap();
        assert_eq!(rep.source, "greedy");
        assert_eq!(rep.alpha, 0.0);
        assert!(rep.contains_independent_set);
        assert!(!rep.notes.is_empty());
    }
}

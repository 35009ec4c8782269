//! Monte Carlo sampling of `G(k, W)` and `G(n, W)`.
//!
//! Each point and each pair has its own counter: point `u` draws from
//! stream [`POINT_STREAM`] at counter `(u, 0)` and pair `u < v` draws from
//! stream [`PAIR_STREAM`] at counter `(u, v)`. Trial `t` of an empirical run
//! uses the child stream `t` of the seed. Outputs therefore do not depend on
//! iteration order or thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bitgraph::{BitGraph, VertexSet};
use crate::distribution::{pairs, EdgeCountDistribution, MAX_FLOAT_K};
use crate::error::{ensure_size, Error, Result};
use crate::graph::{SmallGraph, MAX_VERTICES};
use crate::graphon::StepGraphon;
use crate::rng::CounterRng;

pub const POINT_STREAM: u64 = 1;
pub const PAIR_STREAM: u64 = 2;

const TRIAL_CHUNK: u64 = 4096;

/// Precomputed lookup for drawing points.
struct Draw<'a> {
    w: &'a StepGraphon<f64>,
    points: CounterRng,
    pairs: CounterRng,
}

impl<'a> Draw<'a> {
    fn new(w: &'a StepGraphon<f64>, rng: CounterRng) -> Self {
        Draw { w, points: rng.stream(POINT_STREAM), pairs: rng.stream(PAIR_STREAM) }
    }

    fn part(&self, u: usize) -> usize {
        self.w.locate(self.points.unit(u as u64, 0))
    }

    fn edge(&self, parts: &[usize], u: usize, v: usize) -> bool {
        let (u, v) = (u.min(v), u.max(v));
        self.pairs.unit(u as u64, v as u64) < *self.w.value(parts[u], parts[v])
    }
}

/// One draw of `G(k, W)` together with the part of each vertex.
pub fn sample_k_with_parts(w: &StepGraphon<f64>, k: usize, rng: CounterRng) -> Result<(SmallGraph, Vec<usize>)> {
    ensure_size("k", k, MAX_VERTICES)?;
    let draw = Draw::new(w, rng);
    let parts: Vec<usize> = (0..k).map(|u| draw.part(u)).collect();
    let mut edges = Vec::new();
    for u in 0..k {
        for v in u + 1..k {
            if draw.edge(&parts, u, v) {
                edges.push((u, v));
            }
        }
    }
    Ok((SmallGraph::from_edges(k, &edges)?, parts))
}

/// One draw of `G(k, W)`; `k` is limited to the small-graph size.
pub fn sample_k(w: &StepGraphon<f64>, k: usize, seed: u64) -> Result<SmallGraph> {
    sample_k_with_parts(w, k, CounterRng::new(seed)).map(|(g, _)| g)
}

fn edge_count_of_trial(w: &StepGraphon<f64>, k: usize, rng: CounterRng) -> usize {
    let draw = Draw::new(w, rng);
    let parts: Vec<usize> = (0..k).map(|u| draw.part(u)).collect();
    let mut count = 0;
    for u in 0..k {
        for v in u + 1..k {
            count += usize::from(draw.edge(&parts, u, v));
        }
    }
    count
}

/// Edge-count frequencies over `trials` independent samples.
#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalXk {
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    pub counts: Vec<u64>,
}

impl EmpiricalXk {
    pub fn distribution(&self) -> EdgeCountDistribution<f64> {
        let t = self.trials as f64;
        EdgeCountDistribution { k: self.k, probs: self.counts.iter().map(|&c| c as f64 / t).collect() }
    }

    pub fn compare(&self, exact: &EdgeCountDistribution<f64>) -> Comparison {
        let emp = self.distribution();
        Comparison { tv_distance: emp.tv_distance(exact), max_abs_deviation: emp.max_abs_deviation(exact) }
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Comparison {
    pub tv_distance: f64,
    pub max_abs_deviation: f64,
}

pub fn empirical_xk(w: &StepGraphon<f64>, k: usize, trials: u64, seed: u64) -> Result<EmpiricalXk> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    ensure_size("k", k, MAX_FLOAT_K)?;
    let root = CounterRng::new(seed);
    let len = pairs(k) + 1;
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u64; len];
            for t in c * TRIAL_CHUNK..((c + 1) * TRIAL_CHUNK).min(trials) {
                local[edge_count_of_trial(w, k, root.stream(t))] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(EmpiricalXk { k, trials, seed, counts })
}

/// A draw of `G(n, W)` with the part each vertex landed in.
#[derive(Clone, Debug, Serialize)]
pub struct NSample {
    pub graph: BitGraph,
    pub parts: Vec<usize>,
}

impl NSample {
    /// Vertices that landed in any of `parts`.
    pub fn vertices_in(&self, parts: &[usize]) -> VertexSet {
        VertexSet::from_vertices(self.parts.len(), (0..self.parts.len()).filter(|&v| parts.contains(&self.parts[v])))
    }
}

pub fn sample_n_graph(w: &StepGraphon<f64>, n: usize, seed: u64) -> Result<NSample> {
    ensure_size("n", n, crate::bitgraph::MAX_BIT_VERTICES)?;
    let draw = Draw::new(w, CounterRng::new(seed));
    let parts: Vec<usize> = (0..n).into_par_iter().map(|u| draw.part(u)).collect();
    let words = n.div_ceil(64);
    let rows: Vec<Vec<u64>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = vec![0u64; words];
            for v in (0..n).filter(|&v| v != u) {
                if draw.edge(&parts, u, v) {
                    row[v / 64] |= 1 << (v % 64);
                }
            }
            row
        })
        .collect();
    Ok(NSample { graph: BitGraph::from_rows(n, rows)?, parts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::exact_xk;

    #[test]
    fn degenerate_graphons() {
        let one = StepGraphon::constant(1.0).unwrap();
        let zero = StepGraphon::constant(0.0).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_k(&one, 6, seed).unwrap().edge_count(), 15);
            assert_eq!(sample_k(&zero, 6, seed).unwrap().edge_count(), 0);
        }
        let s = sample_n_graph(&zero, 100, 3).unwrap();
        assert_eq!(s.graph.edge_count(), 0);
        assert_eq!(s.vertices_in(&[0]).len(), 100);
        assert!(sample_k(&one, 13, 0).is_err());
        assert!(sample_n_graph(&one, 10_001, 0).is_err());
    }

    #[test]
    fn deterministic_and_matches_small_sampler() {
        let w = StepGraphon::new(vec![0.3, 0.7], vec![vec![0.2, 0.6], vec![0.6, 0.9]]).unwrap();
        let a = sample_n_graph(&w, 12, 99).unwrap();
        let b = sample_n_graph(&w, 12, 99).unwrap();
        assert_eq!(a.graph, b.graph);
        let (g, parts) = sample_k_with_parts(&w, 12, CounterRng::new(99)).unwrap();
        assert_eq!(BitGraph::from_small(&g), a.graph);
        assert_eq!(parts, a.parts);
        assert_ne!(sample_n_graph(&w, 12, 100).unwrap().graph, a.graph);
    }

    #[test]
    fn parallel_equals_serial() {
        let w = StepGraphon::constant(0.5).unwrap();
        let e = empirical_xk(&w, 4, 10_000, 5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| empirical_xk(&w, 4, 10_000, 5).unwrap());
        assert_eq!(e.counts, serial.counts);
        let root = CounterRng::new(5);
        let mut manual = vec![0u64; 7];
        for t in 0..10_000 {
            manual[edge_count_of_trial(&w, 4, root.stream(t))] += 1;
        }
        assert_eq!(manual, e.counts);
    }

    #[test]
    fn single_trial_is_point_mass() {
        let w = StepGraphon::constant(0.5).unwrap();
        let e = empirical_xk(&w, 5, 1, 11).unwrap();
        assert_eq!(e.counts.iter().sum::<u64>(), 1);
        assert_eq!(e.distribution().probs.iter().filter(|&&p| p == 1.0).count(), 1);
        assert!(empirical_xk(&w, 5, 0, 11).is_err());
    }

    #[test]
    fn bipartite_edge_frequency() {
        let p = 0.7;
        let w = StepGraphon::bipartite(p).unwrap();
        let n = 200_000;
        let e = empirical_xk(&w, 2, n, 1).unwrap();
        let freq = e.counts[1] as f64 / n as f64;
        let sigma = (p / 2.0 * (1.0 - p / 2.0) / n as f64).sqrt();
        assert!((freq - p / 2.0).abs() < 3.0 * sigma, "{freq}");
    }

    #[test]
    fn complement_duality_empirically() {
        let w = StepGraphon::negated(0.4, 0.7, 0.5).unwrap();
        let exact = exact_xk(&w, 5).unwrap();
        let comp = empirical_xk(&w.complement(), 5, 200_000, 2).unwrap();
        assert!(comp.compare(&exact.mirrored()).tv_distance < 0.01);
    }

    #[test]
    fn planted_part_is_independent() {
        let w = StepGraphon::negated(0.5, 0.8, 0.3).unwrap();
        let s = sample_n_graph(&w, 1000, 4).unwrap();
        let a = s.vertices_in(&[0]);
        assert_eq!(s.graph.edges_within(&a), 0);
        let sigma = (1000.0f64 * 0.25).sqrt();
        assert!((a.len() as f64 - 500.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn zero_edge_frequency_tracks_alpha() {
        let w = StepGraphon::negated(0.4, 0.7, 0.5).unwrap();
        let k = 3;
        let alpha = exact_xk(&w, k).unwrap().probs[0];
        let mut total = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let g = sample_n_graph(&w, 60, seed).unwrap().graph;
            let (mut hits, mut all) = (0usize, 0usize);
            for a in 0..60 {
                for b in a + 1..60 {
                    for c in b + 1..60 {
                        all += 1;
                        hits += usize::from(!g.has_edge(a, b) && !g.has_edge(a, c) && !g.has_edge(b, c));
                    }
                }
            }
            total += hits as f64 / all as f64;
        }
        assert!((total / seeds as f64 - alpha).abs() < 0.02);
    }
}

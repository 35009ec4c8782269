//! Homomorphism densities in step graphons and sample-graph probabilities.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_size, Error, Result};
use crate::graph::SmallGraph;
use crate::graphon::StepGraphon;
use crate::scalar::Scalar;

/// Pattern size always allowed in exact-rational mode.
pub const MAX_EXACT_VERTICES: usize = 8;
/// Larger exact patterns are allowed while `parts^vertices` stays below this.
pub const EXACT_TERM_BUDGET: f64 = 5e6;
/// Largest sample size for the inclusion-exclusion formula.
pub const MAX_SAMPLE_VERTICES: usize = 5;

/// Vertex order in which every non-root vertex of a component follows one of
/// its neighbours, plus the earlier neighbours of each vertex in that order.
/// Isolated vertices are left out (they contribute a factor of 1).
fn elimination_order(f: &SmallGraph) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut order = Vec::with_capacity(f.n());
    let mut pos = vec![usize::MAX; f.n()];
    for comp in f.components() {
        if comp.len() == 1 {
            continue;
        }
        let dist = f.distances_from(comp[0]);
        let mut verts = comp.clone();
        verts.sort_by_key(|&v| (dist[v], v));
        for v in verts {
            pos[v] = order.len();
            order.push(v);
        }
    }
    let back = order
        .iter()
        .map(|&v| (0..f.n()).filter(|&u| f.has_edge(u, v) && pos[u] < pos[v]).map(|u| pos[u]).collect())
        .collect();
    (order, back)
}

struct HomWalk<'a, S> {
    w: &'a StepGraphon<S>,
    back: Vec<Vec<usize>>,
    assign: Vec<usize>,
}

impl<S: Scalar> HomWalk<'_, S> {
    fn sum(&mut self, level: usize, acc: S) -> S {
        if level == self.back.len() {
            return acc;
        }
        let mut total = S::zero();
        for i in 0..self.w.num_parts() {
            let mut factor = self.w.parts()[i].clone();
            for &u in &self.back[level] {
                let v = self.w.value(self.assign[u], i);
                if v.is_zero() {
                    factor = S::zero();
                    break;
                }
                factor = factor * v.clone();
            }
            if factor.is_zero() {
                continue;
            }
            self.assign.push(i);
            total = total + self.sum(level + 1, acc.clone() * factor);
            self.assign.pop();
        }
        total
    }

    fn collect(&mut self, level: usize, acc: S, out: &mut Vec<(Vec<usize>, S)>) {
        if level == self.back.len() {
            out.push((self.assign.clone(), acc));
            return;
        }
        for i in 0..self.w.num_parts() {
            let mut factor = self.w.parts()[i].clone();
            for &u in &self.back[level] {
                factor = factor * self.w.value(self.assign[u], i).clone();
            }
            if factor.is_zero() {
                continue;
            }
            self.assign.push(i);
            self.collect(level + 1, acc.clone() * factor, out);
            self.assign.pop();
        }
    }
}

fn check_size<S: Scalar>(f: &SmallGraph, w: &StepGraphon<S>) -> Result<()> {
    if S::EXACT && (w.num_parts() as f64).powi(f.n() as i32) > EXACT_TERM_BUDGET {
        ensure_size("pattern vertices (exact mode)", f.n(), MAX_EXACT_VERTICES)?;
    }
    Ok(())
}

/// Homomorphism density `t(F, W)`: the sum over all maps from `V(F)` to parts
/// of the product of part measures and edge values.
pub fn hom_density<S: Scalar>(f: &SmallGraph, w: &StepGraphon<S>) -> Result<S> {
    check_size(f, w)?;
    let (_, back) = elimination_order(f);
    let mut walk = HomWalk { w, back, assign: Vec::with_capacity(f.n()) };
    Ok(walk.sum(0, S::one()))
}

/// Nonzero terms of the density sum, keyed by the part assigned to each vertex.
/// Isolated vertices of `f` are not assigned (their factor is 1).
pub fn hom_density_terms<S: Scalar>(f: &SmallGraph, w: &StepGraphon<S>) -> Result<Vec<(Vec<usize>, S)>> {
    check_size(f, w)?;
    let (order, back) = elimination_order(f);
    let mut walk = HomWalk { w, back, assign: Vec::with_capacity(f.n()) };
    let mut raw = Vec::new();
    walk.collect(0, S::one(), &mut raw);
    // re-key by original vertex label
    Ok(raw
        .into_iter()
        .map(|(assign, v)| {
            let mut by_vertex = vec![usize::MAX; f.n()];
            for (level, &vertex) in order.iter().enumerate() {
                by_vertex[vertex] = assign[level];
            }
            (by_vertex, v)
        })
        .collect())
}

/// Densities of many patterns, in input order.
pub fn hom_densities<S: Scalar>(graphs: &[SmallGraph], w: &StepGraphon<S>) -> Result<Vec<S>> {
    graphs.par_iter().map(|f| hom_density(f, w)).collect()
}

/// `P(G(k, W) = g)` by inclusion-exclusion over the supergraphs of `g` on the
/// same vertex set; supergraphs are indexed by bitmasks over the non-edges of `g`.
pub fn sample_graph_probability<S: Scalar>(g: &SmallGraph, w: &StepGraphon<S>) -> Result<S> {
    ensure_size("sample vertices", g.n(), MAX_SAMPLE_VERTICES)?;
    let missing = g.non_edges();
    let terms: Vec<(bool, SmallGraph)> = (0u32..1 << missing.len())
        .map(|mask| {
            let mut f = *g;
            for (bit, &(u, v)) in missing.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    f.add_edge(u, v);
                }
            }
            (mask.count_ones() % 2 == 1, f)
        })
        .collect();
    let dens = hom_densities(&terms.iter().map(|t| t.1).collect::<Vec<_>>(), w)?;
    let mut total = S::zero();
    for ((negative, _), t) in terms.iter().zip(dens) {
        total = if *negative { total - t } else { total + t };
    }
    Ok(total)
}

/// Outcome of a density identity check.
#[derive(Clone, Debug, Serialize)]
pub struct DensityCheck {
    pub lhs: String,
    pub rhs: String,
    pub residual: f64,
    pub pass: bool,
}

impl DensityCheck {
    pub(crate) fn new<S: Scalar>(lhs: &S, rhs: &S, tol: f64) -> Self {
        DensityCheck {
            lhs: lhs.render(),
            rhs: rhs.render(),
            residual: (lhs.clone() - rhs.clone()).abs().to_f64_lossy(),
            pass: lhs.close_to(rhs, tol),
        }
    }
}

/// Checks `t(H1 ⊔ H2, W) = t(H1, W) t(H2, W)`.
pub fn product_density_check<S: Scalar>(h1: &SmallGraph, h2: &SmallGraph, w: &StepGraphon<S>) -> Result<DensityCheck> {
    let union = h1.disjoint_union(h2)?;
    let lhs = hom_density(&union, w)?;
    let rhs = hom_density(h1, w)? * hom_density(h2, w)?;
    Ok(DensityCheck::new(&lhs, &rhs, 1e-12))
}

/// Checks `t(F', W) = d t(F, W)` where `F'` is `F` plus a pendant edge at
/// `attach` and `W` is `d`-regular. Non-regular `W` is reported as an error.
pub fn pendant_density_check<S: Scalar>(f: &SmallGraph, attach: usize, w: &StepGraphon<S>) -> Result<DensityCheck> {
    let profile = w.degree_profile();
    let d = profile
        .regular_degree(1e-12)
        .ok_or_else(|| Error::NotRegular(profile.spread().to_f64_lossy()))?;
    let extended = f.with_pendant(attach)?;
    let lhs = hom_density(&extended, w)?;
    let rhs = d * hom_density(f, w)?;
    Ok(DensityCheck::new(&lhs, &rhs, 1e-12))
}

//! Non-forcing constructions and density-witness searches.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::hom_density;
use crate::error::{ensure_size, Error, Result};
use crate::graph::{clique, connected_classes, cycle, path, SmallGraph, MAX_CATALOG_VERTICES, MAX_VERTICES};
use crate::graphon::{ExactGraphon, StepGraphon, COMPARISON_TOL};
use crate::scalar::{Rational, Scalar};
use crate::spectral::weighted_spectrum;

/// Equal-part 3-step graphons `A = x₁x₁ᵀ + ε x₂x₂ᵀ` and `A′ = x₁x₁ᵀ + ε x₃x₃ᵀ`
/// with `x₁ ∝ (1,1,1)`, `x₂ ∝ (1,-1,0)`, `x₃ ∝ (2,-1,-1)` and `ε = 1/4`.
pub fn construct_cycle_counterexample() -> (ExactGraphon, ExactGraphon) {
    cycle_pair(Rational::ratio(1, 4)).expect("ε = 1/4 gives valid graphons")
}

/// The pair for any `ε ∈ [0, 1]`.
pub fn cycle_pair(eps: Rational) -> Result<(ExactGraphon, ExactGraphon)> {
    if eps < Rational::ratio(0, 1) || eps > Rational::ratio(1, 1) {
        return Err(Error::InvalidParameter(format!("epsilon = {} outside [0, 1]", eps.render())));
    }
    // unit vectors written as (integer vector, squared norm)
    let x1: ([i64; 3], i64) = ([1, 1, 1], 3);
    let x2: ([i64; 3], i64) = ([1, -1, 0], 2);
    let x3: ([i64; 3], i64) = ([2, -1, -1], 6);
    let outer = |(v, n): ([i64; 3], i64), i: usize, j: usize| Rational::ratio(v[i] * v[j], n);
    let build = |x: ([i64; 3], i64)| {
        let values = (0..3)
            .map(|i| (0..3).map(|j| outer(x1, i, j) + eps.clone() * outer(x, i, j)).collect())
            .collect();
        ExactGraphon::new(vec![Rational::ratio(1, 3); 3], values)
    };
    Ok((build(x2)?, build(x3)?))
}

/// `(P_{d+2} ⊔ P_{d+2}, P_{d+3} ⊔ P_{d+1})`.
pub fn diameter_graphs(d: usize) -> Result<(SmallGraph, SmallGraph)> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    ensure_size("vertices (2d + 4)", 2 * d + 4, MAX_VERTICES)?;
    let g = path(d + 2)?.disjoint_union(&path(d + 2)?)?;
    let h = path(d + 3)?.disjoint_union(&path(d + 1)?)?;
    Ok((g, h))
}

/// The graphons of [`diameter_graphs`].
pub fn construct_diameter_counterexample(d: usize) -> Result<(ExactGraphon, ExactGraphon)> {
    let (g, h) = diameter_graphs(d)?;
    Ok((ExactGraphon::from_graph(&g)?, ExactGraphon::from_graph(&h)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub graph: SmallGraph,
    pub first: f64,
    pub second: f64,
    /// Exact rendering of both densities.
    pub first_exact: String,
    pub second_exact: String,
    pub gap: f64,
}

fn differs<S: Scalar>(x: &S, y: &S) -> bool {
    if S::EXACT {
        x != y
    } else {
        !x.close_to(y, COMPARISON_TOL)
    }
}

fn witness_of<S: Scalar>(graph: SmallGraph, x: S, y: S) -> Witness {
    Witness {
        graph,
        first: x.to_f64_lossy(),
        second: y.to_f64_lossy(),
        first_exact: x.render(),
        second_exact: y.render(),
        gap: (x - y).to_f64_lossy(),
    }
}

/// First connected graph (by vertices, then edges, then canonical code) on at
/// most `max_vertices` vertices, among those accepted by `filter`, whose
/// density differs in `u` and `w`. `None` does not prove weak isomorphism.
pub fn weak_isomorphism_witness<S: Scalar>(
    u: &StepGraphon<S>,
    w: &StepGraphon<S>,
    max_vertices: usize,
    filter: Option<&(dyn Fn(&SmallGraph) -> bool + Sync)>,
) -> Result<Option<Witness>> {
    ensure_size("witness vertices", max_vertices, MAX_CATALOG_VERTICES)?;
    let classes = connected_classes(max_vertices)?;
    let graphs: Vec<SmallGraph> = classes
        .iter()
        .map(|c| *c.graph())
        .filter(|g| filter.is_none_or(|f| f(g)))
        .collect();
    let pairs: Vec<(S, S)> = graphs
        .par_iter()
        .map(|g| Ok((hom_density(g, u)?, hom_density(g, w)?)))
        .collect::<Result<_>>()?;
    Ok(graphs
        .into_iter()
        .zip(pairs)
        .find(|(_, (x, y))| differs(x, y))
        .map(|(g, (x, y))| witness_of(g, x, y)))
}

/// Smallest `k ≤ max_k` with `t(K_k, u) ≠ t(K_k, w)`.
pub fn clique_witness<S: Scalar>(u: &StepGraphon<S>, w: &StepGraphon<S>, max_k: usize) -> Result<Option<Witness>> {
    for k in 2..=max_k {
        let kk = clique(k)?;
        let (x, y) = (hom_density(&kk, u)?, hom_density(&kk, w)?);
        if differs(&x, &y) {
            return Ok(Some(witness_of(kk, x, y)));
        }
    }
    Ok(None)
}

/// Cycle densities `t(C_k, ·)` of both graphons for `k` in `ks`.
pub fn cycle_comparison<S: Scalar>(
    u: &StepGraphon<S>,
    w: &StepGraphon<S>,
    ks: impl IntoIterator<Item = usize>,
) -> Result<Vec<(usize, S, S)>> {
    ks.into_iter()
        .map(|k| {
            let c = cycle(k)?;
            Ok((k, hom_density(&c, u)?, hom_density(&c, w)?))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BipQrReport {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub edge_density: f64,
    /// `2abp`
    pub edge_target: f64,
    pub c4_density: f64,
    /// `2a²b²p⁴`
    pub c4_target: f64,
    pub premise_holds: bool,
    /// Every cross-block entry equals `p` within `1e-9`.
    pub cross_constant: bool,
    /// Non-zero eigenvalues lie in `{±p√(ab)}`.
    pub spectrum_matches: bool,
    /// C4 density of a cross block split into `p ± δ` at the same edge density.
    pub perturbed_c4: Option<f64>,
    pub perturbation_strict: Option<bool>,
    pub passed: bool,
}

const PREMISE_TOL: f64 = 1e-10;
const ENTRY_TOL: f64 = 1e-9;
const PERTURBATION: f64 = 0.1;

/// Checks, for a graphon vanishing on `A²` and `B²` (`A` = the parts listed in
/// `side_a`), that the edge and C4 densities `2abp`, `2a²b²p⁴` force the
/// constant cross value `p`, and that splitting the cross block into
/// `p ± δ` strictly raises the C4 density.
pub fn bipqr_check<S: Scalar>(w: &StepGraphon<S>, side_a: &[usize], p: f64) -> Result<BipQrReport> {
    let w = w.to_f64();
    let m = w.num_parts();
    if side_a.iter().any(|&i| i >= m) {
        return Err(Error::InvalidParameter(format!("side A names a part outside 0..{m}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let in_a = |i: usize| side_a.contains(&i);
    for i in 0..m {
        for j in 0..m {
            if in_a(i) == in_a(j) && *w.value(i, j) > ENTRY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "graphon is {} on a diagonal block at parts ({i}, {j})",
                    w.value(i, j)
                )));
            }
        }
    }
    let a: f64 = side_a.iter().map(|&i| w.parts()[i]).sum();
    let b = 1.0 - a;
    let edge_density = hom_density(&clique(2)?, &w)?;
    let c4_density = hom_density(&cycle(4)?, &w)?;
    let edge_target = 2.0 * a * b * p;
    let c4_target = 2.0 * a * a * b * b * p.powi(4);
    let premise_holds = (edge_density - edge_target).abs() < PREMISE_TOL && (c4_density - c4_target).abs() < PREMISE_TOL;
    let cross_constant = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| in_a(i) != in_a(j))
        .all(|(i, j)| (w.value(i, j) - p).abs() < ENTRY_TOL);
    let target = p * (a * b).sqrt();
    let spectrum_matches = weighted_spectrum(&w)?
        .eigenvalues
        .iter()
        .filter(|l| l.abs() > ENTRY_TOL)
        .all(|l| (l.abs() - target).abs() < ENTRY_TOL);
    let delta = PERTURBATION.min(p).min(1.0 - p);
    let (perturbed_c4, perturbation_strict) = if delta > 0.0 && a > 0.0 && b > 0.0 {
        let half = a / 2.0;
        let split = StepGraphon::new(
            vec![half, half, b],
            vec![vec![0.0, 0.0, p + delta], vec![0.0, 0.0, p - delta], vec![p + delta, p - delta, 0.0]],
        )?;
        let c4 = hom_density(&cycle(4)?, &split)?;
        (Some(c4), Some(c4 > c4_target))
    } else {
        (None, None)
    };
    let passed = (!premise_holds || (cross_constant && spectrum_matches)) && perturbation_strict.unwrap_or(true);
    Ok(BipQrReport {
        a,
        b,
        p,
        edge_density,
        edge_target,
        c4_density,
        c4_target,
        premise_holds,
        cross_constant,
        spectrum_matches,
        perturbed_c4,
        perturbation_strict,
        passed,
    })
}

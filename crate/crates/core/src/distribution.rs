//! Exact law of the edge count `X_k` of the `k`-sample, the zero-edge
//! probabilities `α_k`, and moments of `X_k`.
//!
//! The sample is decomposed by how many of the `k` points fall in each part
//! (a composition `n_1 + ... + n_m = k`, weighted multinomially). Given the
//! composition the edge count is a sum of independent binomials, one per
//! block: `Binomial(C(n_i, 2), W(i,i))` and `Binomial(n_i n_j, W(i,j))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::density::hom_density;
use crate::error::{ensure_size, Error, Result};
use crate::graph::enumerate_gkm;
use crate::graphon::StepGraphon;
use crate::scalar::{ln_factorial, Scalar};

/// Largest `k` for the float engine.
pub const MAX_FLOAT_K: usize = 60;
/// Largest `k` for the exact-rational engine.
pub const MAX_EXACT_K: usize = 10;
/// Cap on the number of part-count vectors a single evaluation may visit.
pub const MAX_COMPOSITIONS: u128 = 500_000;

const CHUNK: usize = 64;

/// Probability vector of `X_k`: `probs[m] = P(X_k = m)` for `m = 0..=C(k,2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeCountDistribution<S = f64> {
    pub k: usize,
    pub probs: Vec<S>,
}

impl<S: Scalar> EdgeCountDistribution<S> {
    pub fn total(&self) -> S {
        self.probs.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    /// The law of `C(k,2) - X_k`.
    pub fn mirrored(&self) -> Self {
        let mut probs = self.probs.clone();
        probs.reverse();
        EdgeCountDistribution { k: self.k, probs }
    }

    /// `E[C(X_k, m)]`.
    pub fn binomial_moment(&self, m: usize) -> S {
        let mut coeff = S::zero();
        let mut acc = S::zero();
        for (x, p) in self.probs.iter().enumerate() {
            // C(x, m) via the recurrence C(x, m) = C(x-1, m) * x / (x - m)
            coeff = if x < m {
                S::zero()
            } else if x == m {
                S::one()
            } else {
                coeff * S::from_usize(x).unwrap() / S::from_usize(x - m).unwrap()
            };
            acc = acc + coeff.clone() * p.clone();
        }
        acc
    }

    pub fn to_f64(&self) -> EdgeCountDistribution<f64> {
        EdgeCountDistribution { k: self.k, probs: self.probs.iter().map(Scalar::to_f64_lossy).collect() }
    }
}

impl EdgeCountDistribution<f64> {
    /// Total-variation distance `½ Σ |p_m - q_m|`.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        0.5 * self.abs_deviations(other).sum::<f64>()
    }

    pub fn max_abs_deviation(&self, other: &Self) -> f64 {
        self.abs_deviations(other).fold(0.0, f64::max)
    }

    fn abs_deviations<'a>(&'a self, other: &'a Self) -> impl Iterator<Item = f64> + 'a {
        let len = self.probs.len().max(other.probs.len());
        (0..len).map(move |i| {
            (self.probs.get(i).copied().unwrap_or(0.0) - other.probs.get(i).copied().unwrap_or(0.0)).abs()
        })
    }
}

pub(crate) fn pairs(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Number of compositions of `k` into `m` non-negative parts, `C(k+m-1, m-1)`.
pub fn composition_count(k: usize, m: usize) -> u128 {
    if m == 0 {
        return u128::from(k == 0);
    }
    let mut acc: u128 = 1;
    for i in 1..m as u128 {
        acc = acc.saturating_mul(k as u128 + i) / i;
    }
    acc
}

/// All compositions of `k` into `m` parts in colex order (last coordinate
/// varies slowest).
pub fn compositions(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: usize, slot: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot == 0 {
            cur[0] = remaining;
            out.push(cur.clone());
            return;
        }
        for v in 0..=remaining {
            cur[slot] = v;
            rec(remaining - v, slot - 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut cur = vec![0; m];
    rec(k, m - 1, &mut cur, &mut out);
    out
}

fn check_budget(k: usize, m: usize) -> Result<()> {
    let count = composition_count(k, m);
    if count > MAX_COMPOSITIONS {
        return Err(Error::SizeExceeded {
            what: "part-count vectors",
            got: usize::try_from(count).unwrap_or(usize::MAX),
            limit: MAX_COMPOSITIONS as usize,
        });
    }
    Ok(())
}

/// Blocks `(pair count, value)` for a composition.
fn blocks<'a, S: Scalar>(w: &'a StepGraphon<S>, counts: &[usize]) -> Vec<(usize, &'a S)> {
    let m = counts.len();
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for i in 0..m {
        out.push((pairs(counts[i]), w.value(i, i)));
        for j in i + 1..m {
            out.push((counts[i] * counts[j], w.value(i, j)));
        }
    }
    out
}

fn composition_weight<S: Scalar>(w: &StepGraphon<S>, counts: &[usize]) -> S {
    counts
        .iter()
        .zip(w.parts())
        .fold(S::multinomial(counts), |acc, (&c, a)| acc * a.powu(c))
}

fn convolve<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// Law of the edge count given the part counts, as (offset, pmf).
fn conditional_law<S: Scalar>(w: &StepGraphon<S>, counts: &[usize]) -> (usize, Vec<S>) {
    let mut shift = 0;
    let mut groups: Vec<(&S, usize)> = Vec::new();
    for (n, v) in blocks(w, counts) {
        if n == 0 || v.is_zero() {
            continue;
        }
        if v.is_one() {
            shift += n;
            continue;
        }
        match groups.iter_mut().find(|(g, _)| *g == v) {
            Some(g) => g.1 += n,
            None => groups.push((v, n)),
        }
    }
    let mut law = vec![S::one()];
    for (v, n) in groups {
        law = convolve(&law, &S::binomial_pmf(n, v));
    }
    (shift, law)
}

/// Exact distribution of `X_k(W)`.
///
/// Float mode accepts `k <= 60`, exact mode `k <= 10`; both are further capped
/// by [`MAX_COMPOSITIONS`]. The result does not depend on thread count: chunks
/// are reduced in a fixed order.
pub fn exact_xk<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<EdgeCountDistribution<S>> {
    ensure_size("k", k, if S::EXACT { MAX_EXACT_K } else { MAX_FLOAT_K })?;
    check_budget(k, w.num_parts())?;
    let len = pairs(k) + 1;
    let comps = compositions(k, w.num_parts());
    let partials: Vec<Vec<S>> = comps
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![S::zero(); len];
            for counts in chunk {
                let weight = composition_weight(w, counts);
                if weight.is_zero() {
                    continue;
                }
                let (shift, law) = conditional_law(w, counts);
                for (j, p) in law.into_iter().enumerate() {
                    acc[shift + j] = acc[shift + j].clone() + weight.clone() * p;
                }
            }
            acc
        })
        .collect();
    let mut probs = vec![S::zero(); len];
    for part in partials {
        for (slot, v) in probs.iter_mut().zip(part) {
            *slot = slot.clone() + v;
        }
    }
    Ok(EdgeCountDistribution { k, probs })
}

/// `α_k(W) = P(X_k = 0)` by direct summation (exact in rational mode).
pub fn zero_edge_probability<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<S> {
    check_budget(k, w.num_parts())?;
    let mut total = S::zero();
    for counts in compositions(k, w.num_parts()) {
        let mut term = composition_weight(w, &counts);
        for (n, v) in blocks(w, &counts) {
            if term.is_zero() {
                break;
            }
            if n > 0 {
                term = term * (S::one() - v.clone()).powu(n);
            }
        }
        total = total + term;
    }
    Ok(total)
}

/// Natural log of `α_k(W)` by log-sum-exp over part-count vectors; usable for
/// `k` in the hundreds. Returns `-inf` when `α_k = 0`.
pub fn log_alpha_k<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<f64> {
    let w = w.to_f64();
    check_budget(k, w.num_parts())?;
    let ln_a: Vec<f64> = w.parts().iter().map(|a| a.ln()).collect();
    let ln_q: Vec<Vec<f64>> = w.values().iter().map(|r| r.iter().map(|v| (-v).ln_1p()).collect()).collect();
    let ln_k = ln_factorial(k);
    let logs: Vec<f64> = compositions(k, w.num_parts())
        .par_iter()
        .map(|counts| {
            let m = counts.len();
            let mut t = ln_k;
            for i in 0..m {
                let c = counts[i];
                t -= ln_factorial(c);
                if c > 0 {
                    t += c as f64 * ln_a[i];
                }
                let np = pairs(c);
                if np > 0 {
                    t += np as f64 * ln_q[i][i];
                }
                for j in i + 1..m {
                    let n = c * counts[j];
                    if n > 0 {
                        t += n as f64 * ln_q[i][j];
                    }
                }
            }
            t
        })
        .collect();
    Ok(log_sum_exp(&logs))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut sorted: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    max + sorted.iter().sum::<f64>().ln()
}

/// `(α_k)^{1/k}` for `k = 1..=k_max` and the final value as the estimate of
/// `lim α_k^{1/k}`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaTrace {
    pub estimate: f64,
    pub trace: Vec<(usize, f64)>,
    /// Largest measure of a union of parts on which `W` vanishes; every trace
    /// entry is at least this.
    pub independent_part_measure: f64,
}

pub fn alpha_infinity_estimate<S: Scalar>(w: &StepGraphon<S>, k_max: usize) -> Result<AlphaTrace> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("k_max must be at least 2, got {k_max}")));
    }
    check_budget(k_max, w.num_parts())?;
    let w = w.to_f64();
    let trace: Vec<(usize, f64)> = (1..=k_max)
        .into_par_iter()
        .map(|k| log_alpha_k(&w, k).map(|l| (k, (l / k as f64).exp())))
        .collect::<Result<_>>()?;
    Ok(AlphaTrace {
        estimate: trace.last().unwrap().1,
        independent_part_measure: w.independence_ratio().0,
        trace,
    })
}

fn check_moment_args(k: usize, m: usize) -> Result<()> {
    if m == 0 || m > pairs(k) {
        return Err(Error::InvalidParameter(format!("m = {m} outside 1..=C({k},2)")));
    }
    Ok(())
}

/// `E[C(X_k, m)] = Σ_{F} N_k(F) t(F, W)` over graphs with at most `k`
/// vertices, `m` edges and no isolated vertices.
pub fn binomial_moment<S: Scalar>(w: &StepGraphon<S>, k: usize, m: usize) -> Result<S> {
    check_moment_args(k, m)?;
    let family = enumerate_gkm(k, m)?;
    let terms: Vec<S> = family
        .par_iter()
        .map(|e| {
            let count = S::from_u128(e.multiplicity).expect("multiplicity fits");
            hom_density(e.class.graph(), w).map(|t| count * t)
        })
        .collect::<Result<_>>()?;
    Ok(terms.into_iter().fold(S::zero(), |a, b| a + b))
}

/// `E[(X_k)_m] = m! E[C(X_k, m)]`.
pub fn factorial_moment<S: Scalar>(w: &StepGraphon<S>, k: usize, m: usize) -> Result<S> {
    let fact = (1..=m).fold(S::one(), |a, i| a * S::from_usize(i).unwrap());
    Ok(fact * binomial_moment(w, k, m)?)
}

/// `P(X_k = C(k,2))^{1/C(k,2)}` for `k = 2..=k_max`, alongside the largest
/// normalized block mass over part subsets.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetricSupTrace {
    pub trace: Vec<(usize, f64)>,
    /// `max_S (Σ_{i,j∈S} a_i a_j W(i,j)) / (Σ_{i∈S} a_i)^2`
    pub subset_target: f64,
    pub subset: Vec<usize>,
    pub sup_norm: f64,
}

pub fn symmetric_sup_trace<S: Scalar>(w: &StepGraphon<S>, k_max: usize) -> Result<SymmetricSupTrace> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("k_max must be at least 2, got {k_max}")));
    }
    let w = w.to_f64();
    let comp = w.complement();
    // X_k(W) = C(k,2) exactly when the complement's sample has no edges
    let trace = (2..=k_max)
        .into_par_iter()
        .map(|k| log_alpha_k(&comp, k).map(|l| (k, (l / pairs(k) as f64).exp())))
        .collect::<Result<_>>()?;
    let (subset_target, subset) = densest_part_subset(&w)?;
    Ok(SymmetricSupTrace { trace, subset_target, subset, sup_norm: w.max_value() })
}

fn densest_part_subset(w: &StepGraphon<f64>) -> Result<(f64, Vec<usize>)> {
    let m = w.num_parts();
    ensure_size("parts for subset search", m, 20)?;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mask in 1u32..1 << m {
        let set: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let mass: f64 = set.iter().map(|&i| w.parts()[i]).sum();
        let block: f64 = set
            .iter()
            .flat_map(|&i| set.iter().map(move |&j| (i, j)))
            .map(|(i, j)| w.parts()[i] * w.parts()[j] * w.value(i, j))
            .sum();
        let ratio = block / (mass * mass);
        if ratio > best.0 {
            best = (ratio, set);
        }
    }
    Ok(best)
}

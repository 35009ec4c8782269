//! Measure-weighted spectra, spectral cycle densities, cut norm and an
//! upper bound on cut distance for step graphons.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_size, Error, Result};
use crate::graphon::{StepGraphon, STRUCTURAL_TOL};
use crate::scalar::Scalar;

pub const RANK_TOL: f64 = 1e-10;
const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Most cells handled by exhaustive subset enumeration.
pub const MAX_CUT_CELLS: usize = 20;
/// Default uniform grid when the common refinement is too fine.
pub const DEFAULT_CUT_GRID: usize = 16;
/// Most parts accepted by [`cut_distance_upper`].
pub const MAX_ALIGN_PARTS: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    /// Eigenvalues of `S[i][j] = √(a_i a_j) W(i,j)`, descending.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    /// `|Σ λ² - Σ a_i a_j W(i,j)²|`
    pub frobenius_residual: f64,
}

pub fn weighted_spectrum<S: Scalar>(w: &StepGraphon<S>) -> Result<SpectrumReport> {
    let w = w.to_f64();
    let m = w.num_parts();
    let a = w.parts();
    let s = DMatrix::from_fn(m, m, |i, j| (a[i] * a[j]).sqrt() * w.value(i, j));
    let frob: f64 = s.iter().map(|x| x * x).sum();
    let eig = SymmetricEigen::try_new(s, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::InvalidParameter("symmetric eigen-solve did not converge".into()))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    let rank = eigenvalues.iter().filter(|l| l.abs() > RANK_TOL).count();
    let frobenius_residual = (eigenvalues.iter().map(|l| l * l).sum::<f64>() - frob).abs();
    Ok(SpectrumReport { eigenvalues, rank, frobenius_residual })
}

/// `t(C_k, W) = Σ μ_i^k` over the weighted spectrum, `k ≥ 3`.
pub fn cycle_density_spectral<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("cycles need at least 3 vertices, got {k}")));
    }
    Ok(weighted_spectrum(w)?.eigenvalues.iter().map(|l| l.powi(k as i32)).sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct CutNormReport {
    pub value: f64,
    /// True when both kernels were averaged onto a uniform grid.
    pub approximate: bool,
    /// Cell boundaries of the grid the norm was computed on.
    pub grid: Vec<f64>,
    /// Intervals forming the maximizing row set.
    pub rows: Vec<(f64, f64)>,
    /// Intervals forming the maximizing column set.
    pub cols: Vec<(f64, f64)>,
}

/// Breakpoints of the common refinement, merging points closer than the
/// structural tolerance.
fn common_breakpoints(u: &StepGraphon<f64>, w: &StepGraphon<f64>) -> Vec<f64> {
    let mut pts: Vec<f64> = u.boundaries().into_iter().chain(w.boundaries()).collect();
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last().is_none_or(|&l| p - l > STRUCTURAL_TOL) {
            out.push(p);
        }
    }
    *out.last_mut().unwrap() = 1.0;
    out[0] = 0.0;
    if out.len() == 1 {
        out.push(1.0);
    }
    out
}

/// Average of `w` over each cell pair of the grid.
fn block_averages(w: &StepGraphon<f64>, grid: &[f64]) -> Vec<Vec<f64>> {
    let bounds = w.boundaries();
    let cells = grid.len() - 1;
    // overlap[c][i] = |cell c ∩ part i|
    let overlap: Vec<Vec<f64>> = (0..cells)
        .map(|c| {
            (0..w.num_parts())
                .map(|i| (grid[c + 1].min(bounds[i + 1]) - grid[c].max(bounds[i])).max(0.0))
                .collect()
        })
        .collect();
    (0..cells)
        .map(|c| {
            (0..cells)
                .map(|d| {
                    let mut acc = 0.0;
                    for (i, oi) in overlap[c].iter().enumerate().filter(|(_, o)| **o > 0.0) {
                        for (j, oj) in overlap[d].iter().enumerate().filter(|(_, o)| **o > 0.0) {
                            acc += oi * oj * w.value(i, j);
                        }
                    }
                    acc / ((grid[c + 1] - grid[c]) * (grid[d + 1] - grid[d]))
                })
                .collect()
        })
        .collect()
}

/// `max_{S,T} |Σ_{i∈S, j∈T} D[i][j]|` with the maximizing masks. Ties go to
/// the numerically smallest `(S, T)` mask pair.
pub fn max_bilinear_cut(d: &[Vec<f64>]) -> Result<(f64, u32, u32)> {
    let m = d.len();
    ensure_size("cells for exhaustive cut search", m, MAX_CUT_CELLS)?;
    if m == 0 {
        return Ok((0.0, 0, 0));
    }
    let low = m.min(12);
    let high = m - low;
    let best_in_block = |hi: u32| -> (f64, u32, u32) {
        let base = hi << low;
        let mut sums = vec![0.0; m];
        for (i, row) in d.iter().enumerate() {
            if base >> i & 1 == 1 {
                sums.iter_mut().zip(row).for_each(|(s, x)| *s += x);
            }
        }
        let mut best = (f64::NEG_INFINITY, 0u32, 0u32);
        let mut gray = 0u32;
        for step in 0u32..1 << low {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                let sign = if gray >> bit & 1 == 1 { 1.0 } else { -1.0 };
                sums.iter_mut().zip(&d[bit]).for_each(|(s, x)| *s += sign * x);
            }
            let s_mask = base | gray;
            let (mut pos, mut neg, mut pos_mask, mut neg_mask) = (0.0, 0.0, 0u32, 0u32);
            for (j, &c) in sums.iter().enumerate() {
                if c > 0.0 {
                    pos += c;
                    pos_mask |= 1 << j;
                } else if c < 0.0 {
                    neg -= c;
                    neg_mask |= 1 << j;
                }
            }
            for cand in [(pos, s_mask, pos_mask), (neg, s_mask, neg_mask)] {
                if better(cand, best) {
                    best = cand;
                }
            }
        }
        best
    };
    let best = (0u32..1 << high)
        .into_par_iter()
        .map(best_in_block)
        .reduce(|| (f64::NEG_INFINITY, 0, 0), |a, b| if better(b, a) { b } else { a });
    Ok(best)
}

fn better(a: (f64, u32, u32), b: (f64, u32, u32)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2))
}

fn mask_intervals(mask: u32, grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for c in 0..grid.len() - 1 {
        if mask >> c & 1 == 1 {
            match out.last_mut() {
                Some(last) if last.1 == grid[c] => last.1 = grid[c + 1],
                _ => out.push((grid[c], grid[c + 1])),
            }
        }
    }
    out
}

/// `‖U - W‖_□`, exact on the common refinement when it has at most
/// [`MAX_CUT_CELLS`] cells, otherwise on block averages over a uniform grid of
/// `grid` cells (a lower bound, flagged approximate).
pub fn cut_norm<S: Scalar>(u: &StepGraphon<S>, w: &StepGraphon<S>, grid: usize) -> Result<CutNormReport> {
    let (u, w) = (u.to_f64(), w.to_f64());
    let refined = common_breakpoints(&u, &w);
    let (cells, approximate) = if refined.len() - 1 <= MAX_CUT_CELLS {
        (refined, false)
    } else {
        ensure_size("cut grid", grid, MAX_CUT_CELLS)?;
        if grid == 0 {
            return Err(Error::InvalidParameter("cut grid must have at least one cell".into()));
        }
        ((0..=grid).map(|i| i as f64 / grid as f64).collect(), true)
    };
    let m = cells.len() - 1;
    let diff: Vec<Vec<f64>> = if approximate {
        let (bu, bw) = (block_averages(&u, &cells), block_averages(&w, &cells));
        (0..m)
            .map(|i| (0..m).map(|j| bu[i][j] - bw[i][j]).collect())
            .collect()
    } else {
        let mid: Vec<f64> = cells.windows(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        let pu: Vec<usize> = mid.iter().map(|&x| u.locate(x)).collect();
        let pw: Vec<usize> = mid.iter().map(|&x| w.locate(x)).collect();
        (0..m)
            .map(|i| (0..m).map(|j| u.value(pu[i], pu[j]) - w.value(pw[i], pw[j])).collect())
            .collect()
    };
    let width: Vec<f64> = cells.windows(2).map(|c| c[1] - c[0]).collect();
    let weighted: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| width[i] * width[j] * diff[i][j]).collect())
        .collect();
    let (value, s, t) = max_bilinear_cut(&weighted)?;
    Ok(CutNormReport {
        value,
        approximate,
        rows: mask_intervals(s, &cells),
        cols: mask_intervals(t, &cells),
        grid: cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutDistanceReport {
    /// Upper bound on the cut distance; not claimed tight.
    pub upper_bound: f64,
    /// Cell measure of the aligned grid, or `None` when whole parts were permuted.
    pub cell: Option<f64>,
    /// `permutation[i]` is the cell (or part) of the first graphon moved to position `i`.
    pub permutation: Vec<usize>,
    pub approximate: bool,
}

/// Smallest `N ≤ 8` such that every boundary is a multiple of `1/N`.
fn equal_grid(u: &StepGraphon<f64>, w: &StepGraphon<f64>) -> Option<usize> {
    (1..=MAX_ALIGN_PARTS).find(|&n| {
        u.boundaries()
            .into_iter()
            .chain(w.boundaries())
            .all(|b| ((b * n as f64).round() - b * n as f64).abs() < STRUCTURAL_TOL * n as f64)
    })
}

/// Splits each part into cells of measure `1/n`.
fn split_equal(w: &StepGraphon<f64>, n: usize) -> StepGraphon<f64> {
    let cell_part: Vec<usize> = (0..n).map(|c| w.locate((c as f64 + 0.5) / n as f64)).collect();
    let values = cell_part.iter().map(|&i| cell_part.iter().map(|&j| *w.value(i, j)).collect()).collect();
    StepGraphon::new(vec![1.0 / n as f64; n], values).expect("refinement of a valid graphon")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            let j = if k % 2 == 0 { i } else { 0 };
            cur.swap(j, k - 1);
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

/// Minimum of `‖U^σ - W‖_□` over rearrangements `σ`: permutations of the
/// equal cells of a common `1/N` grid when one exists (`N ≤ 8`), otherwise
/// permutations of the first graphon's parts.
pub fn cut_distance_upper<S: Scalar>(u: &StepGraphon<S>, w: &StepGraphon<S>) -> Result<CutDistanceReport> {
    let (u, w) = (u.to_f64(), w.to_f64());
    ensure_size("parts", u.num_parts().max(w.num_parts()), MAX_ALIGN_PARTS)?;
    let (base_u, base_w, cell) = match equal_grid(&u, &w) {
        Some(n) => (split_equal(&u, n), split_equal(&w, n), Some(1.0 / n as f64)),
        None => (u.clone(), w.clone(), None),
    };
    let results: Vec<(f64, bool, Vec<usize>)> = permutations(base_u.num_parts())
        .into_par_iter()
        .map(|perm| {
            cut_norm(&base_u.permuted(&perm), &base_w, DEFAULT_CUT_GRID).map(|r| (r.value, r.approximate, perm))
        })
        .collect::<Result<_>>()?;
    let (upper_bound, approximate, permutation) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one permutation");
    Ok(CutDistanceReport { upper_bound, cell, permutation, approximate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::hom_density;
    use crate::graph::cycle;

    fn random_graphon(seed: u64, parts: usize) -> StepGraphon<f64> {
        let rng = crate::rng::CounterRng::new(seed);
        let raw: Vec<f64> = (0..parts).map(|i| 0.1 + rng.unit(0, i as u64)).collect();
        let total: f64 = raw.iter().sum();
        let mut values = vec![vec![0.0; parts]; parts];
        for i in 0..parts {
            for j in i..parts {
                let v = rng.unit(1 + i as u64, j as u64);
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        StepGraphon::new(raw.iter().map(|x| x / total).collect(), values).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let s = weighted_spectrum(&StepGraphon::bipartite(1.0).unwrap()).unwrap();
        assert!((s.eigenvalues[0] - 0.5).abs() < 1e-12 && (s.eigenvalues[1] + 0.5).abs() < 1e-12);
        let c = weighted_spectrum(&StepGraphon::constant(0.3).unwrap()).unwrap();
        assert_eq!(c.rank, 1);
        assert!((c.eigenvalues[0] - 0.3).abs() < 1e-15);
        let w = random_graphon(3, 5);
        assert!(weighted_spectrum(&w).unwrap().frobenius_residual < 1e-12);
    }

    #[test]
    fn spectral_cycles_match_direct_sums() {
        for seed in 0..5 {
            let w = random_graphon(seed, 4);
            for k in 3..=8 {
                let direct = hom_density(&cycle(k).unwrap(), &w).unwrap();
                assert!((cycle_density_spectral(&w, k).unwrap() - direct).abs() < 1e-10);
            }
        }
        assert!(cycle_density_spectral(&random_graphon(0, 2), 2).is_err());
        let c4 = cycle_density_spectral(&StepGraphon::constant(0.6).unwrap(), 4).unwrap();
        assert!((c4 - 0.6f64.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn cut_norm_basics() {
        let w = random_graphon(1, 4);
        assert_eq!(cut_norm(&w, &w, DEFAULT_CUT_GRID).unwrap().value, 0.0);
        let r = cut_norm(&StepGraphon::constant(0.7).unwrap(), &StepGraphon::constant(0.2).unwrap(), 4).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(r.rows, vec![(0.0, 1.0)]);
        let b = cut_norm(&StepGraphon::bipartite(1.0).unwrap(), &StepGraphon::constant(0.0).unwrap(), 4).unwrap();
        assert!((b.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cut_norm_matches_brute_force() {
        let u = random_graphon(10, 3);
        let w = random_graphon(11, 4);
        let r = cut_norm(&u, &w, DEFAULT_CUT_GRID).unwrap();
        assert!(!r.approximate);
        // evaluate the integral on the reported rectangles directly
        let mut acc = 0.0;
        let fine = 2000;
        for x in 0..fine {
            let xm = (x as f64 + 0.5) / fine as f64;
            if !r.rows.iter().any(|&(a, b)| xm >= a && xm < b) {
                continue;
            }
            for y in 0..fine {
                let ym = (y as f64 + 0.5) / fine as f64;
                if r.cols.iter().any(|&(a, b)| ym >= a && ym < b) {
                    acc += u.value(u.locate(xm), u.locate(ym)) - w.value(w.locate(xm), w.locate(ym));
                }
            }
        }
        acc /= (fine * fine) as f64;
        assert!((acc.abs() - r.value).abs() < 5e-3);
    }

    #[test]
    fn fine_refinements_fall_back_to_grid() {
        let u = random_graphon(20, 12);
        let w = random_graphon(21, 12);
        let r = cut_norm(&u, &w, 8).unwrap();
        assert!(r.approximate);
        assert_eq!(r.grid.len(), 9);
        assert!(cut_norm(&u, &w, 21).is_err());
    }

    #[test]
    fn cut_distance_of_relabelling_is_zero() {
        let w = StepGraphon::new(
            vec![0.25, 0.25, 0.5],
            vec![vec![0.1, 0.9, 0.3], vec![0.9, 0.2, 0.6], vec![0.3, 0.6, 0.8]],
        )
        .unwrap();
        let p = w.permuted(&[2, 0, 1]);
        assert!(cut_norm(&w, &p, DEFAULT_CUT_GRID).unwrap().value > 0.01);
        let d = cut_distance_upper(&w, &p).unwrap();
        assert_eq!(d.upper_bound, 0.0);
        assert_eq!(d.cell, Some(0.25));
        let u = random_graphon(5, 3);
        assert!(cut_distance_upper(&u, &u.permuted(&[1, 2, 0])).unwrap().upper_bound < 1e-15);
        assert_eq!(permutations(4).len(), 24);
    }
}

//! Step graphons: part measures plus a symmetric value matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SmallGraph;
use crate::scalar::{parse_rational, Rational, Scalar};

/// Tolerance for structural checks (range clamping, part boundaries).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for comparing computed quantities.
pub const COMPARISON_TOL: f64 = 1e-9;

/// A graphon constant on the blocks of a finite partition of `[0, 1]`.
///
/// Part `i` is the interval of length `parts[i]` starting at
/// `parts[0] + ... + parts[i-1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon<S = f64> {
    parts: Vec<S>,
    values: Vec<Vec<S>>,
}

pub type ExactGraphon = StepGraphon<Rational>;

impl<S: Scalar> StepGraphon<S> {
    /// Validates and normalizes a step graphon.
    ///
    /// Zero-measure parts are dropped, measures are renormalized to sum to 1,
    /// entries within 1e-12 of `[0, 1]` are clamped and the value matrix is
    /// symmetrized by averaging (asymmetry above 1e-9 is rejected).
    pub fn new(parts: Vec<S>, values: Vec<Vec<S>>) -> Result<Self> {
        let m = parts.len();
        if m == 0 {
            return Err(Error::DimensionMismatch("no parts".into()));
        }
        if values.len() != m || values.iter().any(|row| row.len() != m) {
            return Err(Error::DimensionMismatch(format!("{m} parts but value matrix is not {m}x{m}")));
        }
        let tol = S::from_f64(STRUCTURAL_TOL).unwrap();
        let sym_tol = S::from_f64(COMPARISON_TOL).unwrap();
        for (i, a) in parts.iter().enumerate() {
            if a.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "part {} has negative measure {}",
                    i + 1,
                    a.render()
                )));
            }
        }
        let mut vals = values;
        for (i, row) in vals.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if *v < -tol.clone() || *v > S::one() + tol.clone() {
                    return Err(Error::EntryOutOfRange { row: i + 1, col: j + 1, value: v.to_f64_lossy() });
                }
                if v.is_negative() {
                    *v = S::zero();
                } else if *v > S::one() {
                    *v = S::one();
                }
            }
        }
        let two = S::one() + S::one();
        for i in 0..m {
            for j in i + 1..m {
                let gap = (vals[i][j].clone() - vals[j][i].clone()).abs();
                if gap > sym_tol {
                    return Err(Error::Asymmetric { row: i + 1, col: j + 1, gap: gap.to_f64_lossy() });
                }
                if !gap.is_zero() {
                    let avg = (vals[i][j].clone() + vals[j][i].clone()) / two.clone();
                    vals[i][j] = avg.clone();
                    vals[j][i] = avg;
                }
            }
        }
        let keep: Vec<usize> = (0..m).filter(|&i| !parts[i].is_zero()).collect();
        if keep.is_empty() {
            return Err(Error::InvalidParameter("all parts have measure zero".into()));
        }
        let total = keep.iter().fold(S::zero(), |acc, &i| acc + parts[i].clone());
        let parts: Vec<S> = keep.iter().map(|&i| parts[i].clone() / total.clone()).collect();
        let values = keep.iter().map(|&i| keep.iter().map(|&j| vals[i][j].clone()).collect()).collect();
        Ok(StepGraphon { parts, values })
    }

    pub fn parts(&self) -> &[S] {
        &self.parts
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &S {
        &self.values[i][j]
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    /// The graphon with the same parts and `1 - W` as values.
    pub fn complement(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| S::one() - v.clone()).collect())
            .collect();
        StepGraphon { parts: self.parts.clone(), values }
    }

    /// Reorders parts; `order[i]` is the old index of new part `i`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let parts = order.iter().map(|&i| self.parts[i].clone()).collect();
        let values = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.values[i][j].clone()).collect())
            .collect();
        StepGraphon { parts, values }
    }

    pub fn to_f64(&self) -> StepGraphon<f64> {
        StepGraphon {
            parts: self.parts.iter().map(Scalar::to_f64_lossy).collect(),
            values: self.values.iter().map(|r| r.iter().map(Scalar::to_f64_lossy).collect()).collect(),
        }
    }

    /// Graphon `W_G`: `n` parts of measure `1/n`, 0/1 values from adjacency.
    pub fn from_graph(g: &SmallGraph) -> Result<Self> {
        let n = g.n();
        if n == 0 {
            return Err(Error::InvalidParameter("graph has no vertices".into()));
        }
        let parts = vec![S::ratio(1, n as i64); n];
        let values = (0..n)
            .map(|u| (0..n).map(|v| if g.has_edge(u, v) { S::one() } else { S::zero() }).collect())
            .collect();
        Ok(StepGraphon { parts, values })
    }

    pub fn constant(p: S) -> Result<Self> {
        Self::new(vec![S::one()], vec![vec![p]])
    }

    /// Balanced bipartite graphon: 0 on both diagonal blocks, `p` across.
    pub fn bipartite(p: S) -> Result<Self> {
        let half = S::ratio(1, 2);
        Self::new(vec![half.clone(), half], vec![vec![S::zero(), p.clone()], vec![p, S::zero()]])
    }

    /// Two-step graphon with parts `a`, `1 - a` and values 0 on the first
    /// block, `p` across and `q` on the second block.
    pub fn negated(a: S, p: S, q: S) -> Result<Self> {
        Self::check_unit("a", &a)?;
        let b = S::one() - a.clone();
        Self::new(vec![a, b], vec![vec![S::zero(), p.clone()], vec![p, q]])
    }

    /// Two-step graphon with parts `a`, `1 - a` and values 0, `p`, 1.
    pub fn zero_one_p(a: S, p: S) -> Result<Self> {
        Self::negated(a, p, S::one())
    }

    fn check_unit(name: &str, x: &S) -> Result<()> {
        if x.is_negative() || *x > S::one() {
            return Err(Error::InvalidParameter(format!("{name} = {} outside [0, 1]", x.render())));
        }
        Ok(())
    }

    /// Left endpoints of the parts followed by 1.
    pub fn boundaries(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut acc = S::zero();
        out.push(acc.clone());
        for a in &self.parts {
            acc = acc + a.clone();
            out.push(acc.clone());
        }
        out
    }

    pub fn degree_profile(&self) -> DegreeProfile<S> {
        let m = self.num_parts();
        let to_part: Vec<Vec<S>> = (0..m)
            .map(|i| (0..m).map(|j| self.parts[j].clone() * self.values[i][j].clone()).collect())
            .collect();
        let degrees = to_part.iter().map(|row| row.iter().cloned().fold(S::zero(), |a, b| a + b)).collect();
        DegreeProfile { degrees, to_part }
    }

    /// Codegrees `Σ_{l ∈ restrict} a_l W(i,l) W(l,j)` for every part pair.
    pub fn codegree_profile(&self, restrict: Option<&[usize]>) -> CodegreeProfile<S> {
        let m = self.num_parts();
        let through: Vec<usize> = restrict.map(<[usize]>::to_vec).unwrap_or_else(|| (0..m).collect());
        let matrix = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        through.iter().fold(S::zero(), |acc, &l| {
                            acc + self.parts[l].clone() * self.values[i][l].clone() * self.values[l][j].clone()
                        })
                    })
                    .collect()
            })
            .collect();
        CodegreeProfile { matrix, weights: self.parts.clone(), restrict: restrict.map(<[usize]>::to_vec) }
    }

    /// Largest total measure of a set of parts on which the graphon vanishes,
    /// with the parts achieving it. For step graphons this is the independence ratio.
    pub fn independence_ratio(&self) -> (S, Vec<usize>) {
        let m = self.num_parts();
        let cands: Vec<usize> = (0..m).filter(|&i| self.values[i][i].is_zero()).collect();
        let mut best = (S::zero(), Vec::new());
        let mut chosen = Vec::new();
        self.grow_independent(&cands, 0, &mut chosen, S::zero(), &mut best);
        best
    }

    fn grow_independent(&self, cands: &[usize], from: usize, chosen: &mut Vec<usize>, mass: S, best: &mut (S, Vec<usize>)) {
        if mass > best.0 {
            *best = (mass.clone(), chosen.clone());
        }
        let rest = cands[from..].iter().fold(S::zero(), |a, &i| a + self.parts[i].clone());
        if mass.clone() + rest <= best.0 {
            return;
        }
        for idx in from..cands.len() {
            let i = cands[idx];
            if chosen.iter().all(|&j| self.values[i][j].is_zero()) {
                chosen.push(i);
                self.grow_independent(cands, idx + 1, chosen, mass.clone() + self.parts[i].clone(), best);
                chosen.pop();
            }
        }
    }

    /// Largest measure of a set of parts on which the graphon is 1.
    pub fn clique_ratio(&self) -> (S, Vec<usize>) {
        self.complement().independence_ratio()
    }

    /// Maximum entry of the value matrix.
    pub fn max_value(&self) -> S {
        self.values.iter().flatten().fold(S::zero(), |a, v| if *v > a { v.clone() } else { a })
    }
}

impl StepGraphon<f64> {
    /// Index of the part containing `x ∈ [0, 1)`.
    pub fn locate(&self, x: f64) -> usize {
        let mut acc = 0.0;
        for (i, a) in self.parts.iter().enumerate() {
            acc += a;
            if x < acc {
                return i;
            }
        }
        self.parts.len() - 1
    }
}

impl ExactGraphon {
    /// Parses a preset (`constant:p`, `bipartite:p`, `negated:a,p,q`,
    /// `zero-one-p:a,p`) with exact rational parameters.
    pub fn from_preset(spec: &str) -> Result<Self> {
        let (kind, args) = spec
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("`{spec}` is not a preset")))?;
        let nums: Vec<Rational> = args
            .split(',')
            .map(|t| parse_rational(t).ok_or_else(|| Error::Parse(format!("bad number `{t}`"))))
            .collect::<Result<_>>()?;
        let arity = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("preset `{kind}` takes {n} parameter(s), got {}", nums.len())))
            }
        };
        match kind {
            "constant" => {
                arity(1)?;
                Self::constant(nums[0].clone())
            }
            "bipartite" => {
                arity(1)?;
                Self::bipartite(nums[0].clone())
            }
            "negated" => {
                arity(3)?;
                Self::negated(nums[0].clone(), nums[1].clone(), nums[2].clone())
            }
            "zero-one-p" => {
                arity(2)?;
                Self::zero_one_p(nums[0].clone(), nums[1].clone())
            }
            other => Err(Error::Parse(format!("unknown preset `{other}`"))),
        }
    }

    /// Reads the JSON file format `{"parts": [...], "values": [[...], ...]}`,
    /// keeping decimal literals exact.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            parts: Vec<serde_json::Number>,
            values: Vec<Vec<serde_json::Number>>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let conv = |n: &serde_json::Number| {
            parse_rational(&n.to_string()).ok_or_else(|| Error::Parse(format!("bad number {n}")))
        };
        let parts = raw.parts.iter().map(conv).collect::<Result<_>>()?;
        let values = raw.values.iter().map(|r| r.iter().map(conv).collect::<Result<_>>()).collect::<Result<_>>()?;
        Self::new(parts, values)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphonRepr {
    parts: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Serialize for StepGraphon<f64> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        GraphonRepr { parts: self.parts.clone(), values: self.values.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepGraphon<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GraphonRepr::deserialize(d)?;
        StepGraphon::new(r.parts, r.values).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ExactGraphon {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.to_f64().serialize(s)
    }
}

/// Per-part degrees `deg_i = Σ_j a_j W(i,j)` and their per-part contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile<S = f64> {
    pub degrees: Vec<S>,
    /// `to_part[i][j] = a_j W(i,j)`
    pub to_part: Vec<Vec<S>>,
}

impl<S: Scalar> DegreeProfile<S> {
    /// Degree of part `i` restricted to the parts in `set`.
    pub fn restricted(&self, i: usize, set: &[usize]) -> S {
        set.iter().fold(S::zero(), |a, &j| a + self.to_part[i][j].clone())
    }

    /// Largest minus smallest degree.
    pub fn spread(&self) -> S {
        let max = self.degrees.iter().fold(self.degrees[0].clone(), |a, d| if *d > a { d.clone() } else { a });
        let min = self.degrees.iter().fold(self.degrees[0].clone(), |a, d| if *d < a { d.clone() } else { a });
        max - min
    }

    /// The common degree, when all parts agree (exactly, or within `tol` for floats).
    pub fn regular_degree(&self, tol: f64) -> Option<S> {
        let d0 = &self.degrees[0];
        self.degrees.iter().all(|d| d.close_to(d0, tol)).then(|| d0.clone())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodegreeProfile<S = f64> {
    pub matrix: Vec<Vec<S>>,
    weights: Vec<S>,
    pub restrict: Option<Vec<usize>>,
}

impl<S: Scalar> CodegreeProfile<S> {
    /// Law of the codegree of a uniform random pair: value -> probability.
    /// Values are keyed by their rendering so equal values merge exactly.
    pub fn distribution(&self) -> Vec<(S, S)> {
        let mut merged: BTreeMap<String, (S, S)> = BTreeMap::new();
        let m = self.matrix.len();
        for i in 0..m {
            for j in 0..m {
                let w = self.weights[i].clone() * self.weights[j].clone();
                let v = self.matrix[i][j].clone();
                let e = merged.entry(v.render()).or_insert_with(|| (v, S::zero()));
                e.1 = e.1.clone() + w;
            }
        }
        let mut out: Vec<_> = merged.into_values().collect();
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// `E[codeg(x, y)^r]` for uniform `x, y`.
    pub fn moment(&self, r: usize) -> S {
        let m = self.matrix.len();
        let mut acc = S::zero();
        for i in 0..m {
            for j in 0..m {
                acc = acc + self.weights[i].clone() * self.weights[j].clone() * self.matrix[i][j].powu(r);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique, path};
    use num::One;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn drops_zero_parts_and_renormalizes() {
        let w = StepGraphon::new(vec![0.4, 0.0, 0.6], vec![vec![0.1, 0.2, 0.3], vec![0.2, 0.5, 0.4], vec![0.3, 0.4, 0.9]])
            .unwrap();
        assert_eq!(w.num_parts(), 2);
        assert_eq!(w.values(), &[vec![0.1, 0.3], vec![0.3, 0.9]]);
        let w = StepGraphon::new(vec![2.0, 6.0], vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(w.parts(), &[0.25, 0.75]);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(StepGraphon::new(vec![0.5, 0.5], vec![vec![0.0]]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(StepGraphon::new(vec![1.0], vec![vec![1.5]]), Err(Error::EntryOutOfRange { .. })));
        assert!(matches!(
            StepGraphon::new(vec![0.5, 0.5], vec![vec![0.0, 0.2], vec![0.3, 0.0]]),
            Err(Error::Asymmetric { .. })
        ));
        assert!(StepGraphon::new(vec![-0.1, 1.1], vec![vec![0.0; 2]; 2]).is_err());
        assert!(StepGraphon::new(vec![0.0], vec![vec![0.0]]).is_err());
    }

    #[test]
    fn clamps_and_symmetrizes_within_tolerance() {
        let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0 + 1e-13, 0.3], vec![0.3 + 1e-10, -1e-13]]).unwrap();
        assert_eq!(w.value(0, 0), &1.0);
        assert_eq!(w.value(1, 1), &0.0);
        assert_eq!(w.value(0, 1), w.value(1, 0));
    }

    #[test]
    fn graph_embeddings() {
        let w = StepGraphon::<f64>::from_graph(&path(3).unwrap()).unwrap();
        assert_eq!(w.values(), &[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        let k2 = StepGraphon::<Rational>::from_graph(&clique(2).unwrap()).unwrap();
        assert_eq!(k2.parts(), &[r(1, 2), r(1, 2)]);
        assert!(StepGraphon::<f64>::from_graph(&SmallGraph::empty(0).unwrap()).is_err());
    }

    #[test]
    fn complement_is_an_involution() {
        let w = ExactGraphon::from_preset("negated:2/5,7/10,1/10").unwrap();
        assert_eq!(w.complement().complement(), w);
        let c = ExactGraphon::from_preset("constant:0.3").unwrap().complement();
        assert_eq!(c.value(0, 0), &r(7, 10));
    }

    #[test]
    fn bipartite_graphon_is_half_p_regular() {
        let w = ExactGraphon::from_preset("bipartite:0.6").unwrap();
        assert_eq!(w.degree_profile().regular_degree(0.0), Some(r(3, 10)));
    }

    #[test]
    fn negated_family_degrees_and_codegrees() {
        let (a, p, q) = (r(2, 5), r(7, 10), r(1, 10));
        let w = ExactGraphon::negated(a.clone(), p.clone(), q.clone()).unwrap();
        let deg = w.degree_profile();
        assert_eq!(deg.degrees[0], (Rational::one() - a.clone()) * p.clone());
        assert_eq!(deg.restricted(1, &[0]), a.clone() * p.clone());
        assert_eq!(deg.restricted(1, &[1]), (Rational::one() - a.clone()) * q);
        let cod = w.codegree_profile(Some(&[0]));
        assert_eq!(cod.matrix[1][1], a * p.clone() * p);
    }

    #[test]
    fn degree_profile_of_graph_embedding_is_scaled_degree() {
        let g = crate::graph::named_graph("K1,3+K2").unwrap();
        let w = StepGraphon::<Rational>::from_graph(&g).unwrap();
        let deg = w.degree_profile();
        for v in 0..g.n() {
            assert_eq!(deg.degrees[v], r(g.degree(v) as i64, g.n() as i64));
        }
    }

    #[test]
    fn independence_ratio_of_step_graphons() {
        let w = ExactGraphon::from_preset("negated:0.4,0.7,0.5").unwrap();
        assert_eq!(w.independence_ratio(), (r(2, 5), vec![0]));
        let b = ExactGraphon::from_preset("bipartite:1").unwrap();
        assert_eq!(b.independence_ratio().0, r(1, 2));
        let z = ExactGraphon::from_preset("constant:0").unwrap();
        assert_eq!(z.independence_ratio().0, r(1, 1));
        let c = ExactGraphon::from_preset("zero-one-p:0.3,0.5").unwrap();
        assert_eq!(c.clique_ratio().0, r(7, 10));
        // union of several zero blocks
        let g = crate::graph::named_graph("P4").unwrap();
        let wp = StepGraphon::<Rational>::from_graph(&g).unwrap();
        assert_eq!(wp.independence_ratio().0, r(1, 2));
    }

    #[test]
    fn presets_parse_and_reject() {
        assert!(ExactGraphon::from_preset("negated:0.4,0.7").is_err());
        assert!(ExactGraphon::from_preset("wobbly:0.4").is_err());
        assert!(ExactGraphon::from_preset("constant:1.5").is_err());
        assert!(ExactGraphon::from_preset("negated:1.5,0.5,0.5").is_err());
        let zero_a = ExactGraphon::from_preset("zero-one-p:0,0.5").unwrap();
        assert_eq!(zero_a.num_parts(), 1);
    }

    #[test]
    fn json_round_trip() {
        let w = ExactGraphon::from_json(r#"{"parts":[0.25,0.75],"values":[[0,0.1],[0.1,1]]}"#).unwrap();
        assert_eq!(w.value(0, 1), &r(1, 10));
        let text = serde_json::to_string(&w.to_f64()).unwrap();
        let back: StepGraphon<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w.to_f64());
    }

    #[test]
    fn codegree_distribution_of_bipartite() {
        let w = ExactGraphon::from_preset("bipartite:0.6").unwrap();
        let dist = w.codegree_profile(None).distribution();
        assert_eq!(dist, vec![(r(0, 1), r(1, 2)), (r(9, 50), r(1, 2))]);
    }
}

//! Verification suites for the bipartite, negated and 0/1/p two-step
//! families: each identity is computed along two independent paths and
//! recorded in a pass/fail ledger.

use serde::Serialize;

use crate::density::hom_density;
use crate::density::hom_density_terms;
use crate::distribution::{alpha_infinity_estimate, binomial_moment, exact_xk, pairs, zero_edge_probability};
use crate::error::{Error, Result};
use crate::graph::{clique, complete_bipartite, cycle, enumerate_gkm, named_graph, path, SmallGraph};
use crate::graphon::StepGraphon;
use crate::scalar::Scalar;

/// Tolerance for float-mode identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Length of the `α_k^{1/k}` traces.
pub const TRACE_K: usize = 2000;
/// Tolerance on the last trace entry against its limit.
pub const TRACE_TOL: f64 = 5e-3;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    /// Exact equality in rational mode, `|Δ| < IDENTITY_TOL` in float mode.
    pub fn identity<S: Scalar>(name: impl Into<String>, expected: &S, actual: &S) -> Self {
        let residual = (expected.clone() - actual.clone()).abs().to_f64_lossy();
        Check {
            name: name.into(),
            expected: expected.render(),
            actual: actual.render(),
            residual,
            pass: actual.close_to(expected, IDENTITY_TOL),
        }
    }

    pub fn approx(name: impl Into<String>, expected: f64, actual: f64, tol: f64) -> Self {
        let residual = (expected - actual).abs();
        Check {
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            residual,
            pass: residual < tol,
        }
    }

    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Check {
            name: name.into(),
            expected: "true".into(),
            actual: holds.to_string(),
            residual: if holds { 0.0 } else { 1.0 },
            pass: holds,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub exact: bool,
    pub checks: Vec<Check>,
    /// Whether the theorem's hypothesis holds for these parameters, when it has one.
    pub hypothesis: Option<bool>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl SuiteReport {
    fn new<S: Scalar>(suite: String) -> Self {
        SuiteReport { suite, exact: S::EXACT, checks: Vec::new(), hypothesis: None, notes: Vec::new(), passed: true }
    }

    fn push(&mut self, check: Check) {
        self.passed &= check.pass;
        self.checks.push(check);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn unit<S: Scalar>(name: &str, x: &S) -> Result<()> {
    if x.is_negative() || *x > S::one() {
        return Err(Error::InvalidParameter(format!("{name} = {} outside [0, 1]", x.render())));
    }
    Ok(())
}

fn int<S: Scalar>(n: usize) -> S {
    S::from_usize(n).expect("small integer")
}

/// Density of a forest in the balanced bipartite graphon: each component on
/// `v` vertices and `e` edges contributes `2^{1-v} p^e`.
fn bipartite_forest_density<S: Scalar>(f: &SmallGraph, p: &S) -> S {
    f.components()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let e = c.iter().map(|&v| f.degree(v)).sum::<usize>() / 2;
            p.powu(e) / int::<S>(2).powu(c.len() - 1)
        })
        .fold(S::one(), |a, b| a * b)
}

fn is_forest(f: &SmallGraph) -> bool {
    f.edge_count() + f.components().len() == f.n()
}

/// The moment chain and codegree law of the balanced bipartite graphon.
pub fn verify_bipartite_forcing<S: Scalar>(p: S) -> Result<SuiteReport> {
    unit("p", &p)?;
    let w = StepGraphon::bipartite(p.clone())?;
    let mut rep = SuiteReport::new::<S>(format!("bipartite:{}", p.render()));
    let two = int::<S>(2);
    let chain = [
        ("t(K2) = p/2", clique(2)?, p.clone() / two.clone()),
        ("t(P3) = p^2/4", path(3)?, p.powu(2) / int(4)),
        ("t(C4) = p^4/8", cycle(4)?, p.powu(4) / int(8)),
        ("t(K2,3) = p^6/16", complete_bipartite(2, 3)?, p.powu(6) / int(16)),
        ("t(C5) = 0", cycle(5)?, S::zero()),
    ];
    for (name, f, expected) in chain {
        rep.push(Check::identity(name, &expected, &hom_density(&f, &w)?));
    }

    let law = w.codegree_profile(None).distribution();
    let half = S::ratio(1, 2);
    let expected: Vec<(S, S)> = if p.is_zero() {
        vec![(S::zero(), S::one())]
    } else {
        vec![(S::zero(), half.clone()), (p.powu(2) / two, half)]
    };
    let same_shape = law.len() == expected.len()
        && law
            .iter()
            .zip(&expected)
            .all(|((v, pr), (ev, epr))| v.close_to(ev, IDENTITY_TOL) && pr.close_to(epr, IDENTITY_TOL));
    let render = |l: &[(S, S)]| l.iter().map(|(v, w)| format!("{}:{}", v.render(), w.render())).collect::<Vec<_>>().join(" ");
    rep.push(Check {
        name: "codegree law {0: 1/2, p^2/2: 1/2}".into(),
        expected: render(&expected),
        actual: render(&law),
        residual: if same_shape { 0.0 } else { 1.0 },
        pass: same_shape,
    });

    for entry in enumerate_gkm(5, 3)? {
        let f = entry.class.graph();
        let expected = if is_forest(f) { bipartite_forest_density(f, &p) } else { S::zero() };
        rep.push(Check::identity(format!("G(5,3) ledger t({f})"), &expected, &hom_density(f, &w)?));
    }
    rep.push(Check::identity(
        "E[C(X5,3)] from the G(5,3) ledger",
        &exact_xk(&w, 5)?.binomial_moment(3),
        &binomial_moment(&w, 5, 3)?,
    ));
    Ok(rep)
}

/// `α_k` of the negated graphon summed over the number `i` of points in the
/// second part.
pub fn negated_alpha_closed_form<S: Scalar>(a: &S, p: &S, q: &S, k: usize) -> S {
    let b = S::one() - a.clone();
    let (np, nq) = (S::one() - p.clone(), S::one() - q.clone());
    let mut binom = S::one();
    let mut total = S::zero();
    for i in 0..=k {
        if i > 0 {
            binom = binom * int(k - i + 1) / int(i);
        }
        total = total + binom.clone() * a.powu(k - i) * b.powu(i) * np.powu((k - i) * i) * nq.powu(pairs(i));
    }
    total
}

fn trace_check<S: Scalar>(rep: &mut SuiteReport, name: &str, w: &StepGraphon<S>, target: f64) -> Result<()> {
    let t = alpha_infinity_estimate(w, TRACE_K)?;
    rep.push(Check::approx(format!("{name}: alpha_{TRACE_K}^(1/{TRACE_K})"), target, t.estimate, TRACE_TOL));
    Ok(())
}

/// Degree, codegree and zero-edge identities of the negated graphon
/// (parts `a`, `1-a`; values 0, `p`, `q`).
pub fn verify_negated_family<S: Scalar>(a: S, p: S, q: S) -> Result<SuiteReport> {
    if a <= S::zero() || a >= S::one() {
        return Err(Error::InvalidParameter(format!("a = {} outside (0, 1)", a.render())));
    }
    for (name, x) in [("p", &p), ("q", &q)] {
        if *x <= S::zero() || *x > S::one() {
            return Err(Error::InvalidParameter(format!("{name} = {} outside (0, 1]", x.render())));
        }
    }
    let w = StepGraphon::negated(a.clone(), p.clone(), q.clone())?;
    let b = S::one() - a.clone();
    let mut rep = SuiteReport::new::<S>(format!("negated:{},{},{}", a.render(), p.render(), q.render()));
    rep.hypothesis = Some(b.clone() * q.clone() <= (S::one() - int::<S>(2) * a.clone()) * p.clone());

    let deg = w.degree_profile();
    rep.push(Check::identity("deg on A = (1-a)p", &(b.clone() * p.clone()), &deg.degrees[0]));
    rep.push(Check::identity("deg_B on A = (1-a)p", &(b.clone() * p.clone()), &deg.restricted(0, &[1])));
    rep.push(Check::identity("deg_A on B = ap", &(a.clone() * p.clone()), &deg.restricted(1, &[0])));
    rep.push(Check::identity("deg_B on B = (1-a)q", &(b.clone() * q.clone()), &deg.restricted(1, &[1])));
    let codeg = w.codegree_profile(Some(&[0]));
    rep.push(Check::identity("codeg_A on BxB = ap^2", &(a.clone() * p.powu(2)), &codeg.matrix[1][1]));

    let kmax = if S::EXACT { crate::distribution::MAX_EXACT_K } else { 10 };
    for k in 1..=kmax {
        let closed = negated_alpha_closed_form(&a, &p, &q, k);
        rep.push(Check::identity(format!("alpha_{k} closed form = P(X_{k} = 0)"), &closed, &exact_xk(&w, k)?.probs[0]));
    }
    let dual = exact_xk(&w.complement(), 4)?;
    let mirrored = exact_xk(&w, 4)?.mirrored();
    for (m, (x, y)) in dual.probs.iter().zip(&mirrored.probs).enumerate() {
        rep.push(Check::identity(format!("P(X_4(1-W) = {m}) = P(X_4(W) = {})", 6 - m), y, x));
    }
    let target = w.independence_ratio().0.to_f64_lossy();
    trace_check(&mut rep, "alpha(W)", &w, target)?;
    rep.push(Check::identity("alpha(W) = a", &a, &w.independence_ratio().0));
    Ok(rep)
}

/// Sum of the density terms of `f` whose vertices `pattern` land in part
/// `side` exactly where `pattern` says so.
fn pattern_sum<S: Scalar>(f: &SmallGraph, w: &StepGraphon<S>, keep: impl Fn(&[usize]) -> bool) -> Result<S> {
    Ok(hom_density_terms(f, w)?
        .into_iter()
        .filter(|(assign, _)| keep(assign))
        .fold(S::zero(), |acc, (_, v)| acc + v))
}

/// Independence and clique ratios, degree moments and clique decompositions
/// of the 0/1/p graphon (parts `a`, `1-a`; values 0, `p`, 1).
pub fn verify_01p_family<S: Scalar>(a: S, p: S) -> Result<SuiteReport> {
    unit("a", &a)?;
    unit("p", &p)?;
    let w = StepGraphon::zero_one_p(a.clone(), p.clone())?;
    let b = S::one() - a.clone();
    let mut rep = SuiteReport::new::<S>(format!("zero-one-p:{},{}", a.render(), p.render()));

    rep.push(Check::identity("alpha(W) = a", &a, &w.independence_ratio().0));
    rep.push(Check::identity("omega(W) = 1-a", &b, &w.clique_ratio().0));
    trace_check(&mut rep, "alpha(W)", &w, a.to_f64_lossy())?;
    trace_check(&mut rep, "omega(W)", &w.complement(), b.to_f64_lossy())?;

    let k4 = clique(4)?;
    let k4m = named_graph("K4-")?;
    let t_k2 = hom_density(&clique(2)?, &w)?;
    let t_k4 = hom_density(&k4, &w)?;
    let t_k4m = hom_density(&k4m, &w)?;
    let x4 = exact_xk(&w, 4)?;
    rep.push(Check::identity("t(K4) = P(X_4 = 6)", &x4.probs[6], &t_k4));
    rep.push(Check::identity("t(K4-) = P(X_4 = 5)/6 + P(X_4 = 6)", &(x4.probs[5].clone() / int(6) + x4.probs[6].clone()), &t_k4m));

    if a.is_zero() || b.is_zero() {
        rep.notes.push("one part is null; the degree identities on A and B are vacuous".into());
        return Ok(rep);
    }
    // with both parts present, part 0 is A and part 1 is B
    let in_a = |v: usize| v == 0;
    let count_a = |assign: &[usize]| assign.iter().filter(|&&v| in_a(v)).count();

    let two = int::<S>(2);
    let ey = (t_k2.clone() - b.powu(2)) / (two.clone() * a.clone());
    rep.push(Check::identity("E(Y) = (t(K2) - (1-a)^2)/(2a) = (1-a)p", &(b.clone() * p.clone()), &ey));
    let printed = (t_k2.clone() / two.clone() - b.powu(2)) / a.clone();
    rep.notes.push(format!(
        "the expression (t(K2)/2 - (1-a)^2)/a evaluates to {}, not (1-a)p; the first-moment value used is (t(K2) - (1-a)^2)/(2a)",
        printed.render()
    ));

    let one_in_a = pattern_sum(&k4, &w, |s| count_a(s) == 1)?;
    let ey3 = one_in_a.clone() / (int::<S>(4) * a.clone());
    rep.push(Check::identity("E(Y^3) = ((1-a)p)^3 from K4 terms", &(b.clone() * p.clone()).powu(3), &ey3));
    let none_in_a = pattern_sum(&k4, &w, |s| count_a(s) == 0)?;
    rep.push(Check::identity("K4 terms inside B = (1-a)^4", &b.powu(4), &none_in_a));
    rep.push(Check::identity("K4 pattern decomposition sums to t(K4)", &t_k4, &(one_in_a + none_in_a)));

    let ez = (t_k2 - b.powu(2)) / (two * b.clone());
    rep.push(Check::identity("E(Z) = ap", &(a.clone() * p.clone()), &ez));
    // P3 visits 0-1-2; ABA paths have the middle vertex in B
    let aba = pattern_sum(&path(3)?, &w, |s| in_a(s[0]) && !in_a(s[1]) && in_a(s[2]))?;
    rep.push(Check::identity("E(Z^2) = (ap)^2 from ABA paths", &(a.clone() * p.clone()).powu(2), &(aba / b.clone())));

    let mut parts_sum = S::zero();
    for n_a in 0..=4 {
        let s = pattern_sum(&k4m, &w, |assign| count_a(assign) == n_a)?;
        parts_sum = parts_sum + s;
    }
    rep.push(Check::identity("K4- pattern decomposition sums to t(K4-)", &t_k4m, &parts_sum));
    let three_in_b = pattern_sum(&k4m, &w, |s| count_a(s) == 1)?;
    // one A vertex: it sits on the missing edge (2 of 4 positions, degree 2 in K4-) or not (degree 3)
    let expected = int::<S>(2) * a.clone() * b.powu(3) * p.powu(2) + int::<S>(2) * a.clone() * b.powu(3) * p.powu(3);
    rep.push(Check::identity("K4- terms with one vertex in A", &expected, &three_in_b));
    Ok(rep)
}

/// Runs the suite named by `spec`: `bipartite:p`, `negated:a,p,q` or
/// `zero-one-p:a,p`, with parameters parsed by `parse`.
pub fn run_suite<S: Scalar>(spec: &str, parse: impl Fn(&str) -> Result<S>) -> Result<SuiteReport> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("suite `{spec}` must look like kind:params")))?;
    let args: Vec<S> = args.split(',').map(|x| parse(x.trim())).collect::<Result<_>>()?;
    match (kind.trim(), args.as_slice()) {
        ("bipartite", [p]) => verify_bipartite_forcing(p.clone()),
        ("negated", [a, p, q]) => verify_negated_family(a.clone(), p.clone(), q.clone()),
        ("zero-one-p" | "01p", [a, p]) => verify_01p_family(a.clone(), p.clone()),
        _ => Err(Error::Parse(format!("unknown suite `{spec}`"))),
    }
}

/// `P(X_k = 0)` from the distribution engine against direct summation.
pub fn alpha_cross_check<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<Check> {
    Ok(Check::identity(format!("alpha_{k} by direct summation"), &exact_xk(w, k)?.probs[0], &zero_edge_probability(w, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn assert_passes(rep: &SuiteReport) {
        let failed: Vec<_> = rep.failures().collect();
        assert!(rep.passed, "{}: {failed:#?}", rep.suite);
    }

    #[test]
    fn bipartite_suite() {
        for p in ["0.6", "0", "1", "1/3"] {
            assert_passes(&verify_bipartite_forcing(q(p)).unwrap());
        }
        let rep = verify_bipartite_forcing(0.6f64).unwrap();
        assert_passes(&rep);
        assert!(!rep.exact);
        let one = verify_bipartite_forcing(q("1")).unwrap();
        let c4 = one.checks.iter().find(|c| c.name.starts_with("t(C4)")).unwrap();
        assert_eq!(c4.actual, "1/8");
    }

    #[test]
    fn negated_suite() {
        let rep = verify_negated_family(q("0.4"), q("0.7"), q("0.1")).unwrap();
        assert_passes(&rep);
        assert_eq!(rep.hypothesis, Some(true));
        let rep = verify_negated_family(q("0.5"), q("0.6"), q("0.3")).unwrap();
        assert_passes(&rep);
        assert_eq!(rep.hypothesis, Some(false));
        assert_passes(&verify_negated_family(0.4, 0.7, 0.5).unwrap());
        assert!(verify_negated_family(q("0"), q("0.5"), q("0.5")).is_err());
        assert!(verify_negated_family(q("0.5"), q("0.5"), q("0")).is_err());
    }

    #[test]
    fn zero_one_p_suite() {
        for (a, p) in [("0.3", "0.5"), ("0", "0.5"), ("1", "0.5"), ("0.3", "1"), ("0.6", "0")] {
            assert_passes(&verify_01p_family(q(a), q(p)).unwrap());
        }
        assert_passes(&verify_01p_family(0.3, 0.5).unwrap());
    }

    #[test]
    fn suite_dispatch() {
        let parse = |s: &str| parse_rational(s).ok_or_else(|| Error::Parse(s.into()));
        assert!(run_suite("bipartite:0.6", parse).unwrap().passed);
        assert!(run_suite("zero-one-p:0.3,0.5", parse).unwrap().passed);
        assert!(run_suite("negated:0.4,0.7", parse).is_err());
        assert!(run_suite("nonsense", parse).is_err());
        let w = StepGraphon::negated(q("0.4"), q("0.7"), q("0.5")).unwrap();
        assert!(alpha_cross_check(&w, 6).unwrap().pass);
    }
}

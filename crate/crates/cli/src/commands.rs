use clap::{Args, Subcommand};
use graphonlab::bitgraph::parse_vertex_set;
use graphonlab::containers::{
    almost_independent_set, certify, exhaustive_containment, greedy_independent_set, independence_pipeline,
    IndependentSource,
};
use graphonlab::density::hom_density;
use graphonlab::distribution::{alpha_infinity_estimate, binomial_moment, exact_xk, factorial_moment};
use graphonlab::graph::{connected_classes, cycle, parse_graph_spec, path, MAX_VERTICES};
use graphonlab::sampler::{empirical_xk, sample_n_graph};
use graphonlab::scalar::parse_rational;
use graphonlab::spectral::{cut_distance_upper, cut_norm, cycle_density_spectral, weighted_spectrum, DEFAULT_CUT_GRID};
use graphonlab::verify::run_suite;
use graphonlab::witness::{
    clique_witness, construct_cycle_counterexample, construct_diameter_counterexample, cycle_comparison,
    diameter_graphs, weak_isomorphism_witness,
};
use graphonlab::{sample_graph_probability, BitGraph, Delta, Error, ExactGraphon, Rational, Scalar, StepGraphon};
use serde_json::{json, Value};

use crate::inputs::{CliError, Inputs};
use crate::output::{lines, num, Output, Table};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homomorphism density t(F, W).
    Density {
        #[command(flatten)]
        w: GraphonArg,
        /// Graph name (P4, C5, K2,3, K4-, P3+K2), inline `n;u-v,...`, or a file.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        exact: bool,
    },
    /// Distribution of the edge count X_k of G(k, W).
    Xdist {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        exact: bool,
    },
    /// Trace of alpha_k^{1/k} for k = 1..=kmax.
    Alpha {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(long)]
        kmax: usize,
    },
    /// Binomial moments E[C(X_k, m)] from the distribution and from the graph catalog.
    Moments {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(short)]
        k: usize,
        /// Single m; every m in 1..=C(k,2) when omitted.
        #[arg(short)]
        m: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
    /// One draw of G(k, W) as an edge list.
    Sample {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Monte Carlo histogram of X_k against the exact distribution.
    Empirical {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(short)]
        k: usize,
        #[arg(short = 'N', long = "trials")]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Fingerprint and container of independent sets.
    Containers(ContainersArgs),
    /// Samples G(n, W) and sets a container against alpha(W).
    AlphaPipeline {
        #[command(flatten)]
        w: GraphonArg,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
        #[arg(long, default_value = "1/5")]
        delta: Delta,
        #[arg(long)]
        seed: u64,
    },
    /// Eigenvalues of the measure-weighted value matrix.
    Spectrum {
        #[command(flatten)]
        w: GraphonArg,
    },
    /// Cycle densities from the spectrum and by direct summation.
    Cycledensity {
        #[command(flatten)]
        w: GraphonArg,
        /// Largest cycle length; rows run from 3.
        #[arg(short)]
        k: usize,
    },
    /// Cut norm of the difference of two graphons.
    Cutnorm {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = DEFAULT_CUT_GRID)]
        grid: usize,
        /// Also report an upper bound on the cut distance.
        #[arg(long)]
        distance: bool,
    },
    /// First connected graph whose density separates two graphons.
    Witness {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long = "max-n", default_value_t = 7)]
        max_n: usize,
        /// Also scan cliques K_2..K_c.
        #[arg(long)]
        cliques: Option<usize>,
        #[arg(long)]
        exact: bool,
    },
    /// Builds and checks a non-forcing pair: `cycles` or `diameter:<d>`.
    Counterexample {
        #[arg(long)]
        kind: String,
    },
    /// Runs a verification suite: `bipartite:p`, `negated:a,p,q` or `zero-one-p:a,p`.
    Verify {
        #[arg(long)]
        suite: String,
        /// Floating-point arithmetic instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Reruns a saved manifest and checks the output is byte-identical.
    Replay {
        /// Run directory or its manifest.json.
        manifest: std::path::PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GraphonArg {
    /// Preset (`constant:p`, `bipartite:p`, `negated:a,p,q`, `zero-one-p:a,p`) or JSON file.
    #[arg(long)]
    graphon: String,
}

#[derive(Debug, Args)]
pub struct ContainersArgs {
    /// Graph file (line format) or inline `n;u-v,...`.
    #[arg(long, conflicts_with = "graphon")]
    graph: Option<String>,
    /// Sample the graph from this graphon instead.
    #[arg(long, requires_all = ["n", "seed"])]
    graphon: Option<String>,
    #[arg(short)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// A vertex-set file, `planted`, `greedy`, or `exhaustive`.
    #[arg(long, default_value = "exhaustive")]
    independent: String,
    #[arg(long)]
    delta: Delta,
    /// Set size for `exhaustive`.
    #[arg(short)]
    k: Option<usize>,
}

impl Command {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Sample { seed, .. } | Command::Empirical { seed, .. } | Command::AlphaPipeline { seed, .. } => {
                Some(*seed)
            }
            Command::Containers(c) => c.seed,
            _ => None,
        }
    }
}

fn json_of<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn scalar_json<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        json!({ "value": x.to_f64_lossy(), "exact": x.render() })
    } else {
        json!(x.to_f64_lossy())
    }
}

pub fn run(cmd: &Command, inputs: &Inputs) -> Result<Output, CliError> {
    match cmd {
        Command::Density { w, graph, exact } => {
            let w = inputs.graphon(&w.graphon)?;
            let f = if inputs.exists(graph) { parse_graph_spec(&inputs.read(graph)?)? } else { parse_graph_spec(graph)? };
            if *exact {
                density(graph, &f, &w)
            } else {
                density(graph, &f, &w.to_f64())
            }
        }
        Command::Xdist { w, k, exact } => {
            let w = inputs.graphon(&w.graphon)?;
            if *exact {
                xdist(&w, *k)
            } else {
                xdist(&w.to_f64(), *k)
            }
        }
        Command::Alpha { w, kmax } => {
            let trace = alpha_infinity_estimate(&inputs.graphon(&w.graphon)?.to_f64(), *kmax)?;
            let mut t = Table::new(&["k", "alpha_k_root"]);
            for (k, a) in &trace.trace {
                t.push(vec![k.to_string(), num(*a)]);
            }
            Ok(Output::table(json_of(&trace), t))
        }
        Command::Moments { w, k, m, exact } => {
            let w = inputs.graphon(&w.graphon)?;
            if *exact {
                moments(&w, *k, *m)
            } else {
                moments(&w.to_f64(), *k, *m)
            }
        }
        Command::Sample { w, k, seed } => {
            let s = sample_n_graph(&inputs.graphon(&w.graphon)?.to_f64(), *k, *seed)?;
            let parts: Vec<usize> = s.parts.iter().map(|p| p + 1).collect();
            let json = json!({ "seed": seed, "graph": json_of(&s.graph), "parts": parts });
            Ok(Output::json(json).with_text(s.graph.to_text()))
        }
        Command::Empirical { w, k, trials, seed } => empirical(&inputs.graphon(&w.graphon)?.to_f64(), *k, *trials, *seed),
        Command::Containers(args) => containers(args, inputs),
        Command::AlphaPipeline { w, n, k, delta, seed } => {
            let rep = independence_pipeline(&inputs.graphon(&w.graphon)?, *n, *k, *delta, *seed)?;
            Ok(Output::json(json_of(&rep)))
        }
        Command::Spectrum { w } => {
            let rep = weighted_spectrum(&inputs.graphon(&w.graphon)?)?;
            let mut t = Table::new(&["index", "eigenvalue"]);
            for (i, l) in rep.eigenvalues.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), num(*l)]);
            }
            Ok(Output::table(json_of(&rep), t))
        }
        Command::Cycledensity { w, k } => cycle_densities(&inputs.graphon(&w.graphon)?.to_f64(), *k),
        Command::Cutnorm { a, b, grid, distance } => {
            let (u, w) = (inputs.graphon(a)?.to_f64(), inputs.graphon(b)?.to_f64());
            let rep = cut_norm(&u, &w, *grid)?;
            let mut json = json!({ "cut_norm": json_of(&rep) });
            let mut t = Table::new(&["cut_norm", "approximate"]);
            t.push(vec![num(rep.value), rep.approximate.to_string()]);
            if *distance {
                json["cut_distance"] = json_of(&cut_distance_upper(&u, &w)?);
            }
            Ok(Output::table(json, t).with_default_json())
        }
        Command::Witness { a, b, max_n, cliques, exact } => {
            let (u, w) = (inputs.graphon(a)?, inputs.graphon(b)?);
            if *exact {
                witness(&u, &w, *max_n, *cliques)
            } else {
                witness(&u.to_f64(), &w.to_f64(), *max_n, *cliques)
            }
        }
        Command::Counterexample { kind } => counterexample(kind),
        Command::Verify { suite, float } => {
            let rep = if *float {
                run_suite::<f64>(suite, |s| s.parse().map_err(|_| Error::Parse(format!("bad number `{s}`"))))?
            } else {
                run_suite::<Rational>(suite, |s| parse_rational(s).ok_or_else(|| Error::Parse(format!("bad number `{s}`"))))?
            };
            let mut out = Output::json(json_of(&rep));
            out.failed = !rep.passed;
            Ok(out)
        }
        Command::Replay { .. } => Err(CliError::Usage("replay cannot be nested".into())),
    }
}

fn density<S: Scalar>(name: &str, f: &graphonlab::SmallGraph, w: &StepGraphon<S>) -> Result<Output, CliError> {
    let t = hom_density(f, w)?;
    let mut table = Table::new(if S::EXACT { &["graph", "density", "exact"] } else { &["graph", "density"] });
    let mut row = vec![name.replace(',', " "), num(t.to_f64_lossy())];
    let mut text = num(t.to_f64_lossy()) + "\n";
    if S::EXACT {
        row.push(t.render());
        text.push_str(&t.render());
        text.push('\n');
    }
    table.push(row);
    let json = json!({ "graph": json_of(f), "density": scalar_json(&t) });
    Ok(Output::table(json, table).with_text(text))
}

fn xdist<S: Scalar>(w: &StepGraphon<S>, k: usize) -> Result<Output, CliError> {
    let d = exact_xk(w, k)?;
    let mut t = Table::new(if S::EXACT { &["m", "P", "P_exact"] } else { &["m", "P"] });
    for (m, p) in d.probs.iter().enumerate() {
        let mut row = vec![m.to_string(), num(p.to_f64_lossy())];
        if S::EXACT {
            row.push(p.render());
        }
        t.push(row);
    }
    let json = json!({ "k": k, "probs": d.probs.iter().map(scalar_json).collect::<Vec<_>>() });
    Ok(Output::table(json, t))
}

fn moments<S: Scalar>(w: &StepGraphon<S>, k: usize, m: Option<usize>) -> Result<Output, CliError> {
    let d = exact_xk(w, k)?;
    let ms: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (1..=k * k.saturating_sub(1) / 2).collect(),
    };
    let mut t = Table::new(&["m", "from_distribution", "from_catalog", "factorial_moment", "residual"]);
    let mut rows = Vec::new();
    for m in ms {
        let lhs = d.binomial_moment(m);
        let rhs = binomial_moment(w, k, m)?;
        let fact = factorial_moment(w, k, m)?;
        let residual = (lhs.clone() - rhs.clone()).abs().to_f64_lossy();
        t.push(vec![m.to_string(), lhs.render(), rhs.render(), fact.render(), num(residual)]);
        rows.push(json!({
            "m": m,
            "from_distribution": scalar_json(&lhs),
            "from_catalog": scalar_json(&rhs),
            "factorial_moment": scalar_json(&fact),
            "residual": residual,
        }));
    }
    Ok(Output::table(json!({ "k": k, "moments": rows }), t))
}

fn empirical(w: &StepGraphon<f64>, k: usize, trials: u64, seed: u64) -> Result<Output, CliError> {
    let emp = empirical_xk(w, k, trials, seed)?;
    let exact = exact_xk(w, k).ok();
    let dist = emp.distribution();
    let mut t = Table::new(&["m", "count", "empirical", "exact"]);
    for (m, (c, p)) in emp.counts.iter().zip(&dist.probs).enumerate() {
        let e = exact.as_ref().map(|d| num(d.probs[m])).unwrap_or_default();
        t.push(vec![m.to_string(), c.to_string(), num(*p), e]);
    }
    let json = json!({
        "empirical": json_of(&emp),
        "exact": exact.as_ref().map(|d| d.probs.clone()),
        "comparison": exact.as_ref().map(|d| json_of(&emp.compare(d))),
    });
    Ok(Output::table(json, t))
}

fn containers(args: &ContainersArgs, inputs: &Inputs) -> Result<Output, CliError> {
    let (g, sample) = match (&args.graph, &args.graphon) {
        (Some(spec), None) => {
            let text = if inputs.exists(spec) {
                inputs.read(spec)?
            } else if spec.contains(';') {
                spec.clone()
            } else {
                return Err(CliError::Usage(format!("{spec}: no such graph file")));
            };
            (BitGraph::parse(&text)?, None)
        }
        (None, Some(src)) => {
            let w = inputs.graphon(src)?;
            let (n, seed) = (args.n.unwrap_or_default(), args.seed.unwrap_or_default());
            let s = sample_n_graph(&w.to_f64(), n, seed)?;
            (s.graph.clone(), Some((w, s)))
        }
        _ => return Err(CliError::Usage("give either --graph or --graphon with -n and --seed".into())),
    };
    let delta = args.delta;
    let single = |set: graphonlab::VertexSet, source: &str| -> Result<Output, CliError> {
        let cert = certify(&g, &set, delta)?;
        let json = json!({
            "source": source,
            "independent": json_of(&set),
            "contains_independent_set": set.is_subset(&cert.container),
            "certificate_holds": cert.holds(),
            "certificate": json_of(&cert),
        });
        Ok(Output::json(json))
    };
    match args.independent.as_str() {
        "planted" => {
            let (w, s) = sample.as_ref().ok_or_else(|| CliError::Usage("`planted` needs --graphon".into()))?;
            let (alpha, parts) = w.to_f64().independence_ratio();
            if alpha == 0.0 {
                return Err(CliError::Usage("the graphon vanishes on no union of parts; nothing to plant".into()));
            }
            single(s.vertices_in(&parts), "planted")
        }
        "greedy" => single(greedy_independent_set(&g), "greedy"),
        "exhaustive" => {
            let report = exhaustive_containment(&g, delta)?;
            let mut json = json!({ "containment": json_of(&report) });
            if let Some(k) = args.k {
                json["almost_independent_set"] = json_of(&almost_independent_set(&g, k, delta, &IndependentSource::Exhaustive)?);
            }
            Ok(Output::json(json))
        }
        file => {
            let set = parse_vertex_set(&inputs.read(file)?, g.n())?;
            single(set, "file")
        }
    }
}

fn cycle_densities(w: &StepGraphon<f64>, k_max: usize) -> Result<Output, CliError> {
    if k_max < 3 {
        return Err(CliError::Usage(format!("-k must be at least 3, got {k_max}")));
    }
    let mut t = Table::new(&["k", "spectral", "direct", "residual"]);
    let mut rows = Vec::new();
    for k in 3..=k_max {
        let spectral = cycle_density_spectral(w, k)?;
        let direct = if k <= MAX_VERTICES { Some(hom_density(&cycle(k)?, w)?) } else { None };
        let residual = direct.map(|d| (d - spectral).abs());
        t.push(vec![
            k.to_string(),
            num(spectral),
            direct.map(num).unwrap_or_default(),
            residual.map(num).unwrap_or_default(),
        ]);
        rows.push(json!({ "k": k, "spectral": spectral, "direct": direct, "residual": residual }));
    }
    Ok(Output::table(json!({ "cycles": rows }), t))
}

fn witness<S: Scalar>(u: &StepGraphon<S>, w: &StepGraphon<S>, max_n: usize, cliques: Option<usize>) -> Result<Output, CliError> {
    let found = weak_isomorphism_witness(u, w, max_n, None)?;
    let mut json = json!({ "max_vertices": max_n, "exact": S::EXACT, "witness": json_of(&found) });
    if let Some(c) = cliques {
        json["clique_witness"] = json_of(&clique_witness(u, w, c)?);
    }
    let text = match &found {
        Some(wt) => lines(&[
            ("witness", wt.graph.to_text().trim_end().replace('\n', "; ")),
            ("first", wt.first_exact.clone()),
            ("second", wt.second_exact.clone()),
        ]),
        None => format!("no connected graph on at most {max_n} vertices separates the graphons\n"),
    };
    Ok(Output::json(json).with_text(text).with_default_json())
}

fn exact_graphon_json(w: &ExactGraphon) -> Value {
    json!({
        "parts": w.parts().iter().map(Scalar::render).collect::<Vec<_>>(),
        "values": w.values().iter().map(|r| r.iter().map(Scalar::render).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn counterexample(kind: &str) -> Result<Output, CliError> {
    if kind == "cycles" {
        let (a, a2) = construct_cycle_counterexample();
        let mut t = Table::new(&["k", "t_first", "t_second", "equal"]);
        let mut rows = Vec::new();
        for (k, x, y) in cycle_comparison(&a, &a2, 3..=10)? {
            t.push(vec![k.to_string(), x.render(), y.render(), (x == y).to_string()]);
            rows.push(json!({ "k": k, "first": x.render(), "second": y.render(), "equal": x == y }));
        }
        let clique = clique_witness(&a, &a2, 8)?;
        let (sa, sa2) = (weighted_spectrum(&a)?, weighted_spectrum(&a2)?);
        let json = json!({
            "kind": "cycles",
            "first": exact_graphon_json(&a),
            "second": exact_graphon_json(&a2),
            "cycles": rows,
            "spectra": [sa.eigenvalues, sa2.eigenvalues],
            "clique_witness": json_of(&clique),
        });
        return Ok(Output::json(json).with_table(t));
    }
    let d: usize = kind
        .strip_prefix("diameter:")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| CliError::Usage(format!("unknown kind `{kind}`; use cycles or diameter:<d>")))?;
    let (g, h) = diameter_graphs(d)?;
    let (w, w2) = construct_diameter_counterexample(d)?;
    let max_n = (2 * d + 1).min(graphonlab::graph::MAX_CATALOG_VERTICES);
    let mut t = Table::new(&["graph", "t_first", "t_second", "equal"]);
    let mut rows = Vec::new();
    let mut all_equal = true;
    for class in connected_classes(max_n)? {
        let f = class.graph();
        if f.diameter().is_none_or(|x| x > d) {
            continue;
        }
        let (x, y) = (hom_density(f, &w)?, hom_density(f, &w2)?);
        all_equal &= x == y;
        let edges = f.to_text().trim_end().replace('\n', "; ");
        t.push(vec![edges.clone(), x.render(), y.render(), (x == y).to_string()]);
        rows.push(json!({ "graph": json_of(f), "first": x.render(), "second": y.render(), "equal": x == y }));
    }
    let long = path(d + 3)?;
    let induced = match (sample_graph_probability(&long, &w), sample_graph_probability(&long, &w2)) {
        (Ok(p), Ok(p2)) => json!({ "vertices": d + 3, "first": p.render(), "second": p2.render() }),
        (Err(Error::SizeExceeded { .. }), _) | (_, Err(Error::SizeExceeded { .. })) => Value::Null,
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    let json = json!({
        "kind": format!("diameter:{d}"),
        "first_graph": json_of(&g),
        "second_graph": json_of(&h),
        "max_vertices": max_n,
        "small_diameter_densities": rows,
        "all_equal": all_equal,
        "induced_path": induced,
    });
    Ok(Output::json(json).with_table(t))
}

//! Registered experiments. Each one maps an [`ExperimentSpec`] to a list of
//! records; seeds run in parallel and records come back in seed order.

use std::time::Instant;

use anyhow::Result;
use fiid_perc::entropy::{
    dense_bound, expander_density_bound, sit_bound, star_entropy_check, StarSample,
};
use fiid_perc::fiid::{
    apply_factor, majority_label_statistic, sample_labels, wilson_ust, BlockFactor, Configuration,
};
use fiid_perc::graph::{
    complete_bipartite_graph, complete_graph, connected_components, edge_cheeger_exhaustive,
    heawood_graph, hypercube_graph, petersen_graph, spectral_gap, tree_like_vertices, Graph,
    VertexSet,
};
use fiid_perc::rng::{child_seed, stream, Domain};
use fiid_perc::stats::{
    adversarial_subgraph_search, birkhoff_average, delayed_srw, density_report, pc_sweep,
    AnnealSchedule, SweepOptions,
};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::exit::{invalid, no_convergence, Failure};
use crate::record::ResultRecord;
use crate::spec::{ExperimentSpec, GraphSpec, Model};

pub type Runner = fn(&ExperimentSpec) -> Result<Vec<ResultRecord>>;

pub const EXPERIMENTS: &[(&str, Runner, &str)] = &[
    (
        "exp-redblue-pc",
        redblue_pc,
        "retention thresholds of the full graph, red and blue clusters",
    ),
    (
        "exp-sit-frontier",
        sit_frontier,
        "density against conditional degree, with the sparse bound curve",
    ),
    (
        "exp-adversarial",
        adversarial,
        "annealed dense subsets against the sparse bound",
    ),
    (
        "exp-entropy-star",
        entropy_star,
        "star entropy against (d - 1) times root entropy",
    ),
    (
        "exp-dense-threshold",
        dense_threshold,
        "dense bound curve and densities of high-degree factors",
    ),
    (
        "exp-expander-bound",
        expander_bound,
        "subset densities against the expander bound",
    ),
    (
        "exp-wusf-majority",
        wusf_majority,
        "majority disagreement along spanning tree paths",
    ),
    (
        "exp-birkhoff",
        birkhoff,
        "walk stationarity and colour time averages",
    ),
];

pub fn lookup(name: &str) -> Result<Runner, Failure> {
    EXPERIMENTS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, f, _)| *f)
        .ok_or_else(|| {
            let known: Vec<&str> = EXPERIMENTS.iter().map(|(n, _, _)| *n).collect();
            invalid(format!(
                "unknown experiment `{name}` (known: {})",
                known.join(", ")
            ))
        })
}

pub fn run(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    spec.validate()?;
    let runner = lookup(&spec.name)?;
    let mut records = runner(spec)?;
    let hash = spec.hash();
    for r in &mut records {
        r.spec_hash.clone_from(&hash);
        // a statistic list keeps only the named estimates
        if !spec.statistics.is_empty() {
            r.estimates.retain(|k, _| spec.statistics.contains(k));
            r.stderr.retain(|k, _| spec.statistics.contains(k));
        }
    }
    if !spec.statistics.is_empty() && records.iter().all(|r| r.estimates.is_empty()) {
        return Err(invalid(format!(
            "none of the statistics {:?} is produced by {}",
            spec.statistics, spec.name
        ))
        .into());
    }
    Ok(records)
}

/// Runs `f` for every seed in parallel, keeping seed order and stamping
/// each record with the time its seed took.
fn per_seed<F>(spec: &ExperimentSpec, f: F) -> Result<Vec<ResultRecord>>
where
    F: Fn(u64) -> Result<Vec<ResultRecord>> + Sync,
{
    let parts: Vec<Result<Vec<ResultRecord>>> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let start = Instant::now();
            let mut recs = f(seed)?;
            let secs = start.elapsed().as_secs_f64();
            for r in &mut recs {
                r.wall_clock_secs = secs;
            }
            Ok(recs)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn configure(g: &Graph, factor: &BlockFactor, seed: u64) -> Result<Configuration> {
    Ok(apply_factor(g, &sample_labels(g, seed), factor)?)
}

fn mean_and_se(xs: &[f64]) -> (f64, Option<f64>) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (m, None);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, Some((var / xs.len() as f64).sqrt()))
}

fn linspace(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let k = ((hi - lo) / step).round() as usize;
    (0..=k).map(|i| lo + step * i as f64).collect()
}

fn range_param(spec: &ExperimentSpec, key: &str, default: [f64; 2]) -> Result<[f64; 2], Failure> {
    let v = spec.param_list(key, &default)?;
    match v[..] {
        [lo, hi] if lo < hi => Ok([lo, hi]),
        _ => Err(invalid(format!("`{key}` needs two increasing values"))),
    }
}

fn redblue_pc(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let step: f64 = spec.param("step", 0.005)?;
    let options = SweepOptions {
        threshold: spec.param("threshold", 0.05)?,
        min_cluster: spec.param("min_cluster", 1000)?,
    };
    let cases = [
        ("full", 0u8, range_param(spec, "full_range", [0.30, 0.40])?),
        ("red", 1, range_param(spec, "red_range", [0.62, 0.74])?),
        ("blue", 2, range_param(spec, "blue_range", [0.78, 0.90])?),
    ];
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step must be positive").into());
    }
    let factor = BlockFactor::parse("red_blue")?;
    let mut records = per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let c = configure(&g, &factor, seed)?;
        let full = Configuration {
            symbols: vec![1; g.n()],
            factor: BlockFactor::parse("bernoulli_threshold:p=1")?,
            label_seed: seed,
        };
        let mut rec = ResultRecord::new(
            "redblue-pc",
            json!({"threshold": options.threshold, "step": step}),
            Some(seed),
        );
        for (i, (name, sym, [lo, hi])) in cases.iter().enumerate() {
            let (conf, sym) = if *sym == 0 { (&full, 1) } else { (&c, *sym) };
            let grid = linspace(*lo, *hi, step);
            let r = pc_sweep(
                &g,
                conf,
                sym,
                &grid,
                spec.replicas,
                child_seed(seed, i as u64),
                &options,
            )?;
            let pc = r
                .p_c_estimate
                .ok_or_else(|| {
                    no_convergence(format!(
                        "seed {seed}: the {name} curve does not cross {} inside [{lo}, {hi}]; widen `{name}_range`",
                        options.threshold
                    ))
                })?;
            rec = rec
                .estimate(&format!("p_c_{name}"), pc, r.p_c_stderr)
                .exact(&format!("reference_size_{name}"), r.reference_size);
        }
        Ok(vec![rec])
    })?;
    let mut summary = ResultRecord::new("redblue-pc-summary", json!({"seeds": spec.seeds}), None);
    for (name, _, _) in cases {
        let key = format!("p_c_{name}");
        let xs: Vec<f64> = records
            .iter()
            .map(|r| r.estimates[&key].as_f64().unwrap_or(f64::NAN))
            .collect();
        let (m, se) = mean_and_se(&xs);
        summary = summary.estimate(&key, m, se);
    }
    summary.wall_clock_secs = records.iter().map(|r| r.wall_clock_secs).sum();
    records.push(summary);
    Ok(records)
}

const FRONTIER_FACTORS: &[&str] = &[
    "ball_union:r=1,p_seed=0.001",
    "ball_union:r=1,p_seed=0.01",
    "ball_union:r=1,p_seed=0.05",
    "ball_union:r=1,p_seed=0.2",
    "ball_union:r=2,p_seed=0.001",
    "ball_union:r=2,p_seed=0.01",
    "ball_union:r=2,p_seed=0.05",
    "local_min_forest:r=1",
    "local_min_forest:r=2",
    "local_min_forest:r=3",
];

/// `c(d, delta)` when the excess degree is in range, otherwise `None`.
fn sparse_bound_at(d: usize, delta: f64, tol: f64) -> Result<Option<f64>> {
    if !(delta > 0.0 && d >= 3) {
        return Ok(None);
    }
    Ok(Some(sit_bound(d, delta.min(d as f64 - 2.0), tol)?.value))
}

fn sit_frontier(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let d = spec.graph.d;
    let tol: f64 = spec.param("tol", 1e-10)?;
    let points: usize = spec.param("curve_points", 40)?;
    if d < 3 {
        return Err(invalid("the sparse bound needs d >= 3").into());
    }
    let factors = spec.factors_or(FRONTIER_FACTORS);
    let mut records = per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let mut out = Vec::new();
        for f in &factors {
            let c = configure(&g, f, seed)?;
            let r = density_report(&g, &c, 1);
            let delta = r.conditional_avg_degree.map(|a| a - 2.0);
            let bound = match delta {
                Some(x) => sparse_bound_at(d, x, tol)?,
                None => None,
            };
            out.push(
                ResultRecord::new(
                    "frontier-point",
                    json!({"factor": f.to_string()}),
                    Some(seed),
                )
                .estimate("density", r.density, Some(r.density_stderr))
                .estimate(
                    "conditional_avg_degree",
                    r.conditional_avg_degree,
                    r.conditional_avg_degree_stderr,
                )
                .estimate("delta_hat", delta, r.conditional_avg_degree_stderr)
                .exact("c_bound", bound)
                .exact("above_bound", bound.map(|b| r.density >= b)),
            );
        }
        Ok(out)
    })?;
    let top = d as f64 - 2.0;
    let deltas: Vec<f64> = (1..=points)
        .map(|i| top * i as f64 / points as f64)
        .collect();
    let c: Vec<f64> = deltas
        .iter()
        .map(|&x| sit_bound(d, x, tol).map(|p| p.value))
        .collect::<Result<_, _>>()?;
    records.push(
        ResultRecord::new("sit-curve", json!({"d": d, "tol": tol}), None)
            .exact("delta", deltas)
            .exact("c", c),
    );
    Ok(records)
}

fn adversarial(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let d = spec.graph.d;
    let budgets: Vec<f64> = spec.param_list("budgets", &[0.005, 0.01, 0.02, 0.05, 0.1])?;
    let schedule = AnnealSchedule {
        iterations: spec.param("iterations", AnnealSchedule::default().iterations)?,
        restarts: spec.param("restarts", AnnealSchedule::default().restarts)?,
        ..Default::default()
    };
    let tol: f64 = spec.param("tol", 1e-10)?;
    per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let mut out = Vec::new();
        for &eps in &budgets {
            let r = adversarial_subgraph_search(&g, eps, &schedule, seed)?;
            let delta = r.avg_degree - 2.0;
            let bound = sparse_bound_at(d, delta, tol)?;
            out.push(
                ResultRecord::new(
                    "adversarial",
                    json!({"budget": eps, "iterations": schedule.iterations}),
                    Some(seed),
                )
                .exact("vertices", r.vertices.len())
                .exact("internal_edges", r.internal_edges)
                .exact("avg_degree", r.avg_degree)
                .exact("density", r.density)
                .exact("clusters", r.clusters.clusters.len())
                .exact("c_bound", bound)
                .exact("below_bound", bound.map(|b| r.density < b - tol)),
            );
        }
        Ok(out)
    })
}

const STAR_FACTORS: &[&str] = &[
    "bernoulli_threshold:p=0.3",
    "two_colour_threshold:t=0.5",
    "red_blue",
    "ball_union:r=1,p_seed=0.1",
    "ball_union:r=2,p_seed=0.02",
    "local_min_forest:r=1",
    "local_min_forest:r=2",
];

fn entropy_star(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let d = spec.graph.d;
    let factor_weight: f64 = spec.param("threshold_factor", d as f64 - 1.0)?;
    let reps: usize = spec.param("bootstrap", 200)?;
    let factors = spec.factors_or(STAR_FACTORS);
    per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let mut out = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            let c = configure(&g, f, seed)?;
            let keep = tree_like_vertices(&g, f.radius() + 1);
            let s = StarSample::from_configuration(&g, &c, d, |v| keep[v]);
            let r = star_entropy_check(&s, factor_weight, reps, child_seed(seed, i as u64))?;
            out.push(
                ResultRecord::new(
                    "entropy-star",
                    json!({"factor": f.to_string(), "threshold_factor": factor_weight}),
                    Some(seed),
                )
                .exact("stars", r.total)
                .estimate("h_star", r.h_star, Some(r.se_h_star))
                .estimate("h_root", r.h_root, Some(r.se_h_root))
                .estimate("margin", r.margin, Some(r.se_margin))
                .exact("ratio", r.ratio)
                .exact("h_star_unordered", r.h_star_unordered),
            );
        }
        Ok(out)
    })
}

const DENSE_FACTORS: &[&str] = &[
    "local_min_forest:r=1",
    "local_min_forest:r=2",
    "bernoulli_threshold:p=0.95",
    "ball_union:r=1,p_seed=0.3",
];

fn dense_threshold(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let d = spec.graph.d;
    let gamma: f64 = spec.param("gamma", d as f64 - 2.0)?;
    let tol: f64 = spec.param("tol", 1e-10)?;
    let deltas: Vec<f64> =
        spec.param_list("deltas", &[1e-4, 3e-4, 1e-3, 3e-3, 0.01, 0.03, 0.1, 0.2])?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {gamma}")).into());
    }
    let factors = spec.factors_or(DENSE_FACTORS);
    let mut records = per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let mut out = Vec::new();
        for f in &factors {
            let c = configure(&g, f, seed)?;
            let r = density_report(&g, &c, 1);
            let delta = r.conditional_avg_degree.map(|a| 1.0 - a / d as f64);
            let guaranteed = match delta {
                Some(x) if x > 0.0 && x <= 1.0 => Some(1.0 - dense_bound(x, gamma, d, tol)?.value),
                _ => None,
            };
            out.push(
                ResultRecord::new(
                    "dense-point",
                    json!({"factor": f.to_string(), "gamma": gamma}),
                    Some(seed),
                )
                .estimate("density", r.density, Some(r.density_stderr))
                .estimate(
                    "delta_hat",
                    delta,
                    r.conditional_avg_degree_stderr.map(|s| s / d as f64),
                )
                .exact("guaranteed_density", guaranteed),
            );
        }
        Ok(out)
    })?;
    let points: Vec<_> = deltas
        .iter()
        .map(|&x| dense_bound(x, gamma, d, tol))
        .collect::<Result<_, _>>()?;
    records.push(
        ResultRecord::new(
            "dense-curve",
            json!({"d": d, "gamma": gamma, "tol": tol}),
            None,
        )
        .exact("delta", &deltas)
        .exact(
            "eps_star",
            points.iter().map(|p| p.value).collect::<Vec<_>>(),
        )
        .exact(
            "envelope",
            deltas
                .iter()
                .map(|x| 2.0 * d as f64 / gamma * x)
                .collect::<Vec<_>>(),
        )
        .exact(
            "status",
            points.iter().map(|p| p.status).collect::<Vec<_>>(),
        ),
    );
    Ok(records)
}

fn named_graph(name: &str) -> Result<Graph, Failure> {
    Ok(match name {
        "k4" => complete_graph(4),
        "k5" => complete_graph(5),
        "k33" => complete_bipartite_graph(3, 3),
        "petersen" => petersen_graph(),
        "heawood" => heawood_graph(),
        "q4" => hypercube_graph(4),
        other => return Err(invalid(format!("unknown named graph `{other}`"))),
    })
}

/// Worst `density - bound` over the given subsets.
fn expander_slack(
    g: &Graph,
    sets: impl Iterator<Item = VertexSet>,
    h: f64,
) -> Result<(f64, usize)> {
    let d = g
        .regular_degree()
        .ok_or_else(|| invalid("expander bound needs a regular graph"))?;
    let n = g.n() as f64;
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for s in sets {
        let k = s.len();
        let cut = d * k - 2 * g.internal_edges(&s);
        let delta = cut as f64 / (d * k) as f64;
        let slack = k as f64 / n - expander_density_bound(delta, d, h)?;
        worst = worst.min(slack);
        violations += usize::from(slack < -1e-12);
    }
    Ok((worst, violations))
}

fn expander_bound(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let names: Vec<String> = spec.param_list(
        "graphs",
        &["k4", "k5", "k33", "petersen", "heawood", "q4"].map(String::from),
    )?;
    let budgets: Vec<f64> = spec.param_list("budgets", &[0.5, 0.6, 0.75, 0.9])?;
    let iterations: usize = spec.param("iterations", 20_000)?;
    // power iteration on the full experiment graph is too slow, so the
    // random part runs on a smaller graph of the same model and degree
    let random = GraphSpec {
        n: spec.param("random_n", 2000)?,
        ..spec.graph.clone()
    };
    random.validate()?;
    let mut records = Vec::new();
    for name in &names {
        let start = Instant::now();
        let g = named_graph(name)?;
        let n = g.n();
        let spectral = spectral_gap(&g, 1e-14, 1_000_000)?;
        let (h, _) = edge_cheeger_exhaustive(&g)?;
        let all = (1u32..1 << n)
            .map(|m| VertexSet::from_vertices(n, (0..n).filter(|&v| (m >> v) & 1 == 1)));
        let (worst, violations) = expander_slack(&g, all, h)?;
        let mut r = ResultRecord::new(
            "expander-bound",
            json!({"graph": name, "search": "exhaustive"}),
            None,
        )
        .exact("n", n)
        .exact("lambda2", spectral.lambda2)
        .exact("cheeger_spectral", spectral.cheeger_lower_bound)
        .exact("cheeger_exact", h)
        .exact("min_slack", worst)
        .exact("violations", violations);
        r.wall_clock_secs = start.elapsed().as_secs_f64();
        records.push(r);
    }
    let schedule = AnnealSchedule {
        iterations,
        ..Default::default()
    };
    records.extend(per_seed(spec, |seed| {
        let g = random.build(seed)?;
        let spectral = spectral_gap(&g, 1e-10, 100_000)?;
        let h = spectral.cheeger_lower_bound;
        let sets: Vec<VertexSet> = budgets
            .iter()
            .map(|&b| {
                adversarial_subgraph_search(&g, b, &schedule, seed)
                    .map(|r| VertexSet::from_vertices(g.n(), r.vertices))
            })
            .collect::<Result<_, _>>()?;
        let (worst, violations) = if h > 0.0 {
            expander_slack(&g, sets.into_iter(), h)?
        } else {
            (f64::NAN, 0)
        };
        Ok(vec![ResultRecord::new(
            "expander-bound",
            json!({"graph": "random", "search": "annealing", "budgets": budgets}),
            Some(seed),
        )
        .exact("n", g.n())
        .exact("lambda2", spectral.lambda2)
        .exact("cheeger_spectral", h)
        .exact("min_slack", worst)
        .exact("violations", violations)])
    })?);
    Ok(records)
}

fn wusf_majority(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    if spec.graph.model != Model::Permutation {
        return Err(
            invalid("majority statistics need generator tags: use the permutation model").into(),
        );
    }
    let max_window: usize = spec.param("windows", 20)?;
    let pairs: usize = spec.param("pairs", 3000)?;
    if max_window == 0 || pairs == 0 {
        return Err(invalid("windows and pairs must be positive").into());
    }
    per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let root = 0;
        let tree = wilson_ust(&g, root, seed)?;
        let mut rng = stream(seed, Domain::Sampling, 0);
        let mut disagree = vec![0usize; max_window];
        let mut found = 0;
        let mut tries = 0usize;
        while found < pairs {
            tries += 1;
            if tries > 1000 * pairs {
                return Err(no_convergence(format!(
                    "only {found} vertices deep enough in the tree"
                ))
                .into());
            }
            let v = rng.random_range(0..g.n());
            let Some(p) = tree.parent(&g, v) else {
                continue;
            };
            if tree.depth(&g, p) < 2 * max_window + 1 {
                continue;
            }
            found += 1;
            for w in 1..=max_window {
                let a = majority_label_statistic(&g, &tree, v, root, w)?;
                let b = majority_label_statistic(&g, &tree, p, root, w)?;
                disagree[w - 1] += usize::from(a != b);
            }
        }
        let freq: Vec<f64> = disagree.iter().map(|&c| c as f64 / pairs as f64).collect();
        let se: Vec<f64> = freq
            .iter()
            .map(|f| (f * (1.0 - f) / pairs as f64).sqrt())
            .collect();
        let xs: Vec<f64> = (1..=max_window).map(|w| w as f64).collect();
        let (mx, my) = (
            xs.iter().sum::<f64>() / xs.len() as f64,
            freq.iter().sum::<f64>() / xs.len() as f64,
        );
        let sxy: f64 = xs.iter().zip(&freq).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let mut rec = ResultRecord::new(
            "wusf-majority",
            json!({"windows": max_window, "pairs": pairs}),
            Some(seed),
        )
        .exact("window", (1..=max_window).collect::<Vec<_>>());
        rec.estimates.insert("disagreement".into(), json!(freq));
        rec.stderr.insert("disagreement".into(), json!(se));
        Ok(vec![rec.exact(
            "slope",
            if sxx > 0.0 { sxy / sxx } else { f64::NAN },
        )])
    })
}

fn birkhoff(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    let ts: Vec<f64> = spec.param_list("t", &[0.25, 0.5, 0.75])?;
    let steps: usize = spec.param("steps", 1_000_000)?;
    let walk_len: usize = spec.param("chi2_steps", 100)?;
    let per_vertex: usize = spec.param("chi2_walkers_per_vertex", 10)?;
    let max_cluster: usize = spec.param("chi2_max_cluster", 500)?;
    let factor = spec.factors_or(&["bernoulli_threshold:p=0.6"]).remove(0);
    let open = factor.symbol("open").unwrap_or(1);
    per_seed(spec, |seed| {
        let g = spec.graph.build(seed)?;
        let c = configure(&g, &factor, seed)?;
        let clusters = connected_components(&g, &c.support(open));
        let giant = clusters
            .members
            .iter()
            .max_by_key(|m| m.len())
            .ok_or_else(|| invalid("the factor opens no vertex"))?;
        let mut out = Vec::new();
        for (i, &t) in ts.iter().enumerate() {
            let colouring = configure(
                &g,
                &BlockFactor::new("two_colour_threshold", &[("t", t)])?,
                child_seed(seed, 1 + i as u64),
            )?;
            let w = delayed_srw(
                &g,
                &c,
                open,
                giant[0] as usize,
                steps,
                child_seed(seed, 100 + i as u64),
            )?;
            let b = birkhoff_average(&w, &colouring, 1)?;
            let on_cluster = giant
                .iter()
                .filter(|&&v| colouring.symbols[v as usize] == 1)
                .count() as f64
                / giant.len() as f64;
            out.push(
                ResultRecord::new(
                    "birkhoff",
                    json!({"factor": factor.to_string(), "t": t, "steps": steps}),
                    Some(seed),
                )
                .exact("cluster_size", giant.len())
                .estimate("time_average", b.final_mean, Some(b.stderr))
                .exact("cluster_colour_fraction", on_cluster)
                .exact("holding_fraction", w.holding as f64 / steps.max(1) as f64),
            );
        }
        // chi-square test of the walk position from a uniform start, on the
        // largest cluster small enough to give every cell a decent count
        if let Some(cluster) = clusters
            .members
            .iter()
            .filter(|m| m.len() >= 2 && m.len() <= max_cluster)
            .max_by_key(|m| m.len())
        {
            let size = cluster.len();
            let walkers = per_vertex * size;
            let mut rng = stream(seed, Domain::Sampling, 1);
            let mut counts = vec![0usize; size];
            let position: std::collections::HashMap<u32, usize> =
                cluster.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            for j in 0..walkers {
                let start = cluster[rng.random_range(0..size)] as usize;
                let w = delayed_srw(
                    &g,
                    &c,
                    open,
                    start,
                    walk_len,
                    child_seed(seed, 10_000 + j as u64),
                )?;
                counts[position[w.trajectory.last().expect("non-empty")]] += 1;
            }
            let expected = walkers as f64 / size as f64;
            let stat: f64 = counts
                .iter()
                .map(|&o| (o as f64 - expected).powi(2) / expected)
                .sum();
            let p = ChiSquared::new((size - 1) as f64)?.sf(stat);
            out.push(
                ResultRecord::new(
                    "stationarity",
                    json!({"walkers": walkers, "steps": walk_len}),
                    Some(seed),
                )
                .exact("cluster_size", size)
                .exact("chi2", stat)
                .exact("p_value", p),
            );
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(name);
        s.graph.n = 2000;
        s.seeds = vec![1, 2];
        s
    }

    #[test]
    fn every_experiment_is_registered_once() {
        let mut names: Vec<&str> = EXPERIMENTS.iter().map(|(n, _, _)| *n).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 8);
        assert!(lookup("exp-none").is_err());
    }

    #[test]
    fn frontier_is_deterministic_and_ordered() {
        let spec = small("exp-sit-frontier");
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        assert_eq!(a.len(), 2 * FRONTIER_FACTORS.len() + 1);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.estimates, y.estimates);
            assert_eq!(x.seed, y.seed);
        }
        assert_eq!(a[0].seed, Some(1));
        assert_eq!(a.last().unwrap().op, "sit-curve");
    }

    #[test]
    fn statistics_filter_estimates() {
        let mut spec = small("exp-sit-frontier");
        spec.statistics = vec!["density".into()];
        let rs = run(&spec).unwrap();
        let points: Vec<_> = rs.iter().filter(|r| r.op == "frontier-point").collect();
        assert!(points.iter().all(|r| r.estimates.keys().eq(["density"])));
        spec.statistics = vec!["nothing".into()];
        assert!(run(&spec).is_err());
    }

    #[test]
    fn wusf_needs_tags() {
        let spec = small("exp-wusf-majority");
        assert!(run(&spec).is_err());
    }
}

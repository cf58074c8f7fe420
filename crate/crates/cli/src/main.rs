mod exit;
mod experiments;
mod record;
mod spec;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fiid_perc::entropy::{
    dense_feasible, sit_feasible, star_entropy_check, BoundCurve, StarSample,
};
use fiid_perc::fiid::{
    apply_factor, read_configuration, sample_labels, write_configuration, BlockFactor,
    Configuration, Symbol,
};
use fiid_perc::graph::{read_edge_list, tree_like_vertices, write_edge_list, Graph};
use fiid_perc::stats::{cluster_stats, density_report, pc_sweep, SweepOptions};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::exit::{code_for, invalid, Failure};
use crate::record::{ResultRecord, Sink};
use crate::spec::{hex, ExperimentSpec, GraphSpec, Model};

/// Factor-of-IID percolation experiments on random regular graphs.
#[derive(Parser, Debug)]
#[command(name = "fiid-lab", version)]
struct Cli {
    /// Seed for graph, labels and every derived stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Independent replicas where a command supports them.
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a random regular graph and write it as an edge list.
    GenGraph {
        #[arg(long, value_enum, default_value_t = Model::Configuration)]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
    },
    /// Evaluate a block factor on a graph file.
    RunFactor {
        #[arg(long)]
        graph: PathBuf,
        /// `rule_id` or `rule_id:key=val,key=val`.
        #[arg(long)]
        factor: String,
    },
    /// Density, conditional degree and cluster statistics of one symbol.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Symbol name or number; defaults to the factor's first non-zero symbol.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Bernoulli thinning sweep of the clusters of one symbol.
    PcSweep {
        #[arg(long)]
        graph: PathBuf,
        /// Configuration file; every vertex is open when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[arg(long, default_value_t = 1000)]
        min_cluster: usize,
    },
    /// Check one (epsilon, delta) point, or the star inequality of a configuration.
    EntropyCheck {
        #[arg(long, value_enum, default_value_t = ChainArg::Sparse)]
        chain: ChainArg,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Dense chain weight; defaults to d - 2.
        #[arg(long)]
        gamma: Option<f64>,
        /// With `--config`, run the star check on this graph instead.
        #[arg(long, requires = "config")]
        graph: Option<PathBuf>,
        #[arg(long, requires = "graph")]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        bootstrap: usize,
    },
    /// Write the sparse or dense bound curve as CSV.
    BoundCurve {
        #[arg(long, value_enum, default_value_t = ChainArg::Sparse)]
        chain: ChainArg,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Smallest delta; defaults to top / points.
        #[arg(long)]
        from: Option<f64>,
        /// Largest delta; defaults to d - 2 (sparse) or 1 (dense).
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run a registered experiment.
    Experiment {
        /// Experiment name; `list` prints the registry.
        name: String,
        /// Config file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        model: Option<Model>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Factor spec; repeat for several.
        #[arg(long = "factor")]
        factors: Vec<String>,
        #[arg(long = "statistic")]
        statistics: Vec<String>,
        /// Comma-separated seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// `key=value` or `section.key=value`, applied last.
        #[arg(long = "set")]
        overrides: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChainArg {
    Sparse,
    Dense,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            code_for(&e)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(invalid("--threads must be at least 1").into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("starting the thread pool")?;
    }
    let seed = cli.seed.unwrap_or(0);
    let output = cli.output.as_deref();
    match cli.command {
        Command::GenGraph { model, n, d } => {
            let spec = GraphSpec { model, n, d };
            spec.validate()?;
            let g = spec.build(seed)?;
            write_with(output, |w| write_edge_list(&g, w))
        }
        Command::RunFactor { graph, factor } => {
            let g = load_graph(&graph)?;
            let f = BlockFactor::parse(&factor)?;
            let c = apply_factor(&g, &sample_labels(&g, seed), &f)?;
            write_with(output, |w| write_configuration(&c, w))
        }
        Command::Stats {
            graph,
            config,
            symbol,
        } => {
            let start = Instant::now();
            let (g, c) = (load_graph(&graph)?, load_configuration(&config)?);
            check_sizes(&g, &c)?;
            let sym = pick_symbol(&c, symbol.as_deref())?;
            let r = density_report(&g, &c, sym);
            let cl = cluster_stats(&g, &c, sym);
            let params = json!({"graph": graph, "config": config, "factor": c.factor.to_string(), "symbol": sym});
            let rec = command_record("stats", params, Some(c.label_seed))
                .exact("count", r.count)
                .estimate("density", r.density, Some(r.density_stderr))
                .estimate(
                    "conditional_avg_degree",
                    r.conditional_avg_degree,
                    r.conditional_avg_degree_stderr,
                )
                .exact("kappa_hat", r.kappa_hat)
                .exact("clusters", cl.clusters.len())
                .exact("largest_cluster", cl.largest)
                .exact("tree_clusters", cl.tree_clusters)
                .exact("size_histogram", &cl.size_histogram);
            emit(output, vec![rec], start)
        }
        Command::PcSweep {
            graph,
            config,
            symbol,
            from,
            to,
            step,
            threshold,
            min_cluster,
        } => {
            let start = Instant::now();
            let g = load_graph(&graph)?;
            let c = match &config {
                Some(p) => load_configuration(p)?,
                None => Configuration {
                    symbols: vec![1; g.n()],
                    factor: BlockFactor::parse("bernoulli_threshold:p=1")?,
                    label_seed: seed,
                },
            };
            check_sizes(&g, &c)?;
            let sym = pick_symbol(&c, symbol.as_deref())?;
            if !(step > 0.0 && from < to) {
                return Err(invalid("need from < to and a positive step").into());
            }
            let k = ((to - from) / step).round() as usize;
            let grid: Vec<f64> = (0..=k).map(|i| from + step * i as f64).collect();
            let options = SweepOptions {
                threshold,
                min_cluster,
            };
            let replicas = cli.replicas.unwrap_or(1);
            let r = pc_sweep(&g, &c, sym, &grid, replicas, seed, &options)?;
            let params = json!({
                "graph": graph, "config": config, "symbol": sym, "grid": grid,
                "replicas": replicas, "threshold": threshold, "min_cluster": min_cluster,
            });
            let rec = command_record("pc-sweep", params, Some(seed))
                .estimate("p_c", r.p_c_estimate, r.p_c_stderr)
                .exact("reference_size", r.reference_size)
                .exact("monotone", r.monotone);
            let mut rec = rec;
            rec.estimates.insert("giant_fraction".into(), json!(r.mean));
            rec.stderr.insert("giant_fraction".into(), json!(r.stderr));
            emit(output, vec![rec], start)
        }
        Command::EntropyCheck {
            chain,
            epsilon,
            delta,
            d,
            gamma,
            graph,
            config,
            bootstrap,
        } => {
            let start = Instant::now();
            if let (Some(graph), Some(config)) = (graph, config) {
                let (g, c) = (load_graph(&graph)?, load_configuration(&config)?);
                check_sizes(&g, &c)?;
                let d = g
                    .regular_degree()
                    .ok_or_else(|| invalid("the star check needs a regular graph"))?;
                let keep = tree_like_vertices(&g, c.factor.radius() + 1);
                let s = StarSample::from_configuration(&g, &c, d, |v| keep[v]);
                let r = star_entropy_check(&s, d as f64 - 1.0, bootstrap, seed)?;
                let params = json!({"graph": graph, "config": config, "bootstrap": bootstrap});
                let rec = command_record("entropy-star", params, Some(seed))
                    .exact("stars", r.total)
                    .estimate("h_star", r.h_star, Some(r.se_h_star))
                    .estimate("h_root", r.h_root, Some(r.se_h_root))
                    .estimate("margin", r.margin, Some(r.se_margin))
                    .exact("ratio", r.ratio);
                return emit(output, vec![rec], start);
            }
            let (Some(eps), Some(delta)) = (epsilon, delta) else {
                return Err(invalid("give --epsilon and --delta, or --graph and --config").into());
            };
            let r = match chain {
                ChainArg::Sparse => sit_feasible(eps, delta, d)?,
                ChainArg::Dense => dense_feasible(eps, delta, gamma.unwrap_or(d as f64 - 2.0), d)?,
            };
            let rec = command_record(
                "entropy-check",
                json!({"chain": format!("{chain:?}").to_lowercase()}),
                None,
            )
            .exact("epsilon", r.epsilon)
            .exact("delta", r.delta)
            .exact("d", r.d)
            .exact("gamma", r.gamma)
            .exact("lhs", r.lhs)
            .exact("rhs", r.rhs)
            .exact("margin", r.margin)
            .exact("feasible", r.feasible);
            emit(output, vec![rec], start)
        }
        Command::BoundCurve {
            chain,
            d,
            gamma,
            points,
            from,
            to,
            tol,
        } => {
            let top = match chain {
                ChainArg::Sparse => d as f64 - 2.0,
                ChainArg::Dense => 1.0,
            };
            let deltas = delta_grid(from, to.unwrap_or(top), points)?;
            let curve = match chain {
                ChainArg::Sparse => BoundCurve::sparse(d, &deltas, tol)?,
                ChainArg::Dense => {
                    BoundCurve::dense(d, gamma.unwrap_or(d as f64 - 2.0), &deltas, tol)?
                }
            };
            write_with(output, |w| curve.write_csv(w))
        }
        Command::Experiment {
            name,
            config,
            model,
            n,
            d,
            factors,
            statistics,
            seeds,
            overrides,
        } => {
            if name == "list" {
                for (n, _, about) in experiments::EXPERIMENTS {
                    println!("{n:<22} {about}");
                }
                return Ok(());
            }
            let mut spec = match &config {
                Some(p) => ExperimentSpec::load(p)?,
                None => ExperimentSpec::new(&name),
            };
            spec.name = name;
            if let Some(m) = model {
                spec.graph.model = m;
            }
            if let Some(n) = n {
                spec.graph.n = n;
            }
            if let Some(d) = d {
                spec.graph.d = d;
            }
            if !factors.is_empty() {
                spec.factors = factors;
            }
            if !statistics.is_empty() {
                spec.statistics = statistics;
            }
            if let Some(s) = cli.seed {
                spec.seeds = vec![s];
            }
            if !seeds.is_empty() {
                spec.seeds = seeds;
            }
            if let Some(r) = cli.replicas {
                spec.replicas = r;
            }
            if let Some(o) = &cli.output {
                spec.output = Some(o.clone());
            }
            for item in &overrides {
                spec.override_with(item)?;
            }
            let records = experiments::run(&spec)?;
            let mut sink = Sink::open(spec.output.as_deref())?;
            for r in &records {
                sink.write(r)?;
            }
            sink.finish()?;
            Ok(())
        }
    }
}

fn delta_grid(from: Option<f64>, to: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if points == 0 {
        return Err(invalid("--points must be positive"));
    }
    let from = from.unwrap_or(to / points as f64);
    if !(from > 0.0 && from <= to) {
        return Err(invalid(format!("need 0 < from <= to, got {from} and {to}")));
    }
    if points == 1 {
        return Ok(vec![to]);
    }
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                to
            } else {
                from + (to - from) * i as f64 / (points - 1) as f64
            }
        })
        .collect())
}

fn command_record(op: &str, params: Value, seed: Option<u64>) -> ResultRecord {
    let mut r = ResultRecord::new(op, params, seed);
    let key = json!({"op": op, "params": r.params, "seed": seed});
    r.spec_hash = hex(&Sha256::digest(key.to_string().as_bytes()));
    r
}

fn emit(output: Option<&Path>, mut records: Vec<ResultRecord>, start: Instant) -> Result<()> {
    let secs = start.elapsed().as_secs_f64();
    let mut sink = Sink::open(output)?;
    for r in &mut records {
        r.wall_clock_secs = secs;
        sink.write(r)?;
    }
    sink.finish()?;
    Ok(())
}

fn write_with(
    output: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<()> {
    match output {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| Failure::io(p, e))?;
        }
        None => {
            let mut w = io::stdout().lock();
            f(&mut w)
                .and_then(|()| w.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::io(path, e))
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_edge_list(open(path)?).with_context(|| format!("reading graph {}", path.display()))
}

fn load_configuration(path: &Path) -> Result<Configuration> {
    read_configuration(open(path)?)
        .with_context(|| format!("reading configuration {}", path.display()))
}

fn check_sizes(g: &Graph, c: &Configuration) -> Result<(), Failure> {
    if g.n() != c.len() {
        return Err(invalid(format!(
            "graph has {} vertices, configuration has {}",
            g.n(),
            c.len()
        )));
    }
    Ok(())
}

fn pick_symbol(c: &Configuration, name: Option<&str>) -> Result<Symbol> {
    match name {
        None => Ok(1),
        Some(s) => match s.parse::<Symbol>() {
            Ok(k) if (k as usize) < c.factor.alphabet().len() => Ok(k),
            Ok(k) => Err(invalid(format!(
                "symbol {k} is outside the alphabet {:?}",
                c.factor.alphabet()
            ))
            .into()),
            Err(_) => Ok(c.factor.symbol(s)?),
        },
    }
}

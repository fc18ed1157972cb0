//! `graph-dpp` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graph_dpp::bench::{
    run_benchmark_with, write_csv, write_json, BenchConfig, BenchContext, CutoffSource,
    GraphSource, Method,
};
use graph_dpp::dpp::{SampleRecord, SampleSet};
use graph_dpp::graph::{load_graph, write_edge_list, GraphFormat, SbmConfig};
use graph_dpp::reconstruction::{measure, reconstruct};
use graph_dpp::seeds;
use graph_dpp::signal::{generate_bandlimited_signal, BandlimitedSignal};
use graph_dpp::spectral::{partial_eigendecomposition, EigenOptions};
use graph_dpp::{Error, Execution};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "graph-dpp",
    version,
    about = "m-DPP node sampling and bandlimited reconstruction on graphs"
)]
struct Cli {
    /// Run everything on the current thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an SBM graph and write it as an edge list.
    GenGraph(GenGraphArgs),
    /// Generate a unit-norm bandlimited signal on a graph.
    GenSignal(GenSignalArgs),
    /// Draw one sample set with a given method.
    Sample(SampleArgs),
    /// Measure a signal on a sample set and reconstruct it.
    Reconstruct(ReconstructArgs),
    /// Run a benchmark described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        open_out(self.out.as_deref())
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Args)]
struct GenGraphArgs {
    /// SBM config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    communities: Option<usize>,
    /// Inter/intra ratio as a fraction of the detectability threshold.
    #[arg(long)]
    epsilon_ratio: Option<f64>,
    #[arg(long)]
    average_degree: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphBand {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Band size.
    #[arg(long, default_value_t = 10)]
    k: usize,
}

#[derive(Args)]
struct GenSignalArgs {
    #[command(flatten)]
    graph: GraphBand,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphBand,
    #[arg(long)]
    m: usize,
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Chebyshev degree for the estimated filters.
    #[arg(long, default_value_t = 50)]
    r: usize,
    #[arg(long)]
    n_probes: Option<usize>,
    /// Cut the filter midway between λ_k and λ_{k+1} instead of estimating it.
    #[arg(long)]
    exact_cutoff: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    graph: GraphBand,
    /// Signal JSON as written by `gen-signal`.
    #[arg(long)]
    signal: PathBuf,
    /// Sample JSON as written by `sample`, or a plain array of nodes.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    noise_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
        format!(
            "unknown method `{s}` (expected one of {})",
            names.join(", ")
        )
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(io::BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}

fn write_value<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn gen_graph(args: GenGraphArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => read_json::<SbmConfig>(p)?,
        None => {
            let (Some(n), Some(q)) = (args.nodes, args.communities) else {
                bail!("either --config or both --nodes and --communities are required");
            };
            SbmConfig::new(n, q, 0.25, 0)
        }
    };
    if let Some(n) = args.nodes {
        cfg.n_nodes = n;
    }
    if let Some(q) = args.communities {
        cfg.n_communities = q;
    }
    if let Some(e) = args.epsilon_ratio {
        cfg.epsilon_ratio = e;
    }
    if let Some(c) = args.average_degree {
        cfg.average_degree = c;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let graph = cfg.generate()?;
    log::info!(
        "generated {} nodes, {} edges",
        graph.n_nodes(),
        graph.n_edges()
    );
    let mut out = open_out(args.out.as_deref())?;
    write_edge_list(&graph, &mut out)?;
    out.flush()?;
    Ok(())
}

fn gen_signal(args: GenSignalArgs) -> Result<()> {
    let graph = load_graph(&args.graph.graph, GraphFormat::EdgeList)?;
    let basis =
        partial_eigendecomposition(&graph.laplacian(), args.graph.k, &EigenOptions::default())?;
    let signal = generate_bandlimited_signal(&basis, &mut seeds::stream(args.seed, &[]))?;
    let mut out = open_out(args.out.as_deref())?;
    write_value(&signal, &mut out)?;
    out.flush()?;
    Ok(())
}

fn sample(args: SampleArgs, exec: Execution) -> Result<()> {
    let mut cfg = BenchConfig::new(
        GraphSource::EdgeList(args.graph.graph.clone()),
        vec![args.m],
    );
    cfg.k = args.graph.k;
    cfg.r = args.r;
    cfg.n_probes = args.n_probes;
    cfg.seed = args.seed;
    cfg.n_signals = 1;
    cfg.methods = vec![args.method];
    cfg.cutoff = if args.exact_cutoff {
        CutoffSource::Exact
    } else {
        CutoffSource::Estimated
    };
    let ctx = BenchContext::prepare(&cfg, exec)?;
    let nodes = ctx.draw(&cfg, args.method, args.m, exec)?;
    let record = SampleRecord {
        method: args.method.name().to_string(),
        seed: args.seed,
        nodes,
    };
    let mut out = args.output.writer()?;
    match args.output.format {
        Format::Json => write_value(&record, &mut out)?,
        Format::Csv => {
            writeln!(out, "node")?;
            for s in record.nodes.nodes() {
                writeln!(out, "{s}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn read_samples(path: &Path, n: usize) -> Result<SampleSet> {
    let value: serde_json::Value = read_json(path)?;
    let nodes = match value.get("nodes") {
        Some(v) => v.clone(),
        None => value,
    };
    let nodes: Vec<usize> = serde_json::from_value(nodes)
        .with_context(|| format!("no node list in {}", path.display()))?;
    Ok(SampleSet::new(nodes, n)?)
}

#[derive(Serialize)]
struct ReconstructionReport {
    m: usize,
    noise_std: f64,
    failed: bool,
    error: Option<f64>,
}

fn reconstruct_cmd(args: ReconstructArgs) -> Result<()> {
    let graph = load_graph(&args.graph.graph, GraphFormat::EdgeList)?;
    let n = graph.n_nodes();
    let signal: BandlimitedSignal = read_json(&args.signal)?;
    if signal.values.len() != n {
        bail!(
            "signal has {} values but the graph has {n} nodes",
            signal.values.len()
        );
    }
    let samples = read_samples(&args.samples, n)?;
    let basis =
        partial_eigendecomposition(&graph.laplacian(), args.graph.k, &EigenOptions::default())?;
    let meas = measure(
        &signal.values,
        &samples,
        args.noise_std,
        &mut seeds::stream(args.seed, &[]),
    )?;
    let error = match reconstruct(&meas, &basis) {
        Ok(rec) => Some(
            rec.iter()
                .zip(&signal.values)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt(),
        ),
        Err(Error::RankDeficient { smallest, largest }) => {
            log::warn!("sample set is rank deficient (σ ∈ [{smallest:e}, {largest:e}])");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let report = ReconstructionReport {
        m: samples.len(),
        noise_std: args.noise_std,
        failed: error.is_none(),
        error,
    };
    let mut out = args.output.writer()?;
    match args.output.format {
        Format::Json => write_value(&report, &mut out)?,
        Format::Csv => {
            writeln!(out, "m,noise_std,failed,error")?;
            let err = report
                .error
                .map_or_else(|| "inf".to_string(), |e| format!("{e:e}"));
            writeln!(
                out,
                "{},{},{},{err}",
                report.m, report.noise_std, report.failed
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn bench(args: BenchArgs, exec: Execution) -> Result<()> {
    let mut cfg: BenchConfig = read_json(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let res = run_benchmark_with(&cfg, exec)?;
    let mut out = args.output.writer()?;
    match args.output.format {
        Format::Json => write_json(&res, &mut out)?,
        Format::Csv => write_csv(&res, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::init();
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::GenSignal(a) => gen_signal(a),
        Command::Sample(a) => sample(a, exec),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Bench(a) => bench(a, exec),
    }
}

//! Command-line front end. Exit codes: 0 success, 1 invalid input (or an
//! unsatisfied `check`), 2 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{run_reference, ExperimentKind};
use crate::io::{
    commit, extract_subgraph, parse_edge_list, read_partition, read_sampling, read_signal, stage,
    write_edge_list, write_partition, write_sampling, write_signal, EdgeList, NodeIds,
    ParseOptions,
};
use crate::rng::RngSeed;
use crate::sampling::{
    check_nullspace_condition, random_walk_sampling, uniform_sampling, WalkConfig,
};
use crate::slp::{nmse, slp_recover, SlpConfig};
use crate::synth::{generate_appm, generate_connected_appm, random_clustered_signal, AppmSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Resampling attempts for `generate-appm --require-connected`.
pub const CONNECTED_ATTEMPTS: usize = 1000;

#[derive(Debug, Parser)]
#[command(
    name = "rwslp",
    version,
    about = "Random-walk sampling and TV recovery of graph signals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Walk,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExperimentName {
    Table1,
    Table2,
    Clusterstats,
}

impl From<ExperimentName> for ExperimentKind {
    fn from(e: ExperimentName) -> Self {
        match e {
            ExperimentName::Table1 => ExperimentKind::Table1,
            ExperimentName::Table2 => ExperimentKind::Table2,
            ExperimentName::Clusterstats => ExperimentKind::ClusterStats,
        }
    }
}

#[derive(Debug, clap::Args)]
struct GraphInput {
    /// Edge list (SNAP format)
    #[arg(long)]
    graph: PathBuf,
    /// Drop nodes without any edge when reading the graph
    #[arg(long)]
    drop_isolated: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw an APPM graph with a clustered U(0,1) signal
    GenerateAppm {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_graph: PathBuf,
        #[arg(long)]
        out_partition: PathBuf,
        #[arg(long)]
        out_signal: PathBuf,
        /// Redraw (up to 1000 times) until the graph is connected
        #[arg(long)]
        require_connected: bool,
    },
    /// Select a sampling set
    Sample {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long, value_enum, default_value = "walk")]
        method: Method,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 10)]
        walk_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the boundary-edge sampling condition; exit 0 iff satisfied
    Check {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        samples: PathBuf,
    },
    /// Recover a signal from its values on a sampling set
    Recover {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        samples: PathBuf,
        /// Signal file; sampled values are read from it and NMSE is reported
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = SlpConfig::DEFAULT_MAX_ITERATIONS)]
        max_iter: usize,
        #[arg(long, default_value_t = SlpConfig::DEFAULT_REL_CHANGE_TOL)]
        tol: f64,
        /// Relative duality-gap bound required before stopping
        #[arg(long, default_value_t = SlpConfig::DEFAULT_GAP_TOL)]
        gap_tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte-Carlo experiment and write per-trial and summary CSVs
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        #[arg(long, default_value_t = crate::experiments::DEFAULT_RUNS)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Extract the neighborhood of one random walk
    ExtractSubgraph {
        #[command(flatten)]
        input: GraphInput,
        #[arg(long)]
        walk_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Signal over the full graph to restrict to the subgraph
        #[arg(long, requires = "out_signal")]
        signal: Option<PathBuf>,
        #[arg(long, requires = "signal")]
        out_signal: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_runtime() {
                EXIT_RUNTIME
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidParameter(format!("cannot open {}: {e}", path.display())))
}

fn load_graph(input: &GraphInput) -> Result<EdgeList> {
    let el = parse_edge_list(
        open(&input.graph)?,
        ParseOptions {
            drop_isolated: input.drop_isolated,
        },
    )?;
    if el.self_loops_dropped > 0 {
        eprintln!(
            "warning: {} self-loop line(s) ignored in {}",
            el.self_loops_dropped,
            input.graph.display()
        );
    }
    Ok(el)
}

fn execute(cmd: Command) -> Result<i32> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cmd {
        Command::GenerateAppm {
            sizes,
            p,
            q,
            seed,
            out_graph,
            out_partition,
            out_signal,
            require_connected,
        } => {
            let spec = AppmSpec::new(sizes, p, q)?;
            let mut rng = RngSeed::new(seed).rng();
            let (g, part) = if require_connected {
                generate_connected_appm(&spec, &mut rng, CONNECTED_ATTEMPTS)?
            } else {
                generate_appm(&spec, &mut rng)
            };
            let x = random_clustered_signal(&part, &mut rng);
            let ids = NodeIds::identity(g.node_count());
            commit(vec![
                stage(&out_graph, |w| write_edge_list(&g, &ids, w))?,
                stage(&out_partition, |w| write_partition(&part, &ids, w))?,
                stage(&out_signal, |w| write_signal(&x, &ids, w))?,
            ])?;
            writeln!(
                out,
                "nodes: {} edges: {} connected: {}",
                g.node_count(),
                g.edge_count(),
                g.is_connected()
            )?;
        }
        Command::Sample {
            input,
            method,
            budget,
            walk_length,
            seed,
            out: path,
        } => {
            let el = load_graph(&input)?;
            let mut rng = RngSeed::new(seed).rng();
            let m = match method {
                Method::Walk => random_walk_sampling(
                    &el.graph,
                    WalkConfig::new(walk_length, budget)?,
                    &mut rng,
                )?,
                Method::Uniform => uniform_sampling(&el.graph, budget, &mut rng)?,
            };
            commit(vec![stage(&path, |w| write_sampling(&m, &el.ids, w))?])?;
            writeln!(
                out,
                "sampled {} of {} nodes",
                m.len(),
                el.graph.node_count()
            )?;
        }
        Command::Check {
            input,
            partition,
            samples,
        } => {
            let el = load_graph(&input)?;
            let part = read_partition(open(&partition)?, &el.ids)?;
            let m = read_sampling(open(&samples)?, &el.graph, &el.ids)?;
            let report = check_nullspace_condition(&el.graph, &part, &m)?;
            let boundary = el.graph.boundary_edges(&part)?.len();
            writeln!(out, "boundary edges: {boundary}")?;
            writeln!(out, "satisfied: {}", report.satisfied)?;
            for v in &report.violations {
                let (t, h) = el.graph.edge(v.edge);
                writeln!(
                    out,
                    "violation: edge {}-{} node {} cluster {} sampled same-cluster neighbors {}{}",
                    el.ids.external(t),
                    el.ids.external(h),
                    el.ids.external(v.node),
                    v.cluster,
                    v.achieved,
                    if v.structural { " (structural)" } else { "" }
                )?;
            }
            return Ok(if report.satisfied {
                EXIT_OK
            } else {
                EXIT_INVALID
            });
        }
        Command::Recover {
            input,
            samples,
            signal,
            max_iter,
            tol,
            gap_tol,
            out: path,
        } => {
            let el = load_graph(&input)?;
            let m = read_sampling(open(&samples)?, &el.graph, &el.ids)?;
            let truth = read_signal(open(&signal)?, &el.ids)?;
            let cfg = SlpConfig::new(max_iter, tol)?.with_gap_tol(gap_tol)?;
            let values: Vec<f64> = m.nodes().iter().map(|&i| truth[i]).collect();
            let result = slp_recover(&el.graph, &m, &values, &cfg)?;
            commit(vec![stage(&path, |w| {
                write_signal(&result.recovered, &el.ids, w)
            })?])?;
            writeln!(out, "iterations: {}", result.iterations_run)?;
            match nmse(&result.recovered, &truth) {
                Ok(e) => writeln!(out, "nmse: {e}")?,
                Err(Error::ZeroSignal) => writeln!(out, "nmse: undefined (zero signal)")?,
                Err(e) => return Err(e),
            }
        }
        Command::Experiment {
            name,
            runs,
            seed,
            out_dir,
        } => {
            let kind = ExperimentKind::from(name);
            let exp = run_reference(kind, runs, seed)?;
            let trials = out_dir.join(format!("{}_trials.csv", kind.name()));
            let summary = out_dir.join(format!("{}_summary.csv", kind.name()));
            commit(vec![
                stage(&trials, |w| Ok(exp.write_trials_csv(w)?))?,
                stage(&summary, |w| Ok(exp.write_summary_csv(w)?))?,
            ])?;
            writeln!(
                out,
                "{:>12} {:>6} {:>9} {:>10} {:>10}",
                kind.parameter_name(),
                "runs",
                "failures",
                "mean_nmse",
                "std_nmse"
            )?;
            for s in exp.summaries() {
                writeln!(
                    out,
                    "{:>12} {:>6} {:>9} {:>10.4} {:>10.4}",
                    s.parameter, s.runs, s.failures, s.mean_nmse, s.std_nmse
                )?;
            }
        }
        Command::ExtractSubgraph {
            input,
            walk_length,
            seed,
            out: path,
            signal,
            out_signal,
        } => {
            let el = load_graph(&input)?;
            let full_signal = signal
                .as_deref()
                .map(|p| read_signal(open(p)?, &el.ids))
                .transpose()?;
            let mut rng = RngSeed::new(seed).rng();
            let (sub, kept) = extract_subgraph(&el.graph, walk_length, &mut rng)?;
            let sub_ids = el.ids.restrict(&kept);
            let mut staged = vec![stage(&path, |w| write_edge_list(&sub, &sub_ids, w))?];
            if let (Some(x), Some(p)) = (full_signal, out_signal) {
                let restricted =
                    crate::graph::GraphSignal::new(kept.iter().map(|&k| x[k]).collect())?;
                staged.push(stage(&p, |w| write_signal(&restricted, &sub_ids, w))?);
            }
            commit(staged)?;
            writeln!(
                out,
                "nodes: {} edges: {}",
                sub.node_count(),
                sub.edge_count()
            )?;
        }
    }
    Ok(EXIT_OK)
}

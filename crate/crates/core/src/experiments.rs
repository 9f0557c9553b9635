//! Monte-Carlo harness: APPM draw, clustered signal, random-walk sampling,
//! SLP recovery and NMSE, repeated over independent trials.
//!
//! Trial `k` draws everything from stream `k` of the master seed, in the
//! fixed order graph, signal, sampling set. Sweeps over the budget or the
//! walk length therefore reuse the same graph and signal for a given trial
//! index. Trials run on the rayon pool and are collected by index, so output
//! does not depend on scheduling.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::sampling::{random_walk_sampling, WalkConfig};
use crate::slp::{nmse, slp_recover, SlpConfig};
use crate::synth::{generate_appm, random_clustered_signal, AppmSpec};

pub const TABLE1_BUDGETS: [usize; 5] = [10, 20, 30, 40, 50];
pub const TABLE1_WALK_LENGTH: usize = 10;
pub const TABLE2_LENGTHS: [usize; 5] = [20, 40, 80, 160, 320];
pub const TABLE2_BUDGET: usize = 10;
pub const CLUSTER_STATS_BUDGET: usize = 50;
pub const CLUSTER_STATS_WALK_LENGTH: usize = 10;
pub const DEFAULT_RUNS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub appm: AppmSpec,
    pub walk: WalkConfig,
    pub slp: SlpConfig,
    pub runs: usize,
    pub master_seed: u64,
}

impl TrialSpec {
    pub fn new(
        appm: AppmSpec,
        walk: WalkConfig,
        slp: SlpConfig,
        runs: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let spec = TrialSpec {
            appm,
            walk,
            slp,
            runs,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Reference APPM (sizes 10/20/30/40, p = 0.3, q = 0.05) with `L = 10`,
    /// `M = 10` and default solver settings.
    pub fn reference(runs: usize, master_seed: u64) -> Result<Self> {
        TrialSpec::new(
            AppmSpec::reference(),
            WalkConfig::new(TABLE1_WALK_LENGTH, TABLE2_BUDGET)?,
            SlpConfig::default(),
            runs,
            master_seed,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        WalkConfig::new(self.walk.length, self.walk.budget)?;
        if self.walk.budget > self.appm.node_count() {
            return Err(Error::InvalidParameter(format!(
                "budget {} exceeds node count {}",
                self.walk.budget,
                self.appm.node_count()
            )));
        }
        SlpConfig::new(self.slp.max_iterations, self.slp.rel_change_tol)?
            .with_gap_tol(self.slp.gap_tol)?;
        Ok(())
    }

    fn with_walk(&self, length: usize, budget: usize) -> Result<Self> {
        let mut spec = self.clone();
        spec.walk = WalkConfig::new(length, budget)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub nmse: f64,
    pub sample_counts: Vec<usize>,
    pub cut_sizes: Vec<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// Failure message for trials that errored (e.g. unreachable budget).
    pub outcome: std::result::Result<TrialOutcome, String>,
}

/// One full pipeline execution on stream `trial_index` of the master seed.
pub fn run_trial(spec: &TrialSpec, trial_index: u64) -> Result<TrialOutcome> {
    let mut rng = RngSeed::new(spec.master_seed)
        .with_stream(trial_index)
        .rng();
    let (g, part) = generate_appm(&spec.appm, &mut rng);
    let truth = random_clustered_signal(&part, &mut rng);
    let m = random_walk_sampling(&g, spec.walk, &mut rng)?;
    let samples: Vec<f64> = m.nodes().iter().map(|&i| truth[i]).collect();
    let result = slp_recover(&g, &m, &samples, &spec.slp)?;
    Ok(TrialOutcome {
        nmse: nmse(&result.recovered, &truth)?,
        sample_counts: part.count_per_cluster(m.nodes()),
        cut_sizes: g.cut_sizes(&part)?,
        iterations: result.iterations_run,
    })
}

/// Runs trials `0..spec.runs` in parallel, ordered by trial index.
pub fn run_trials(spec: &TrialSpec) -> Vec<TrialRecord> {
    (0..spec.runs as u64)
        .into_par_iter()
        .map(|k| TrialRecord {
            trial_index: k,
            outcome: run_trial(spec, k).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Mean/STD aggregation over the successful trials of one sweep point.
/// Standard deviations use divisor `n` (population STD).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub parameter: usize,
    pub runs: usize,
    pub failures: usize,
    pub mean_nmse: f64,
    pub std_nmse: f64,
    pub per_cluster_mean_samples: Vec<f64>,
    pub per_cluster_mean_cut: Vec<f64>,
    pub per_cluster_std_cut: Vec<f64>,
}

/// Sum of the values in ascending order; independent of input order.
fn sorted_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.into_iter().sum()
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = sorted_sum(values.to_vec()) / n;
    let var = sorted_sum(values.iter().map(|v| (v - mean) * (v - mean)).collect()) / n;
    (mean, var.sqrt())
}

pub fn summarize(parameter: usize, records: &[TrialRecord]) -> TrialSummary {
    let ok: Vec<&TrialOutcome> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let clusters = ok.first().map_or(0, |o| o.sample_counts.len());
    let (mean_nmse, std_nmse) = mean_and_std(&ok.iter().map(|o| o.nmse).collect::<Vec<_>>());
    let mut per_cluster_mean_samples = Vec::with_capacity(clusters);
    let mut per_cluster_mean_cut = Vec::with_capacity(clusters);
    let mut per_cluster_std_cut = Vec::with_capacity(clusters);
    for c in 0..clusters {
        let samples: Vec<f64> = ok.iter().map(|o| o.sample_counts[c] as f64).collect();
        let cuts: Vec<f64> = ok.iter().map(|o| o.cut_sizes[c] as f64).collect();
        per_cluster_mean_samples.push(mean_and_std(&samples).0);
        let (m, s) = mean_and_std(&cuts);
        per_cluster_mean_cut.push(m);
        per_cluster_std_cut.push(s);
    }
    TrialSummary {
        parameter,
        runs: records.len(),
        failures: records.len() - ok.len(),
        mean_nmse,
        std_nmse,
        per_cluster_mean_samples,
        per_cluster_mean_cut,
        per_cluster_std_cut,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Sweep over the sampling budget `M`.
    Table1,
    /// Sweep over the walk length `L`.
    Table2,
    /// Per-cluster sample counts and cut sizes at `M = 50`, `L = 10`.
    ClusterStats,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::Table2 => "table2",
            ExperimentKind::ClusterStats => "clusterstats",
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            ExperimentKind::Table1 | ExperimentKind::ClusterStats => "budget",
            ExperimentKind::Table2 => "walk_length",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub summary: TrialSummary,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub kind: ExperimentKind,
    pub points: Vec<SweepPoint>,
}

impl Experiment {
    pub fn summaries(&self) -> Vec<&TrialSummary> {
        self.points.iter().map(|p| &p.summary).collect()
    }

    pub fn write_trials_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_trials_csv(self.kind.parameter_name(), &self.points, w)
    }

    pub fn write_summary_csv<W: Write>(&self, w: W) -> io::Result<()> {
        write_summary_csv(self.kind.parameter_name(), &self.points, w)
    }
}

fn sweep(spec: &TrialSpec, parameter: usize) -> SweepPoint {
    let trials = run_trials(spec);
    SweepPoint {
        summary: summarize(parameter, &trials),
        trials,
    }
}

/// NMSE for each sampling budget, walk length taken from `base`.
pub fn run_table1(base: &TrialSpec, budgets: &[usize]) -> Result<Experiment> {
    if budgets.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one budget is required".into(),
        ));
    }
    let points = budgets
        .iter()
        .map(|&m| Ok(sweep(&base.with_walk(base.walk.length, m)?, m)))
        .collect::<Result<_>>()?;
    Ok(Experiment {
        kind: ExperimentKind::Table1,
        points,
    })
}

/// NMSE for each walk length at the fixed budget [`TABLE2_BUDGET`].
pub fn run_table2(base: &TrialSpec, lengths: &[usize]) -> Result<Experiment> {
    if lengths.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one walk length is required".into(),
        ));
    }
    let points = lengths
        .iter()
        .map(|&l| Ok(sweep(&base.with_walk(l, TABLE2_BUDGET)?, l)))
        .collect::<Result<_>>()?;
    Ok(Experiment {
        kind: ExperimentKind::Table2,
        points,
    })
}

/// Per-cluster sample counts against cut sizes, using `base` as given.
pub fn run_cluster_stats(base: &TrialSpec) -> Result<Experiment> {
    base.validate()?;
    Ok(Experiment {
        kind: ExperimentKind::ClusterStats,
        points: vec![sweep(base, base.walk.budget)],
    })
}

/// Runs `kind` with its reference settings.
pub fn run_reference(kind: ExperimentKind, runs: usize, master_seed: u64) -> Result<Experiment> {
    let base = TrialSpec::reference(runs, master_seed)?;
    match kind {
        ExperimentKind::Table1 => run_table1(&base, &TABLE1_BUDGETS),
        ExperimentKind::Table2 => run_table2(&base, &TABLE2_LENGTHS),
        ExperimentKind::ClusterStats => {
            run_cluster_stats(&base.with_walk(CLUSTER_STATS_WALK_LENGTH, CLUSTER_STATS_BUDGET)?)
        }
    }
}

/// Pearson correlation coefficient of two equal-length samples.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson: length mismatch");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

fn cluster_columns(prefix: &str, clusters: usize) -> String {
    (0..clusters).map(|c| format!(",{prefix}_c{c}")).collect()
}

fn join_values<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| format!(",{v}")).collect()
}

fn cluster_count(points: &[SweepPoint]) -> usize {
    points
        .iter()
        .flat_map(|p| &p.trials)
        .find_map(|t| t.outcome.as_ref().ok().map(|o| o.sample_counts.len()))
        .unwrap_or(0)
}

/// One row per trial: `parameter,trial_index,status,nmse,iterations,samples_c*,cut_c*`.
/// Failed trials leave the numeric columns empty.
pub fn write_trials_csv<W: Write>(
    parameter_name: &str,
    points: &[SweepPoint],
    mut w: W,
) -> io::Result<()> {
    let k = cluster_count(points);
    writeln!(
        w,
        "{parameter_name},trial_index,status,nmse,iterations{}{}",
        cluster_columns("samples", k),
        cluster_columns("cut", k)
    )?;
    for point in points {
        for t in &point.trials {
            match &t.outcome {
                Ok(o) => writeln!(
                    w,
                    "{},{},ok,{},{}{}{}",
                    point.summary.parameter,
                    t.trial_index,
                    o.nmse,
                    o.iterations,
                    join_values(&o.sample_counts),
                    join_values(&o.cut_sizes)
                )?,
                Err(_) => writeln!(
                    w,
                    "{},{},failed,,{}",
                    point.summary.parameter,
                    t.trial_index,
                    ",".repeat(2 * k)
                )?,
            }
        }
    }
    w.flush()
}

/// One row per sweep point. Values are printed in shortest round-trip form.
pub fn write_summary_csv<W: Write>(
    parameter_name: &str,
    points: &[SweepPoint],
    mut w: W,
) -> io::Result<()> {
    let k = cluster_count(points);
    writeln!(
        w,
        "# std columns are population standard deviations (divisor n) over successful trials"
    )?;
    writeln!(
        w,
        "{parameter_name},runs,failures,mean_nmse,std_nmse{}{}{}",
        cluster_columns("mean_samples", k),
        cluster_columns("mean_cut", k),
        cluster_columns("std_cut", k)
    )?;
    for point in points {
        let s = &point.summary;
        writeln!(
            w,
            "{},{},{},{},{}{}{}{}",
            s.parameter,
            s.runs,
            s.failures,
            s.mean_nmse,
            s.std_nmse,
            join_values(&s.per_cluster_mean_samples),
            join_values(&s.per_cluster_mean_cut),
            join_values(&s.per_cluster_std_cut)
        )?;
    }
    w.flush()
}

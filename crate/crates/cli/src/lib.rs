//! Batch front-end for `attitude-sync`: run scenario files, sweep seeds and
//! draw trajectory figures.

pub mod plot;
pub mod scenario;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use attitude_sync::initial::derive_seeds;
use attitude_sync::simulator::{build_report, Event};
use attitude_sync::{integrate, MonitorReportd, SignMode, TrajectoryRecordd};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use plot::PlotKind;
pub use scenario::{Scenario, ScenarioError, ScenarioFile};
pub use table::{TableError, TrajectoryTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("{}: {source}", path.display())]
    Table { path: PathBuf, source: TableError },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("integration stopped at t = {time}: state is no longer finite")]
    Domain { time: f64 },
}

impl CliError {
    /// 2 for bad input, 3 for failures while running or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(_) | CliError::Table { .. } | CliError::Read { .. } => 2,
            CliError::Write { .. } | CliError::Domain { .. } => 3,
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn warn_if_disconnected(scenario: &Scenario) {
    let components = scenario.config.graph.connected_components();
    if components > 1 {
        eprintln!(
            "warning: graph has {components} connected components; finite-time consensus needs a connected graph"
        );
    }
}

/// Everything written to the report file of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub initial_state: scenario::InitialStateSpec,
    pub dt: f64,
    pub t_max: f64,
    pub mode: SignMode<f64>,
    pub consensus_tolerance: f64,
    pub record_stride: usize,
    pub invariance_bound: f64,
    pub events: Vec<Event<f64>>,
    pub monitors: MonitorReportd,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory_path: PathBuf,
    pub report_path: PathBuf,
    pub record: TrajectoryRecordd,
    pub report: RunReport,
}

pub fn simulate(scenario: &Scenario, name: &str) -> (TrajectoryRecordd, RunReport) {
    let config = &scenario.config;
    let record = integrate(config).expect("scenario was validated");
    let monitors = build_report(&record, config, scenario.invariance_bound);
    let report = RunReport {
        scenario: name.to_string(),
        nodes: config.graph.node_count(),
        edges: scenario.file.graph.edges.clone(),
        initial_state: scenario.file.initial_state.clone(),
        dt: config.dt,
        t_max: config.t_max,
        mode: config.mode,
        consensus_tolerance: config.consensus_tolerance,
        record_stride: config.record_stride,
        invariance_bound: scenario.invariance_bound,
        events: record.events.clone(),
        monitors,
    };
    (record, report)
}

/// Runs one scenario file, writing the trajectory CSV and the JSON report
/// under `out_dir`.
pub fn run(scenario_path: &Path, out_dir: &Path) -> Result<RunOutput, CliError> {
    let scenario = Scenario::load(scenario_path)?;
    warn_if_disconnected(&scenario);
    let name = stem(scenario_path);
    let outputs = &scenario.file.outputs;
    let trajectory_path = out_dir.join(
        outputs
            .trajectory
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{name}.csv"))),
    );
    let report_path = out_dir.join(
        outputs
            .report
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{name}.report.json"))),
    );

    let (record, report) = simulate(&scenario, &name);

    let mut csv = Vec::new();
    TrajectoryTable::from_record(&record)
        .write(&mut csv)
        .map_err(|e| CliError::Write {
            path: trajectory_path.clone(),
            source: std::io::Error::other(e),
        })?;
    write_file(&trajectory_path, &csv)?;
    let mut json = serde_json::to_vec_pretty(&report).expect("report serializes");
    json.push(b'\n');
    write_file(&report_path, &json)?;

    if let Some(time) = report.monitors.domain_error_time {
        return Err(CliError::Domain { time });
    }
    Ok(RunOutput {
        trajectory_path,
        report_path,
        record,
        report,
    })
}

pub fn read_table(path: &Path) -> Result<TrajectoryTable, CliError> {
    let file = fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    TrajectoryTable::read(std::io::BufReader::new(file)).map_err(|source| CliError::Table {
        path: path.to_path_buf(),
        source,
    })
}

/// Renders one figure from a trajectory CSV. Defaults to
/// `<csv stem>.<kind>.svg` next to the input.
pub fn plot(trajectory_path: &Path, kind: PlotKind, out: Option<&Path>) -> Result<PathBuf, CliError> {
    let table = read_table(trajectory_path)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| {
        trajectory_path.with_file_name(format!("{}.{}.svg", stem(trajectory_path), kind.file_suffix()))
    });
    write_file(&out, plot::render(&table, kind).as_bytes())?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub seed: u64,
    pub consensus_time: Option<f64>,
    pub singularity_time: Option<f64>,
    pub domain_error_time: Option<f64>,
    pub final_disagreement: f64,
    pub post_consensus_max_disagreement: Option<f64>,
    pub v2_max_increase_per_step: f64,
    pub invariance_violated: bool,
    pub v1_max_slope_outside_consensus: Option<f64>,
    pub rate_bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub master_seed: u64,
    pub count: usize,
    pub converged: usize,
    pub singular: usize,
    pub invariance_violations: usize,
    pub max_consensus_time: Option<f64>,
    pub runs: Vec<SweepRun>,
}

/// Re-runs a seeded scenario for `count` seeds derived from `master_seed`.
/// Runs execute in parallel; results keep seed order.
pub fn sweep(scenario_path: &Path, count: usize, master_seed: u64) -> Result<SweepSummary, CliError> {
    let base = Scenario::load(scenario_path)?;
    warn_if_disconnected(&base);
    let seeds = derive_seeds(master_seed, count);
    let scenarios = seeds
        .iter()
        .map(|&seed| {
            base.with_seed(seed).unwrap_or_else(|| {
                Err(ScenarioError {
                    field: "initial_state".into(),
                    message: "sweep needs a seeded initial state".into(),
                })
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let name = stem(scenario_path);
    let runs: Vec<SweepRun> = scenarios
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(scenario, &seed)| {
            let (_, report) = simulate(scenario, &name);
            let m = report.monitors;
            SweepRun {
                seed,
                consensus_time: m.consensus_time,
                singularity_time: m.singularity_time,
                domain_error_time: m.domain_error_time,
                final_disagreement: m.final_disagreement,
                post_consensus_max_disagreement: m.post_consensus_max_disagreement,
                v2_max_increase_per_step: m.v2_max_increase_per_step,
                invariance_violated: m.invariance_violated,
                v1_max_slope_outside_consensus: m.v1_max_slope_outside_consensus,
                rate_bound_violations: m.rate_bound_violations,
            }
        })
        .collect();
    Ok(SweepSummary {
        scenario: name,
        master_seed,
        count,
        converged: runs
            .iter()
            .filter(|r| r.consensus_time.is_some() && r.singularity_time.is_none())
            .count(),
        singular: runs.iter().filter(|r| r.singularity_time.is_some()).count(),
        invariance_violations: runs.iter().filter(|r| r.invariance_violated).count(),
        max_consensus_time: runs.iter().filter_map(|r| r.consensus_time).reduce(f64::max),
        runs,
    })
}

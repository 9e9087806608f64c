//! Seeded width sweeps comparing the two planners, with CSV and plot-data
//! output.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{kino_plan, KinoConfig, KinoState};
use crate::error::{Error, Result};
use crate::geometry::{generate_map, GeneratedMap, MapSpec, Point};
use crate::planner::{plan, Algorithm, PlanResult};
use crate::rng::RngSeed;
use crate::stats::{mean_std, median};

pub const DEFAULT_SPIRAL_WIDTHS: [f64; 5] = [0.8, 1.0, 1.2, 1.5, 2.0];
pub const DEFAULT_CORRIDOR_WIDTHS: [f64; 3] = [1.5, 2.0, 3.0];
pub const DEFAULT_SPIRAL_RUNS: usize = 500;
pub const DEFAULT_CORRIDOR_RUNS: usize = 100;
pub const DEFAULT_SPIRAL_BUDGET: usize = 100_000;
pub const DEFAULT_CORRIDOR_BUDGET: usize = 10_000;

pub const ALGORITHMS: [Algorithm; 2] = [Algorithm::Hnr, Algorithm::Rrt];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Position-only planning on the spiral map.
    SpiralSweep,
    /// Double-integrator planning on the two-turn corridor.
    CorridorKinoSweep,
}

impl ExperimentKind {
    pub fn map_for(self, width: f64) -> MapSpec {
        match self {
            ExperimentKind::SpiralSweep => MapSpec::spiral(width),
            ExperimentKind::CorridorKinoSweep => MapSpec::corridor(width),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub widths: Vec<f64>,
    pub runs_per_width: usize,
    pub base_seed: RngSeed,
    /// Transition budget per run.
    pub budget: usize,
    #[serde(default)]
    pub kino_config: KinoConfig,
}

impl ExperimentSpec {
    pub fn spiral(widths: Vec<f64>, runs_per_width: usize, base_seed: RngSeed) -> Self {
        ExperimentSpec {
            experiment: ExperimentKind::SpiralSweep,
            widths,
            runs_per_width,
            base_seed,
            budget: DEFAULT_SPIRAL_BUDGET,
            kino_config: KinoConfig::default(),
        }
    }

    pub fn corridor(widths: Vec<f64>, runs_per_width: usize, base_seed: RngSeed) -> Self {
        ExperimentSpec {
            experiment: ExperimentKind::CorridorKinoSweep,
            widths,
            runs_per_width,
            base_seed,
            budget: DEFAULT_CORRIDOR_BUDGET,
            kino_config: KinoConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() || self.widths.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::usage("widths must be non-empty and positive"));
        }
        if self.widths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("widths must be strictly ascending"));
        }
        if self.runs_per_width == 0 || self.budget == 0 {
            return Err(Error::usage("runs and budget must be at least 1"));
        }
        if self.experiment == ExperimentKind::CorridorKinoSweep {
            self.kino_config.validate()?;
        }
        Ok(())
    }

    /// Seed of run `run` at width index `width` for algorithm index `algo`.
    pub fn seed(&self, run: usize, width: usize, algo: usize) -> RngSeed {
        self.base_seed
            .derive(&[run as u64, width as u64, algo as u64])
    }
}

/// One row of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub map: String,
    pub width: f64,
    pub seed: RngSeed,
    pub success: bool,
    pub transitions: usize,
    pub nodes: usize,
    /// Length of the returned path; empty for failed runs.
    pub path_length: Option<f64>,
    /// Empty unless timing was requested, so tables stay reproducible.
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub width: f64,
    pub runs: usize,
    pub success_rate: f64,
    /// Failed runs enter at the full budget.
    pub mean_transitions: f64,
    pub median_transitions: f64,
    pub std_transitions: f64,
}

impl SummaryRow {
    pub fn stderr(&self) -> f64 {
        self.std_transitions / (self.runs as f64).sqrt()
    }
}

/// Path kept from the first run of each (algorithm, width) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTrace {
    pub algorithm: Algorithm,
    pub width: f64,
    pub path: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub traces: Vec<SampleTrace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    /// Record wall-clock time per run.
    pub timing: bool,
}

struct Job {
    width_idx: usize,
    algo_idx: usize,
    run: usize,
}

fn run_one(
    spec: &ExperimentSpec,
    map: &GeneratedMap,
    algorithm: Algorithm,
    seed: RngSeed,
) -> Result<PlanResult> {
    match spec.experiment {
        ExperimentKind::SpiralSweep => plan(
            algorithm,
            &map.space,
            &map.start,
            &map.goal,
            spec.budget,
            seed,
        ),
        ExperimentKind::CorridorKinoSweep => kino_plan(
            algorithm,
            &map.space,
            &KinoState::at_rest(map.start.clone()),
            &map.goal,
            &spec.kino_config,
            spec.budget,
            seed,
        )
        .map(|r| r.result),
    }
}

/// Runs every (width, algorithm, run) job and aggregates in the fixed
/// order algorithm, width, run, independent of scheduling.
pub fn run_sweep(spec: &ExperimentSpec, opts: SweepOptions) -> Result<SweepOutput> {
    spec.validate()?;
    let maps = spec
        .widths
        .iter()
        .map(|w| generate_map(&spec.experiment.map_for(*w)))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for algo_idx in 0..ALGORITHMS.len() {
        for width_idx in 0..spec.widths.len() {
            for run in 0..spec.runs_per_width {
                jobs.push(Job {
                    width_idx,
                    algo_idx,
                    run,
                });
            }
        }
    }
    let exec = |job: &Job| -> (RunRecord, Option<Vec<Point>>) {
        let algorithm = ALGORITHMS[job.algo_idx];
        let map = &maps[job.width_idx];
        let seed = spec.seed(job.run, job.width_idx, job.algo_idx);
        let mut record = RunRecord {
            algorithm,
            map: spec
                .experiment
                .map_for(spec.widths[job.width_idx])
                .name()
                .to_string(),
            width: spec.widths[job.width_idx],
            seed,
            success: false,
            transitions: spec.budget,
            nodes: 0,
            path_length: None,
            wall_time_ms: None,
        };
        match run_one(spec, map, algorithm, seed) {
            Ok(res) => {
                record.success = res.success;
                record.transitions = res.transitions;
                record.nodes = res.nodes;
                record.path_length = res.success.then(|| res.path_length());
                if opts.timing {
                    record.wall_time_ms = Some(res.wall_time.as_secs_f64() * 1e3);
                }
                (record, (job.run == 0).then_some(res.path))
            }
            Err(_) => (record, None),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Environment(e.to_string()))?;
    let done: Vec<(RunRecord, Option<Vec<Point>>)> =
        pool.install(|| jobs.par_iter().map(exec).collect());

    let mut records = Vec::with_capacity(done.len());
    let mut traces = Vec::new();
    for (rec, path) in done {
        if let Some(path) = path {
            traces.push(SampleTrace {
                algorithm: rec.algorithm,
                width: rec.width,
                path,
            });
        }
        records.push(rec);
    }
    let summary = summarize(&records);
    Ok(SweepOutput {
        records,
        summary,
        traces,
    })
}

/// Per (algorithm, width) statistics, in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Algorithm, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|k| k.0 == r.algorithm && k.1 == r.width) {
            keys.push((r.algorithm, r.width));
        }
    }
    keys.into_iter()
        .map(|(algorithm, width)| {
            let cell: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.algorithm == algorithm && r.width == width)
                .collect();
            let t: Vec<f64> = cell.iter().map(|r| r.transitions as f64).collect();
            let (mean, std) = mean_std(&t);
            SummaryRow {
                algorithm,
                width,
                runs: cell.len(),
                success_rate: cell.iter().filter(|r| r.success).count() as f64 / cell.len() as f64,
                mean_transitions: mean,
                median_transitions: median(&t),
                std_transitions: std,
            }
        })
        .collect()
}

pub fn write_results_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::usage("no results to write"));
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], out: W) -> Result<()> {
    if summary.is_empty() {
        return Err(Error::usage("no summary rows to write"));
    }
    let mut w = csv::Writer::from_writer(out);
    for r in summary {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Sample paths as `algorithm,width,step,x0,x1,...`.
pub fn write_traces_csv<W: Write>(traces: &[SampleTrace], out: W) -> Result<()> {
    let dim = traces
        .iter()
        .find_map(|t| t.path.first().map(Point::dim))
        .ok_or_else(|| Error::usage("no traces to write"))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "algorithm".to_string(),
        "width".to_string(),
        "step".to_string(),
    ];
    header.extend((0..dim).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for t in traces {
        for (i, p) in t.path.iter().enumerate() {
            let mut row = vec![t.algorithm.to_string(), t.width.to_string(), i.to_string()];
            row.extend(p.coords().iter().map(f64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub width: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub algorithm: Algorithm,
    pub points: Vec<PlotPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub series: Vec<PlotSeries>,
}

/// Mean transitions with standard errors, one series per algorithm.
pub fn plot_data(summary: &[SummaryRow]) -> Result<PlotData> {
    if summary.is_empty() {
        return Err(Error::usage("no summary rows to plot"));
    }
    let mut series: Vec<PlotSeries> = Vec::new();
    for row in summary {
        let point = PlotPoint {
            width: row.width,
            mean: row.mean_transitions,
            stderr: row.stderr(),
        };
        match series.iter_mut().find(|s| s.algorithm == row.algorithm) {
            Some(s) => s.points.push(point),
            None => series.push(PlotSeries {
                algorithm: row.algorithm,
                points: vec![point],
            }),
        }
    }
    Ok(PlotData { series })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mini() -> ExperimentSpec {
        let mut spec = ExperimentSpec::corridor(vec![2.0, 3.0], 3, RngSeed(11));
        spec.budget = 2000;
        spec
    }

    #[test]
    fn sweep_shape_and_order() {
        let out = run_sweep(&mini(), SweepOptions::default()).unwrap();
        assert_eq!(out.records.len(), 12);
        assert_eq!(out.summary.len(), 4);
        assert_eq!(out.traces.len(), 4);
        assert_eq!(out.records[0].algorithm, Algorithm::Hnr);
        assert_eq!(out.records[11].algorithm, Algorithm::Rrt);
        assert!(out.records.iter().all(|r| r.wall_time_ms.is_none()));
        let plot = plot_data(&out.summary).unwrap();
        assert_eq!(plot.series.len(), 2);
        assert!(plot.series.iter().all(|s| s.points.len() == 2));
    }

    #[test]
    fn schedule_does_not_change_results() {
        let one = run_sweep(
            &mini(),
            SweepOptions {
                jobs: Some(1),
                timing: false,
            },
        )
        .unwrap();
        let many = run_sweep(
            &mini(),
            SweepOptions {
                jobs: Some(3),
                timing: false,
            },
        )
        .unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn headers() {
        let out = run_sweep(&mini(), SweepOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_results_csv(&out.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "algorithm,map,width,seed,success,transitions,nodes,path_length,wall_time_ms\n"
        ));
        let mut buf = Vec::new();
        write_summary_csv(&out.summary, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "algorithm,width,runs,success_rate,mean_transitions,median_transitions,std_transitions\n"
        ));
    }

    #[test]
    fn empty_tables_are_rejected() {
        assert!(write_results_csv(&[], Vec::new()).is_err());
        assert!(plot_data(&[]).is_err());
    }

    #[test]
    fn bad_specs() {
        let mut spec = mini();
        spec.widths = vec![2.0, 1.0];
        assert!(matches!(spec.validate(), Err(Error::Usage(_))));
        spec.widths = vec![];
        assert!(spec.validate().is_err());
        let mut spec = mini();
        spec.runs_per_width = 0;
        assert!(spec.validate().is_err());
    }
}

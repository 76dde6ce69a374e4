//! Trial orchestration, aggregate metrics, ablations and scaling fits.

mod ablation;
mod planner;
mod scaling;

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::bfs_oracle;
use crate::world::{OccupancyMap, Suite, TrialSpec};

pub use ablation::{ablation_planners, run_ablations, ABLATIONS};
pub use planner::{run_planner, PlannerKind, PlannerSpec, UnknownPlanner, PLANNER_NAMES};
pub use scaling::{fit_loglog, scaling_experiment, scaling_scenario, ScalingFamily, ScalingFit};

pub const CSV_HEADER: [&str; 8] = [
    "trial_id",
    "map_id",
    "planner",
    "success",
    "path_length",
    "search_space",
    "weighted",
    "wall_time_ms",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: usize,
    pub map_id: String,
    pub planner: String,
    pub success: bool,
    /// Partial length on failure, kept for audit.
    pub path_length: u32,
    pub search_space: u32,
    pub weighted: u64,
    pub wall_time_ms: Option<f64>,
    /// Shortest path length (BFS), when the pair is connected.
    pub optimal_length: Option<u32>,
    pub failure: Option<String>,
}

impl TrialResult {
    pub fn new(
        trial_id: usize,
        spec: &TrialSpec,
        planner: &str,
        success: bool,
        path_length: u32,
        search_space: u32,
    ) -> Self {
        Self {
            trial_id,
            map_id: spec.map_id.clone(),
            planner: planner.to_string(),
            success,
            path_length,
            search_space,
            weighted: path_length as u64 * search_space as u64,
            wall_time_ms: None,
            optimal_length: None,
            failure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerSummary {
    pub planner: String,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Means over successful trials only.
    pub mean_path_length: Option<f64>,
    pub mean_search_space: Option<f64>,
    pub mean_weighted: Option<f64>,
    /// Mean length over mean shortest length, on this planner's successes.
    pub path_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBlock {
    pub density: f64,
    pub planners: Vec<PlannerSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub planners: Vec<PlannerSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub by_density: Vec<DensityBlock>,
    /// Free-form reference to the suite(s) the numbers came from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reductions: Vec<Reduction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scaling: Vec<ScalingFit>,
}

impl Report {
    pub fn planner(&self, name: &str) -> Option<&PlannerSummary> {
        self.planners.iter().find(|p| p.planner == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub baseline: String,
    pub subject: String,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("planner {0:?} is not in the report")]
    MissingPlanner(String),
    #[error("baseline {0:?} has zero mean search space")]
    DivisionByZero(String),
    #[error("planner {0:?} has no successful trials")]
    NoSuccesses(String),
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Per-planner aggregates, in order of first appearance.
pub fn aggregate(results: &[TrialResult]) -> Vec<PlannerSummary> {
    let mut names: Vec<&str> = Vec::new();
    for r in results {
        if !names.contains(&r.planner.as_str()) {
            names.push(&r.planner);
        }
    }
    names
        .into_iter()
        .map(|name| {
            let rows: Vec<&TrialResult> = results.iter().filter(|r| r.planner == name).collect();
            let ok: Vec<&&TrialResult> = rows.iter().filter(|r| r.success).collect();
            let with_opt: Vec<&&&TrialResult> =
                ok.iter().filter(|r| r.optimal_length.is_some()).collect();
            let path_ratio = match (
                mean(with_opt.iter().map(|r| r.path_length as f64)),
                mean(with_opt.iter().map(|r| r.optimal_length.unwrap() as f64)),
            ) {
                (Some(l), Some(o)) if o > 0.0 => Some(l / o),
                _ => None,
            };
            PlannerSummary {
                planner: name.to_string(),
                trials: rows.len(),
                successes: ok.len(),
                success_rate: if rows.is_empty() {
                    0.0
                } else {
                    ok.len() as f64 / rows.len() as f64
                },
                mean_path_length: mean(ok.iter().map(|r| r.path_length as f64)),
                mean_search_space: mean(ok.iter().map(|r| r.search_space as f64)),
                mean_weighted: mean(ok.iter().map(|r| r.weighted as f64)),
                path_ratio,
            }
        })
        .collect()
}

/// `100 * (1 - S(subject) / S(baseline))` on mean search space.
pub fn compute_reduction(report: &Report, baseline: &str, subject: &str) -> Result<f64, BenchError> {
    let get = |name: &str| {
        let p = report
            .planner(name)
            .ok_or_else(|| BenchError::MissingPlanner(name.to_string()))?;
        p.mean_search_space
            .ok_or_else(|| BenchError::NoSuccesses(name.to_string()))
    };
    let b = get(baseline)?;
    let s = get(subject)?;
    if b == 0.0 {
        return Err(BenchError::DivisionByZero(baseline.to_string()));
    }
    Ok(100.0 * (1.0 - s / b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    /// Record wall time per trial. Off keeps the CSV byte-reproducible.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { jobs: 1, timing: false }
    }
}

/// Runs every (trial, planner) pair. Results come back in trial order, then
/// planner order, whatever the worker count.
pub fn run_trials(
    maps: &[OccupancyMap],
    trials: &[(usize, TrialSpec)],
    planners: &[PlannerSpec],
    opts: RunOptions,
) -> Vec<TrialResult> {
    let work: Vec<(usize, usize)> = (0..trials.len())
        .flat_map(|t| (0..planners.len()).map(move |p| (t, p)))
        .collect();
    let optimal: Vec<Option<u32>> = trials
        .iter()
        .map(|(m, spec)| bfs_oracle(&maps[*m], spec.start, spec.goal).optimal_cost)
        .collect();
    let job = |&(t, p): &(usize, usize)| {
        let (m, spec) = &trials[t];
        let started = Instant::now();
        let mut r = run_planner(&planners[p], &maps[*m], spec, t);
        if opts.timing {
            r.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
        }
        r.optimal_length = optimal[t];
        r
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    pool.install(|| work.par_iter().map(job).collect())
}

pub fn run_suite(
    suite: &Suite,
    planners: &[PlannerSpec],
    opts: RunOptions,
) -> (Report, Vec<TrialResult>) {
    let results = run_trials(&suite.maps, &suite.trials(), planners, opts);
    let p = &suite.manifest.params;
    let report = Report {
        planners: aggregate(&results),
        by_density: vec![DensityBlock {
            density: p.density,
            planners: aggregate(&results),
        }],
        manifest: Some(format!(
            "{} seed={} {}x{} density={} maps={} pairs={}",
            suite.manifest.format, p.seed, p.rows, p.cols, p.density, p.maps, p.pairs
        )),
        reductions: Vec::new(),
        scaling: Vec::new(),
    };
    (report, results)
}

/// Runs several suites and reports them both pooled and per density.
pub fn run_suites(
    suites: &[Suite],
    planners: &[PlannerSpec],
    opts: RunOptions,
) -> (Report, Vec<TrialResult>) {
    let mut all = Vec::new();
    let mut by_density = Vec::new();
    let mut refs = Vec::new();
    for suite in suites {
        let (report, mut results) = run_suite(suite, planners, opts);
        let offset = all.len() / planners.len().max(1);
        for r in &mut results {
            r.trial_id += offset;
        }
        by_density.extend(report.by_density);
        refs.extend(report.manifest);
        all.extend(results);
    }
    let report = Report {
        planners: aggregate(&all),
        by_density,
        manifest: Some(refs.join("; ")),
        reductions: Vec::new(),
        scaling: Vec::new(),
    };
    (report, all)
}

pub fn write_csv<W: Write>(results: &[TrialResult], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record([
            r.trial_id.to_string(),
            r.map_id.clone(),
            r.planner.clone(),
            r.success.to_string(),
            r.path_length.to_string(),
            r.search_space.to_string(),
            r.weighted.to_string(),
            r.wall_time_ms.map(|t| format!("{t:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(results: &[TrialResult]) -> String {
    let mut buf = Vec::new();
    write_csv(results, &mut buf).expect("in-memory csv");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hex::HexCoord;

    fn row(planner: &str, success: bool, l: u32, s: u32) -> TrialResult {
        let spec = TrialSpec {
            map_id: "m".into(),
            start: HexCoord::new(0, 0),
            goal: HexCoord::new(1, 0),
            pair_index: 0,
        };
        TrialResult::new(0, &spec, planner, success, l, s)
    }

    fn summary(name: &str, s: f64) -> PlannerSummary {
        PlannerSummary {
            planner: name.into(),
            trials: 1,
            successes: 1,
            success_rate: 1.0,
            mean_path_length: Some(1.0),
            mean_search_space: Some(s),
            mean_weighted: Some(s),
            path_ratio: None,
        }
    }

    fn report(ps: Vec<PlannerSummary>) -> Report {
        Report {
            planners: ps,
            by_density: vec![],
            manifest: None,
            reductions: vec![],
            scaling: vec![],
        }
    }

    #[test]
    fn reduction_arithmetic() {
        let r = report(vec![summary("astar", 101.33), summary("sat", 63.59)]);
        let red = compute_reduction(&r, "astar", "sat").unwrap();
        assert!((red - 37.2455).abs() < 1e-3, "{red}");
        let eq = report(vec![summary("a", 50.0), summary("b", 50.0)]);
        assert_eq!(compute_reduction(&eq, "a", "b").unwrap(), 0.0);
        assert!(compute_reduction(&r, "sat", "astar").unwrap() < 0.0);
        let zero = report(vec![summary("a", 0.0), summary("b", 3.0)]);
        assert_eq!(
            compute_reduction(&zero, "a", "b"),
            Err(BenchError::DivisionByZero("a".into()))
        );
        assert_eq!(
            compute_reduction(&r, "astar", "nope"),
            Err(BenchError::MissingPlanner("nope".into()))
        );
    }

    #[test]
    fn mean_of_products() {
        let rows = [row("p", true, 2, 10), row("p", true, 4, 30), row("p", true, 6, 20)];
        let s = &aggregate(&rows)[0];
        // (20 + 120 + 120) / 3, while the product of means is 4 * 20 = 80
        assert!((s.mean_weighted.unwrap() - 260.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.mean_path_length, Some(4.0));
        assert_eq!(s.mean_search_space, Some(20.0));
    }

    #[test]
    fn failures_count_only_in_success_rate() {
        let rows = [row("p", true, 2, 10), row("p", false, 50, 500)];
        let s = &aggregate(&rows)[0];
        assert_eq!(s.success_rate, 0.5);
        assert_eq!(s.mean_path_length, Some(2.0));
        assert_eq!(s.mean_search_space, Some(10.0));
    }

    #[test]
    fn csv_blank_wall_time() {
        let text = csv_string(&[row("astar", true, 3, 7)]);
        assert_eq!(
            text,
            "trial_id,map_id,planner,success,path_length,search_space,weighted,wall_time_ms\n0,m,astar,true,3,7,21,\n"
        );
    }
}

//! `satplan`: map and suite generation, single runs, benchmarks, ablations
//! and scaling experiments.
//!
//! Exit codes: 0 ok, 1 planner failure, 2 invalid arguments or input,
//! 3 unwritable output, 4 backend or transport error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use satplan_core::agent::{run_trial, AgentConfig, FailureReason, Outcome, PlanTrace};
use satplan_core::backend::{
    ConfigError, DecisionBackend, DeterministicBackend, RecordingBackend, RemoteChatBackend,
    RemoteConfig, ScriptedBackend, ENV_ENDPOINT,
};
use satplan_core::baselines::{apf_realtime, astar, bfs_oracle, dijkstra, ApfParams, SearchResult};
use satplan_core::bench::{
    ablation_planners, compute_reduction, run_suite, scaling_experiment, write_csv, PlannerSpec,
    Reduction, Report, RunOptions, ScalingFamily,
};
use satplan_core::gait::{compile_path_to_gait_with, GaitConfig};
use satplan_core::hex::HexCoord;
use satplan_core::render::{render, Overlay, RenderFormat, RenderSpec, ShowFlags};
use satplan_core::world::{load_map_file, MapStyle, Suite, SuiteParams, TrialSpec};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Output(String),
    #[error("{0}")]
    Backend(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Output(_) => 3,
            CliError::Backend(_) => 4,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "satplan", version, about = "Hexagonal-grid planning with an adaptive observation window agent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark suite (maps, start-goal pairs, manifest).
    Gen(GenArgs),
    /// Run one trial and write its trace.
    Run(RunArgs),
    /// Run planners over a suite and write the report.
    Bench(BenchArgs),
    /// Run the agent ablations over a suite.
    Ablate(AblateArgs),
    /// Fit search-space growth over a scenario family.
    Scaling(ScalingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    Scatter,
    Blobs,
    Walls,
}

impl From<StyleArg> for MapStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::Scatter => MapStyle::Scatter,
            StyleArg::Blobs => MapStyle::Blobs,
            StyleArg::Walls => MapStyle::Walls,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 30)]
    rows: u32,
    #[arg(long, default_value_t = 30)]
    cols: u32,
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    #[arg(long, default_value_t = 100)]
    maps: u32,
    #[arg(long, default_value_t = 10)]
    pairs: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Minimum hex distance between start and goal.
    #[arg(long, default_value_t = 10)]
    min_separation: u32,
    #[arg(long, value_enum, default_value_t = StyleArg::Scatter)]
    style: StyleArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AgentArgs {
    #[arg(long)]
    no_memory: bool,
    #[arg(long)]
    no_aow: bool,
    #[arg(long)]
    no_self_check: bool,
    #[arg(long)]
    step_limit: Option<u32>,
    #[arg(long)]
    frontier_budget: Option<u32>,
}

impl AgentArgs {
    fn config(&self) -> AgentConfig {
        let mut cfg = AgentConfig {
            step_limit: self.step_limit,
            frontier_budget: self.frontier_budget,
            ..AgentConfig::default()
        };
        if self.no_memory {
            cfg = cfg.no_memory();
        }
        if self.no_aow {
            cfg = cfg.no_aow();
        }
        if self.no_self_check {
            cfg = cfg.no_self_check();
        }
        cfg
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    map: PathBuf,
    /// Start cell `q,r`; defaults to the map file's first pair.
    #[arg(long)]
    start: Option<HexCoord>,
    #[arg(long)]
    goal: Option<HexCoord>,
    /// satplanner, astar, dijkstra, apf or bfs.
    #[arg(long, default_value = "satplanner")]
    planner: String,
    /// det, scripted:FILE or http.
    #[arg(long, default_value = "det")]
    backend: String,
    /// Trace JSON destination; stdout when omitted.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Render to this file: SVG for `.svg`, ASCII otherwise.
    #[arg(long)]
    render: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    cell_px: u32,
    /// Leave unobserved cells blank in the render.
    #[arg(long)]
    belief: bool,
    /// Write the raw backend replies, replayable with `--backend scripted:FILE`.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Write the rolling-gait plan of the executed path.
    #[arg(long)]
    gait: Option<PathBuf>,
    /// Restrict the gait to three native directions.
    #[arg(long)]
    strict_gait: bool,
    #[command(flatten)]
    agent: AgentArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "satplanner,astar,dijkstra,apf")]
    planners: Vec<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Record per-trial wall time in the CSV (makes it run-dependent).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    agent: AgentArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    /// open, wall or pocket.
    #[arg(long)]
    family: String,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    scales: Vec<u32>,
    #[arg(long, default_value_t = 4)]
    reps: u32,
    #[arg(long, value_delimiter = ',', default_value = "satplanner,astar")]
    planners: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Output(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn planner_specs(names: &[String], cfg: AgentConfig) -> CliResult<Vec<PlannerSpec>> {
    names
        .iter()
        .map(|n| {
            let mut p = PlannerSpec::by_name(n.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
            if let satplan_core::bench::PlannerKind::Satplanner(c) = &mut p.kind {
                *c = cfg;
            }
            Ok(p)
        })
        .collect()
}

fn load_suite(dir: &Path) -> CliResult<Suite> {
    Suite::load(dir).map_err(|e| CliError::Usage(format!("cannot load suite {}: {e}", dir.display())))
}

fn cmd_gen(a: GenArgs) -> CliResult<u8> {
    if !(0.0..1.0).contains(&a.density) {
        return Err(CliError::Usage(format!("--density must lie in [0, 1), got {}", a.density)));
    }
    if a.rows == 0 || a.cols == 0 || (a.rows as u64 * a.cols as u64) < 4 {
        return Err(CliError::Usage("--rows x --cols must hold at least 4 cells".into()));
    }
    if a.maps == 0 || a.pairs == 0 {
        return Err(CliError::Usage("--maps and --pairs must be positive".into()));
    }
    let params = SuiteParams {
        rows: a.rows,
        cols: a.cols,
        density: a.density,
        maps: a.maps,
        pairs: a.pairs,
        seed: a.seed,
        min_separation: a.min_separation,
        style: a.style.into(),
    };
    let suite = Suite::generate(params).map_err(|e| CliError::Usage(e.to_string()))?;
    suite
        .write(&a.out)
        .map_err(|e| CliError::Output(e.to_string()))?;
    eprintln!(
        "wrote {} maps, {} trials to {}",
        suite.maps.len(),
        suite.trials().len(),
        a.out.display()
    );
    Ok(0)
}

fn make_backend(spec: &str, cfg: AgentConfig) -> CliResult<Box<dyn DecisionBackend>> {
    match spec {
        "det" | "deterministic" => Ok(Box::new(DeterministicBackend::new(cfg))),
        "http" => {
            let config = RemoteConfig::from_env().map_err(|e| match e {
                ConfigError::MissingEndpoint => CliError::Usage(format!(
                    "--backend http needs {ENV_ENDPOINT} set to a chat-completions URL \
                     (optionally SATPLAN_LLM_MODEL and SATPLAN_LLM_KEY)"
                )),
                other => CliError::Usage(other.to_string()),
            })?;
            Ok(Box::new(RemoteChatBackend::new(config)))
        }
        s => match s.strip_prefix("scripted:") {
            Some(path) if !path.is_empty() => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read script {path}: {e}")))?;
                Ok(Box::new(ScriptedBackend::from_text(&text)))
            }
            _ => Err(CliError::Usage(format!(
                "unknown backend {s:?}; use det, scripted:FILE or http"
            ))),
        },
    }
}

fn search_json(planner: &str, spec: &TrialSpec, r: &SearchResult) -> serde_json::Value {
    json!({
        "planner": planner,
        "spec": spec,
        "outcome": if r.success { "success" } else { "failure" },
        "path": r.path,
        "path_length": r.path_length(),
        "search_space": r.expanded_count,
        "optimal_cost": r.optimal_cost,
    })
}

fn cmd_run(a: RunArgs) -> CliResult<u8> {
    let (map, pairs) = load_map_file(&a.map)
        .map_err(|e| CliError::Usage(format!("cannot load map {}: {e}", a.map.display())))?;
    let first = pairs.first();
    let start = a.start.or(first.map(|p| p.start));
    let goal = a.goal.or(first.map(|p| p.goal));
    let (Some(start), Some(goal)) = (start, goal) else {
        return Err(CliError::Usage(
            "--start and --goal are required when the map file lists no pairs".into(),
        ));
    };
    for (name, c) in [("start", start), ("goal", goal)] {
        if !map.is_free(c) {
            return Err(CliError::Usage(format!("{name} {c} is not a free cell of the map")));
        }
    }
    let spec = TrialSpec {
        map_id: map.map_id.clone(),
        start,
        goal,
        pair_index: 0,
    };
    let cfg = a.agent.config();

    let (json_text, overlay, success, backend_failure) = match a.planner.as_str() {
        "satplanner" | "satplanner-det" => {
            let inner = make_backend(&a.backend, cfg)?;
            let mut backend = RecordingBackend::new(inner);
            let trace: PlanTrace = run_trial(&map, &spec, &mut backend, &cfg);
            if let Some(path) = &a.transcript {
                let mut text = backend.transcript.join("\n\n");
                text.push('\n');
                write_file(path, &text)?;
            }
            let backend_failure = (trace.outcome == Outcome::Failure(FailureReason::Backend))
                .then(|| trace.error.clone().unwrap_or_else(|| "backend failure".into()));
            (
                trace.to_json(),
                Overlay::from_trace(&trace),
                trace.outcome.is_success(),
                backend_failure,
            )
        }
        "astar" | "dijkstra" | "bfs" => {
            let r = match a.planner.as_str() {
                "astar" => astar(&map, start, goal),
                "dijkstra" => dijkstra(&map, start, goal),
                _ => bfs_oracle(&map, start, goal),
            };
            let text = serde_json::to_string_pretty(&search_json(&a.planner, &spec, &r)).expect("json") + "\n";
            let overlay = Overlay::endpoints(start, goal, r.path.clone());
            (text, overlay, r.success, None)
        }
        "apf" => {
            let r = apf_realtime(&map, start, goal, &ApfParams::default());
            let value = json!({
                "planner": "apf",
                "spec": spec,
                "outcome": r.outcome,
                "path": r.path,
                "path_length": r.path_length(),
                "search_space": r.search_space(),
            });
            let overlay = Overlay {
                observed: r.observed_cells.clone(),
                ..Overlay::endpoints(start, goal, r.path.clone())
            };
            let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
            (text, overlay, r.outcome.is_success(), None)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown planner {other:?}; use satplanner, astar, dijkstra, apf or bfs"
            )))
        }
    };

    match &a.trace {
        Some(path) => write_file(path, &json_text)?,
        None => print!("{json_text}"),
    }
    if let Some(path) = &a.render {
        let output = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg")) {
            RenderFormat::Svg
        } else {
            RenderFormat::Ascii
        };
        let rs = RenderSpec {
            output,
            show: ShowFlags {
                belief: a.belief,
                ..ShowFlags::default()
            },
            cell_px: a.cell_px.max(1),
        };
        write_file(path, &render(&map, &overlay, &rs))?;
    }
    if let Some(path) = &a.gait {
        let cfg = GaitConfig {
            strict_three_direction: a.strict_gait,
        };
        let plan = compile_path_to_gait_with(&overlay.path, cfg)
            .map_err(|e| CliError::Usage(format!("gait: {e}")))?;
        write_file(path, &(plan.to_json() + "\n"))?;
    }
    if let Some(msg) = backend_failure {
        return Err(CliError::Backend(msg));
    }
    Ok(if success { 0 } else { 1 })
}

fn finish_report(report: &mut Report) {
    let names: Vec<String> = report.planners.iter().map(|p| p.planner.clone()).collect();
    let baseline = ["astar", "full"].into_iter().find(|b| names.iter().any(|n| n == b));
    if let Some(baseline) = baseline {
        for subject in names.iter().filter(|n| n.as_str() != baseline) {
            if let Ok(percent) = compute_reduction(report, baseline, subject) {
                report.reductions.push(Reduction {
                    baseline: baseline.to_string(),
                    subject: subject.clone(),
                    percent,
                });
            }
        }
    }
}

fn summarize(report: &Report) {
    for p in &report.planners {
        eprintln!(
            "{:14} success {:.3}  L {}  S {}  L*S {}  L/L* {}",
            p.planner,
            p.success_rate,
            fmt_opt(p.mean_path_length),
            fmt_opt(p.mean_search_space),
            fmt_opt(p.mean_weighted),
            p.path_ratio.map_or("-".into(), |r| format!("{r:.4}")),
        );
    }
    for r in &report.reductions {
        eprintln!("search-space reduction {} vs {}: {:.2}%", r.subject, r.baseline, r.percent);
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.2}"))
}

fn write_outputs(
    report: &Report,
    results: &[satplan_core::bench::TrialResult],
    out: &Path,
    csv: Option<&Path>,
) -> CliResult<()> {
    write_file(out, &report.to_json())?;
    if let Some(path) = csv {
        let mut buf = Vec::new();
        write_csv(results, &mut buf).map_err(|e| CliError::Output(e.to_string()))?;
        write_file(path, &String::from_utf8(buf).expect("csv is utf-8"))?;
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult<u8> {
    let planners = planner_specs(&a.planners, a.agent.config())?;
    if planners.is_empty() {
        return Err(CliError::Usage("--planners is empty".into()));
    }
    let suite = load_suite(&a.suite)?;
    let opts = RunOptions {
        jobs: a.jobs,
        timing: a.timing,
    };
    let (mut report, results) = run_suite(&suite, &planners, opts);
    finish_report(&mut report);
    summarize(&report);
    write_outputs(&report, &results, &a.out, a.csv.as_deref())?;
    Ok(0)
}

fn cmd_ablate(a: AblateArgs) -> CliResult<u8> {
    let suite = load_suite(&a.suite)?;
    let opts = RunOptions {
        jobs: a.jobs,
        timing: false,
    };
    let (mut report, results) = run_suite(&suite, &ablation_planners(AgentConfig::default()), opts);
    finish_report(&mut report);
    summarize(&report);
    write_outputs(&report, &results, &a.out, a.csv.as_deref())?;
    Ok(0)
}

fn cmd_scaling(a: ScalingArgs) -> CliResult<u8> {
    let family = ScalingFamily::from_name(&a.family)
        .ok_or_else(|| CliError::Usage(format!("unknown family {:?}; use open, wall or pocket", a.family)))?;
    let planners = planner_specs(&a.planners, AgentConfig::default())?;
    let fits = scaling_experiment(family, &a.scales, a.reps, &planners)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    for f in &fits {
        eprintln!(
            "{} {}: slope {:.3}  r2 {:.4}  c {:.3}",
            f.family.name(),
            f.planner,
            f.slope,
            f.r2,
            f.prefactor
        );
    }
    let report = Report {
        planners: Vec::new(),
        by_density: Vec::new(),
        manifest: None,
        reductions: Vec::new(),
        scaling: fits,
    };
    write_file(&a.out, &report.to_json())?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Scaling(a) => cmd_scaling(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("satplan: {e}");
            ExitCode::from(e.code())
        }
    }
}

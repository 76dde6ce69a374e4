use super::{run_suite, PlannerKind, PlannerSpec, Report, RunOptions, TrialResult};
use crate::agent::AgentConfig;
use crate::world::Suite;

pub const ABLATIONS: [&str; 4] = ["full", "no_memory", "no_aow", "no_self_check"];

pub fn ablation_planners(base: AgentConfig) -> Vec<PlannerSpec> {
    let configs = [base, base.no_memory(), base.no_aow(), base.no_self_check()];
    ABLATIONS
        .iter()
        .zip(configs)
        .map(|(name, cfg)| PlannerSpec::new(*name, PlannerKind::Satplanner(cfg)))
        .collect()
}

/// The deterministic agent under each ablation, side by side.
pub fn run_ablations(suite: &Suite, base: AgentConfig, opts: RunOptions) -> (Report, Vec<TrialResult>) {
    run_suite(suite, &ablation_planners(base), opts)
}

//! Decision procedures for primitive networks and the dispatcher that picks
//! one by the network's structure.

mod antichain;
mod dispatch;
mod gpow_dp;
mod vcn;
mod verify;
mod walks;

use std::fmt;

pub use antichain::{exec_antichain, reach_antichain};
pub use dispatch::{dispatch, dispatch_with_graph, plan_existence};
pub use gpow_dp::{reach_exec_gpow, verify_gpow};
pub use vcn::reach_exec_vcn;
pub use verify::verify_vcn;

pub(crate) use antichain::{exec_antichain_in, reach_antichain_in};
pub(crate) use gpow_dp::reach_exec_gpow_in;
pub(crate) use vcn::reach_exec_vcn_in;

use crate::model::{
    execute_plan, is_solution, ActionMultiset, Instance, Plan, Query, TaskId, TaskNetwork,
};
use crate::stategraph::DEFAULT_STATE_CAP;

/// Which procedure produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Trivial,
    Antichain,
    Gpow,
    Vcn,
    Oracle,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Trivial => "trivial",
            Route::Antichain => "antichain",
            Route::Gpow => "gpow-dp",
            Route::Vcn => "vcn",
            Route::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub route: Option<Route>,
    pub nodes: u64,
    pub branches: u64,
    pub ilp_calls: u64,
    pub decompositions: u64,
}

/// The method chosen for each decomposed compound task, by task name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub choices: Vec<(String, usize)>,
    pub network: TaskNetwork,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Tasks of the solved primitive network in execution order. For
    /// non-full solutions these are exactly the selected tasks.
    pub linearization: Vec<TaskId>,
    pub decomposition: Option<DecompositionWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
    pub reason: Option<String>,
}

impl Verdict {
    pub fn yes(linearization: Vec<TaskId>, stats: Stats) -> Self {
        Self {
            answer: true,
            witness: Some(Witness {
                linearization,
                decomposition: None,
            }),
            stats,
            reason: None,
        }
    }

    pub fn no(stats: Stats) -> Self {
        Self {
            answer: false,
            witness: None,
            stats,
            reason: None,
        }
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn linearization(&self) -> Option<&[TaskId]> {
        self.witness.as_ref().map(|w| w.linearization.as_slice())
    }
}

/// Limits and thresholds shared by every solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Search nodes a branching solver may expand before giving up.
    pub budget: u64,
    pub ilp_budget: u64,
    pub gpow_threshold: usize,
    pub vcn_threshold: usize,
    pub state_cap: usize,
    pub oracle_cap: usize,
    /// Decompositions a compound solve may enumerate.
    pub decomposition_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            budget: 10_000_000,
            ilp_budget: crate::ilp::DEFAULT_BUDGET,
            gpow_threshold: 4,
            vcn_threshold: 8,
            state_cap: DEFAULT_STATE_CAP,
            oracle_cap: crate::oracle::DEFAULT_ORACLE_CAP,
            decomposition_cap: 1 << 20,
        }
    }
}

/// Checks a primitive verdict's witness against the solution definition and
/// the query's own condition. `inst.network` must be primitive.
pub fn witness_is_valid(inst: &Instance, lin: &[TaskId]) -> bool {
    let tn = &inst.network;
    let d = &inst.domain;
    if lin.iter().any(|&t| t >= tn.len()) {
        return false;
    }
    let sub = tn.restrict(lin);
    let local: Vec<TaskId> = (0..lin.len()).collect();
    let full = inst.query.wants_full();
    if !is_solution(&sub, &local, d, tn, &inst.init, full) {
        return false;
    }
    let plan = Plan(lin.iter().map(|&t| tn.action(t).unwrap()).collect());
    match &inst.query {
        Query::Verify(p) => *p == plan,
        Query::Exists => true,
        Query::Executable(s) => s.is_covered_by(&plan.0.iter().copied().collect::<ActionMultiset>()),
        Query::Reach(goal) => execute_plan(d, &inst.init, &plan)
            .map(|end| goal.is_subset(&end))
            .unwrap_or(false),
    }
}

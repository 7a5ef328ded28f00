//! Decision procedures for Hierarchical Task Network problems.
//!
//! The crate answers four questions about a task network: plan
//! verification, plan existence, action executability and state
//! reachability. Primitive networks are routed to specialized solvers by
//! their structure (antichain, small chain width, small vertex cover);
//! compound networks are decomposed first.
//!
//! ```
//! use htn_core::{Domain, Instance, Query, TaskNetwork, Label, solvers};
//!
//! let mut d = Domain::builder();
//! let p = d.proposition("p");
//! let set = d.action("set", &[], &[], &[p]);
//! let use_p = d.action("use", &[p], &[], &[]);
//! let d = d.build().unwrap();
//!
//! let mut n = TaskNetwork::builder();
//! let t1 = n.task("t1", Label::Action(set));
//! let t2 = n.task("t2", Label::Action(use_p));
//! n.before(t1, t2);
//! let s0 = d.empty_state();
//! let inst = Instance::new(d, n.build().unwrap(), s0, Query::Exists);
//! let v = solvers::dispatch(&inst, &solvers::Config::default()).unwrap();
//! assert!(v.answer);
//! ```

pub mod bitset;
pub mod cli;
pub mod error;
pub mod format;
pub mod generators;
pub mod hierarchy;
pub mod ilp;
pub mod model;
pub mod oracle;
pub mod ordergraph;
pub mod solvers;
pub mod stategraph;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use hierarchy::{solve_compound, HierarchyMeasures};
pub use model::{
    ActionDef, ActionId, ActionMultiset, Domain, DomainBuilder, Instance, Label, MethodDef, Plan, Query,
    QueryKind, State, TaskId, TaskNetwork,
};
pub use solvers::{Config, Verdict};

/// Solves any instance: primitive networks go to the dispatcher, compound
/// ones through decomposition.
pub fn solve(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    if inst.network.is_primitive() {
        solvers::dispatch(inst, cfg)
    } else {
        solve_compound(inst, cfg)
    }
}

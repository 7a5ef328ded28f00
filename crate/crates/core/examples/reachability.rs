//! State reachability: can some subset of the tasks, executed in an order
//! the network allows, reach a goal state?

use htn_core::solvers::{dispatch, Config};
use htn_core::{Domain, Instance, Label, Query, TaskNetwork};

fn main() -> htn_core::Result<()> {
    let mut d = Domain::builder();
    let key = d.proposition("key");
    let open = d.proposition("open");
    let inside = d.proposition("inside");
    let take = d.action("take_key", &[], &[], &[key]);
    let unlock = d.action("unlock", &[key], &[key], &[open]);
    let enter = d.action("enter", &[open], &[], &[inside]);
    let d = d.build()?;
    let goal = d.state(&["inside"])?;
    let cfg = Config::default();

    // unordered tasks take the antichain route
    let mut n = TaskNetwork::builder();
    for (name, a) in [("e", enter), ("u", unlock), ("k", take)] {
        n.task(name, Label::Action(a));
    }
    let s0 = d.empty_state();
    let inst = Instance::new(d, n.build()?, s0, Query::Reach(goal));
    show("antichain", &inst, &dispatch(&inst, &cfg)?);

    // forcing enter before unlock makes the goal unreachable
    let mut n = TaskNetwork::builder();
    let k = n.task("k", Label::Action(take));
    let e = n.task("e", Label::Action(enter));
    let u = n.task("u", Label::Action(unlock));
    n.before(k, e).before(e, u);
    let ordered = inst.with_network(n.build()?);
    show("chain", &ordered, &dispatch(&ordered, &cfg)?);
    Ok(())
}

fn show(label: &str, inst: &Instance, v: &htn_core::Verdict) {
    let tasks: Vec<_> = v
        .linearization()
        .unwrap_or_default()
        .iter()
        .map(|&t| inst.network.name(t))
        .collect();
    println!("{label}: reachable={} route={} tasks=[{}]", v.answer, v.stats.route.unwrap(), tasks.join(" "));
}

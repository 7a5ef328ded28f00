//! The four-task diamond: t1 before t2 and t3, both before t4.
//!
//! Builds the instance in code, asks whether a full plan exists, and lists
//! every executable ordering with the exhaustive oracle.

use htn_core::oracle::full_witnesses;
use htn_core::ordergraph::measures;
use htn_core::solvers::{dispatch, Config};
use htn_core::{Domain, Instance, Label, Query, TaskNetwork};

fn main() -> htn_core::Result<()> {
    let mut d = Domain::builder();
    let p1 = d.proposition("1");
    let p2 = d.proposition("2");
    let a1 = d.action("a1", &[], &[], &[p1]);
    let a2 = d.action("a2", &[], &[], &[p2]);
    let a3 = d.action("a3", &[p2], &[p1], &[]);
    let d = d.build()?;

    let mut n = TaskNetwork::builder();
    let t1 = n.task("t1", Label::Action(a2));
    let t2 = n.task("t2", Label::Action(a1));
    let t3 = n.task("t3", Label::Action(a3));
    let t4 = n.task("t4", Label::Action(a1));
    n.before(t1, t2).before(t1, t3).before(t2, t4).before(t3, t4);
    let s0 = d.empty_state();
    let inst = Instance::new(d, n.build()?, s0, Query::Exists);

    let m = measures(&inst.network, &inst.domain);
    println!("tasks {} gpow {} vcn {}", m.tasks, m.gpow, m.vcn);

    let v = dispatch(&inst, &Config::default())?;
    println!("plan exists: {} (route {})", v.answer, v.stats.route.unwrap());
    if let Some(lin) = v.linearization() {
        let names: Vec<_> = lin.iter().map(|&t| inst.network.name(t)).collect();
        println!("witness: {}", names.join(" "));
    }

    for w in full_witnesses(&inst)? {
        let names: Vec<_> = w.iter().map(|&t| inst.network.name(t)).collect();
        println!("executable ordering: {}", names.join(" "));
    }
    Ok(())
}

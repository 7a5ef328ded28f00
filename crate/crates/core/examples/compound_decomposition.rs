//! Compound tasks: hierarchy measures, the decompositions they allow and a
//! solve that searches through them.

use htn_core::hierarchy::{
    decomposition_count_bound, decomposition_size_bound, measure_hierarchy, Decompositions,
};
use htn_core::solvers::Config;
use htn_core::{solve_compound, Domain, Instance, Label, Query, TaskNetwork};

fn main() -> htn_core::Result<()> {
    let mut d = Domain::builder();
    let fuel = d.proposition("fuel");
    let there = d.proposition("there");
    let refuel = d.action("refuel", &[], &[], &[fuel]);
    let drive = d.action("drive", &[fuel], &[fuel], &[there]);
    let walk = d.action("walk", &[], &[], &[there]);
    let travel = d.compound("travel");
    let single = |a| -> htn_core::Result<TaskNetwork> {
        let mut n = TaskNetwork::builder();
        n.task("go", Label::Action(a));
        n.build()
    };
    let mut by_car = TaskNetwork::builder();
    let r = by_car.task("refuel", Label::Action(refuel));
    let g = by_car.task("drive", Label::Action(drive));
    by_car.before(r, g);
    d.method(travel, by_car.build()?);
    d.method(travel, single(drive)?);
    d.method(travel, single(walk)?);
    let d = d.build()?;

    let mut n = TaskNetwork::builder();
    n.task("trip", Label::Compound(travel));
    let s0 = d.empty_state();
    let goal = d.state(&["there"])?;
    let inst = Instance::new(d, n.build()?, s0, Query::Exists);

    let m = measure_hierarchy(&inst.network, &inst.domain);
    println!("{m}");
    println!(
        "at most {} decompositions with at most {} tasks",
        decomposition_count_bound(&m).unwrap(),
        decomposition_size_bound(inst.network.len(), &m).unwrap()
    );
    for dec in Decompositions::new(&inst.network, &inst.domain, true)? {
        let dec = dec?;
        let labels: Vec<_> = dec.network.labels().iter().map(|&l| inst.domain.label_name(l)).collect();
        println!("  {:?} -> {}", dec.choices, labels.join(" "));
    }

    for q in [Query::Exists, Query::Reach(goal)] {
        let v = solve_compound(&inst.with_query(q.clone()), &Config::default())?;
        let w = v.witness.as_ref().unwrap();
        let dec = w.decomposition.as_ref().unwrap();
        let plan: Vec<_> = w
            .linearization
            .iter()
            .map(|&t| inst.domain.label_name(dec.network.label(t)))
            .collect();
        println!("{:?}: {} via {:?}, plan {}", q.kind(), v.answer, dec.choices, plan.join(" "));
    }
    Ok(())
}

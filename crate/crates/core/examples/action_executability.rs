//! Action executability: can a solution execute at least the requested
//! number of tasks of each action?

use htn_core::format::parse_instance;
use htn_core::solvers::{dispatch, Config};
use htn_core::{ActionMultiset, Query};

fn main() -> htn_core::Result<()> {
    let inst = parse_instance(include_str!("data/diamond.json"))?;
    let d = &inst.domain;
    let a1 = d.action_id("a1").unwrap();
    let a3 = d.action_id("a3").unwrap();
    let cfg = Config {
        // force the vertex cover procedure
        gpow_threshold: 1,
        ..Config::default()
    };

    for (what, demand) in [("a1 twice", vec![(a1, 2)]), ("a3 and a1", vec![(a3, 1), (a1, 1)]), ("a3 twice", vec![(a3, 2)])] {
        let mut s = ActionMultiset::new();
        for (a, n) in demand {
            s.add(a, n);
        }
        let v = dispatch(&inst.with_query(Query::Executable(s)), &cfg)?;
        let plan: Vec<_> = v
            .linearization()
            .unwrap_or_default()
            .iter()
            .map(|&t| d.label_name(inst.network.label(t)))
            .collect();
        println!(
            "{what:<10} executable={} route={} reason={} plan=[{}]",
            v.answer,
            v.stats.route.unwrap(),
            v.reason.as_deref().unwrap_or("-"),
            plan.join(" ")
        );
    }
    Ok(())
}

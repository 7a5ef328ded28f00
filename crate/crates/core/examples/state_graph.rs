//! Exports the reachable state graph of an instance, and the graph with one
//! arc per class of interchangeable tasks, in Graphviz DOT.
//!
//! ```text
//! cargo run --example state_graph | dot -Tsvg > stg.svg
//! ```

use htn_core::format::parse_instance;
use htn_core::stategraph::{action_equivalence_classes, augmented_graph, build_state_graph, strong_classes};

fn main() -> htn_core::Result<()> {
    let inst = parse_instance(include_str!("data/diamond.json"))?;
    let g = build_state_graph(&inst.domain, &inst.init, 4096)?;
    print!("{}", g.to_dot(&inst.domain));

    let classes = action_equivalence_classes(&g);
    for c in &classes.classes {
        let names: Vec<_> = c.members.iter().map(|&a| inst.domain.action(a).name.as_str()).collect();
        eprintln!("equivalent actions: {}", names.join(" "));
    }
    let order = [inst.network.task_id("t1").unwrap(), inst.network.task_id("t4").unwrap()];
    let strong = strong_classes(&inst.network, &classes, &order);
    print!("{}", augmented_graph(&g, &classes, &strong).to_dot(&g, &inst.domain, &strong));
    Ok(())
}

//! Plan verification: is a given action sequence a linearization of the
//! network that executes from the initial state?

use htn_core::format::parse_instance;
use htn_core::ordergraph::{min_chain_decomposition, min_vertex_cover};
use htn_core::solvers::{verify_gpow, verify_vcn, Config};
use htn_core::Query;

fn main() -> htn_core::Result<()> {
    let inst = parse_instance(include_str!("data/diamond.json"))?;
    let cfg = Config::default();
    let chains = min_chain_decomposition(&inst.network);
    let cover = min_vertex_cover(&inst.network);

    for plan in [["a2", "a1", "a3", "a1"], ["a2", "a3", "a1", "a1"], ["a1", "a2", "a3", "a1"]] {
        let q = inst.with_query(Query::Verify(inst.domain.plan(&plan)?));
        let by_chains = verify_gpow(&q, &chains, &cfg)?;
        let by_cover = verify_vcn(&q, &cover, &cfg)?;
        assert_eq!(by_chains.answer, by_cover.answer);
        print!("{:<16} {}", plan.join(" "), if by_chains.answer { "valid" } else { "invalid" });
        if let Some(lin) = by_chains.linearization() {
            let names: Vec<_> = lin.iter().map(|&t| q.network.name(t)).collect();
            print!("  tasks {}", names.join(" "));
        }
        println!();
    }
    Ok(())
}

//! The order measures that pick a solver: isolated tasks, a minimum chain
//! partition and a minimum vertex cover of the cover graph.

use htn_core::generators::{gen_random, RandomProfile, Shape};
use htn_core::ordergraph::{isolated_tasks, measures, min_chain_decomposition, min_vertex_cover};
use htn_core::QueryKind;

fn main() {
    for (seed, shape) in [(1, Shape::Chains(2)), (2, Shape::StarForest), (3, Shape::RandomDag(0.3))] {
        let inst = gen_random(seed, &RandomProfile::primitive(10, 3, 4, shape, QueryKind::Exists));
        let tn = &inst.network;
        let names = |ts: &[usize]| ts.iter().map(|&t| tn.name(t)).collect::<Vec<_>>().join(" ");
        let m = measures(tn, &inst.domain);
        println!("{shape:?}: tasks {} gpow {} vcn {}", m.tasks, m.gpow, m.vcn);
        println!("  isolated: {}", names(&isolated_tasks(tn)));
        for chain in min_chain_decomposition(tn).chains {
            println!("  chain: {}", names(&chain));
        }
        println!("  vertex cover: {}", names(&min_vertex_cover(tn).cover_set));
    }
}

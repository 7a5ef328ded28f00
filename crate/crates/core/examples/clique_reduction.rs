//! A colored graph turned into a compound instance that is solvable iff
//! the graph has a clique with one vertex of every color.

use htn_core::generators::{gen_clique, CliqueVariant, ColoredGraph};
use htn_core::hierarchy::measure_hierarchy;
use htn_core::solvers::Config;
use htn_core::{solve_compound, QueryKind};

fn main() -> htn_core::Result<()> {
    let triangle = ColoredGraph {
        k: 3,
        colors: vec![1, 2, 3, 1],
        edges: vec![(0, 1), (1, 2), (2, 3), (1, 3)],
    };
    let path = ColoredGraph {
        k: 3,
        colors: vec![1, 2, 3],
        edges: vec![(0, 1), (1, 2)],
    };
    for (name, g) in [("triangle", &triangle), ("path", &path)] {
        for variant in [CliqueVariant::Cnum, CliqueVariant::Cs, CliqueVariant::Cd] {
            let inst = gen_clique(g, variant, QueryKind::Reach)?;
            let m = measure_hierarchy(&inst.network, &inst.domain);
            let v = solve_compound(&inst, &Config::default())?;
            let picked: Vec<_> = v
                .witness
                .iter()
                .flat_map(|w| {
                    let net = &w.decomposition.as_ref().unwrap().network;
                    w.linearization.iter().map(move |&t| net.label(t))
                })
                .map(|l| inst.domain.label_name(l))
                .filter(|a| a.starts_with("select_v"))
                .collect();
            println!(
                "{name:<8} {variant:?}: {m} clique={} decompositions tried={} vertices=[{}]",
                v.answer,
                v.stats.decompositions,
                picked.join(" ")
            );
        }
    }
    Ok(())
}

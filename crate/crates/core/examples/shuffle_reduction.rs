//! Word shuffle questions turned into planning instances. `u` is a shuffle
//! of the parts iff the generated instances are solvable.

use htn_core::generators::{gen_shuffle_state, gen_shuffle_verification, ShuffleInput, ShuffleVariant};
use htn_core::solvers::{dispatch, Config};
use htn_core::stategraph::build_state_graph;

fn main() -> htn_core::Result<()> {
    let cfg = Config::default();
    let cases = [("abab", vec!["ab", "ab"]), ("aabb", vec!["ab", "ba"]), ("baab", vec!["ba", "ab"]), ("ab", vec!["a"])];
    for (u, parts) in cases {
        let input = ShuffleInput::new(u, &parts);
        let verify = dispatch(&gen_shuffle_verification(&input)?, &cfg)?;
        let reach_inst = gen_shuffle_state(&input, ShuffleVariant::Reach)?;
        let reach = dispatch(&reach_inst, &cfg)?;
        let exists = dispatch(&gen_shuffle_state(&input, ShuffleVariant::Exists)?, &cfg)?;
        let states = build_state_graph(&reach_inst.domain, &reach_inst.init, cfg.state_cap)?.k();
        println!(
            "u={u:<5} parts={:<10} verify={} reach={} exists={} states={states}",
            parts.join(","),
            verify.answer,
            reach.answer,
            exists.answer
        );
    }
    Ok(())
}

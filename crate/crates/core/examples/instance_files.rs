//! Reading, writing and solving instance files, with a JSON report.
//!
//! ```text
//! cargo run --example instance_files -- path/to/instance.json
//! ```

use htn_core::format::{instance_to_string, parse_instance, read_instance, verdict_json};
use htn_core::generators::{gen_random, RandomProfile, Shape};
use htn_core::solvers::Config;
use htn_core::QueryKind;

fn main() -> htn_core::Result<()> {
    let inst = match std::env::args().nth(1) {
        Some(path) => read_instance(path)?,
        None => gen_random(42, &RandomProfile::primitive(5, 2, 3, Shape::Chains(2), QueryKind::Reach)),
    };
    let text = instance_to_string(&inst);
    assert_eq!(parse_instance(&text)?, inst);
    println!("{text}");
    let v = htn_core::solve(&inst, &Config::default())?;
    println!("{:#}", verdict_json(&inst, &v));
    Ok(())
}

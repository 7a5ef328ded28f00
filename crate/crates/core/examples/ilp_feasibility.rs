//! The small integer program engine the solvers use: bounded variables and
//! linear constraints, answered with a witness or proven infeasible.

use htn_core::ilp::{feasible, IlpInstance, Relation, DEFAULT_BUDGET};

fn main() -> htn_core::Result<()> {
    // two cycles; the first uses class A twice, the second uses A and B once
    let mut ilp = IlpInstance::new();
    let c1 = ilp.add_var(1, None);
    let c2 = ilp.add_var(1, None);
    ilp.add(&[(c1, 2), (c2, 1)], Relation::Le, 7);
    ilp.add(&[(c1, 2), (c2, 1)], Relation::Ge, 6);
    ilp.add(&[(c2, 1)], Relation::Le, 3);
    print!("{ilp}");
    match feasible(&ilp, DEFAULT_BUDGET)? {
        Some(x) => println!("feasible: {x:?}"),
        None => println!("infeasible"),
    }

    ilp.add(&[(c2, 1)], Relation::Ge, 3);
    ilp.add(&[(c1, 1)], Relation::Ge, 3);
    println!("with x0 >= 3 and x1 >= 3: {:?}", feasible(&ilp, DEFAULT_BUDGET)?);
    Ok(())
}

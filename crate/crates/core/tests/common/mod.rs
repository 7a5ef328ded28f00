#![allow(dead_code)]

use htn_core::{Domain, Instance, Label, Query, TaskNetwork};

/// The four-task diamond: t1 before t2 and t3, both before t4.
pub fn diamond() -> Instance {
    let mut b = Domain::builder();
    let p1 = b.proposition("1");
    let p2 = b.proposition("2");
    let a1 = b.action("a1", &[], &[], &[p1]);
    let a2 = b.action("a2", &[], &[], &[p2]);
    let a3 = b.action("a3", &[p2], &[p1], &[]);
    let d = b.build().unwrap();
    let mut n = TaskNetwork::builder();
    let t1 = n.task("t1", Label::Action(a2));
    let t2 = n.task("t2", Label::Action(a1));
    let t3 = n.task("t3", Label::Action(a3));
    let t4 = n.task("t4", Label::Action(a1));
    n.before(t1, t2).before(t1, t3).before(t2, t4).before(t3, t4);
    let s0 = d.empty_state();
    Instance::new(d, n.build().unwrap(), s0, Query::Exists)
}

/// Is `u` an interleaving of `parts`, by memoized search over positions.
pub fn is_shuffle(u: &str, parts: &[String]) -> bool {
    let u = u.as_bytes();
    let parts: Vec<&[u8]> = parts.iter().map(|p| p.as_bytes()).collect();
    if parts.iter().map(|p| p.len()).sum::<usize>() != u.len() {
        return false;
    }
    let mut seen = std::collections::HashSet::new();
    fn go(
        u: &[u8],
        parts: &[&[u8]],
        pos: &mut Vec<usize>,
        seen: &mut std::collections::HashSet<Vec<usize>>,
    ) -> bool {
        let done: usize = pos.iter().sum();
        if done == u.len() {
            return true;
        }
        if !seen.insert(pos.clone()) {
            return false;
        }
        for i in 0..parts.len() {
            if pos[i] < parts[i].len() && parts[i][pos[i]] == u[done] {
                pos[i] += 1;
                let ok = go(u, parts, pos, seen);
                pos[i] -= 1;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    go(u, &parts, &mut vec![0; parts.len()], &mut seen)
}

//! Plan verification parameterized by a vertex cover of the cover graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Config, Route, Stats, Verdict};
use crate::error::{Error, Result};
use crate::model::{execute_plan, Instance, Query, TaskId, TaskNetwork};
use crate::ordergraph::VertexCover;

/// Branches over orderings of the cover tasks and fills every plan position
/// greedily with the ready task of lowest priority.
pub fn verify_vcn(inst: &Instance, vc: &VertexCover, cfg: &Config) -> Result<Verdict> {
    let tn = &inst.network;
    if !tn.is_primitive() {
        return Err(Error::Invalid("verify_vcn needs a primitive network".into()));
    }
    let Query::Verify(plan) = &inst.query else {
        return Err(Error::Invalid("verify_vcn needs a verify query".into()));
    };
    let mut st = Stats {
        route: Some(Route::Vcn),
        ..Stats::default()
    };
    if plan.0.len() != tn.len() || execute_plan(&inst.domain, &inst.init, plan).is_err() {
        return Ok(Verdict::no(st));
    }
    let v = &vc.cover_set;
    let mut order = Vec::with_capacity(v.len());
    let mut placed = vec![false; v.len()];
    let mut found = None;
    let ctx = Greedy::new(tn, &plan.0, v);
    orderings(&ctx, &mut order, &mut placed, &mut st, cfg, &mut found)?;
    Ok(match found {
        Some(lin) => Verdict::yes(lin, st),
        None => Verdict::no(st),
    })
}

fn orderings(
    ctx: &Greedy,
    order: &mut Vec<TaskId>,
    placed: &mut [bool],
    st: &mut Stats,
    cfg: &Config,
    found: &mut Option<Vec<TaskId>>,
) -> Result<()> {
    st.nodes += 1;
    if st.nodes > cfg.budget {
        return Err(Error::BudgetExceeded("vertex cover orderings"));
    }
    let v = ctx.cover;
    if order.len() == v.len() {
        st.branches += 1;
        *found = ctx.run(order);
        return Ok(());
    }
    for i in 0..v.len() {
        if placed[i] {
            continue;
        }
        // every cover predecessor must already be in the ordering
        let ok = (0..v.len()).all(|j| placed[j] || !ctx.tn.precedes(v[j], v[i]));
        if !ok {
            continue;
        }
        placed[i] = true;
        order.push(v[i]);
        orderings(ctx, order, placed, st, cfg, found)?;
        order.pop();
        placed[i] = false;
        if found.is_some() {
            break;
        }
    }
    Ok(())
}

struct Greedy<'a> {
    tn: &'a TaskNetwork,
    plan: &'a [usize],
    cover: &'a [TaskId],
    in_cover: Vec<bool>,
    num_actions: usize,
}

impl<'a> Greedy<'a> {
    fn new(tn: &'a TaskNetwork, plan: &'a [usize], cover: &'a [TaskId]) -> Self {
        let mut in_cover = vec![false; tn.len()];
        for &v in cover {
            in_cover[v] = true;
        }
        let num_actions = (0..tn.len())
            .filter_map(|t| tn.action(t))
            .chain(plan.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        Self {
            tn,
            plan,
            cover,
            in_cover,
            num_actions,
        }
    }

    /// One greedy pass for a fixed ordering of the cover. Priorities are
    /// doubled so that `v_i` sits at `2i+1` and a task due before `v_i` at `2i`.
    fn run(&self, order: &[TaskId]) -> Option<Vec<TaskId>> {
        let tn = self.tn;
        let n = tn.len();
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i + 1;
        }
        let psi: Vec<u64> = (0..n)
            .map(|t| {
                if self.in_cover[t] {
                    2 * rank[t] as u64 + 1
                } else {
                    tn.successors(t)
                        .iter()
                        .filter(|&s| self.in_cover[s])
                        .map(|s| 2 * rank[s] as u64)
                        .min()
                        .unwrap_or(u64::MAX)
                }
            })
            .collect();
        let mut waiting: Vec<usize> = (0..n).map(|t| tn.predecessors(t).count()).collect();
        let mut heaps: Vec<BinaryHeap<Reverse<(u64, TaskId)>>> = vec![BinaryHeap::new(); self.num_actions];
        let mut next_cover = 0usize;
        let mut pushed = vec![false; n];
        // a cover task is released only when it is next in the ordering
        let mut release = |t: TaskId, next_cover: usize, waiting: &[usize], heaps: &mut Vec<BinaryHeap<Reverse<(u64, TaskId)>>>| {
            if !pushed[t] && waiting[t] == 0 && (!self.in_cover[t] || rank[t] == next_cover + 1) {
                pushed[t] = true;
                heaps[tn.action(t).unwrap()].push(Reverse((psi[t], t)));
            }
        };
        for t in 0..n {
            release(t, next_cover, &waiting, &mut heaps);
        }
        let mut lin = Vec::with_capacity(n);
        for &a in self.plan {
            let Reverse((_, t)) = heaps.get_mut(a)?.pop()?;
            lin.push(t);
            if self.in_cover[t] {
                next_cover += 1;
            }
            for s in tn.successors(t).iter() {
                waiting[s] -= 1;
                release(s, next_cover, &waiting, &mut heaps);
            }
            if let Some(&v) = order.get(next_cover) {
                release(v, next_cover, &waiting, &mut heaps);
            }
        }
        Some(lin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::diamond;
    use crate::model::Plan;
    use crate::ordergraph::min_vertex_cover;
    use crate::solvers::witness_is_valid;

    #[test]
    fn diamond_examples() {
        let inst = diamond();
        let d = &inst.domain;
        let vc = min_vertex_cover(&inst.network);
        assert_eq!(vc.len(), 2);
        let cfg = Config::default();
        let q = inst.with_query(Query::Verify(d.plan(&["a2", "a1", "a3", "a1"]).unwrap()));
        let v = verify_vcn(&q, &vc, &cfg).unwrap();
        assert!(v.answer);
        assert!(witness_is_valid(&q, v.linearization().unwrap()));
        let short = inst.with_query(Query::Verify(Plan(vec![])));
        assert!(!verify_vcn(&short, &vc, &cfg).unwrap().answer);
    }
}

//! Reachability and executability on networks without order constraints.

use std::ops::ControlFlow;

use super::walks::{all_marked, for_each_simple_path, path_vertices, simple_cycles, splice, Arc, Budget, Cycle, Graph};
use super::{Config, Route, Stats, Verdict};
use crate::error::{Error, Result};
use crate::ilp::{feasible, IlpInstance, Relation};
use crate::model::{ActionMultiset, Instance, Query, TaskId, TaskNetwork};
use crate::stategraph::{action_equivalence_classes, build_state_graph, reduce_r0, reduce_r1, supply, StateGraph};

fn require_antichain(tn: &TaskNetwork) -> Result<()> {
    if !tn.cover().is_empty() {
        return Err(Error::Invalid("antichain solver called on an ordered network".into()));
    }
    if !tn.is_primitive() {
        return Err(Error::Invalid("antichain solver needs a primitive network".into()));
    }
    Ok(())
}

fn stats() -> Stats {
    Stats {
        route: Some(Route::Antichain),
        ..Stats::default()
    }
}

/// Lowest unused task per action, handed out in order.
fn assign_tasks(tn: &TaskNetwork, actions: &[usize]) -> Vec<TaskId> {
    let mut taken = vec![false; tn.len()];
    actions
        .iter()
        .map(|&a| {
            let t = (0..tn.len())
                .find(|&t| !taken[t] && tn.action(t) == Some(a))
                .expect("supply checked by the search");
            taken[t] = true;
            t
        })
        .collect()
}

/// State reachability on an antichain: a simple path in the state graph
/// whose actions fit the task supply and that ends in a superset of the goal.
pub fn reach_antichain(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
    reach_antichain_in(inst, &g, cfg)
}

pub(crate) fn reach_antichain_in(inst: &Instance, g: &StateGraph, cfg: &Config) -> Result<Verdict> {
    require_antichain(&inst.network)?;
    let Query::Reach(goal) = &inst.query else {
        return Err(Error::Invalid("reach_antichain needs a reach query".into()));
    };
    let mut st = stats();
    if goal.is_subset(&inst.init) {
        return Ok(Verdict::yes(Vec::new(), st));
    }
    let cap = supply(&inst.network, g.num_actions());
    let arcs = g
        .arcs
        .iter()
        .filter(|a| cap[a.action] > 0)
        .map(|a| Arc {
            from: a.from,
            to: a.to,
            label: a.action,
        })
        .collect();
    let graph = Graph::new(g.k(), arcs).thinned(g.k());
    let mut budget = Budget::new(cfg.budget);
    let mut found = None;
    let r = for_each_simple_path(&graph, 0, &|_| true, &cap, &mut budget, &mut |path, end, _| {
        if goal.is_subset(&g.states[end]) {
            found = Some(path.to_vec());
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    });
    st.nodes = budget.nodes;
    let _ = r?;
    Ok(match found {
        Some(path) => {
            let actions: Vec<usize> = path.iter().map(|&ai| graph.arcs[ai].label).collect();
            Verdict::yes(assign_tasks(&inst.network, &actions), st)
        }
        None => Verdict::no(st),
    })
}

/// Action executability on an antichain.
pub fn exec_antichain(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
    exec_antichain_in(inst, &g, cfg)
}

pub(crate) fn exec_antichain_in(inst: &Instance, g: &StateGraph, cfg: &Config) -> Result<Verdict> {
    let demand = match &inst.query {
        Query::Executable(s) => s.clone(),
        Query::Exists => inst.network.action_multiset(),
        _ => return Err(Error::Invalid("exec_antichain needs an executable query".into())),
    };
    exec_with_demand(inst, g, &demand, cfg)
}

fn exec_with_demand(
    inst: &Instance,
    g: &StateGraph,
    demand: &ActionMultiset,
    cfg: &Config,
) -> Result<Verdict> {
    require_antichain(&inst.network)?;
    let mut st = stats();
    let na = g.num_actions();
    if reduce_r0(&inst.network, demand, na).is_some() {
        return Ok(Verdict::no(st).with_reason("R0"));
    }
    if demand.is_empty() {
        return Ok(Verdict::yes(Vec::new(), st));
    }
    let classes = action_equivalence_classes(g);
    let reduced = reduce_r1(&inst.domain, &inst.network, demand, &classes);
    let tn = &reduced.network;
    let max = supply(tn, na);
    let min: Vec<usize> = (0..na).map(|a| reduced.demand.count(a)).collect();

    let arcs = g
        .arcs
        .iter()
        .filter(|a| max[a.action] > 0)
        .map(|a| Arc {
            from: a.from,
            to: a.to,
            label: a.action,
        })
        .collect();
    let graph = Graph::new(g.k(), arcs);
    let mut budget = Budget::new(cfg.budget);
    let cycles = simple_cycles(&graph, &|_| true, &max, &mut budget)?;
    // labels reachable from cycle i onwards, for the demand prune
    let mut suffix: Vec<Vec<bool>> = vec![vec![false; na]; cycles.len() + 1];
    for i in (0..cycles.len()).rev() {
        suffix[i] = suffix[i + 1].clone();
        for &(l, _) in &cycles[i].counts {
            suffix[i][l] = true;
        }
    }
    let demanded: Vec<usize> = (0..na).filter(|&a| min[a] > 0).collect();

    let mut search = CycleSearch {
        graph: &graph,
        cycles: &cycles,
        suffix: &suffix,
        demanded: &demanded,
        min: &min,
        max: &max,
        cfg,
        ilp_calls: 0,
        leaves: 0,
        found: None,
    };
    let r = for_each_simple_path(&graph, 0, &|_| true, &max, &mut budget, &mut |path, _, budget| {
        let mut usage = vec![0usize; na];
        for &ai in path {
            usage[graph.arcs[ai].label] += 1;
        }
        let pv = path_vertices(&graph, 0, path);
        let mut chosen = Vec::new();
        if search.subsets(path, &pv, 0, &mut usage, &mut chosen, budget)? {
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    });
    st.nodes = budget.nodes;
    st.ilp_calls = search.ilp_calls;
    st.branches = search.leaves;
    let _ = r?;
    let Some(walk) = search.found else {
        return Ok(Verdict::no(st));
    };
    let labels: Vec<usize> = walk.iter().map(|&ai| graph.arcs[ai].label).collect();
    Ok(Verdict::yes(unmerge(&inst.network, tn, demand, &labels), st))
}

struct CycleSearch<'a> {
    graph: &'a Graph,
    cycles: &'a [Cycle],
    suffix: &'a [Vec<bool>],
    demanded: &'a [usize],
    min: &'a [usize],
    max: &'a [usize],
    cfg: &'a Config,
    ilp_calls: u64,
    leaves: u64,
    found: Option<Vec<usize>>,
}

impl CycleSearch<'_> {
    fn subsets(
        &mut self,
        path: &[usize],
        pv: &crate::bitset::BitSet,
        i: usize,
        usage: &mut [usize],
        chosen: &mut Vec<usize>,
        budget: &mut Budget,
    ) -> Result<bool> {
        budget.tick()?;
        // every demanded action must still be obtainable
        if self
            .demanded
            .iter()
            .any(|&a| usage[a] == 0 && !self.suffix[i][a])
        {
            return Ok(false);
        }
        if i == self.cycles.len() {
            self.leaves += 1;
            return self.leaf(path, pv, chosen);
        }
        let c = &self.cycles[i];
        if c.counts.iter().all(|&(l, n)| usage[l] + n <= self.max[l]) {
            for &(l, n) in &c.counts {
                usage[l] += n;
            }
            chosen.push(i);
            let hit = self.subsets(path, pv, i + 1, usage, chosen, budget)?;
            chosen.pop();
            for &(l, n) in &c.counts {
                usage[l] -= n;
            }
            if hit {
                return Ok(true);
            }
        }
        self.subsets(path, pv, i + 1, usage, chosen, budget)
    }

    fn leaf(&mut self, path: &[usize], pv: &crate::bitset::BitSet, chosen: &[usize]) -> Result<bool> {
        let refs: Vec<&Cycle> = chosen.iter().map(|&i| &self.cycles[i]).collect();
        if !all_marked(pv, &refs) {
            return Ok(false);
        }
        let na = self.max.len();
        let mut p = vec![0i64; na];
        for &ai in path {
            p[self.graph.arcs[ai].label] += 1;
        }
        let mut ilp = IlpInstance::new();
        let vars: Vec<usize> = refs.iter().map(|_| ilp.add_var(1, None)).collect();
        for a in 0..na {
            let terms: Vec<(usize, i64)> = refs
                .iter()
                .zip(&vars)
                .filter_map(|(c, &v)| {
                    c.counts
                        .iter()
                        .find(|(l, _)| *l == a)
                        .map(|&(_, n)| (v, n as i64))
                })
                .collect();
            if terms.is_empty() && p[a] == 0 && self.min[a] == 0 {
                continue;
            }
            ilp.add(&terms, Relation::Ge, self.min[a] as i64 - p[a]);
            ilp.add(&terms, Relation::Le, self.max[a] as i64 - p[a]);
        }
        self.ilp_calls += 1;
        let Some(x) = feasible(&ilp, self.cfg.ilp_budget)? else {
            return Ok(false);
        };
        let reps: Vec<usize> = x.iter().map(|&v| v as usize).collect();
        self.found = Some(splice(self.graph, 0, path, &refs, &reps));
        Ok(true)
    }
}

/// Maps a walk over R1-merged labels back to tasks of the original
/// network, giving each original action at least its demanded count.
fn unmerge(
    original: &TaskNetwork,
    merged: &TaskNetwork,
    demand: &ActionMultiset,
    labels: &[usize],
) -> Vec<TaskId> {
    let na = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut per_label: Vec<usize> = vec![0; na];
    for &l in labels {
        per_label[l] += 1;
    }
    let mut pool: Vec<Vec<TaskId>> = vec![Vec::new(); na];
    for (l, &n) in per_label.iter().enumerate() {
        if n == 0 {
            continue;
        }
        let group: Vec<TaskId> = (0..merged.len())
            .filter(|&t| merged.action(t) == Some(l))
            .collect();
        let mut picked = Vec::new();
        let mut taken = vec![false; original.len()];
        let mut originals: Vec<usize> = group.iter().map(|&t| original.action(t).unwrap()).collect();
        originals.sort_unstable();
        originals.dedup();
        for a in originals {
            let want = demand.count(a);
            for &t in group.iter().filter(|&&t| original.action(t) == Some(a)).take(want) {
                if picked.len() < n {
                    picked.push(t);
                    taken[t] = true;
                }
            }
        }
        for &t in &group {
            if picked.len() >= n {
                break;
            }
            if !taken[t] {
                picked.push(t);
                taken[t] = true;
            }
        }
        picked.reverse();
        pool[l] = picked;
    }
    labels.iter().map(|&l| pool[l].pop().unwrap()).collect()
}

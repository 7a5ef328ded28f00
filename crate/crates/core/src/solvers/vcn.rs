//! Reachability and executability parameterized by a vertex cover.
//!
//! The search fixes an ordered subset `V'` of the cover, splits the run into
//! segments between consecutive cover tasks and walks the state graph in each
//! segment using only strong classes admissible there. Walks are a simple
//! path plus a connected set of simple cycles; an ILP picks how often each
//! cycle is repeated.

use std::collections::HashMap;
use std::ops::ControlFlow;

use super::walks::{all_marked, for_each_simple_path, path_vertices, simple_cycles, splice, Arc, Budget, Cycle, Graph};
use super::{Config, Route, Stats, Verdict};
use crate::error::{Error, Result};
use crate::ilp::{feasible, IlpInstance, Relation};
use crate::model::{ActionMultiset, Instance, Query, State, TaskId};
use crate::ordergraph::VertexCover;
use crate::stategraph::{
    action_equivalence_classes, build_state_graph, reduce_r0, strong_classes_among, ActionClasses,
    StateGraph, StrongClass, UNDEFINED,
};

enum Goal<'a> {
    Reach(&'a State),
    Exec(ActionMultiset),
}

pub fn reach_exec_vcn(inst: &Instance, vc: &VertexCover, cfg: &Config) -> Result<Verdict> {
    let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
    reach_exec_vcn_in(inst, vc, &g, cfg)
}

pub(crate) fn reach_exec_vcn_in(
    inst: &Instance,
    vc: &VertexCover,
    g: &StateGraph,
    cfg: &Config,
) -> Result<Verdict> {
    let tn = &inst.network;
    if !tn.is_primitive() {
        return Err(Error::Invalid("reach_exec_vcn needs a primitive network".into()));
    }
    let mut st = Stats {
        route: Some(Route::Vcn),
        ..Stats::default()
    };
    let goal = match &inst.query {
        Query::Reach(sg) => Goal::Reach(sg),
        Query::Executable(s) => Goal::Exec(s.clone()),
        Query::Exists => Goal::Exec(tn.action_multiset()),
        Query::Verify(_) => return Err(Error::Invalid("use verify_vcn for plans".into())),
    };
    match &goal {
        Goal::Reach(sg) if sg.is_subset(&inst.init) => return Ok(Verdict::yes(Vec::new(), st)),
        Goal::Exec(s) => {
            if reduce_r0(tn, s, g.num_actions()).is_some() {
                return Ok(Verdict::no(st).with_reason("R0"));
            }
            if s.is_empty() {
                return Ok(Verdict::yes(Vec::new(), st));
            }
        }
        _ => {}
    }
    let classes = action_equivalence_classes(g);
    let mut search = Search {
        inst,
        g,
        classes: &classes,
        goal: &goal,
        cover: &vc.cover_set,
        cfg,
        budget: Budget::new(cfg.budget),
        branches: 0,
        ilp_calls: 0,
    };
    let mut order = Vec::new();
    let r = search.orders(&mut order);
    st.nodes = search.budget.nodes;
    st.branches = search.branches;
    st.ilp_calls = search.ilp_calls;
    Ok(match r? {
        Some(lin) => Verdict::yes(lin, st),
        None => Verdict::no(st),
    })
}

struct Search<'a> {
    inst: &'a Instance,
    g: &'a StateGraph,
    classes: &'a ActionClasses,
    goal: &'a Goal<'a>,
    cover: &'a [TaskId],
    cfg: &'a Config,
    budget: Budget,
    branches: u64,
    ilp_calls: u64,
}

impl Search<'_> {
    /// Every ordered subset of the cover closed under cover predecessors.
    fn orders(&mut self, order: &mut Vec<TaskId>) -> Result<Option<Vec<TaskId>>> {
        self.budget.tick()?;
        self.branches += 1;
        if let Some(lin) = self.evaluate(order)? {
            return Ok(Some(lin));
        }
        let tn = &self.inst.network;
        for &v in self.cover {
            if order.contains(&v) {
                continue;
            }
            let ready = self
                .cover
                .iter()
                .all(|&u| !tn.precedes(u, v) || order.contains(&u));
            if !ready {
                continue;
            }
            order.push(v);
            let r = self.orders(order)?;
            order.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    fn evaluate(&mut self, order: &[TaskId]) -> Result<Option<Vec<TaskId>>> {
        let tn = &self.inst.network;
        let na = self.g.num_actions();
        let m = order.len();
        let in_cover: Vec<bool> = (0..tn.len()).map(|t| self.cover.contains(&t)).collect();
        let available: Vec<TaskId> = (0..tn.len())
            .filter(|&t| !in_cover[t])
            .filter(|&t| {
                tn.predecessors(t)
                    .iter()
                    .all(|p| !in_cover[p] || order.contains(&p))
            })
            .collect();
        let strong = strong_classes_among(tn, self.classes, order, &available);
        let ne = strong.len();
        let maxp: Vec<usize> = strong.iter().map(|e| e.members.len()).collect();
        let forced: Vec<bool> = strong.iter().map(|e| e.interval.1 < m).collect();

        // per-action demand left after the cover tasks
        let mut need = vec![0usize; na];
        if let Goal::Exec(s) = self.goal {
            let mut from_cover = vec![0usize; na];
            for &v in order {
                from_cover[tn.action(v).unwrap()] += 1;
            }
            let mut offered = vec![0usize; na];
            for e in &strong {
                for &t in &e.members {
                    offered[tn.action(t).unwrap()] += 1;
                }
            }
            for (a, k) in s.iter() {
                need[a] = k.saturating_sub(from_cover[a]);
                if need[a] > offered[a] {
                    return Ok(None);
                }
            }
        }

        let mut arcs = Vec::new();
        for s in 0..self.g.k() {
            for (ei, e) in strong.iter().enumerate() {
                let to = self.classes.classes[e.action_class].signature[s];
                if to != UNDEFINED {
                    arcs.push(Arc {
                        from: s,
                        to: to as usize,
                        label: ei,
                    });
                }
            }
        }
        let graph = Graph::new(self.g.k(), arcs);
        let mut seg = Segments {
            search: self,
            order,
            strong: &strong,
            graph: &graph,
            maxp: &maxp,
            forced: &forced,
            need: &need,
            cycle_cache: HashMap::new(),
            store: Vec::new(),
            usage: vec![0; ne],
            in_cycle: vec![0; ne],
            plan: Vec::new(),
            result: None,
        };
        seg.segment(0, 0)?;
        Ok(seg.result)
    }
}

/// The walk chosen for one segment.
struct SegmentChoice {
    start: usize,
    path: Vec<usize>,
    cycles: Vec<usize>,
}

struct Segments<'s, 'a> {
    search: &'s mut Search<'a>,
    order: &'s [TaskId],
    strong: &'s [StrongClass],
    graph: &'s Graph,
    maxp: &'s [usize],
    forced: &'s [bool],
    need: &'s [usize],
    cycle_cache: HashMap<Vec<bool>, Vec<usize>>,
    store: Vec<Cycle>,
    usage: Vec<usize>,
    /// How many chosen cycles use each class.
    in_cycle: Vec<usize>,
    plan: Vec<SegmentChoice>,
    result: Option<Vec<TaskId>>,
}

impl Segments<'_, '_> {
    fn allowed_mask(&self, i: usize) -> Vec<bool> {
        self.strong
            .iter()
            .map(|e| e.interval.0 <= i && i <= e.interval.1)
            .collect()
    }

    fn cycles_for(&mut self, mask: &[bool]) -> Result<Vec<usize>> {
        if let Some(ids) = self.cycle_cache.get(mask) {
            return Ok(ids.clone());
        }
        let found = simple_cycles(self.graph, &|a: &Arc| mask[a.label], self.maxp, &mut self.search.budget)?;
        let start = self.store.len();
        self.store.extend(found);
        let ids: Vec<usize> = (start..self.store.len()).collect();
        self.cycle_cache.insert(mask.to_vec(), ids.clone());
        Ok(ids)
    }

    /// Walks segment `i` from STG vertex `s`. Returns true once a witness is found.
    fn segment(&mut self, i: usize, s: usize) -> Result<bool> {
        let m = self.order.len();
        let mask = self.allowed_mask(i);
        let cycles = self.cycles_for(&mask)?;
        let cap: Vec<usize> = self.maxp.iter().zip(&self.usage).map(|(mx, u)| mx - u).collect();
        let graph = self.graph;
        let mut budget = std::mem::replace(&mut self.search.budget, Budget::new(0));
        let r = for_each_simple_path(graph, s, &|a: &Arc| mask[a.label], &cap, &mut budget, &mut |path, end, budget| {
            let next = if i < m {
                let a = self.search.inst.network.action(self.order[i]).unwrap();
                match self.search.g.successor(end, a) {
                    Some(n) => Some(n),
                    None => return Ok(ControlFlow::Continue(())),
                }
            } else {
                if let Goal::Reach(sg) = self.search.goal {
                    if !sg.is_subset(&self.search.g.states[end]) {
                        return Ok(ControlFlow::Continue(()));
                    }
                }
                None
            };
            std::mem::swap(&mut self.search.budget, budget);
            let hit = self.with_path(i, s, path, next, &cycles);
            std::mem::swap(&mut self.search.budget, budget);
            if hit? {
                Ok(ControlFlow::Break(()))
            } else {
                Ok(ControlFlow::Continue(()))
            }
        });
        self.search.budget = budget;
        Ok(r?.is_break())
    }

    fn with_path(&mut self, i: usize, s: usize, path: &[usize], next: Option<usize>, cycles: &[usize]) -> Result<bool> {
        for &ai in path {
            self.usage[self.graph.arcs[ai].label] += 1;
        }
        self.plan.push(SegmentChoice {
            start: s,
            path: path.to_vec(),
            cycles: Vec::new(),
        });
        let pv = path_vertices(self.graph, s, path);
        let hit = self.subsets(i, &pv, cycles, 0, next);
        self.plan.pop();
        for &ai in path {
            self.usage[self.graph.arcs[ai].label] -= 1;
        }
        hit
    }

    fn subsets(&mut self, i: usize, pv: &crate::bitset::BitSet, cycles: &[usize], j: usize, next: Option<usize>) -> Result<bool> {
        self.search.budget.tick()?;
        if j == cycles.len() {
            return self.close_segment(i, pv, next);
        }
        let c = cycles[j];
        let fits = self.store[c]
            .counts
            .iter()
            .all(|&(l, n)| self.usage[l] + n <= self.maxp[l]);
        if fits {
            self.take(c, true);
            self.plan.last_mut().unwrap().cycles.push(c);
            let hit = self.subsets(i, pv, cycles, j + 1, next);
            self.plan.last_mut().unwrap().cycles.pop();
            self.take(c, false);
            if hit? {
                return Ok(true);
            }
        }
        self.subsets(i, pv, cycles, j + 1, next)
    }

    fn take(&mut self, c: usize, on: bool) {
        for &(l, n) in &self.store[c].counts {
            if on {
                self.usage[l] += n;
                self.in_cycle[l] += 1;
            } else {
                self.usage[l] -= n;
                self.in_cycle[l] -= 1;
            }
        }
    }

    fn close_segment(&mut self, i: usize, pv: &crate::bitset::BitSet, next: Option<usize>) -> Result<bool> {
        let chosen = &self.plan.last().unwrap().cycles;
        let refs: Vec<&Cycle> = chosen.iter().map(|&c| &self.store[c]).collect();
        if !all_marked(pv, &refs) {
            return Ok(false);
        }
        // a forced class closing here can only grow through cycles already chosen
        for (e, cls) in self.strong.iter().enumerate() {
            if self.forced[e] && cls.interval.1 == i && self.usage[e] < self.maxp[e] && self.in_cycle[e] == 0 {
                return Ok(false);
            }
        }
        match next {
            Some(n) => self.segment(i + 1, n),
            None => self.finish(),
        }
    }

    fn finish(&mut self) -> Result<bool> {
        let tn = &self.search.inst.network;
        let ne = self.strong.len();
        let mut path_usage = vec![0i64; ne];
        for sc in &self.plan {
            for &ai in &sc.path {
                path_usage[self.graph.arcs[ai].label] += 1;
            }
        }
        let mut ilp = IlpInstance::new();
        // one variable per (segment, cycle) occurrence
        let mut occ: Vec<(usize, usize, usize)> = Vec::new();
        for (si, sc) in self.plan.iter().enumerate() {
            for &c in &sc.cycles {
                occ.push((si, c, ilp.add_var(1, None)));
            }
        }
        let mut usage_terms: Vec<Vec<(usize, i64)>> = vec![Vec::new(); ne];
        for &(_, c, x) in &occ {
            for &(l, n) in &self.store[c].counts {
                usage_terms[l].push((x, n as i64));
            }
        }
        for e in 0..ne {
            let terms = &usage_terms[e];
            let room = self.maxp[e] as i64 - path_usage[e];
            if terms.is_empty() {
                if self.forced[e] && room != 0 {
                    return Ok(false);
                }
                continue;
            }
            ilp.add(terms, Relation::Le, room);
            if self.forced[e] {
                ilp.add(terms, Relation::Ge, room);
            }
        }
        // y[e][a]: tasks of action a taken from class e
        let mut y: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ne];
        let na = self.need.len();
        let mut per_action: Vec<Vec<(usize, i64)>> = vec![Vec::new(); na];
        for (e, cls) in self.strong.iter().enumerate() {
            let mut count = vec![0i64; na];
            for &t in &cls.members {
                count[tn.action(t).unwrap()] += 1;
            }
            for a in 0..na {
                if self.need[a] > 0 && count[a] > 0 {
                    let v = ilp.add_var(0, Some(count[a]));
                    y[e].push((a, v));
                    per_action[a].push((v, 1));
                }
            }
            if !y[e].is_empty() {
                // Σ_a y[e][a] ≤ usage(e)
                let mut terms: Vec<(usize, i64)> = y[e].iter().map(|&(_, v)| (v, 1)).collect();
                terms.extend(usage_terms[e].iter().map(|&(x, n)| (x, -n)));
                ilp.add(&terms, Relation::Le, path_usage[e]);
            }
        }
        for a in 0..na {
            if self.need[a] > 0 {
                if per_action[a].is_empty() {
                    return Ok(false);
                }
                ilp.add(&per_action[a], Relation::Ge, self.need[a] as i64);
            }
        }
        self.search.ilp_calls += 1;
        let Some(sol) = feasible(&ilp, self.search.cfg.ilp_budget)? else {
            return Ok(false);
        };
        self.result = Some(self.assemble(&occ, &y, &sol));
        Ok(true)
    }

    fn assemble(&self, occ: &[(usize, usize, usize)], y: &[Vec<(usize, usize)>], sol: &[i64]) -> Vec<TaskId> {
        let tn = &self.search.inst.network;
        let mut walks: Vec<Vec<usize>> = Vec::with_capacity(self.plan.len());
        let mut usage = vec![0usize; self.strong.len()];
        for (si, sc) in self.plan.iter().enumerate() {
            let mine: Vec<&(usize, usize, usize)> = occ.iter().filter(|o| o.0 == si).collect();
            let refs: Vec<&Cycle> = mine.iter().map(|o| &self.store[o.1]).collect();
            let reps: Vec<usize> = mine.iter().map(|o| sol[o.2] as usize).collect();
            let walk = splice(self.graph, sc.start, &sc.path, &refs, &reps);
            for &ai in &walk {
                usage[self.graph.arcs[ai].label] += 1;
            }
            walks.push(walk);
        }
        let mut pools: Vec<Vec<TaskId>> = Vec::with_capacity(self.strong.len());
        for (e, cls) in self.strong.iter().enumerate() {
            let mut picked: Vec<TaskId> = Vec::new();
            for &(a, v) in &y[e] {
                let want = sol[v] as usize;
                picked.extend(cls.members.iter().filter(|&&t| tn.action(t) == Some(a)).take(want));
            }
            for &t in &cls.members {
                if picked.len() >= usage[e] {
                    break;
                }
                if !picked.contains(&t) {
                    picked.push(t);
                }
            }
            picked.truncate(usage[e]);
            picked.reverse();
            pools.push(picked);
        }
        let mut lin = Vec::new();
        for (si, walk) in walks.iter().enumerate() {
            for &ai in walk {
                lin.push(pools[self.graph.arcs[ai].label].pop().expect("usage bounded by class size"));
            }
            if let Some(&v) = self.order.get(si) {
                lin.push(v);
            }
        }
        lin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::diamond;
    use crate::ordergraph::min_vertex_cover;
    use crate::solvers::witness_is_valid;

    #[test]
    fn diamond_reach_exec() {
        let inst = diamond();
        let vc = min_vertex_cover(&inst.network);
        let cfg = Config::default();
        let reach = inst.with_query(Query::Reach(inst.domain.state(&["2"]).unwrap()));
        let v = reach_exec_vcn(&reach, &vc, &cfg).unwrap();
        assert!(v.answer);
        assert!(witness_is_valid(&reach, v.linearization().unwrap()));

        let exists = inst.with_query(Query::Exists);
        let v = reach_exec_vcn(&exists, &vc, &cfg).unwrap();
        assert!(v.answer);
        assert_eq!(v.linearization().unwrap().len(), 4);
        assert!(witness_is_valid(&exists, v.linearization().unwrap()));

        let mut s = ActionMultiset::new();
        s.add(inst.domain.action_id("a3").unwrap(), 2);
        let v = reach_exec_vcn(&inst.with_query(Query::Executable(s)), &vc, &cfg).unwrap();
        assert!(!v.answer);
        assert_eq!(v.reason.as_deref(), Some("R0"));
    }
}

//! Exhaustive reference solvers. Everything else is tested against these.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::hierarchy::{measure_hierarchy, Decompositions};
use crate::model::{Instance, Query, State, TaskId};
use crate::solvers::{DecompositionWitness, Route, Stats, Verdict};

pub const DEFAULT_ORACLE_CAP: usize = 12;

struct Prim<'a> {
    inst: &'a Instance,
    n: usize,
    pred: Vec<u64>,
    actions: Vec<usize>,
}

impl<'a> Prim<'a> {
    fn new(inst: &'a Instance, cap: usize) -> Result<Self> {
        let tn = &inst.network;
        let n = tn.len();
        if n > cap || n > 63 {
            return Err(Error::InstanceTooLarge(format!(
                "{n} tasks exceed the oracle cap of {cap}"
            )));
        }
        if !tn.is_primitive() {
            return Err(Error::Invalid("oracle_primitive needs a primitive network".into()));
        }
        let pred = (0..n)
            .map(|t| tn.predecessors(t).iter().fold(0u64, |m, p| m | 1 << p))
            .collect();
        let actions = (0..n).map(|t| tn.action(t).unwrap()).collect();
        Ok(Self {
            inst,
            n,
            pred,
            actions,
        })
    }

    fn ready(&self, used: u64) -> impl Iterator<Item = TaskId> + '_ {
        (0..self.n).filter(move |&t| used >> t & 1 == 0 && self.pred[t] & !used == 0)
    }

    fn step(&self, s: &State, t: TaskId) -> Option<State> {
        self.inst.domain.action(self.actions[t]).apply(s)
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    /// Full linearization matching `plan` from position `i` on.
    fn verify(
        &self,
        plan: &[usize],
        used: u64,
        i: usize,
        seq: &mut Vec<TaskId>,
        dead: &mut HashSet<u64>,
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if i == plan.len() {
            return used == self.full();
        }
        if dead.contains(&used) {
            return false;
        }
        let cands: Vec<TaskId> = self.ready(used).filter(|&t| self.actions[t] == plan[i]).collect();
        for t in cands {
            seq.push(t);
            if self.verify(plan, used | 1 << t, i + 1, seq, dead, nodes) {
                return true;
            }
            seq.pop();
        }
        dead.insert(used);
        false
    }

    /// Searches downward-closed task sets from `(used, s)` for one accepted
    /// by `accept`.
    fn explore(
        &self,
        used: u64,
        s: &State,
        accept: &dyn Fn(u64, &State) -> bool,
        seq: &mut Vec<TaskId>,
        seen: &mut HashSet<(u64, State)>,
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if accept(used, s) {
            return true;
        }
        if !seen.insert((used, s.clone())) {
            return false;
        }
        let ready: Vec<TaskId> = self.ready(used).collect();
        for t in ready {
            if let Some(next) = self.step(s, t) {
                seq.push(t);
                if self.explore(used | 1 << t, &next, accept, seq, seen, nodes) {
                    return true;
                }
                seq.pop();
            }
        }
        false
    }

    fn count(&self, used: u64, s: &State, memo: &mut HashMap<(u64, State), u64>) -> u64 {
        if used == self.full() {
            return 1;
        }
        if let Some(&c) = memo.get(&(used, s.clone())) {
            return c;
        }
        let mut total = 0;
        for t in self.ready(used).collect::<Vec<_>>() {
            if let Some(next) = self.step(s, t) {
                total += self.count(used | 1 << t, &next, memo);
            }
        }
        memo.insert((used, s.clone()), total);
        total
    }

    fn enumerate(&self, used: u64, s: &State, seq: &mut Vec<TaskId>, out: &mut Vec<Vec<TaskId>>) {
        if used == self.full() {
            out.push(seq.clone());
            return;
        }
        for t in self.ready(used).collect::<Vec<_>>() {
            if let Some(next) = self.step(s, t) {
                seq.push(t);
                self.enumerate(used | 1 << t, &next, seq, out);
                seq.pop();
            }
        }
    }
}

/// Decides a primitive instance by exhaustive search.
pub fn oracle_primitive(inst: &Instance, cap: usize) -> Result<Verdict> {
    let p = Prim::new(inst, cap)?;
    let mut stats = Stats {
        route: Some(Route::Oracle),
        ..Stats::default()
    };
    let mut seq = Vec::new();
    let found = match &inst.query {
        Query::Verify(plan) => {
            if plan.0.len() != p.n || crate::model::execute_plan(&inst.domain, &inst.init, plan).is_err() {
                false
            } else {
                let mut dead = HashSet::new();
                p.verify(&plan.0, 0, 0, &mut seq, &mut dead, &mut stats.nodes)
            }
        }
        Query::Exists => {
            let full = p.full();
            let accept = move |used: u64, _: &State| used == full;
            p.explore(0, &inst.init, &accept, &mut seq, &mut HashSet::new(), &mut stats.nodes)
        }
        Query::Executable(demand) => {
            let demand: Vec<(usize, usize)> = demand.iter().collect();
            let actions = p.actions.clone();
            let accept = move |used: u64, _: &State| {
                demand.iter().all(|&(a, k)| {
                    (0..actions.len())
                        .filter(|&t| used >> t & 1 == 1 && actions[t] == a)
                        .count()
                        >= k
                })
            };
            p.explore(0, &inst.init, &accept, &mut seq, &mut HashSet::new(), &mut stats.nodes)
        }
        Query::Reach(goal) => {
            let goal = goal.clone();
            let accept = move |_: u64, s: &State| goal.is_subset(s);
            p.explore(0, &inst.init, &accept, &mut seq, &mut HashSet::new(), &mut stats.nodes)
        }
    };
    Ok(if found {
        Verdict::yes(seq, stats)
    } else {
        Verdict::no(stats)
    })
}

/// Number of executable full linearizations.
pub fn count_full_witnesses(inst: &Instance) -> Result<u64> {
    let p = Prim::new(inst, 10)?;
    Ok(p.count(0, &inst.init, &mut HashMap::new()))
}

/// Every executable full linearization, in lexicographic order of task ids.
pub fn full_witnesses(inst: &Instance) -> Result<Vec<Vec<TaskId>>> {
    let p = Prim::new(inst, 10)?;
    let mut out = Vec::new();
    p.enumerate(0, &inst.init, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Decides a compound instance by trying every decomposition.
pub fn oracle_compound(inst: &Instance, cap: usize) -> Result<Verdict> {
    if inst.network.is_primitive() {
        return oracle_primitive(inst, cap);
    }
    if measure_hierarchy(&inst.network, &inst.domain).c_depth.is_none() {
        return Err(Error::InfiniteDepth);
    }
    let mut stats = Stats {
        route: Some(Route::Oracle),
        ..Stats::default()
    };
    for dec in Decompositions::new(&inst.network, &inst.domain, false)? {
        let dec = dec?;
        stats.decompositions += 1;
        let prim = inst.with_network(dec.network.clone());
        let v = oracle_primitive(&prim, cap)?;
        stats.nodes += v.stats.nodes;
        if v.answer {
            let mut out = Verdict::yes(v.witness.unwrap().linearization, stats);
            out.witness.as_mut().unwrap().decomposition = Some(DecompositionWitness {
                choices: dec.choices,
                network: dec.network,
            });
            return Ok(out);
        }
    }
    Ok(Verdict::no(stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::diamond;
    use crate::model::{Label, Plan, TaskNetwork};
    use crate::solvers::witness_is_valid;

    #[test]
    fn diamond_exists_with_two_witnesses() {
        let inst = diamond();
        let v = oracle_primitive(&inst, DEFAULT_ORACLE_CAP).unwrap();
        assert!(v.answer);
        assert!(witness_is_valid(&inst, v.linearization().unwrap()));
        assert_eq!(count_full_witnesses(&inst).unwrap(), 2);
        assert_eq!(
            full_witnesses(&inst).unwrap(),
            vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]
        );
    }

    #[test]
    fn diamond_verify_wrong_multiset() {
        let inst = diamond();
        let a1 = inst.domain.action_id("a1").unwrap();
        let q = inst.with_query(Query::Verify(Plan(vec![a1; 4])));
        assert!(!oracle_primitive(&q, DEFAULT_ORACLE_CAP).unwrap().answer);
    }

    #[test]
    fn single_step_reach() {
        let inst = diamond();
        let mut b = TaskNetwork::builder();
        b.task("t1", Label::Action(inst.domain.action_id("a2").unwrap()));
        let goal = inst.domain.state(&["2"]).unwrap();
        let q = Instance::new(inst.domain.clone(), b.build().unwrap(), inst.init.clone(), Query::Reach(goal));
        let v = oracle_primitive(&q, DEFAULT_ORACLE_CAP).unwrap();
        assert!(v.answer);
        assert_eq!(v.linearization().unwrap(), &[0]);
    }

    #[test]
    fn counting_small_cases() {
        let mut b = crate::model::Domain::builder();
        b.action("noop", &[], &[], &[]);
        let d = b.build().unwrap();
        let one = {
            let mut n = TaskNetwork::builder();
            n.task("t1", Label::Action(0));
            n.build().unwrap()
        };
        let two = {
            let mut n = TaskNetwork::builder();
            n.task("t1", Label::Action(0));
            n.task("t2", Label::Action(0));
            n.build().unwrap()
        };
        let s0 = d.empty_state();
        let d = std::sync::Arc::new(d);
        assert_eq!(
            count_full_witnesses(&Instance::new(d.clone(), one, s0.clone(), Query::Exists)).unwrap(),
            1
        );
        assert_eq!(
            count_full_witnesses(&Instance::new(d, two, s0, Query::Exists)).unwrap(),
            2
        );
    }

    #[test]
    fn too_large() {
        let mut b = crate::model::Domain::builder();
        b.action("noop", &[], &[], &[]);
        let d = b.build().unwrap();
        let mut n = TaskNetwork::builder();
        for i in 0..13 {
            n.task(format!("t{i}"), Label::Action(0));
        }
        let s0 = d.empty_state();
        let inst = Instance::new(d, n.build().unwrap(), s0, Query::Exists);
        assert!(matches!(
            oracle_primitive(&inst, DEFAULT_ORACLE_CAP),
            Err(Error::InstanceTooLarge(_))
        ));
    }
}

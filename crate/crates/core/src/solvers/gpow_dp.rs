//! Dynamic programs over chain prefixes, polynomial for fixed width.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::{Config, Route, Stats, Verdict};
use crate::error::{Error, Result};
use crate::model::{execute_plan, ActionMultiset, Instance, Query, TaskId, TaskNetwork};
use crate::ordergraph::ChainDecomposition;
use crate::stategraph::{action_equivalence_classes, build_state_graph, reduce_r0, StateGraph};

/// Per-task chain bookkeeping shared by both programs.
struct Chains<'a> {
    chains: &'a [Vec<TaskId>],
    /// `need[t][j]`: how many tasks of chain `j` precede `t`.
    need: Vec<Vec<u32>>,
    isolated: Vec<TaskId>,
}

impl<'a> Chains<'a> {
    fn new(tn: &TaskNetwork, cd: &'a ChainDecomposition) -> Self {
        let w = cd.chains.len();
        let mut need = vec![vec![0u32; w]; tn.len()];
        for (t, row) in need.iter_mut().enumerate() {
            for (j, chain) in cd.chains.iter().enumerate() {
                row[j] = chain.iter().filter(|&&x| tn.precedes(x, t)).count() as u32;
            }
        }
        Self {
            chains: &cd.chains,
            need,
            isolated: cd.isolated.clone(),
        }
    }

    fn w(&self) -> usize {
        self.chains.len()
    }

    /// The next task of chain `j` if all its chain predecessors are used.
    fn next_ready(&self, h: &[u32], j: usize) -> Option<TaskId> {
        let t = *self.chains[j].get(h[j] as usize)?;
        self.need[t]
            .iter()
            .zip(h)
            .all(|(n, have)| n <= have)
            .then_some(t)
    }
}

/// Mixed-radix packing of small counters into a `u128`.
struct Packer {
    radix: Vec<u128>,
}

impl Packer {
    fn new(radix: Vec<u128>) -> Result<Self> {
        let mut total: u128 = 1;
        for &r in &radix {
            total = total
                .checked_mul(r)
                .ok_or_else(|| Error::InstanceTooLarge("dynamic program state space overflows".into()))?;
        }
        Ok(Self { radix })
    }

    fn pack(&self, v: &[u32]) -> u128 {
        v.iter()
            .zip(&self.radix)
            .fold(0u128, |acc, (&x, &r)| acc * r + x as u128)
    }

    fn unpack(&self, mut key: u128) -> Vec<u32> {
        let mut out = vec![0u32; self.radix.len()];
        for i in (0..self.radix.len()).rev() {
            out[i] = (key % self.radix[i]) as u32;
            key /= self.radix[i];
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Step {
    Start,
    Chain(usize),
    Isolated(usize),
}

fn check_primitive(inst: &Instance) -> Result<()> {
    if inst.network.is_primitive() {
        Ok(())
    } else {
        Err(Error::Invalid("chain programs need a primitive network".into()))
    }
}

/// Plan verification over `R_i[h_1..h_w]`.
pub fn verify_gpow(inst: &Instance, cd: &ChainDecomposition, cfg: &Config) -> Result<Verdict> {
    check_primitive(inst)?;
    let Query::Verify(plan) = &inst.query else {
        return Err(Error::Invalid("verify_gpow needs a verify query".into()));
    };
    let tn = &inst.network;
    let mut st = Stats {
        route: Some(Route::Gpow),
        ..Stats::default()
    };
    let p = &plan.0;
    if p.len() != tn.len() || execute_plan(&inst.domain, &inst.init, plan).is_err() {
        return Ok(Verdict::no(st));
    }
    let ch = Chains::new(tn, cd);
    let w = ch.w();
    let na = inst.domain.actions().len();
    let packer = Packer::new(ch.chains.iter().map(|c| c.len() as u128 + 1).collect())?;

    let mut u_count = vec![0usize; na];
    for &t in &ch.isolated {
        u_count[tn.action(t).unwrap()] += 1;
    }
    // prefix[j][h][a]: tasks with action a among the first h of chain j
    let prefix: Vec<Vec<Vec<u32>>> = ch
        .chains
        .iter()
        .map(|c| {
            let mut rows = vec![vec![0u32; na]];
            for &t in c {
                let mut row = rows.last().unwrap().clone();
                row[tn.action(t).unwrap()] += 1;
                rows.push(row);
            }
            rows
        })
        .collect();

    let mut seen_before = vec![0usize; na];
    let mut layers: Vec<HashMap<u128, (u128, Step)>> = Vec::with_capacity(p.len() + 1);
    layers.push(HashMap::from([(packer.pack(&vec![0; w]), (0, Step::Start))]));
    for (i, &a) in p.iter().enumerate() {
        let mut next: HashMap<u128, (u128, Step)> = HashMap::new();
        for &key in layers[i].keys() {
            st.nodes += 1;
            if st.nodes > cfg.budget {
                return Err(Error::BudgetExceeded("gpow verification"));
            }
            let h = packer.unpack(key);
            let used_from_chains: usize = (0..w).map(|j| prefix[j][h[j] as usize][a] as usize).sum();
            let used_isolated = seen_before[a] - used_from_chains;
            if u_count[a] > used_isolated {
                next.entry(key).or_insert((key, Step::Isolated(0)));
            }
            for j in 0..w {
                if let Some(t) = ch.next_ready(&h, j) {
                    if tn.action(t) == Some(a) {
                        let mut h2 = h.clone();
                        h2[j] += 1;
                        next.entry(packer.pack(&h2)).or_insert((key, Step::Chain(j)));
                    }
                }
            }
        }
        seen_before[a] += 1;
        layers.push(next);
    }
    let Some(&last) = layers[p.len()].keys().min() else {
        return Ok(Verdict::no(st));
    };
    // walk the back-pointers, then hand out isolated tasks in order
    let mut steps = Vec::with_capacity(p.len());
    let mut key = last;
    for i in (1..=p.len()).rev() {
        let (prev, step) = layers[i][&key];
        steps.push(step);
        key = prev;
    }
    steps.reverse();
    let mut h = vec![0usize; w];
    let mut taken = vec![false; tn.len()];
    let mut lin = Vec::with_capacity(p.len());
    for (i, step) in steps.into_iter().enumerate() {
        let t = match step {
            Step::Chain(j) => {
                h[j] += 1;
                ch.chains[j][h[j] - 1]
            }
            _ => *ch
                .isolated
                .iter()
                .find(|&&t| !taken[t] && tn.action(t) == Some(p[i]))
                .expect("guard guarantees a free isolated task"),
        };
        taken[t] = true;
        lin.push(t);
    }
    Ok(Verdict::yes(lin, st))
}

/// Reachability or executability over `R_s[h_1..h_w][r_1..r_|E|]`.
pub fn reach_exec_gpow(inst: &Instance, cd: &ChainDecomposition, cfg: &Config) -> Result<Verdict> {
    let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
    reach_exec_gpow_in(inst, cd, &g, cfg)
}

pub(crate) fn reach_exec_gpow_in(
    inst: &Instance,
    cd: &ChainDecomposition,
    g: &StateGraph,
    cfg: &Config,
) -> Result<Verdict> {
    check_primitive(inst)?;
    let tn = &inst.network;
    let na = g.num_actions();
    let mut st = Stats {
        route: Some(Route::Gpow),
        ..Stats::default()
    };
    enum Goal {
        Reach(crate::model::State),
        Exec(ActionMultiset),
    }
    let goal = match &inst.query {
        Query::Reach(s) => Goal::Reach(s.clone()),
        Query::Executable(s) => Goal::Exec(s.clone()),
        Query::Exists => Goal::Exec(tn.action_multiset()),
        Query::Verify(_) => return Err(Error::Invalid("use verify_gpow for plans".into())),
    };
    if let Goal::Exec(s) = &goal {
        if reduce_r0(tn, s, na).is_some() {
            return Ok(Verdict::no(st).with_reason("R0"));
        }
    }
    let ch = Chains::new(tn, cd);
    let w = ch.w();
    let classes = action_equivalence_classes(g);

    // isolated tasks grouped by action class; only classes that occur get a counter
    let mut class_slot: Vec<Option<usize>> = vec![None; classes.len()];
    let mut slot_class: Vec<usize> = Vec::new();
    let mut slot_cap: Vec<u32> = Vec::new();
    let mut u_count = vec![0u32; na];
    for &t in &ch.isolated {
        let a = tn.action(t).unwrap();
        u_count[a] += 1;
        let c = classes.of_action[a];
        let s = *class_slot[c].get_or_insert_with(|| {
            slot_class.push(c);
            slot_cap.push(0);
            slot_class.len() - 1
        });
        slot_cap[s] += 1;
    }
    let m = slot_class.len();
    let mut radix: Vec<u128> = vec![g.k() as u128];
    radix.extend(ch.chains.iter().map(|c| c.len() as u128 + 1));
    radix.extend(slot_cap.iter().map(|&c| c as u128 + 1));
    let packer = Packer::new(radix)?;

    let prefix: Vec<Vec<Vec<u32>>> = ch
        .chains
        .iter()
        .map(|c| {
            let mut rows = vec![vec![0u32; na]];
            for &t in c {
                let mut row = rows.last().unwrap().clone();
                row[tn.action(t).unwrap()] += 1;
                rows.push(row);
            }
            rows
        })
        .collect();
    let demand: Vec<(usize, u32)> = match &goal {
        Goal::Exec(s) => s.iter().map(|(a, n)| (a, n as u32)).collect(),
        Goal::Reach(_) => Vec::new(),
    };
    // per slot: how many isolated tasks the demand still requires, or None if unmeetable
    let accepts = |v: &[u32]| -> bool {
        match &goal {
            Goal::Reach(sg) => sg.is_subset(&g.states[v[0] as usize]),
            Goal::Exec(_) => {
                let h = &v[1..1 + w];
                let r = &v[1 + w..];
                let mut need_per_slot = vec![0u32; m];
                for &(a, min) in &demand {
                    let c: u32 = (0..w).map(|j| prefix[j][h[j] as usize][a]).sum();
                    let need = min.saturating_sub(c);
                    if need == 0 {
                        continue;
                    }
                    if need > u_count[a] {
                        return false;
                    }
                    match class_slot[classes.of_action[a]] {
                        Some(s) => need_per_slot[s] += need,
                        None => return false,
                    }
                }
                need_per_slot.iter().zip(r).all(|(n, have)| n <= have)
            }
        }
    };

    let mut start = vec![0u32; 1 + w + m];
    start[0] = 0;
    let start_key = packer.pack(&start);
    let mut back: HashMap<u128, (u128, Step)> = HashMap::from([(start_key, (start_key, Step::Start))]);
    let mut queue = VecDeque::from([start_key]);
    let mut hit = None;
    if accepts(&start) {
        hit = Some(start_key);
    }
    while hit.is_none() {
        let Some(key) = queue.pop_front() else { break };
        st.nodes += 1;
        if st.nodes > cfg.budget {
            return Err(Error::BudgetExceeded("gpow dynamic program"));
        }
        let v = packer.unpack(key);
        let s = v[0] as usize;
        let mut succ: Vec<(Vec<u32>, Step)> = Vec::new();
        for j in 0..w {
            if let Some(t) = ch.next_ready(&v[1..1 + w], j) {
                if let Some(s2) = g.successor(s, tn.action(t).unwrap()) {
                    let mut nv = v.clone();
                    nv[0] = s2 as u32;
                    nv[1 + j] += 1;
                    succ.push((nv, Step::Chain(j)));
                }
            }
        }
        for i in 0..m {
            if v[1 + w + i] >= slot_cap[i] {
                continue;
            }
            let sig = classes.classes[slot_class[i]].signature[s];
            if sig == crate::stategraph::UNDEFINED {
                continue;
            }
            let mut nv = v.clone();
            nv[0] = sig;
            nv[1 + w + i] += 1;
            succ.push((nv, Step::Isolated(i)));
        }
        for (nv, step) in succ {
            let nk = packer.pack(&nv);
            if let Entry::Vacant(e) = back.entry(nk) {
                e.insert((key, step));
                queue.push_back(nk);
                if accepts(&nv) {
                    hit = Some(nk);
                    break;
                }
            }
        }
    }
    let Some(end) = hit else {
        return Ok(Verdict::no(st));
    };

    let mut steps = Vec::new();
    let mut key = end;
    while key != start_key {
        let (prev, step) = back[&key];
        steps.push(step);
        key = prev;
    }
    steps.reverse();

    // isolated tasks: demanded actions first, then anything in the class
    let final_h: Vec<u32> = packer.unpack(end)[1..1 + w].to_vec();
    let mut pools: Vec<Vec<TaskId>> = vec![Vec::new(); m];
    let mut taken = vec![false; tn.len()];
    for &(a, min) in &demand {
        let c: u32 = (0..w).map(|j| prefix[j][final_h[j] as usize][a]).sum();
        let need = min.saturating_sub(c) as usize;
        let slot = match class_slot[classes.of_action[a]] {
            Some(s) => s,
            None => continue,
        };
        for &t in ch.isolated.iter().filter(|&&t| tn.action(t) == Some(a)).take(need) {
            pools[slot].push(t);
            taken[t] = true;
        }
    }
    for &t in &ch.isolated {
        if !taken[t] {
            let slot = class_slot[classes.of_action[tn.action(t).unwrap()]].unwrap();
            pools[slot].push(t);
        }
    }
    for p in &mut pools {
        p.reverse();
    }
    let mut h = vec![0usize; w];
    let mut lin = Vec::with_capacity(steps.len());
    for step in steps {
        match step {
            Step::Chain(j) => {
                lin.push(ch.chains[j][h[j]]);
                h[j] += 1;
            }
            Step::Isolated(i) => lin.push(pools[i].pop().expect("counter bounded by class size")),
            Step::Start => {}
        }
    }
    Ok(Verdict::yes(lin, st))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::diamond;
    use crate::model::Plan;
    use crate::ordergraph::min_chain_decomposition;
    use crate::solvers::witness_is_valid;

    #[test]
    fn diamond_verify() {
        let inst = diamond();
        let d = &inst.domain;
        let plan = d.plan(&["a2", "a1", "a3", "a1"]).unwrap();
        let q = inst.with_query(Query::Verify(plan));
        let cd = min_chain_decomposition(&q.network);
        let v = verify_gpow(&q, &cd, &Config::default()).unwrap();
        assert!(v.answer);
        assert!(witness_is_valid(&q, v.linearization().unwrap()));

        let wrong = inst.with_query(Query::Verify(d.plan(&["a2", "a2", "a3", "a1"]).unwrap()));
        assert!(!verify_gpow(&wrong, &cd, &Config::default()).unwrap().answer);
        let short = inst.with_query(Query::Verify(Plan(vec![])));
        assert!(!verify_gpow(&short, &cd, &Config::default()).unwrap().answer);
    }

    #[test]
    fn diamond_reach_and_exec() {
        let inst = diamond();
        let cd = min_chain_decomposition(&inst.network);
        let cfg = Config::default();
        let reach = inst.with_query(Query::Reach(inst.domain.state(&["2"]).unwrap()));
        let v = reach_exec_gpow(&reach, &cd, &cfg).unwrap();
        assert!(v.answer);
        assert!(witness_is_valid(&reach, v.linearization().unwrap()));

        let trivial = inst.with_query(Query::Reach(inst.domain.empty_state()));
        let v = reach_exec_gpow(&trivial, &cd, &cfg).unwrap();
        assert!(v.answer && v.linearization().unwrap().is_empty());

        let exec = inst.with_query(Query::Executable(inst.network.action_multiset()));
        let v = reach_exec_gpow(&exec, &cd, &cfg).unwrap();
        assert!(v.answer);
        assert_eq!(v.linearization().unwrap().len(), 4);
        assert!(witness_is_valid(&exec, v.linearization().unwrap()));
    }
}

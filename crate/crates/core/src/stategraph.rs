//! Reachable-state graphs, action equivalence, the R0/R1 reduction rules
//! and the class-labelled graph used by the vertex-cover solvers.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{ActionId, ActionMultiset, Domain, Label, State, TaskId, TaskNetwork};

pub const DEFAULT_STATE_CAP: usize = 4096;

/// Marker for "action not executable here" in a signature.
pub const UNDEFINED: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StgArc {
    pub from: usize,
    pub to: usize,
    pub action: ActionId,
}

/// All states reachable from `s0` by any sequence of domain actions.
/// State 0 is `s0`; states are numbered in BFS order.
#[derive(Debug, Clone)]
pub struct StateGraph {
    pub states: Vec<State>,
    pub arcs: Vec<StgArc>,
    index: HashMap<State, usize>,
    /// `trans[i][a]` is the successor of state `i` under action `a`, or [`UNDEFINED`].
    trans: Vec<Vec<u32>>,
}

impl StateGraph {
    pub fn k(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, s: &State) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn successor(&self, state: usize, a: ActionId) -> Option<usize> {
        match self.trans[state][a] {
            UNDEFINED => None,
            t => Some(t as usize),
        }
    }

    pub fn num_actions(&self) -> usize {
        self.trans.first().map_or(0, Vec::len)
    }

    pub fn to_dot(&self, d: &Domain) -> String {
        let mut out = String::from("digraph stg {\n");
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(
                out,
                "  s{i} [label=\"{{{}}}\"];",
                d.state_names(s).join(",")
            );
        }
        for a in &self.arcs {
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"{}\"];",
                a.from,
                a.to,
                d.action(a.action).name
            );
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_state_graph(d: &Domain, s0: &State, cap: usize) -> Result<StateGraph> {
    let na = d.actions().len();
    let mut states = vec![s0.clone()];
    let mut index = HashMap::from([(s0.clone(), 0usize)]);
    let mut trans: Vec<Vec<u32>> = Vec::new();
    let mut arcs = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = vec![UNDEFINED; na];
        for (a, def) in d.actions().iter().enumerate() {
            let Some(next) = def.apply(&states[i]) else {
                continue;
            };
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if states.len() >= cap {
                        return Err(Error::StateSpaceExceeded { cap });
                    }
                    states.push(next.clone());
                    index.insert(next, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            row[a] = j as u32;
            arcs.push(StgArc {
                from: i,
                to: j,
                action: a,
            });
        }
        if trans.len() <= i {
            trans.resize(i + 1, Vec::new());
        }
        trans[i] = row;
    }
    Ok(StateGraph {
        states,
        arcs,
        index,
        trans,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub signature: Vec<u32>,
    pub members: Vec<ActionId>,
}

/// Partition of the domain's actions by their behaviour on the STG.
#[derive(Debug, Clone)]
pub struct ActionClasses {
    pub classes: Vec<EquivalenceClass>,
    pub of_action: Vec<usize>,
}

impl ActionClasses {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn equivalent(&self, a: ActionId, b: ActionId) -> bool {
        self.of_action[a] == self.of_action[b]
    }
}

pub fn action_equivalence_classes(g: &StateGraph) -> ActionClasses {
    let na = g.num_actions();
    let mut by_sig: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut classes: Vec<EquivalenceClass> = Vec::new();
    let mut of_action = Vec::with_capacity(na);
    for a in 0..na {
        let sig: Vec<u32> = g.trans.iter().map(|row| row[a]).collect();
        let c = *by_sig.entry(sig.clone()).or_insert_with(|| {
            classes.push(EquivalenceClass {
                signature: sig,
                members: Vec::new(),
            });
            classes.len() - 1
        });
        classes[c].members.push(a);
        of_action.push(c);
    }
    ActionClasses {
        classes,
        of_action,
    }
}

/// `|T_a|` for every action of the domain.
pub fn supply(tn: &TaskNetwork, num_actions: usize) -> Vec<usize> {
    let mut out = vec![0; num_actions];
    for l in tn.labels() {
        if let Label::Action(a) = l {
            out[*a] += 1;
        }
    }
    out
}

/// R0: the first action whose demand exceeds its supply, if any.
pub fn reduce_r0(tn: &TaskNetwork, s: &ActionMultiset, num_actions: usize) -> Option<ActionId> {
    let max = supply(tn, num_actions);
    s.iter().find(|&(a, n)| n > max[a]).map(|(a, _)| a)
}

/// Result of applying R1 to a fixpoint.
#[derive(Debug, Clone)]
pub struct R1Outcome {
    pub network: TaskNetwork,
    pub demand: ActionMultiset,
    /// `(merged, into)` in the order the merges happened.
    pub merges: Vec<(ActionId, ActionId)>,
}

/// Exhaustively merges equivalent actions whose tasks share `≺⁺`
/// neighbourhoods. Pairs are scanned in name order and the scan restarts
/// after every merge.
pub fn reduce_r1(
    d: &Domain,
    tn: &TaskNetwork,
    demand: &ActionMultiset,
    classes: &ActionClasses,
) -> R1Outcome {
    let mut labels: Vec<Label> = tn.labels().to_vec();
    let mut demand = demand.clone();
    let mut merges = Vec::new();
    let mut order: Vec<ActionId> = (0..d.actions().len()).collect();
    order.sort_by(|&a, &b| d.action(a).name.cmp(&d.action(b).name));
    'restart: loop {
        let present: Vec<ActionId> = order
            .iter()
            .copied()
            .filter(|&a| {
                demand.count(a) > 0 || labels.contains(&Label::Action(a))
            })
            .collect();
        for (i, &a1) in present.iter().enumerate() {
            for &a2 in &present[i + 1..] {
                if !classes.equivalent(a1, a2) || !same_neighbourhoods(tn, &labels, a1, a2) {
                    continue;
                }
                for l in labels.iter_mut() {
                    if *l == Label::Action(a2) {
                        *l = Label::Action(a1);
                    }
                }
                let n = demand.count(a2);
                let mut rewritten = ActionMultiset::new();
                for (a, c) in demand.iter().filter(|&(a, _)| a != a2) {
                    rewritten.add(a, c);
                }
                rewritten.add(a1, n);
                demand = rewritten;
                merges.push((a2, a1));
                continue 'restart;
            }
        }
        break;
    }
    R1Outcome {
        network: tn.with_labels(labels),
        demand,
        merges,
    }
}

fn same_neighbourhoods(tn: &TaskNetwork, labels: &[Label], a1: ActionId, a2: ActionId) -> bool {
    let t1: Vec<TaskId> = (0..tn.len()).filter(|&t| labels[t] == Label::Action(a1)).collect();
    let t2: Vec<TaskId> = (0..tn.len()).filter(|&t| labels[t] == Label::Action(a2)).collect();
    t1.iter().all(|&x| {
        t2.iter().all(|&y| {
            tn.predecessors(x) == tn.predecessors(y) && tn.successors(x) == tn.successors(y)
        })
    })
}

/// Tasks whose actions are equivalent and whose admissible intervals agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongClass {
    pub action_class: usize,
    pub interval: (usize, usize),
    pub members: Vec<TaskId>,
}

/// `[max{i | v_i ≺⁺ t}, min{i | t ≺⁺ v_i} − 1]` with positions counted
/// from 1, the empty maximum read as 0 and the empty minimum as |V'|+1.
pub fn admissible_interval(tn: &TaskNetwork, vc_order: &[TaskId], t: TaskId) -> (usize, usize) {
    let lo = vc_order
        .iter()
        .enumerate()
        .filter(|&(_, &v)| tn.precedes(v, t))
        .map(|(i, _)| i + 1)
        .max()
        .unwrap_or(0);
    let hi = vc_order
        .iter()
        .enumerate()
        .filter(|&(_, &v)| tn.precedes(t, v))
        .map(|(i, _)| i)
        .min()
        .unwrap_or(vc_order.len());
    (lo, hi)
}

/// Partition of `T \ V'` into strong equivalence classes.
pub fn strong_classes(
    tn: &TaskNetwork,
    classes: &ActionClasses,
    vc_order: &[TaskId],
) -> Vec<StrongClass> {
    let rest: Vec<TaskId> = (0..tn.len()).filter(|t| !vc_order.contains(t)).collect();
    strong_classes_among(tn, classes, vc_order, &rest)
}

/// Strong classes of the given primitive tasks, ordered by first member.
pub fn strong_classes_among(
    tn: &TaskNetwork,
    classes: &ActionClasses,
    vc_order: &[TaskId],
    tasks: &[TaskId],
) -> Vec<StrongClass> {
    let mut groups: BTreeMap<(usize, (usize, usize)), usize> = BTreeMap::new();
    let mut out: Vec<StrongClass> = Vec::new();
    for &t in tasks {
        let a = tn.action(t).expect("strong classes need primitive tasks");
        let key = (classes.of_action[a], admissible_interval(tn, vc_order, t));
        let idx = *groups.entry(key).or_insert_with(|| {
            out.push(StrongClass {
                action_class: key.0,
                interval: key.1,
                members: Vec::new(),
            });
            out.len() - 1
        });
        out[idx].members.push(t);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassArc {
    pub from: usize,
    pub to: usize,
    pub class: usize,
}

/// STG vertices with one arc per (state, strong class) transition.
#[derive(Debug, Clone)]
pub struct AugmentedGraph {
    pub k: usize,
    pub arcs: Vec<ClassArc>,
}

pub fn augmented_graph(
    g: &StateGraph,
    classes: &ActionClasses,
    strong: &[StrongClass],
) -> AugmentedGraph {
    let mut arcs = Vec::new();
    for s in 0..g.k() {
        for (ci, c) in strong.iter().enumerate() {
            let sig = classes.classes[c.action_class].signature[s];
            if sig != UNDEFINED {
                arcs.push(ClassArc {
                    from: s,
                    to: sig as usize,
                    class: ci,
                });
            }
        }
    }
    AugmentedGraph { k: g.k(), arcs }
}

impl AugmentedGraph {
    pub fn to_dot(&self, g: &StateGraph, d: &Domain, strong: &[StrongClass]) -> String {
        let mut out = String::from("digraph augmented {\n");
        for (i, s) in g.states.iter().enumerate() {
            let _ = writeln!(out, "  s{i} [label=\"{{{}}}\"];", d.state_names(s).join(","));
        }
        for a in &self.arcs {
            let c = &strong[a.class];
            let _ = writeln!(
                out,
                "  s{} -> s{} [label=\"e{} [{},{}]\"];",
                a.from, a.to, a.class, c.interval.0, c.interval.1
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Tasks per action class, for quick lookups in the solvers.
pub fn tasks_by_class(tn: &TaskNetwork, classes: &ActionClasses) -> Vec<BitSet> {
    let mut out = vec![BitSet::new(tn.len()); classes.len()];
    for t in 0..tn.len() {
        if let Some(a) = tn.action(t) {
            out[classes.of_action[a]].insert(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::diamond;
    use crate::model::{execute_action, Instance, Query};

    fn antichain(inst: &Instance, actions: &[&str]) -> TaskNetwork {
        let mut b = TaskNetwork::builder();
        for (i, a) in actions.iter().enumerate() {
            b.task(format!("t{}", i + 1), Label::Action(inst.domain.action_id(a).unwrap()));
        }
        b.build().unwrap()
    }

    #[test]
    fn diamond_state_graph() {
        let inst = diamond();
        let g = build_state_graph(&inst.domain, &inst.init, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(g.k(), 4);
        // closed under execution
        for s in &g.states {
            for a in 0..inst.domain.actions().len() {
                if let Ok(n) = execute_action(&inst.domain, s, a) {
                    assert!(g.state_index(&n).is_some());
                }
            }
        }
        for arc in &g.arcs {
            let next = execute_action(&inst.domain, &g.states[arc.from], arc.action).unwrap();
            assert_eq!(g.states[arc.to], next);
        }
    }

    #[test]
    fn no_executable_action() {
        let mut b = Domain::builder();
        let p = b.proposition("p");
        b.action("x", &[p], &[], &[]);
        let d = b.build().unwrap();
        let g = build_state_graph(&d, &d.empty_state(), 10).unwrap();
        assert_eq!((g.k(), g.arcs.len()), (1, 0));
    }

    #[test]
    fn state_cap_is_enforced() {
        let inst = diamond();
        assert_eq!(
            build_state_graph(&inst.domain, &inst.init, 3).unwrap_err(),
            Error::StateSpaceExceeded { cap: 3 }
        );
    }

    #[test]
    fn equivalence_examples() {
        let inst = diamond();
        let g = build_state_graph(&inst.domain, &inst.init, DEFAULT_STATE_CAP).unwrap();
        let ec = action_equivalence_classes(&g);
        assert_eq!(ec.len(), 3);

        let mut b = Domain::builder();
        let p = b.proposition("p");
        b.action("x", &[], &[], &[p]);
        b.action("y", &[], &[], &[p]);
        let d = b.build().unwrap();
        let g = build_state_graph(&d, &d.empty_state(), 10).unwrap();
        let ec = action_equivalence_classes(&g);
        assert_eq!(ec.len(), 1);
        assert!(g.k() == 2 && ec.len() <= 9);
    }

    #[test]
    fn r0_examples() {
        let inst = diamond();
        let a1 = inst.domain.action_id("a1").unwrap();
        let one = antichain(&inst, &["a1"]);
        let two = antichain(&inst, &["a1", "a1"]);
        let na = inst.domain.actions().len();
        assert_eq!(reduce_r0(&one, &[a1, a1].into_iter().collect(), na), Some(a1));
        assert_eq!(reduce_r0(&one, &ActionMultiset::new(), na), None);
        assert_eq!(reduce_r0(&two, &[a1].into_iter().collect(), na), None);
    }

    #[test]
    fn r1_merges_identical_actions_on_antichain() {
        let mut b = Domain::builder();
        let p = b.proposition("p");
        let a = b.action("a", &[], &[], &[p]);
        let bb = b.action("b", &[], &[], &[p]);
        let d = b.build().unwrap();
        let mut n = TaskNetwork::builder();
        n.task("t1", Label::Action(a));
        n.task("t2", Label::Action(bb));
        let tn = n.build().unwrap();
        let g = build_state_graph(&d, &d.empty_state(), 10).unwrap();
        let ec = action_equivalence_classes(&g);
        let out = reduce_r1(&d, &tn, &[a, bb].into_iter().collect(), &ec);
        assert_eq!(out.merges, vec![(bb, a)]);
        assert_eq!(out.demand.count(a), 2);
        assert!(out.network.labels().iter().all(|&l| l == Label::Action(a)));
    }

    #[test]
    fn r1_respects_neighbourhoods() {
        let mut b = Domain::builder();
        let p = b.proposition("p");
        let a = b.action("a", &[], &[], &[p]);
        let bb = b.action("b", &[], &[], &[p]);
        let c = b.action("c", &[], &[p], &[]);
        let d = b.build().unwrap();
        let mut n = TaskNetwork::builder();
        let t1 = n.task("t1", Label::Action(a));
        let t2 = n.task("t2", Label::Action(bb));
        let t3 = n.task("t3", Label::Action(c));
        n.before(t3, t2);
        let _ = t1;
        let tn = n.build().unwrap();
        let g = build_state_graph(&d, &d.empty_state(), 10).unwrap();
        let ec = action_equivalence_classes(&g);
        let out = reduce_r1(&d, &tn, &[a, bb].into_iter().collect(), &ec);
        assert!(out.merges.is_empty());
    }

    #[test]
    fn interval_examples() {
        let inst = diamond();
        let tn = &inst.network;
        // no neighbours in V'
        assert_eq!(admissible_interval(tn, &[], 1), (0, 0));
        let mut b = TaskNetwork::builder();
        let ids: Vec<_> = (0..6)
            .map(|i| b.task(format!("x{i}"), Label::Action(0)))
            .collect();
        let t = b.task("t", Label::Action(0));
        b.before(ids[1], t).before(t, ids[4]);
        let tn = b.build().unwrap();
        // v_1..v_5 = x0..x4: v_2 ≺ t ≺ v_5
        assert_eq!(admissible_interval(&tn, &ids[..5], t), (2, 4));
        assert_eq!(admissible_interval(&tn, &[ids[5]], t), (0, 1));
    }

    #[test]
    fn strong_class_examples() {
        let inst = diamond();
        let g = build_state_graph(&inst.domain, &inst.init, DEFAULT_STATE_CAP).unwrap();
        let ec = action_equivalence_classes(&g);
        let tn = &inst.network;
        let sc = strong_classes(tn, &ec, &[0, 3]);
        let mut all: Vec<_> = sc.iter().flat_map(|c| c.members.clone()).collect();
        all.sort();
        assert_eq!(all, vec![1, 2]);
        // t2 and t3 both sit between v_1 = t1 and v_2 = t4
        assert!(sc.iter().all(|c| c.interval == (1, 1)));

        let aug = augmented_graph(&g, &ec, &[]);
        assert!(aug.arcs.is_empty());
        let all_four = strong_classes(tn, &ec, &[]);
        let aug = augmented_graph(&g, &ec, &all_four);
        let stg_arcs: usize = g.arcs.len();
        // t2 and t4 share a class, so the augmented graph mirrors a1, a2, a3 once each
        assert_eq!(all_four.len(), 3);
        assert_eq!(aug.arcs.len(), stg_arcs);
    }

    #[test]
    fn dot_has_one_node_per_state() {
        let inst = diamond();
        let g = build_state_graph(&inst.domain, &inst.init, DEFAULT_STATE_CAP).unwrap();
        let dot = g.to_dot(&inst.domain);
        assert_eq!(dot.matches("[label=\"{").count(), 4);
        let _ = Query::Exists;
    }
}

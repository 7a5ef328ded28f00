//! Domains, task networks, states and plans, with the execution semantics
//! every solver in this crate is measured against.
//!
//! Names are interned to dense integer ids when a [`Domain`] or
//! [`TaskNetwork`] is built; the original names are kept in side tables so
//! witnesses and reports can be printed in user terms.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

pub type PropId = usize;
pub type ActionId = usize;
pub type CompoundId = usize;
pub type TaskId = usize;

/// A subset of the domain's propositions, as a bit vector of width |F|.
pub type State = BitSet;

/// What a task stands for: an action or a compound task name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Action(ActionId),
    Compound(CompoundId),
}

impl Label {
    pub fn action(self) -> Option<ActionId> {
        match self {
            Label::Action(a) => Some(a),
            Label::Compound(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDef {
    pub name: String,
    pub pre: State,
    pub del: State,
    pub add: State,
}

impl ActionDef {
    #[inline]
    pub fn is_executable(&self, s: &State) -> bool {
        self.pre.is_subset(s)
    }

    /// `(s \ del) ∪ add`, without checking the precondition.
    #[inline]
    pub fn effect(&self, s: &State) -> State {
        let mut out = s.clone();
        out.difference_with(&self.del);
        out.union_with(&self.add);
        out
    }

    #[inline]
    pub fn apply(&self, s: &State) -> Option<State> {
        self.is_executable(s).then(|| self.effect(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDef {
    pub compound: CompoundId,
    pub network: TaskNetwork,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    propositions: Vec<String>,
    prop_index: HashMap<String, PropId>,
    actions: Vec<ActionDef>,
    action_index: HashMap<String, ActionId>,
    compounds: Vec<String>,
    compound_index: HashMap<String, CompoundId>,
    methods: Vec<Vec<MethodDef>>,
}

impl Domain {
    pub fn builder() -> DomainBuilder {
        DomainBuilder::default()
    }

    pub fn num_props(&self) -> usize {
        self.propositions.len()
    }

    pub fn propositions(&self) -> &[String] {
        &self.propositions
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.prop_index.get(name).copied()
    }

    pub fn actions(&self) -> &[ActionDef] {
        &self.actions
    }

    pub fn action(&self, a: ActionId) -> &ActionDef {
        &self.actions[a]
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn compounds(&self) -> &[String] {
        &self.compounds
    }

    pub fn compound_id(&self, name: &str) -> Option<CompoundId> {
        self.compound_index.get(name).copied()
    }

    pub fn methods(&self, c: CompoundId) -> &[MethodDef] {
        &self.methods[c]
    }

    pub fn label_name(&self, label: Label) -> &str {
        match label {
            Label::Action(a) => &self.actions[a].name,
            Label::Compound(c) => &self.compounds[c],
        }
    }

    pub fn resolve_label(&self, name: &str) -> Option<Label> {
        self.action_id(name)
            .map(Label::Action)
            .or_else(|| self.compound_id(name).map(Label::Compound))
    }

    pub fn empty_state(&self) -> State {
        State::new(self.num_props())
    }

    pub fn state<S: AsRef<str>>(&self, names: &[S]) -> Result<State> {
        let mut s = self.empty_state();
        for n in names {
            let n = n.as_ref();
            let p = self.prop_id(n).ok_or_else(|| Error::UnknownName {
                kind: "proposition",
                name: n.to_string(),
            })?;
            s.insert(p);
        }
        Ok(s)
    }

    pub fn state_names(&self, s: &State) -> Vec<String> {
        s.iter().map(|p| self.propositions[p].clone()).collect()
    }

    pub fn plan<S: AsRef<str>>(&self, names: &[S]) -> Result<Plan> {
        names
            .iter()
            .map(|n| {
                self.action_id(n.as_ref()).ok_or_else(|| Error::UnknownName {
                    kind: "action",
                    name: n.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Plan)
    }
}

/// Incremental construction of a [`Domain`]. Propositions must be declared
/// before the actions that mention them.
#[derive(Debug, Default)]
pub struct DomainBuilder {
    propositions: Vec<String>,
    // name, pre, del, add
    actions: Vec<(String, [Vec<PropId>; 3])>,
    compounds: Vec<String>,
    methods: Vec<MethodDef>,
    errors: Vec<Error>,
}

impl DomainBuilder {
    pub fn proposition(&mut self, name: impl Into<String>) -> PropId {
        let name = name.into();
        if let Some(i) = self.propositions.iter().position(|p| *p == name) {
            self.errors.push(Error::Duplicate {
                kind: "proposition",
                name,
            });
            return i;
        }
        self.propositions.push(name);
        self.propositions.len() - 1
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.propositions.iter().position(|p| p == name)
    }

    pub fn action(
        &mut self,
        name: impl Into<String>,
        pre: &[PropId],
        del: &[PropId],
        add: &[PropId],
    ) -> ActionId {
        let name = name.into();
        if self.actions.iter().any(|a| a.0 == name) {
            self.errors.push(Error::Duplicate {
                kind: "action",
                name: name.clone(),
            });
        }
        self.actions
            .push((name, [pre.to_vec(), del.to_vec(), add.to_vec()]));
        self.actions.len() - 1
    }

    pub fn compound(&mut self, name: impl Into<String>) -> CompoundId {
        let name = name.into();
        if self.compounds.contains(&name) {
            self.errors.push(Error::Duplicate {
                kind: "compound",
                name: name.clone(),
            });
        }
        self.compounds.push(name);
        self.compounds.len() - 1
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.0 == name)
    }

    pub fn compound_id(&self, name: &str) -> Option<CompoundId> {
        self.compounds.iter().position(|c| c == name)
    }

    pub fn resolve_label(&self, name: &str) -> Option<Label> {
        self.action_id(name)
            .map(Label::Action)
            .or_else(|| self.compound_id(name).map(Label::Compound))
    }

    pub fn method(&mut self, compound: CompoundId, network: TaskNetwork) {
        self.methods.push(MethodDef { compound, network });
    }

    pub fn build(self) -> Result<Domain> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        let nf = self.propositions.len();
        let set = |ids: &[PropId], action: &str| -> Result<State> {
            let mut s = State::new(nf);
            for &p in ids {
                if p >= nf {
                    return Err(Error::Invalid(format!(
                        "action `{action}` refers to undeclared proposition #{p}"
                    )));
                }
                s.insert(p);
            }
            Ok(s)
        };
        let mut actions = Vec::with_capacity(self.actions.len());
        for (name, [pre, del, add]) in &self.actions {
            actions.push(ActionDef {
                name: name.clone(),
                pre: set(pre, name)?,
                del: set(del, name)?,
                add: set(add, name)?,
            });
        }
        let action_index: HashMap<_, _> = actions
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.clone(), i))
            .collect();
        let compound_index: HashMap<_, _> = self
            .compounds
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        if let Some(c) = self.compounds.iter().find(|c| action_index.contains_key(*c)) {
            return Err(Error::Invalid(format!(
                "`{c}` is declared both as an action and as a compound task"
            )));
        }
        let mut methods = vec![Vec::new(); self.compounds.len()];
        for m in self.methods {
            if m.compound >= self.compounds.len() {
                return Err(Error::Invalid(format!(
                    "method for undeclared compound #{}",
                    m.compound
                )));
            }
            for &l in m.network.labels() {
                let ok = match l {
                    Label::Action(a) => a < actions.len(),
                    Label::Compound(c) => c < self.compounds.len(),
                };
                if !ok {
                    return Err(Error::Invalid(format!(
                        "method of `{}` uses an undeclared label",
                        self.compounds[m.compound]
                    )));
                }
            }
            methods[m.compound].push(m);
        }
        let prop_index = self
            .propositions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Ok(Domain {
            propositions: self.propositions,
            prop_index,
            actions,
            action_index,
            compounds: self.compounds,
            compound_index,
            methods,
        })
    }
}

/// Reachability closure of a cover relation, stored per task.
#[derive(Debug, Clone)]
struct Closure {
    succ: Vec<BitSet>,
    pred: Vec<BitSet>,
}

/// A task network `(T, ≺⁺, α)` stored by its cover `≺`.
///
/// The cover is canonical: it is sorted and free of transitive arcs. The
/// closure `≺⁺` is computed on first use and cached.
#[derive(Debug)]
pub struct TaskNetwork {
    names: Vec<String>,
    labels: Vec<Label>,
    cover: Vec<(TaskId, TaskId)>,
    closure: OnceLock<Closure>,
}

impl Clone for TaskNetwork {
    fn clone(&self) -> Self {
        let closure = OnceLock::new();
        if let Some(c) = self.closure.get() {
            let _ = closure.set(c.clone());
        }
        Self {
            names: self.names.clone(),
            labels: self.labels.clone(),
            cover: self.cover.clone(),
            closure,
        }
    }
}

impl PartialEq for TaskNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.labels == other.labels && self.cover == other.cover
    }
}

impl Eq for TaskNetwork {}

impl TaskNetwork {
    /// Builds a network from any acyclic arc set over `0..names.len()`.
    /// The arcs may be a cover, the full order, or anything in between;
    /// they are normalized to the cover.
    pub fn new(
        names: Vec<String>,
        labels: Vec<Label>,
        arcs: impl IntoIterator<Item = (TaskId, TaskId)>,
    ) -> Result<Self> {
        if names.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} task names but {} labels",
                names.len(),
                labels.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Duplicate {
                    kind: "task",
                    name: n.clone(),
                });
            }
        }
        let arcs: Vec<_> = arcs.into_iter().collect();
        let n = names.len();
        let closure = closure_of(n, &arcs).map_err(|t| Error::CycleDetected(names[t].clone()))?;
        let cover = cover_from_closure(&closure);
        let cell = OnceLock::new();
        let _ = cell.set(closure);
        Ok(Self {
            names,
            labels,
            cover,
            closure: cell,
        })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), []).expect("empty network is valid")
    }

    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, t: TaskId) -> &str {
        &self.names[t]
    }

    pub fn task_id(&self, name: &str) -> Option<TaskId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, t: TaskId) -> Label {
        self.labels[t]
    }

    /// The action of a primitive task.
    pub fn action(&self, t: TaskId) -> Option<ActionId> {
        self.labels[t].action()
    }

    pub fn cover(&self) -> &[(TaskId, TaskId)] {
        &self.cover
    }

    pub fn is_primitive(&self) -> bool {
        self.labels.iter().all(|l| matches!(l, Label::Action(_)))
    }

    fn closure(&self) -> &Closure {
        self.closure.get_or_init(|| {
            closure_of(self.len(), &self.cover).expect("cover validated at construction")
        })
    }

    /// `a ≺⁺ b`.
    pub fn precedes(&self, a: TaskId, b: TaskId) -> bool {
        self.closure().succ[a].contains(b)
    }

    /// All `b` with `t ≺⁺ b`.
    pub fn successors(&self, t: TaskId) -> &BitSet {
        &self.closure().succ[t]
    }

    /// All `a` with `a ≺⁺ t`.
    pub fn predecessors(&self, t: TaskId) -> &BitSet {
        &self.closure().pred[t]
    }

    /// Action multiset `α(T)` of a primitive network.
    pub fn action_multiset(&self) -> ActionMultiset {
        self.labels.iter().filter_map(|l| l.action()).collect()
    }

    /// Sub-network induced on `keep` (in the given order), with `≺⁺`
    /// restricted to it. Returns the network and, for each kept task, its id
    /// in `self`.
    pub fn restrict(&self, keep: &[TaskId]) -> TaskNetwork {
        let pos: HashMap<TaskId, usize> = keep.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut arcs = Vec::new();
        for (i, &a) in keep.iter().enumerate() {
            for b in self.successors(a).iter() {
                if let Some(&j) = pos.get(&b) {
                    arcs.push((i, j));
                }
            }
        }
        TaskNetwork::new(
            keep.iter().map(|&t| self.names[t].clone()).collect(),
            keep.iter().map(|&t| self.labels[t]).collect(),
            arcs,
        )
        .expect("restriction of a partial order is acyclic")
    }

    pub fn with_labels(&self, labels: Vec<Label>) -> TaskNetwork {
        assert_eq!(labels.len(), self.len());
        let mut n = self.clone();
        n.labels = labels;
        n
    }
}

/// Convenience builder for networks written by hand.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    names: Vec<String>,
    labels: Vec<Label>,
    arcs: Vec<(TaskId, TaskId)>,
}

impl NetworkBuilder {
    pub fn task(&mut self, name: impl Into<String>, label: Label) -> TaskId {
        self.names.push(name.into());
        self.labels.push(label);
        self.names.len() - 1
    }

    pub fn before(&mut self, a: TaskId, b: TaskId) -> &mut Self {
        self.arcs.push((a, b));
        self
    }

    /// Chains the given tasks in order.
    pub fn chain(&mut self, tasks: &[TaskId]) -> &mut Self {
        for w in tasks.windows(2) {
            self.arcs.push((w[0], w[1]));
        }
        self
    }

    pub fn build(self) -> Result<TaskNetwork> {
        TaskNetwork::new(self.names, self.labels, self.arcs)
    }
}

/// Computes successor/predecessor closures; on a cycle, returns a task on it.
fn closure_of(n: usize, arcs: &[(TaskId, TaskId)]) -> std::result::Result<Closure, TaskId> {
    let mut out = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for &(a, b) in arcs {
        if a == b {
            return Err(a);
        }
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<_> = (0..n).rev().filter(|&t| indeg[t] == 0).collect();
    while let Some(t) = stack.pop() {
        order.push(t);
        for &s in &out[t] {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                stack.push(s);
            }
        }
    }
    if order.len() < n {
        return Err((0..n).find(|&t| indeg[t] > 0).unwrap_or(0));
    }
    let mut succ = vec![BitSet::new(n); n];
    for &t in order.iter().rev() {
        let mut s = BitSet::new(n);
        for &v in &out[t] {
            s.insert(v);
            s.union_with(&succ[v]);
        }
        succ[t] = s;
    }
    let mut pred = vec![BitSet::new(n); n];
    for (a, s) in succ.iter().enumerate() {
        for b in s.iter() {
            pred[b].insert(a);
        }
    }
    Ok(Closure { succ, pred })
}

fn cover_from_closure(c: &Closure) -> Vec<(TaskId, TaskId)> {
    let mut cover = Vec::new();
    for (a, s) in c.succ.iter().enumerate() {
        for b in s.iter() {
            if !s.intersects(&c.pred[b]) {
                cover.push((a, b));
            }
        }
    }
    cover
}

/// Reconstructs `≺⁺` from the cover of a network.
pub fn transitive_closure(tn: &TaskNetwork) -> BTreeSet<(TaskId, TaskId)> {
    (0..tn.len())
        .flat_map(|a| tn.successors(a).iter().map(move |b| (a, b)))
        .collect()
}

/// The unique minimal arc set with the same transitive closure as `order`.
pub fn cover_of(
    num_tasks: usize,
    order: &[(TaskId, TaskId)],
) -> Result<BTreeSet<(TaskId, TaskId)>> {
    if let Some(&(a, b)) = order.iter().find(|&&(a, b)| a >= num_tasks || b >= num_tasks) {
        return Err(Error::Invalid(format!("arc ({a}, {b}) out of range")));
    }
    let c = closure_of(num_tasks, order).map_err(|t| Error::CycleDetected(format!("#{t}")))?;
    Ok(cover_from_closure(&c).into_iter().collect())
}

/// A sequence of actions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Plan(pub Vec<ActionId>);

/// Multiset of actions, as action → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActionMultiset(BTreeMap<ActionId, usize>);

impl ActionMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, a: ActionId) -> usize {
        self.0.get(&a).copied().unwrap_or(0)
    }

    pub fn add(&mut self, a: ActionId, n: usize) {
        if n > 0 {
            *self.0.entry(a).or_default() += n;
        }
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActionId, usize)> + '_ {
        self.0.iter().map(|(&a, &n)| (a, n))
    }

    /// Whether every action of `self` occurs at least as often in `other`.
    pub fn is_covered_by(&self, other: &ActionMultiset) -> bool {
        self.iter().all(|(a, n)| other.count(a) >= n)
    }
}

impl FromIterator<ActionId> for ActionMultiset {
    fn from_iter<I: IntoIterator<Item = ActionId>>(iter: I) -> Self {
        let mut m = ActionMultiset::new();
        for a in iter {
            m.add(a, 1);
        }
        m
    }
}

/// The question asked about an initial network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Verify(Plan),
    Exists,
    Executable(ActionMultiset),
    Reach(State),
}

impl Query {
    pub fn kind(&self) -> QueryKind {
        match self {
            Query::Verify(_) => QueryKind::Verify,
            Query::Exists => QueryKind::Exists,
            Query::Executable(_) => QueryKind::Executable,
            Query::Reach(_) => QueryKind::Reach,
        }
    }

    /// Verification and existence ask for full solutions.
    pub fn wants_full(&self) -> bool {
        matches!(self, Query::Verify(_) | Query::Exists)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueryKind {
    Verify,
    Exists,
    Executable,
    Reach,
}

impl QueryKind {
    pub const ALL: [QueryKind; 4] = [
        QueryKind::Verify,
        QueryKind::Exists,
        QueryKind::Executable,
        QueryKind::Reach,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Verify => "verify",
            QueryKind::Exists => "exists",
            QueryKind::Executable => "executable",
            QueryKind::Reach => "reach",
        }
    }
}

/// A complete problem: domain, initial network, initial state and query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub domain: Arc<Domain>,
    pub network: TaskNetwork,
    pub init: State,
    pub query: Query,
}

impl Instance {
    pub fn new(domain: impl Into<Arc<Domain>>, network: TaskNetwork, init: State, query: Query) -> Self {
        Self {
            domain: domain.into(),
            network,
            init,
            query,
        }
    }

    pub fn with_query(&self, query: Query) -> Self {
        Self {
            query,
            ..self.clone()
        }
    }

    pub fn with_network(&self, network: TaskNetwork) -> Self {
        Self {
            network,
            ..self.clone()
        }
    }
}

pub fn execute_action(d: &Domain, s: &State, a: ActionId) -> Result<State> {
    let def = d.action(a);
    if def.is_executable(s) {
        Ok(def.effect(s))
    } else {
        Err(Error::PreconditionUnsatisfied {
            index: None,
            missing: d.state_names(&def.pre.minus(s)),
        })
    }
}

pub fn execute_plan(d: &Domain, s0: &State, plan: &Plan) -> Result<State> {
    let mut s = s0.clone();
    for (i, &a) in plan.0.iter().enumerate() {
        s = execute_action(d, &s, a).map_err(|e| match e {
            Error::PreconditionUnsatisfied { missing, .. } => Error::PreconditionUnsatisfied {
                index: Some(i),
                missing,
            },
            other => other,
        })?;
    }
    Ok(s)
}

/// Whether `seq` lists every task exactly once without violating `≺⁺`.
pub fn is_linearization(tn: &TaskNetwork, seq: &[TaskId]) -> bool {
    if seq.len() != tn.len() {
        return false;
    }
    let mut placed = BitSet::new(tn.len());
    for &t in seq {
        if t >= tn.len() || placed.contains(t) {
            return false;
        }
        if !tn.predecessors(t).is_subset(&placed) {
            return false;
        }
        placed.insert(t);
    }
    true
}

/// Checks that `tn_sol` with linearization `lin` is a solution (or a full
/// solution) to `(d, initial, s0)`.
///
/// Tasks are matched to the decomposed initial network by name. For a
/// compound initial network every decomposition is tried, up to `cap`
/// decompositions.
pub fn is_solution(
    tn_sol: &TaskNetwork,
    lin: &[TaskId],
    d: &Domain,
    initial: &TaskNetwork,
    s0: &State,
    full: bool,
) -> bool {
    if !tn_sol.is_primitive() || !is_linearization(tn_sol, lin) {
        return false;
    }
    let plan = Plan(lin.iter().map(|&t| tn_sol.action(t).unwrap()).collect());
    if execute_plan(d, s0, &plan).is_err() {
        return false;
    }
    if initial.is_primitive() {
        return matches_decomposition(tn_sol, initial, full);
    }
    match crate::hierarchy::Decompositions::new(initial, d, false) {
        Ok(stream) => stream
            .take(1 << 20)
            .filter_map(|r| r.ok())
            .any(|dec| matches_decomposition(tn_sol, &dec.network, full)),
        Err(_) => false,
    }
}

/// The three subset clauses of the solution definition, plus `T' = T*` when `full`.
fn matches_decomposition(tn_sol: &TaskNetwork, star: &TaskNetwork, full: bool) -> bool {
    if full && tn_sol.len() != star.len() {
        return false;
    }
    let mut to_star = Vec::with_capacity(tn_sol.len());
    for t in 0..tn_sol.len() {
        match star.task_id(tn_sol.name(t)) {
            Some(u) if star.label(u) == tn_sol.label(t) => to_star.push(u),
            _ => return false,
        }
    }
    let from_star: HashMap<TaskId, TaskId> =
        to_star.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    for (t, &u) in to_star.iter().enumerate() {
        for p in star.predecessors(u).iter() {
            match from_star.get(&p) {
                Some(&pt) if tn_sol.precedes(pt, t) => {}
                _ => return false,
            }
        }
    }
    true
}


#[cfg(test)]
mod tests {
    use super::fixtures::diamond;
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("t{i}")).collect()
    }

    fn net(n: usize, arcs: &[(usize, usize)]) -> TaskNetwork {
        TaskNetwork::new(names(n), vec![Label::Action(0); n], arcs.iter().copied()).unwrap()
    }

    fn brute_closure(n: usize, arcs: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in arcs {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if reach[i][j] {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn closure_examples() {
        assert!(transitive_closure(&net(3, &[])).is_empty());
        let chain = net(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            transitive_closure(&chain),
            [(0, 1), (1, 2), (0, 2)].into_iter().collect()
        );
        let diamond = [(0, 1), (0, 2), (1, 3), (2, 3)];
        let mut expect = brute_closure(4, &diamond);
        assert_eq!(transitive_closure(&net(4, &diamond)), expect);
        expect.remove(&(0, 3));
        assert_eq!(expect.len(), 4);
    }

    #[test]
    fn cover_examples() {
        assert_eq!(
            cover_of(3, &[(0, 1), (1, 2), (0, 2)]).unwrap(),
            [(0, 1), (1, 2)].into_iter().collect()
        );
        assert!(cover_of(0, &[]).unwrap().is_empty());
        let total: Vec<_> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        assert_eq!(total.len(), 10);
        let c: Vec<_> = cover_of(5, &total).unwrap().into_iter().collect();
        assert_eq!(c, vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(brute_closure(5, &c), brute_closure(5, &total));
        assert!(matches!(
            cover_of(2, &[(0, 1), (1, 0)]),
            Err(Error::CycleDetected(_))
        ));
    }

    #[test]
    fn cyclic_network_rejected() {
        let r = TaskNetwork::new(names(2), vec![Label::Action(0); 2], [(0, 1), (1, 0)]);
        assert!(matches!(r, Err(Error::CycleDetected(_))));
    }

    #[test]
    fn execute_examples() {
        let inst = diamond();
        let d = &inst.domain;
        let a1 = d.action_id("a1").unwrap();
        let a2 = d.action_id("a2").unwrap();
        let a3 = d.action_id("a3").unwrap();
        let empty = d.empty_state();
        assert_eq!(execute_action(d, &empty, a1).unwrap(), d.state(&["1"]).unwrap());
        let s2 = d.state(&["2"]).unwrap();
        assert_eq!(execute_action(d, &s2, a3).unwrap(), s2);
        match execute_action(d, &empty, a3) {
            Err(Error::PreconditionUnsatisfied { missing, .. }) => assert_eq!(missing, vec!["2"]),
            other => panic!("{other:?}"),
        }
        assert_eq!(execute_plan(d, &empty, &Plan::default()).unwrap(), empty);
        assert_eq!(
            execute_plan(d, &empty, &Plan(vec![a1, a2, a3])).unwrap(),
            s2
        );
        assert!(matches!(
            execute_plan(d, &empty, &Plan(vec![a3])),
            Err(Error::PreconditionUnsatisfied { index: Some(0), .. })
        ));
    }

    #[test]
    fn linearization_examples() {
        let inst = diamond();
        let tn = &inst.network;
        assert!(is_linearization(tn, &[0, 1, 2, 3]));
        assert!(!is_linearization(tn, &[1, 0, 2, 3]));
        assert!(!is_linearization(tn, &[0, 1, 2]));
        assert!(!is_linearization(tn, &[0, 1, 1, 3]));
    }

    #[test]
    fn solution_examples() {
        let inst = diamond();
        let tn = &inst.network;
        let d = &inst.domain;
        assert!(is_solution(tn, &[0, 1, 2, 3], d, tn, &inst.init, true));
        assert!(is_solution(tn, &[0, 2, 1, 3], d, tn, &inst.init, true));
        // t4 without its predecessor t2
        let partial = tn.restrict(&[0, 3]);
        assert!(!is_solution(&partial, &[0, 1], d, tn, &inst.init, false));
        let empty = TaskNetwork::empty();
        assert!(is_solution(&empty, &[], d, tn, &inst.init, false));
        assert!(!is_solution(&empty, &[], d, tn, &inst.init, true));
        // downward closed prefix t1, t3 is a non-full solution
        let prefix = tn.restrict(&[0, 2]);
        assert!(is_solution(&prefix, &[0, 1], d, tn, &inst.init, false));
    }

    #[test]
    fn only_two_full_executable_linearizations() {
        // brute force over all 24 permutations of the fixture
        let inst = diamond();
        let tn = &inst.network;
        let mut found = Vec::new();
        let mut perm = vec![0, 1, 2, 3];
        permute(&mut perm, 0, &mut |p| {
            if is_linearization(tn, p) {
                let plan = Plan(p.iter().map(|&t| tn.action(t).unwrap()).collect());
                if execute_plan(&inst.domain, &inst.init, &plan).is_ok() {
                    found.push(p.to_vec());
                }
            }
        });
        found.sort();
        assert_eq!(found, vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3]]);
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn noop_action_preserves_state() {
        let mut b = Domain::builder();
        b.proposition("x");
        b.proposition("y");
        let a = b.action("noop", &[], &[], &[]);
        let d = b.build().unwrap();
        for bits in 0..4usize {
            let s = State::from_indices(2, (0..2).filter(|i| bits >> i & 1 == 1));
            assert_eq!(execute_action(&d, &s, a).unwrap(), s);
        }
    }

    #[test]
    fn domain_rejects_name_clash() {
        let mut b = Domain::builder();
        b.action("x", &[], &[], &[]);
        b.compound("x");
        assert!(b.build().is_err());
    }
}

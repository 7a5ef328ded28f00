//! Instance generators: the word-shuffle and multicolored-clique
//! constructions, plus seeded random instances for testing.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ActionMultiset, Domain, Instance, Label, Plan, Query, QueryKind, TaskNetwork};

/// A word `u` and the words it should be a shuffle of, over `{a, b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShuffleInput {
    pub u: String,
    pub parts: Vec<String>,
}

impl ShuffleInput {
    pub fn new(u: impl Into<String>, parts: &[&str]) -> Self {
        Self {
            u: u.into(),
            parts: parts.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        for w in std::iter::once(&self.u).chain(&self.parts) {
            if let Some(c) = w.chars().find(|&c| c != 'a' && c != 'b') {
                return Err(Error::Invalid(format!("letter `{c}` outside the alphabet {{a, b}}")));
            }
        }
        Ok(())
    }
}

/// Plan verification instance: one chain per part, effect-free actions `a`
/// and `b`, and the plan `u`.
pub fn gen_shuffle_verification(input: &ShuffleInput) -> Result<Instance> {
    input.validate()?;
    let mut d = Domain::builder();
    let a = d.action("a", &[], &[], &[]);
    let b = d.action("b", &[], &[], &[]);
    let d = d.build()?;
    let letter = |c: char| if c == 'a' { a } else { b };
    let mut n = TaskNetwork::builder();
    for (i, part) in input.parts.iter().enumerate() {
        let ids: Vec<_> = part
            .chars()
            .enumerate()
            .map(|(j, c)| n.task(format!("c{}_{}", i + 1, j + 1), Label::Action(letter(c))))
            .collect();
        n.chain(&ids);
    }
    let plan = Plan(input.u.chars().map(letter).collect());
    let s0 = d.empty_state();
    Ok(Instance::new(d, n.build()?, s0, Query::Verify(plan)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShuffleVariant {
    Reach,
    Exists,
}

/// State-based shuffle instance: left tasks spell the parts, right tasks
/// spell `u` in a chain ending with the goal task; execution must alternate
/// left and right with matching letters.
///
/// The goal action consumes `LEFT`, so the state graph has the four states
/// `{LEFT}`, `{a}`, `{b}` and `{GOAL}`. When the part lengths do not add up
/// to `|u|` the goal action also requires `GOAL`, which makes the instance
/// unsolvable.
pub fn gen_shuffle_state(input: &ShuffleInput, variant: ShuffleVariant) -> Result<Instance> {
    input.validate()?;
    let mut d = Domain::builder();
    let left = d.proposition("LEFT");
    let pa = d.proposition("a");
    let pb = d.proposition("b");
    let goal = d.proposition("GOAL");
    let la = d.action("aL_a", &[left], &[left], &[pa]);
    let lb = d.action("aL_b", &[left], &[left], &[pb]);
    let ra = d.action("aR_a", &[pa], &[pa], &[left]);
    let rb = d.action("aR_b", &[pb], &[pb], &[left]);
    let total: usize = input.parts.iter().map(|p| p.len()).sum();
    let ag = if total == input.u.len() {
        d.action("a_g", &[left], &[left], &[goal])
    } else {
        d.action("a_g", &[left, goal], &[left], &[goal])
    };
    let d = d.build()?;
    let mut n = TaskNetwork::builder();
    for (i, part) in input.parts.iter().enumerate() {
        let ids: Vec<_> = part
            .chars()
            .enumerate()
            .map(|(j, c)| {
                let act = if c == 'a' { la } else { lb };
                n.task(format!("c{}_{}", i + 1, j + 1), Label::Action(act))
            })
            .collect();
        n.chain(&ids);
    }
    let mut right: Vec<_> = input
        .u
        .chars()
        .enumerate()
        .map(|(j, c)| {
            let act = if c == 'a' { ra } else { rb };
            n.task(format!("u_{}", j + 1), Label::Action(act))
        })
        .collect();
    right.push(n.task("t_g", Label::Action(ag)));
    n.chain(&right);
    let s0 = d.state(&["LEFT"])?;
    let query = match variant {
        ShuffleVariant::Reach => Query::Reach(d.state(&["GOAL"])?),
        ShuffleVariant::Exists => Query::Exists,
    };
    Ok(Instance::new(d, n.build()?, s0, query))
}

/// A graph whose vertices carry colors `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    pub k: usize,
    /// Color of each vertex, in `1..=k`.
    pub colors: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl ColoredGraph {
    pub fn validate(&self) -> Result<()> {
        let n = self.colors.len();
        if let Some(&c) = self.colors.iter().find(|&&c| c == 0 || c > self.k) {
            return Err(Error::ImproperColoring(format!("color {c} outside 1..={}", self.k)));
        }
        for c in 1..=self.k {
            if !self.colors.contains(&c) {
                return Err(Error::ImproperColoring(format!("color {c} has no vertex")));
            }
        }
        for &(u, v) in &self.edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) out of range")));
            }
            if self.colors[u] == self.colors[v] {
                return Err(Error::ImproperColoring(format!(
                    "edge ({u}, {v}) joins two vertices of color {}",
                    self.colors[u]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueVariant {
    /// Vertex and edge tasks directly in the initial network.
    Cnum,
    /// One root task whose single method yields that network.
    Cs,
    /// Each method also yields the next compound task in line.
    Cd,
}

/// Compound instance that is solvable iff the graph has a clique with one
/// vertex of every color.
pub fn gen_clique(g: &ColoredGraph, variant: CliqueVariant, query: QueryKind) -> Result<Instance> {
    g.validate()?;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(u, v) in &g.edges {
        edges.insert((u.min(v), u.max(v)));
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let k = g.k;

    let mut d = Domain::builder();
    let color: Vec<_> = (1..=k).map(|j| d.proposition(format!("COLOR_{j}"))).collect();
    let vert: Vec<_> = (0..g.colors.len()).map(|i| d.proposition(format!("v{}", i + 1))).collect();
    let mut pair = vec![vec![None; k + 1]; k + 1];
    for j in 1..=k {
        for j2 in j + 1..=k {
            pair[j][j2] = Some(d.proposition(format!("EDGE_{j}_{j2}")));
        }
    }
    let goal = d.proposition("GOAL");
    let noop = d.action("noop", &[], &[], &[]);
    let mut options: Vec<Vec<usize>> = Vec::new();
    for (i, &c) in g.colors.iter().enumerate() {
        let a = d.action(format!("select_v{}", i + 1), &[color[c - 1]], &[color[c - 1]], &[vert[i]]);
        options.push(vec![noop, a]);
    }
    for (i, &(u, v)) in edges.iter().enumerate() {
        let (j, j2) = {
            let (x, y) = (g.colors[u], g.colors[v]);
            (x.min(y), x.max(y))
        };
        let a = d.action(format!("select_e{}", i + 1), &[vert[u], vert[v]], &[], &[pair[j][j2].unwrap()]);
        options.push(vec![noop, a]);
    }
    let goal_pre: Vec<_> = pair.iter().flatten().flatten().copied().collect();
    let ag = d.action("a_g", &goal_pre, &[], &[goal]);
    let names: Vec<String> = (0..g.colors.len())
        .map(|i| format!("V{}", i + 1))
        .chain((0..edges.len()).map(|i| format!("E{}", i + 1)))
        .collect();
    let compounds: Vec<_> = names.iter().map(|nm| d.compound(nm.clone())).collect();

    let single = |act: usize| -> Result<TaskNetwork> {
        let mut n = TaskNetwork::builder();
        n.task("t", Label::Action(act));
        n.build()
    };
    let network = match variant {
        CliqueVariant::Cnum | CliqueVariant::Cs => {
            for (c, opts) in compounds.iter().zip(&options) {
                for &a in opts {
                    d.method(*c, single(a)?);
                }
            }
            let mut n = TaskNetwork::builder();
            let mut ids: Vec<_> = names
                .iter()
                .zip(&compounds)
                .map(|(nm, &c)| n.task(nm.to_lowercase(), Label::Compound(c)))
                .collect();
            ids.push(n.task("t_g", Label::Action(ag)));
            n.chain(&ids);
            let base = n.build()?;
            if variant == CliqueVariant::Cnum {
                base
            } else {
                let root = d.compound("ROOT");
                d.method(root, base);
                let mut n = TaskNetwork::builder();
                n.task("root", Label::Compound(root));
                n.build()?
            }
        }
        CliqueVariant::Cd => {
            for (i, (c, opts)) in compounds.iter().zip(&options).enumerate() {
                let next = match compounds.get(i + 1) {
                    Some(&c2) => (names[i + 1].to_lowercase(), Label::Compound(c2)),
                    None => ("t_g".to_string(), Label::Action(ag)),
                };
                for &a in opts {
                    let mut n = TaskNetwork::builder();
                    let t = n.task("t", Label::Action(a));
                    let u = n.task(next.0.clone(), next.1);
                    n.before(t, u);
                    d.method(*c, n.build()?);
                }
            }
            let mut n = TaskNetwork::builder();
            match compounds.first() {
                Some(&c) => n.task(names[0].to_lowercase(), Label::Compound(c)),
                None => n.task("t_g", Label::Action(ag)),
            };
            n.build()?
        }
    };
    let d = d.build()?;
    let s0 = d.state(&(1..=k).map(|j| format!("COLOR_{j}")).collect::<Vec<_>>())?;
    let query = match query {
        QueryKind::Exists => Query::Exists,
        QueryKind::Executable => Query::Executable([ag].into_iter().collect()),
        QueryKind::Reach => Query::Reach(d.state(&["GOAL"])?),
        QueryKind::Verify => {
            return Err(Error::Invalid("the clique construction has no verify form".into()));
        }
    };
    Ok(Instance::new(d, network, s0, query))
}

/// Shape of the order in a random network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Antichain,
    /// Tasks split over at most `w` chains.
    Chains(usize),
    /// Stars whose leaves point into or out of their center.
    StarForest,
    /// Each forward pair is ordered with the given probability.
    RandomDag(f64),
}

/// Compound part of a random instance. Compound `i` only refers to
/// compounds with larger index, so depth stays finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompoundOptions {
    pub compounds: usize,
    pub methods: usize,
    pub max_method_size: usize,
    /// How many tasks of the initial network are compound.
    pub compound_tasks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomProfile {
    pub num_tasks: usize,
    pub num_props: usize,
    pub num_actions: usize,
    pub shape: Shape,
    pub query: QueryKind,
    pub compound: Option<CompoundOptions>,
}

impl RandomProfile {
    pub fn primitive(num_tasks: usize, num_props: usize, num_actions: usize, shape: Shape, query: QueryKind) -> Self {
        Self {
            num_tasks,
            num_props,
            num_actions,
            shape,
            query,
            compound: None,
        }
    }
}

/// Seeded random instance. Queries lean towards solvable ones: plans and
/// goals are often taken from a random execution.
pub fn gen_random(seed: u64, p: &RandomProfile) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let np = p.num_props.max(1);
    let na = p.num_actions.max(1);
    let mut d = Domain::builder();
    let props: Vec<_> = (0..np).map(|i| d.proposition(format!("p{}", i + 1))).collect();
    let pick = |rng: &mut ChaCha8Rng, prob: f64| -> Vec<usize> {
        props.iter().copied().filter(|_| rng.gen_bool(prob)).collect()
    };
    let mut actions = Vec::with_capacity(na);
    for i in 0..na {
        let pre = pick(&mut rng, 0.3);
        let del = pick(&mut rng, 0.25);
        let add = pick(&mut rng, 0.35);
        actions.push(d.action(format!("a{}", i + 1), &pre, &del, &add));
    }

    let mut compounds = Vec::new();
    if let Some(co) = p.compound {
        compounds = (0..co.compounds).map(|i| d.compound(format!("C{}", i + 1))).collect();
        for (ci, &c) in compounds.iter().enumerate() {
            for _ in 0..co.methods.max(1) {
                let size = rng.gen_range(0..=co.max_method_size);
                let labels: Vec<Label> = (0..size)
                    .map(|_| {
                        if ci + 1 < compounds.len() && rng.gen_bool(0.3) {
                            Label::Compound(compounds[rng.gen_range(ci + 1..compounds.len())])
                        } else {
                            Label::Action(actions[rng.gen_range(0..na)])
                        }
                    })
                    .collect();
                let net = random_network(&mut rng, &labels, Shape::RandomDag(0.4), "m");
                d.method(c, net);
            }
        }
    }
    let d = d.build().expect("generated names are unique");

    let n = p.num_tasks;
    let mut labels: Vec<Label> = (0..n).map(|_| Label::Action(actions[rng.gen_range(0..na)])).collect();
    if let Some(co) = p.compound {
        let mut slots: Vec<usize> = (0..n).collect();
        slots.shuffle(&mut rng);
        for &s in slots.iter().take(co.compound_tasks.min(n)) {
            if !compounds.is_empty() {
                labels[s] = Label::Compound(compounds[rng.gen_range(0..compounds.len())]);
            }
        }
    }
    let tn = random_network(&mut rng, &labels, p.shape, "t");
    let init = d.state(&d.propositions().iter().filter(|_| rng.gen_bool(0.4)).cloned().collect::<Vec<_>>())
        .expect("propositions exist");
    let query = random_query(&mut rng, &d, &tn, &init, p.query);
    Instance::new(d, tn, init, query)
}

fn random_network(rng: &mut ChaCha8Rng, labels: &[Label], shape: Shape, prefix: &str) -> TaskNetwork {
    let n = labels.len();
    let mut b = TaskNetwork::builder();
    let ids: Vec<_> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| b.task(format!("{prefix}{}", i + 1), l))
        .collect();
    let mut perm = ids.clone();
    perm.shuffle(rng);
    match shape {
        Shape::Antichain => {}
        Shape::Chains(w) => {
            let w = w.max(1);
            let mut chains: Vec<Vec<usize>> = vec![Vec::new(); w];
            for &t in &perm {
                chains[rng.gen_range(0..w)].push(t);
            }
            for c in &chains {
                b.chain(c);
            }
        }
        Shape::StarForest => {
            if n > 0 {
                let centers = rng.gen_range(1..=(n / 3).max(1));
                for &t in perm.iter().skip(centers) {
                    let c = perm[rng.gen_range(0..centers)];
                    if rng.gen_bool(0.5) {
                        b.before(c, t);
                    } else {
                        b.before(t, c);
                    }
                }
            }
        }
        Shape::RandomDag(density) => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(density.clamp(0.0, 1.0)) {
                        b.before(perm[i], perm[j]);
                    }
                }
            }
        }
    }
    b.build().expect("generated orders are acyclic")
}

/// A random linear extension, executed until the first inapplicable task.
fn random_run(rng: &mut ChaCha8Rng, d: &Domain, tn: &TaskNetwork, init: &crate::model::State) -> (Vec<usize>, crate::model::State) {
    let n = tn.len();
    let mut done = vec![false; n];
    let mut state = init.clone();
    let mut seq = Vec::new();
    loop {
        let ready: Vec<usize> = (0..n)
            .filter(|&t| !done[t] && tn.predecessors(t).iter().all(|p| done[p]))
            .collect();
        let Some(&t) = ready.choose(rng) else { break };
        done[t] = true;
        seq.push(t);
        if let Some(a) = tn.action(t) {
            match d.action(a).apply(&state) {
                Some(s) => state = s,
                None => break,
            }
        }
    }
    (seq, state)
}

fn random_query(rng: &mut ChaCha8Rng, d: &Domain, tn: &TaskNetwork, init: &crate::model::State, kind: QueryKind) -> Query {
    let na = d.actions().len();
    let (seq, state) = random_run(rng, d, tn, init);
    match kind {
        QueryKind::Exists => Query::Exists,
        QueryKind::Verify => {
            let mut plan: Vec<usize> = seq.iter().filter_map(|&t| tn.action(t)).collect();
            // complete to a full ordering so the multiset matches
            let mut rest: Vec<usize> = (0..tn.len())
                .filter(|t| !seq.contains(t))
                .filter_map(|t| tn.action(t))
                .collect();
            rest.shuffle(rng);
            plan.extend(rest);
            match rng.gen_range(0..4) {
                0 => plan.shuffle(rng),
                1 if plan.len() >= 2 => {
                    let i = rng.gen_range(0..plan.len() - 1);
                    plan.swap(i, i + 1);
                }
                2 if !plan.is_empty() && rng.gen_bool(0.3) => {
                    let i = rng.gen_range(0..plan.len());
                    plan[i] = rng.gen_range(0..na);
                }
                _ => {}
            }
            Query::Verify(Plan(plan))
        }
        QueryKind::Executable => {
            let mut s = ActionMultiset::new();
            let present: Vec<usize> = (0..tn.len()).filter_map(|t| tn.action(t)).collect();
            for _ in 0..rng.gen_range(1..=3) {
                if !present.is_empty() && rng.gen_bool(0.85) {
                    s.add(*present.choose(rng).unwrap(), 1);
                } else {
                    s.add(rng.gen_range(0..na), 1);
                }
            }
            Query::Executable(s)
        }
        QueryKind::Reach => {
            let mut goal = d.empty_state();
            let source = if rng.gen_bool(0.7) { state } else { crate::bitset::BitSet::full(d.num_props()) };
            for p in source.iter() {
                if rng.gen_bool(0.5) {
                    goal.insert(p);
                }
            }
            if goal.is_empty() && d.num_props() > 0 && rng.gen_bool(0.7) {
                goal.insert(rng.gen_range(0..d.num_props()));
            }
            Query::Reach(goal)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::measure_hierarchy;
    use crate::ordergraph::gpow;
    use crate::stategraph::build_state_graph;

    #[test]
    fn shuffle_state_table() {
        let inst = gen_shuffle_state(&ShuffleInput::new("ab", &["a", "b"]), ShuffleVariant::Reach).unwrap();
        let d = &inst.domain;
        let la = d.action(d.action_id("aL_a").unwrap());
        assert_eq!(d.state_names(&la.pre), vec!["LEFT"]);
        assert_eq!(la.pre, la.del);
        assert_eq!(d.state_names(&la.add), vec!["a"]);
        let g = build_state_graph(d, &inst.init, 64).unwrap();
        assert!(g.k() <= 4);
        assert!(gpow(&inst.network) <= 3);
    }

    #[test]
    fn clique_measures() {
        let k3 = ColoredGraph {
            k: 3,
            colors: vec![1, 2, 3],
            edges: vec![(0, 1), (1, 2), (0, 2)],
        };
        let m = |v| {
            let inst = gen_clique(&k3, v, QueryKind::Exists).unwrap();
            measure_hierarchy(&inst.network, &inst.domain)
        };
        let cnum = m(CliqueVariant::Cnum);
        assert_eq!((cnum.c_depth, cnum.c_size, cnum.c_choices), (Some(1), 1, 2));
        let cs = m(CliqueVariant::Cs);
        assert_eq!((cs.c_choices, cs.c_depth, cs.c_num), (2, Some(2), 1));
        let cd = m(CliqueVariant::Cd);
        assert_eq!((cd.c_choices, cd.c_size, cd.c_num, cd.c_depth), (2, 2, 1, Some(6)));

        let bad = ColoredGraph {
            k: 2,
            colors: vec![1, 1, 2],
            edges: vec![(0, 1)],
        };
        assert!(matches!(gen_clique(&bad, CliqueVariant::Cnum, QueryKind::Exists), Err(Error::ImproperColoring(_))));
    }

    #[test]
    fn random_is_deterministic_and_shaped() {
        let p = RandomProfile::primitive(9, 4, 5, Shape::Chains(3), QueryKind::Reach);
        let a = gen_random(7, &p);
        assert_eq!(a, gen_random(7, &p));
        assert!(gpow(&a.network) <= 3);
        let anti = gen_random(7, &RandomProfile { shape: Shape::Antichain, ..p });
        assert!(anti.network.cover().is_empty());
    }
}

//! Compound networks: hierarchy measures, method application, exhaustive
//! decomposition and the solve loop that reduces compound instances to
//! primitive ones.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CompoundId, Domain, Instance, Label, MethodDef, TaskId, TaskNetwork};
use crate::solvers::{dispatch_with_graph, Config, DecompositionWitness, Stats, Verdict};
use crate::stategraph::build_state_graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierarchyMeasures {
    /// Compound tasks in the network.
    pub c_num: usize,
    /// Largest method network in the domain.
    pub c_size: usize,
    /// Decomposition depth; `None` when a cycle of methods makes it infinite.
    pub c_depth: Option<usize>,
    /// Most methods for a single compound name.
    pub c_choices: usize,
}

impl fmt::Display for HierarchyMeasures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let depth = self
            .c_depth
            .map_or_else(|| "inf".to_string(), |d| d.to_string());
        write!(
            f,
            "C#={} Cs={} Cd={} Cc={}",
            self.c_num, self.c_size, depth, self.c_choices
        )
    }
}

pub fn measure_hierarchy(tn: &TaskNetwork, d: &Domain) -> HierarchyMeasures {
    let c_num = tn
        .labels()
        .iter()
        .filter(|l| matches!(l, Label::Compound(_)))
        .count();
    let nc = d.compounds().len();
    let c_size = (0..nc)
        .flat_map(|c| d.methods(c).iter().map(|m| m.network.len()))
        .max()
        .unwrap_or(0);
    let c_choices = (0..nc).map(|c| d.methods(c).len()).max().unwrap_or(0);

    let mut depth: Vec<Option<Option<usize>>> = vec![None; nc];
    let mut on_stack = vec![false; nc];
    let mut c_depth = Some(0);
    for l in tn.labels() {
        if let Label::Compound(c) = *l {
            let dc = compound_depth(d, c, &mut depth, &mut on_stack);
            c_depth = match (c_depth, dc) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
    }
    HierarchyMeasures {
        c_num,
        c_size,
        c_depth,
        c_choices,
    }
}

fn compound_depth(
    d: &Domain,
    c: CompoundId,
    memo: &mut Vec<Option<Option<usize>>>,
    on_stack: &mut Vec<bool>,
) -> Option<usize> {
    if let Some(v) = memo[c] {
        return v;
    }
    if on_stack[c] {
        return None;
    }
    on_stack[c] = true;
    let mut best = Some(0usize);
    'methods: for m in d.methods(c) {
        for l in m.network.labels() {
            if let Label::Compound(inner) = *l {
                match compound_depth(d, inner, memo, on_stack) {
                    Some(x) => best = best.map(|b| b.max(x)),
                    None => {
                        best = None;
                        break 'methods;
                    }
                }
            }
        }
    }
    on_stack[c] = false;
    let v = best.map(|b| b + 1);
    memo[c] = Some(v);
    v
}

/// Replaces compound task `t` by a fresh copy of `m`'s network. New tasks
/// are named `parent/child`, take the parent's position, and inherit every
/// order relation the parent had.
pub fn decompose_step(tn: &TaskNetwork, t: TaskId, m: &MethodDef, d: &Domain) -> Result<TaskNetwork> {
    let Label::Compound(c) = tn.label(t) else {
        return Err(Error::NotCompound(tn.name(t).to_string()));
    };
    if m.compound != c {
        return Err(Error::MethodMismatch {
            task: d.compounds()[c].clone(),
            method: d.compounds()[m.compound].clone(),
        });
    }
    let k = m.network.len();
    // old id -> new id, with t's slot expanded to k method tasks
    let remap = |x: TaskId| if x < t { x } else { x + k - 1 };
    let mut names = Vec::with_capacity(tn.len() + k - 1);
    let mut labels = Vec::with_capacity(tn.len() + k - 1);
    for x in 0..tn.len() {
        if x == t {
            for u in 0..k {
                names.push(format!("{}/{}", tn.name(t), m.network.name(u)));
                labels.push(m.network.label(u));
            }
        } else {
            names.push(tn.name(x).to_string());
            labels.push(tn.label(x));
        }
    }
    let mut arcs = Vec::new();
    for x in 0..tn.len() {
        if x == t {
            continue;
        }
        for y in tn.successors(x).iter() {
            if y != t {
                arcs.push((remap(x), remap(y)));
            }
        }
    }
    for x in tn.predecessors(t).iter() {
        for u in 0..k {
            arcs.push((remap(x), t + u));
        }
    }
    for y in tn.successors(t).iter() {
        for u in 0..k {
            arcs.push((t + u, remap(y)));
        }
    }
    for &(u, v) in m.network.cover() {
        arcs.push((t + u, t + v));
    }
    TaskNetwork::new(names, labels, arcs)
}

/// One primitive network reachable by decomposition.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub network: TaskNetwork,
    /// `(task name, method index)` in the order they were applied.
    pub choices: Vec<(String, usize)>,
}

/// Depth-first stream over all full decompositions of a network. The
/// lowest-positioned compound task is always decomposed first, trying
/// methods in declaration order.
pub struct Decompositions<'a> {
    d: &'a Domain,
    stack: Vec<(TaskNetwork, Vec<(String, usize)>)>,
    seen: Option<HashSet<Vec<u64>>>,
    cap: u64,
    yielded: u64,
    failed: bool,
}

impl<'a> Decompositions<'a> {
    pub fn new(tn: &TaskNetwork, d: &'a Domain, dedup: bool) -> Result<Self> {
        if measure_hierarchy(tn, d).c_depth.is_none() {
            return Err(Error::InfiniteDepth);
        }
        Ok(Self {
            d,
            stack: vec![(tn.clone(), Vec::new())],
            seen: dedup.then(HashSet::new),
            cap: u64::MAX,
            yielded: 0,
            failed: false,
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

impl Iterator for Decompositions<'_> {
    type Item = Result<Decomposition>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        while let Some((tn, choices)) = self.stack.pop() {
            let first = (0..tn.len()).find(|&t| matches!(tn.label(t), Label::Compound(_)));
            let Some(t) = first else {
                if let Some(seen) = self.seen.as_mut() {
                    if let Some(key) = canonical_form(&tn) {
                        if !seen.insert(key) {
                            continue;
                        }
                    }
                }
                if self.yielded >= self.cap {
                    self.failed = true;
                    return Some(Err(Error::BudgetExceeded("decomposition enumeration")));
                }
                self.yielded += 1;
                return Some(Ok(Decomposition {
                    network: tn,
                    choices,
                }));
            };
            let Label::Compound(c) = tn.label(t) else {
                unreachable!()
            };
            let methods = self.d.methods(c);
            for (mi, m) in methods.iter().enumerate().rev() {
                match decompose_step(&tn, t, m, self.d) {
                    Ok(next) => {
                        let mut ch = choices.clone();
                        ch.push((tn.name(t).to_string(), mi));
                        self.stack.push((next, ch));
                    }
                    Err(e) => {
                        self.failed = true;
                        return Some(Err(e));
                    }
                }
            }
        }
        None
    }
}

/// Convenience wrapper collecting the stream.
pub fn enumerate_decompositions(
    tn: &TaskNetwork,
    d: &Domain,
    dedup: bool,
    cap: u64,
) -> Result<Vec<TaskNetwork>> {
    Decompositions::new(tn, d, dedup)?
        .with_cap(cap)
        .map(|r| r.map(|dec| dec.network))
        .collect()
}

/// Encoding of a network that is invariant under renaming tasks, or `None`
/// when colour refinement leaves too many ties to resolve by brute force.
pub fn canonical_form(tn: &TaskNetwork) -> Option<Vec<u64>> {
    let n = tn.len();
    let mut preds = vec![Vec::new(); n];
    let mut succs = vec![Vec::new(); n];
    for &(a, b) in tn.cover() {
        succs[a].push(b);
        preds[b].push(a);
    }
    let mut color: Vec<u64> = (0..n).map(|t| label_code(tn.label(t))).collect();
    loop {
        let sigs: Vec<(u64, Vec<u64>, Vec<u64>)> = (0..n)
            .map(|t| {
                let mut p: Vec<u64> = preds[t].iter().map(|&x| color[x]).collect();
                let mut s: Vec<u64> = succs[t].iter().map(|&x| color[x]).collect();
                p.sort_unstable();
                s.sort_unstable();
                (color[t], p, s)
            })
            .collect();
        let mut distinct: Vec<&(u64, Vec<u64>, Vec<u64>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u64> = sigs
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap() as u64)
            .collect();
        let before = count_distinct(&color);
        color = next;
        if count_distinct(&color) == before {
            break;
        }
    }
    // group tasks by colour; try every order inside tie groups
    let mut groups: Vec<Vec<TaskId>> = Vec::new();
    let mut order: Vec<TaskId> = (0..n).collect();
    order.sort_by_key(|&t| color[t]);
    for t in order {
        match groups.last_mut() {
            Some(g) if color[g[0]] == color[t] => g.push(t),
            _ => groups.push(vec![t]),
        }
    }
    let mut combos: u64 = 1;
    for g in &groups {
        combos = combos.saturating_mul((1..=g.len() as u64).product());
        if combos > 720 {
            return None;
        }
    }
    let mut best: Option<Vec<u64>> = None;
    let mut perms: Vec<Vec<Vec<TaskId>>> = groups.iter().map(|g| permutations(g)).collect();
    let mut idx = vec![0usize; groups.len()];
    loop {
        let seq: Vec<TaskId> = (0..groups.len())
            .flat_map(|i| perms[i][idx[i]].iter().copied())
            .collect();
        let enc = encode(tn, &seq);
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                perms.clear();
                return best;
            }
            idx[i] += 1;
            if idx[i] < perms[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn label_code(l: Label) -> u64 {
    match l {
        Label::Action(a) => (a as u64) << 1,
        Label::Compound(c) => ((c as u64) << 1) | 1,
    }
}

fn count_distinct(v: &[u64]) -> usize {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.dedup();
    s.len()
}

fn permutations(items: &[TaskId]) -> Vec<Vec<TaskId>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn encode(tn: &TaskNetwork, seq: &[TaskId]) -> Vec<u64> {
    let mut pos = vec![0usize; tn.len()];
    for (i, &t) in seq.iter().enumerate() {
        pos[t] = i;
    }
    let mut out: Vec<u64> = seq.iter().map(|&t| label_code(tn.label(t))).collect();
    let mut arcs: Vec<(usize, usize)> = tn.cover().iter().map(|&(a, b)| (pos[a], pos[b])).collect();
    arcs.sort_unstable();
    out.push(u64::MAX);
    for (a, b) in arcs {
        out.push(a as u64);
        out.push(b as u64);
    }
    out
}

/// `Cc^(Σ_{i<Cd} C#·Cs^i)`, saturating; `None` for infinite depth.
pub fn decomposition_count_bound(m: &HierarchyMeasures) -> Option<u128> {
    let depth = m.c_depth?;
    let mut exp: u128 = 0;
    let mut pow: u128 = 1;
    for _ in 0..depth {
        exp = exp.saturating_add((m.c_num as u128).saturating_mul(pow));
        pow = pow.saturating_mul(m.c_size as u128);
    }
    let base = m.c_choices as u128;
    let mut out: u128 = 1;
    let mut e = exp;
    while e > 0 {
        if base <= 1 {
            return Some(if base == 0 { 0 } else { 1 });
        }
        out = out.saturating_mul(base);
        if out == u128::MAX {
            break;
        }
        e -= 1;
    }
    Some(out)
}

/// `|T| + C#·(Cs^Cd − 1)`, the largest primitive network a decomposition
/// can produce; `None` for infinite depth.
pub fn decomposition_size_bound(tasks: usize, m: &HierarchyMeasures) -> Option<i128> {
    let depth = m.c_depth?;
    let mut pow: i128 = 1;
    for _ in 0..depth {
        pow = pow.saturating_mul(m.c_size as i128);
    }
    Some((tasks as i128).saturating_add((m.c_num as i128).saturating_mul(pow - 1)))
}

/// Solves any instance: primitive ones directly, compound ones by streaming
/// their decompositions through the primitive dispatcher.
pub fn solve_compound(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    if inst.network.is_primitive() {
        return dispatch_with_graph(inst, None, cfg);
    }
    let d = &inst.domain;
    let stream = Decompositions::new(&inst.network, d, true)?.with_cap(cfg.decomposition_cap);
    let g = build_state_graph(d, &inst.init, cfg.state_cap).ok();
    let mut stats = Stats::default();
    for dec in stream {
        let dec = dec?;
        stats.decompositions += 1;
        let prim = inst.with_network(dec.network.clone());
        let v = dispatch_with_graph(&prim, g.as_ref(), cfg)?;
        stats.nodes += v.stats.nodes;
        stats.branches += v.stats.branches;
        stats.ilp_calls += v.stats.ilp_calls;
        stats.route = v.stats.route;
        if v.answer {
            let mut out = v;
            out.stats = stats;
            if let Some(w) = out.witness.as_mut() {
                w.decomposition = Some(DecompositionWitness {
                    choices: dec.choices,
                    network: dec.network,
                });
            }
            return Ok(out);
        }
    }
    Ok(Verdict::no(stats))
}

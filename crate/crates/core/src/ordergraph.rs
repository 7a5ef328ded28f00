//! Structure of the cover graph: isolated tasks, chain decompositions,
//! vertex covers and the measure record used by the dispatcher.

use crate::bitset::BitSet;
use crate::hierarchy::{measure_hierarchy, HierarchyMeasures};
use crate::model::{Domain, TaskId, TaskNetwork};

/// Chains partitioning the non-isolated tasks, plus the isolated ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainDecomposition {
    pub chains: Vec<Vec<TaskId>>,
    pub isolated: Vec<TaskId>,
    pub covered: Vec<TaskId>,
}

impl ChainDecomposition {
    pub fn width(&self) -> usize {
        self.chains.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    pub cover_set: Vec<TaskId>,
}

impl VertexCover {
    pub fn len(&self) -> usize {
        self.cover_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cover_set.is_empty()
    }

    pub fn covers(&self, tn: &TaskNetwork) -> bool {
        tn.cover()
            .iter()
            .all(|(a, b)| self.cover_set.contains(a) || self.cover_set.contains(b))
    }
}

/// Tasks incident to no cover arc.
pub fn isolated_tasks(tn: &TaskNetwork) -> Vec<TaskId> {
    let touched = touched(tn);
    (0..tn.len()).filter(|&t| !touched.contains(t)).collect()
}

fn touched(tn: &TaskNetwork) -> BitSet {
    let mut s = BitSet::new(tn.len());
    for &(a, b) in tn.cover() {
        s.insert(a);
        s.insert(b);
    }
    s
}

/// Width of the order after removing isolated tasks.
pub fn gpow(tn: &TaskNetwork) -> usize {
    min_chain_decomposition(tn).width()
}

/// A minimum chain partition of the non-isolated tasks (Dilworth), from a
/// maximum matching between the two copies of the comparability digraph.
pub fn min_chain_decomposition(tn: &TaskNetwork) -> ChainDecomposition {
    let n = tn.len();
    let touched = touched(tn);
    let covered: Vec<TaskId> = touched.iter().collect();
    let isolated: Vec<TaskId> = (0..n).filter(|&t| !touched.contains(t)).collect();

    // next[u] = v when u is immediately followed by v in its chain
    let mut next: Vec<Option<TaskId>> = vec![None; n];
    let mut prev: Vec<Option<TaskId>> = vec![None; n];
    for &u in &covered {
        let mut seen = BitSet::new(n);
        augment(tn, u, &mut seen, &mut next, &mut prev);
    }
    let mut chains = Vec::new();
    for &u in &covered {
        if prev[u].is_none() {
            let mut chain = vec![u];
            let mut cur = u;
            while let Some(v) = next[cur] {
                chain.push(v);
                cur = v;
            }
            chains.push(chain);
        }
    }
    ChainDecomposition {
        chains,
        isolated,
        covered,
    }
}

fn augment(
    tn: &TaskNetwork,
    u: TaskId,
    seen: &mut BitSet,
    next: &mut [Option<TaskId>],
    prev: &mut [Option<TaskId>],
) -> bool {
    let succ: Vec<TaskId> = tn.successors(u).iter().collect();
    for v in succ {
        if seen.contains(v) {
            continue;
        }
        seen.insert(v);
        let free = match prev[v] {
            None => true,
            Some(w) => augment(tn, w, seen, next, prev),
        };
        if free {
            next[u] = Some(v);
            prev[v] = Some(u);
            return true;
        }
    }
    false
}

/// Exact minimum vertex cover of the undirected cover graph.
pub fn min_vertex_cover(tn: &TaskNetwork) -> VertexCover {
    let n = tn.len();
    let mut adj = vec![BitSet::new(n); n];
    for &(a, b) in tn.cover() {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let alive = touched(tn);
    let mut cover_set = search(&adj, alive, n + 1).expect("the full vertex set is a cover");
    cover_set.sort_unstable();
    VertexCover { cover_set }
}

/// A minimum cover of the graph induced on `alive`, if one smaller than
/// `limit` exists.
fn search(adj: &[BitSet], mut alive: BitSet, limit: usize) -> Option<Vec<TaskId>> {
    let mut forced = Vec::new();
    loop {
        let mut changed = false;
        let budget = limit.saturating_sub(forced.len() + 1);
        for v in alive.clone().iter() {
            if !alive.contains(v) {
                continue;
            }
            let mut nb = adj[v].clone();
            nb.intersect_with(&alive);
            match nb.count() {
                0 => {
                    alive.remove(v);
                    changed = true;
                }
                1 => {
                    let u = nb.iter().next().unwrap();
                    forced.push(u);
                    alive.remove(u);
                    alive.remove(v);
                    changed = true;
                }
                d if d > budget => {
                    forced.push(v);
                    alive.remove(v);
                    changed = true;
                }
                _ => {}
            }
            if forced.len() >= limit {
                return None;
            }
        }
        if !changed {
            break;
        }
    }
    if alive.is_empty() {
        return Some(forced);
    }
    if forced.len() + matching_bound(adj, &alive) >= limit {
        return None;
    }

    let comps = components(adj, &alive);
    if comps.len() > 1 {
        let mut total = forced;
        for comp in comps {
            let rest = limit.checked_sub(total.len()).filter(|&r| r > 0)?;
            total.extend(search(adj, comp, rest)?);
        }
        return (total.len() < limit).then_some(total);
    }

    let v = alive
        .iter()
        .max_by_key(|&v| {
            let mut nb = adj[v].clone();
            nb.intersect_with(&alive);
            (nb.count(), std::cmp::Reverse(v))
        })
        .unwrap();
    let mut nb = adj[v].clone();
    nb.intersect_with(&alive);

    let mut best: Option<Vec<TaskId>> = None;
    let mut bound = limit - forced.len();
    // take v
    let mut without_v = alive.clone();
    without_v.remove(v);
    if bound > 1 {
        if let Some(mut c) = search(adj, without_v, bound - 1) {
            c.push(v);
            bound = c.len();
            best = Some(c);
        }
    }
    // take all neighbours of v
    let k = nb.count();
    if bound > k {
        let mut rest = alive.clone();
        rest.remove(v);
        rest.difference_with(&nb);
        if let Some(mut c) = search(adj, rest, bound - k) {
            c.extend(nb.iter());
            best = Some(c);
        }
    }
    best.map(|mut c| {
        c.extend(forced);
        c
    })
}

fn matching_bound(adj: &[BitSet], alive: &BitSet) -> usize {
    let mut used = BitSet::new(alive.len());
    let mut m = 0;
    for v in alive.iter() {
        if used.contains(v) {
            continue;
        }
        if let Some(u) = adj[v].iter().find(|&u| alive.contains(u) && !used.contains(u)) {
            used.insert(u);
            used.insert(v);
            m += 1;
        }
    }
    m
}

fn components(adj: &[BitSet], alive: &BitSet) -> Vec<BitSet> {
    let mut left = alive.clone();
    let mut out = Vec::new();
    while let Some(s) = { let first = left.iter().next(); first } {
        let mut comp = BitSet::new(alive.len());
        let mut stack = vec![s];
        comp.insert(s);
        left.remove(s);
        while let Some(v) = stack.pop() {
            for u in adj[v].iter() {
                if left.contains(u) {
                    left.remove(u);
                    comp.insert(u);
                    stack.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Every structural number the dispatcher and the `measures` report use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measures {
    pub tasks: usize,
    pub props: usize,
    pub actions: usize,
    pub isolated: usize,
    pub primitive: bool,
    pub gpow: usize,
    pub vcn: usize,
    pub hierarchy: HierarchyMeasures,
}

pub fn measures(tn: &TaskNetwork, d: &Domain) -> Measures {
    Measures {
        tasks: tn.len(),
        props: d.num_props(),
        actions: d.actions().len(),
        isolated: isolated_tasks(tn).len(),
        primitive: tn.is_primitive(),
        gpow: gpow(tn),
        vcn: min_vertex_cover(tn).len(),
        hierarchy: measure_hierarchy(tn, d),
    }
}

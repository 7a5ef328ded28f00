//! Simple paths, simple cycles and cycle splicing on labelled multigraphs.
//! Shared by the antichain and vertex-cover solvers.

use std::ops::ControlFlow;

use crate::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Arc {
    pub from: usize,
    pub to: usize,
    pub label: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Graph {
    pub k: usize,
    pub arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(k: usize, arcs: Vec<Arc>) -> Self {
        let mut out = vec![Vec::new(); k];
        for (i, a) in arcs.iter().enumerate() {
            out[a.from].push(i);
        }
        Self { k, arcs, out }
    }

    /// Keeps at most `per_pair` arcs between each ordered pair of vertices.
    pub fn thinned(&self, per_pair: usize) -> Graph {
        let mut kept = Vec::new();
        let mut count = std::collections::HashMap::new();
        for a in &self.arcs {
            let c = count.entry((a.from, a.to)).or_insert(0usize);
            if *c < per_pair {
                *c += 1;
                kept.push(*a);
            }
        }
        Graph::new(self.k, kept)
    }
}

/// Search counters shared across a whole solve.
pub(crate) struct Budget {
    pub nodes: u64,
    pub limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self { nodes: 0, limit }
    }

    pub fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            Err(Error::BudgetExceeded("branching search"))
        } else {
            Ok(())
        }
    }
}

pub(crate) type PathVisitor<'a> = dyn FnMut(&[usize], usize, &mut Budget) -> Result<ControlFlow<()>> + 'a;

/// Calls `f` on every vertex-simple path from `start` (including the empty
/// one) whose arcs satisfy `allowed` and whose label counts stay within
/// `cap`. `f` receives the arcs and the end vertex.
pub(crate) fn for_each_simple_path(
    g: &Graph,
    start: usize,
    allowed: &dyn Fn(&Arc) -> bool,
    cap: &[usize],
    budget: &mut Budget,
    f: &mut PathVisitor<'_>,
) -> Result<ControlFlow<()>> {
    let mut visited = BitSet::new(g.k);
    visited.insert(start);
    let mut used = vec![0usize; cap.len()];
    let mut path = Vec::new();
    path_dfs(g, start, allowed, cap, &mut used, &mut visited, &mut path, budget, f)
}

#[allow(clippy::too_many_arguments)]
fn path_dfs(
    g: &Graph,
    at: usize,
    allowed: &dyn Fn(&Arc) -> bool,
    cap: &[usize],
    used: &mut [usize],
    visited: &mut BitSet,
    path: &mut Vec<usize>,
    budget: &mut Budget,
    f: &mut PathVisitor<'_>,
) -> Result<ControlFlow<()>> {
    budget.tick()?;
    if f(path, at, budget)?.is_break() {
        return Ok(ControlFlow::Break(()));
    }
    for &ai in &g.out[at] {
        let a = g.arcs[ai];
        if visited.contains(a.to) || used[a.label] >= cap[a.label] || !allowed(&a) {
            continue;
        }
        visited.insert(a.to);
        used[a.label] += 1;
        path.push(ai);
        let r = path_dfs(g, a.to, allowed, cap, used, visited, path, budget, f)?;
        path.pop();
        used[a.label] -= 1;
        visited.remove(a.to);
        if r.is_break() {
            return Ok(r);
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// A simple cycle, stored as arcs starting at its smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cycle {
    pub arcs: Vec<usize>,
    pub vertices: BitSet,
    /// `(label, occurrences)`, sorted by label.
    pub counts: Vec<(usize, usize)>,
}

/// Every simple cycle (self-loops included) whose arcs satisfy `allowed`
/// and whose label counts fit in `cap`. Each cycle appears once.
pub(crate) fn simple_cycles(
    g: &Graph,
    allowed: &dyn Fn(&Arc) -> bool,
    cap: &[usize],
    budget: &mut Budget,
) -> Result<Vec<Cycle>> {
    let mut out = Vec::new();
    let mut used = vec![0usize; cap.len()];
    for s in 0..g.k {
        let mut visited = BitSet::new(g.k);
        visited.insert(s);
        let mut path = Vec::new();
        cycle_dfs(g, s, s, allowed, cap, &mut used, &mut visited, &mut path, budget, &mut out)?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cycle_dfs(
    g: &Graph,
    root: usize,
    at: usize,
    allowed: &dyn Fn(&Arc) -> bool,
    cap: &[usize],
    used: &mut [usize],
    visited: &mut BitSet,
    path: &mut Vec<usize>,
    budget: &mut Budget,
    out: &mut Vec<Cycle>,
) -> Result<()> {
    budget.tick()?;
    for &ai in &g.out[at] {
        let a = g.arcs[ai];
        if a.to < root || used[a.label] >= cap[a.label] || !allowed(&a) {
            continue;
        }
        if a.to == root {
            path.push(ai);
            out.push(make_cycle(g, path));
            path.pop();
            continue;
        }
        if visited.contains(a.to) {
            continue;
        }
        visited.insert(a.to);
        used[a.label] += 1;
        path.push(ai);
        cycle_dfs(g, root, a.to, allowed, cap, used, visited, path, budget, out)?;
        path.pop();
        used[a.label] -= 1;
        visited.remove(a.to);
    }
    Ok(())
}

fn make_cycle(g: &Graph, arcs: &[usize]) -> Cycle {
    let mut vertices = BitSet::new(g.k);
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &ai in arcs {
        let a = g.arcs[ai];
        vertices.insert(a.from);
        match counts.iter_mut().find(|(l, _)| *l == a.label) {
            Some((_, c)) => *c += 1,
            None => counts.push((a.label, 1)),
        }
    }
    counts.sort_unstable();
    Cycle {
        arcs: arcs.to_vec(),
        vertices,
        counts,
    }
}

/// Vertices visited by a path from `start`.
pub(crate) fn path_vertices(g: &Graph, start: usize, path: &[usize]) -> BitSet {
    let mut s = BitSet::new(g.k);
    s.insert(start);
    for &ai in path {
        s.insert(g.arcs[ai].to);
    }
    s
}

/// Whether every chosen cycle can be reached from the path by repeatedly
/// marking cycles that share a vertex with the path or a marked cycle.
pub(crate) fn all_marked(path_vertices: &BitSet, cycles: &[&Cycle]) -> bool {
    let mut reach = path_vertices.clone();
    let mut marked = vec![false; cycles.len()];
    loop {
        let mut changed = false;
        for (i, c) in cycles.iter().enumerate() {
            if !marked[i] && c.vertices.intersects(&reach) {
                marked[i] = true;
                reach.union_with(&c.vertices);
                changed = true;
            }
        }
        if !changed {
            return marked.iter().all(|&m| m);
        }
    }
}

/// Inserts `reps[i]` traversals of `cycles[i]` into the walk given by
/// `path` from `start`. Each cycle goes in at the first walk position that
/// visits one of its vertices; cycles not yet attachable wait for others.
pub(crate) fn splice(
    g: &Graph,
    start: usize,
    path: &[usize],
    cycles: &[&Cycle],
    reps: &[usize],
) -> Vec<usize> {
    let mut walk: Vec<usize> = path.to_vec();
    let mut pending: Vec<usize> = (0..cycles.len()).filter(|&i| reps[i] > 0).collect();
    while !pending.is_empty() {
        let before = pending.len();
        pending.retain(|&ci| {
            let c = cycles[ci];
            // vertex sequence: position p has vertex before walk[p]
            let mut v = start;
            let mut pos = None;
            for p in 0..=walk.len() {
                if c.vertices.contains(v) {
                    pos = Some((p, v));
                    break;
                }
                if p < walk.len() {
                    v = g.arcs[walk[p]].to;
                }
            }
            let Some((p, v)) = pos else {
                return true;
            };
            let k = c.arcs.iter().position(|&ai| g.arcs[ai].from == v).unwrap();
            let mut rotated: Vec<usize> = c.arcs[k..].to_vec();
            rotated.extend_from_slice(&c.arcs[..k]);
            let mut ins = Vec::with_capacity(rotated.len() * reps[ci]);
            for _ in 0..reps[ci] {
                ins.extend_from_slice(&rotated);
            }
            walk.splice(p..p, ins);
            false
        });
        assert!(pending.len() < before, "cycles not connected to the walk");
    }
    walk
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(from: usize, to: usize, label: usize) -> Arc {
        Arc { from, to, label }
    }

    #[test]
    fn cycles_once_each() {
        // 0 <-> 1 with two labels one way, plus a self-loop on 1
        let g = Graph::new(2, vec![arc(0, 1, 0), arc(0, 1, 1), arc(1, 0, 2), arc(1, 1, 3)]);
        let mut b = Budget::new(1000);
        let cs = simple_cycles(&g, &|_| true, &[9; 4], &mut b).unwrap();
        assert_eq!(cs.len(), 3);
        let cs = simple_cycles(&g, &|a| a.label != 1, &[9; 4], &mut b).unwrap();
        assert_eq!(cs.len(), 2);
    }

    #[test]
    fn paths_include_empty() {
        let g = Graph::new(3, vec![arc(0, 1, 0), arc(1, 2, 0), arc(0, 2, 1)]);
        let mut seen = Vec::new();
        let mut b = Budget::new(1000);
        let _ = for_each_simple_path(&g, 0, &|_| true, &[1, 1], &mut b, &mut |p, end, _| {
            seen.push((p.to_vec(), end));
            Ok(ControlFlow::Continue(()))
        })
        .unwrap();
        // label 0 may be used once, so 0 -> 1 -> 2 is excluded
        assert_eq!(seen, vec![(vec![], 0), (vec![0], 1), (vec![2], 2)]);
    }

    #[test]
    fn splice_after_attachment() {
        // path 0 -> 1; cycle A at 1 (1 -> 2 -> 1); cycle B at 2 (self-loop)
        let g = Graph::new(3, vec![arc(0, 1, 0), arc(1, 2, 1), arc(2, 1, 2), arc(2, 2, 3)]);
        let mut b = Budget::new(1000);
        let cs = simple_cycles(&g, &|_| true, &[9; 4], &mut b).unwrap();
        let refs: Vec<&Cycle> = cs.iter().collect();
        let pv = path_vertices(&g, 0, &[0]);
        assert!(all_marked(&pv, &refs));
        let reps = vec![1; refs.len()];
        let walk = splice(&g, 0, &[0], &refs, &reps);
        assert_eq!(walk.len(), 4);
        let mut v = 0;
        for &ai in &walk {
            assert_eq!(g.arcs[ai].from, v);
            v = g.arcs[ai].to;
        }
        assert!(!all_marked(&path_vertices(&g, 0, &[]), &refs));
    }
}

//! Feasibility of small integer linear programs by depth-first search with
//! interval propagation.
//!
//! Programs built by the solvers have a handful of variables whose values
//! are bounded by the number of tasks, so exhaustive search over the
//! propagated box is both complete and fast enough.

use std::fmt;

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<i64>,
    pub rel: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn holds(&self, x: &[i64]) -> bool {
        let lhs: i128 = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as i128 * v as i128)
            .sum();
        match self.rel {
            Relation::Le => lhs <= self.rhs as i128,
            Relation::Ge => lhs >= self.rhs as i128,
        }
    }
}

/// Variables with a finite lower bound and an optional upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IlpInstance {
    pub lower: Vec<i64>,
    pub upper: Vec<Option<i64>>,
    pub constraints: Vec<Constraint>,
}

impl IlpInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn add_var(&mut self, lower: i64, upper: Option<i64>) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.lower.len() - 1
    }

    /// Adds `Σ coeff·x rel rhs` given sparsely.
    pub fn add(&mut self, terms: &[(usize, i64)], rel: Relation, rhs: i64) {
        let mut coeffs = vec![0; self.num_vars()];
        for &(v, c) in terms {
            coeffs[v] += c;
        }
        self.constraints.push(Constraint { coeffs, rel, rhs });
    }

    pub fn satisfied_by(&self, x: &[i64]) -> bool {
        x.len() == self.num_vars()
            && x.iter().zip(&self.lower).all(|(v, l)| v >= l)
            && x
                .iter()
                .zip(&self.upper)
                .all(|(v, u)| u.is_none_or(|u| *v <= u))
            && self.constraints.iter().all(|c| c.holds(x))
    }
}

impl fmt::Display for IlpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.num_vars() {
            match self.upper[i] {
                Some(u) => writeln!(f, "{} <= x{i} <= {u}", self.lower[i])?,
                None => writeln!(f, "{} <= x{i}", self.lower[i])?,
            }
        }
        for c in &self.constraints {
            let terms: Vec<String> = c
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, a)| format!("{a}*x{i}"))
                .collect();
            let lhs = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            };
            let rel = match c.rel {
                Relation::Le => "<=",
                Relation::Ge => ">=",
            };
            writeln!(f, "{lhs} {rel} {}", c.rhs)?;
        }
        Ok(())
    }
}

/// Rows normalized to `Σ a·x ≤ b`.
struct Rows {
    rows: Vec<(Vec<(usize, i128)>, i128)>,
    by_var: Vec<Vec<usize>>,
}

impl Rows {
    fn new(ilp: &IlpInstance) -> Self {
        let n = ilp.num_vars();
        let mut rows = Vec::new();
        let mut by_var = vec![Vec::new(); n];
        for c in &ilp.constraints {
            let sign: i128 = match c.rel {
                Relation::Le => 1,
                Relation::Ge => -1,
            };
            let terms: Vec<(usize, i128)> = c
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0)
                .map(|(i, &a)| (i, sign * a as i128))
                .collect();
            for &(i, _) in &terms {
                by_var[i].push(rows.len());
            }
            rows.push((terms, sign * c.rhs as i128));
        }
        Self { rows, by_var }
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

/// Tightens `lo`/`hi` to a fixpoint. Returns false on an empty domain.
fn propagate(rows: &Rows, lo: &mut [i128], hi: &mut [Option<i128>]) -> bool {
    let mut dirty: Vec<bool> = vec![true; rows.rows.len()];
    let mut queue: Vec<usize> = (0..rows.rows.len()).collect();
    let mut rounds = 0usize;
    while let Some(r) = queue.pop() {
        dirty[r] = false;
        rounds += 1;
        if rounds > 64 * (rows.rows.len() + 1) * (lo.len() + 1) {
            break;
        }
        let (terms, b) = &rows.rows[r];
        // minimum activity, with the number of unbounded (−∞) contributions
        let mut fin: i128 = 0;
        let mut inf = 0usize;
        let mut inf_var = usize::MAX;
        for &(i, a) in terms {
            if a > 0 {
                fin += a * lo[i];
            } else {
                match hi[i] {
                    Some(h) => fin += a * h,
                    None => {
                        inf += 1;
                        inf_var = i;
                    }
                }
            }
        }
        if inf == 0 && fin > *b {
            return false;
        }
        for &(i, a) in terms {
            let own = if a > 0 {
                Some(a * lo[i])
            } else {
                hi[i].map(|h| a * h)
            };
            let rest = match (own, inf) {
                (Some(o), 0) => fin - o,
                (None, 1) if inf_var == i => fin,
                _ => continue,
            };
            let slack = *b - rest;
            let mut changed = false;
            if a > 0 {
                let nh = div_floor(slack, a);
                if hi[i].is_none_or(|h| nh < h) {
                    hi[i] = Some(nh);
                    changed = true;
                }
            } else {
                let nl = div_ceil(slack, a);
                if nl > lo[i] {
                    lo[i] = nl;
                    changed = true;
                }
            }
            if let Some(h) = hi[i] {
                if h < lo[i] {
                    return false;
                }
            }
            if changed {
                for &r2 in &rows.by_var[i] {
                    if !dirty[r2] {
                        dirty[r2] = true;
                        queue.push(r2);
                    }
                }
            }
        }
    }
    true
}

/// Finds any integer point satisfying every constraint, or `None` if none
/// exists. Variables without an upper bound must receive one through
/// propagation, otherwise [`Error::Unbounded`] is returned.
pub fn feasible(ilp: &IlpInstance, budget: u64) -> Result<Option<Vec<i64>>> {
    let n = ilp.num_vars();
    let rows = Rows::new(ilp);
    let mut lo: Vec<i128> = ilp.lower.iter().map(|&l| l as i128).collect();
    let mut hi: Vec<Option<i128>> = ilp.upper.iter().map(|u| u.map(|u| u as i128)).collect();
    if !propagate(&rows, &mut lo, &mut hi) {
        return Ok(None);
    }
    let mut fixed_hi = Vec::with_capacity(n);
    for (i, h) in hi.iter().enumerate() {
        match h {
            Some(h) => fixed_hi.push(*h),
            None => return Err(Error::Unbounded(i)),
        }
    }
    let mut nodes = 0u64;
    let found = dfs(&rows, lo, fixed_hi, &mut nodes, budget)?;
    Ok(found.map(|x| x.into_iter().map(|v| v as i64).collect()))
}

fn dfs(
    rows: &Rows,
    lo: Vec<i128>,
    hi: Vec<i128>,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Vec<i128>>> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded("ilp"));
    }
    let mut lo = lo;
    let mut hi_opt: Vec<Option<i128>> = hi.into_iter().map(Some).collect();
    if !propagate(rows, &mut lo, &mut hi_opt) {
        return Ok(None);
    }
    let hi: Vec<i128> = hi_opt.into_iter().map(|h| h.unwrap()).collect();
    let pick = (0..lo.len())
        .filter(|&i| hi[i] > lo[i])
        .min_by_key(|&i| (hi[i] - lo[i], std::cmp::Reverse(rows.by_var[i].len()), i));
    let Some(v) = pick else {
        let ok = rows.rows.iter().all(|(terms, b)| {
            terms.iter().map(|&(i, a)| a * lo[i]).sum::<i128>() <= *b
        });
        return Ok(ok.then_some(lo));
    };
    for value in lo[v]..=hi[v] {
        let mut l2 = lo.clone();
        let mut h2 = hi.clone();
        l2[v] = value;
        h2[v] = value;
        if let Some(x) = dfs(rows, l2, h2, nodes, budget)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let mut p = IlpInstance::new();
        let x = p.add_var(1, Some(5));
        p.add(&[(x, 2)], Relation::Le, 6);
        let sol = feasible(&p, DEFAULT_BUDGET).unwrap().unwrap();
        assert!((1..=3).contains(&sol[0]));
        assert!(p.satisfied_by(&sol));
    }

    #[test]
    fn sum_out_of_reach() {
        let mut p = IlpInstance::new();
        let x = p.add_var(0, Some(3));
        let y = p.add_var(0, Some(3));
        p.add(&[(x, 1), (y, 1)], Relation::Ge, 7);
        assert_eq!(feasible(&p, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn cycle_program_shape() {
        // min(a) = 1 <= p(a) + x <= max(a) = 2, p(a) = 0, x >= 1
        let mut p = IlpInstance::new();
        let x = p.add_var(1, None);
        p.add(&[(x, 1)], Relation::Ge, 1);
        p.add(&[(x, 1)], Relation::Le, 2);
        let sol = feasible(&p, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(sol[0] == 1 || sol[0] == 2);
    }

    #[test]
    fn unbounded_variable_rejected() {
        let mut p = IlpInstance::new();
        let x = p.add_var(0, None);
        p.add(&[(x, 1)], Relation::Ge, 1);
        assert_eq!(feasible(&p, DEFAULT_BUDGET), Err(Error::Unbounded(0)));
    }

    #[test]
    fn upper_bound_through_other_variable() {
        // x <= y, y <= 4, x unbounded above on its own
        let mut p = IlpInstance::new();
        let x = p.add_var(0, None);
        let y = p.add_var(0, Some(4));
        p.add(&[(x, 1), (y, -1)], Relation::Le, 0);
        p.add(&[(x, 1)], Relation::Ge, 4);
        assert_eq!(feasible(&p, DEFAULT_BUDGET).unwrap(), Some(vec![4, 4]));
    }

    #[test]
    fn budget_is_reported() {
        let mut p = IlpInstance::new();
        let vars: Vec<_> = (0..12).map(|_| p.add_var(0, Some(1))).collect();
        // parity-style infeasible program: 2 * sum = 11
        let terms: Vec<_> = vars.iter().map(|&v| (v, 2)).collect();
        p.add(&terms, Relation::Le, 11);
        p.add(&terms, Relation::Ge, 11);
        assert_eq!(feasible(&p, 5), Err(Error::BudgetExceeded("ilp")));
        assert_eq!(feasible(&p, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
    }
}

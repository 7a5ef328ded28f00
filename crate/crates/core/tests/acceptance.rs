//! End-to-end acceptance checks. Every criterion prints one line and the
//! process fails if any of them does.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use htn_core::generators::{
    gen_clique, gen_random, gen_shuffle_state, gen_shuffle_verification, CliqueVariant, ColoredGraph,
    CompoundOptions, RandomProfile, Shape, ShuffleInput, ShuffleVariant,
};
use htn_core::hierarchy::{
    decomposition_count_bound, decomposition_size_bound, enumerate_decompositions, measure_hierarchy,
};
use htn_core::ilp::{feasible, IlpInstance, Relation};
use htn_core::oracle::{count_full_witnesses, full_witnesses, oracle_primitive};
use htn_core::ordergraph::{min_chain_decomposition, min_vertex_cover};
use htn_core::solvers::{
    dispatch, exec_antichain, reach_antichain, reach_exec_gpow, reach_exec_vcn, verify_gpow, verify_vcn,
    witness_is_valid, Config,
};
use htn_core::stategraph::{action_equivalence_classes, build_state_graph, reduce_r0, reduce_r1};
use htn_core::{solve_compound, ActionMultiset, Error, Query, QueryKind, TaskNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(limit: Duration, took: Duration, o: Outcome) -> Outcome {
    let pass = o.pass && took <= limit;
    outcome(pass, format!("{} in {:.2?} (limit {:?})", o.detail, took, limit))
}

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("diamond example", c1_diamond, Some(Duration::from_secs(1))),
        ("specialized solvers match the oracle", c2_solvers, Some(Duration::from_secs(300))),
        ("reduction rules", c3_reductions, None),
        ("shuffle constructions", c4_shuffle, Some(Duration::from_secs(120))),
        ("clique constructions", c5_clique, Some(Duration::from_secs(300))),
        ("decomposition bounds", c6_bounds, None),
        ("structural certificates", c7_certificates, None),
        ("gpow scaling", c8_scaling, None),
        ("ilp engine", c9_ilp, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let o = match limit {
            Some(l) => within(l, took, o),
            None => outcome(o.pass, format!("{} in {:.2?}", o.detail, took)),
        };
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn c1_diamond() -> Outcome {
    let inst = common::diamond();
    let v = dispatch(&inst, &Config::default()).unwrap();
    let count = count_full_witnesses(&inst).unwrap();
    let names: BTreeSet<Vec<String>> = full_witnesses(&inst)
        .unwrap()
        .into_iter()
        .map(|w| w.iter().map(|&t| inst.network.name(t).to_string()).collect())
        .collect();
    let expect: BTreeSet<Vec<String>> = [["t1", "t2", "t3", "t4"], ["t1", "t3", "t2", "t4"]]
        .iter()
        .map(|w| w.iter().map(|s| s.to_string()).collect())
        .collect();
    let wit_ok = v.linearization().is_some_and(|l| witness_is_valid(&inst, l));
    outcome(
        v.answer && wit_ok && count == 2 && names == expect,
        format!("answer={} full witnesses={count} exact={}", v.answer, names == expect),
    )
}

fn c2_solvers() -> Outcome {
    let cfg = Config::default();
    let shapes = [
        Shape::Antichain,
        Shape::Chains(2),
        Shape::Chains(3),
        Shape::StarForest,
        Shape::RandomDag(0.3),
    ];
    let per_query = 1000u64;
    let mut checks = 0u64;
    let mut bad = Vec::new();
    for q in QueryKind::ALL {
        for seed in 0..per_query {
            let shape = shapes[seed as usize % shapes.len()];
            let n = 1 + (seed as usize / 5) % 8;
            let p = RandomProfile::primitive(n, 1 + seed as usize % 4, 1 + (seed as usize / 3) % 5, shape, q);
            let inst = gen_random(seed, &p);
            let expect = oracle_primitive(&inst, 12).unwrap().answer;
            let cd = min_chain_decomposition(&inst.network);
            let vc = min_vertex_cover(&inst.network);
            let mut runs = Vec::new();
            match &inst.query {
                Query::Verify(_) => {
                    runs.push(("gpow", verify_gpow(&inst, &cd, &cfg)));
                    runs.push(("vcn", verify_vcn(&inst, &vc, &cfg)));
                }
                query => {
                    runs.push(("gpow", reach_exec_gpow(&inst, &cd, &cfg)));
                    runs.push(("vcn", reach_exec_vcn(&inst, &vc, &cfg)));
                    if inst.network.cover().is_empty() {
                        let r = match query {
                            Query::Reach(_) => reach_antichain(&inst, &cfg),
                            _ => exec_antichain(&inst, &cfg),
                        };
                        runs.push(("antichain", r));
                    }
                }
            }
            for (name, r) in runs {
                checks += 1;
                let ok = match &r {
                    Ok(v) => v.answer == expect && (!v.answer || witness_is_valid(&inst, v.linearization().unwrap())),
                    Err(_) => false,
                };
                if !ok {
                    bad.push(format!("{} seed {seed} {name}", q.as_str()));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} instances, {checks} solver runs, {} disagreements{}",
            per_query * 4,
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

fn c3_reductions() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut kept, mut merged, mut r0_ok, mut total) = (0, 0, 0, 0);
    for seed in 0..600u64 {
        let n = rng.gen_range(1..=7);
        let p = RandomProfile::primitive(n, rng.gen_range(1..=2), rng.gen_range(2..=5), Shape::Antichain, QueryKind::Executable);
        let mut inst = gen_random(seed, &p);
        // demands that sometimes exceed the supply
        let na = inst.domain.actions().len();
        let mut demand = ActionMultiset::new();
        for _ in 0..rng.gen_range(0..=3) {
            demand.add(rng.gen_range(0..na), 1);
        }
        inst.query = Query::Executable(demand.clone());
        total += 1;

        let mut supply = vec![0usize; na];
        for t in 0..inst.network.len() {
            supply[inst.network.action(t).unwrap()] += 1;
        }
        let over = demand.iter().any(|(a, k)| k > supply[a]);
        if reduce_r0(&inst.network, &demand, na).is_some() == over {
            r0_ok += 1;
        }

        let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap).unwrap();
        let classes = action_equivalence_classes(&g);
        let r1 = reduce_r1(&inst.domain, &inst.network, &demand, &classes);
        if !r1.merges.is_empty() {
            merged += 1;
        }
        let reduced = inst.with_network(r1.network).with_query(Query::Executable(r1.demand));
        let before = oracle_primitive(&inst, 12).unwrap().answer;
        // R1 runs only once R0 has passed
        let after = !over && oracle_primitive(&reduced, 12).unwrap().answer;
        if before == after {
            kept += 1;
        }
    }
    outcome(
        kept == total && r0_ok == total,
        format!("R1 kept {kept}/{total} verdicts ({merged} with merges), R0 exact on {r0_ok}/{total}"),
    )
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect()
}

fn c4_shuffle() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut agree, mut total, mut positives, mut max_states) = (0, 0, 0, 0);
    for _ in 0..400 {
        let w = rng.gen_range(1..=3);
        let parts: Vec<String> = (0..w).map(|_| {
            let l = rng.gen_range(0..=8 / w);
            random_word(&mut rng, l)
        }).collect();
        let u = if rng.gen_bool(0.5) {
            // interleave the parts at random
            let mut pos = vec![0; w];
            let mut out = String::new();
            while let Some(i) = {
                let open: Vec<usize> = (0..w).filter(|&i| pos[i] < parts[i].len()).collect();
                (!open.is_empty()).then(|| open[rng.gen_range(0..open.len())])
            } {
                out.push(parts[i].as_bytes()[pos[i]] as char);
                pos[i] += 1;
            }
            if rng.gen_bool(0.3) && !out.is_empty() {
                let k = rng.gen_range(0..out.len());
                let flip = if out.as_bytes()[k] == b'a' { "b" } else { "a" };
                out.replace_range(k..=k, flip);
            }
            out
        } else {
            let l = rng.gen_range(0..=8);
            random_word(&mut rng, l)
        };
        let refs: Vec<&str> = parts.iter().map(String::as_str).collect();
        let input = ShuffleInput::new(u.clone(), &refs);
        let expect = common::is_shuffle(&u, &parts);
        positives += expect as usize;
        total += 1;

        let mut verdicts = Vec::new();
        let vi = gen_shuffle_verification(&input).unwrap();
        verdicts.push(verify_gpow(&vi, &min_chain_decomposition(&vi.network), &cfg).map(|v| v.answer));
        for variant in [ShuffleVariant::Reach, ShuffleVariant::Exists] {
            let si = gen_shuffle_state(&input, variant).unwrap();
            let g = build_state_graph(&si.domain, &si.init, cfg.state_cap).unwrap();
            max_states = max_states.max(g.k());
            verdicts.push(reach_exec_gpow(&si, &min_chain_decomposition(&si.network), &cfg).map(|v| v.answer));
        }
        if verdicts.iter().all(|v| matches!(v, Ok(a) if *a == expect)) {
            agree += 1;
        }
    }
    outcome(
        agree == total && max_states <= 4,
        format!("{agree}/{total} inputs agree ({positives} shuffles), largest state graph {max_states}"),
    )
}

fn has_colorful_clique(g: &ColoredGraph) -> bool {
    let adj = |u: usize, v: usize| g.edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
    let by_color: Vec<Vec<usize>> = (1..=g.k)
        .map(|c| (0..g.colors.len()).filter(|&v| g.colors[v] == c).collect())
        .collect();
    fn pick(by_color: &[Vec<usize>], chosen: &mut Vec<usize>, adj: &dyn Fn(usize, usize) -> bool) -> bool {
        let Some(options) = by_color.get(chosen.len()) else {
            return true;
        };
        for &v in options {
            if chosen.iter().all(|&u| adj(u, v)) {
                chosen.push(v);
                if pick(by_color, chosen, adj) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    pick(&by_color, &mut Vec::new(), &adj)
}

fn random_colored_graph(rng: &mut ChaCha8Rng) -> ColoredGraph {
    let n = rng.gen_range(1..=6);
    let k = rng.gen_range(1..=n.min(4));
    let mut colors: Vec<usize> = (1..=k).collect();
    while colors.len() < n {
        colors.push(rng.gen_range(1..=k));
    }
    for i in (1..n).rev() {
        colors.swap(i, rng.gen_range(0..=i));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if colors[u] != colors[v] {
                pairs.push((u, v));
            }
        }
    }
    // keep the vertex and edge tasks few enough for exhaustive decomposition
    let max_edges = 10usize.saturating_sub(n).max(1);
    let density = rng.gen_range(0.3..=0.9);
    let edges: Vec<_> = pairs.into_iter().filter(|_| rng.gen_bool(density)).take(max_edges).collect();
    ColoredGraph { k, colors, edges }
}

fn c5_clique() -> Outcome {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let variants = [CliqueVariant::Cnum, CliqueVariant::Cs, CliqueVariant::Cd];
    let queries = [QueryKind::Exists, QueryKind::Executable, QueryKind::Reach];
    let (mut graphs, mut positives, mut agree, mut runs, mut measures_ok) = (0, 0, 0, 0, true);
    while graphs < 120 {
        let g = random_colored_graph(&mut rng);
        graphs += 1;
        let expect = has_colorful_clique(&g);
        positives += expect as usize;
        for variant in variants {
            for q in queries {
                let inst = gen_clique(&g, variant, q).unwrap();
                runs += 1;
                if matches!(solve_compound(&inst, &cfg), Ok(v) if v.answer == expect) {
                    agree += 1;
                }
                let m = measure_hierarchy(&inst.network, &inst.domain);
                measures_ok &= match variant {
                    CliqueVariant::Cnum => m.c_depth == Some(1) && m.c_size == 1 && m.c_choices == 2,
                    CliqueVariant::Cs => m.c_choices == 2 && m.c_depth == Some(2) && m.c_num == 1,
                    CliqueVariant::Cd => true,
                };
            }
        }
    }
    outcome(
        agree == runs && measures_ok,
        format!("{agree}/{runs} runs on {graphs} graphs ({positives} with a clique), measures exact: {measures_ok}"),
    )
}

fn c6_bounds() -> Outcome {
    let (mut ok, mut total, mut networks) = (0, 0, 0usize);
    for seed in 0..250u64 {
        let mut p = RandomProfile::primitive(1 + seed as usize % 3, 2, 3, Shape::RandomDag(0.4), QueryKind::Exists);
        p.compound = Some(CompoundOptions {
            compounds: 1 + seed as usize % 3,
            methods: 1 + (seed as usize / 3) % 3,
            max_method_size: 1 + (seed as usize / 9) % 3,
            compound_tasks: 1 + (seed as usize / 27) % 2,
        });
        let inst = gen_random(seed, &p);
        let m = measure_hierarchy(&inst.network, &inst.domain);
        let Ok(nets) = enumerate_decompositions(&inst.network, &inst.domain, true, 1 << 20) else {
            continue;
        };
        total += 1;
        networks += nets.len();
        let count_ok = decomposition_count_bound(&m).is_some_and(|b| nets.len() as u128 <= b);
        let size_bound = decomposition_size_bound(inst.network.len(), &m).unwrap();
        let size_ok = nets.iter().all(|n| n.len() as i128 <= size_bound);
        if count_ok && size_ok {
            ok += 1;
        }
    }
    outcome(
        ok == total && total >= 200,
        format!("{ok}/{total} instances within both bounds ({networks} distinct decompositions)"),
    )
}

fn brute_width(tn: &TaskNetwork) -> usize {
    let covered: Vec<usize> = (0..tn.len())
        .filter(|&t| tn.cover().iter().any(|&(a, b)| a == t || b == t))
        .collect();
    let mut best = 0;
    for mask in 0u32..1 << covered.len() {
        let set: Vec<usize> = (0..covered.len()).filter(|i| mask >> i & 1 == 1).map(|i| covered[i]).collect();
        if set.iter().all(|&a| set.iter().all(|&b| !tn.precedes(a, b))) {
            best = best.max(set.len());
        }
    }
    best
}

fn brute_vertex_cover(tn: &TaskNetwork) -> usize {
    (0u32..1 << tn.len())
        .filter(|mask| tn.cover().iter().all(|&(a, b)| mask >> a & 1 == 1 || mask >> b & 1 == 1))
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

fn c7_certificates() -> Outcome {
    let shapes = [Shape::Chains(2), Shape::Chains(4), Shape::StarForest, Shape::RandomDag(0.2), Shape::RandomDag(0.5)];
    let (mut ok, mut total) = (0, 0);
    for seed in 0..320u64 {
        let n = 1 + seed as usize % 10;
        let p = RandomProfile::primitive(n, 1, 1, shapes[seed as usize % shapes.len()], QueryKind::Exists);
        let tn = gen_random(seed, &p).network;
        total += 1;
        let cd = min_chain_decomposition(&tn);
        let mut all: Vec<usize> = cd.chains.concat();
        all.sort_unstable();
        let partition = all == cd.covered && cd.chains.iter().all(|c| c.windows(2).all(|w| tn.precedes(w[0], w[1])));
        let vc = min_vertex_cover(&tn);
        if partition && cd.width() == brute_width(&tn) && vc.covers(&tn) && vc.len() == brute_vertex_cover(&tn) {
            ok += 1;
        }
    }
    outcome(ok == total, format!("{ok}/{total} networks with exact width and minimum cover"))
}

fn c8_scaling() -> Outcome {
    let cfg = Config::default();
    let sizes = [20usize, 40, 80, 160];
    let mut points = Vec::new();
    let mut budget_hits = 0;
    for &n in &sizes {
        let mut elapsed = Duration::ZERO;
        let mut solved = 0;
        let mut seed = 0u64;
        while solved < 12 {
            seed += 1;
            let q = [QueryKind::Verify, QueryKind::Exists, QueryKind::Reach][solved % 3];
            let inst = gen_random(seed * 1000 + n as u64, &RandomProfile::primitive(n, 3, 4, Shape::Chains(2), q));
            let cd = min_chain_decomposition(&inst.network);
            if cd.width() != 2 {
                continue;
            }
            let start = Instant::now();
            let r = match inst.query {
                Query::Verify(_) => verify_gpow(&inst, &cd, &cfg),
                _ => reach_exec_gpow(&inst, &cd, &cfg),
            };
            elapsed += start.elapsed();
            if matches!(r, Err(Error::BudgetExceeded(_))) {
                budget_hits += 1;
            }
            solved += 1;
        }
        points.push(((n as f64).ln(), elapsed.as_secs_f64().max(1e-9).ln()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    outcome(
        slope < 3.0 && budget_hits == 0,
        format!("log-log slope {slope:.2}, budget hits {budget_hits}"),
    )
}

/// A program in the shape the solvers emit: path/cycle variables with
/// lower bounds, supply windows `lo ≤ p + Σ c·x ≤ hi` and optional
/// demand variables bounded by usage.
fn random_program(rng: &mut ChaCha8Rng) -> (IlpInstance, Vec<(i64, i64)>) {
    let mut ilp = IlpInstance::new();
    let mut bx = Vec::new();
    let cycles = rng.gen_range(1..=4);
    let classes = rng.gen_range(1..=3);
    for _ in 0..cycles {
        let lo = rng.gen_range(0..=2);
        let hi = lo + rng.gen_range(0..=5);
        ilp.add_var(lo, Some(hi));
        bx.push((lo, hi));
    }
    let coeff: Vec<Vec<i64>> = (0..classes)
        .map(|_| (0..cycles).map(|_| rng.gen_range(0..=2)).collect())
        .collect();
    for row in &coeff {
        let base = rng.gen_range(0..=2);
        let hi = base + rng.gen_range(0..=8);
        let lo = rng.gen_range(0..=hi);
        let terms: Vec<(usize, i64)> = row.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        ilp.add(&terms, Relation::Le, hi - base);
        if rng.gen_bool(0.6) {
            ilp.add(&terms, Relation::Ge, lo - base);
        }
    }
    if rng.gen_bool(0.5) {
        // demand split: y[e] ≤ usage of class e, Σ y ≥ need
        let ys: Vec<usize> = (0..classes)
            .map(|_| {
                let hi = rng.gen_range(0..=3);
                bx.push((0, hi));
                ilp.add_var(0, Some(hi))
            })
            .collect();
        for (e, &y) in ys.iter().enumerate() {
            let mut terms = vec![(y, 1)];
            terms.extend(coeff[e].iter().copied().enumerate().filter(|&(_, c)| c != 0).map(|(v, c)| (v, -c)));
            ilp.add(&terms, Relation::Le, rng.gen_range(0..=2));
        }
        let all: Vec<(usize, i64)> = ys.iter().map(|&y| (y, 1)).collect();
        ilp.add(&all, Relation::Ge, rng.gen_range(0..=4));
    }
    (ilp, bx)
}

fn enumerate(ilp: &IlpInstance, bx: &[(i64, i64)]) -> bool {
    let mut x: Vec<i64> = bx.iter().map(|b| b.0).collect();
    loop {
        if ilp.constraints.iter().all(|c| c.holds(&x)) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == x.len() {
                return false;
            }
            if x[i] < bx[i].1 {
                x[i] += 1;
                break;
            }
            x[i] = bx[i].0;
            i += 1;
        }
    }
}

fn c9_ilp() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut agree, mut total, mut feasible_count) = (0, 0, 0);
    while total < 600 {
        let (ilp, bx) = random_program(&mut rng);
        let space: f64 = bx.iter().map(|&(l, h)| (h - l + 1) as f64).product();
        if space > 1e5 {
            continue;
        }
        total += 1;
        let expect = enumerate(&ilp, &bx);
        feasible_count += expect as usize;
        match feasible(&ilp, 1_000_000) {
            Ok(Some(x)) if expect && ilp.satisfied_by(&x) => agree += 1,
            Ok(None) if !expect => agree += 1,
            _ => {}
        }
    }
    outcome(agree == total, format!("{agree}/{total} programs agree ({feasible_count} feasible)"))
}

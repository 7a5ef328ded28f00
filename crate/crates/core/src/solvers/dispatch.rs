use super::{
    exec_antichain_in, reach_antichain_in, reach_exec_gpow_in, reach_exec_vcn_in, verify_gpow, verify_vcn,
    Config, Route, Stats, Verdict,
};
use crate::error::{Error, Result};
use crate::model::{Instance, Query};
use crate::oracle::oracle_primitive;
use crate::ordergraph::{min_chain_decomposition, min_vertex_cover};
use crate::stategraph::{build_state_graph, StateGraph};

/// Solves a primitive instance with the cheapest applicable procedure.
pub fn dispatch(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    dispatch_with_graph(inst, None, cfg)
}

/// Plan existence, answered as executability of the network's own action
/// multiset.
pub fn plan_existence(inst: &Instance, cfg: &Config) -> Result<Verdict> {
    if !matches!(inst.query, Query::Exists) {
        return Err(Error::Invalid("plan_existence needs an exists query".into()));
    }
    dispatch(inst, cfg)
}

/// Like [`dispatch`], reusing a state graph built for the same domain and
/// initial state.
pub fn dispatch_with_graph(inst: &Instance, g: Option<&StateGraph>, cfg: &Config) -> Result<Verdict> {
    let tn = &inst.network;
    if !tn.is_primitive() {
        return Err(Error::Invalid("dispatch needs a primitive network; use solve_compound".into()));
    }
    if tn.is_empty() {
        let st = Stats {
            route: Some(Route::Trivial),
            ..Stats::default()
        };
        let yes = match &inst.query {
            Query::Verify(p) => p.0.is_empty(),
            Query::Exists => true,
            Query::Executable(s) => s.is_empty(),
            Query::Reach(sg) => sg.is_subset(&inst.init),
        };
        return Ok(if yes { Verdict::yes(Vec::new(), st) } else { Verdict::no(st) });
    }
    let verify = matches!(inst.query, Query::Verify(_));
    let built;
    let stg: Option<&StateGraph> = match (verify, g) {
        (true, _) => None,
        (false, Some(g)) => Some(g),
        (false, None) => {
            built = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
            Some(&built)
        }
    };

    if tn.cover().is_empty() {
        return match &inst.query {
            Query::Reach(_) => reach_antichain_in(inst, stg.unwrap(), cfg),
            Query::Exists | Query::Executable(_) => exec_antichain_in(inst, stg.unwrap(), cfg),
            Query::Verify(_) => verify_gpow(inst, &min_chain_decomposition(tn), cfg),
        };
    }
    let cd = min_chain_decomposition(tn);
    if cd.width() <= cfg.gpow_threshold {
        return match stg {
            None => verify_gpow(inst, &cd, cfg),
            Some(g) => reach_exec_gpow_in(inst, &cd, g, cfg),
        };
    }
    let vc = min_vertex_cover(tn);
    if vc.len() <= cfg.vcn_threshold {
        return match stg {
            None => verify_vcn(inst, &vc, cfg),
            Some(g) => reach_exec_vcn_in(inst, &vc, g, cfg),
        };
    }
    if tn.len() <= cfg.oracle_cap {
        return oracle_primitive(inst, cfg.oracle_cap);
    }
    Err(Error::InstanceTooLarge(format!(
        "gpow {} and vcn {} exceed the thresholds and {} tasks exceed the oracle cap",
        cd.width(),
        vc.len(),
        tn.len()
    )))
}

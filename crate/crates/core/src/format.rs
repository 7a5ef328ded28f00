//! The JSON instance file format and JSON verdict reports.
//!
//! ```json
//! {
//!   "format": "htn-instance/1",
//!   "domain": {
//!     "propositions": ["p"],
//!     "actions": [{ "name": "set", "pre": [], "del": [], "add": ["p"] }],
//!     "compounds": [],
//!     "methods": []
//!   },
//!   "network": {
//!     "tasks": [{ "id": "t1", "label": "set" }],
//!     "order": []
//!   },
//!   "init": [],
//!   "query": { "reach": { "goal": ["p"] } }
//! }
//! ```
//!
//! `order` may list the cover or any relation with the same transitive
//! closure. With `"order_is_closure": true` the relation must already be
//! transitively closed.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{
    transitive_closure, ActionMultiset, Domain, DomainBuilder, Instance, Label, Plan, Query, State, TaskNetwork,
};
use crate::solvers::Verdict;

pub const FORMAT_VERSION: &str = "htn-instance/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format: String,
    domain: DomainFile,
    network: NetworkFile,
    #[serde(default)]
    init: Vec<String>,
    query: QueryFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    #[serde(default)]
    propositions: Vec<String>,
    #[serde(default)]
    actions: Vec<ActionFile>,
    #[serde(default)]
    compounds: Vec<String>,
    #[serde(default)]
    methods: Vec<MethodFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionFile {
    name: String,
    #[serde(default)]
    pre: Vec<String>,
    #[serde(default)]
    del: Vec<String>,
    #[serde(default)]
    add: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MethodFile {
    compound: String,
    network: NetworkFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    #[serde(default)]
    tasks: Vec<TaskFile>,
    #[serde(default)]
    order: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    order_is_closure: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskFile {
    id: String,
    label: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum QueryFile {
    Verify { plan: Vec<String> },
    Exists {},
    Executable { actions: Vec<String> },
    Reach { goal: Vec<String> },
}

/// Parses an instance document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.format != FORMAT_VERSION {
        return Err(Error::Invalid(format!(
            "unsupported format `{}`, expected `{FORMAT_VERSION}`",
            file.format
        )));
    }
    let domain = build_domain(&file.domain)?;
    let network = build_network(&file.network, |n| domain.resolve_label(n))?;
    let init = domain.state(&file.init)?;
    let query = match &file.query {
        QueryFile::Verify { plan } => Query::Verify(domain.plan(plan)?),
        QueryFile::Exists {} => Query::Exists,
        QueryFile::Executable { actions } => Query::Executable(domain.plan(actions)?.0.into_iter().collect()),
        QueryFile::Reach { goal } => Query::Reach(domain.state(goal)?),
    };
    Ok(Instance::new(domain, network, init, query))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}

fn build_domain(f: &DomainFile) -> Result<Domain> {
    let mut b = DomainBuilder::default();
    for p in &f.propositions {
        b.proposition(p.clone());
    }
    let ids = |b: &DomainBuilder, names: &[String]| -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                b.prop_id(n).ok_or_else(|| Error::UnknownName {
                    kind: "proposition",
                    name: n.clone(),
                })
            })
            .collect()
    };
    for a in &f.actions {
        let pre = ids(&b, &a.pre)?;
        let del = ids(&b, &a.del)?;
        let add = ids(&b, &a.add)?;
        b.action(a.name.clone(), &pre, &del, &add);
    }
    for c in &f.compounds {
        b.compound(c.clone());
    }
    for m in &f.methods {
        let c = b.compound_id(&m.compound).ok_or_else(|| Error::UnknownName {
            kind: "compound",
            name: m.compound.clone(),
        })?;
        let net = build_network(&m.network, |n| b.resolve_label(n))?;
        b.method(c, net);
    }
    b.build()
}

fn build_network(f: &NetworkFile, resolve: impl Fn(&str) -> Option<Label>) -> Result<TaskNetwork> {
    let mut names = Vec::with_capacity(f.tasks.len());
    let mut labels = Vec::with_capacity(f.tasks.len());
    for t in &f.tasks {
        names.push(t.id.clone());
        labels.push(resolve(&t.label).ok_or_else(|| Error::UnknownName {
            kind: "task label",
            name: t.label.clone(),
        })?);
    }
    let id = |n: &str| {
        names.iter().position(|x| x == n).ok_or_else(|| Error::UnknownName {
            kind: "task",
            name: n.to_string(),
        })
    };
    let arcs = f
        .order
        .iter()
        .map(|(a, b)| Ok((id(a)?, id(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let tn = TaskNetwork::new(names.clone(), labels, arcs.clone())?;
    if f.order_is_closure {
        let given: std::collections::BTreeSet<_> = arcs.into_iter().collect();
        if given != transitive_closure(&tn) {
            return Err(Error::Invalid(
                "order is flagged as a closure but is not transitively closed".into(),
            ));
        }
    }
    Ok(tn)
}

fn network_file(tn: &TaskNetwork, d: &Domain) -> NetworkFile {
    NetworkFile {
        tasks: (0..tn.len())
            .map(|t| TaskFile {
                id: tn.name(t).to_string(),
                label: d.label_name(tn.label(t)).to_string(),
            })
            .collect(),
        order: tn
            .cover()
            .iter()
            .map(|&(a, b)| (tn.name(a).to_string(), tn.name(b).to_string()))
            .collect(),
        order_is_closure: false,
    }
}

fn names(d: &Domain, s: &State) -> Vec<String> {
    d.state_names(s)
}

fn action_names(d: &Domain, actions: impl IntoIterator<Item = usize>) -> Vec<String> {
    actions.into_iter().map(|a| d.action(a).name.clone()).collect()
}

fn multiset_names(d: &Domain, s: &ActionMultiset) -> Vec<String> {
    action_names(d, s.iter().flat_map(|(a, n)| std::iter::repeat_n(a, n)))
}

/// Pretty-printed instance document.
pub fn instance_to_string(inst: &Instance) -> String {
    let d = &inst.domain;
    let file = InstanceFile {
        format: FORMAT_VERSION.to_string(),
        domain: DomainFile {
            propositions: d.propositions().to_vec(),
            actions: d
                .actions()
                .iter()
                .map(|a| ActionFile {
                    name: a.name.clone(),
                    pre: names(d, &a.pre),
                    del: names(d, &a.del),
                    add: names(d, &a.add),
                })
                .collect(),
            compounds: d.compounds().to_vec(),
            methods: (0..d.compounds().len())
                .flat_map(|c| d.methods(c))
                .map(|m| MethodFile {
                    compound: d.compounds()[m.compound].clone(),
                    network: network_file(&m.network, d),
                })
                .collect(),
        },
        network: network_file(&inst.network, d),
        init: names(d, &inst.init),
        query: match &inst.query {
            Query::Verify(Plan(p)) => QueryFile::Verify {
                plan: action_names(d, p.iter().copied()),
            },
            Query::Exists => QueryFile::Exists {},
            Query::Executable(s) => QueryFile::Executable {
                actions: multiset_names(d, s),
            },
            Query::Reach(g) => QueryFile::Reach { goal: names(d, g) },
        },
    };
    let mut out = serde_json::to_string_pretty(&file).expect("instance files serialize");
    out.push('\n');
    out
}

/// Machine-readable verdict. Task ids refer to the solved primitive
/// network, which is the decomposition result for compound instances.
pub fn verdict_json(inst: &Instance, v: &Verdict) -> Value {
    let d = &inst.domain;
    let witness = v.witness.as_ref().map(|w| {
        let net = w.decomposition.as_ref().map_or(&inst.network, |dec| &dec.network);
        let tasks: Vec<&str> = w.linearization.iter().map(|&t| net.name(t)).collect();
        let plan: Vec<&str> = w
            .linearization
            .iter()
            .map(|&t| d.label_name(net.label(t)))
            .collect();
        let mut obj = json!({ "tasks": tasks, "plan": plan });
        if let Some(dec) = &w.decomposition {
            obj["decomposition"] = dec
                .choices
                .iter()
                .map(|(t, m)| json!({ "task": t, "method": m }))
                .collect();
        }
        obj
    });
    json!({
        "answer": if v.answer { "yes" } else { "no" },
        "route": v.stats.route.map(|r| r.as_str()),
        "reason": v.reason,
        "witness": witness,
        "stats": {
            "nodes": v.stats.nodes,
            "branches": v.stats.branches,
            "ilp_calls": v.stats.ilp_calls,
            "decompositions": v.stats.decompositions,
        },
    })
}

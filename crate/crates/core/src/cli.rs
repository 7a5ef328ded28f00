//! The `htn` command line. Exit codes: 0 yes (or success), 1 no, 2 error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::format::{instance_to_string, read_instance, verdict_json};
use crate::generators::{
    gen_clique, gen_random, gen_shuffle_state, gen_shuffle_verification, CliqueVariant, ColoredGraph,
    CompoundOptions, RandomProfile, Shape, ShuffleInput, ShuffleVariant,
};
use crate::model::{Instance, QueryKind};
use crate::oracle::oracle_compound;
use crate::ordergraph::measures;
use crate::solvers::{Config, Verdict};
use crate::stategraph::{action_equivalence_classes, augmented_graph, build_state_graph, strong_classes};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "htn", version, about = "Decide plan verification, plan existence, action executability and state reachability for HTN instances")]
struct Cli {
    #[command(flatten)]
    limits: Limits,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true, env = "HTN_JSON")]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Limits {
    /// Search nodes a branching solver may expand.
    #[arg(long, global = true, env = "HTN_BUDGET")]
    budget: Option<u64>,
    /// Largest chain width routed to the chain dynamic programs.
    #[arg(long, global = true, env = "HTN_GPOW_THRESHOLD")]
    gpow_threshold: Option<usize>,
    /// Largest vertex cover routed to the vertex cover solvers.
    #[arg(long, global = true, env = "HTN_VCN_THRESHOLD")]
    vcn_threshold: Option<usize>,
    /// Largest state transition graph to build.
    #[arg(long, global = true, env = "HTN_STATE_CAP")]
    state_cap: Option<usize>,
}

impl Limits {
    fn config(&self) -> Config {
        let mut cfg = Config::default();
        if let Some(b) = self.budget {
            cfg.budget = b;
            cfg.ilp_budget = b;
        }
        if let Some(w) = self.gpow_threshold {
            cfg.gpow_threshold = w;
        }
        if let Some(k) = self.vcn_threshold {
            cfg.vcn_threshold = k;
        }
        if let Some(m) = self.state_cap {
            cfg.state_cap = m;
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve { file: PathBuf },
    /// Print structural measures of an instance file.
    Measures { file: PathBuf },
    /// Emit a generated instance file on standard output.
    Generate {
        #[command(subcommand)]
        which: Generate,
    },
    /// Solve by exhaustive search (slow; for cross-checking).
    Oracle { file: PathBuf },
    /// Print the state transition graph in DOT.
    ExportStg {
        file: PathBuf,
        /// Print the augmented graph for this comma-separated order of
        /// vertex cover tasks instead.
        #[arg(long, value_delimiter = ',')]
        augmented: Option<Vec<String>>,
    },
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Plan verification from a word shuffle question.
    Shuffle {
        #[arg(long)]
        u: String,
        #[arg(long, value_delimiter = ',')]
        parts: Vec<String>,
    },
    /// Reachability or plan existence from a word shuffle question.
    ShuffleState {
        #[arg(long)]
        u: String,
        #[arg(long, value_delimiter = ',')]
        parts: Vec<String>,
        #[arg(long, value_enum, default_value = "reach")]
        variant: ShuffleArg,
    },
    /// Compound instance from a colored graph.
    Clique {
        /// Color of each vertex, comma separated, in 1..=k.
        #[arg(long, value_delimiter = ',')]
        colors: Vec<usize>,
        /// Edges as `u-v` with 1-based vertices, comma separated.
        #[arg(long, value_delimiter = ',')]
        edges: Vec<String>,
        /// Number of colors; defaults to the largest color used.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "cnum")]
        variant: CliqueArg,
        #[arg(long, value_enum, default_value = "exists")]
        query: QueryArg,
    },
    /// Seeded random instance.
    Random {
        #[arg(long, env = "HTN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        tasks: usize,
        #[arg(long, default_value_t = 3)]
        props: usize,
        #[arg(long, default_value_t = 4)]
        actions: usize,
        /// antichain, chains:W, star-forest or dag:P
        #[arg(long, default_value = "dag:0.3")]
        shape: String,
        #[arg(long, value_enum, default_value = "exists")]
        query: QueryArg,
        /// Number of compound names; 0 gives a primitive instance.
        #[arg(long, default_value_t = 0)]
        compounds: usize,
        #[arg(long, default_value_t = 2)]
        methods: usize,
        #[arg(long, default_value_t = 2)]
        method_size: usize,
        #[arg(long, default_value_t = 1)]
        compound_tasks: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ShuffleArg {
    Reach,
    Exists,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliqueArg {
    Cnum,
    Cs,
    Cd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QueryArg {
    Verify,
    Exists,
    Executable,
    Reach,
}

impl From<QueryArg> for QueryKind {
    fn from(q: QueryArg) -> Self {
        match q {
            QueryArg::Verify => QueryKind::Verify,
            QueryArg::Exists => QueryKind::Exists,
            QueryArg::Executable => QueryKind::Executable,
            QueryArg::Reach => QueryKind::Reach,
        }
    }
}

/// Entry point of the `htn` binary.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line on explicit arguments and streams.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_YES;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({ "error": e.to_string() }));
            }
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = cli.limits.config();
    match &cli.command {
        Command::Solve { file } => {
            let inst = read_instance(file)?;
            let v = crate::solve(&inst, &cfg)?;
            report(cli.json, &inst, &v, out)
        }
        Command::Oracle { file } => {
            let inst = read_instance(file)?;
            let v = oracle_compound(&inst, cfg.oracle_cap)?;
            report(cli.json, &inst, &v, out)
        }
        Command::Measures { file } => {
            let inst = read_instance(file)?;
            let m = measures(&inst.network, &inst.domain);
            let k = build_state_graph(&inst.domain, &inst.init, cfg.state_cap).ok().map(|g| g.k());
            let h = m.hierarchy;
            let depth = h.c_depth.map_or_else(|| "inf".to_string(), |d| d.to_string());
            if cli.json {
                let v = json!({
                    "tasks": m.tasks, "props": m.props, "actions": m.actions,
                    "isolated": m.isolated, "primitive": m.primitive,
                    "gpow": m.gpow, "vcn": m.vcn, "k": k,
                    "c_num": h.c_num, "c_size": h.c_size, "c_depth": depth, "c_choices": h.c_choices,
                });
                writeln!(out, "{v}").map_err(io)?;
            } else {
                let k = k.map_or_else(|| format!(">{}", cfg.state_cap), |k| k.to_string());
                writeln!(out, "tasks {}\nprops {}\nactions {}\nisolated {}\nprimitive {}", m.tasks, m.props, m.actions, m.isolated, m.primitive).map_err(io)?;
                writeln!(out, "gpow {}\nvcn {}\nk {k}", m.gpow, m.vcn).map_err(io)?;
                writeln!(out, "C# {}\nCs {}\nCd {depth}\nCc {}", h.c_num, h.c_size, h.c_choices).map_err(io)?;
            }
            Ok(EXIT_YES)
        }
        Command::Generate { which } => {
            let inst = generate(which)?;
            write!(out, "{}", instance_to_string(&inst)).map_err(io)?;
            Ok(EXIT_YES)
        }
        Command::ExportStg { file, augmented } => {
            let inst = read_instance(file)?;
            let g = build_state_graph(&inst.domain, &inst.init, cfg.state_cap)?;
            let dot = match augmented {
                None => g.to_dot(&inst.domain),
                Some(order) => {
                    let tn = &inst.network;
                    if !tn.is_primitive() {
                        return Err(Error::Invalid("the augmented graph needs a primitive network".into()));
                    }
                    let ids = order
                        .iter()
                        .map(|n| {
                            tn.task_id(n).ok_or_else(|| Error::UnknownName {
                                kind: "task",
                                name: n.clone(),
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let classes = action_equivalence_classes(&g);
                    let strong = strong_classes(tn, &classes, &ids);
                    augmented_graph(&g, &classes, &strong).to_dot(&g, &inst.domain, &strong)
                }
            };
            write!(out, "{dot}").map_err(io)?;
            Ok(EXIT_YES)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Invalid(format!("write failed: {e}"))
}

fn report(as_json: bool, inst: &Instance, v: &Verdict, out: &mut dyn Write) -> Result<i32> {
    if as_json {
        writeln!(out, "{}", verdict_json(inst, v)).map_err(io)?;
    } else {
        writeln!(out, "answer {}", if v.answer { "yes" } else { "no" }).map_err(io)?;
        if let Some(r) = v.stats.route {
            writeln!(out, "route {r}").map_err(io)?;
        }
        if let Some(r) = &v.reason {
            writeln!(out, "reason {r}").map_err(io)?;
        }
        if let Some(w) = &v.witness {
            let net = w.decomposition.as_ref().map_or(&inst.network, |d| &d.network);
            if let Some(dec) = &w.decomposition {
                let ch: Vec<String> = dec.choices.iter().map(|(t, m)| format!("{t}:{m}")).collect();
                writeln!(out, "decomposition {}", ch.join(" ")).map_err(io)?;
            }
            let tasks: Vec<&str> = w.linearization.iter().map(|&t| net.name(t)).collect();
            let plan: Vec<&str> = w
                .linearization
                .iter()
                .map(|&t| inst.domain.label_name(net.label(t)))
                .collect();
            writeln!(out, "witness {}", tasks.join(" ")).map_err(io)?;
            writeln!(out, "plan {}", plan.join(" ")).map_err(io)?;
        }
        let s = &v.stats;
        writeln!(
            out,
            "stats nodes={} branches={} ilp_calls={} decompositions={}",
            s.nodes, s.branches, s.ilp_calls, s.decompositions
        )
        .map_err(io)?;
    }
    Ok(if v.answer { EXIT_YES } else { EXIT_NO })
}

fn parse_shape(s: &str) -> Result<Shape> {
    let bad = || Error::Invalid(format!("unknown shape `{s}`; use antichain, chains:W, star-forest or dag:P"));
    match s.split_once(':') {
        None if s == "antichain" => Ok(Shape::Antichain),
        None if s == "star-forest" => Ok(Shape::StarForest),
        Some(("chains", w)) => w.parse().map(Shape::Chains).map_err(|_| bad()),
        Some(("dag", p)) => match p.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => Ok(Shape::RandomDag(p)),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn generate(which: &Generate) -> Result<Instance> {
    match which {
        Generate::Shuffle { u, parts } => gen_shuffle_verification(&ShuffleInput {
            u: u.clone(),
            parts: parts.clone(),
        }),
        Generate::ShuffleState { u, parts, variant } => {
            let v = match variant {
                ShuffleArg::Reach => ShuffleVariant::Reach,
                ShuffleArg::Exists => ShuffleVariant::Exists,
            };
            gen_shuffle_state(
                &ShuffleInput {
                    u: u.clone(),
                    parts: parts.clone(),
                },
                v,
            )
        }
        Generate::Clique {
            colors,
            edges,
            k,
            variant,
            query,
        } => {
            let edges = edges
                .iter()
                .filter(|e| !e.is_empty())
                .map(|e| {
                    let parsed = e
                        .split_once('-')
                        .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
                    match parsed {
                        Some((a, b)) if a >= 1 && b >= 1 => Ok((a - 1, b - 1)),
                        _ => Err(Error::Invalid(format!("edge `{e}` is not of the form u-v"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let g = ColoredGraph {
                k: k.unwrap_or_else(|| colors.iter().copied().max().unwrap_or(0)),
                colors: colors.clone(),
                edges,
            };
            let v = match variant {
                CliqueArg::Cnum => CliqueVariant::Cnum,
                CliqueArg::Cs => CliqueVariant::Cs,
                CliqueArg::Cd => CliqueVariant::Cd,
            };
            gen_clique(&g, v, (*query).into())
        }
        Generate::Random {
            seed,
            tasks,
            props,
            actions,
            shape,
            query,
            compounds,
            methods,
            method_size,
            compound_tasks,
        } => {
            let compound = (*compounds > 0).then_some(CompoundOptions {
                compounds: *compounds,
                methods: *methods,
                max_method_size: *method_size,
                compound_tasks: *compound_tasks,
            });
            let profile = RandomProfile {
                num_tasks: *tasks,
                num_props: *props,
                num_actions: *actions,
                shape: parse_shape(shape)?,
                query: (*query).into(),
                compound,
            };
            Ok(gen_random(*seed, &profile))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(parse_shape("chains:3").unwrap(), Shape::Chains(3));
        assert_eq!(parse_shape("dag:0.5").unwrap(), Shape::RandomDag(0.5));
        assert!(parse_shape("dag:2").is_err());
        assert!(parse_shape("ring").is_err());
    }

    #[test]
    fn generate_and_help() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_from(["htn", "generate", "shuffle", "--u", "ab", "--parts", "a,b"], &mut out, &mut err);
        assert_eq!(code, EXIT_YES);
        assert!(String::from_utf8(out).unwrap().contains("htn-instance/1"));
        let mut out = Vec::new();
        assert_eq!(run_from(["htn", "--help"], &mut out, &mut err), EXIT_YES);
        assert_eq!(run_from(["htn", "bogus"], &mut out, &mut err), EXIT_ERROR);
    }
}

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use intgraph::burnside::{characterization_report, prop_index_bound, product_table, table_of_marks};
use intgraph::complexes::{topology_report, DEFAULT_FACE_BUDGET};
use intgraph::corpus::default_corpus;
use intgraph::domgraph::{gamma_exact, intersection_graph, p_subgroup_carrier, restricted_graph, sum_number};
use intgraph::lattice::{characteristic_subgroups, classify_group, subgroup_classes};
use intgraph::suite::{run_suite, SuiteOptions};
use intgraph::theorems::{verify_bounds, BoundsInput, GroupFamily, Verdict};
use intgraph::{build_group, enumerate_subgroups, parse_group_spec, Budget, Error, GroupTable, Lattice, SearchLimits};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "intgraph", version, about = "Intersection graphs of subgroups of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Compact single-line JSON instead of pretty-printed
    #[arg(long, global = true)]
    json: bool,

    /// Wall-clock budget in milliseconds
    #[arg(long, global = true)]
    budget_ms: Option<u64>,

    /// Element cap for group closure
    #[arg(long, global = true, default_value_t = intgraph::DEFAULT_ELEMENT_CAP)]
    cap: usize,

    /// Worker threads for parallel work
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Include elapsed time in the output (makes output non-deterministic)
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Subgroup lattice summary
    Subgroups { group: String },
    /// Intersection graph on proper non-trivial subgroups
    Graph {
        group: String,
        /// Write the graph in DOT format to this path (`-` for stdout)
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Restrict to p-subgroups for this prime
        #[arg(long)]
        prime: Option<usize>,
    },
    /// Domination number with witness and theorem checks
    Gamma { group: String },
    /// Least number of proper subgroups whose union is the group
    Sum { group: String },
    /// Burnside ring products, marks and characterizations
    Burnside { group: String },
    /// Homology of the intersection complex and related models
    Complex {
        group: String,
        /// Face budget for homology
        #[arg(long, default_value_t = DEFAULT_FACE_BUDGET)]
        max_faces: usize,
    },
    /// Run every check over the built-in corpus
    Verify {
        #[arg(long, default_value_t = 48)]
        order_max: usize,
    },
    /// List the built-in corpus
    Corpus {
        #[arg(long)]
        order_max: Option<usize>,
    },
}

struct Outcome {
    result: Value,
    code: u8,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { result, code: 0 }
    }
}

#[derive(Serialize)]
struct SubgroupRef {
    index: usize,
    order: usize,
    generators: Vec<u32>,
}

fn subgroup_ref(lat: &Lattice, i: usize) -> SubgroupRef {
    SubgroupRef { index: i, order: lat.order_of(i), generators: lat.subgroup(i).generators().to_vec() }
}

fn refs(lat: &Lattice, idx: &[usize]) -> Vec<SubgroupRef> {
    idx.iter().map(|&i| subgroup_ref(lat, i)).collect()
}

struct Context {
    deadline: Option<Instant>,
    cap: usize,
}

impl Context {
    fn limits(&self) -> SearchLimits {
        SearchLimits { deadline: self.deadline, max_nodes: None }
    }

    fn load(&self, text: &str) -> Result<(GroupTable, Lattice), Error> {
        let spec = parse_group_spec(text)?;
        let g = build_group(&spec, self.cap)?;
        let lat = enumerate_subgroups(&g, &Budget { deadline: self.deadline, max_subgroups: None })?;
        Ok((g, lat))
    }
}

fn subgroups(ctx: &Context, text: &str) -> Result<Outcome, Error> {
    let (g, lat) = ctx.load(text)?;
    let chars = characteristic_subgroups(&g, &lat);
    let cls = subgroup_classes(&g, &lat);
    let all: Vec<Value> = (0..lat.len())
        .map(|i| {
            json!({
                "index": i,
                "order": lat.order_of(i),
                "generators": lat.subgroup(i).generators(),
                "normal": lat.is_normal(&g, i),
                "class": cls.class_of[i],
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "order": g.order(),
        "count": lat.len(),
        "classes": cls.len(),
        "atoms": lat.atoms(),
        "coatoms": lat.coatoms(),
        "vertices": lat.vertex_set().len(),
        "classification": classify_group(&g, &lat),
        "characteristic": chars,
        "subgroups": all,
    })))
}

fn graph(ctx: &Context, text: &str, dot: Option<&PathBuf>, prime: Option<usize>) -> Result<(Outcome, Option<String>), Error> {
    let (_, lat) = ctx.load(text)?;
    let gr = match prime {
        Some(p) => restricted_graph(&lat, p_subgroup_carrier(&lat, p)),
        None => intersection_graph(&lat),
    };
    let mut dot_out = None;
    if let Some(path) = dot {
        let rendered = gr.to_dot(&lat, text);
        if path.as_os_str() == "-" {
            dot_out = Some(rendered);
        } else {
            std::fs::write(path, rendered).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        }
    }
    let vertices: Vec<SubgroupRef> = refs(&lat, gr.vertices());
    Ok((
        Outcome::ok(json!({
            "mode": gr.mode(),
            "vertices": vertices,
            "edges": gr.edges(),
            "edge_count": gr.edge_count(),
            "degrees": gr.degree_sequence(),
        })),
        dot_out,
    ))
}

fn gamma(ctx: &Context, text: &str) -> Result<Outcome, Error> {
    let spec = parse_group_spec(text)?;
    let (g, lat) = ctx.load(text)?;
    let cert = gamma_exact(&lat, ctx.limits());
    let chars = characteristic_subgroups(&g, &lat);
    let class = classify_group(&g, &lat);
    let reports = verify_bounds(&BoundsInput {
        group: &g,
        lattice: &lat,
        chars: &chars,
        class: &class,
        gamma: &cert,
        family: GroupFamily::of(&spec),
    });
    let code = if reports.iter().any(|r| r.verdict == Verdict::Violation) {
        EXIT_VIOLATION
    } else if !cert.optimal {
        EXIT_BUDGET
    } else {
        0
    };
    Ok(Outcome {
        result: json!({
            "gamma": cert.gamma,
            "witness": refs(&lat, &cert.witness),
            "optimal": cert.optimal,
            "lower_bound": cert.lower_bound,
            "method": cert.method,
            "reports": reports,
        }),
        code,
    })
}

fn sum(ctx: &Context, text: &str) -> Result<Outcome, Error> {
    let (g, lat) = ctx.load(text)?;
    let s = sum_number(&g, &lat, ctx.limits());
    Ok(Outcome {
        result: json!({
            "sum_number": s.value,
            "witness": refs(&lat, &s.witness),
            "optimal": s.optimal,
            "lower_bound": s.lower_bound,
        }),
        code: if s.optimal { 0 } else { EXIT_BUDGET },
    })
}

fn burnside(ctx: &Context, text: &str) -> Result<Outcome, Error> {
    let (g, lat) = ctx.load(text)?;
    let cls = subgroup_classes(&g, &lat);
    let products = product_table(&g, &lat, &cls);
    let marks = table_of_marks(&g, &lat, &cls);
    let bound = prop_index_bound(&lat, &cls, &products);
    let report = characterization_report(&g, &lat, &cls, &products);
    let reps: Vec<usize> = cls.classes.iter().map(|c| c.rep).collect();
    let classes: Vec<Value> = cls
        .classes
        .iter()
        .map(|c| json!({"rep": c.rep, "order": lat.order_of(c.rep), "size": c.members.len(), "normalizer": c.normalizer}))
        .collect();
    let violation = bound.anomaly || (report.abelian && !report.all_hold());
    Ok(Outcome {
        result: json!({
            "classes": classes,
            "representatives": reps,
            "marks": marks,
            "products": products,
            "index_bound": bound,
            "characterizations": report,
        }),
        code: if violation { EXIT_VIOLATION } else { 0 },
    })
}

fn complex(ctx: &Context, text: &str, max_faces: usize) -> Result<Outcome, Error> {
    let (g, lat) = ctx.load(text)?;
    let chars = characteristic_subgroups(&g, &lat);
    let cert = gamma_exact(&lat, ctx.limits());
    let t = topology_report(&lat, &chars, cert.gamma, max_faces);
    let code = if !t.claims_hold() {
        EXIT_VIOLATION
    } else if t.profiles_agree.is_none() {
        EXIT_BUDGET
    } else {
        0
    };
    Ok(Outcome { result: serde_json::to_value(&t).expect("report serializes"), code })
}

fn verify(ctx: &Context, order_max: usize) -> Result<Outcome, Error> {
    let opts = SuiteOptions { order_max, cap: ctx.cap, deadline: ctx.deadline, ..SuiteOptions::default() };
    let report = run_suite(&default_corpus(), &opts)?;
    let code = if report.violations > 0 {
        EXIT_VIOLATION
    } else if report.aborted > 0 {
        EXIT_BUDGET
    } else {
        0
    };
    Ok(Outcome { result: serde_json::to_value(&report).expect("report serializes"), code })
}

fn corpus(ctx: &Context, order_max: Option<usize>) -> Result<Outcome, Error> {
    let mut entries = Vec::new();
    for e in default_corpus() {
        let order = build_group(&parse_group_spec(&e.spec)?, ctx.cap).map(|g| g.order()).ok();
        if order_max.is_some_and(|m| order.is_none_or(|o| o > m)) {
            continue;
        }
        let mut v = serde_json::to_value(&e).expect("entry serializes");
        v["order"] = json!(order);
        entries.push(v);
    }
    Ok(Outcome::ok(json!({"count": entries.len(), "entries": entries})))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } | Error::CapExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if let Some(n) = cli.common.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let ctx = Context {
        deadline: cli.common.budget_ms.map(|ms| start + Duration::from_millis(ms)),
        cap: cli.common.cap,
    };
    let (group, name) = match &cli.command {
        Command::Subgroups { group } => (group.clone(), "subgroups"),
        Command::Graph { group, .. } => (group.clone(), "graph"),
        Command::Gamma { group } => (group.clone(), "gamma"),
        Command::Sum { group } => (group.clone(), "sum"),
        Command::Burnside { group } => (group.clone(), "burnside"),
        Command::Complex { group, .. } => (group.clone(), "complex"),
        Command::Verify { .. } => ("corpus".to_string(), "verify"),
        Command::Corpus { .. } => ("corpus".to_string(), "corpus"),
    };
    let mut dot = None;
    let outcome = match &cli.command {
        Command::Subgroups { group } => subgroups(&ctx, group),
        Command::Graph { group, dot: path, prime } => {
            graph(&ctx, group, path.as_ref(), *prime).map(|(o, d)| {
                dot = d;
                o
            })
        }
        Command::Gamma { group } => gamma(&ctx, group),
        Command::Sum { group } => sum(&ctx, group),
        Command::Burnside { group } => burnside(&ctx, group),
        Command::Complex { group, max_faces } => complex(&ctx, group, *max_faces),
        Command::Verify { order_max } => verify(&ctx, *order_max),
        Command::Corpus { order_max } => corpus(&ctx, *order_max),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(d) = dot {
        print!("{d}");
        return ExitCode::from(outcome.code);
    }
    let mut envelope = json!({
        "group": group,
        "command": name,
        "result": outcome.result,
        "budget": {"budget_ms": cli.common.budget_ms, "cap": cli.common.cap},
    });
    if cli.common.timing {
        envelope["timing_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    let text = if cli.common.json {
        serde_json::to_string(&envelope)
    } else {
        serde_json::to_string_pretty(&envelope)
    };
    println!("{}", text.expect("json serializes"));
    ExitCode::from(outcome.code)
}

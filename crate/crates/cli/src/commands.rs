use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use hitwalk_core::graphs::{self, Graph};
use hitwalk_core::numerics;
use hitwalk_core::partitions::{self, coarsest_stabilized, quotient_hitting_times, QuotientKind};
use hitwalk_core::schemes::{self, AssociationScheme};
use hitwalk_core::verify::{self, CheckName, Status, Subject};
use hitwalk_core::walks::{self, hit_full, hit_monte_carlo_with, Method, WalkKind};

use crate::output::{digest, Failure, InputDigest};

pub const CONVENTION: &str =
    "column-stochastic: T[i][j] = a_ij / sum_l a_lj is the probability of stepping j -> i; times[u] is the expected number of steps from u to the target";

/// What a command produced: the JSON payload, its exit code, and what it
/// read.
pub struct Output {
    pub payload: Value,
    pub code: u8,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
}

impl Output {
    fn ok(payload: Value, inputs: Vec<InputDigest>) -> Output {
        Output {
            payload,
            code: crate::output::EXIT_OK,
            inputs,
            seed: None,
        }
    }
}

fn read_input(path: &Path) -> Result<(String, InputDigest), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let d = digest(path, &bytes);
    let text = String::from_utf8(bytes).map_err(|_| Failure::input(format!("{} is not UTF-8", path.display())))?;
    Ok((text, d))
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Reads a graph file: JSON if it starts with `{`, otherwise an edge list.
pub fn load_graph(path: &Path) -> Result<(Graph, InputDigest), Failure> {
    let (text, d) = read_input(path)?;
    let g = if is_json(&text) {
        graphs::from_json(&text)?
    } else {
        graphs::parse_edge_list(&text)?
    };
    Ok((g, d))
}

fn load_subject(path: &Path) -> Result<(Subject, InputDigest), Failure> {
    let (text, d) = read_input(path)?;
    let name = path.display().to_string();
    let s = if is_json(&text) {
        Subject::from_json(name, &text)?
    } else {
        Subject::new(name, graphs::parse_edge_list(&text)?)
    };
    Ok((s, d))
}

fn wants_edge_list(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("txt" | "edges" | "el")
    )
}

pub fn gen(family: &str, params: &[usize], base: Option<&Path>, out: Option<&Path>) -> Result<Output, Failure> {
    let mut inputs = Vec::new();
    let g = if family == "cone" {
        let base = base.ok_or_else(|| Failure::input("`gen cone` needs --base <graph>"))?;
        if !params.is_empty() {
            return Err(Failure::input("`gen cone` takes no numeric parameters"));
        }
        let (b, d) = load_graph(base)?;
        inputs.push(d);
        graphs::cone(&b)?
    } else {
        if base.is_some() {
            return Err(Failure::input("--base is only used with `gen cone`"));
        }
        graphs::generate(family, params)?
    };
    let payload = match out {
        None => graphs::to_json_value(&g),
        Some(path) => {
            let text = if wants_edge_list(path) {
                graphs::to_edge_list(&g)
            } else {
                graphs::to_json(&g) + "\n"
            };
            fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            json!({
                "written": path.display().to_string(),
                "format": if wants_edge_list(path) { "edge_list" } else { "json" },
                "n": g.n(),
                "edges": g.edge_count(),
            })
        }
    };
    Ok(Output::ok(payload, inputs))
}

pub struct HitArgs<'a> {
    pub graph: &'a Path,
    pub target: usize,
    pub source: Option<usize>,
    pub walk: WalkKind,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
}

pub fn hit(args: &HitArgs<'_>) -> Result<Output, Failure> {
    let (g, d) = load_graph(args.graph)?;
    g.check_vertex(args.target)?;
    if let Some(u) = args.source {
        g.check_vertex(u)?;
    }
    let mut out = match args.method {
        Method::Full => {
            let report = hit_full(&g, args.target, args.walk)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["convention"] = json!(CONVENTION);
            v
        }
        Method::Quotient => {
            let route = partitions::hit_quotient(&g, args.target, args.walk)?;
            let mut v = serde_json::to_value(&route.report).expect("report serializes");
            v["convention"] = json!(CONVENTION);
            v["partition"] = serde_json::to_value(&route.partition).expect("partition serializes");
            v["quotient"] = serde_json::to_value(&route.quotient).expect("quotient serializes");
            v
        }
        Method::MonteCarlo => {
            if args.samples == 0 {
                return Err(Failure::input("--samples must be at least 1"));
            }
            let t = walks::transition(&g, args.walk)?;
            let sources: Vec<usize> = match args.source {
                Some(u) => vec![u],
                None => (0..g.n()).filter(|&u| u != args.target).collect(),
            };
            let mut times = vec![Value::Null; g.n()];
            let mut stderr = vec![Value::Null; g.n()];
            times[args.target] = json!(0.0);
            stderr[args.target] = json!(0.0);
            let mut rng = walks::MC_RNG.to_string();
            for &u in &sources {
                let est = hit_monte_carlo_with(&t, args.target, u, args.samples, args.seed)?;
                times[u] = json!(est.mean);
                stderr[u] = json!(est.stderr);
                rng = est.rng;
            }
            json!({
                "target": args.target,
                "method": Method::MonteCarlo,
                "walk": args.walk,
                "times": times,
                "residual": Value::Null,
                "samples": args.samples,
                "stderr": stderr,
                "seed": args.seed,
                "rng": rng,
                "convention": CONVENTION,
            })
        }
    };
    if let Some(u) = args.source {
        out["source"] = json!(u);
        out["time"] = out["times"][u].clone();
    }
    let mut output = Output::ok(out, vec![d]);
    if args.method == Method::MonteCarlo {
        output.seed = Some(args.seed);
    }
    Ok(output)
}

pub fn verify(graph: Option<&Path>, suite: Option<&str>, checks: &[CheckName]) -> Result<Output, Failure> {
    let mut subjects = Vec::new();
    let mut inputs = Vec::new();
    if let Some(path) = graph {
        let (s, d) = load_subject(path)?;
        subjects.push(s);
        inputs.push(d);
    }
    match suite {
        Some("families") => subjects.extend(verify::family_subjects()?),
        Some(other) => return Err(Failure::input(format!("unknown suite `{other}`; available: families"))),
        None => {}
    }
    if subjects.is_empty() {
        return Err(Failure::input("give a graph file or --suite families"));
    }
    let checks: Vec<CheckName> = if checks.is_empty() {
        CheckName::ALL.to_vec()
    } else {
        checks.to_vec()
    };
    let results = verify::run_checks(&checks, &subjects)?;
    let summary = verify::summarize(&checks, &results);

    eprintln!("{:<16} {:<15} {:>7} {:>7} {:>7}  max residual", "check", "status", "graphs", "passed", "failed");
    for s in &summary {
        eprintln!(
            "{:<16} {:<15} {:>7} {:>7} {:>7}  {:.3e}",
            s.check.as_str(),
            serde_json::to_value(s.status).expect("status").as_str().unwrap_or(""),
            s.graphs,
            s.passed,
            s.failed,
            s.max_residual
        );
    }
    let failed = summary.iter().any(|s| s.status == Status::Fail);
    let payload = json!({ "summary": summary, "results": results });
    let mut out = Output::ok(payload, inputs);
    if failed {
        out.code = crate::output::EXIT_CHECK;
    }
    Ok(out)
}

pub fn partition(graph: &Path, center: usize, kind: QuotientKind) -> Result<Output, Failure> {
    let (g, d) = load_graph(graph)?;
    g.check_vertex(center)?;
    let perron = numerics::perron(&g)?;
    let p = coarsest_stabilized(&g, center, kind, Some(&perron))?;
    let q = partitions::check(&g, &p, kind, &perron).map_err(|w| {
        Failure::check(
            "refinement produced a partition that fails its own check",
            serde_json::to_value(&w).expect("witness serializes"),
        )
    })?;
    let times = quotient_hitting_times(&q)?;
    let payload = json!({
        "center": center,
        "kind": kind,
        "partition": p,
        "quotient": q,
        "column_sums": q.matrix.column_sums(),
        "block_hitting_times": times,
        "walk": match kind {
            QuotientKind::Equitable => WalkKind::Simple,
            QuotientKind::Weight => WalkKind::Merw,
        },
    });
    Ok(Output::ok(payload, vec![d]))
}

pub enum SchemeSource<'a> {
    File(&'a Path),
    Catalog(&'a str),
}

fn load_scheme(source: &SchemeSource<'_>) -> Result<(AssociationScheme, Vec<InputDigest>), Failure> {
    match source {
        SchemeSource::File(path) => {
            let (text, d) = read_input(path)?;
            let scheme = AssociationScheme::from_json(&text)?.map_err(|w| {
                Failure::check(
                    "relations do not form a symmetric association scheme",
                    serde_json::to_value(&w).expect("witness serializes"),
                )
            })?;
            Ok((scheme, vec![d]))
        }
        SchemeSource::Catalog(spec) => {
            let mut parts = spec.split(':');
            let name = parts.next().unwrap_or_default();
            let params = parts
                .next()
                .map(|p| {
                    p.split(',')
                        .filter(|s| !s.is_empty())
                        .map(|s| s.trim().parse::<usize>().map_err(|_| Failure::input(format!("bad scheme parameter `{s}`"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?
                .unwrap_or_default();
            Ok((schemes::catalog(name, &params)?, Vec::new()))
        }
    }
}

pub fn scheme(source: &SchemeSource<'_>, relations: &[usize], start: usize) -> Result<Output, Failure> {
    let (s, inputs) = load_scheme(source)?;
    if relations.is_empty() {
        return Err(Failure::input("give --relation or --union"));
    }
    let value = schemes::hit_t_distance_regular(&s, relations, start)?;
    let mut payload = json!({
        "n": s.n(),
        "d": s.d(),
        "relations": relations,
        "start": start,
        "value": value,
        "quotient": s.union_quotient(relations)?,
    });
    if let [i] = relations {
        if *i == start {
            payload["adjacent_closed_form"] = json!(schemes::scheme_adjacent_hitting(&s, *i)?);
        }
    }
    Ok(Output::ok(payload, inputs))
}


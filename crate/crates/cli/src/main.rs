//! `hitwalk`: hitting times of simple and maximal-entropy random walks.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hitwalk_core::partitions::QuotientKind;
use hitwalk_core::verify::CheckName;
use hitwalk_core::walks::{Method, WalkKind};

use commands::{HitArgs, SchemeSource};
use output::{Failure, RunRecord, Timings};

#[derive(Parser)]
#[command(name = "hitwalk", version, about = "Hitting times of simple and maximal-entropy random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkArg {
    Simple,
    Merw,
}

impl From<WalkArg> for WalkKind {
    fn from(w: WalkArg) -> WalkKind {
        match w {
            WalkArg::Simple => WalkKind::Simple,
            WalkArg::Merw => WalkKind::Merw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Full,
    Quotient,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Full => Method::Full,
            MethodArg::Quotient => Method::Quotient,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Equitable,
    Weight,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a named family.
    Gen {
        /// Family name, e.g. cycle, hypercube, petersen, wheel, cone.
        family: String,
        /// Integer parameters of the family.
        params: Vec<usize>,
        /// Write the graph here (.txt/.edges for an edge list, otherwise JSON).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Base graph for `cone`.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Hitting times to a target vertex.
    Hit {
        graph: PathBuf,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        source: Option<usize>,
        #[arg(long, value_enum, default_value = "simple")]
        walk: WalkArg,
        #[arg(long, value_enum, default_value = "full")]
        method: MethodArg,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write a reproducibility record to this path.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Run verification checks on a graph or a built-in suite.
    Verify {
        graph: Option<PathBuf>,
        #[arg(long)]
        suite: Option<String>,
        /// Comma-separated check names (default: all).
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Coarsest stabilized partition around a centre vertex.
    Partition {
        graph: PathBuf,
        #[arg(long)]
        center: usize,
        #[arg(long, value_enum, default_value = "equitable")]
        kind: KindArg,
    },
    /// Hitting times on the relation graphs of an association scheme.
    Scheme {
        /// JSON file with relation matrices or a label matrix.
        path: Option<PathBuf>,
        /// Built-in scheme, e.g. `hamming:3`, `johnson:5,2`, `petersen`.
        #[arg(long, conflicts_with = "path")]
        catalog: Option<String>,
        #[arg(long, conflicts_with = "union")]
        relation: Option<usize>,
        /// Comma-separated relation indices whose union is walked on.
        #[arg(long, value_delimiter = ',')]
        union: Vec<usize>,
        /// Relation class of the starting vertex relative to the target.
        #[arg(long)]
        start: usize,
    },
}

fn run(cli: &Cli) -> Result<(commands::Output, Option<PathBuf>), Failure> {
    match &cli.command {
        Command::Gen {
            family,
            params,
            output,
            base,
        } => Ok((commands::gen(family, params, base.as_deref(), output.as_deref())?, None)),
        Command::Hit {
            graph,
            target,
            source,
            walk,
            method,
            samples,
            seed,
            record,
        } => {
            let args = HitArgs {
                graph,
                target: *target,
                source: *source,
                walk: (*walk).into(),
                method: (*method).into(),
                samples: *samples,
                seed: *seed,
            };
            Ok((commands::hit(&args)?, record.clone()))
        }
        Command::Verify {
            graph,
            suite,
            checks,
            record,
        } => {
            let checks = checks
                .iter()
                .map(|c| c.parse::<CheckName>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok((commands::verify(graph.as_deref(), suite.as_deref(), &checks)?, record.clone()))
        }
        Command::Partition { graph, center, kind } => {
            let kind = match kind {
                KindArg::Equitable => QuotientKind::Equitable,
                KindArg::Weight => QuotientKind::Weight,
            };
            Ok((commands::partition(graph, *center, kind)?, None))
        }
        Command::Scheme {
            path,
            catalog,
            relation,
            union,
            start,
        } => {
            let source = match (path, catalog) {
                (Some(p), None) => SchemeSource::File(p),
                (None, Some(c)) => SchemeSource::Catalog(c),
                _ => return Err(Failure::input("give a scheme file or --catalog")),
            };
            let relations: Vec<usize> = match relation {
                Some(r) => vec![*r],
                None => union.clone(),
            };
            Ok((commands::scheme(&source, &relations, *start)?, None))
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, record)) => {
            output::print(&out.payload);
            if let Some(path) = record {
                let rec = RunRecord {
                    command_line: std::env::args().collect(),
                    version: env!("CARGO_PKG_VERSION"),
                    inputs: &out.inputs,
                    seed: out.seed,
                    results: &out.payload,
                    timings: Timings::new(started.elapsed()),
                };
                if let Err(e) = std::fs::write(&path, output::render(&rec) + "\n") {
                    let f = Failure::input(format!("cannot write {}: {e}", path.display()));
                    f.report();
                    return ExitCode::from(f.code);
                }
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            f.report();
            ExitCode::from(f.code)
        }
    }
}

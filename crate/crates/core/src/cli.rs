//! Command-line front end: `gen`, `run`, `verify` and `bench`.
//!
//! Exit codes: 0 success, 1 verification failure or infeasible instance,
//! 2 input error, 3 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::coloring::PartialEdgeColoring;
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec, Model};
use crate::graph::Graph;
use crate::pipeline::{phase, run_pipeline, PipelineConfig, PipelineResult, Variant};
use crate::verify::check_proper_coloring;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Per-phase columns of the benchmark CSV, in order.
pub const BENCH_PHASES: [&str; 11] = [
    phase::RULING_SET,
    phase::CLUSTERING,
    phase::RESIDUAL,
    phase::CLASSIFY,
    phase::TARGETS,
    phase::PROPOSALS,
    phase::HSO,
    phase::SWITCH,
    phase::EXTENSION,
    phase::FALLBACK,
    phase::SMALL_DELTA,
];

#[derive(Debug, Parser)]
#[command(name = "twodelta", version, about = "Distributed (2Δ−2)-edge coloring in a simulated LOCAL model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance as an edge list.
    Gen {
        #[arg(long, default_value = "regular")]
        model: Model,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        d: usize,
        #[arg(long)]
        girth_min: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Color an instance and check the result.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "det")]
        variant: Variant,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_coloring: Option<PathBuf>,
        #[arg(long)]
        out_trace: Option<PathBuf>,
        #[arg(long)]
        leaf_threshold: Option<usize>,
        #[arg(long)]
        max_rounds: Option<usize>,
        /// Fail instead of falling back to sequential work.
        #[arg(long)]
        no_fallback: bool,
        /// Route even-cycle clusters through the assignment phase as well.
        #[arg(long)]
        assign_all_clusters: bool,
    },
    /// Check a coloring against a graph with the 2Δ−2 palette.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Run random regular instances over several sizes and seeds.
    Bench {
        #[arg(long, default_value_t = 8)]
        d: usize,
        /// Comma-separated vertex counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value = "det")]
        variant: Variant,
        /// Number of seeds per size (seeds 0, 1, ...).
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidGraph(_) | Error::Io(_) | Error::PreconditionViolation(_) => EXIT_INPUT,
        Error::RoundBudgetExceeded { .. } | Error::BudgetExceeded(_) => EXIT_BUDGET,
        _ => EXIT_FAILED,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse_edge_list(&fs::read_to_string(path)?)
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Gen { model, n, d, girth_min, seed, out } => {
            let mut spec = GeneratorSpec::new(model, n, d, seed);
            spec.girth_min = girth_min;
            let g = generate(&spec)?;
            fs::write(&out, g.to_edge_list())?;
            println!("wrote {} vertices and {} edges to {}", g.n(), g.m(), out.display());
            Ok(EXIT_OK)
        }
        Command::Run { input, variant, seed, out_coloring, out_trace, leaf_threshold, max_rounds, no_fallback, assign_all_clusters } => {
            let mut cfg = PipelineConfig::new(variant);
            cfg.seed = seed;
            cfg.leaf_threshold = leaf_threshold;
            cfg.fallback = !no_fallback;
            cfg.assign_all_clusters = assign_all_clusters;
            if let Some(r) = max_rounds {
                cfg.max_rounds = r;
            }
            cfg.validate()?;
            let g = read_graph(&input)?;
            let res = run_pipeline(&g, &cfg)?;
            let report = check_proper_coloring(&g, &res.coloring, Some(res.palette), true);
            for f in &res.fallbacks {
                eprintln!("fallback in {} (cluster {:?}): {}", f.phase, f.cluster, f.reason);
            }
            if let Some(path) = out_coloring {
                fs::write(path, res.coloring.to_text(&g))?;
            }
            if let Some(path) = out_trace {
                fs::write(path, res.trace.to_json_lines())?;
            }
            println!("{}", serde_json::to_string(&res.summary(&g)).expect("summary serializes"));
            if report.pass {
                Ok(EXIT_OK)
            } else {
                eprintln!("{report}");
                Ok(EXIT_FAILED)
            }
        }
        Command::Verify { input, coloring } => {
            let g = read_graph(&input)?;
            let c = PartialEdgeColoring::parse(&g, &fs::read_to_string(coloring)?)?;
            let palette = (2 * g.max_degree()).saturating_sub(2);
            let report = check_proper_coloring(&g, &c, Some(palette), true);
            println!("{report}");
            Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Bench { d, n_list, variant, seeds, csv } => {
            let text = bench_csv(d, &n_list, variant, seeds)?;
            match csv {
                Some(path) => fs::write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
    }
}

/// Header of the benchmark CSV.
pub fn bench_header() -> String {
    let mut cols = vec!["n", "delta", "variant", "seed", "total_rounds"];
    cols.extend(BENCH_PHASES);
    cols.extend(["fallbacks", "status"]);
    cols.join(",")
}

fn bench_row(n: usize, d: usize, variant: Variant, seed: u64, outcome: &Result<PipelineResult>) -> String {
    let mut cols = vec![n.to_string(), d.to_string(), variant.to_string(), seed.to_string()];
    match outcome {
        Ok(res) => {
            cols.push(res.trace.total_rounds().to_string());
            cols.extend(BENCH_PHASES.iter().map(|p| res.trace.rounds_of(p).to_string()));
            cols.push(res.fallbacks.len().to_string());
            cols.push("ok".into());
        }
        Err(e) => {
            cols.extend(std::iter::repeat_n(String::new(), BENCH_PHASES.len() + 2));
            cols.push(format!("error:{}", exit_code(e)));
        }
    }
    cols.join(",")
}

/// One row per (n, seed), sorted by n then seed. Cells run in parallel.
pub fn bench_csv(d: usize, n_list: &[usize], variant: Variant, seeds: u64) -> Result<String> {
    let cells: Vec<(usize, u64)> = n_list.iter().flat_map(|&n| (0..seeds).map(move |s| (n, s))).collect();
    let mut rows: Vec<((usize, u64), String)> = cells
        .par_iter()
        .map(|&(n, seed)| {
            let outcome = generate(&GeneratorSpec::new(Model::RegularRandom, n, d, seed))
                .and_then(|g| run_pipeline(&g, &PipelineConfig::new(variant).with_seed(seed)));
            ((n, seed), bench_row(n, d, variant, seed, &outcome))
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    let mut out = bench_header();
    out.push('\n');
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn run(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("twodelta").chain(args.iter().copied()))
    }

    fn path(dir: &TempDir, name: &str) -> String {
        dir.path().join(name).to_string_lossy().into_owned()
    }

    #[test]
    fn gen_run_verify_round_trip() {
        let dir = TempDir::new().unwrap();
        let g = path(&dir, "g.txt");
        assert_eq!(run(&["gen", "--model", "regular", "--n", "1024", "--d", "8", "--seed", "7", "--out", &g]), EXIT_OK);
        let graph = Graph::parse_edge_list(&fs::read_to_string(&g).unwrap()).unwrap();
        assert_eq!((graph.n(), graph.m()), (1024, 4096));
        let (c, t) = (path(&dir, "c.txt"), path(&dir, "t.jsonl"));
        assert_eq!(run(&["run", "--in", &g, "--variant", "det", "--out-coloring", &c, "--out-trace", &t]), EXIT_OK);
        assert_eq!(run(&["verify", "--in", &g, "--coloring", &c]), EXIT_OK);
        let coloring = PartialEdgeColoring::parse(&graph, &fs::read_to_string(&c).unwrap()).unwrap();
        assert!(coloring.max_color() <= 14);
        assert!(fs::read_to_string(&t).unwrap().lines().count() >= 2);
    }

    #[test]
    fn exit_codes() {
        let dir = TempDir::new().unwrap();
        let c6 = path(&dir, "c6.txt");
        assert_eq!(run(&["gen", "--model", "cycle", "--n", "6", "--out", &c6]), EXIT_OK);
        assert_eq!(run(&["gen", "--model", "regular-high-girth", "--n", "256", "--d", "12", "--girth-min", "6", "--out", &path(&dir, "x")]), EXIT_FAILED);
        assert_eq!(run(&["run", "--in", &c6, "--variant", "rand"]), EXIT_INPUT);
        assert_eq!(run(&["run", "--in", &path(&dir, "missing")]), EXIT_INPUT);
        assert_eq!(run(&["bench", "--n-list", "256", "--variant", "bogus"]), EXIT_INPUT);
        let bad = path(&dir, "bad.txt");
        fs::write(&bad, "3 1\n0 q\n").unwrap();
        assert_eq!(run(&["run", "--in", &bad]), EXIT_INPUT);
        assert_eq!(run(&["run", "--in", &c6, "--max-rounds", "1", "--no-fallback"]), EXIT_BUDGET);

        // Palette overflow: C6 has Δ = 2, so only colors 1 and 2 are allowed.
        let col = path(&dir, "c.txt");
        fs::write(&col, "0 1 1\n1 2 2\n2 3 1\n3 4 2\n4 5 1\n0 5 3\n").unwrap();
        assert_eq!(run(&["verify", "--in", &c6, "--coloring", &col]), EXIT_FAILED);
        fs::write(&col, "0 1 1\n1 2 1\n2 3 2\n3 4 1\n4 5 2\n0 5 2\n").unwrap();
        assert_eq!(run(&["verify", "--in", &c6, "--coloring", &col]), EXIT_FAILED);
    }

    #[test]
    fn bench_rows_are_keyed_and_sorted() {
        let text = bench_csv(8, &[512, 256], Variant::Mis, 2).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], bench_header());
        assert_eq!(lines.len(), 5);
        let keys: Vec<&str> = lines[1..].iter().map(|l| &l[..l.match_indices(',').nth(3).unwrap().0]).collect();
        assert_eq!(keys, ["256,8,mis,0", "256,8,mis,1", "512,8,mis,0", "512,8,mis,1"]);
        let width = bench_header().split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == width));
    }
}

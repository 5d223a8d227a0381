use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use rsfa_core::io::{
    format_csv, format_forest, format_instance, generate, parse_forest, parse_instance, render_svg, run_parameter,
    solve_parsed, Algo, ParsedInstance, RunRecord,
};
use rsfa_core::reduction::to_rsfa_instance;
use rsfa_core::{validate_rsfa, Length};

/// Largest reduced terminal count for which the exact solver supplies the
/// reference value of a run.
const REFERENCE_MAX_N: usize = 12;

#[derive(Parser)]
#[command(name = "rsfa", version, about = "Rectilinear Steiner forest arborescence solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print its value.
    Solve {
        #[arg(long)]
        algo: Algo,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the solution segments as `S x1 y1 x2 y2` lines.
        #[arg(long)]
        forest: Option<PathBuf>,
        /// Fill the wall_time_ms column.
        #[arg(long)]
        timing: bool,
    },
    /// Write a seeded random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        max: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        general_position: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several solvers over every instance file in a directory.
    Bench {
        #[arg(long)]
        dir: PathBuf,
        /// Comma-separated solver names.
        #[arg(long, value_delimiter = ',', required = true)]
        algos: Vec<Algo>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// Check that a solution serves every point of an instance.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

fn read_instance(path: &Path) -> Result<ParsedInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn reference(inst: &ParsedInstance) -> Option<Length> {
    let n = match inst {
        ParsedInstance::Rsfa(i) => i.n(),
        ParsedInstance::Prespecified(p) => to_rsfa_instance(p).ok()?.n(),
    };
    (n <= REFERENCE_MAX_N).then(|| solve_parsed(Algo::Exact, 1, inst).ok().map(|s| s.value)).flatten()
}

fn run_one(id: &str, inst: &ParsedInstance, algo: Algo, k: usize, timing: bool) -> Result<(RunRecord, rsfa_core::RectGraph)> {
    let start = Instant::now();
    let sol = solve_parsed(algo, k, inst).with_context(|| format!("{id}: {algo}"))?;
    let wall = start.elapsed();
    let reference = if algo == Algo::Exact { Some(sol.value) } else { reference(inst) };
    let record = RunRecord {
        instance: id.to_string(),
        solver: algo,
        param: run_parameter(algo, k, inst),
        value: sol.value,
        reference,
        wall_time: timing.then_some(wall),
    };
    Ok((record, sol.forest))
}

fn instance_id(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { algo, k, input, svg, csv, forest, timing } => {
            if k == 0 {
                bail!("--k must be positive");
            }
            let inst = read_instance(&input)?;
            let (record, graph) = run_one(&instance_id(&input), &inst, algo, k, timing)?;
            println!("{}", record.value);
            if let Some(path) = svg {
                fs::write(&path, render_svg(&inst.as_points(), Some(&graph)))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = csv {
                fs::write(&path, format_csv(&[record])).with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(path) = forest {
                fs::write(&path, format_forest(&graph)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Gen { n, m, max, seed, general_position, out } => {
            let inst = generate(n, m, max, seed, general_position)?;
            fs::write(&out, format_instance(&inst)).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Bench { dir, algos, k, csv, timing } => {
            if k == 0 {
                bail!("--k must be positive");
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            files.retain(|p| p.is_file());
            files.sort();
            let instances: Vec<(String, ParsedInstance)> =
                files.iter().map(|p| Ok((instance_id(p), read_instance(p)?))).collect::<Result<_>>()?;
            let jobs: Vec<(usize, usize)> =
                (0..instances.len()).flat_map(|i| (0..algos.len()).map(move |a| (i, a))).collect();
            // collect preserves job order, which is instance-sorted
            let results: Vec<Result<RunRecord>> = jobs
                .par_iter()
                .map(|&(i, a)| run_one(&instances[i].0, &instances[i].1, algos[a], k, timing).map(|r| r.0))
                .collect();
            let mut records = Vec::new();
            for r in results {
                match r {
                    Ok(rec) => records.push(rec),
                    Err(e) => eprintln!("skipped {e:#}"),
                }
            }
            fs::write(&csv, format_csv(&records)).with_context(|| format!("writing {}", csv.display()))?;
        }
        Command::Check { input, solution } => {
            let inst = read_instance(&input)?;
            let text = fs::read_to_string(&solution).with_context(|| format!("reading {}", solution.display()))?;
            let graph = parse_forest(&text).with_context(|| format!("parsing {}", solution.display()))?;
            let report = match &inst {
                ParsedInstance::Rsfa(i) => validate_rsfa(&graph, i),
                ParsedInstance::Prespecified(p) => p.service_report(&graph),
            };
            let unserved = report.unserved();
            if !unserved.is_empty() {
                for p in unserved {
                    eprintln!("unserved point {p}");
                }
                return Ok(ExitCode::FAILURE);
            }
            println!("ok {}", graph.weight());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

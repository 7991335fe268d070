use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use planematch::harness::{self, Algorithm, GenMode, RunOptions, RunReport};
use planematch::{validate, Error, Matching, PointSet};
use serde_json::json;

#[derive(Parser)]
#[command(name = "planematch", version, about = "Non-crossing bottleneck matchings of planar point sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    /// Point file: a count line, then one "x y" line per point.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Generator seed (used when no input file is given).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of generated points.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Generator mode: uniform, clustered or star-chain.
    #[arg(long, global = true, default_value = "uniform")]
    mode: String,
    /// Write an SVG drawing of the result.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Check the guarantee against an exact solution (n ≤ 16).
    #[arg(long, global = true)]
    oracle: bool,
    /// Rotation cap for one-third.
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimal bottleneck plane perfect matching by enumeration.
    Exact,
    /// Plane matching in a connected unit disk graph.
    UdgMatch,
    /// Rotate and partition a crossing bottleneck matching.
    OneThird,
    /// Matching of size n/5 within the optimal bottleneck.
    Approx1,
    /// Matching of size 2n/5 within (√2+√3) times the optimal bottleneck.
    Approx2,
    /// Bottleneck perfect matching, crossings allowed.
    CrossingBottleneck,
    /// Check a matching given as "i j" lines or a JSON report.
    Validate {
        #[arg(long)]
        edges: PathBuf,
    },
    /// Print a generated point file.
    Gen {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run algorithms on several generated instances.
    Bench {
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long = "alg", default_values_t = ["approx1".to_string(), "approx2".to_string()])]
        algs: Vec<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn io<T>(r: std::io::Result<T>, path: &std::path::Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(opts: &Opts) -> Result<PointSet, Failure> {
    if let Some(p) = &opts.input {
        return Ok(harness::parse_points(&io(fs::read(p), p)?)?);
    }
    let n = opts.n.ok_or_else(|| Error::BadParameters("give --input or --n".into()))?;
    Ok(harness::gen_points(n, opts.seed, opts.mode.parse::<GenMode>()?)?)
}

fn algorithm(name: &str) -> Result<Algorithm, Failure> {
    Ok(match name {
        "exact" => Algorithm::Exact,
        "udg-match" => Algorithm::UdgMatch,
        "one-third" => Algorithm::OneThird,
        "approx1" => Algorithm::Approx1,
        "approx2" => Algorithm::Approx2,
        "crossing-bottleneck" => Algorithm::CrossingBottleneck,
        _ => return Err(Error::BadParameters(format!("unknown algorithm {name:?}")).into()),
    })
}

fn emit(opts: &Opts, text: serde_json::Result<String>) -> Result<(), Failure> {
    let text = text.expect("report serializes");
    println!("{text}");
    if let Some(p) = &opts.json {
        io(fs::write(p, format!("{text}\n")), p)?;
    }
    Ok(())
}

fn read_edges(path: &std::path::Path) -> Result<Vec<(usize, usize)>, Failure> {
    let text = io(fs::read_to_string(path), path)?;
    if text.trim_start().starts_with('{') {
        let r: RunReport = serde_json::from_str(&text)
            .map_err(|e| Error::FormatError { line: e.line(), msg: e.to_string() })?;
        return Ok(r.edges.into_iter().map(|[a, b]| (a, b)).collect());
    }
    let mut out = Vec::new();
    for (i, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Vec<usize> = l.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| {
            Error::FormatError { line: i + 1, msg: format!("expected two point ids, got {l:?}") }
        })?;
        match v[..] {
            [a, b] => out.push((a, b)),
            _ => return Err(Error::FormatError { line: i + 1, msg: "expected two point ids".into() }.into()),
        }
    }
    Ok(out)
}

fn run_one(alg: Algorithm, opts: &Opts) -> Result<(), Failure> {
    let pts = load(opts)?;
    let seed = opts.input.is_none().then_some(opts.seed);
    let (m, report) = harness::run(alg, &pts, RunOptions { oracle: opts.oracle, cap: opts.cap, seed })?;
    if let Some(p) = &opts.svg {
        io(fs::write(p, harness::render_svg(&pts, &m)), p)?;
    }
    emit(opts, serde_json::to_string_pretty(&report))
}

fn bench(opts: &Opts, count: u64, algs: &[String]) -> Result<(), Failure> {
    let algs: Vec<Algorithm> = algs.iter().map(|a| algorithm(a)).collect::<Result<_, _>>()?;
    let n = opts.n.ok_or_else(|| Error::BadParameters("bench needs --n".into()))?;
    let mode: GenMode = opts.mode.parse()?;
    let jobs: Vec<(u64, Algorithm)> =
        (0..count).flat_map(|i| algs.iter().map(move |&a| (opts.seed + i, a))).collect();
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(workers).max(1);
    let results: Vec<Result<RunReport, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&(seed, alg)| {
                            let pts = harness::gen_points(n, seed, mode)?;
                            let o = RunOptions { oracle: opts.oracle, cap: opts.cap, seed: Some(seed) };
                            harness::run(alg, &pts, o).map(|(_, r)| r)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    let reports: Vec<RunReport> = results.into_iter().collect::<Result<_, _>>()?;
    emit(opts, serde_json::to_string_pretty(&reports))
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    match &cli.cmd {
        Cmd::Exact => run_one(Algorithm::Exact, opts),
        Cmd::UdgMatch => run_one(Algorithm::UdgMatch, opts),
        Cmd::OneThird => run_one(Algorithm::OneThird, opts),
        Cmd::Approx1 => run_one(Algorithm::Approx1, opts),
        Cmd::Approx2 => run_one(Algorithm::Approx2, opts),
        Cmd::CrossingBottleneck => run_one(Algorithm::CrossingBottleneck, opts),
        Cmd::Validate { edges } => {
            let pts = load(opts)?;
            let m = Matching::from_pairs(&pts, read_edges(edges)?)?;
            let r = validate(&pts, &m)?;
            if let Some(p) = &opts.svg {
                io(fs::write(p, harness::render_svg(&pts, &m)), p)?;
            }
            emit(opts, serde_json::to_string_pretty(&r))
        }
        Cmd::Gen { out } => {
            let pts = load(opts)?;
            let text = harness::format_points(&pts);
            match out {
                Some(p) => io(fs::write(p, text), p),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Cmd::Bench { count, algs } => bench(opts, *count, algs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let v = match f {
                Failure::Core(e) => json!({ "error": e.kind(), "message": e.to_string() }),
                Failure::Io(msg) => json!({ "error": "Io", "message": msg }),
            };
            eprintln!("{v}");
            ExitCode::FAILURE
        }
    }
}

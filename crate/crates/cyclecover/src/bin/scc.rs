//! Thin command-line front end: cover construction, cover verification,
//! the brute-force oracle, graph generation and corpus runs.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cyclecover::cover::{self, CoverDocument, Method};
use cyclecover::harness::{self, CorpusSpec};
use cyclecover::multigraph::Multigraph;
use cyclecover::oracle;

#[derive(Parser)]
#[command(name = "scc", about = "Short cycle covers of bridgeless multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    General,
    Cubic,
    Mindeg3,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Cubic,
    Mindeg3,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a cycle cover with a certified bound.
    Cover {
        /// Input graph file (text format).
        #[arg(long)]
        input: PathBuf,
        /// Construction to use; auto picks the strongest applicable bound.
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Output file for the cover document (JSON); stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a cover document against its graph.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        cover: PathBuf,
    },
    /// Exact shortest cover by brute force (small graphs only).
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_cycles: usize,
    },
    /// Generate a random graph.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: u32,
        /// Edge count (mindeg3 only; defaults to 3n/2 + 4).
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a corpus and print the summary table.
    Corpus {
        /// Generator: exhaustive-cubic, random-cubic, random-mindeg3 or
        /// file-dir (with --path; bridged files are skipped).
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 20)]
        count: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory of graph files for --kind file-dir.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Force a method instead of auto.
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_graph(path: &PathBuf) -> Result<Multigraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Multigraph::from_text(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_method(g: &Multigraph, arg: MethodArg) -> Method {
    match arg {
        MethodArg::Auto => cover::auto_method(g),
        MethodArg::General => Method::General,
        MethodArg::Cubic => Method::Cubic,
        MethodArg::Mindeg3 => Method::Mindeg3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Cover { input, method, out } => {
            let g = read_graph(&input)?;
            let method = resolve_method(&g, method);
            let report = cover::cover_with_method(&g, method).map_err(|e| e.to_string())?;
            let graph_id = input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".into());
            let doc = CoverDocument::from_report(&graph_id, &report);
            let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?;
            match out {
                Some(path) => std::fs::write(&path, json).map_err(|e| e.to_string())?,
                None => println!("{json}"),
            }
            eprintln!(
                "method {:?}: length {} <= {}/{} * {} (exact check passed)",
                report.construction,
                report.cover.total_length,
                report.bound_num,
                report.bound_den,
                report.m
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { input, cover: cover_path } => {
            let g = read_graph(&input)?;
            let text = std::fs::read_to_string(&cover_path).map_err(|e| e.to_string())?;
            let doc: CoverDocument = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let cover = doc.to_cover();
            let check = oracle::verify_cover(&g, &cover);
            let (num, den) = doc.bound;
            let bound_ok = u128::from(check.recomputed_length) * u128::from(den)
                <= u128::from(num) * u128::from(g.total_weight());
            if check.passed() && bound_ok {
                println!("cover valid: length {} within {num}/{den}", check.recomputed_length);
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("cover INVALID: {check:?} bound_ok={bound_ok}");
                Ok(ExitCode::from(1))
            }
        }
        Command::Oracle { input, max_cycles } => {
            let g = read_graph(&input)?;
            let cover =
                oracle::shortest_cover_bruteforce(&g, max_cycles).map_err(|e| e.to_string())?;
            println!(
                "optimum with <= {max_cycles} cycles: {}",
                cover.total_length
            );
            for (i, c) in cover.cycles.iter().enumerate() {
                let ids: Vec<String> = c.iter().map(|e| e.to_string()).collect();
                println!("cycle {i}: [{}]", ids.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { kind, n, m, seed, out } => {
            let g = match kind {
                GenKind::Cubic => harness::gen_cubic_bridgeless(n, seed),
                GenKind::Mindeg3 => {
                    let m = m.unwrap_or(3 * n / 2 + 4);
                    harness::gen_random_mindeg3(n, m, seed)
                }
            }
            .map_err(|e| e.to_string())?;
            let text = g.to_text();
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| e.to_string())?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Corpus { kind, n, m, count, seed, path, method } => {
            let spec = match kind.as_str() {
                "exhaustive-cubic" => CorpusSpec::ExhaustiveCubic { n },
                "random-cubic" => CorpusSpec::RandomCubic { n, count, seed },
                "random-mindeg3" => CorpusSpec::RandomMindeg3 {
                    n,
                    m: m.unwrap_or(3 * n / 2 + 4),
                    count,
                    seed,
                },
                "file-dir" => CorpusSpec::FileDir {
                    path: path.ok_or("file-dir needs --path")?,
                },
                other => return Err(format!("unknown corpus kind {other:?}")),
            };
            let instances = spec.instances().map_err(|e| e.to_string())?;
            let forced = match method {
                MethodArg::Auto => None,
                MethodArg::General => Some(Method::General),
                MethodArg::Cubic => Some(Method::Cubic),
                MethodArg::Mindeg3 => Some(Method::Mindeg3),
            };
            let table = harness::run_corpus(&instances, forced).map_err(|e| e.to_string())?;
            print!("{table}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

//! Command-line front end for the analyzer.

use anyhow::{Context as _, Result};
use boheap::abstraction;
use boheap::engine::{analyze, parse_procedure, print_procedure, Options, Stats, Status};
use boheap::prover::{configure_threads, export_smtlib, Backend, Parallelism, Prover, Scope};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "boheap", version, about = "Symbolic shape analysis with Boolean heaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Infer invariants and check the verification conditions.
    Analyze(AnalyzeArgs),
    /// Parse a benchmark file and print it back in normal form.
    Print { file: PathBuf },
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Benchmark files.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Largest universe size, counting non-null objects.
    #[arg(long, default_value_t = 3)]
    scope: u8,
    /// Integers range over 0..=M.
    #[arg(long, default_value_t = 7)]
    data_max: i64,
    /// `enum` or `smtlib:<solver>`; repeat to try several in order.
    #[arg(long = "backend", default_value = "enum")]
    backends: Vec<String>,
    /// Persistent query cache file, loaded before and saved after.
    #[arg(long, conflicts_with = "no_cache")]
    cache: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    /// Longest cube tried when abstracting weakest preconditions.
    #[arg(long, default_value_t = 3)]
    cube_max: usize,
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the abstract reachability tree.
    #[arg(long)]
    trace: bool,
    /// Write each verification condition as an SMT-LIB script here.
    #[arg(long)]
    export_smtlib: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Track every predicate at every location.
    #[arg(long)]
    all_predicates: bool,
}

fn exit_code(statuses: &[Status]) -> u8 {
    if statuses.contains(&Status::Failed) {
        1
    } else if statuses.contains(&Status::Inconclusive) {
        2
    } else {
        0
    }
}

fn build_prover(args: &AnalyzeArgs) -> Result<Prover> {
    let scope = Scope {
        objects: args.scope,
        data_max: args.data_max,
    };
    anyhow::ensure!(scope.objects <= 6, "scope must be at most 6");
    anyhow::ensure!((0..=254).contains(&scope.data_max), "data range must be within 0..=254");
    let mut backends = Vec::new();
    for b in &args.backends {
        backends.push(Backend::parse(b).with_context(|| format!("unknown backend `{b}`"))?);
    }
    let mut prover = Prover::new(scope).with_backends(backends);
    if args.jobs == 1 {
        prover = prover.with_parallelism(Parallelism::Sequential);
    }
    if args.no_cache {
        prover = prover.without_cache();
    } else if let Some(path) = &args.cache {
        prover.load_cache(path);
    }
    Ok(prover)
}

fn analyze_files(args: &AnalyzeArgs) -> Result<u8> {
    configure_threads(args.jobs);
    let mut procs = Vec::new();
    for f in &args.files {
        let text = std::fs::read_to_string(f).with_context(|| format!("cannot read {}", f.display()))?;
        let p = parse_procedure(&text).with_context(|| format!("{}", f.display()))?;
        procs.push(p);
    }
    let prover = build_prover(args)?;
    let opts = Options {
        abstraction: abstraction::Config {
            cube_max: args.cube_max,
            parallelism: if args.jobs == 1 { Parallelism::Sequential } else { Parallelism::Parallel },
            ..abstraction::Config::default()
        },
        relevance: !args.all_predicates,
        ..Options::default()
    };
    let mut out = String::new();
    let mut statuses = Vec::new();
    eprintln!("{}", Stats::HEADER);
    for p in &procs {
        prover.reset_stats();
        let mut a = analyze(p, &prover, &opts).with_context(|| format!("analysis of {} failed", p.name))?;
        let report = a.check(&prover)?;
        if args.trace {
            eprintln!("reachability tree of {}:\n{}", p.name, a.tree_text());
        }
        if let Some(dir) = &args.export_smtlib {
            export_vcs(dir, &a, &prover)?;
        }
        out.push_str(&match args.emit {
            Emit::Text => report.to_text(),
            Emit::JsonLines => report.to_json_lines(),
        });
        eprintln!("{}", a.stats(&prover).row());
        statuses.push(report.status);
    }
    match &args.out {
        Some(path) => std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{out}"),
    }
    if let Some(path) = &args.cache {
        prover.save_cache(path).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(exit_code(&statuses))
}

fn export_vcs(dir: &Path, a: &boheap::engine::Analysis, prover: &Prover) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let name: String = a
        .procedure
        .name
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect();
    for (i, vc) in a.vcgen()?.iter().enumerate() {
        match export_smtlib(&vc.query, Some(prover.scope)) {
            Ok(script) => std::fs::write(dir.join(format!("{name}_{i:03}.smt2")), script)?,
            Err(e) => log::warn!("condition {i} of {} not exported: {e}", a.procedure.name),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => analyze_files(args),
        Command::Print { file } => std::fs::read_to_string(file)
            .with_context(|| format!("cannot read {}", file.display()))
            .and_then(|t| parse_procedure(&t).map_err(Into::into))
            .map(|p| {
                print!("{}", print_procedure(&p));
                0
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

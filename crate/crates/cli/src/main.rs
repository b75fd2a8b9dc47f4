use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::rc::Rc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcanon::dimacs::{parse_dimacs, write_dimacs};
use graphcanon::gen;
use graphcanon::oracle::{brute_aut, brute_canon, orbit_classes, MAX_AUT_N, MAX_CANON_N};
use graphcanon::runner::{first_disagreement, relabeled_runs, DEFAULT_MEMORY_LIMIT};
use graphcanon::stats::{AllocTrace, DebugVisitor, SearchTreeLog, StatsVisitor};
use graphcanon::{AdjacencyForm, AttributedGraph, CellSelector, InvariantSet, RunConfig, TraversalKind, Visitor};
use rand::SeedableRng;
use sha2::{Digest, Sha256};

mod fault;

#[derive(Parser)]
#[command(name = "graphcanon", version, about = "Graph canonization by individualization-refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Canonize a DIMACS graph, repeating on random relabelings.
    Canon(CanonArgs),
    /// Compare the engine against the brute-force oracle (n <= 9).
    Oracle(OracleArgs),
    /// Print a generated graph in DIMACS format.
    Gen(GenArgs),
    /// Write the search tree of one run as Graphviz DOT.
    Viz(VizArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Tree traversal.
    #[arg(long, default_value = "dfs")]
    traversal: TraversalKind,
    /// Target cell selector.
    #[arg(long, default_value = "flm")]
    cell: CellSelector,
    /// Node invariants, any subset of pl,q,t.
    #[arg(long, default_value = "none")]
    invariants: InvariantSet,
    /// Memory limit in bytes for bfs-exp-m; accepts K, M, G, KiB, MiB, GiB suffixes.
    #[arg(long, value_parser = parse_bytes, default_value_t = DEFAULT_MEMORY_LIMIT)]
    memory_limit: u64,
    /// Experimental paths per breadth-first level (default: one per eligible frontier node).
    #[arg(long)]
    paths_per_level: Option<usize>,
    #[arg(long)]
    no_aut_pruner: bool,
    #[arg(long)]
    no_implicit_size2: bool,
    #[arg(long)]
    no_degree1: bool,
}

impl ConfigArgs {
    fn config(&self) -> RunConfig {
        let mut c = RunConfig::new(self.traversal, self.cell, self.invariants).with_memory_limit(self.memory_limit);
        c.aut_pruner = !self.no_aut_pruner;
        c.implicit_size2 = !self.no_implicit_size2;
        c.degree1 = !self.no_degree1;
        c.paths_per_level = self.paths_per_level;
        c
    }
}

#[derive(Args)]
struct CanonArgs {
    /// DIMACS input file, or - for standard input.
    input: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// Number of random relabelings to canonize.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the first run's search tree as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the first run's allocation trace.
    #[arg(long)]
    alloc_trace: Option<PathBuf>,
    /// Print per-run counters; wall times go to standard error.
    #[arg(long)]
    stats: bool,
    /// Also print the canonical graph in DIMACS format.
    #[arg(long)]
    emit_graph: bool,
    /// Adds a visitor that prunes by input label (harness self-test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct OracleArgs {
    input: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Gnp,
    Regular,
    Circulant,
    Cycle,
    Path,
    Complete,
    Star,
    Petersen,
    WorkedExample,
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    /// Number of vertices (leaves for star).
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Edge probability for gnp.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Degree for regular.
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// Comma-separated jumps for circulant.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    jumps: Vec<usize>,
    /// Disjoint union of this many copies.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Take the complement (after forming the union).
    #[arg(long)]
    complement: bool,
    /// Random vertex attributes drawn from 0..K.
    #[arg(long)]
    vertex_colors: Option<u64>,
    /// Random edge attributes drawn from 0..K.
    #[arg(long)]
    edge_colors: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct VizArgs {
    input: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// Output path; standard output if omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_bytes(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let split = t.find(|c: char| !c.is_ascii_digit()).unwrap_or(t.len());
    let (digits, suffix) = t.split_at(split);
    let value: u64 = digits.parse().map_err(|_| format!("invalid byte count '{text}'"))?;
    let scale: u64 = match suffix.trim().to_ascii_lowercase().as_str() {
        "" | "b" => 1,
        "k" | "kb" => 1_000,
        "kib" => 1 << 10,
        "m" | "mb" => 1_000_000,
        "mib" => 1 << 20,
        "g" | "gb" => 1_000_000_000,
        "gib" => 1 << 30,
        other => return Err(format!("unknown size suffix '{other}'")),
    };
    value.checked_mul(scale).ok_or_else(|| format!("byte count '{text}' overflows"))
}

fn read_graph(path: &Path) -> Result<AttributedGraph> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).context("reading standard input")?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn digest(form: &AdjacencyForm) -> String {
    hex::encode(Sha256::digest(form.to_dimacs().as_bytes()))
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn canon(args: CanonArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let config = args.config.config();
    let (want_dot, want_trace, fault) = (args.dot.is_some(), args.alloc_trace.is_some(), args.inject_fault);
    let extra = || {
        let mut v: Vec<Rc<dyn Visitor>> = Vec::new();
        if want_dot {
            v.push(Rc::new(StatsVisitor));
        }
        if want_trace {
            v.push(Rc::new(DebugVisitor));
        }
        if fault {
            v.push(Rc::new(fault::LabelBiasedPruner));
        }
        v
    };
    let runs = relabeled_runs(&g, &config, args.reps, args.seed, extra)?;
    println!("input: {} (n={}, m={})", args.input.display(), g.n(), g.num_edges());
    println!("config: {}", config.label());
    println!("repetitions: {} (seed {})", runs.len(), args.seed);
    for (i, r) in runs.iter().enumerate() {
        println!(
            "run {}: nodes={} max_allocated={} generators={} form={}",
            i + 1,
            r.report.nodes_created,
            r.report.max_allocated,
            r.report.generators.len(),
            &digest(&r.report.canonical_form)[..16]
        );
        if args.stats {
            for (k, v) in &r.report.stats {
                println!("  {k}={v}");
            }
            eprintln!("run {}: {:.3} ms", i + 1, r.elapsed.as_secs_f64() * 1e3);
        }
    }
    let first = &runs[0];
    if let Some(path) = &args.dot {
        let log = first.report.visitor_data::<SearchTreeLog>().expect("stats visitor registered");
        write_output(path, &log.to_dot())?;
    }
    if let Some(path) = &args.alloc_trace {
        let trace = first.report.visitor_data::<AllocTrace>().expect("debug visitor registered");
        write_output(path, &trace.render())?;
    }
    println!("canonical labeling: {}", first.input_labeling());
    println!("canonical form sha256: {}", digest(&first.report.canonical_form));
    if args.emit_graph {
        print!("{}", first.report.canonical_form.to_dimacs());
    }
    if let Some(bad) = first_disagreement(&runs) {
        let other = &runs[bad];
        println!("DISAGREEMENT: run 1 and run {} produced different canonical forms", bad + 1);
        println!("  run 1 labeling of its input: {}", first.report.canonical);
        println!("  run {} labeling of its input: {}", bad + 1, other.report.canonical);
        let (a, b) = (&first.report.canonical_form, &other.report.canonical_form);
        if a.vertex_attrs() != b.vertex_attrs() {
            println!("  vertex attributes differ: {:?} vs {:?}", a.vertex_attrs(), b.vertex_attrs());
        }
        if let Some(i) = (0..a.n()).find(|&i| a.list(i) != b.list(i)) {
            let show = |l: &[(usize, u64)]| l.iter().map(|(u, _)| (u + 1).to_string()).collect::<Vec<_>>().join(",");
            println!("  first differing adjacency list: vertex {}", i + 1);
            println!("    {:<7} {}: {}", "run 1", i + 1, show(a.list(i)));
            println!("    {:<7} {}: {}", format!("run {}", bad + 1), i + 1, show(b.list(i)));
        }
        return Ok(ExitCode::from(1));
    }
    println!("all {} repetitions agree", runs.len());
    Ok(ExitCode::SUCCESS)
}

fn oracle(args: OracleArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    if g.n() > MAX_CANON_N {
        bail!("the oracle handles at most {MAX_CANON_N} vertices, the input has {}", g.n());
    }
    let config = args.config.config();
    let want = brute_canon(&g)?;
    let report = config.canonicalize(&g)?;
    let engine_form = g.permuted(&report.canonical)?;
    let agrees = brute_canon(&engine_form)?.repr_eq(&want);
    println!("input: {} (n={}, m={})", args.input.display(), g.n(), g.num_edges());
    println!("config: {}", config.label());
    println!("oracle canonical form sha256: {}", digest(&want.adjacency_form()));
    println!("engine canonical form sha256: {}", digest(&report.canonical_form));
    let mut ok = agrees;
    if g.n() <= MAX_AUT_N {
        let auts = brute_aut(&g)?;
        let want_orbits = orbit_classes(g.n(), &auts);
        let got_orbits = orbit_classes(g.n(), &report.generators);
        let render = |o: &[Vec<usize>]| {
            o.iter()
                .map(|c| c.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        println!("automorphism group order: {}", auts.len());
        println!("oracle orbits: {}", render(&want_orbits));
        println!("engine orbits: {}", render(&got_orbits));
        let sound = report.generators.iter().all(|gamma| g.is_automorphism(gamma));
        ok &= sound && want_orbits == got_orbits;
    }
    println!("engine isomorphic to oracle canon: {}", if agrees { "yes" } else { "no" });
    println!("{}", if ok { "oracle check passed" } else { "ORACLE MISMATCH" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn generate(args: GenArgs) -> Result<ExitCode> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    if args.n == 0 {
        bail!("--n must be positive");
    }
    let base = match args.family {
        Family::Gnp => {
            if !(0.0..=1.0).contains(&args.p) {
                bail!("--p must lie in [0, 1]");
            }
            gen::gnp(args.n, args.p, &mut rng)
        }
        Family::Regular => gen::random_regular(args.n, args.d, &mut rng)
            .with_context(|| format!("no {}-regular graph on {} vertices found", args.d, args.n))?,
        Family::Circulant => gen::circulant(args.n, &args.jumps),
        Family::Cycle => gen::cycle(args.n),
        Family::Path => gen::path(args.n),
        Family::Complete => gen::complete(args.n),
        Family::Star => gen::star(args.n),
        Family::Petersen => gen::petersen(),
        Family::WorkedExample => gen::worked_example(),
    };
    let mut g = base.clone();
    for _ in 1..args.copies.max(1) {
        g = gen::disjoint_union(&g, &base);
    }
    if args.complement {
        g = gen::complement(&g);
    }
    if let Some(k) = args.vertex_colors {
        g = gen::with_random_vertex_attrs(&g, k.max(1), &mut rng);
    }
    if let Some(k) = args.edge_colors {
        g = gen::with_random_edge_attrs(&g, k.max(1), &mut rng);
    }
    print!("{}", write_dimacs(&g));
    Ok(ExitCode::SUCCESS)
}

fn viz(args: VizArgs) -> Result<ExitCode> {
    let g = read_graph(&args.input)?;
    let config = args.config.config();
    let report = graphcanon::canonicalize(&g, &config.suite_with(vec![Rc::new(StatsVisitor)])?)?;
    let dot = report.visitor_data::<SearchTreeLog>().expect("stats visitor registered").to_dot();
    match &args.output {
        Some(path) => write_output(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Canon(a) => canon(a),
        Command::Oracle(a) => oracle(a),
        Command::Gen(a) => generate(a),
        Command::Viz(a) => viz(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

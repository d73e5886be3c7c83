use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dks_cli::{
    emit_plot_data, k_grid, run_single, run_sweep, write_csv, CliError, CliResult, Iterate,
    Method, RunOptions,
};
use dks_core::oracles::generate_planted;
use dks_core::{
    load_graph_with, write_cache, write_edge_list, Graph, LoadOptions, ProxScale, SolverConfig,
};

#[derive(Parser)]
#[command(name = "dks", version, about = "Densest-k-subgraph via the Lovász relaxation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance for a single k.
    Solve(SolveArgs),
    /// Run several methods over a grid of k and write a CSV table.
    Sweep(SweepArgs),
    /// Generate a planted-clique instance as an edge list.
    Gen(GenArgs),
    /// Turn a sweep CSV into per-method series files.
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list (optionally gzip-compressed) or binary cache; `-` reads stdin.
    #[arg(long)]
    graph: PathBuf,
    /// Read a third column as edge weight.
    #[arg(long)]
    weighted: bool,
    /// Keep every connected component instead of only the largest.
    #[arg(long)]
    all_components: bool,
    /// Also store the preprocessed graph as a binary cache at this path.
    #[arg(long)]
    write_cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProxScaleArg {
    Derived,
    Literal,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.1)]
    rho: f64,
    #[arg(long, default_value_t = 1.8)]
    alpha: f64,
    /// Absolute stopping tolerance (1e-4 is useful on very large graphs).
    #[arg(long, default_value_t = 1e-3)]
    eps_abs: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps_rel: f64,
    #[arg(long, default_value_t = 1e-6)]
    bisect_eps: f64,
    #[arg(long, default_value_t = 3000)]
    max_iter: usize,
    #[arg(long, default_value_t = 100)]
    fw_max_iter: usize,
    #[arg(long, value_enum, default_value = "derived")]
    prox_scale: ProxScaleArg,
    /// Multiply the dual residual by rho.
    #[arg(long)]
    scaled_dual_residual: bool,
    /// Record the Lovász objective every N iterations (0 disables).
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// L-ADMM iterate passed to rounding.
    #[arg(long, value_enum, default_value = "avg")]
    iterate: Iterate,
}

impl SolverArgs {
    fn options(&self, timing: bool) -> RunOptions {
        RunOptions {
            solver: SolverConfig {
                rho: self.rho,
                alpha: self.alpha,
                eps_abs: self.eps_abs,
                eps_rel: self.eps_rel,
                bisection_eps: self.bisect_eps,
                max_iter: self.max_iter,
                prox_scale: match self.prox_scale {
                    ProxScaleArg::Derived => ProxScale::Derived,
                    ProxScaleArg::Literal => ProxScale::Literal,
                },
                scaled_dual_residual: self.scaled_dual_residual,
                objective_every: self.thin,
                ..SolverConfig::default()
            },
            fw_max_iter: self.fw_max_iter,
            iterate: self.iterate,
            timing,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "ladmm-fw")]
    method: Method,
    /// Also compute the spectral upper bound on the optimal density.
    #[arg(long)]
    bound: bool,
    /// Print a JSON object instead of text.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, requires = "k_max", conflicts_with = "ks")]
    k_min: Option<usize>,
    #[arg(long, requires = "k_min")]
    k_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    k_step: usize,
    /// Explicit comma-separated list of k values.
    #[arg(long, value_delimiter = ',', required_unless_present = "k_min")]
    ks: Vec<usize>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "ladmm-project,ladmm-fw,greedy,tpm,rank1"
    )]
    methods: Vec<Method>,
    /// Worker threads; 1 guarantees bit-reproducible output.
    #[arg(long, env = "DKS_THREADS")]
    threads: Option<usize>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report every runtime as 0 (byte-identical reruns).
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Planted clique size.
    #[arg(long)]
    k: usize,
    /// Background edge probability.
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the planted clique's vertex ids here, one per line.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dks: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Gen(a) => gen(a),
        Command::Plotdata(a) => {
            let written = emit_plot_data(File::open(&a.csv)?, &a.out_dir)?;
            let mut out = io::stdout().lock();
            for p in written {
                writeln!(out, "{}", p.display())?;
            }
            Ok(())
        }
    }
}

fn load(a: &GraphArgs) -> CliResult<Graph> {
    let opts = LoadOptions {
        weighted: a.weighted,
        largest_component: !a.all_components,
    };
    let g = load_graph_with(&a.graph, opts)?;
    if let Some(path) = &a.write_cache {
        write_cache(&g, BufWriter::new(File::create(path)?))?;
    }
    Ok(g)
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn solve(a: SolveArgs) -> CliResult<()> {
    let g = load(&a.graph)?;
    let report = run_single(&g, a.k, a.method, &a.solver.options(true), a.bound)?;
    let mut out = io::stdout().lock();
    if a.json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
        writeln!(out)?;
        return Ok(());
    }
    let members: Vec<String> = report.members.iter().map(u64::to_string).collect();
    writeln!(out, "method      {}", report.method)?;
    writeln!(out, "k           {}", report.k)?;
    writeln!(out, "members     {}", members.join(" "))?;
    writeln!(out, "weight      {}", report.weight)?;
    writeln!(out, "density     {}", report.density)?;
    if let Some(b) = report.upper_bound {
        writeln!(out, "upper_bound {b}")?;
    }
    writeln!(out, "iters       {}", report.iters)?;
    writeln!(out, "converged   {}", report.converged)?;
    writeln!(out, "runtime_ms  {:.3}", report.runtime_ms)?;
    Ok(())
}

fn sweep(a: SweepArgs) -> CliResult<()> {
    let g = load(&a.graph)?;
    let ks = match (a.k_min, a.k_max) {
        (Some(lo), Some(hi)) => k_grid(lo, hi, a.k_step)?,
        _ => a.ks.clone(),
    };
    if a.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let rows = run_sweep(&g, &ks, &a.methods, &a.solver.options(!a.no_timing), a.threads)?;
    write_csv(&rows, output(a.out.as_deref())?)
}

fn gen(a: GenArgs) -> CliResult<()> {
    let inst = generate_planted(a.n, a.k, a.p, a.seed)?;
    write_edge_list(&inst.graph, output(a.out.as_deref())?, false)?;
    if let Some(path) = &a.truth {
        let mut w = BufWriter::new(File::create(path)?);
        for id in inst.planted.original_ids(&inst.graph) {
            writeln!(w, "{id}")?;
        }
        w.flush()?;
    }
    Ok(())
}

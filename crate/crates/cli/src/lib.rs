//! Harness around `dks-core`: single solves, k-sweeps written as CSV, and
//! per-method series files for density-vs-k and runtime-vs-k plots.

use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use dks_core::oracles::{binomial, brute_force_dks, BRUTE_FORCE_LIMIT};
use dks_core::{
    degree_topk_start, density_upper_bound, frank_wolfe_refine, greedy_feige, project_topk,
    rank1_dks, solve_lrelax, top_two_singular, truncated_power_method, DksError, FwConfig, Graph,
    SolverConfig, SolverReport, SpectralPair, VertexSet,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

mod plot;

pub use plot::emit_plot_data;

/// Exact CSV header of a sweep.
pub const CSV_HEADER: &str =
    "k,method,density,weight,upper_bound,bound_ratio,iters,converged,runtime_ms";

/// Method tag of the per-k upper-bound row.
pub const BOUND_ROW: &str = "upper-bound";

/// Slack allowed between a reported density and its upper bound.
pub const BOUND_SLACK: f64 = 1e-9;

const SPECTRAL_TOL: f64 = 1e-10;
const TPM_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Method {
    #[value(name = "ladmm-project")]
    LadmmProject,
    #[value(name = "ladmm-fw")]
    LadmmFw,
    Greedy,
    Tpm,
    Rank1,
    Brute,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::LadmmProject,
        Method::LadmmFw,
        Method::Greedy,
        Method::Tpm,
        Method::Rank1,
        Method::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::LadmmProject => "ladmm-project",
            Method::LadmmFw => "ladmm-fw",
            Method::Greedy => "greedy",
            Method::Tpm => "tpm",
            Method::Rank1 => "rank1",
            Method::Brute => "brute",
        }
    }

    fn needs_ladmm(self) -> bool {
        matches!(self, Method::LadmmProject | Method::LadmmFw | Method::Tpm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which L-ADMM iterate is handed to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Iterate {
    #[default]
    Avg,
    Last,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] DksError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(DksError::Domain(_) | DksError::TooLarge { .. }) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub solver: SolverConfig,
    pub fw_max_iter: usize,
    pub iterate: Iterate,
    /// When false every runtime is reported as 0 so output is reproducible
    /// byte for byte.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            solver: SolverConfig::default(),
            fw_max_iter: 100,
            iterate: Iterate::Avg,
            timing: true,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub k: usize,
    pub method: String,
    pub density: f64,
    pub weight: f64,
    pub upper_bound: f64,
    pub bound_ratio: f64,
    pub iters: usize,
    pub converged: bool,
    pub runtime_ms: f64,
}

/// Result of one method at one k.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub set: VertexSet,
    pub iters: usize,
    pub converged: bool,
    pub runtime: Duration,
}

/// `k`-independent spectral data shared by rank-1 and the bound.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub pair: SpectralPair,
    pub runtime: Duration,
}

impl Spectral {
    pub fn compute(g: &Graph) -> Self {
        let start = Instant::now();
        let pair = top_two_singular(g, SPECTRAL_TOL);
        Spectral {
            pair,
            runtime: start.elapsed(),
        }
    }

    /// Density upper bound for size `k`.
    pub fn bound(&self, g: &Graph, k: usize) -> CliResult<f64> {
        let q = rank1_dks(g, k, &self.pair)?.surrogate;
        Ok(density_upper_bound(g, k, &self.pair, q)?)
    }
}

pub fn check_k(g: &Graph, k: usize) -> CliResult<()> {
    if k < 2 || k + 1 > g.n() {
        return Err(CliError::Usage(format!(
            "k = {k} must lie in [2, n - 1] = [2, {}]",
            g.n().saturating_sub(1)
        )));
    }
    Ok(())
}

fn fw_config(g: &Graph, opts: &RunOptions) -> FwConfig {
    FwConfig {
        max_iter: opts.fw_max_iter,
        ..FwConfig::for_graph(g)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

struct Relaxation {
    report: SolverReport,
    runtime: Duration,
}

impl Relaxation {
    fn point(&self, which: Iterate) -> &[f64] {
        match which {
            Iterate::Avg => &self.report.x_avg,
            Iterate::Last => &self.report.x_last,
        }
    }
}

fn relax(g: &Graph, k: usize, opts: &RunOptions) -> CliResult<Relaxation> {
    let (report, runtime) = timed(|| solve_lrelax(g, k, &opts.solver));
    Ok(Relaxation {
        report: report?,
        runtime,
    })
}

fn run_with(
    g: &Graph,
    k: usize,
    method: Method,
    opts: &RunOptions,
    spectral: &Spectral,
    relaxation: Option<&CliResult<Relaxation>>,
) -> CliResult<MethodOutcome> {
    let need = || -> CliResult<&Relaxation> {
        match relaxation {
            Some(Ok(r)) => Ok(r),
            Some(Err(e)) => Err(CliError::Internal(format!("L-ADMM failed: {e}"))),
            None => Err(CliError::Internal("L-ADMM result missing".into())),
        }
    };
    match method {
        Method::LadmmProject => {
            let r = need()?;
            let (set, t) = timed(|| project_topk(g, r.point(opts.iterate), k));
            Ok(MethodOutcome {
                set: set?,
                iters: r.report.iters,
                converged: r.report.converged,
                runtime: r.runtime + t,
            })
        }
        Method::LadmmFw => {
            let r = need()?;
            let (fw, t) =
                timed(|| frank_wolfe_refine(g, k, r.point(opts.iterate), &fw_config(g, opts)));
            let fw = fw?;
            Ok(MethodOutcome {
                set: fw.set,
                iters: r.report.iters + fw.iters,
                converged: r.report.converged,
                runtime: r.runtime + t,
            })
        }
        Method::Greedy => {
            let (set, t) = timed(|| greedy_feige(g, k));
            Ok(MethodOutcome {
                set: set?,
                iters: 1,
                converged: true,
                runtime: t,
            })
        }
        Method::Tpm => {
            let (out, t) = timed(|| {
                let start = match relaxation {
                    Some(Ok(r)) => r.point(opts.iterate).to_vec(),
                    _ => degree_topk_start(g, k)?,
                };
                truncated_power_method(g, k, &start, TPM_MAX_ITER)
            });
            let out = out?;
            Ok(MethodOutcome {
                set: out.set,
                iters: out.iters,
                converged: out.iters < TPM_MAX_ITER,
                runtime: t,
            })
        }
        Method::Rank1 => {
            let (out, t) = timed(|| rank1_dks(g, k, &spectral.pair));
            Ok(MethodOutcome {
                set: out?.set,
                iters: 1,
                converged: spectral.pair.converged,
                runtime: t,
            })
        }
        Method::Brute => {
            let (out, t) = timed(|| brute_force_dks(g, k));
            Ok(MethodOutcome {
                set: out?.0,
                iters: binomial(g.n(), k).min(BRUTE_FORCE_LIMIT) as usize,
                converged: true,
                runtime: t,
            })
        }
    }
}

/// Runs one method for one `k`. L-ADMM failures propagate, except for TPM
/// which then starts from the degree top-k set.
pub fn run_method(
    g: &Graph,
    k: usize,
    method: Method,
    opts: &RunOptions,
    spectral: &Spectral,
) -> CliResult<MethodOutcome> {
    check_k(g, k)?;
    let relaxation = match method {
        Method::LadmmProject | Method::LadmmFw => Some(Ok(relax(g, k, opts)?)),
        Method::Tpm => Some(relax(g, k, opts)),
        _ => None,
    };
    run_with(g, k, method, opts, spectral, relaxation.as_ref())
}

/// Report of `dks solve`.
#[derive(Debug, Clone, Serialize)]
pub struct SingleReport {
    pub method: String,
    pub k: usize,
    /// Members as original vertex ids, ascending by internal index.
    pub members: Vec<u64>,
    pub weight: f64,
    pub density: f64,
    pub upper_bound: Option<f64>,
    pub iters: usize,
    pub converged: bool,
    pub runtime_ms: f64,
}

pub fn run_single(
    g: &Graph,
    k: usize,
    method: Method,
    opts: &RunOptions,
    with_bound: bool,
) -> CliResult<SingleReport> {
    check_k(g, k)?;
    let spectral = Spectral::compute(g);
    let out = run_method(g, k, method, opts, &spectral)?;
    let density = g.edge_density(out.set.members())?;
    let upper_bound = if with_bound {
        let b = spectral.bound(g, k)?;
        tripwire(k, method.name(), density, b)?;
        Some(b)
    } else {
        None
    };
    Ok(SingleReport {
        method: method.name().into(),
        k,
        members: out.set.original_ids(g),
        weight: g.subgraph_weight(out.set.members())?,
        density,
        upper_bound,
        iters: out.iters,
        converged: out.converged,
        runtime_ms: ms(out.runtime, opts.timing),
    })
}

fn ms(d: Duration, timing: bool) -> f64 {
    if timing {
        d.as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn tripwire(k: usize, method: &str, density: f64, bound: f64) -> CliResult<()> {
    if density > bound * (1.0 + BOUND_SLACK) {
        return Err(CliError::Internal(format!(
            "density {density} of {method} at k = {k} exceeds the upper bound {bound}"
        )));
    }
    Ok(())
}

fn record(
    g: &Graph,
    k: usize,
    method: &str,
    out: &MethodOutcome,
    bound: f64,
    timing: bool,
) -> CliResult<SweepRecord> {
    let density = g.edge_density(out.set.members())?;
    tripwire(k, method, density, bound)?;
    Ok(SweepRecord {
        k,
        method: method.into(),
        density,
        weight: g.subgraph_weight(out.set.members())?,
        upper_bound: bound,
        bound_ratio: density / bound,
        iters: out.iters,
        converged: out.converged,
        runtime_ms: ms(out.runtime, timing),
    })
}

/// All rows for one `k`. A failing method falls back to the degree top-k
/// start set and is marked `converged = false`.
pub fn sweep_k(
    g: &Graph,
    k: usize,
    methods: &[Method],
    opts: &RunOptions,
    spectral: &Spectral,
) -> CliResult<Vec<SweepRecord>> {
    check_k(g, k)?;
    let (bound, bound_time) = timed(|| spectral.bound(g, k));
    let bound = bound?;
    let relaxation = methods
        .iter()
        .any(|m| m.needs_ladmm())
        .then(|| relax(g, k, opts));
    let mut rows = Vec::with_capacity(methods.len() + 1);
    for &method in methods {
        let out = match run_with(g, k, method, opts, spectral, relaxation.as_ref()) {
            Ok(out) => out,
            Err(_) => fallback(g, k)?,
        };
        rows.push(record(g, k, method.name(), &out, bound, opts.timing)?);
    }
    rows.push(SweepRecord {
        k,
        method: BOUND_ROW.into(),
        density: bound,
        weight: bound * (k * (k - 1)) as f64,
        upper_bound: bound,
        bound_ratio: 1.0,
        iters: 0,
        converged: spectral.pair.converged,
        runtime_ms: ms(spectral.runtime + bound_time, opts.timing),
    });
    Ok(rows)
}

fn fallback(g: &Graph, k: usize) -> CliResult<MethodOutcome> {
    let x0 = degree_topk_start(g, k)?;
    Ok(MethodOutcome {
        set: project_topk(g, &x0, k)?,
        iters: 0,
        converged: false,
        runtime: Duration::ZERO,
    })
}

/// Sweep over `ks`, parallel across `k` on `threads` workers (`None` uses
/// rayon's default). Rows are sorted by `(k, method)`.
pub fn run_sweep(
    g: &Graph,
    ks: &[usize],
    methods: &[Method],
    opts: &RunOptions,
    threads: Option<usize>,
) -> CliResult<Vec<SweepRecord>> {
    if ks.is_empty() {
        return Err(CliError::Usage("empty k grid".into()));
    }
    if methods.is_empty() {
        return Err(CliError::Usage("empty method list".into()));
    }
    for &k in ks {
        check_k(g, k)?;
    }
    let mut methods = methods.to_vec();
    methods.sort_unstable();
    methods.dedup();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let spectral = Spectral::compute(g);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let per_k: Vec<CliResult<Vec<SweepRecord>>> = pool.install(|| {
        ks.par_iter()
            .map(|&k| sweep_k(g, k, &methods, opts, &spectral))
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_k {
        rows.extend(r?);
    }
    rows.sort_by(|a, b| a.k.cmp(&b.k).then_with(|| a.method.cmp(&b.method)));
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

/// `k_min, k_min + step, ... <= k_max`.
pub fn k_grid(k_min: usize, k_max: usize, step: usize) -> CliResult<Vec<usize>> {
    if step == 0 || k_min > k_max {
        return Err(CliError::Usage(format!(
            "invalid k grid {k_min}..={k_max} step {step}"
        )));
    }
    Ok((k_min..=k_max).step_by(step).collect())
}

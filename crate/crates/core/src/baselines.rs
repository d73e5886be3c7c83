//! Comparison methods and the a-posteriori density bound: two-phase greedy,
//! truncated power method, rank-1 low-rank DkS, and the spectral upper bound
//! on the optimal edge density.

use crate::error::{check_len, DksError, Result};
use crate::graph::{Graph, VertexSet};
use crate::linalg::{lanczos_extremes, random_start};
use crate::rounding::{adjacency_spectral_norm, check_k, top_k};

/// Top two singular values of `W` and the leading singular vector.
#[derive(Debug, Clone)]
pub struct SpectralPair {
    pub sigma1: f64,
    pub u1: Vec<f64>,
    pub sigma2: f64,
    /// Both power iterations met their tolerance.
    pub converged: bool,
}

/// Greedy: the `⌈k/2⌉` heaviest vertices, then the `⌊k/2⌋` outside vertices
/// with the largest weight into that core. Ties go to smaller ids.
pub fn greedy_feige(g: &Graph, k: usize) -> Result<VertexSet> {
    check_k(g.n(), k)?;
    let core = top_k(g.degree(), k.div_ceil(2));
    let mut score = vec![0.0; g.n()];
    for &h in &core {
        for (v, w) in g.neighbors(h) {
            score[v] += w;
        }
    }
    for &h in &core {
        score[h] = f64::NEG_INFINITY;
    }
    let mut members = core;
    members.extend(top_k(&score, k / 2));
    VertexSet::new(g, members)
}

/// Indicator of the `k` largest-degree vertices, the classical TPM start.
pub fn degree_topk_start(g: &Graph, k: usize) -> Result<Vec<f64>> {
    check_k(g.n(), k)?;
    let mut x = vec![0.0; g.n()];
    for v in top_k(g.degree(), k) {
        x[v] = 1.0;
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct TpmOutput {
    /// Best support visited.
    pub set: VertexSet,
    pub iters: usize,
}

/// Truncated power method: `x <- 1_{top_k(W x)}` until the support repeats,
/// the subgraph weight stops increasing, or `max_iter` is reached.
pub fn truncated_power_method(
    g: &Graph,
    k: usize,
    x0: &[f64],
    max_iter: usize,
) -> Result<TpmOutput> {
    check_len("x0", x0.len(), g.n())?;
    check_k(g.n(), k)?;
    if max_iter == 0 {
        return Err(DksError::domain("max_iter must be at least 1"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(DksError::domain("x0 has non-finite entries"));
    }
    if x0.iter().all(|&v| v == 0.0) {
        return Err(DksError::domain("x0 must be nonzero"));
    }
    let mut wx = g.adjacency_apply(x0)?;
    let mut support = sorted(top_k(&wx, k));
    let mut best = VertexSet::new(g, support.clone())?;
    let mut iters = 1;
    let mut indicator = vec![0.0; g.n()];
    while iters < max_iter {
        indicator.iter_mut().for_each(|v| *v = 0.0);
        for &v in &support {
            indicator[v] = 1.0;
        }
        g.adjacency_into(&indicator, &mut wx);
        let next = sorted(top_k(&wx, k));
        if next == support {
            break;
        }
        iters += 1;
        let candidate = VertexSet::new(g, next.clone())?;
        if candidate.subgraph_weight() <= best.subgraph_weight() {
            break;
        }
        best = candidate;
        support = next;
    }
    Ok(TpmOutput { set: best, iters })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// `u1` from the Perron eigenpair of `W`. `σ1` and `σ2` are the extreme Ritz
/// values of Lanczos runs on `W` and on `W` restricted to the complement of
/// `u1`, each widened by its residual bound so they err on the high side.
pub fn top_two_singular(g: &Graph, tol: f64) -> SpectralPair {
    let top = adjacency_spectral_norm(g, tol);
    let u1 = top.vector;
    let n = g.n();
    let whole = lanczos_extremes(
        |x, y| g.adjacency_into(x, y),
        random_start(n, 0x0ddba11),
        tol,
        LANCZOS_STEP_CAP,
        None,
        false,
    );
    let sigma1 = (top.value + top.residual).max(whole.max + whole.max_bound);
    let rest = lanczos_extremes(
        |x, y| g.adjacency_into(x, y),
        random_start(n, 0x0ddba11),
        tol,
        LANCZOS_STEP_CAP,
        Some(&u1),
        true,
    );
    let sigma2 = (rest.max + rest.max_bound)
        .max(-(rest.min - rest.min_bound))
        .max(0.0)
        .min(sigma1);
    SpectralPair {
        sigma1,
        u1,
        sigma2,
        converged: top.converged && whole.converged && rest.converged,
    }
}

const LANCZOS_STEP_CAP: usize = 400;

#[derive(Debug, Clone)]
pub struct Rank1Output {
    /// Candidate with the larger true subgraph weight.
    pub set: VertexSet,
    /// `max_S σ1 (u1^T 1_S)²` over k-subsets, attained by one of the two
    /// candidates; this is the value the density bound needs.
    pub surrogate: f64,
}

/// Rank-1 DkS: the optimum of `σ1 (u1^T x)²` over k-subsets is the top-k of
/// `u1` or of `-u1`.
pub fn rank1_dks(g: &Graph, k: usize, sp: &SpectralPair) -> Result<Rank1Output> {
    check_len("u1", sp.u1.len(), g.n())?;
    check_k(g.n(), k)?;
    let neg: Vec<f64> = sp.u1.iter().map(|v| -v).collect();
    let plus = top_k(&sp.u1, k);
    let minus = top_k(&neg, k);
    let surrogate_of = |s: &[usize]| {
        let c: f64 = s.iter().map(|&v| sp.u1[v]).sum();
        sp.sigma1 * c * c
    };
    let surrogate = surrogate_of(&plus).max(surrogate_of(&minus));
    let plus = VertexSet::new(g, plus)?;
    let minus = VertexSet::new(g, minus)?;
    let set = if minus.subgraph_weight() > plus.subgraph_weight() {
        minus
    } else {
        plus
    };
    Ok(Rank1Output { set, surrogate })
}

/// Upper bound on the optimal edge density for size `k`:
/// `min{w_max, (q/k + σ2)/(k-1), σ1/(k-1)}`, where `q` is the rank-1
/// surrogate optimum and `w_max` the largest edge weight (1 when unweighted).
pub fn density_upper_bound(g: &Graph, k: usize, sp: &SpectralPair, q: f64) -> Result<f64> {
    if k < 2 {
        return Err(DksError::domain(format!("k = {k} must be at least 2")));
    }
    let km1 = (k - 1) as f64;
    let low_rank = (q / k as f64 + sp.sigma2) / km1;
    let spectral = sp.sigma1 / km1;
    Ok(g.max_weight().min(low_rank).min(spectral))
}

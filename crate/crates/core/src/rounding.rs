//! Rounding a fractional relaxation solution to a k-subset: top-k projection
//! and Frank-Wolfe refinement of the indefinite relaxation
//! `min -x^T W x` over `P = {x in [0,1]^n : 1^T x = k}`.

use std::cmp::Ordering;

use crate::error::{check_len, DksError, Result};
use crate::graph::{Graph, VertexSet};
use crate::linalg::{dot, power_iteration};

/// Indices of the `k` largest entries, largest first; ties go to the smaller
/// index. `k` must not exceed `values.len()`.
pub(crate) fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let order = |&a: &usize, &b: &usize| -> Ordering {
        values[b].total_cmp(&values[a]).then(a.cmp(&b))
    };
    let mut idx: Vec<usize> = (0..values.len()).collect();
    if k < idx.len() && k > 0 {
        idx.select_nth_unstable_by(k - 1, order);
        idx.truncate(k);
    }
    idx.sort_unstable_by(order);
    idx.truncate(k);
    idx
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k + 1 > n {
        return Err(DksError::domain(format!(
            "k = {k} outside [2, n - 1] for n = {n}"
        )));
    }
    Ok(())
}

/// Support of the `k` largest entries of `x` (ties by smallest index).
pub fn project_topk(g: &Graph, x: &[f64], k: usize) -> Result<VertexSet> {
    check_len("x", x.len(), g.n())?;
    check_k(g.n(), k)?;
    VertexSet::new(g, top_k(x, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// `min{1, ((x - x̄)^T g) / (L ||x̄ - x||²)}` with `g = -W x`.
    LipschitzGap,
    /// Exact minimization of the quadratic along the segment.
    ExactLineSearch,
}

#[derive(Debug, Clone)]
pub struct FwConfig {
    pub max_iter: usize,
    /// Estimate of `||W||_2`.
    pub lipschitz: f64,
    pub step_mode: StepMode,
    pub objective_tol: f64,
}

impl FwConfig {
    /// Default settings with `L` estimated from `g`.
    pub fn for_graph(g: &Graph) -> Self {
        FwConfig {
            max_iter: 100,
            lipschitz: adjacency_spectral_norm(g, 1e-6).value.max(f64::MIN_POSITIVE),
            step_mode: StepMode::ExactLineSearch,
            objective_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FwOutput {
    pub x: Vec<f64>,
    pub set: VertexSet,
    pub iters: usize,
    /// `-x^T W x` for the start point and every accepted step.
    pub objective_history: Vec<f64>,
    pub step_history: Vec<f64>,
    /// Stopped because the step was zero (LMO fixed point).
    pub stationary: bool,
    /// `max_i |x_i - round(x_i)|` of the returned iterate.
    pub integrality_gap: f64,
}

/// Frank-Wolfe on the indefinite relaxation, started from `x0`.
pub fn frank_wolfe_refine(g: &Graph, k: usize, x0: &[f64], cfg: &FwConfig) -> Result<FwOutput> {
    let n = g.n();
    check_len("x0", x0.len(), n)?;
    check_k(n, k)?;
    if cfg.max_iter == 0 || cfg.lipschitz.is_nan() || cfg.lipschitz <= 0.0 {
        return Err(DksError::domain("FW needs max_iter >= 1 and lipschitz > 0"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(DksError::Numerical {
            iteration: 0,
            message: "non-finite start point".into(),
        });
    }

    let mut x = x0.to_vec();
    let mut wx = vec![0.0; n];
    g.adjacency_into(&x, &mut wx);
    let mut obj = -dot(&x, &wx);
    let mut objective_history = vec![obj];
    let mut step_history = Vec::new();
    let mut dir = vec![0.0; n];
    let mut wd = vec![0.0; n];
    let mut stationary = false;
    let mut iters = 0;

    for t in 1..=cfg.max_iter {
        let vertex = top_k(&wx, k);
        dir.iter_mut().zip(&x).for_each(|(d, xi)| *d = -xi);
        for &v in &vertex {
            dir[v] += 1.0;
        }
        // FW gap: (W x)^T (x̄ - x) >= 0 since x̄ maximizes (W x)^T y over P.
        let gap = dot(&wx, &dir);
        if gap <= 1e-12 * (1.0 + obj.abs()) {
            stationary = true;
            break;
        }
        g.adjacency_into(&dir, &mut wd);
        let curvature = dot(&dir, &wd);
        let alpha = match cfg.step_mode {
            StepMode::ExactLineSearch => {
                if curvature < 0.0 {
                    (gap / -curvature).min(1.0)
                } else {
                    1.0
                }
            }
            StepMode::LipschitzGap => (gap / (cfg.lipschitz * dot(&dir, &dir))).min(1.0),
        };
        if !alpha.is_finite() {
            return Err(DksError::Numerical {
                iteration: t,
                message: format!("step size {alpha}"),
            });
        }
        if alpha <= 0.0 {
            stationary = true;
            break;
        }
        for i in 0..n {
            x[i] += alpha * dir[i];
            wx[i] += alpha * wd[i];
        }
        let new_obj = -dot(&x, &wx);
        iters = t;
        step_history.push(alpha);
        objective_history.push(new_obj);
        let change = (new_obj - obj).abs();
        obj = new_obj;
        if change < cfg.objective_tol * obj.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let integrality_gap = x
        .iter()
        .map(|v| (v - v.round()).abs())
        .fold(0.0, f64::max);
    let set = VertexSet::new(g, top_k(&x, k))?;
    Ok(FwOutput {
        x,
        set,
        iters,
        objective_history,
        step_history,
        stationary,
        integrality_gap,
    })
}

#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    /// Largest eigenvalue of `W`, which equals `||W||_2` for non-negative `W`.
    pub value: f64,
    /// Eigen-residual of the returned vector.
    pub residual: f64,
    /// Unit, entrywise non-negative Perron vector estimate.
    pub vector: Vec<f64>,
    pub converged: bool,
}

/// Power iteration for the Perron eigenpair of `W`.
///
/// Iterates on `W + s I` with `s` half the mean weighted degree, which makes
/// the Perron root strictly dominant even for bipartite graphs.
pub fn adjacency_spectral_norm(g: &Graph, tol: f64) -> SpectralEstimate {
    let n = g.n();
    let shift = 0.5 * g.degree().iter().sum::<f64>() / n as f64;
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * ((i % 7) as f64)).collect();
    let out = power_iteration(
        |x, y| {
            g.adjacency_into(x, y);
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi += shift * xi;
            }
        },
        start,
        tol,
        20_000,
        None,
    );
    let mut vector = out.vector;
    if vector.iter().sum::<f64>() < 0.0 {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    SpectralEstimate {
        value: out.value - shift,
        residual: out.residual,
        vector,
        converged: out.converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_unweighted_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn top_k_examples() {
        assert_eq!(top_k(&[0.9, 0.1, 0.8, 0.2], 2), vec![0, 2]);
        assert_eq!(top_k(&[0.5; 5], 2), vec![0, 1]);
        assert_eq!(top_k(&[0.0, 1.0, 0.0, 1.0], 2), vec![1, 3]);
        assert_eq!(top_k(&[3.0, 2.0, 1.0], 3), vec![0, 1, 2]);
    }

    #[test]
    fn project_topk_validates_k() {
        let g = path(4);
        assert!(project_topk(&g, &[0.0; 4], 1).is_err());
        assert!(project_topk(&g, &[0.0; 4], 4).is_err());
        let s = project_topk(&g, &[0.9, 0.1, 0.8, 0.2], 2).unwrap();
        assert_eq!(s.members(), &[0, 2]);
    }

    #[test]
    fn spectral_norm_known_spectra() {
        let kn = Graph::from_unweighted_edges(
            6,
            (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))),
        )
        .unwrap();
        assert!((adjacency_spectral_norm(&kn, 1e-10).value - 5.0).abs() < 1e-8);
        let p3 = adjacency_spectral_norm(&path(3), 1e-10);
        assert!(p3.converged);
        assert!((p3.value - 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn fw_rejects_bad_input() {
        let g = path(4);
        let cfg = FwConfig::for_graph(&g);
        assert!(frank_wolfe_refine(&g, 2, &[0.5; 3], &cfg).is_err());
        assert!(frank_wolfe_refine(&g, 2, &[f64::NAN; 4], &cfg).is_err());
        assert!(frank_wolfe_refine(&g, 4, &[0.5; 4], &cfg).is_err());
    }
}

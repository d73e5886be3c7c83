//! Linearized ADMM for the Lovász relaxation of densest-k-subgraph.
//!
//! Solves `min f_L(x)` over `P = {x in [0,1]^n : 1^T x = k}` with
//! `f_L(x) = -d^T x + sum_e w_e |x_i - x_j|`, split as `g(x) + h(B^T x)`.
//! The quadratic coupling term is linearized so both blocks reduce to the
//! proximal operators in [`crate::prox`].

use std::time::{Duration, Instant};

use crate::error::{check_len, DksError, Result};
use crate::graph::Graph;
use crate::linalg::norm;
use crate::prox::{prox_g_into, shrink_scalar, ProxGParams};
use crate::rounding::top_k;

/// Which quadratic coefficient the x-update's prox uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxScale {
    /// `τ = 1/μ`, the coefficient of the linearized x-subproblem.
    Derived,
    /// `τ = ρ`, as the bisection call is literally parameterized.
    Literal,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub rho: f64,
    /// Over-relaxation parameter.
    pub alpha: f64,
    /// Proximal regularization; `None` means `1 / (ρ λ̂)` with `λ̂ >= ||B||²`.
    pub mu: Option<f64>,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub bisection_eps: f64,
    pub max_iter: usize,
    pub prox_scale: ProxScale,
    /// Multiply the dual residual by ρ (textbook scaling).
    pub scaled_dual_residual: bool,
    /// Record the Lovász objective every this many iterations (0 disables).
    pub objective_every: usize,
    /// Relative tolerance of the `||B||²` power iteration.
    pub spectral_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rho: 0.1,
            alpha: 1.8,
            mu: None,
            eps_abs: 1e-3,
            eps_rel: 1e-3,
            bisection_eps: 1e-6,
            max_iter: 3000,
            prox_scale: ProxScale::Derived,
            scaled_dual_residual: false,
            objective_every: 1,
            spectral_tol: 1e-3,
        }
    }
}

impl SolverConfig {
    fn validate(&self, lambda_hat: f64) -> Result<f64> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(DksError::domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rho", self.rho)?;
        positive("eps_abs", self.eps_abs)?;
        positive("eps_rel", self.eps_rel)?;
        positive("bisection_eps", self.bisection_eps)?;
        positive("spectral_tol", self.spectral_tol)?;
        if !(1.0..2.0).contains(&self.alpha) {
            return Err(DksError::domain(format!(
                "alpha must lie in [1, 2), got {}",
                self.alpha
            )));
        }
        if self.max_iter == 0 {
            return Err(DksError::domain("max_iter must be at least 1"));
        }
        let mu_max = 1.0 / (self.rho * lambda_hat);
        match self.mu {
            None => Ok(mu_max),
            Some(mu) if mu > 0.0 && mu <= mu_max => Ok(mu),
            Some(mu) => Err(DksError::domain(format!(
                "mu = {mu} violates 0 < mu <= 1/(rho ||B||^2) = {mu_max}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    /// Average of the iterates `x^1..x^t`.
    pub x_avg: Vec<f64>,
    pub x_last: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub primal_residual_history: Vec<f64>,
    pub dual_residual_history: Vec<f64>,
    pub eps_pri_history: Vec<f64>,
    pub eps_dual_history: Vec<f64>,
    /// `f_L(x^t)`; NaN on iterations skipped by `objective_every`.
    pub lovasz_objective_history: Vec<f64>,
    pub mu: f64,
    pub lambda_hat: f64,
    pub wall_time: Duration,
}

/// `f_L(x) = -d^T x + sum_e w_e |x_i - x_j|`.
pub fn lovasz_objective(g: &Graph, x: &[f64]) -> Result<f64> {
    check_len("x", x.len(), g.n())?;
    Ok(lovasz_unchecked(g, x))
}

// Per edge, w (|x_i - x_j| - x_i - x_j) = -2 w min(x_i, x_j); summing that in
// edge order makes f_L(1_S) bit-identical to -subgraph_weight(S).
fn lovasz_unchecked(g: &Graph, x: &[f64]) -> f64 {
    -2.0 * g
        .edges()
        .iter()
        .zip(g.weights())
        .map(|(&(i, j), &w)| w * x[i].min(x[j]))
        .sum::<f64>()
}

/// Relaxation value in maximization form, `d^T x - sum_e w_e |x_i - x_j|`.
pub fn relaxation_value(g: &Graph, x: &[f64]) -> Result<f64> {
    lovasz_objective(g, x).map(|v| -v)
}

/// Runs L-ADMM for subgraph size `k`.
pub fn solve_lrelax(g: &Graph, k: usize, cfg: &SolverConfig) -> Result<SolverReport> {
    let start = Instant::now();
    let (n, m) = (g.n(), g.m());
    if m == 0 {
        return Err(DksError::domain("graph has no edges"));
    }
    if k < 2 || k + 1 > n {
        return Err(DksError::domain(format!(
            "k = {k} outside [2, n - 1] for n = {n}"
        )));
    }
    let lambda_hat = g.incidence_spectral_norm_sq(cfg.spectral_tol);
    let mu = cfg.validate(lambda_hat)?;
    let tau = match cfg.prox_scale {
        ProxScale::Derived => 1.0 / mu,
        ProxScale::Literal => cfg.rho,
    };
    let d = g.degree();
    let w = g.weights();
    let params = ProxGParams::new(d, k as f64, tau, cfg.bisection_eps)?;

    let mut x = vec![0.0; n];
    for v in top_k(d, k) {
        x[v] = 1.0;
    }
    let mut bx = vec![0.0; m];
    g.incidence_t_into(&x, &mut bx);
    let mut z = bx.clone();
    let mut u = vec![0.0; m];

    let mut coupling = vec![0.0; m];
    let mut grad = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut dz = vec![0.0; m];
    let mut bu = vec![0.0; n];
    let mut x_sum = vec![0.0; n];

    let cap = cfg.max_iter;
    let mut report = SolverReport {
        x_avg: Vec::new(),
        x_last: Vec::new(),
        iters: 0,
        converged: false,
        primal_residual_history: Vec::with_capacity(cap),
        dual_residual_history: Vec::with_capacity(cap),
        eps_pri_history: Vec::with_capacity(cap),
        eps_dual_history: Vec::with_capacity(cap),
        lovasz_objective_history: Vec::with_capacity(cap),
        mu,
        lambda_hat,
        wall_time: Duration::ZERO,
    };
    let sqrt_m = (m as f64).sqrt();
    let sqrt_n = (n as f64).sqrt();
    let step = mu * cfg.rho;

    for t in 1..=cap {
        // x-update: linearized prox step
        for e in 0..m {
            coupling[e] = bx[e] - z[e] + u[e];
        }
        g.incidence_into(&coupling, &mut grad);
        for i in 0..n {
            v[i] = x[i] - step * grad[i];
        }
        if v.iter().any(|vi| !vi.is_finite()) {
            return Err(DksError::Numerical {
                iteration: t,
                message: "non-finite prox argument".into(),
            });
        }
        prox_g_into(&v, &params, &mut x);
        g.incidence_t_into(&x, &mut bx);

        // over-relaxed z- and u-updates
        for e in 0..m {
            let relaxed = cfg.alpha * bx[e] + (1.0 - cfg.alpha) * z[e];
            let z_new = shrink_scalar(relaxed + u[e], w[e], cfg.rho);
            u[e] += relaxed - z_new;
            dz[e] = z_new - z[e];
            z[e] = z_new;
        }
        if z.iter().chain(&u).any(|a| !a.is_finite()) {
            return Err(DksError::Numerical {
                iteration: t,
                message: "non-finite split or dual variable".into(),
            });
        }

        let primal = bx
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        g.incidence_into(&dz, &mut grad);
        let mut dual = norm(&grad);
        if cfg.scaled_dual_residual {
            dual *= cfg.rho;
        }
        g.incidence_into(&u, &mut bu);
        let eps_pri = sqrt_m * cfg.eps_abs + cfg.eps_rel * norm(&bx).max(norm(&z));
        let eps_dual = sqrt_n * cfg.eps_abs + cfg.eps_rel * norm(&bu);

        for (s, xi) in x_sum.iter_mut().zip(&x) {
            *s += xi;
        }
        report.primal_residual_history.push(primal);
        report.dual_residual_history.push(dual);
        report.eps_pri_history.push(eps_pri);
        report.eps_dual_history.push(eps_dual);
        let objective = if cfg.objective_every > 0 && t % cfg.objective_every == 0 {
            lovasz_unchecked(g, &x)
        } else {
            f64::NAN
        };
        report.lovasz_objective_history.push(objective);
        report.iters = t;

        if primal <= eps_pri && dual <= eps_dual {
            report.converged = true;
            break;
        }
    }

    let t = report.iters as f64;
    report.x_avg = x_sum.into_iter().map(|s| s / t).collect();
    report.x_last = x;
    report.wall_time = start.elapsed();
    Ok(report)
}

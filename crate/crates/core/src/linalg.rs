//! Small dense-vector helpers and a matrix-free power iteration shared by the
//! spectral estimators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic pseudo-random start vector with entries in [-1, 1].
pub(crate) fn random_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// Removes the component of `x` along the unit vector `u`.
pub(crate) fn deflate(x: &mut [f64], u: &[f64]) {
    let c = dot(x, u);
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi -= c * ui;
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PowerOutcome {
    /// Rayleigh quotient of the final unit vector.
    pub value: f64,
    /// `||A x - value x||` for the final unit vector.
    pub residual: f64,
    pub vector: Vec<f64>,
    pub converged: bool,
}

/// Power iteration for a symmetric operator. Stops when the eigen-residual
/// drops below `tol * |value|`. When `orth` is given every iterate is kept
/// orthogonal to that unit vector.
pub(crate) fn power_iteration<F>(
    mut apply: F,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
    orth: Option<&[f64]>,
) -> PowerOutcome
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut x = start;
    if let Some(u) = orth {
        deflate(&mut x, u);
    }
    let mut y = vec![0.0; n];
    let mut value = 0.0;
    let mut residual = f64::INFINITY;

    let nx = norm(&x);
    if nx == 0.0 || n == 0 {
        return PowerOutcome {
            value: 0.0,
            residual: 0.0,
            vector: x,
            converged: true,
        };
    }
    x.iter_mut().for_each(|v| *v /= nx);

    for _ in 0..max_iter {
        apply(&x, &mut y);
        if let Some(u) = orth {
            deflate(&mut y, u);
        }
        value = dot(&x, &y);
        residual = x
            .iter()
            .zip(&y)
            .map(|(xi, yi)| (yi - value * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        let ny = norm(&y);
        if ny == 0.0 {
            return PowerOutcome {
                value: 0.0,
                residual: 0.0,
                vector: x,
                converged: true,
            };
        }
        if residual <= tol * value.abs() {
            return PowerOutcome {
                value,
                residual,
                vector: x,
                converged: true,
            };
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    PowerOutcome {
        value,
        residual,
        vector: x,
        converged: false,
    }
}

/// Extreme Ritz values of a symmetric operator after a Lanczos run, each
/// with the residual bound `β_j |s_j|` (an eigenvalue lies within the bound).
#[derive(Debug, Clone, Copy)]
pub(crate) struct LanczosOutcome {
    pub max: f64,
    pub max_bound: f64,
    pub min: f64,
    pub min_bound: f64,
    pub converged: bool,
}

const LANCZOS_CHECK_EVERY: usize = 8;

/// Lanczos tridiagonalization without stored basis vectors (O(n) memory).
/// Stops once the top Ritz value (and the bottom one when `need_min`) has a
/// residual bound below `tol * max(|max|, |min|)`, on breakdown, or after
/// `max_steps`.
pub(crate) fn lanczos_extremes<F>(
    mut apply: F,
    start: Vec<f64>,
    tol: f64,
    max_steps: usize,
    orth: Option<&[f64]>,
    need_min: bool,
) -> LanczosOutcome
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut q = start;
    if let Some(u) = orth {
        deflate(&mut q, u);
    }
    let nq = norm(&q);
    let zero = LanczosOutcome {
        max: 0.0,
        max_bound: 0.0,
        min: 0.0,
        min_bound: 0.0,
        converged: true,
    };
    if n == 0 || nq == 0.0 {
        return zero;
    }
    q.iter_mut().for_each(|v| *v /= nq);
    let mut q_prev = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut beta_prev = 0.0;
    let mut outcome = zero;
    outcome.converged = false;

    for step in 1..=max_steps.max(1) {
        apply(&q, &mut w);
        if let Some(u) = orth {
            deflate(&mut w, u);
        }
        let alpha = dot(&q, &w);
        for i in 0..n {
            w[i] -= alpha * q[i] + beta_prev * q_prev[i];
        }
        // one pass of local re-orthogonalization against q
        let c = dot(&q, &w);
        for i in 0..n {
            w[i] -= c * q[i];
        }
        let alpha = alpha + c;
        let beta = norm(&w);
        alphas.push(alpha);

        let scale = alphas.iter().chain(&betas).fold(0.0f64, |a, b| a.max(b.abs()));
        let breakdown = beta <= 1e-12 * scale.max(f64::MIN_POSITIVE);
        if breakdown || step % LANCZOS_CHECK_EVERY == 0 || step == max_steps.max(1) {
            outcome = ritz_extremes(&alphas, &betas, if breakdown { 0.0 } else { beta });
            let size = outcome.max.abs().max(outcome.min.abs());
            outcome.converged = breakdown
                || (outcome.max_bound <= tol * size && (!need_min || outcome.min_bound <= tol * size));
            if outcome.converged {
                return outcome;
            }
        }
        betas.push(beta);
        beta_prev = beta;
        std::mem::swap(&mut q_prev, &mut q);
        for i in 0..n {
            q[i] = w[i] / beta;
        }
    }
    outcome
}

fn ritz_extremes(alphas: &[f64], betas: &[f64], beta_next: f64) -> LanczosOutcome {
    let k = alphas.len();
    let b = &betas[..k - 1];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < k { b[i].abs() } else { 0.0 };
        lo = lo.min(alphas[i] - r);
        hi = hi.max(alphas[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let max = sturm_bisect(alphas, b, lo, hi, scale, |c| c < k);
    let min = sturm_bisect(alphas, b, lo, hi, scale, |c| c == 0);
    let last = |theta: f64| {
        if k == 1 {
            1.0
        } else {
            inverse_iteration_last(alphas, b, theta, scale)
        }
    };
    LanczosOutcome {
        max,
        max_bound: beta_next * last(max),
        min,
        min_bound: beta_next * last(min),
        converged: false,
    }
}

/// Number of eigenvalues of the tridiagonal `(a, b)` strictly below `x`.
fn sturm_count(a: &[f64], b: &[f64], x: f64, scale: f64) -> usize {
    let tiny = f64::EPSILON * scale;
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..a.len() {
        let off = if i > 0 { b[i - 1] * b[i - 1] / q } else { 0.0 };
        q = a[i] - x - off;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bisection on `[lo, hi]` for the boundary where `below(count(x))` flips
/// from true to false; returns the upper end of the final bracket.
fn sturm_bisect<P: Fn(usize) -> bool>(
    a: &[f64],
    b: &[f64],
    mut lo: f64,
    mut hi: f64,
    scale: f64,
    below: P,
) -> f64 {
    lo -= f64::EPSILON * scale;
    hi += f64::EPSILON * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(sturm_count(a, b, mid, scale)) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    hi
}

/// Magnitude of the last component of the unit eigenvector for `theta`,
/// by two steps of inverse iteration with a pivoted tridiagonal solve.
fn inverse_iteration_last(a: &[f64], b: &[f64], theta: f64, scale: f64) -> f64 {
    let k = a.len();
    let shift = theta + 1e3 * f64::EPSILON * scale;
    let mut y = vec![1.0 / (k as f64).sqrt(); k];
    for _ in 0..3 {
        y = solve_tridiagonal(a, b, shift, &y, scale);
        let nrm = norm(&y);
        if !(nrm.is_finite() && nrm > 0.0) {
            return 1.0;
        }
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    y[k - 1].abs()
}

/// Solves `(T - shift I) y = rhs` by Gaussian elimination with partial
/// pivoting; zero pivots are perturbed.
fn solve_tridiagonal(a: &[f64], b: &[f64], shift: f64, rhs: &[f64], scale: f64) -> Vec<f64> {
    let k = a.len();
    let tiny = f64::EPSILON * scale;
    // rows of U: diagonal, first and second super-diagonal
    let mut d: Vec<f64> = a.iter().map(|&v| v - shift).collect();
    let mut u1: Vec<f64> = b.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; k];
    let mut lower: Vec<f64> = b.to_vec();
    let mut y = rhs.to_vec();
    for i in 0..k - 1 {
        if lower[i].abs() > d[i].abs() {
            // swap rows i and i+1
            let (ri0, ri1, ri2) = (d[i], u1[i], u2[i]);
            d[i] = lower[i];
            u1[i] = d[i + 1];
            u2[i] = if i + 1 < k - 1 { u1[i + 1] } else { 0.0 };
            lower[i] = ri0;
            d[i + 1] = ri1;
            if i + 1 < k - 1 {
                u1[i + 1] = ri2;
            }
            y.swap(i, i + 1);
        }
        if d[i] == 0.0 {
            d[i] = tiny;
        }
        let f = lower[i] / d[i];
        d[i + 1] -= f * u1[i];
        if i + 1 < k - 1 {
            u1[i + 1] -= f * u2[i];
        }
        y[i + 1] -= f * y[i];
    }
    if d[k - 1] == 0.0 {
        d[k - 1] = tiny;
    }
    for i in (0..k).rev() {
        let mut acc = y[i];
        if i + 1 < k {
            acc -= u1[i] * y[i + 1];
        }
        if i + 2 < k {
            acc -= u2[i] * y[i + 2];
        }
        y[i] = acc / d[i];
    }
    y
}

//! Proximal operators used by the L-ADMM iteration.
//!
//! `g(x) = -d^T x` restricted to `{x in [0,1]^n : 1^T x = k}` and
//! `h(z) = sum_e w_e |z_e|`. Prox convention:
//! `prox(v) = argmin_x f(x) + (tau / 2) ||x - v||^2`.

use crate::error::{check_len, DksError, Result};

/// Parameters of the sum-to-k box prox.
#[derive(Debug, Clone, Copy)]
pub struct ProxGParams<'a> {
    pub d: &'a [f64],
    pub k: f64,
    /// Coefficient of the quadratic proximity term.
    pub tau: f64,
    /// Exit tolerance on the bracket's φ-gap.
    pub eps: f64,
}

impl<'a> ProxGParams<'a> {
    pub fn new(d: &'a [f64], k: f64, tau: f64, eps: f64) -> Result<Self> {
        let n = d.len() as f64;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(DksError::domain(format!("tau must be positive, got {tau}")));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(DksError::domain(format!("eps must be positive, got {eps}")));
        }
        if !(k >= 2.0 && k <= n - 1.0) {
            return Err(DksError::domain(format!(
                "k = {k} outside [2, n - 1] for n = {n}"
            )));
        }
        if d.iter().any(|x| !x.is_finite()) {
            return Err(DksError::domain("degree vector has non-finite entries"));
        }
        Ok(ProxGParams { d, k, tau, eps })
    }
}

#[derive(Debug, Clone)]
pub struct ProxGOutput {
    pub x: Vec<f64>,
    /// Multiplier of the sum-to-k constraint.
    pub nu: f64,
    /// Bisection steps taken.
    pub steps: usize,
}

#[inline]
fn clamp_coord(v: f64, d: f64, nu: f64, tau: f64) -> f64 {
    (v + (d - nu) / tau).clamp(0.0, 1.0)
}

/// `φ(ν) = Σ_i clamp(v_i + (d_i - ν)/τ, 0, 1) - k`, non-increasing in ν.
pub fn phi(nu: f64, v: &[f64], p: &ProxGParams<'_>) -> f64 {
    v.iter()
        .zip(p.d)
        .map(|(&vi, &di)| clamp_coord(vi, di, nu, p.tau))
        .sum::<f64>()
        - p.k
}

/// Initial bracket `(ν_l, ν_u)` with `φ(ν_l) = n - k` and `φ(ν_u) = -k`.
///
/// The lower end is `min_i {d_i + τ v_i} - max(1, τ)`; for `τ <= 1` this is the
/// classical `- 1` offset, larger `τ` needs the wider offset to saturate
/// every coordinate at 1.
pub fn bisection_bracket(v: &[f64], p: &ProxGParams<'_>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (&vi, &di) in v.iter().zip(p.d) {
        let a = di + p.tau * vi;
        lo = lo.min(a);
        hi = hi.max(a);
    }
    (lo - p.tau.max(1.0), hi)
}

const MAX_BISECTION_STEPS: usize = 400;

/// Prox of `g` by bisection on the multiplier ν.
pub fn prox_g_bisection(v: &[f64], p: &ProxGParams<'_>) -> Result<ProxGOutput> {
    check_len("v", v.len(), p.d.len())?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(DksError::domain("prox input has non-finite entries"));
    }
    let mut x = vec![0.0; v.len()];
    let (nu, steps) = prox_g_into(v, p, &mut x);
    Ok(ProxGOutput { x, nu, steps })
}

/// Allocation-free core of [`prox_g_bisection`]; inputs are assumed valid.
pub(crate) fn prox_g_into(v: &[f64], p: &ProxGParams<'_>, out: &mut [f64]) -> (f64, usize) {
    let (mut lo, mut hi) = bisection_bracket(v, p);
    let mut phi_lo = phi(lo, v, p);
    let mut phi_hi = phi(hi, v, p);
    let mut mid = 0.5 * (lo + hi);
    let mut steps = 0;
    while steps < MAX_BISECTION_STEPS {
        steps += 1;
        mid = 0.5 * (lo + hi);
        let pm = phi(mid, v, p);
        if pm > 0.0 {
            lo = mid;
            phi_lo = pm;
        } else {
            hi = mid;
            phi_hi = pm;
        }
        if pm == 0.0
            || phi_lo - phi_hi <= p.eps
            || hi - lo <= 1e-14 * (lo.abs() + hi.abs())
        {
            break;
        }
    }
    for ((o, &vi), &di) in out.iter_mut().zip(v).zip(p.d) {
        *o = clamp_coord(vi, di, mid, p.tau);
    }
    (mid, steps)
}

#[inline]
pub(crate) fn shrink_scalar(v: f64, w: f64, rho: f64) -> f64 {
    let t = w / rho;
    (v - t).max(0.0) - (-v - t).max(0.0)
}

/// Elementwise soft-thresholding with per-entry threshold `w_e / ρ`; the prox
/// of `sum_e w_e |z_e|` with quadratic coefficient ρ.
pub fn shrinkage(v: &[f64], w: &[f64], rho: f64) -> Result<Vec<f64>> {
    check_len("w", w.len(), v.len())?;
    if rho.is_nan() || rho <= 0.0 {
        return Err(DksError::domain(format!("rho must be positive, got {rho}")));
    }
    Ok(v.iter()
        .zip(w)
        .map(|(&vi, &wi)| shrink_scalar(vi, wi, rho))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_input_splits_evenly() {
        let d = [0.0; 4];
        let p = ProxGParams::new(&d, 2.0, 1.0, 1e-6).unwrap();
        let out = prox_g_bisection(&[0.0; 4], &p).unwrap();
        assert_eq!(out.x, vec![0.5; 4]);
        assert_eq!(out.nu, -0.5);
    }

    #[test]
    fn feasible_binary_point_is_fixed_for_large_tau() {
        let d = [0.0; 5];
        let v = [1.0, 0.0, 1.0, 0.0, 0.0];
        let p = ProxGParams::new(&d, 2.0, 1e6, 1e-6).unwrap();
        let out = prox_g_bisection(&v, &p).unwrap();
        for (a, b) in out.x.iter().zip(&v) {
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn bracket_ends_hit_extremes() {
        let d = [3.0, 1.0, 0.5, 2.0, 0.0];
        let v = [0.2, -0.4, 1.3, 0.9, 0.1];
        for tau in [0.1, 1.0, 7.5] {
            let p = ProxGParams::new(&d, 2.0, tau, 1e-6).unwrap();
            let (lo, hi) = bisection_bracket(&v, &p);
            assert_eq!(phi(lo, &v, &p), 5.0 - 2.0);
            assert_eq!(phi(hi, &v, &p), -2.0);
        }
    }

    #[test]
    fn rejects_invalid_params() {
        let d = [0.0; 4];
        assert!(ProxGParams::new(&d, 2.0, 0.0, 1e-6).is_err());
        assert!(ProxGParams::new(&d, 2.0, 1.0, 0.0).is_err());
        assert!(ProxGParams::new(&d, 1.0, 1.0, 1e-6).is_err());
        assert!(ProxGParams::new(&d, 4.0, 1.0, 1e-6).is_err());
        let p = ProxGParams::new(&d, 2.0, 1.0, 1e-6).unwrap();
        assert!(prox_g_bisection(&[0.0, f64::NAN, 0.0, 0.0], &p).is_err());
        assert!(prox_g_bisection(&[0.0; 3], &p).is_err());
    }

    #[test]
    fn shrinkage_examples() {
        assert_eq!(shrinkage(&[0.5], &[1.0], 2.0).unwrap(), vec![0.0]);
        assert_eq!(shrinkage(&[2.0], &[1.0], 1.0).unwrap(), vec![1.0]);
        assert_eq!(shrinkage(&[-3.0], &[2.0], 2.0).unwrap(), vec![-2.0]);
        assert!(shrinkage(&[1.0], &[1.0], 0.0).is_err());
        assert!(shrinkage(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }
}

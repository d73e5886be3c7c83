use dks_core::prox::{bisection_bracket, phi, prox_g_bisection, shrinkage, ProxGParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prox_objective(x: &[f64], v: &[f64], d: &[f64], tau: f64) -> f64 {
    x.iter()
        .zip(v)
        .zip(d)
        .map(|((&xi, &vi), &di)| -di * xi + 0.5 * tau * (xi - vi).powi(2))
        .sum()
}

/// Exact prox by walking the breakpoints of the piecewise-linear φ.
fn breakpoint_prox(v: &[f64], d: &[f64], k: f64, tau: f64) -> Vec<f64> {
    let x_at = |nu: f64| -> Vec<f64> {
        v.iter()
            .zip(d)
            .map(|(&vi, &di)| (vi + (di - nu) / tau).clamp(0.0, 1.0))
            .collect()
    };
    let sum_at = |nu: f64| x_at(nu).iter().sum::<f64>() - k;
    let mut knots: Vec<f64> = v
        .iter()
        .zip(d)
        .flat_map(|(&vi, &di)| [di + tau * vi, di + tau * (vi - 1.0)])
        .collect();
    knots.sort_by(f64::total_cmp);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (sum_at(a), sum_at(b));
        if fa >= 0.0 && fb <= 0.0 {
            let nu = if fa == fb { a } else { a + (b - a) * fa / (fa - fb) };
            return x_at(nu);
        }
    }
    panic!("no sign change");
}

fn random_feasible(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<f64> {
    // mix of a random fractional point pushed onto the constraint and a vertex
    let mut y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    for _ in 0..60 {
        let excess = (y.iter().sum::<f64>() - k as f64) / n as f64;
        y.iter_mut().for_each(|v| *v = (*v - excess).clamp(0.0, 1.0));
    }
    let excess = y.iter().sum::<f64>() - k as f64;
    if excess.abs() > 1e-9 {
        y = vec![0.0; n];
        for v in rand::seq::index::sample(rng, n, k) {
            y[v] = 1.0;
        }
    }
    y
}

#[test]
fn prox_kkt_and_optimality_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let eps = 1e-6;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=200);
        let k = rng.gen_range(2..n);
        let tau = 10f64.powf(rng.gen_range(-2.0..3.0));
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..3.0)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..20.0)).collect();
        let p = ProxGParams::new(&d, k as f64, tau, eps).unwrap();
        let out = prox_g_bisection(&v, &p).unwrap();
        assert!(out.x.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let sum: f64 = out.x.iter().sum();
        assert!((sum - k as f64).abs() <= eps, "sum {sum} k {k}");
        for i in 0..n {
            let raw = v[i] + (d[i] - out.nu) / tau;
            assert_eq!(out.x[i], raw.clamp(0.0, 1.0));
            if out.x[i] == 0.0 {
                assert!(raw <= 0.0);
            } else if out.x[i] == 1.0 {
                assert!(raw >= 1.0);
            }
        }
        let fx = prox_objective(&out.x, &v, &d, tau);
        // first-order slack from the ε-inexact sum
        let slack = eps * (out.nu.abs() + 1.0) * 4.0;
        for _ in 0..100 {
            let y = random_feasible(&mut rng, n, k);
            assert!(fx <= prox_objective(&y, &v, &d, tau) + slack);
        }
    }
}

#[test]
fn matches_breakpoint_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let (n, k) = (12, 4.0);
        let tau = 10f64.powf(rng.gen_range(-1.0..2.0));
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..6.0)).collect();
        let p = ProxGParams::new(&d, k, tau, 1e-9).unwrap();
        let got = prox_g_bisection(&v, &p).unwrap().x;
        let want = breakpoint_prox(&v, &d, k, tau);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
    }
}

#[test]
fn large_tau_keeps_feasible_binary_point() {
    let v = [1.0, 0.0, 1.0, 0.0, 0.0];
    let d = [0.0; 5];
    let p = ProxGParams::new(&d, 2.0, 1e6, 1e-9).unwrap();
    let out = prox_g_bisection(&v, &p).unwrap();
    for (a, b) in out.x.iter().zip(&v) {
        assert!((a - b).abs() <= 1e-3);
    }
}

#[test]
fn bisection_steps_are_logarithmic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = Vec::new();
    for n in [100usize, 1_000, 10_000, 100_000] {
        let mut most = 0;
        for _ in 0..5 {
            let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=10) as f64).collect();
            let p = ProxGParams::new(&d, (n / 10) as f64, 1.0, 1e-6).unwrap();
            let (lo, hi) = bisection_bracket(&v, &p);
            let out = prox_g_bisection(&v, &p).unwrap();
            let cap = ((hi - lo) / f64::EPSILON).log2().ceil() as usize;
            assert!(out.steps <= cap, "{} > {cap}", out.steps);
            most = most.max(out.steps);
        }
        worst.push(most);
    }
    // 1000x more coordinates costs only a few dozen extra halvings
    assert!(worst[3] <= worst[0] + 40, "{worst:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn phi_is_non_increasing(
        v in prop::collection::vec(-3.0f64..3.0, 5..40),
        tau in 0.05f64..20.0,
        a in -50.0f64..50.0,
        b in -50.0f64..50.0,
    ) {
        let n = v.len();
        let d: Vec<f64> = (0..n).map(|i| (i % 5) as f64).collect();
        let p = ProxGParams::new(&d, 2.0, tau, 1e-6).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(phi(lo, &v, &p) >= phi(hi, &v, &p));
        let (l, u) = bisection_bracket(&v, &p);
        prop_assert!((phi(l, &v, &p) - (n as f64 - 2.0)).abs() < 1e-9);
        prop_assert!((phi(u, &v, &p) + 2.0).abs() < 1e-9);
    }

    #[test]
    fn shrinkage_subgradient_condition(
        v in prop::collection::vec(-5.0f64..5.0, 1..30),
        rho in 0.01f64..10.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = v.iter().map(|_| rng.gen_range(0.0..3.0)).collect();
        let z = shrinkage(&v, &w, rho).unwrap();
        for e in 0..v.len() {
            let r = rho * (v[e] - z[e]);
            if z[e] > 0.0 {
                prop_assert!((r - w[e]).abs() <= 1e-9 * (1.0 + w[e]));
            } else if z[e] < 0.0 {
                prop_assert!((r + w[e]).abs() <= 1e-9 * (1.0 + w[e]));
            } else {
                prop_assert!(r.abs() <= w[e] * (1.0 + 1e-12) + 1e-12);
            }
        }
    }

    #[test]
    fn shrinkage_is_odd_and_non_expansive(
        a in prop::collection::vec(-5.0f64..5.0, 1..30),
        shift in prop::collection::vec(-2.0f64..2.0, 30),
        rho in 0.01f64..10.0,
    ) {
        let w: Vec<f64> = (0..a.len()).map(|i| 0.1 * (i % 7) as f64).collect();
        let b: Vec<f64> = a.iter().zip(&shift).map(|(x, s)| x + s).collect();
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        let sa = shrinkage(&a, &w, rho).unwrap();
        let sn = shrinkage(&neg, &w, rho).unwrap();
        for (x, y) in sa.iter().zip(&sn) {
            prop_assert_eq!(*x, -*y);
        }
        let sb = shrinkage(&b, &w, rho).unwrap();
        let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dist(&sa, &sb) <= dist(&a, &b) + 1e-12);
    }
}

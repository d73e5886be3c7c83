use dks_core::oracles::{fixtures, generate_planted, random_graph, WeightDist};
use dks_core::{
    adjacency_spectral_norm, frank_wolfe_refine, project_topk, solve_lrelax, FwConfig,
    SolverConfig, StepMode,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_feasible(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<f64> {
    let mut y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    for _ in 0..200 {
        let excess = (y.iter().sum::<f64>() - k as f64) / n as f64;
        y.iter_mut().for_each(|v| *v = (*v - excess).clamp(0.0, 1.0));
    }
    y
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

#[test]
fn fw_fixed_point_at_strict_local_optimum() {
    let g = fixtures::k4_k2();
    let x0 = [1.0, 1.0, 1.0, 1.0, 0.0, 0.0];
    let out = frank_wolfe_refine(&g, 4, &x0, &FwConfig::for_graph(&g)).unwrap();
    assert!(out.stationary);
    assert_eq!(out.iters, 0);
    assert_eq!(out.x, x0);
    assert_eq!(out.set.members(), &[0, 1, 2, 3]);
}

#[test]
fn fw_from_uniform_start_finds_k4() {
    let g = fixtures::k4_k2();
    let out = frank_wolfe_refine(&g, 4, &[4.0 / 6.0; 6], &FwConfig::for_graph(&g)).unwrap();
    assert_eq!(out.set.members(), &[0, 1, 2, 3]);
    assert_eq!(out.set.density(), 1.0);
    assert_eq!(out.integrality_gap, 0.0);
}

#[test]
fn fw_objective_is_monotone_and_stationarity_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..100 {
        let g = random_graph(30, 0.2, WeightDist::Uniform { max: 2.0 }, trial).unwrap();
        if g.m() == 0 {
            continue;
        }
        let k = rng.gen_range(2..10);
        let x0 = random_feasible(&mut rng, g.n(), k);
        let cfg = FwConfig::for_graph(&g);
        let out = frank_wolfe_refine(&g, k, &x0, &cfg).unwrap();
        for w in out.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()), "{w:?}");
        }
        assert!(out.x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        assert!((out.x.iter().sum::<f64>() - k as f64).abs() < 1e-6);
        if out.stationary {
            let wx = g.adjacency_apply(&out.x).unwrap();
            let vertex = project_topk(&g, &wx, k).unwrap();
            let at_vertex: f64 = vertex.members().iter().map(|&v| wx[v]).sum();
            let at_x: f64 = wx.iter().zip(&out.x).map(|(a, b)| a * b).sum();
            assert!(at_vertex - at_x <= 1e-9 * (1.0 + at_x.abs()));
        }
    }
}

#[test]
fn lipschitz_gap_steps_stay_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..20 {
        let g = random_graph(25, 0.25, WeightDist::Unit, trial).unwrap();
        if g.m() == 0 {
            continue;
        }
        let x0 = random_feasible(&mut rng, g.n(), 5);
        let cfg = FwConfig {
            step_mode: StepMode::LipschitzGap,
            ..FwConfig::for_graph(&g)
        };
        let out = frank_wolfe_refine(&g, 5, &x0, &cfg).unwrap();
        assert!(out.step_history.iter().all(|&a| a > 0.0 && a <= 1.0));
        assert!((out.x.iter().sum::<f64>() - 5.0).abs() < 1e-6);
        assert!(out.objective_history.last().unwrap() <= &out.objective_history[0]);
    }
}

#[test]
fn lmo_matches_exhaustive_vertex_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let n = rng.gen_range(4..=12);
        let k = rng.gen_range(2..n);
        let g = random_graph(n, 0.4, WeightDist::Uniform { max: 2.0 }, trial).unwrap();
        let x = random_feasible(&mut rng, n, k);
        let wx = g.adjacency_apply(&x).unwrap();
        let lmo = project_topk(&g, &wx, k).unwrap();
        let value = |s: &[usize]| s.iter().map(|&v| wx[v]).sum::<f64>();
        let best = subsets(n, k)
            .iter()
            .map(|s| value(s))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(value(lmo.members()) >= best - 1e-12);
    }
}

#[test]
fn planted_clique_in_sparse_background() {
    let inst = generate_planted(200, 20, 0.05, 4).unwrap();
    let g = &inst.graph;
    // no outside vertex is adjacent to 19 clique members
    for v in 0..g.n() {
        if inst.planted.contains(v) {
            continue;
        }
        let hits = g.neighbors(v).filter(|&(u, _)| inst.planted.contains(u)).count();
        assert!(hits < 19);
    }
    let r = solve_lrelax(g, 20, &SolverConfig::default()).unwrap();
    let out = frank_wolfe_refine(g, 20, &r.x_avg, &FwConfig::for_graph(g)).unwrap();
    assert_eq!(out.set.density(), 1.0);
    assert_eq!(out.set.members(), inst.planted.members());
}

#[test]
fn spectral_norm_known_values() {
    for n in [3, 5, 8] {
        let est = adjacency_spectral_norm(&fixtures::complete(n), 1e-10);
        assert!((est.value - (n - 1) as f64).abs() < 1e-6);
        let est = adjacency_spectral_norm(&fixtures::star(n), 1e-10);
        assert!((est.value - ((n - 1) as f64).sqrt()).abs() < 1e-6);
        assert!(est.converged);
    }
    let est = adjacency_spectral_norm(&fixtures::path(3), 1e-10);
    assert!((est.value - 2f64.sqrt()).abs() < 1e-6);
    assert!(est.vector.iter().all(|&v| v >= 0.0));
}

proptest! {
    #[test]
    fn topk_invariant_under_monotone_maps(
        x in prop::collection::vec(-5.0f64..5.0, 3..40),
        kk in 0usize..100,
    ) {
        let n = x.len();
        let k = 2 + kk % (n - 2);
        let g = fixtures::path(n);
        let s = project_topk(&g, &x, k).unwrap();
        prop_assert_eq!(s.k(), k);
        let y: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 + 1.0).collect();
        prop_assert_eq!(project_topk(&g, &y, k).unwrap().members().to_vec(), s.members().to_vec());
        let binary: Vec<f64> = (0..n).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect();
        prop_assert_eq!(project_topk(&g, &binary, k).unwrap().members().to_vec(), s.members().to_vec());
    }
}

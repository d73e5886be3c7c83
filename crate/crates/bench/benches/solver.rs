use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dks_bench::planted;
use dks_core::{
    frank_wolfe_refine, prox_g_bisection, solve_lrelax, top_two_singular, FwConfig, ProxGParams,
    SolverConfig,
};

fn bench_prox(c: &mut Criterion) {
    let mut group = c.benchmark_group("prox_g_bisection");
    for n in [1_000usize, 10_000, 100_000] {
        let d: Vec<f64> = (0..n).map(|i| (i % 17) as f64).collect();
        let v: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 100.0).collect();
        let params = ProxGParams::new(&d, (n / 10) as f64, 4.0, 1e-6).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &v, |b, v| {
            b.iter(|| prox_g_bisection(v, &params).unwrap())
        });
    }
    group.finish();
}

fn bench_ladmm(c: &mut Criterion) {
    let g = planted(500, 20, 0.05, 7);
    let cfg = SolverConfig {
        max_iter: 200,
        eps_abs: 1e-12,
        eps_rel: 1e-12,
        ..SolverConfig::default()
    };
    c.bench_function("ladmm_200_iters_planted_500", |b| {
        b.iter(|| solve_lrelax(&g, 20, &cfg).unwrap())
    });
}

fn bench_rounding(c: &mut Criterion) {
    let g = planted(500, 20, 0.05, 7);
    let x = solve_lrelax(&g, 20, &SolverConfig::default()).unwrap().x_avg;
    let fw = FwConfig::for_graph(&g);
    c.bench_function("frank_wolfe_planted_500", |b| {
        b.iter(|| frank_wolfe_refine(&g, 20, &x, &fw).unwrap())
    });
    c.bench_function("top_two_singular_planted_500", |b| {
        b.iter(|| top_two_singular(&g, 1e-6))
    });
}

criterion_group!(benches, bench_prox, bench_ladmm, bench_rounding);
criterion_main!(benches);

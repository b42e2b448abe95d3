use armijo_benches::{standard_instances, SearchFixture};
use armijo_core::linesearch::line_search;
use armijo_core::manifold::ambient_move;
use armijo_core::{LineSearchKind, LineSearchParams, Objective};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

/// Cost of the pieces a trial step is made of.
fn trial_costs(c: &mut Criterion) {
    let mut group = c.benchmark_group("trial_costs");
    for (kind, n, p) in standard_instances() {
        let fx = SearchFixture::new(kind, n, p, 0);
        let (f, m, x) = (&fx.problem.objective, fx.problem.manifold(), &fx.problem.x0);
        let step = fx.direction.scaled(0.25);
        let label = fx.label();
        group.bench_function(BenchmarkId::new("retract", &label), |b| {
            b.iter(|| m.retract(black_box(x), black_box(&step)).unwrap())
        });
        group.bench_function(BenchmarkId::new("f_ambient", &label), |b| {
            b.iter(|| f.value(&ambient_move(black_box(x), 0.25, &fx.direction)))
        });
        let y = m.retract(x, &step).unwrap();
        group.bench_function(BenchmarkId::new("f_retracted", &label), |b| {
            b.iter(|| f.value(black_box(&y)))
        });
    }
    group.finish();
}

/// One line search from `x0` along the Newton direction.
fn single_search(c: &mut Criterion) {
    for tau in [0.1, 0.9] {
        let params = LineSearchParams::new(0.5, tau, LineSearchParams::DEFAULT_ELL_MAX).unwrap();
        let mut group = c.benchmark_group(format!("line_search_tau_{tau}"));
        for (kind, n, p) in standard_instances() {
            let fx = SearchFixture::new(kind, n, p, 0);
            let (f, m, x) = (&fx.problem.objective, fx.problem.manifold(), &fx.problem.x0);
            for strategy in [LineSearchKind::Standard, LineSearchKind::Modified] {
                group.bench_function(BenchmarkId::new(strategy.label(), fx.label()), |b| {
                    b.iter(|| {
                        line_search(
                            strategy,
                            f,
                            m,
                            x,
                            fx.fx,
                            &fx.direction,
                            &fx.gradient,
                            &params,
                        )
                        .unwrap()
                    })
                });
            }
        }
        group.finish();
    }
}

criterion_group!(benches, trial_costs, single_search);
criterion_main!(benches);

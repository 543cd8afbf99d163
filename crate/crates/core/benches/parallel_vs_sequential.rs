use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tco_toolkit::cavity_optics::extinction_from_finesse;
use tco_toolkit::report::{run_budget, BudgetTarget};
use tco_toolkit::ringdown::{fit_ensemble, synthesize_trace, AmplitudeMode};
use tco_toolkit::scenario::{parse_scenario, PAPER_YB};
use tco_toolkit::{Backend, Dimension, MonteCarlo, UncertainQuantity};

const BACKENDS: [(&str, Backend); 2] = [("sequential", Backend::Sequential), ("parallel", Backend::Parallel)];

fn monte_carlo_kappa(c: &mut Criterion) {
    let uq = |v, s, d| UncertainQuantity::new(v, s, d).unwrap();
    let f00 = uq(23340.0, 60.0, Dimension::Dimensionless);
    let f01 = uq(14160.0, 250.0, Dimension::Dimensionless);
    let h = uq(30e-9, 2e-9, Dimension::Length);
    let mut g = c.benchmark_group("mc_kappa_100k");
    for (name, backend) in BACKENDS {
        let mc = MonteCarlo::new(100_000, 0).with_backend(backend);
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| extinction_from_finesse(&f00, &f01, &h, 1650e-9, &mc).unwrap())
        });
    }
    g.finish();
}

fn ensemble_fit(c: &mut Criterion) {
    let traces: Vec<_> = (0..64)
        .map(|i| synthesize_trace(1.0, 523e3, 2e-6, 5e8, 0.01, i).unwrap())
        .collect();
    let mut g = c.benchmark_group("fit_64_traces");
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fit_ensemble(&traces, AmplitudeMode::PerTrace, backend).unwrap())
        });
    }
    g.finish();
}

fn budget(c: &mut Criterion) {
    let sc = parse_scenario(PAPER_YB).unwrap().with_seed(0);
    let mut g = c.benchmark_group("budget_cooling");
    g.sample_size(10);
    for (name, backend) in BACKENDS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_budget(&sc, BudgetTarget::Cooling, backend).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, monte_carlo_kappa, ensemble_fit, budget);
criterion_main!(benches);

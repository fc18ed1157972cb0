use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use graph_dpp::bench::{run_benchmark_with, BenchConfig, GraphSource, Method};
use graph_dpp::chebyshev::fit_ideal_lowpass;
use graph_dpp::graph::SbmConfig;
use graph_dpp::probes::{estimate_diagonal_with, RandomProbeMatrix};
use graph_dpp::seeds;
use graph_dpp::spectral::estimate_lambda_max;
use graph_dpp::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn diagonal_estimate(c: &mut Criterion) {
    let graph = SbmConfig::new(2000, 10, 0.25, 1).generate().unwrap();
    let l = graph.laplacian();
    let lmax = estimate_lambda_max(&l);
    let filter = fit_ideal_lowpass(0.3 * lmax, lmax, 50).unwrap();
    let probes = RandomProbeMatrix::gaussian(2000, 110, &mut seeds::stream(1, &[0]));
    let mut group = c.benchmark_group("diagonal_estimate");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_diagonal_with(&filter, &l, &probes, exec))
        });
    }
    group.finish();
}

fn benchmark_trials(c: &mut Criterion) {
    let mut cfg = BenchConfig::new(
        GraphSource::Sbm(SbmConfig::new(500, 5, 0.25, 2)),
        vec![10, 20],
    );
    cfg.k = 10;
    cfg.n_signals = 50;
    cfg.methods = vec![Method::UniformIid, Method::DiagIidExact, Method::DppIdeal];
    let mut group = c.benchmark_group("benchmark_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_benchmark_with(&cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, diagonal_estimate, benchmark_trials);
criterion_main!(benches);

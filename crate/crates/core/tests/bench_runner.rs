use graph_dpp::bench::{
    emit_report, read_json_report, run_benchmark, write_csv, BenchConfig, CutoffSource,
    GraphSource, Method, ReportFormat, CSV_COLUMNS,
};
use graph_dpp::graph::{save_graph, Graph, GraphFormat, SbmConfig};

fn sbm_cfg(n: usize, grid: Vec<usize>) -> BenchConfig {
    let mut cfg = BenchConfig::new(GraphSource::Sbm(SbmConfig::new(n, 10, 0.25, 5)), grid);
    cfg.n_signals = 40;
    cfg.seed = 11;
    cfg
}

#[test]
fn reports_are_byte_identical() {
    let cfg = sbm_cfg(300, vec![10, 15]);
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        for (fmt, ext) in [(ReportFormat::Csv, "csv"), (ReportFormat::Json, "json")] {
            let path = dir.path().join(format!("r{run}.{ext}"));
            emit_report(&run_benchmark(&cfg).unwrap(), &path, fmt).unwrap();
            outputs.push(std::fs::read(&path).unwrap());
        }
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
    let back = read_json_report(outputs[1].as_slice()).unwrap();
    assert_eq!(back, run_benchmark(&cfg).unwrap());
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(text.lines().count(), 1 + 4 * 2 + 1);
}

#[test]
fn uniform_fails_on_two_cliques() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cliques.txt");
    save_graph(
        &Graph::cliques(&[10, 10]).unwrap(),
        &path,
        GraphFormat::EdgeList,
    )
    .unwrap();
    let mut cfg = BenchConfig::new(GraphSource::EdgeList(path), vec![2]);
    cfg.k = 2;
    cfg.cutoff = CutoffSource::Exact;
    cfg.methods = vec![Method::UniformIid, Method::DppIdeal];
    cfg.noise_std = 0.0;
    let res = run_benchmark(&cfg).unwrap();
    let uniform = res.row(Method::UniformIid, 2).unwrap();
    // both samples land in one clique with probability 18/38
    assert!(
        uniform.failures > 25 && uniform.failures < 70,
        "{}",
        uniform.failures
    );
    let ideal = res.row(Method::DppIdeal, 2).unwrap();
    assert_eq!(ideal.failures, 0);
    assert!(ideal.median_error < 1e-8);
}

#[test]
fn sbm_curves_and_estimated_diagonal() {
    let mut cfg = sbm_cfg(1000, vec![10, 12, 15, 20, 30, 40, 60]);
    cfg.methods = vec![
        Method::UniformIid,
        Method::DiagIidExact,
        Method::DiagIidEstimated,
        Method::DppApprox,
    ];
    let res = run_benchmark(&cfg).unwrap();
    for method in &cfg.methods {
        let medians: Vec<f64> = res
            .rows
            .iter()
            .filter(|r| r.method == *method)
            .map(|r| r.median_error)
            .collect();
        let inversions = medians.windows(2).filter(|w| w[1] > w[0]).count();
        assert!(inversions <= 1, "{method}: {medians:?}");
    }
    for m in [12, 15, 20, 30, 40, 60] {
        let exact = res.row(Method::DiagIidExact, m).unwrap().median_error;
        let est = res.row(Method::DiagIidEstimated, m).unwrap().median_error;
        assert!(
            est <= 2.0 * exact && exact <= 2.0 * est,
            "m={m}: {est} vs {exact}"
        );
    }
    let mut buf = Vec::new();
    write_csv(&res, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 4 * 7);
}

use hitrun_core::experiment::{
    run_sweep, write_results_csv, write_summary_csv, ExperimentSpec, SweepOptions,
};
use hitrun_core::RngSeed;

const RESULTS: &str = include_str!("golden/mini_sweep_results.csv");
const SUMMARY: &str = include_str!("golden/mini_sweep_summary.csv");

fn mini_sweep() -> (String, String) {
    let spec = ExperimentSpec::spiral(vec![1.2, 2.0], 3, RngSeed(2024));
    let out = run_sweep(&spec, SweepOptions::default()).unwrap();
    let mut results = Vec::new();
    write_results_csv(&out.records, &mut results).unwrap();
    let mut summary = Vec::new();
    write_summary_csv(&out.summary, &mut summary).unwrap();
    (
        String::from_utf8(results).unwrap(),
        String::from_utf8(summary).unwrap(),
    )
}

#[test]
fn mini_sweep_matches_frozen_csv() {
    let (results, summary) = mini_sweep();
    assert_eq!(results, RESULTS);
    assert_eq!(summary, SUMMARY);
}

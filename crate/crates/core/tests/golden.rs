//! The committed golden report pins the JSON schema and the values of a
//! small grid. Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::path::PathBuf;

use weil_core::config::RunConfig;
use weil_core::report::Report;
use weil_core::verify::run_grid;

fn golden_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.primes = vec![3];
    cfg.n_max = 0;
    cfg.l_max = 13;
    cfg.set(
        "checks",
        "gauss_norm,stickelberger,beta_map,weil_congruence,weil_construction",
    )
    .unwrap();
    cfg
}

#[test]
fn report_matches_golden() {
    let cfg = golden_config();
    let mut results = run_grid(&cfg).unwrap();
    for r in &mut results {
        r.ms = 0;
    }
    let report = Report::new(&cfg, results);
    let text = report.to_json_string();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/report.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, golden);
    let parsed = Report::from_json_str(&golden).unwrap();
    assert_eq!(parsed.determinism_hash(), report.determinism_hash());
    assert!(parsed.all_passed());
    // the Stickelberger witness carries the full valuation table
    let st = parsed
        .results
        .iter()
        .find(|r| r.check == "stickelberger" && r.params["l"] == 7)
        .unwrap();
    assert_eq!(st.witness["valuations"].as_object().unwrap().len(), 2);
}

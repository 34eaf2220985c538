//! Runs every scenario preset and prints one verdict line per acceptance
//! criterion, in criterion order. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use mhd2d::harness::criteria::Criterion;
use mhd2d::harness::{run_scenario, ScenarioOptions, SCENARIOS};

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let mut all: Vec<Criterion> = Vec::new();
    for name in SCENARIOS {
        let opts = ScenarioOptions {
            out_dir: dir.path().join(name),
            ..Default::default()
        };
        match run_scenario(name, &opts) {
            Ok(report) => all.extend(report.criteria),
            Err(e) => {
                println!("ERROR scenario {name}: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    all.sort_by_key(|c| c.id);
    println!("\nacceptance criteria");
    for c in &all {
        println!("{c}");
    }
    let ids: Vec<u8> = all.iter().map(|c| c.id).collect();
    if ids != (1..=11).collect::<Vec<u8>>() {
        println!("criteria covered: {ids:?}");
        return ExitCode::FAILURE;
    }
    let failing: Vec<String> = all.iter().filter(|c| !c.pass).map(|c| format!("{} ({})", c.id, c.name)).collect();
    if failing.is_empty() {
        println!("all {} criteria PASS", all.len());
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {}", failing.join(", "));
        ExitCode::FAILURE
    }
}

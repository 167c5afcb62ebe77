// Usage: cargo run --example run_scenario [scenario.json]
//
// Runs a scenario in-process and prints the witness table. Defaults to
// examples/data/wire.json.

use std::path::PathBuf;

use cvcomb::scenario::{run_scenario, witness_csv, Scenario};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/wire.json"));
    let scenario = match Scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    let out = run_scenario(&scenario).unwrap();
    print!("{}", witness_csv(&out.rows));
    for p in &out.graphs.points {
        if let Some(w) = &p.wire {
            println!("# {:?} = {:?}: wire graph has {} edges", p.parameter, p.value, w.edges.len());
        }
    }
}

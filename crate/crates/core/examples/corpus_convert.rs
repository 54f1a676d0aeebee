//! Convert a corpus into a directory of TAGbank files and print stats.
//!
//!     cargo run --example corpus_convert -- out_dir input.mrg...

use std::path::PathBuf;

use tagbank::pipeline::{cmd_convert, cmd_stats, RunConfig};
use tagbank::tables::RuleTables;

fn main() {
    let mut args = std::env::args().skip(1).map(PathBuf::from);
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("tagbank-example"));
    let mut inputs: Vec<PathBuf> = args.collect();
    if inputs.is_empty() {
        inputs.push(PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/vinken.mrg")));
    }
    std::fs::create_dir_all(&out).unwrap();

    let config = RunConfig {
        inputs: inputs.clone(),
        output: Some(out.clone()),
        jobs: 4,
        ..RunConfig::default()
    };
    let summary = cmd_convert(&config).unwrap();
    for f in &summary.failures {
        eprintln!("{}", f);
    }
    println!("wrote {} sentences into {}", summary.succeeded, out.display());
    println!("{}", cmd_stats(&inputs, &RuleTables::english(), 4).unwrap());
}

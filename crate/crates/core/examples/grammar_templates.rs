//! Count de-lexicalized elementary tree templates over a corpus.
//!
//!     cargo run --example grammar_templates -- corpus/*.mrg

use std::path::PathBuf;

use tagbank::pipeline::{cmd_grammar, render_grammar};
use tagbank::tables::RuleTables;

fn main() {
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        paths.push(PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/vinken.mrg")));
    }
    let (grammar, failures) = cmd_grammar(&paths, &RuleTables::english(), 2).unwrap();
    print!("{}", render_grammar(&grammar));
    println!(
        "{} instances, {} initial and {} auxiliary templates, start {:?}, {} failures",
        grammar.template_count(),
        grammar.initial.len(),
        grammar.auxiliary.len(),
        grammar.start,
        failures
    );
}

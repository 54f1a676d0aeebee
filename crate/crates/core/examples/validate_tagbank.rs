//! Validate a TAGbank file, or a damaged copy of the built-in example.

use tagbank::format::validate_file;

const GOLD: &str = include_str!("../tests/data/vinken_canonical.tagbank");

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        let text = std::fs::read_to_string(&path).expect("readable input");
        println!("{}", validate_file(&text));
        return;
    }
    println!("{}\n", validate_file(GOLD));
    let damaged = GOLD.replacen("\t9\tbeta\t(VP", "\t0\tbeta\t(VP", 1).replacen(")PP-CLR", ")PP", 1);
    println!("{}", validate_file(&damaged));
}

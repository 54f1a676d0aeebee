//! Normalize a tree and list the elementary tree anchored by each token.

use tagbank::etree::extract;
use tagbank::normalize::normalize;
use tagbank::tables::RuleTables;
use tagbank::tree::{parse_tree, serialize};

const VINKEN: &str = include_str!("../tests/data/vinken.mrg");

fn main() {
    let tables = RuleTables::english();
    let input = std::env::args().nth(1).unwrap_or_else(|| VINKEN.trim().to_string());
    let tree = parse_tree(&input).expect("one bracketed tree");
    let normalized = normalize(&tree, &tables).expect("non-empty sentence");
    println!("{}\n", serialize(&normalized));

    let ex = extract(&normalized, &tables);
    for et in &ex.etrees {
        println!("{:>2} {}", et.id, et);
    }
    println!();
    for r in &ex.records {
        println!("{:>2} -> {:>2} at {} {:?}", r.child, r.parent, r.address, r.attachment);
    }
}

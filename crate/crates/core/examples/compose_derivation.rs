//! Replay the extracted derivation, check it rebuilds the normalized tree,
//! and show the derivation tree and head column.

use tagbank::derive::{compose, heads_from_derivation, merge_span};
use tagbank::etree::extract;
use tagbank::normalize::normalize;
use tagbank::tables::RuleTables;
use tagbank::tree::{parse_tree, serialize};

const VINKEN: &str = include_str!("../tests/data/vinken.mrg");

fn main() {
    let tables = RuleTables::english();
    let tree = parse_tree(VINKEN.trim()).unwrap();
    let normalized = normalize(&tree, &tables).unwrap();
    let ex = extract(&normalized, &tables);

    let (derivation, derived) = compose(&ex.etrees, &ex.records).unwrap();
    println!("{}", derivation.dump());
    println!("derived: {}", serialize(&derived));
    println!("same as normalized: {}", derived == normalized);
    println!("heads: {:?}", heads_from_derivation(&derivation, &tables));

    // "years old" as one multi-anchor tree
    let merged = merge_span(&derivation, 5, 6).unwrap();
    println!("5-6: {}", merged);
}

//! Look up heads and argument roles with the built-in English tables.

use tagbank::tables::RuleTables;
use tagbank::tree::{parse_tree, Label};

fn main() {
    let tables = RuleTables::english();
    let cases = [
        ("NP", vec!["DT", "JJ", "NN"]),
        ("VP", vec!["MD", "VP"]),
        ("PP", vec!["IN", "NP"]),
        ("S", vec!["NP", "VP", "."]),
        ("ADJP", vec!["NP", "JJ"]),
    ];
    for (parent, kids) in cases {
        let h = tables.head_child(&Label::new(parent), &kids);
        println!("{:<5} -> {:<14} head {}", parent, kids.join(" "), kids[h]);
    }

    let vp = parse_tree("(VP (VB join) (NP (DT the) (NN board)) (NP-TMP (NNP Nov.) (CD 29)))").unwrap();
    let label = vp.label().unwrap().clone();
    for (i, child) in vp.children().iter().enumerate() {
        let role = tables.classify_child(&label, child, i == 0);
        println!("VP child {} ({}): {:?}", i, child.category(), role);
    }
}

//! Convert one sentence to TAGbank rows, in canonical and MWE form, and
//! read the output back.

use tagbank::format::{emit_canonical, emit_mwe, parse_tagbank};
use tagbank::pipeline::{convert_tree, MweLexicon};
use tagbank::tables::RuleTables;
use tagbank::tree::{parse_tree, serialize};

const VINKEN: &str = include_str!("../tests/data/vinken.mrg");

fn main() {
    let tables = RuleTables::english();
    let tree = parse_tree(VINKEN.trim()).unwrap();
    let c = convert_tree(&tree, &tables, false).unwrap();

    let canonical = emit_canonical([&c.rows]);
    print!("{}", canonical);

    let lexicon = MweLexicon::parse("years old\n").unwrap();
    let spans = lexicon.find_spans(&c.derived.tokens());
    print!("{}", emit_mwe(&c.rows, &spans).unwrap());

    let (rows, rebuilt) = parse_tagbank(&canonical).unwrap().remove(0);
    println!("{} rows read back", rows.rows.len());
    println!("{}", serialize(&rebuilt));
}

//! Read a bracketed corpus and print each tree back with its tokens.
//!
//!     cargo run --example read_trees -- path/to/file.mrg

use tagbank::tree::{parse_corpus_lenient, serialize};

const VINKEN: &str = include_str!("../tests/data/vinken.mrg");

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable input"),
        None => VINKEN.to_string(),
    };
    for (i, tree) in parse_corpus_lenient(&text).into_iter().enumerate() {
        match tree {
            Ok(t) => {
                println!("#{} {} tokens", i + 1, t.token_count());
                println!("{}", serialize(&t));
                println!("{}", t.tokens().join(" "));
            }
            Err(e) => println!("#{} {}: {}", i + 1, e.code(), e),
        }
    }
}

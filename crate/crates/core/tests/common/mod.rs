//! Shared fixtures: a seeded random treebank generator and a mutator for
//! TAGbank text.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use tagbank::tree::{parse_tree, SyntaxTree};

pub const VINKEN_MRG: &str = include_str!("../data/vinken.mrg");
pub const VINKEN_CANONICAL: &str = include_str!("../data/vinken_canonical.tagbank");
pub const VINKEN_MWE: &str = include_str!("../data/vinken_mwe.tagbank");

pub fn vinken() -> SyntaxTree {
    parse_tree(VINKEN_MRG.trim()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const WORDS: &[(&str, &[&str])] = &[
    ("NN", &["board", "director", "company", "market", "deal"]),
    ("NNS", &["years", "shares", "months", "investors"]),
    ("NNP", &["Pierre", "Vinken", "Elsevier", "Nov.", "Kim"]),
    ("DT", &["the", "a", "this"]),
    ("JJ", &["old", "nonexecutive", "new", "big"]),
    ("CD", &["61", "29", "three"]),
    ("VB", &["join", "buy", "sell"]),
    ("VBD", &["joined", "said", "rose"]),
    ("VBZ", &["is", "sleeps", "has"]),
    ("MD", &["will", "could"]),
    ("TO", &["to"]),
    ("IN", &["as", "of", "in", "that"]),
    ("RB", &["very", "also", "not"]),
    ("CC", &["and", "but"]),
    (",", &[","]),
    (".", &["."]),
];

fn word(rng: &mut ChaCha8Rng, pos: &str) -> String {
    let list = WORDS.iter().find(|(p, _)| *p == pos).map(|(_, w)| *w).unwrap();
    list.choose(rng).unwrap().to_string()
}

/// Expansion templates per category. Items are POS tags or phrase labels.
fn templates(cat: &str) -> &'static [&'static [&'static str]] {
    match cat {
        "S" => &[
            &["NP-SBJ", "VP"],
            &["NP-SBJ", "VP", "."],
            &["PP-LOC", ",", "NP-SBJ", "VP", "."],
            &["ADVP", "NP-SBJ", "VP"],
            &["S", ",", "CC", "S"],
            &["NP-SBJ", "ADVP", "VP", "."],
        ],
        "VP" => &[
            &["VB", "NP"],
            &["VBD", "NP", "PP-CLR"],
            &["MD", "VP"],
            &["VBZ", "ADJP-PRD"],
            &["VBD", "NP", "NP-TMP"],
            &["VBD", "SBAR"],
            &["VBD"],
            &["TO", "VP"],
            &["VBZ", "NP", "PP"],
            &["VBD", "ADVP"],
        ],
        "NP" => &[
            &["DT", "NN"],
            &["DT", "JJ", "NN"],
            &["NNP", "NNP"],
            &["NP", ",", "NP", ","],
            &["NP", "PP"],
            &["CD", "NNS"],
            &["NN"],
            &["DT", "ADJP", "NN"],
            &["NP", "CC", "NP"],
            &["NNP"],
            &["NP", ",", "ADJP", ","],
            &["JJ", "NNS"],
        ],
        "PP" => &[&["IN", "NP"]],
        "ADJP" => &[&["JJ"], &["RB", "JJ"], &["NP", "JJ"], &["JJ", "PP"]],
        "ADVP" => &[&["RB"], &["RB", "RB"]],
        "SBAR" => &[&["IN", "S"]],
        _ => &[],
    }
}

fn leaf_for(cat: &str) -> &'static str {
    match cat {
        "S" | "VP" => "VBZ",
        "NP" => "NN",
        "PP" => "IN",
        "ADJP" => "JJ",
        "ADVP" => "RB",
        "SBAR" => "IN",
        _ => "NN",
    }
}

fn gen(rng: &mut ChaCha8Rng, label: &str, depth: usize, budget: &mut usize, next: &mut usize) -> String {
    let cat = label.split('-').next().unwrap();
    let opts = templates(cat);
    if opts.is_empty() {
        *budget = budget.saturating_sub(1);
        *next += 1;
        return format!("({} {})", label, word(rng, label));
    }
    if depth > 4 || *budget < 2 {
        *budget = budget.saturating_sub(1);
        *next += 1;
        let pos = leaf_for(cat);
        return format!("({} ({} {}))", label, pos, word(rng, pos));
    }
    let template = opts.choose(rng).unwrap();
    let mut parts = Vec::new();
    // occasional empty element, as in real treebank data
    if rng.gen_ratio(1, 12) {
        parts.push("(-NONE- *T*-1)".to_string());
    }
    for item in template.iter() {
        parts.push(gen(rng, item, depth + 1, budget, next));
    }
    format!("({} {})", label, parts.join(" "))
}

/// A random sentence of at most `max_tokens` tokens.
pub fn random_tree(rng: &mut ChaCha8Rng, max_tokens: usize) -> SyntaxTree {
    loop {
        let mut budget = rng.gen_range(2..=max_tokens);
        let mut next = 0;
        let text = gen(rng, "S", 0, &mut budget, &mut next);
        let tree = parse_tree(&text).unwrap();
        if (1..=max_tokens).contains(&tree.token_count()) {
            return tree;
        }
    }
}

pub fn corpus(seed: u64, size: usize, max_tokens: usize) -> Vec<SyntaxTree> {
    let mut r = rng(seed);
    (0..size).map(|_| random_tree(&mut r, max_tokens)).collect()
}

/// Damage one field of one row so that a documented format constraint
/// no longer holds. Returns the new text and a description.
pub fn mutate(rng: &mut ChaCha8Rng, text: &str) -> (String, String) {
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let rows: Vec<usize> = (0..lines.len())
        .filter(|&i| !lines[i].is_empty() && !lines[i].starts_with('#') && !lines[i].split('\t').next().unwrap().contains('-'))
        .collect();
    let n = rows.len();
    let li = *rows.choose(rng).unwrap();
    let mut cols: Vec<String> = lines[li].split('\t').map(str::to_string).collect();
    let kind = rng.gen_range(0..11);
    let what = match kind {
        0 => {
            cols.pop();
            "drop column"
        }
        1 => {
            cols.push("extra".into());
            "extra column"
        }
        2 => {
            cols[0] = (n + rng.gen_range(1..5)).to_string();
            "index gap"
        }
        3 => {
            cols[3] = (n + rng.gen_range(1..5)).to_string();
            "head out of range"
        }
        4 => {
            if cols[3] == "0" {
                cols[3] = cols[0].clone();
                "root points at itself"
            } else {
                cols[3] = "0".into();
                "second root"
            }
        }
        5 => {
            cols[4] = ["gamma", "Alpha", "initial", "b"].choose(rng).unwrap().to_string();
            "unknown elem"
        }
        6 => {
            if cols[5] == "_" {
                cols[5] = "(NP".into();
            } else {
                cols[5] = cols[5].replacen('(', "(X", 1);
            }
            "opening bracket"
        }
        7 => {
            if cols[6] == "_" {
                cols[6] = ")NP".into();
            } else {
                let mut closers: Vec<&str> = cols[6].split(' ').collect();
                closers.pop();
                cols[6] = if closers.is_empty() { "_".into() } else { closers.join(" ") };
            }
            "closing bracket"
        }
        8 => {
            let c = rng.gen_range(0..7);
            cols[c] = String::new();
            "empty field"
        }
        9 => {
            let c = rng.gen_range(0..7);
            cols[c] = if rng.gen_bool(0.5) { format!(" {}", cols[c]) } else { format!("{} ", cols[c]) };
            "padded field"
        }
        _ => {
            cols[2] = "_".into();
            "missing pos"
        }
    };
    lines[li] = cols.join("\t");
    let mut out = lines.join("\n");
    out.push('\n');
    (out, format!("{} on line {}", what, li + 1))
}

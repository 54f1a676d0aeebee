mod common;

use proptest::prelude::*;

use common::*;
use tagbank::derive::{compose, merge_span, DerivationTree};
use tagbank::etree::TreeKind;
use tagbank::format::{apply_spans, emit_canonical, parse_tagbank, RowIndex, TagbankRow, TagbankSentence};
use tagbank::pipeline::convert_tree;
use tagbank::tables::RuleTables;
use tagbank::tree::{parse_tree, serialize};

fn label() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("S".to_string()),
        Just("NP".to_string()),
        Just("NP-SBJ".to_string()),
        Just("VP".to_string()),
        Just("PP-CLR".to_string()),
        Just("ADJP".to_string()),
    ]
}

/// Random rows whose brackets nest properly around the tokens.
fn sentence() -> impl Strategy<Value = TagbankSentence> {
    (1usize..10)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec("[a-z]{1,6}", n),
                proptest::collection::vec("[a-z]{2,3}", n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec((0usize..n, 0usize..n, label()), 0..6),
                0..n,
            )
        })
        .prop_map(|(n, lex, pos, kinds, phrases, root)| {
            let mut rows: Vec<TagbankRow> = (0..n)
                .map(|i| TagbankRow {
                    idx: RowIndex::Token(i + 1),
                    lex: lex[i].clone(),
                    pos: Some(pos[i].clone()),
                    hd: Some(if i == root { 0 } else { root + 1 }),
                    elem: Some(if kinds[i] { TreeKind::Alpha } else { TreeKind::Beta }),
                    rhs: Vec::new(),
                    lhs: Vec::new(),
                })
                .collect();
            // a root phrase plus properly nested spans
            let mut spans: Vec<(usize, usize, String)> = vec![(0, n - 1, "S".to_string())];
            for (a, b, l) in phrases {
                let (lo, hi) = (a.min(b), a.max(b));
                if spans.iter().all(|(x, y, _)| (lo >= *x && hi <= *y) || hi < *x || lo > *y || (lo <= *x && hi >= *y)) {
                    spans.push((lo, hi, l));
                }
            }
            spans.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            for (lo, _, l) in &spans {
                rows[*lo].rhs.push(l.clone());
            }
            let mut closing: Vec<(usize, &(usize, usize, String))> = spans.iter().enumerate().collect();
            closing.sort_by(|a, b| a.1 .1.cmp(&b.1 .1).then(b.0.cmp(&a.0)));
            for (_, (_, hi, l)) in closing {
                rows[*hi].lhs.push(l.clone());
            }
            TagbankSentence {
                comments: Vec::new(),
                rows,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parse_inverts_emit(sentences in proptest::collection::vec(sentence(), 0..4)) {
        let text = emit_canonical(&sentences);
        let parsed = parse_tagbank(&text).unwrap();
        let rows: Vec<TagbankSentence> = parsed.into_iter().map(|(s, _)| s).collect();
        prop_assert_eq!(rows, sentences);
    }

    #[test]
    fn synthetic_trees_round_trip(seed in 0u64..10_000) {
        let tables = RuleTables::english();
        let mut r = rng(seed);
        let t = random_tree(&mut r, 12);
        let c = convert_tree(&t, &tables, false).unwrap();
        prop_assert_eq!(&c.derived, &c.normalized);
        prop_assert_eq!(c.derivation.edges.len() + 1, c.derived.token_count());
    }
}

#[test]
fn mwe_erase_law() {
    let tables = RuleTables::english();
    for t in corpus(3, 100, 12).iter().chain([vinken()].iter()) {
        let c = convert_tree(t, &tables, false).unwrap();
        let n = c.rows.rows.len();
        for lo in 1..n {
            let Ok(mwe) = apply_spans(&c.rows, &[(lo, lo + 1)]) else { continue };
            let erased: Vec<TagbankRow> = mwe
                .rows
                .iter()
                .filter(|r| matches!(r.idx, RowIndex::Token(_)))
                .map(|r| {
                    let RowIndex::Token(i) = r.idx else { unreachable!() };
                    let canon = &c.rows.rows[i - 1];
                    TagbankRow {
                        elem: canon.elem,
                        hd: canon.hd,
                        ..r.clone()
                    }
                })
                .collect();
            let restored = TagbankSentence {
                comments: Vec::new(),
                rows: erased,
            };
            assert_eq!(emit_canonical(&[restored]), emit_canonical([&c.rows]));
        }
    }
}

#[test]
fn duplicated_corpus_doubles_grammar() {
    let tables = RuleTables::english();
    let trees = corpus(9, 30, 12);
    let mut once = tagbank::etree::ExtractedGrammar::default();
    let mut twice = tagbank::etree::ExtractedGrammar::default();
    for t in &trees {
        let c = convert_tree(t, &tables, false).unwrap();
        once.add_sentence(&c.extraction.etrees, Some(c.extraction.root));
        for _ in 0..2 {
            twice.add_sentence(&c.extraction.etrees, Some(c.extraction.root));
        }
    }
    let doubled: Vec<(String, usize)> = once.ranked().into_iter().map(|(t, n)| (t, 2 * n)).collect();
    assert_eq!(twice.ranked(), doubled);
}

#[test]
fn merged_unit_recomposes() {
    // a merged multi-anchor tree still yields the span's yield in order
    let tables = RuleTables::english();
    let c = convert_tree(&vinken(), &tables, false).unwrap();
    let d = DerivationTree::new(&c.extraction.etrees, &c.extraction.records).unwrap();
    for (lo, hi) in [(1, 2), (10, 11), (13, 15), (16, 17)] {
        let merged = merge_span(&d, lo, hi).unwrap();
        assert_eq!(merged.shape.anchors(), (lo..=hi).collect::<Vec<_>>(), "{}", merged);
    }
}

#[test]
fn traces_are_dropped_before_extraction() {
    let tables = RuleTables::english();
    let t = parse_tree("(S (NP-SBJ-1 (NNP Kim)) (VP (VBD tried) (S (NP-SBJ (-NONE- *-1)) (VP (TO to) (VP (VB sleep))))) (. .))").unwrap();
    let c = convert_tree(&t, &tables, false).unwrap();
    assert_eq!(c.derived.token_count(), 5);
    let (d, derived) = compose(&c.extraction.etrees, &c.extraction.records).unwrap();
    assert_eq!(derived, c.normalized);
    assert_eq!(d.edges.len(), 4);
    assert!(!serialize(&c.derived).contains("NONE"));
}

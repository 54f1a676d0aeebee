//! One pass/fail line per acceptance criterion. Runs as a plain binary so
//! the lines come out in a fixed order.

mod common;

use std::time::{Duration, Instant};

use itertools::Itertools;

use common::*;
use tagbank::derive::{compose_in_order, DerivationTree};
use tagbank::etree::{extract, TreeKind};
use tagbank::format::{apply_spans, as_emitted, emit_canonical, emit_sentence, linearize, parse_tagbank, validate_file};
use tagbank::normalize::normalize;
use tagbank::pipeline::{convert_tree, Converted, MweLexicon};
use tagbank::tables::RuleTables;
use tagbank::tree::SyntaxTree;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn first_diff(a: &str, b: &str) -> String {
    for (i, (x, y)) in a.lines().zip(b.lines()).enumerate() {
        if x != y {
            return format!("line {}: got {:?}, want {:?}", i + 1, x, y);
        }
    }
    format!("line counts differ: {} vs {}", a.lines().count(), b.lines().count())
}

fn convert_all(trees: &[SyntaxTree], tables: &RuleTables) -> Result<Vec<Converted>, String> {
    trees
        .iter()
        .enumerate()
        .map(|(i, t)| convert_tree(t, tables, false).map_err(|e| format!("sentence {}: {}", i + 1, e)))
        .collect()
}

fn vinken_gold(tables: &RuleTables) -> Check {
    let start = Instant::now();
    let c = convert_tree(&vinken(), tables, false).map_err(|e| e.to_string())?;
    let text = emit_canonical(&[c.rows]);
    let elapsed = start.elapsed();
    ensure(text == VINKEN_CANONICAL, || first_diff(&text, VINKEN_CANONICAL))?;
    ensure(elapsed < Duration::from_millis(50), || format!("took {:?}", elapsed))?;
    Ok(format!("18 rows byte-exact in {:?}", elapsed))
}

fn vinken_mwe(tables: &RuleTables) -> Check {
    let c = convert_tree(&vinken(), tables, false).map_err(|e| e.to_string())?;
    let lexicon = MweLexicon::parse("years old\n").unwrap();
    let spans = lexicon.find_spans(&c.derived.tokens());
    ensure(spans == vec![(5, 6)], || format!("spans {:?}", spans))?;
    let rows = apply_spans(&c.rows, &spans).map_err(|e| e.to_string())?;
    let mut text = String::new();
    emit_sentence(&rows, &mut text);
    ensure(text == VINKEN_MWE, || first_diff(&text, VINKEN_MWE))?;
    Ok("19 rows byte-exact, span row 5-6".into())
}

fn head_column(tables: &RuleTables) -> Check {
    let c = convert_tree(&vinken(), tables, false).map_err(|e| e.to_string())?;
    let want = vec![2, 9, 2, 5, 2, 5, 6, 9, 0, 11, 9, 9, 15, 15, 12, 9, 16, 9];
    ensure(c.heads == want, || format!("got {:?}", c.heads))?;
    Ok(format!("{:?}", c.heads))
}

fn elem_census(tables: &RuleTables) -> Check {
    let c = convert_tree(&vinken(), tables, false).map_err(|e| e.to_string())?;
    let alpha = c.extraction.etrees.iter().filter(|e| e.kind == TreeKind::Alpha).count();
    let beta = c.extraction.etrees.len() - alpha;
    ensure((alpha, beta) == (7, 11), || format!("{} alpha, {} beta", alpha, beta))?;
    Ok("7 alpha, 11 beta".into())
}

fn oracle_round_trip(tables: &RuleTables, corpus: &[SyntaxTree]) -> Check {
    let start = Instant::now();
    for (i, t) in corpus.iter().enumerate() {
        let n = normalize(t, tables).map_err(|e| format!("sentence {}: {}", i + 1, e))?;
        let ex = extract(&n, tables);
        let (_, derived) = tagbank::derive::compose(&ex.etrees, &ex.records)
            .map_err(|e| format!("sentence {}: {}", i + 1, e))?;
        ensure(derived == n, || format!("sentence {} differs: {}", i + 1, tagbank::serialize(t)))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {:?}", elapsed))?;
    Ok(format!("{}/{} sentences in {:?}", corpus.len(), corpus.len(), elapsed))
}

fn balance(tables: &RuleTables, suites: &[&[Converted]]) -> Check {
    let mut checked = 0;
    for suite in suites {
        for c in suite.iter() {
            let brackets = linearize(&c.derived);
            let opens: Vec<&String> = brackets.iter().flat_map(|(o, _)| o).sorted().collect();
            let closes: Vec<&String> = brackets.iter().flat_map(|(_, l)| l).sorted().collect();
            ensure(opens == closes, || format!("label multisets differ in {}", tagbank::serialize(&c.derived)))?;
            let text = emit_canonical([&c.rows]);
            let parsed = parse_tagbank(&text).map_err(|e| format!("{}: {}", e, text))?;
            ensure(parsed.len() == 1, || "sentence count".into())?;
            let (rows, tree) = &parsed[0];
            ensure(*rows == c.rows, || format!("rows differ after parse:\n{}", text))?;
            ensure(*tree == as_emitted(&c.derived, tables, false), || format!("tree differs:\n{}", text))?;
            ensure(emit_canonical([rows]) == text, || "re-emission differs".into())?;
            checked += 1;
        }
    }
    Ok(format!("{} sentences balanced, parse(emit) identity", checked))
}

fn ordering(tables: &RuleTables, small: &[SyntaxTree]) -> Check {
    let mut orders = 0usize;
    for (i, t) in small.iter().enumerate() {
        let n = normalize(t, tables).map_err(|e| e.to_string())?;
        let ex = extract(&n, tables);
        let d = DerivationTree::new(&ex.etrees, &ex.records).map_err(|e| e.to_string())?;
        let mut results = Vec::new();
        for perm in (0..d.edges.len()).permutations(d.edges.len()) {
            orders += 1;
            let r = compose_in_order(&d, &perm).map_err(|e| format!("sentence {} order {:?}: {}", i + 1, perm, e))?;
            if !results.contains(&r) {
                results.push(r);
            }
        }
        ensure(results.len() == 1, || format!("sentence {}: {} distinct trees", i + 1, results.len()))?;
        ensure(results[0] == n, || format!("sentence {}: result differs from normalized tree", i + 1))?;
    }
    Ok(format!("{} instances, {} orders, one tree each", small.len(), orders))
}

fn well_formed(suites: &[&[Converted]]) -> Check {
    let mut files = 0;
    let lexicon = MweLexicon::parse("years old\nthe board\nnew york\n").unwrap();
    for suite in suites {
        for c in suite.iter() {
            for et in &c.extraction.etrees {
                if et.kind == TreeKind::Beta {
                    let foot = et.foot().ok_or_else(|| format!("beta without foot: {}", et))?;
                    let cat = et.shape.node_at(&foot).unwrap().category().to_string();
                    ensure(cat == et.root_category(), || format!("foot {} under root {}", cat, et.root_category()))?;
                }
            }
            let roots = c.heads.iter().filter(|&&h| h == 0).count();
            ensure(roots == 1, || format!("{} roots in {:?}", roots, c.heads))?;
            for start in 0..c.heads.len() {
                let mut cur = start + 1;
                let mut steps = 0;
                while cur != 0 {
                    cur = c.heads[cur - 1];
                    steps += 1;
                    ensure(steps <= c.heads.len(), || format!("cycle in {:?}", c.heads))?;
                }
            }
            let canonical = emit_canonical([&c.rows]);
            let report = validate_file(&canonical);
            ensure(report.is_ok(), || format!("{}\n{}", report, canonical))?;
            let spans = lexicon.find_spans(&c.derived.tokens());
            let mut mwe = String::new();
            emit_sentence(&apply_spans(&c.rows, &spans).map_err(|e| e.to_string())?, &mut mwe);
            let report = validate_file(&mwe);
            ensure(report.is_ok(), || format!("{}\n{}", report, mwe))?;
            files += 2;
        }
    }

    let texts: Vec<String> = suites
        .iter()
        .flat_map(|s| s.iter())
        .map(|c| emit_canonical([&c.rows]))
        .collect();
    let mut r = rng(7);
    for case in 0..1000 {
        let text = &texts[case % texts.len()];
        let (bad, what) = mutate(&mut r, text);
        let report = validate_file(&bad);
        ensure(report.errors() > 0, || format!("mutation {} accepted: {}\n{}", case, what, bad))?;
    }
    Ok(format!("{} emitted files valid, 1000/1000 mutations rejected", files))
}

fn main() {
    let tables = RuleTables::english();
    let synthetic = corpus(42, 200, 12);
    let small = corpus(5, 150, 5);

    let vinken_suite = match convert_all(&[vinken()], &tables) {
        Ok(v) => v,
        Err(e) => panic!("{}", e),
    };
    let synthetic_suite = convert_all(&synthetic, &tables);
    let small_suite = convert_all(&small, &tables);

    let mut checks: Vec<(&str, Check)> = vec![
        ("vinken gold table", vinken_gold(&tables)),
        ("vinken mwe table", vinken_mwe(&tables)),
        ("head column", head_column(&tables)),
        ("elem census", elem_census(&tables)),
        ("oracle round trip", oracle_round_trip(&tables, &synthetic)),
    ];
    match (&synthetic_suite, &small_suite) {
        (Ok(a), Ok(b)) => {
            checks.push(("balance and emit/parse identity", balance(&tables, &[&vinken_suite, a, b])));
            checks.push(("operation order independence", ordering(&tables, &small)));
            checks.push(("well-formedness and validator fuzz", well_formed(&[&vinken_suite, a, b])));
        }
        (Err(e), _) | (_, Err(e)) => {
            for name in ["balance and emit/parse identity", "operation order independence", "well-formedness and validator fuzz"] {
                checks.push((name, Err(format!("conversion failed: {}", e))));
            }
        }
    }

    let mut failed = 0;
    for (name, result) in &checks {
        match result {
            Ok(detail) => println!("PASS  {}: {}", name, detail),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}: {}", name, why);
            }
        }
    }
    println!("{}/{} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

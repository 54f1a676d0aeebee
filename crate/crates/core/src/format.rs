//! The TAGbank tabular format: building rows from a derivation, writing
//! canonical and MWE-annotated text, reading it back, and validating it.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::derive::DerivationTree;
use crate::etree::TreeKind;
use crate::tables::RuleTables;
use crate::tree::{Label, SyntaxTree};

pub const EMPTY: &str = "_";
pub const COLUMNS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowIndex {
    Token(usize),
    Span(usize, usize),
}

impl fmt::Display for RowIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowIndex::Token(i) => write!(f, "{}", i),
            RowIndex::Span(i, j) => write!(f, "{}-{}", i, j),
        }
    }
}

/// One line of a TAGbank file. Empty fields are `None` or empty vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagbankRow {
    pub idx: RowIndex,
    pub lex: String,
    pub pos: Option<String>,
    pub hd: Option<usize>,
    pub elem: Option<TreeKind>,
    /// Labels opened before this token, outermost first.
    pub rhs: Vec<String>,
    /// Labels closed after this token, innermost first.
    pub lhs: Vec<String>,
}

impl TagbankRow {
    fn span(lo: usize, hi: usize, lex: String) -> Self {
        TagbankRow {
            idx: RowIndex::Span(lo, hi),
            lex,
            pos: None,
            hd: None,
            elem: None,
            rhs: Vec::new(),
            lhs: Vec::new(),
        }
    }
}

impl fmt::Display for TagbankRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |s: Option<String>| s.unwrap_or_else(|| EMPTY.to_string());
        let brackets = |v: &[String], mark: char| {
            if v.is_empty() {
                EMPTY.to_string()
            } else {
                v.iter().map(|l| format!("{}{}", mark, l)).collect::<Vec<_>>().join(" ")
            }
        };
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.idx,
            self.lex,
            opt(self.pos.clone()),
            opt(self.hd.map(|h| h.to_string())),
            opt(self.elem.map(|k| k.as_str().to_string())),
            brackets(&self.rhs, '('),
            brackets(&self.lhs, ')'),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagbankSentence {
    /// Comment lines without the leading `#`.
    pub comments: Vec<String>,
    pub rows: Vec<TagbankRow>,
}

impl TagbankSentence {
    pub fn tokens(&self) -> impl Iterator<Item = &TagbankRow> {
        self.rows.iter().filter(|r| matches!(r.idx, RowIndex::Token(_)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: expected 7 columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: bad index {value:?}")]
    BadIndex { line: usize, value: String },
    #[error("line {line}: bad {column} field {value:?}")]
    BadField {
        line: usize,
        column: &'static str,
        value: String,
    },
    #[error("sentence {sentence}: {message}")]
    UnbalancedFormat { sentence: usize, message: String },
    #[error("spans overlap: {0:?} and {1:?}")]
    OverlappingSpans((usize, usize), (usize, usize)),
    #[error("span {0}-{1} is outside the sentence")]
    SpanOutOfRange(usize, usize),
    #[error("span {0}-{1} would make the head column cyclic")]
    SpanHeadCycle(usize, usize),
}

/// Opening and closing labels per token for every phrase node of `tree`.
pub fn linearize(tree: &SyntaxTree) -> Vec<(Vec<String>, Vec<String>)> {
    fn go(t: &SyntaxTree, next: &mut usize, out: &mut [(Vec<String>, Vec<String>)]) {
        match t {
            SyntaxTree::PreTerminal { .. } => *next += 1,
            SyntaxTree::Phrase { label, children } => {
                if t.token_count() == 0 {
                    return;
                }
                out[*next].0.push(label.tagged());
                for c in children {
                    go(c, next, out);
                }
                out[*next - 1].1.push(label.tagged());
            }
        }
    }
    let mut out = vec![(Vec::new(), Vec::new()); tree.token_count()];
    go(tree, &mut 0, &mut out);
    out
}

/// Rows for one derived tree. Tokens are numbered by position.
pub fn build_rows(
    derived: &SyntaxTree,
    derivation: &DerivationTree,
    heads: &[usize],
    tables: &RuleTables,
    preserve_case: bool,
) -> TagbankSentence {
    let case = |s: &str| if preserve_case { s.to_string() } else { s.to_lowercase() };
    let brackets = linearize(derived);
    let rows = derived
        .preterminals()
        .into_iter()
        .zip(brackets)
        .enumerate()
        .map(|(i, (leaf, (rhs, lhs)))| {
            let (pos, token) = match leaf {
                SyntaxTree::PreTerminal { pos, token, .. } => (pos.as_str(), token.as_str()),
                SyntaxTree::Phrase { .. } => unreachable!("preterminals() yields leaves"),
            };
            TagbankRow {
                idx: RowIndex::Token(i + 1),
                lex: case(token),
                pos: Some(case(tables.output_pos(pos))),
                hd: heads.get(i).copied(),
                elem: derivation.nodes.get(&(i + 1)).map(|e| e.kind),
                rhs,
                lhs,
            }
        })
        .collect();
    TagbankSentence {
        comments: Vec::new(),
        rows,
    }
}

/// The tree a reader recovers from emitted rows: labels without
/// coindices, POS column tags uppercased, tokens lowercased by default.
pub fn as_emitted(tree: &SyntaxTree, tables: &RuleTables, preserve_case: bool) -> SyntaxTree {
    match tree {
        SyntaxTree::PreTerminal { pos, token, index } => {
            let shown = tables.output_pos(pos);
            SyntaxTree::PreTerminal {
                pos: shown.to_uppercase(),
                token: if preserve_case { token.clone() } else { token.to_lowercase() },
                index: *index,
            }
        }
        SyntaxTree::Phrase { label, children } => SyntaxTree::Phrase {
            label: Label {
                coindex: None,
                ..label.clone()
            },
            children: children.iter().map(|c| as_emitted(c, tables, preserve_case)).collect(),
        },
    }
}

pub fn emit_sentence(sentence: &TagbankSentence, out: &mut String) {
    for c in &sentence.comments {
        let _ = writeln!(out, "#{}", c);
    }
    for r in &sentence.rows {
        let _ = writeln!(out, "{}", r);
    }
    out.push('\n');
}

pub fn emit_canonical<'a>(sentences: impl IntoIterator<Item = &'a TagbankSentence>) -> String {
    let mut out = String::new();
    for s in sentences {
        emit_sentence(s, &mut out);
    }
    out
}

/// Add span rows for multiword expressions. Members after the first lose
/// their elem and point their head at the first member, which takes over
/// the head the span depends on.
pub fn apply_spans(
    sentence: &TagbankSentence,
    spans: &[(usize, usize)],
) -> Result<TagbankSentence, FormatError> {
    let n = sentence.tokens().count();
    let mut spans = spans.to_vec();
    spans.sort_unstable();
    for &(lo, hi) in &spans {
        if lo == 0 || lo >= hi || hi > n {
            return Err(FormatError::SpanOutOfRange(lo, hi));
        }
    }
    for w in spans.windows(2) {
        if w[1].0 <= w[0].1 {
            return Err(FormatError::OverlappingSpans(w[0], w[1]));
        }
    }
    if spans.is_empty() {
        return Ok(sentence.clone());
    }
    let lex: Vec<&str> = sentence.tokens().map(|r| r.lex.as_str()).collect();
    let old: Vec<Option<usize>> = sentence.tokens().map(|r| r.hd).collect();
    let mut heads = old.clone();
    for &(lo, hi) in &spans {
        // the first member inherits the head the span as a whole hangs from
        let mut h = old[lo - 1];
        let mut steps = 0;
        while let Some(x) = h.filter(|x| (lo..=hi).contains(x)) {
            h = old[x - 1];
            steps += 1;
            if steps > n {
                return Err(FormatError::SpanHeadCycle(lo, hi));
            }
        }
        heads[lo - 1] = h;
        for i in lo + 1..=hi {
            heads[i - 1] = Some(lo);
        }
    }
    let points_up = |i: usize| matches!(heads[i - 1], Some(h) if h > 0);
    for start in 1..=n {
        let mut cur = start;
        for _ in 0..=n {
            if !points_up(cur) {
                break;
            }
            cur = heads[cur - 1].unwrap();
        }
        if points_up(cur) {
            let (lo, hi) = spans[0];
            return Err(FormatError::SpanHeadCycle(lo, hi));
        }
    }
    let mut rows = Vec::with_capacity(sentence.rows.len() + spans.len());
    for r in &sentence.rows {
        let mut r = r.clone();
        if let RowIndex::Token(i) = r.idx {
            if let Some(&(lo, hi)) = spans.iter().find(|(lo, hi)| (*lo..=*hi).contains(&i)) {
                if i == lo {
                    rows.push(TagbankRow::span(lo, hi, lex[lo - 1..hi].join(" ")));
                } else {
                    r.elem = None;
                }
                r.hd = heads[i - 1];
            }
        }
        rows.push(r);
    }
    Ok(TagbankSentence {
        comments: sentence.comments.clone(),
        rows,
    })
}

pub fn emit_mwe(sentence: &TagbankSentence, spans: &[(usize, usize)]) -> Result<String, FormatError> {
    let mut out = String::new();
    emit_sentence(&apply_spans(sentence, spans)?, &mut out);
    Ok(out)
}

/// Lines of each sentence with 1-based line numbers; comments included.
fn sentence_blocks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut blocks = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        blocks.push(cur);
    }
    blocks
}

fn parse_idx(s: &str) -> Option<RowIndex> {
    let num = |t: &str| -> Option<usize> {
        if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
            t.parse().ok().filter(|&v| v > 0)
        } else {
            None
        }
    };
    match s.split_once('-') {
        None => num(s).map(RowIndex::Token),
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            (a < b).then_some(RowIndex::Span(a, b))
        }
    }
}

fn parse_brackets(s: &str, mark: char) -> Option<Vec<String>> {
    if s == EMPTY {
        return Some(Vec::new());
    }
    s.split(' ')
        .map(|t| {
            let rest = t.strip_prefix(mark)?;
            let label = Label::parse(rest)?;
            (label.coindex.is_none() && label.tagged() == rest).then(|| rest.to_string())
        })
        .collect()
}

fn parse_row(line: usize, text: &str) -> Result<TagbankRow, FormatError> {
    let cols: Vec<&str> = text.split('\t').collect();
    if cols.len() != COLUMNS {
        return Err(FormatError::ColumnCount {
            line,
            found: cols.len(),
        });
    }
    let bad = |column: &'static str, value: &str| FormatError::BadField {
        line,
        column,
        value: value.to_string(),
    };
    let idx = parse_idx(cols[0]).ok_or_else(|| FormatError::BadIndex {
        line,
        value: cols[0].to_string(),
    })?;
    if cols[1].is_empty() || cols[1].trim() != cols[1] {
        return Err(bad("lex", cols[1]));
    }
    let opt = |v: &str| (v != EMPTY).then(|| v.to_string());
    let hd = match cols[3] {
        EMPTY => None,
        v => Some(v.parse::<usize>().map_err(|_| bad("hd", v))?),
    };
    let elem = match cols[4] {
        EMPTY => None,
        "alpha" => Some(TreeKind::Alpha),
        "beta" => Some(TreeKind::Beta),
        v => return Err(bad("elem", v)),
    };
    if cols[2].is_empty() || cols[2].contains(char::is_whitespace) {
        return Err(bad("pos", cols[2]));
    }
    Ok(TagbankRow {
        idx,
        lex: cols[1].to_string(),
        pos: opt(cols[2]),
        hd,
        elem,
        rhs: parse_brackets(cols[5], '(').ok_or_else(|| bad("rhs", cols[5]))?,
        lhs: parse_brackets(cols[6], ')').ok_or_else(|| bad("lhs", cols[6]))?,
    })
}

/// Rebuild the bracketed tree from the rhs/token/lhs interleaving.
fn reconstruct(sentence_no: usize, rows: &[TagbankRow]) -> Result<SyntaxTree, FormatError> {
    let unbalanced = |message: String| FormatError::UnbalancedFormat {
        sentence: sentence_no,
        message,
    };
    let mut stack: Vec<(Label, Vec<SyntaxTree>)> = Vec::new();
    let mut top: Vec<SyntaxTree> = Vec::new();
    for r in rows {
        let RowIndex::Token(i) = r.idx else { continue };
        for l in &r.rhs {
            stack.push((Label::parse(l).expect("checked by parse_row"), Vec::new()));
        }
        let pos = r.pos.as_deref().unwrap_or(EMPTY).to_uppercase();
        let leaf = SyntaxTree::leaf(pos, r.lex.clone(), i);
        match stack.last_mut() {
            Some((_, kids)) => kids.push(leaf),
            None => top.push(leaf),
        }
        for l in &r.lhs {
            let (label, kids) = stack
                .pop()
                .ok_or_else(|| unbalanced(format!("token {} closes {} with nothing open", i, l)))?;
            if label.tagged() != *l {
                return Err(unbalanced(format!("token {} closes {} but {} is open", i, l, label.tagged())));
            }
            let node = SyntaxTree::phrase(label, kids);
            match stack.last_mut() {
                Some((_, k)) => k.push(node),
                None => top.push(node),
            }
        }
    }
    if let Some((label, _)) = stack.last() {
        return Err(unbalanced(format!("{} is never closed", label.tagged())));
    }
    if top.len() != 1 {
        return Err(unbalanced(format!("{} top-level constituents", top.len())));
    }
    Ok(top.pop().unwrap())
}

/// Read TAGbank text back into rows and the bracketed tree per sentence.
pub fn parse_tagbank(text: &str) -> Result<Vec<(TagbankSentence, SyntaxTree)>, FormatError> {
    let mut out = Vec::new();
    for (s, block) in sentence_blocks(text).into_iter().enumerate() {
        let mut sentence = TagbankSentence::default();
        for (line, t) in block {
            match t.strip_prefix('#') {
                Some(c) => sentence.comments.push(c.to_string()),
                None => sentence.rows.push(parse_row(line, t)?),
            }
        }
        if sentence.rows.is_empty() {
            continue;
        }
        let tree = reconstruct(s + 1, &sentence.rows)?;
        out.push((sentence, tree));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub line: usize,
    pub severity: Severity,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub sentences: usize,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> usize {
        self.findings.len() - self.errors()
    }

    pub fn is_ok(&self) -> bool {
        self.errors() == 0
    }

    pub fn has(&self, message: &str) -> bool {
        self.findings.iter().any(|f| f.message.starts_with(message))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.findings {
            let sev = match x.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "line {}: {}: {}", x.line, sev, x.message)?;
        }
        write!(
            f,
            "{} sentences, {} errors, {} warnings",
            self.sentences,
            self.errors(),
            self.warnings()
        )
    }
}

struct Checker {
    findings: Vec<Finding>,
}

impl Checker {
    fn error(&mut self, line: usize, message: impl Into<String>) {
        self.findings.push(Finding {
            line,
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn warn(&mut self, line: usize, message: impl Into<String>) {
        self.findings.push(Finding {
            line,
            severity: Severity::Warning,
            message: message.into(),
        });
    }

    fn sentence(&mut self, block: &[(usize, &str)]) {
        struct Tok<'a> {
            line: usize,
            idx: usize,
            hd: &'a str,
            elem: &'a str,
            rhs: &'a str,
            lhs: &'a str,
        }
        let first_line = block[0].0;
        let mut toks: Vec<Tok> = Vec::new();
        let mut spans: Vec<(usize, usize, usize, usize)> = Vec::new();
        for &(line, text) in block {
            if text.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = text.split('\t').collect();
            if cols.len() != COLUMNS {
                self.error(line, format!("column count: expected {}, found {}", COLUMNS, cols.len()));
                continue;
            }
            for (c, v) in cols.iter().enumerate() {
                if v.is_empty() {
                    self.error(line, format!("empty field in column {}", c + 1));
                } else if v.trim() != *v || v.contains(['\r', '\n']) {
                    self.error(line, format!("whitespace around field in column {}", c + 1));
                } else if c != 1 && c < 5 && v.contains(char::is_whitespace) {
                    self.error(line, format!("whitespace inside field in column {}", c + 1));
                }
            }
            for c in [1, 2] {
                if cols[c].chars().any(char::is_uppercase) {
                    self.warn(line, format!("not lowercase: {}", cols[c]));
                }
            }
            match parse_idx(cols[0]) {
                None => self.error(line, format!("bad index {:?}", cols[0])),
                Some(RowIndex::Span(lo, hi)) => {
                    if cols[2..].iter().any(|v| *v != EMPTY) {
                        self.error(line, "span row carries token fields");
                    }
                    spans.push((lo, hi, line, toks.len()));
                }
                Some(RowIndex::Token(idx)) => {
                    if cols[2] == EMPTY {
                        self.error(line, "missing pos");
                    }
                    toks.push(Tok {
                        line,
                        idx,
                        hd: cols[3],
                        elem: cols[4],
                        rhs: cols[5],
                        lhs: cols[6],
                    })
                }
            }
        }
        let n = toks.len();
        if let Some(t) = toks.iter().enumerate().find(|(i, t)| t.idx != i + 1) {
            self.error(t.1.line, format!("index gap: expected {}, found {}", t.0 + 1, t.1.idx));
        }

        let mut continuation = BTreeSet::new();
        let mut prev_hi = 0;
        for &(lo, hi, line, before) in &spans {
            if hi > n {
                self.error(line, format!("bad span {}-{}: sentence has {} tokens", lo, hi, n));
            }
            if lo <= prev_hi {
                self.error(line, format!("overlapping span {}-{}", lo, hi));
            }
            if before + 1 != lo {
                self.error(line, format!("misplaced span row {}-{}", lo, hi));
            }
            prev_hi = prev_hi.max(hi);
            continuation.extend(lo + 1..=hi);
        }

        let mut heads: Vec<Option<usize>> = Vec::with_capacity(n);
        for t in &toks {
            let h = match t.hd.parse::<usize>() {
                Ok(h) if h <= n => Some(h),
                Ok(h) => {
                    self.error(t.line, format!("head out of range: {} (sentence has {} tokens)", h, n));
                    None
                }
                Err(_) => {
                    self.error(t.line, format!("bad head {:?}", t.hd));
                    None
                }
            };
            heads.push(h);
            match t.elem {
                "alpha" | "beta" => {}
                EMPTY if continuation.contains(&t.idx) => {}
                EMPTY => self.error(t.line, "missing elem"),
                v => self.error(t.line, format!("unknown elem {:?}", v)),
            }
        }
        let roots = heads.iter().filter(|h| **h == Some(0)).count();
        if n > 0 && roots == 0 {
            self.error(first_line, "no root: no token has head 0");
        } else if roots > 1 {
            self.error(first_line, format!("multiple roots: {} tokens have head 0", roots));
        }
        'cycles: for (start, tok) in toks.iter().enumerate() {
            let mut cur = start;
            for _ in 0..=n {
                match heads[cur] {
                    Some(h) if h > 0 => cur = h - 1,
                    _ => continue 'cycles,
                }
            }
            self.error(tok.line, format!("head cycle through token {}", start + 1));
            break;
        }

        let mut stack: Vec<&str> = Vec::new();
        let mut top_items = 0;
        let mut broken = false;
        for t in &toks {
            let opens = if t.rhs == EMPTY { Vec::new() } else { t.rhs.split(' ').collect() };
            let closes = if t.lhs == EMPTY { Vec::new() } else { t.lhs.split(' ').collect() };
            if stack.is_empty() {
                top_items += 1;
            }
            for o in opens {
                match o.strip_prefix('(').filter(|l| Label::parse(l).is_some()) {
                    Some(l) => stack.push(l),
                    None => {
                        self.error(t.line, format!("bad bracket {:?}", o));
                        broken = true;
                    }
                }
            }
            for c in closes {
                let Some(l) = c.strip_prefix(')').filter(|l| Label::parse(l).is_some()) else {
                    self.error(t.line, format!("bad bracket {:?}", c));
                    broken = true;
                    continue;
                };
                match stack.pop() {
                    None => {
                        self.error(t.line, format!("unbalanced brackets: ){} closes nothing", l));
                        broken = true;
                    }
                    Some(open) if open != l => {
                        self.error(t.line, format!("mismatched bracket: ){} closes ({}", l, open));
                        broken = true;
                    }
                    Some(_) => {}
                }
            }
        }
        if let Some(open) = stack.last() {
            self.error(first_line, format!("unbalanced brackets: ({} is never closed", open));
        } else if !broken && top_items > 1 {
            self.error(first_line, format!("bracketing is not a single tree: {} top-level items", top_items));
        }
    }
}

/// Check TAGbank text and report every problem found.
pub fn validate_file(text: &str) -> ValidationReport {
    let mut checker = Checker { findings: Vec::new() };
    let blocks = sentence_blocks(text);
    let mut sentences = 0;
    for block in &blocks {
        if block.iter().all(|(_, t)| t.starts_with('#')) {
            continue;
        }
        sentences += 1;
        checker.sentence(block);
    }
    ValidationReport {
        sentences,
        findings: checker.findings,
    }
}

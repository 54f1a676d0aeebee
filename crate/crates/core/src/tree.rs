//! Penn-Treebank-style bracketed constituency trees.

use std::fmt;

use thiserror::Error;

/// Function tags recognised when splitting a label on `-`.
///
/// Suffixes outside this inventory stay part of the category, so labels
/// such as `-LRB-` or `WHADVP-X` survive intact.
pub const FUNCTION_TAGS: &[&str] = &[
    "ADV", "BNF", "CLF", "CLR", "DIR", "DTV", "ETC", "EXT", "HLN", "IMP", "LGS", "LOC", "MNR",
    "NOM", "OBJ", "PRD", "PRP", "PUT", "SBJ", "SEZ", "TMP", "TPC", "TTL", "UNF", "VOC",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unbalanced brackets at byte {position}")]
    UnbalancedBrackets { position: usize },
    #[error("empty phrase at byte {position}")]
    EmptyPhrase { position: usize },
    #[error("bad label {label:?} at byte {position}")]
    BadLabel { position: usize, label: String },
    #[error("unexpected atom {atom:?} at byte {position}")]
    UnexpectedAtom { position: usize, atom: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::UnbalancedBrackets { position }
            | ParseError::EmptyPhrase { position }
            | ParseError::BadLabel { position, .. }
            | ParseError::UnexpectedAtom { position, .. } => *position,
        }
    }

    /// Short machine-readable code used in corpus logs.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::UnbalancedBrackets { .. } => "UnbalancedBrackets",
            ParseError::EmptyPhrase { .. } => "EmptyPhrase",
            ParseError::BadLabel { .. } => "BadLabel",
            ParseError::UnexpectedAtom { .. } => "UnexpectedAtom",
        }
    }
}

/// A phrase label: category, function tags and an optional coindex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub category: String,
    pub ftags: Vec<String>,
    pub coindex: Option<u32>,
}

impl Label {
    pub fn new(category: impl Into<String>) -> Self {
        Label {
            category: category.into(),
            ftags: Vec::new(),
            coindex: None,
        }
    }

    pub fn with_ftags<I, S>(mut self, ftags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.ftags = ftags.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_coindex(mut self, coindex: u32) -> Self {
        self.coindex = Some(coindex);
        self
    }

    /// Split a raw label such as `NP-SBJ-1` into its parts.
    ///
    /// Returns `None` when the category would be empty or contains
    /// whitespace or brackets.
    pub fn parse(raw: &str) -> Option<Label> {
        if raw.is_empty() || raw.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
            return None;
        }
        // -NONE-, -LRB-, -RRB- and friends.
        if raw.len() > 2 && raw.starts_with('-') && raw.ends_with('-') {
            return Some(Label::new(raw));
        }
        let mut segments: Vec<&str> = raw.split('-').collect();
        if segments[0].is_empty() {
            return None;
        }
        let mut coindex = None;
        if segments.len() > 1 {
            let last = segments[segments.len() - 1];
            if !last.is_empty() && last.bytes().all(|b| b.is_ascii_digit()) {
                coindex = last.parse().ok();
                segments.pop();
            }
        }
        let mut category = segments[0].to_string();
        let mut ftags = Vec::new();
        for seg in &segments[1..] {
            if seg.is_empty() {
                return None;
            }
            if FUNCTION_TAGS.contains(seg) {
                ftags.push(seg.to_string());
            } else if ftags.is_empty() {
                category.push('-');
                category.push_str(seg);
            } else {
                // unknown suffix after a function tag: keep it as a tag
                ftags.push(seg.to_string());
            }
        }
        Some(Label {
            category,
            ftags,
            coindex,
        })
    }

    /// Category plus function tags, without the coindex (`NP-SBJ`).
    pub fn tagged(&self) -> String {
        let mut s = self.category.clone();
        for t in &self.ftags {
            s.push('-');
            s.push_str(t);
        }
        s
    }

    pub fn has_ftag(&self, tag: &str) -> bool {
        self.ftags.iter().any(|t| t == tag)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.category)?;
        for t in &self.ftags {
            write!(f, "-{}", t)?;
        }
        if let Some(i) = self.coindex {
            write!(f, "-{}", i)?;
        }
        Ok(())
    }
}

/// A constituency tree node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SyntaxTree {
    Phrase {
        label: Label,
        children: Vec<SyntaxTree>,
    },
    PreTerminal {
        pos: String,
        token: String,
        /// 1-based position of the token in its sentence.
        index: usize,
    },
}

/// Path of 0-based child indices from the root; empty means the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GornAddress(pub Vec<usize>);

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        GornAddress(p)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parent(&self) -> Option<GornAddress> {
        if self.0.is_empty() {
            None
        } else {
            Some(GornAddress(self.0[..self.0.len() - 1].to_vec()))
        }
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl SyntaxTree {
    pub fn phrase(label: Label, children: Vec<SyntaxTree>) -> Self {
        SyntaxTree::Phrase { label, children }
    }

    pub fn leaf(pos: impl Into<String>, token: impl Into<String>, index: usize) -> Self {
        SyntaxTree::PreTerminal {
            pos: pos.into(),
            token: token.into(),
            index,
        }
    }

    pub fn is_preterminal(&self) -> bool {
        matches!(self, SyntaxTree::PreTerminal { .. })
    }

    pub fn label(&self) -> Option<&Label> {
        match self {
            SyntaxTree::Phrase { label, .. } => Some(label),
            SyntaxTree::PreTerminal { .. } => None,
        }
    }

    /// Bare category: phrase category or POS tag.
    pub fn category(&self) -> &str {
        match self {
            SyntaxTree::Phrase { label, .. } => &label.category,
            SyntaxTree::PreTerminal { pos, .. } => pos,
        }
    }

    pub fn children(&self) -> &[SyntaxTree] {
        match self {
            SyntaxTree::Phrase { children, .. } => children,
            SyntaxTree::PreTerminal { .. } => &[],
        }
    }

    pub fn children_mut(&mut self) -> Option<&mut Vec<SyntaxTree>> {
        match self {
            SyntaxTree::Phrase { children, .. } => Some(children),
            SyntaxTree::PreTerminal { .. } => None,
        }
    }

    /// Pre-terminals in left-to-right order.
    pub fn preterminals(&self) -> Vec<&SyntaxTree> {
        let mut out = Vec::new();
        self.collect_preterminals(&mut out);
        out
    }

    fn collect_preterminals<'a>(&'a self, out: &mut Vec<&'a SyntaxTree>) {
        match self {
            SyntaxTree::PreTerminal { .. } => out.push(self),
            SyntaxTree::Phrase { children, .. } => {
                for c in children {
                    c.collect_preterminals(out);
                }
            }
        }
    }

    /// Surface tokens in order.
    pub fn tokens(&self) -> Vec<&str> {
        self.preterminals()
            .into_iter()
            .map(|p| match p {
                SyntaxTree::PreTerminal { token, .. } => token.as_str(),
                SyntaxTree::Phrase { .. } => unreachable!(),
            })
            .collect()
    }

    pub fn token_count(&self) -> usize {
        match self {
            SyntaxTree::PreTerminal { .. } => 1,
            SyntaxTree::Phrase { children, .. } => children.iter().map(|c| c.token_count()).sum(),
        }
    }

    pub fn first_index(&self) -> Option<usize> {
        match self {
            SyntaxTree::PreTerminal { index, .. } => Some(*index),
            SyntaxTree::Phrase { children, .. } => children.iter().find_map(|c| c.first_index()),
        }
    }

    pub fn last_index(&self) -> Option<usize> {
        match self {
            SyntaxTree::PreTerminal { index, .. } => Some(*index),
            SyntaxTree::Phrase { children, .. } => {
                children.iter().rev().find_map(|c| c.last_index())
            }
        }
    }

    /// Reassign token indices 1..n left to right.
    pub fn renumber(&mut self) {
        fn go(t: &mut SyntaxTree, next: &mut usize) {
            match t {
                SyntaxTree::PreTerminal { index, .. } => {
                    *index = *next;
                    *next += 1;
                }
                SyntaxTree::Phrase { children, .. } => {
                    for c in children {
                        go(c, next);
                    }
                }
            }
        }
        let mut next = 1;
        go(self, &mut next);
    }

    pub fn node_at(&self, addr: &GornAddress) -> Option<&SyntaxTree> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn node_at_mut(&mut self, addr: &GornAddress) -> Option<&mut SyntaxTree> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = cur.children_mut()?.get_mut(i)?;
        }
        Some(cur)
    }

    /// Number of nodes, pre-terminals included.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Copy of the tree with every token lowercased.
    pub fn lowercased(&self) -> SyntaxTree {
        match self {
            SyntaxTree::PreTerminal { pos, token, index } => SyntaxTree::PreTerminal {
                pos: pos.clone(),
                token: token.to_lowercase(),
                index: *index,
            },
            SyntaxTree::Phrase { label, children } => SyntaxTree::Phrase {
                label: label.clone(),
                children: children.iter().map(|c| c.lowercased()).collect(),
            },
        }
    }
}

/// Single-line bracketed rendering.
pub fn serialize(tree: &SyntaxTree) -> String {
    let mut out = String::new();
    write_tree(tree, &mut out);
    out
}

fn write_tree(tree: &SyntaxTree, out: &mut String) {
    match tree {
        SyntaxTree::PreTerminal { pos, token, .. } => {
            out.push('(');
            out.push_str(pos);
            out.push(' ');
            out.push_str(token);
            out.push(')');
        }
        SyntaxTree::Phrase { label, children } => {
            out.push('(');
            out.push_str(&label.to_string());
            for c in children {
                out.push(' ');
                write_tree(c, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn tokenize(text: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut depth = 0usize;
    let mut line_start = true;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if line_start && depth == 0 && b == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        match b {
            b'(' => {
                toks.push(Tok::Open(i));
                depth += 1;
                i += 1;
            }
            b')' => {
                toks.push(Tok::Close(i));
                depth = depth.saturating_sub(1);
                i += 1;
            }
            _ => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i];
                    if c == b'(' || c == b')' || c.is_ascii_whitespace() {
                        break;
                    }
                    i += 1;
                }
                toks.push(Tok::Atom(start, &text[start..i]));
            }
        }
    }
    toks
}

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos)
    }

    fn parse_node(&mut self) -> Result<SyntaxTree, ParseError> {
        let open = match self.toks.get(self.pos) {
            Some(Tok::Open(p)) => *p,
            Some(Tok::Close(p)) => return Err(ParseError::UnbalancedBrackets { position: *p }),
            Some(Tok::Atom(p, a)) => {
                return Err(ParseError::UnexpectedAtom {
                    position: *p,
                    atom: a.to_string(),
                })
            }
            None => return Err(ParseError::UnbalancedBrackets { position: self.end }),
        };
        self.pos += 1;
        let raw_label = match self.peek() {
            Some(Tok::Atom(_, a)) => {
                let a = *a;
                self.pos += 1;
                Some(a)
            }
            _ => None,
        };
        // (TAG token)
        if let (Some(pos_tag), Some(Tok::Atom(_, word))) = (raw_label, self.peek().cloned()) {
            self.pos += 1;
            return match self.peek() {
                Some(Tok::Close(_)) => {
                    self.pos += 1;
                    Ok(SyntaxTree::PreTerminal {
                        pos: pos_tag.to_string(),
                        token: word.to_string(),
                        index: 0,
                    })
                }
                Some(Tok::Atom(p, a)) => Err(ParseError::UnexpectedAtom {
                    position: *p,
                    atom: a.to_string(),
                }),
                Some(Tok::Open(p)) => Err(ParseError::UnexpectedAtom {
                    position: *p,
                    atom: word.to_string(),
                }),
                None => Err(ParseError::UnbalancedBrackets { position: self.end }),
            };
        }
        let mut children = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Close(_)) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Open(_)) => children.push(self.parse_node()?),
                Some(Tok::Atom(p, a)) => {
                    return Err(ParseError::UnexpectedAtom {
                        position: *p,
                        atom: a.to_string(),
                    })
                }
                None => return Err(ParseError::UnbalancedBrackets { position: open }),
            }
        }
        match raw_label {
            None => {
                // anonymous outer wrapper "( (S ...) )"
                if children.len() == 1 {
                    Ok(children.pop().unwrap())
                } else if children.is_empty() {
                    Err(ParseError::EmptyPhrase { position: open })
                } else {
                    Err(ParseError::BadLabel {
                        position: open,
                        label: String::new(),
                    })
                }
            }
            Some(raw) => {
                if children.is_empty() {
                    return Err(ParseError::EmptyPhrase { position: open });
                }
                let label = Label::parse(raw).ok_or_else(|| ParseError::BadLabel {
                    position: open + 1,
                    label: raw.to_string(),
                })?;
                Ok(SyntaxTree::Phrase { label, children })
            }
        }
    }
}

/// Parse one bracketed tree; trailing material is an error.
pub fn parse_tree(text: &str) -> Result<SyntaxTree, ParseError> {
    let mut trees = parse_corpus(text)?;
    match trees.len() {
        1 => Ok(trees.pop().unwrap()),
        0 => Err(ParseError::EmptyPhrase { position: 0 }),
        _ => Err(ParseError::UnexpectedAtom {
            position: 0,
            atom: "(".into(),
        }),
    }
}

/// Parse every top-level bracketing in `text`.
pub fn parse_corpus(text: &str) -> Result<Vec<SyntaxTree>, ParseError> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
        end: text.len(),
    };
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        let mut t = p.parse_node()?;
        t.renumber();
        out.push(t);
    }
    Ok(out)
}

/// Raw top-level tree chunk with its starting byte offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSource<'a> {
    pub offset: usize,
    pub text: &'a str,
}

/// Split a corpus into top-level bracketings without parsing them.
///
/// An opening bracket in column 0 while a tree is still open starts a new
/// chunk, so one unclosed tree cannot swallow its neighbours.
pub fn split_trees(text: &str) -> Vec<TreeSource<'_>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut depth: i64 = 0;
    let mut start: Option<usize> = None;
    let mut line_start = true;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        let at_col0 = line_start && (i == 0 || bytes[i - 1] == b'\n');
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if line_start && depth == 0 && start.is_none() && b == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        match b {
            b'(' => {
                if at_col0 && depth > 0 {
                    if let Some(s) = start.take() {
                        out.push(TreeSource {
                            offset: s,
                            text: &text[s..i],
                        });
                    }
                    depth = 0;
                }
                if start.is_none() {
                    start = Some(i);
                }
                depth += 1;
            }
            b')' => {
                depth -= 1;
                if depth <= 0 {
                    let s = start.take().unwrap_or(i);
                    out.push(TreeSource {
                        offset: s,
                        text: &text[s..=i],
                    });
                    depth = 0;
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
        i += 1;
    }
    if let Some(s) = start {
        out.push(TreeSource {
            offset: s,
            text: &text[s..],
        });
    }
    out
}

/// Parse each top-level tree independently; errors are reported per tree
/// with positions relative to the whole text.
pub fn parse_corpus_lenient(text: &str) -> Vec<Result<SyntaxTree, ParseError>> {
    split_trees(text)
        .into_iter()
        .map(|src| {
            parse_tree(src.text).map_err(|e| shift(e, src.offset))
        })
        .collect()
}

fn shift(e: ParseError, by: usize) -> ParseError {
    match e {
        ParseError::UnbalancedBrackets { position } => ParseError::UnbalancedBrackets {
            position: position + by,
        },
        ParseError::EmptyPhrase { position } => ParseError::EmptyPhrase {
            position: position + by,
        },
        ParseError::BadLabel { position, label } => ParseError::BadLabel {
            position: position + by,
            label,
        },
        ParseError::UnexpectedAtom { position, atom } => ParseError::UnexpectedAtom {
            position: position + by,
            atom,
        },
    }
}

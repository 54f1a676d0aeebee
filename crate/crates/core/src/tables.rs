//! Head-percolation, argument/modifier and tagset-mapping tables.
//!
//! All three tables live in plain-text files, one rule per line, so new
//! languages or treebank conventions need no code changes. English defaults
//! are embedded in the binary and can be written out with [`dump_defaults`].

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::tree::{Label, SyntaxTree};

pub const DEFAULT_HEAD_RULES: &str = include_str!("../data/head_rules.txt");
pub const DEFAULT_ARG_RULES: &str = include_str!("../data/arg_rules.txt");
pub const DEFAULT_TAGSET_MAP: &str = include_str!("../data/tagset_map.txt");

pub const HEAD_RULES_FILE: &str = "head_rules.txt";
pub const ARG_RULES_FILE: &str = "arg_rules.txt";
pub const TAGSET_MAP_FILE: &str = "tagset_map.txt";

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{file}:{line}: {message}")]
    Syntax {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}: no final catch-all rule \"* * * -> MOD\"")]
    MissingCatchAll { file: String },
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

/// One group of a head rule: a scan direction and a priority list whose
/// items are sets of equally ranked categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadGroup {
    pub direction: Direction,
    pub priority: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgKind {
    Argument,
    Modifier,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Any,
    OneOf(Vec<String>),
}

impl Pattern {
    fn parse(s: &str) -> Pattern {
        if s == "*" {
            Pattern::Any
        } else {
            Pattern::OneOf(s.split('|').map(str::to_string).collect())
        }
    }

    fn matches(&self, value: &str) -> bool {
        match self {
            Pattern::Any => true,
            Pattern::OneOf(alts) => alts.iter().any(|a| a == value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FtagPattern {
    Any,
    /// `_`: the child carries no function tag.
    Untagged,
    OneOf(Vec<String>),
}

impl FtagPattern {
    fn parse(s: &str) -> FtagPattern {
        match s {
            "*" => FtagPattern::Any,
            "_" => FtagPattern::Untagged,
            _ => FtagPattern::OneOf(s.split('|').map(str::to_string).collect()),
        }
    }

    fn matches(&self, ftags: &[String]) -> bool {
        match self {
            FtagPattern::Any => true,
            FtagPattern::Untagged => ftags.is_empty(),
            FtagPattern::OneOf(alts) => ftags.iter().any(|t| alts.contains(t)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgRule {
    pub parent: Pattern,
    pub child: Pattern,
    pub ftag: FtagPattern,
    pub kind: ArgKind,
}

impl ArgRule {
    fn is_catch_all(&self) -> bool {
        self.parent == Pattern::Any
            && self.child == Pattern::Any
            && self.ftag == FtagPattern::Any
            && self.kind == ArgKind::Modifier
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagMapping {
    pub pos: String,
    pub phrase: Option<String>,
}

/// How a child relates to its parent phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Head,
    Argument,
    Modifier,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTables {
    pub head_rules: BTreeMap<String, Vec<HeadGroup>>,
    pub arg_rules: Vec<ArgRule>,
    pub tagset_map: BTreeMap<String, TagMapping>,
    pub punct_pos: BTreeSet<String>,
}

/// Where to read each table from; `None` selects the built-in default.
#[derive(Debug, Clone, Default)]
pub struct TablePaths {
    pub head_rules: Option<PathBuf>,
    pub arg_rules: Option<PathBuf>,
    pub tagset_map: Option<PathBuf>,
}

impl TablePaths {
    /// All three files from one directory, using the standard file names.
    pub fn from_dir(dir: &Path) -> Self {
        TablePaths {
            head_rules: Some(dir.join(HEAD_RULES_FILE)),
            arg_rules: Some(dir.join(ARG_RULES_FILE)),
            tagset_map: Some(dir.join(TAGSET_MAP_FILE)),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn syntax(file: &str, line: usize, message: impl Into<String>) -> TableError {
    TableError::Syntax {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

pub fn parse_head_rules(
    file: &str,
    text: &str,
) -> Result<BTreeMap<String, Vec<HeadGroup>>, TableError> {
    let mut rules = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let mut fields = line.split_whitespace();
        let parent = fields.next().unwrap().to_string();
        let rest: Vec<&str> = fields.collect();
        let mut groups = Vec::new();
        for group in rest.split(|f| *f == ";") {
            let (dir, items) = group
                .split_first()
                .ok_or_else(|| syntax(file, lineno, "empty head-rule group"))?;
            let direction = match *dir {
                "left" => Direction::Left,
                "right" => Direction::Right,
                other => {
                    return Err(syntax(
                        file,
                        lineno,
                        format!("direction must be left or right, got {:?}", other),
                    ))
                }
            };
            let priority = items
                .iter()
                .map(|it| it.split('|').map(str::to_string).collect())
                .collect();
            groups.push(HeadGroup {
                direction,
                priority,
            });
        }
        if groups.is_empty() {
            return Err(syntax(file, lineno, "head rule needs at least one group"));
        }
        if rules.insert(parent.clone(), groups).is_some() {
            return Err(syntax(file, lineno, format!("duplicate head rule for {}", parent)));
        }
    }
    Ok(rules)
}

pub fn parse_arg_rules(file: &str, text: &str) -> Result<Vec<ArgRule>, TableError> {
    let mut rules = Vec::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 || fields[3] != "->" {
            return Err(syntax(
                file,
                lineno,
                "expected \"PARENT CHILD FTAG -> ARG|MOD\"",
            ));
        }
        let kind = match fields[4] {
            "ARG" => ArgKind::Argument,
            "MOD" => ArgKind::Modifier,
            other => {
                return Err(syntax(
                    file,
                    lineno,
                    format!("expected ARG or MOD, got {:?}", other),
                ))
            }
        };
        rules.push(ArgRule {
            parent: Pattern::parse(fields[0]),
            child: Pattern::parse(fields[1]),
            ftag: FtagPattern::parse(fields[2]),
            kind,
        });
    }
    match rules.last() {
        Some(r) if r.is_catch_all() => Ok(rules),
        _ => Err(TableError::MissingCatchAll {
            file: file.to_string(),
        }),
    }
}

pub fn parse_tagset_map(
    file: &str,
    text: &str,
) -> Result<BTreeMap<String, TagMapping>, TableError> {
    let mut map = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(fields.len() == 3 || fields.len() == 4) || fields[1] != "->" {
            return Err(syntax(file, lineno, "expected \"POS -> pos [PHRASE]\""));
        }
        let phrase = fields.get(3).filter(|p| **p != "_").map(|p| p.to_string());
        map.insert(
            fields[0].to_string(),
            TagMapping {
                pos: fields[2].to_string(),
                phrase,
            },
        );
    }
    Ok(map)
}

fn read_or_default(path: &Option<PathBuf>, default_name: &str, default: &str) -> Result<(String, String), TableError> {
    match path {
        None => Ok((format!("<default {}>", default_name), default.to_string())),
        Some(p) => {
            let name = p.display().to_string();
            let text = fs::read_to_string(p).map_err(|source| TableError::Io {
                file: name.clone(),
                source,
            })?;
            Ok((name, text))
        }
    }
}

/// Load tables from files, falling back to the embedded defaults for any
/// path left unset.
pub fn load_tables(paths: &TablePaths) -> Result<RuleTables, TableError> {
    let (hf, ht) = read_or_default(&paths.head_rules, HEAD_RULES_FILE, DEFAULT_HEAD_RULES)?;
    let (af, at) = read_or_default(&paths.arg_rules, ARG_RULES_FILE, DEFAULT_ARG_RULES)?;
    let (tf, tt) = read_or_default(&paths.tagset_map, TAGSET_MAP_FILE, DEFAULT_TAGSET_MAP)?;
    RuleTables::from_texts((&hf, &ht), (&af, &at), (&tf, &tt))
}

/// Write the three default table files into `dir`.
pub fn dump_defaults(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(HEAD_RULES_FILE), DEFAULT_HEAD_RULES)?;
    fs::write(dir.join(ARG_RULES_FILE), DEFAULT_ARG_RULES)?;
    fs::write(dir.join(TAGSET_MAP_FILE), DEFAULT_TAGSET_MAP)?;
    Ok(())
}

impl RuleTables {
    pub fn from_texts(
        head: (&str, &str),
        args: (&str, &str),
        tagset: (&str, &str),
    ) -> Result<RuleTables, TableError> {
        let head_rules = parse_head_rules(head.0, head.1)?;
        let arg_rules = parse_arg_rules(args.0, args.1)?;
        let tagset_map = parse_tagset_map(tagset.0, tagset.1)?;
        let punct_pos = tagset_map
            .iter()
            .filter(|(_, m)| m.pos == "punct")
            .map(|(k, _)| k.clone())
            .collect();
        Ok(RuleTables {
            head_rules,
            arg_rules,
            tagset_map,
            punct_pos,
        })
    }

    /// The embedded English tables.
    pub fn english() -> RuleTables {
        load_tables(&TablePaths::default()).expect("embedded tables are valid")
    }

    pub fn is_punct_pos(&self, pos: &str) -> bool {
        self.punct_pos.contains(pos)
    }

    /// Index of the head among `children` (bare categories).
    ///
    /// Punctuation never heads a phrase unless every child is punctuation.
    pub fn head_child(&self, parent: &Label, children: &[&str]) -> usize {
        assert!(!children.is_empty(), "head_child needs at least one child");
        let eligible: Vec<usize> = {
            let non_punct: Vec<usize> = (0..children.len())
                .filter(|&i| !self.is_punct_pos(children[i]))
                .collect();
            if non_punct.is_empty() {
                (0..children.len()).collect()
            } else {
                non_punct
            }
        };
        let groups = match self.head_rules.get(&parent.category) {
            Some(g) => g,
            None => return eligible[0],
        };
        for group in groups {
            let order: Vec<usize> = match group.direction {
                Direction::Left => eligible.clone(),
                Direction::Right => eligible.iter().rev().copied().collect(),
            };
            for item in &group.priority {
                if let Some(&i) = order
                    .iter()
                    .find(|&&i| item.iter().any(|c| c == children[i]))
                {
                    return i;
                }
            }
        }
        match groups[0].direction {
            Direction::Left => eligible[0],
            Direction::Right => *eligible.last().unwrap(),
        }
    }

    /// Argument or modifier status of a non-head phrase or word.
    pub fn arg_kind(&self, parent: &Label, child_category: &str, child_ftags: &[String]) -> ArgKind {
        self.arg_rules
            .iter()
            .find(|r| {
                r.parent.matches(&parent.category)
                    && r.child.matches(child_category)
                    && r.ftag.matches(child_ftags)
            })
            .map(|r| r.kind)
            .unwrap_or(ArgKind::Modifier)
    }

    pub fn classify_child(&self, parent: &Label, child: &SyntaxTree, is_head: bool) -> Role {
        if is_head {
            return Role::Head;
        }
        match child {
            SyntaxTree::PreTerminal { pos, .. } if self.is_punct_pos(pos) => Role::Punct,
            SyntaxTree::PreTerminal { pos, .. } => match self.arg_kind(parent, pos, &[]) {
                ArgKind::Argument => Role::Argument,
                ArgKind::Modifier => Role::Modifier,
            },
            SyntaxTree::Phrase { label, .. } => {
                match self.arg_kind(parent, &label.category, &label.ftags) {
                    ArgKind::Argument => Role::Argument,
                    ArgKind::Modifier => Role::Modifier,
                }
            }
        }
    }

    /// Tag a pre-terminal carries in the derived tree.
    pub fn derived_tag<'a>(&'a self, pos: &'a str) -> &'a str {
        match self.tagset_map.get(pos) {
            Some(m) => m.phrase.as_deref().unwrap_or(&m.pos),
            None => pos,
        }
    }

    /// Tag shown in the POS column for a derived-tree pre-terminal.
    pub fn output_pos<'a>(&'a self, tag: &'a str) -> &'a str {
        match self.tagset_map.get(tag) {
            Some(m) => &m.pos,
            None => tag,
        }
    }
}

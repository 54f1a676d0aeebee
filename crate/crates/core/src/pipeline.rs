//! Corpus-level driver: read tree files, convert every sentence on a worker
//! pool, and write, validate, count or summarize the results.

use std::fmt;
use std::fs;
use std::io;
use std::ops::AddAssign;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use thiserror::Error;

use crate::derive::{compose, heads_from_derivation, ComposeError, DerivationTree};
use crate::etree::{extract, ExtractedGrammar, Extraction, Operation, TreeKind};
use crate::format::{apply_spans, build_rows, emit_sentence, validate_file, FormatError, TagbankSentence, ValidationReport};
use crate::normalize::{normalize, NormalizeError};
use crate::tables::{load_tables, RuleTables, TableError, TablePaths};
use crate::tree::{parse_corpus_lenient, ParseError, SyntaxTree};

/// Environment variable naming a directory that replaces the built-in tables.
pub const TABLE_DIR_ENV: &str = "TAGBANK_TABLE_DIR";
/// Extension given to converted files when writing into a directory.
pub const OUTPUT_EXTENSION: &str = "tagbank";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Tables(#[from] TableError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("no input files")]
    NoInputs,
    #[error("jobs must be at least 1")]
    NoWorkers,
    #[error("{path}:{line}: empty lexicon entry")]
    Lexicon { path: PathBuf, line: usize },
    #[error("worker pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ConfigError + '_ {
    move |source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Canonical,
    Mwe,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    /// A file (single input) or a directory; `None` means standard output.
    pub output: Option<PathBuf>,
    pub tables: TablePaths,
    pub mode: Mode,
    pub lexicon: Option<PathBuf>,
    pub preserve_case: bool,
    pub jobs: usize,
    pub fail_fast: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            output: None,
            tables: TablePaths::default(),
            mode: Mode::Canonical,
            lexicon: None,
            preserve_case: false,
            jobs: 1,
            fail_fast: false,
        }
    }
}

/// Table paths with the environment override applied to unset entries.
pub fn table_paths(dir: Option<&Path>, explicit: TablePaths) -> TablePaths {
    let env_dir = std::env::var_os(TABLE_DIR_ENV).map(PathBuf::from);
    let base = match dir.map(Path::to_path_buf).or(env_dir) {
        Some(d) => TablePaths::from_dir(&d),
        None => TablePaths::default(),
    };
    TablePaths {
        head_rules: explicit.head_rules.or(base.head_rules),
        arg_rules: explicit.arg_rules.or(base.arg_rules),
        tagset_map: explicit.tagset_map.or(base.tagset_map),
    }
}

/// Multiword expressions, matched case-insensitively against token runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MweLexicon {
    entries: Vec<Vec<String>>,
}

impl MweLexicon {
    pub fn parse(text: &str) -> Result<MweLexicon, usize> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let words: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            if words.len() < 2 {
                return Err(i + 1);
            }
            entries.push(words);
        }
        // longest entries win
        entries.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(MweLexicon { entries })
    }

    pub fn load(path: &Path) -> Result<MweLexicon, ConfigError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        MweLexicon::parse(&text).map_err(|line| ConfigError::Lexicon {
            path: path.to_path_buf(),
            line,
        })
    }

    /// Non-overlapping 1-based spans, scanning left to right.
    pub fn find_spans(&self, tokens: &[&str]) -> Vec<(usize, usize)> {
        let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        let mut spans = Vec::new();
        let mut i = 0;
        while i < lower.len() {
            let hit = self
                .entries
                .iter()
                .find(|e| lower.len() - i >= e.len() && lower[i..i + e.len()] == e[..]);
            match hit {
                Some(e) => {
                    spans.push((i + 1, i + e.len()));
                    i += e.len();
                }
                None => i += 1,
            }
        }
        spans
    }
}

#[derive(Debug, Error)]
pub enum SentenceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl SentenceError {
    pub fn code(&self) -> &'static str {
        match self {
            SentenceError::Parse(e) => e.code(),
            SentenceError::Normalize(_) => "EmptySentence",
            SentenceError::Compose(_) => "Compose",
            SentenceError::Format(_) => "Format",
        }
    }
}

/// Everything produced for one sentence.
#[derive(Debug, Clone)]
pub struct Converted {
    pub normalized: SyntaxTree,
    pub extraction: Extraction,
    pub derivation: DerivationTree,
    pub derived: SyntaxTree,
    pub heads: Vec<usize>,
    pub rows: TagbankSentence,
}

pub fn convert_tree(
    tree: &SyntaxTree,
    tables: &RuleTables,
    preserve_case: bool,
) -> Result<Converted, SentenceError> {
    let normalized = normalize(tree, tables)?;
    let extraction = extract(&normalized, tables);
    let (derivation, derived) = compose(&extraction.etrees, &extraction.records)?;
    let heads = heads_from_derivation(&derivation, tables);
    let rows = build_rows(&derived, &derivation, &heads, tables, preserve_case);
    Ok(Converted {
        normalized,
        extraction,
        derivation,
        derived,
        heads,
        rows,
    })
}

/// Convert every tree of one file's text; results stay in input order.
pub fn convert_text(
    text: &str,
    tables: &RuleTables,
    preserve_case: bool,
    pool: &rayon::ThreadPool,
) -> Vec<Result<Converted, SentenceError>> {
    let trees = parse_corpus_lenient(text);
    pool.install(|| {
        trees
            .into_par_iter()
            .map(|t| convert_tree(&t?, tables, preserve_case))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub file: PathBuf,
    pub sentence: usize,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.file.display(), self.sentence, self.code, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub sentences: usize,
    pub succeeded: usize,
    pub failures: Vec<Failure>,
    /// Converted text per input, kept when no output path is configured.
    pub outputs: Vec<(PathBuf, String)>,
}

impl RunSummary {
    pub fn exit_code(&self, fail_fast: bool) -> i32 {
        if self.failures.is_empty() || (!fail_fast && self.succeeded > 0) {
            0
        } else {
            1
        }
    }
}

/// Expand directories into their regular files, sorted by name.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, ConfigError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(io_err(p))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, ConfigError> {
    if jobs == 0 {
        return Err(ConfigError::NoWorkers);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ConfigError::Pool(e.to_string()))
}

fn output_path(config: &RunConfig, input: &Path) -> Option<PathBuf> {
    let out = config.output.as_ref()?;
    if config.inputs.len() == 1 && !out.is_dir() && !input.is_dir() {
        return Some(out.clone());
    }
    let stem = input.file_stem().unwrap_or(input.as_os_str());
    Some(out.join(stem).with_extension(OUTPUT_EXTENSION))
}

/// Convert each input file into one TAGbank file.
pub fn cmd_convert(config: &RunConfig) -> Result<RunSummary, ConfigError> {
    let tables = load_tables(&config.tables)?;
    let lexicon = match (config.mode, &config.lexicon) {
        (Mode::Mwe, Some(p)) => Some(MweLexicon::load(p)?),
        (Mode::Mwe, None) => {
            warn!("mwe mode without a lexicon: writing canonical output");
            None
        }
        (Mode::Canonical, _) => None,
    };
    let inputs = expand_inputs(&config.inputs)?;
    if inputs.is_empty() {
        return Err(ConfigError::NoInputs);
    }
    let pool = pool(config.jobs)?;
    let mut summary = RunSummary::default();
    for input in &inputs {
        let text = fs::read_to_string(input).map_err(io_err(input))?;
        let mut out = String::new();
        let results = convert_text(&text, &tables, config.preserve_case, &pool);
        for (i, r) in results.into_iter().enumerate() {
            summary.sentences += 1;
            let emitted = r.and_then(|c| {
                let rows = match &lexicon {
                    Some(lex) => {
                        let tokens: Vec<&str> = c.derived.tokens();
                        apply_spans(&c.rows, &lex.find_spans(&tokens))?
                    }
                    None => c.rows,
                };
                Ok(rows)
            });
            match emitted {
                Ok(rows) => {
                    summary.succeeded += 1;
                    emit_sentence(&rows, &mut out);
                }
                Err(e) => {
                    let f = Failure {
                        file: input.clone(),
                        sentence: i + 1,
                        code: e.code(),
                        message: e.to_string(),
                    };
                    warn!("{}", f);
                    summary.failures.push(f);
                }
            }
        }
        match output_path(config, input) {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(io_err(dir))?;
                }
                fs::write(&path, &out).map_err(io_err(&path))?;
                info!("{}: wrote {}", input.display(), path.display());
            }
            None => summary.outputs.push((input.clone(), out)),
        }
        if config.fail_fast && !summary.failures.is_empty() {
            break;
        }
    }
    Ok(summary)
}

/// Validate each file; directories contribute one report per file.
pub fn cmd_validate(paths: &[PathBuf]) -> Result<Vec<(PathBuf, ValidationReport)>, ConfigError> {
    let files = expand_inputs(paths)?;
    if files.is_empty() {
        return Err(ConfigError::NoInputs);
    }
    files
        .into_iter()
        .map(|f| {
            let text = fs::read_to_string(&f).map_err(io_err(&f))?;
            let report = validate_file(&text);
            Ok((f, report))
        })
        .collect()
}

/// Corpus totals reported by `stats`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub sentences: usize,
    pub tokens: usize,
    pub alpha: usize,
    pub beta: usize,
    pub substitutions: usize,
    pub adjunctions: usize,
    pub failures: usize,
}

impl Stats {
    pub fn of(c: &Converted) -> Stats {
        let count = |k| c.extraction.etrees.iter().filter(|e| e.kind == k).count();
        Stats {
            sentences: 1,
            tokens: c.derived.token_count(),
            alpha: count(TreeKind::Alpha),
            beta: count(TreeKind::Beta),
            substitutions: c.derivation.count(Operation::Substitution),
            adjunctions: c.derivation.count(Operation::Adjunction),
            failures: 0,
        }
    }

    pub fn edges(&self) -> usize {
        self.substitutions + self.adjunctions
    }
}

impl AddAssign for Stats {
    fn add_assign(&mut self, o: Stats) {
        self.sentences += o.sentences;
        self.tokens += o.tokens;
        self.alpha += o.alpha;
        self.beta += o.beta;
        self.substitutions += o.substitutions;
        self.adjunctions += o.adjunctions;
        self.failures += o.failures;
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ratio = if self.beta == 0 {
            "n/a".to_string()
        } else {
            format!("{:.3}", self.alpha as f64 / self.beta as f64)
        };
        writeln!(f, "sentences\t{}", self.sentences)?;
        writeln!(f, "tokens\t{}", self.tokens)?;
        writeln!(f, "alpha\t{}", self.alpha)?;
        writeln!(f, "beta\t{}", self.beta)?;
        writeln!(f, "alpha/beta\t{}", ratio)?;
        writeln!(f, "substitutions\t{}", self.substitutions)?;
        writeln!(f, "adjunctions\t{}", self.adjunctions)?;
        write!(f, "failures\t{}", self.failures)
    }
}

/// Run `visit` on every converted sentence of every input, in order.
fn for_each_sentence(
    paths: &[PathBuf],
    tables: &RuleTables,
    jobs: usize,
    mut visit: impl FnMut(&Path, usize, Result<Converted, SentenceError>),
) -> Result<(), ConfigError> {
    let pool = pool(jobs)?;
    for input in expand_inputs(paths)? {
        let text = fs::read_to_string(&input).map_err(io_err(&input))?;
        for (i, r) in convert_text(&text, tables, false, &pool).into_iter().enumerate() {
            if let Err(e) = &r {
                warn!("{}:{}: {}: {}", input.display(), i + 1, e.code(), e);
            }
            visit(&input, i + 1, r);
        }
    }
    Ok(())
}

pub fn cmd_stats(paths: &[PathBuf], tables: &RuleTables, jobs: usize) -> Result<Stats, ConfigError> {
    let mut total = Stats::default();
    for_each_sentence(paths, tables, jobs, |_, _, r| match r {
        Ok(c) => total += Stats::of(&c),
        Err(_) => total.failures += 1,
    })?;
    Ok(total)
}

pub fn cmd_grammar(
    paths: &[PathBuf],
    tables: &RuleTables,
    jobs: usize,
) -> Result<(ExtractedGrammar, usize), ConfigError> {
    let mut grammar = ExtractedGrammar::default();
    let mut failures = 0;
    for_each_sentence(paths, tables, jobs, |_, _, r| match r {
        Ok(c) => grammar.add_sentence(&c.extraction.etrees, Some(c.extraction.root)),
        Err(_) => failures += 1,
    })?;
    Ok((grammar, failures))
}

/// Template table as `count<TAB>template` lines.
pub fn render_grammar(grammar: &ExtractedGrammar) -> String {
    grammar
        .ranked()
        .into_iter()
        .map(|(t, n)| format!("{}\t{}\n", n, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicon_matching() {
        let lex = MweLexicon::parse("# units\nyears old\nnew york city\nnew york\n").unwrap();
        assert_eq!(lex.find_spans(&["61", "Years", "old"]), vec![(2, 3)]);
        assert_eq!(lex.find_spans(&["New", "York", "City", "new", "york"]), vec![(1, 3), (4, 5)]);
        assert_eq!(lex.find_spans(&["old", "years"]), vec![]);
        assert_eq!(MweLexicon::parse("ok go\nsolo\n"), Err(2));
    }

    #[test]
    fn exit_codes() {
        let mut s = RunSummary::default();
        assert_eq!(s.exit_code(true), 0);
        s.failures.push(Failure {
            file: "x".into(),
            sentence: 3,
            code: "UnbalancedBrackets",
            message: "m".into(),
        });
        assert_eq!(s.exit_code(false), 1);
        s.succeeded = 9;
        assert_eq!(s.exit_code(false), 0);
        assert_eq!(s.exit_code(true), 1);
        assert_eq!(s.failures[0].to_string(), "x:3: UnbalancedBrackets: m");
    }

    #[test]
    fn stats_of_small_sentence() {
        let tables = RuleTables::english();
        let t = crate::tree::parse_tree("(S (NP-SBJ (NNP kim)) (VP (VBZ sleeps)) (. .))").unwrap();
        let s = Stats::of(&convert_tree(&t, &tables, false).unwrap());
        assert_eq!((s.tokens, s.alpha, s.beta, s.substitutions, s.adjunctions), (3, 2, 1, 1, 1));
    }
}

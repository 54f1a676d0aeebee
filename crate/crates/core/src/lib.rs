//! Convert phrase-structure treebank trees into Tree-Adjoining Grammar
//! derivations and the TAGbank token-aligned tabular format.

pub mod derive;
pub mod etree;
pub mod format;
pub mod normalize;
pub mod pipeline;
pub mod tables;
pub mod tree;

pub use tables::{load_tables, RuleTables, TablePaths};
pub use tree::{parse_corpus, parse_tree, serialize, GornAddress, Label, ParseError, SyntaxTree};

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tagbank::pipeline::{
    cmd_convert, cmd_grammar, cmd_stats, cmd_validate, render_grammar, table_paths, ConfigError, Mode,
    RunConfig, TABLE_DIR_ENV,
};
use tagbank::tables::{dump_defaults, load_tables, RuleTables, TablePaths};

#[derive(Parser)]
#[command(name = "tagbank", version, about = "Convert treebank trees into TAGbank files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TableArgs {
    /// Directory holding head_rules.txt, arg_rules.txt and tagset_map.txt
    #[arg(long, help = format!("Table directory (default: ${} or built-in tables)", TABLE_DIR_ENV))]
    table_dir: Option<PathBuf>,
    #[arg(long)]
    head_rules: Option<PathBuf>,
    #[arg(long)]
    arg_rules: Option<PathBuf>,
    #[arg(long)]
    tagset_map: Option<PathBuf>,
}

impl TableArgs {
    fn paths(&self) -> TablePaths {
        table_paths(
            self.table_dir.as_deref(),
            TablePaths {
                head_rules: self.head_rules.clone(),
                arg_rules: self.arg_rules.clone(),
                tagset_map: self.tagset_map.clone(),
            },
        )
    }

    fn load(&self) -> Result<RuleTables, ConfigError> {
        Ok(load_tables(&self.paths())?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Canonical,
    Mwe,
}

#[derive(Subcommand)]
enum Command {
    /// Convert bracketed tree files into TAGbank files
    Convert {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file (one input) or directory; standard output if omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "canonical")]
        mode: ModeArg,
        /// One multiword expression per line
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        preserve_case: bool,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        fail_fast: bool,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Check TAGbank files
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print de-lexicalized templates with counts
    Grammar {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Print corpus statistics
    Stats {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        tables: TableArgs,
    },
    /// Write the built-in tables into a directory for editing
    DumpTables { dir: PathBuf },
}

fn run(cli: Cli) -> Result<i32, ConfigError> {
    match cli.command {
        Command::Convert {
            inputs,
            output,
            mode,
            lexicon,
            preserve_case,
            jobs,
            fail_fast,
            tables,
        } => {
            let config = RunConfig {
                inputs,
                output,
                tables: tables.paths(),
                mode: match mode {
                    ModeArg::Canonical => Mode::Canonical,
                    ModeArg::Mwe => Mode::Mwe,
                },
                lexicon,
                preserve_case,
                jobs,
                fail_fast,
            };
            let summary = cmd_convert(&config)?;
            for (_, text) in &summary.outputs {
                print!("{}", text);
            }
            eprintln!(
                "{} sentences, {} converted, {} failed",
                summary.sentences,
                summary.succeeded,
                summary.failures.len()
            );
            Ok(summary.exit_code(fail_fast))
        }
        Command::Validate { paths } => {
            let reports = cmd_validate(&paths)?;
            let mut errors = 0;
            for (path, report) in &reports {
                println!("== {}", path.display());
                println!("{}", report);
                errors += report.errors();
            }
            Ok(if errors == 0 { 0 } else { 1 })
        }
        Command::Grammar { paths, jobs, tables } => {
            let (grammar, failures) = cmd_grammar(&paths, &tables.load()?, jobs)?;
            print!("{}", render_grammar(&grammar));
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Command::Stats { paths, jobs, tables } => {
            let stats = cmd_stats(&paths, &tables.load()?, jobs)?;
            println!("{}", stats);
            Ok(if stats.failures == 0 { 0 } else { 1 })
        }
        Command::DumpTables { dir } => {
            dump_defaults(&dir).map_err(|source| ConfigError::Io { path: dir.clone(), source })?;
            println!("wrote tables to {}", dir.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, record| {
            use std::io::Write;
            writeln!(buf, "{}", record.args())
        })
        .init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("tagbank: {}", e);
            ExitCode::from(2)
        }
    }
}

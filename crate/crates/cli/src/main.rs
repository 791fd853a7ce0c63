use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use scc::datalog::{
    cross_check_program, facts_from_log, translate_query, CheckReport, Literal, OUTPUT,
};
use scc::eventlog::{
    load_event_log, merge_cases, write_event_log, ColumnRoles, EventLog, LoadError, Segment,
};
use scc::gen::{self, LogShape};
use scc::pattern::{compile_simple, oracle_satisfying_segments, satisfying_segments};
use scc::plan::{compile_plan, execute_with, explain, Semantics, TableSchema};
use scc::query::{parse_pattern, parse_query_with, ParseOptions, Query};

/// Exit statuses: 0 success, 1 user error, 2 I/O, 3 check mismatch.
enum Failure {
    User(String),
    Io(String),
    Mismatch,
}

impl Failure {
    fn user(e: impl std::fmt::Display) -> Self {
        Failure::User(e.to_string())
    }

    fn io(e: impl std::fmt::Display) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::io(e)
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io(e) => Failure::io(e),
            other => Failure::user(other),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "scc",
    version,
    about = "Conjunctive process queries over event logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LogArgs {
    /// Event log CSV with a header row
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, default_value = "event_id")]
    eid_col: String,
    #[arg(long, default_value = "case_id")]
    cid_col: String,
    #[arg(long, default_value = "timestamp")]
    ts_col: String,
    /// Table name queries must use in FROM
    #[arg(long, default_value = "eventlog")]
    log_name: String,
    /// Collapse all cases into one before running
    #[arg(long)]
    merge_cases: bool,
}

impl LogArgs {
    fn load(&self) -> Result<EventLog, Failure> {
        let path = self
            .log
            .as_ref()
            .ok_or_else(|| Failure::user("--log is required"))?;
        let file = File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let roles = ColumnRoles::new(&self.eid_col, &self.cid_col, &self.ts_col);
        let log = load_event_log(BufReader::new(file), &roles)?;
        Ok(if self.merge_cases {
            merge_cases(&log)
        } else {
            log
        })
    }
}

#[derive(Args)]
struct QueryArgs {
    /// Query text
    query: Option<String>,
    /// Read the query from a file instead
    #[arg(long, conflicts_with = "query")]
    file: Option<PathBuf>,
    /// Reject extensions to the core grammar
    #[arg(long)]
    strict_grammar: bool,
}

impl QueryArgs {
    fn parse(&self) -> Result<Query, Failure> {
        let text = match (&self.query, &self.file) {
            (Some(q), _) => q.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
            (None, None) => {
                return Err(Failure::user(
                    "no query given; pass it as an argument or with --file",
                ))
            }
        };
        let options = ParseOptions {
            strict_grammar: self.strict_grammar,
            ..ParseOptions::default()
        };
        parse_query_with(&text, options).map_err(Failure::user)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    /// Drop pattern atoms from the output rules
    DropPattern,
}

#[derive(Subcommand)]
enum Command {
    /// Run a query and print the result table
    Query {
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Drop duplicate rows
        #[arg(long)]
        set_semantics: bool,
        /// Print the algebra plan before the result
        #[arg(long)]
        explain: bool,
    },
    /// List the satisfying segments of a pattern, per case
    Match {
        #[command(flatten)]
        log: LogArgs,
        /// Attribute the pattern literals refer to
        attribute: String,
        pattern: String,
        /// Only this case
        #[arg(long)]
        case: Option<String>,
        /// Use the exhaustive reference matcher, refusing larger cases
        #[arg(long)]
        oracle_bound: Option<usize>,
    },
    /// Print the Datalog translation of a query
    Translate {
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        query: QueryArgs,
        /// Append the log as facts
        #[arg(long)]
        with_facts: bool,
    },
    /// Compare the algebra and Datalog answers of a query
    Check {
        #[command(flatten)]
        log: LogArgs,
        #[command(flatten)]
        query: QueryArgs,
        /// Check this many generated (query, log) pairs instead
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        fault: Option<Fault>,
    },
    /// Write a random event log as CSV
    Gen {
        #[arg(long, default_value_t = 3)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        min_events: usize,
        #[arg(long, default_value_t = 5)]
        max_events: usize,
        /// Comma-separated event names
        #[arg(long, value_delimiter = ',', default_value = "a,b,c")]
        vocab: Vec<String>,
        /// Probability of a null attribute value
        #[arg(long, default_value_t = 0.0)]
        null_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn cmd_query(
    log: &LogArgs,
    query: &QueryArgs,
    format: Format,
    set_semantics: bool,
    show_plan: bool,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let q = query.parse()?;
    let events = log.load()?;
    let plan = compile_plan(&q, &TableSchema::of(&log.log_name, &events)).map_err(Failure::user)?;
    if show_plan {
        writeln!(out, "{}", explain(&plan))?;
    }
    let semantics = if set_semantics {
        Semantics::Set
    } else {
        Semantics::Multiset
    };
    let table = execute_with(&plan, &events, semantics);
    match format {
        Format::Csv => table.write_csv(out).map_err(Failure::io),
        Format::Jsonl => table.write_jsonl(out).map_err(Failure::io),
        Format::Pretty => table.write_pretty(out).map_err(Failure::io),
    }
}

fn cmd_match(
    log: &LogArgs,
    attribute: &str,
    pattern: &str,
    case: Option<&str>,
    oracle_bound: Option<usize>,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let formula = parse_pattern(pattern).map_err(Failure::user)?;
    let events = log.load()?;
    let p = compile_simple(attribute, &formula, events.schema()).map_err(Failure::user)?;
    for es in events
        .event_sets()
        .filter(|es| case.is_none_or(|c| es.cid() == c))
    {
        let result = match oracle_bound {
            Some(bound) => oracle_satisfying_segments(&p, &es, bound)
                .map_err(|e| Failure::User(format!("case {}: {e}", es.cid())))?,
            None => satisfying_segments(&p, &es),
        };
        for seg in result.ranked(&es) {
            match seg {
                Segment::Empty => writeln!(out, "{}\tempty", es.cid())?,
                Segment::Interval { start, end } => writeln!(out, "{}\t{start}\t{end}", es.cid())?,
            }
        }
    }
    Ok(())
}

fn cmd_translate(
    log: &LogArgs,
    query: &QueryArgs,
    with_facts: bool,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let q = query.parse()?;
    let events = log.load()?;
    let prog =
        translate_query(&q, &TableSchema::of(&log.log_name, &events)).map_err(Failure::user)?;
    write!(out, "{prog}")?;
    if with_facts {
        write!(out, "{}", facts_from_log(&events))?;
    }
    Ok(())
}

fn check_one(
    q: &Query,
    events: &EventLog,
    log_name: &str,
    fault: Option<Fault>,
) -> Result<CheckReport, Failure> {
    let schema = TableSchema::of(log_name, events);
    let mut prog = translate_query(q, &schema).map_err(Failure::user)?;
    if let Some(Fault::DropPattern) = fault {
        let edb = prog.edb.clone();
        for rule in prog.rules.iter_mut().filter(|r| r.head.predicate == OUTPUT) {
            rule.body
                .retain(|l| !matches!(l, Literal::Pos(a) if !edb.contains(&a.predicate)));
        }
    }
    cross_check_program(q, events, &schema, &prog).map_err(Failure::user)
}

fn cmd_check(
    log: &LogArgs,
    query: &QueryArgs,
    random: Option<usize>,
    seed: u64,
    fault: Option<Fault>,
    out: &mut impl Write,
) -> Result<(), Failure> {
    if let Some(n) = random {
        let mut rng = gen::rng(seed);
        let mut mismatches = 0;
        for i in 0..n {
            let shape = LogShape {
                cases: rng.gen_range(1..=3),
                min_events: 0,
                max_events: 6,
                ..LogShape::default()
            };
            let events = gen::random_log(&mut rng, &shape);
            let q = gen::random_query(&mut rng, &shape.vocab, shape.cases);
            let report = check_one(&q, &events, gen::SOURCE, fault)?;
            if !report.is_equal() {
                mismatches += 1;
                writeln!(out, "pair {i}: {q}\n{report}")?;
            }
        }
        writeln!(out, "{n} pairs checked, {mismatches} mismatches")?;
        return if mismatches == 0 {
            Ok(())
        } else {
            Err(Failure::Mismatch)
        };
    }
    let q = query.parse()?;
    let events = log.load()?;
    let report = check_one(&q, &events, &log.log_name, fault)?;
    write!(out, "{report}")?;
    if report.is_equal() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn cmd_gen(shape: &LogShape, seed: u64, out: &mut impl Write) -> Result<(), Failure> {
    if shape.min_events > shape.max_events {
        return Err(Failure::user("--min-events exceeds --max-events"));
    }
    if shape.vocab.is_empty() || !(0.0..=1.0).contains(&shape.null_rate) {
        return Err(Failure::user(
            "need a nonempty --vocab and a --null-rate in [0, 1]",
        ));
    }
    let log = gen::random_log(&mut gen::rng(seed), shape);
    write_event_log(&log, out).map_err(Failure::io)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Query {
            log,
            query,
            format,
            set_semantics,
            explain,
        } => cmd_query(log, query, *format, *set_semantics, *explain, &mut out),
        Command::Match {
            log,
            attribute,
            pattern,
            case,
            oracle_bound,
        } => cmd_match(
            log,
            attribute,
            pattern,
            case.as_deref(),
            *oracle_bound,
            &mut out,
        ),
        Command::Translate {
            log,
            query,
            with_facts,
        } => cmd_translate(log, query, *with_facts, &mut out),
        Command::Check {
            log,
            query,
            random,
            seed,
            fault,
        } => cmd_check(log, query, *random, *seed, *fault, &mut out),
        Command::Gen {
            cases,
            min_events,
            max_events,
            vocab,
            null_rate,
            seed,
        } => {
            let shape = LogShape {
                cases: *cases,
                min_events: *min_events,
                max_events: *max_events,
                vocab: vocab.clone(),
                null_rate: *null_rate,
            };
            cmd_gen(&shape, *seed, &mut out)
        }
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Mismatch) => ExitCode::from(3),
    }
}

//! Conjunctive queries with temporal patterns over event logs.
//!
//! The pipeline is: load a log ([`eventlog`]), parse a query ([`query`]),
//! compile it against the log's schema and run it ([`plan`]). Pattern
//! conditions are matched per case by [`pattern`]. The same query can be
//! translated to Datalog and evaluated independently ([`datalog`]).
//!
//! ```
//! use scc::plan::{compile_plan, execute, TableSchema};
//! use scc::query::parse_query;
//!
//! let log = scc::fixtures::table1();
//! let q = parse_query("SELECT case_id FROM eventlog WHERE status = 'SENT'").unwrap();
//! let plan = compile_plan(&q, &TableSchema::of("eventlog", &log)).unwrap();
//! assert_eq!(execute(&plan, &log).rows.len(), 1);
//! ```

pub mod datalog;
pub mod error;
pub mod eventlog;
pub mod fixtures;
pub mod gen;
pub mod pattern;
pub mod plan;
pub mod query;

pub use error::CompileError;

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/event-logs.md")]
    mod event_logs {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/queries.md")]
    mod queries {}
    #[doc = include_str!("../../../book/src/datalog.md")]
    mod datalog {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

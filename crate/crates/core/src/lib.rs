//! Cumulative signature bandwidth and client verification cost for TUF
//! repositories.
//!
//! The crate models a repository as a set of role instances (Root, Timestamp,
//! Snapshot, Target), each bound to a signature algorithm with a bounded
//! number of signatures per key. A run publishes one timestamp per tick of a
//! calendar, stages target updates on event dates, rolls keys over when they
//! are exhausted or when the role set changes, and accumulates what a client
//! that downloads and verifies every signed file would pay: signature bytes,
//! public-key bytes from republished root files, and verification cost.
//!
//! - [`algorithm`]: parameter sets and the CSV catalog.
//! - [`repository`]: the role state machine and its ledger.
//! - [`schedule`]: tick calendars, update events, role actions, Poisson events.
//! - [`runner`]: scenario execution, sweeps and the report CSV.
//! - [`cli`]: the `tuf-costsim` command line.

pub mod algorithm;
pub mod cli;
pub mod error;
pub mod repository;
pub mod runner;
pub mod schedule;
mod table;

pub use algorithm::{find_algorithm, parse_algorithm_catalog, SignatureAlgorithm};
pub use error::{Error, Result};
pub use repository::{LedgerTotals, Repository, RoleState, RoleType, TickReport};
pub use runner::{
    emit_report_csv, run_scenario, run_sweep, AlgorithmAssignment, Architecture, RoleSpec,
    RunResult, Simulation,
};
pub use schedule::{
    generate_poisson_events, generate_ticks, load_event_dates, merge_calendars, Cadence,
    EventCalendar, RoleAction, Tick,
};

//! Procedures, the analysis pipeline and its reports.

mod analysis;
mod bench;
mod procedure;
mod relevance;
mod report;

pub use analysis::{analyze, Analysis, EngineError, Options, ReachNode, Schedule, Timings, Vc};
pub use bench::{parse_command, parse_procedure, print_procedure, BenchError, HEADER};
pub use procedure::{Edge, Loc, Procedure, ProcedureError};
pub use relevance::{live_symbols, relevance_masks, relevant};
pub use report::{conjunct_count, status_of, LocationReport, Report, Stats, Status, VcResult};

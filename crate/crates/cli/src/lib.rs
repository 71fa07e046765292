//! Batch front end: job documents, reports and the verification suites.

pub mod corpus;
pub mod explain;
pub mod grammar;
pub mod job;
pub mod report;
pub mod run;
pub mod suites;

pub use grammar::Diagnostic;
pub use job::{parse_job, parse_job_with, serialize, Defaults, JobDocument, JobError};
pub use report::{QueryReport, ReportDocument, Status};
pub use run::{run_job, run_job_with, RunOptions};
pub use suites::{run_suite, selftest, SuiteReport};

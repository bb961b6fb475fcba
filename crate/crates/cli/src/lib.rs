//! Spec files, report documents and the pipeline that connects them.

pub mod report;
pub mod run;
pub mod spec;

pub use report::{to_precise_json, to_text, ReportDocument};
pub use run::{parse_verify_input, run, Outcome, Overrides, RunOptions, EXIT_ERROR, EXIT_HYPOTHESES_FAIL, EXIT_OK};
pub use spec::{parse_spec, ParseError, TupleSpec};

//! Orchestration of checks, decomposition and verification for one spec.

use std::time::Instant;

use serde::Deserialize;
use wold_core::{check_equal_range, verify_reducing, verify_wandering_identities, wold_tuple};

use crate::report::{
    DecompositionSection, HypothesesSection, IdentitiesSection, ReducingSection, ReportDocument, Settings, Status, Timing,
    WarningEntry,
};
use crate::spec::{parse_spec, Action, ParseError, Positive, Tolerance, TupleSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_HYPOTHESES_FAIL: i32 = 2;

/// Command-line overrides of spec settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub depth: Option<u64>,
    pub max_power: Option<u64>,
    pub cap: Option<u64>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut TupleSpec) -> Result<(), ParseError> {
        if let Some(d) = self.depth {
            spec.set_depth(d)?;
        }
        if let Some(m) = self.max_power {
            spec.max_power = Positive::try_from(m).map_err(|e| ParseError::field("--max-power", e))?;
        }
        if let Some(c) = self.cap {
            spec.cap = Positive::try_from(c).map_err(|e| ParseError::field("--cap", e))?;
        }
        if let Some(t) = self.tol {
            spec.tol = Tolerance::try_from(t).map_err(|e| ParseError::field("--tol", e))?;
        }
        spec.build()?;
        Ok(())
    }
}

/// What the run should do beyond the spec itself.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub command: Action,
    pub actions: Vec<Action>,
    pub interior_only: bool,
    /// Record the elapsed time in the report.
    pub timing: bool,
    /// Decomposition from an earlier report, compared against the recomputed one.
    pub recorded: Option<DecompositionSection>,
}

impl RunOptions {
    /// Options for a subcommand: `check` runs the hypothesis checks only,
    /// `decompose` and `verify` run the whole pipeline.
    pub fn for_command(command: Action) -> Self {
        let actions = match command {
            Action::Check => vec![Action::Check],
            Action::Decompose | Action::Verify => vec![Action::Check, Action::Decompose, Action::Verify],
        };
        Self { command, actions, interior_only: false, timing: false, recorded: None }
    }

    /// Runs whatever the spec's `actions` list asks for.
    pub fn from_spec(spec: &TupleSpec) -> Self {
        let command = spec.actions.iter().copied().max_by_key(|a| *a as u8).unwrap_or(Action::Check);
        Self { command, actions: spec.actions.clone(), interior_only: false, timing: false, recorded: None }
    }
}

/// Input of the `verify` subcommand: a spec, or an earlier report.
#[derive(Clone, Debug)]
pub struct VerifyInput {
    pub spec: TupleSpec,
    pub recorded: Option<DecompositionSection>,
}

#[derive(Deserialize)]
struct RecordedReport {
    spec: TupleSpec,
    #[serde(default)]
    decomposition: Option<DecompositionSection>,
}

/// Reads either a report document (recognized by its `spec` member) or a spec.
pub fn parse_verify_input(text: &str) -> Result<VerifyInput, ParseError> {
    let looks_like_report = serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("spec").is_some() && v.get("status").is_some())
        .unwrap_or(false);
    if !looks_like_report {
        return parse_spec(text).map(|spec| VerifyInput { spec, recorded: None });
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let report: RecordedReport = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ParseError { field, reason: inner.to_string(), line: Some(inner.line()), column: Some(inner.column()) }
    })?;
    report.spec.build().map_err(|e| ParseError { field: format!("spec.{}", e.field), ..e })?;
    Ok(VerifyInput { spec: report.spec, recorded: report.decomposition })
}

/// Result of a run: the report and the process exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    pub exit_code: i32,
}

/// Runs the requested stages on a validated spec. Never panics on module
/// errors; they are recorded in the report and give exit code 1.
pub fn run(spec: &TupleSpec, options: &RunOptions) -> Outcome {
    let start = Instant::now();
    let mut report = ReportDocument {
        command: options.command,
        spec: spec.clone(),
        settings: Settings {
            window_points: 0,
            max_power: spec.max_power.0 as usize,
            cap: spec.cap.0 as usize,
            tol: spec.tol.0,
            interior_only: options.interior_only,
        },
        hypotheses: None,
        decomposition: None,
        reducing: None,
        identities: None,
        warnings: Vec::new(),
        errors: Vec::new(),
        status: Status { exit_code: EXIT_OK, hypotheses_pass: None },
        timing: None,
    };
    if let Err(message) = stages(spec, options, &mut report) {
        report.errors.push(message);
    }
    let exit_code = if !report.errors.is_empty() {
        EXIT_ERROR
    } else if report.status.hypotheses_pass == Some(false) {
        EXIT_HYPOTHESES_FAIL
    } else {
        EXIT_OK
    };
    report.status.exit_code = exit_code;
    if options.timing {
        report.timing = Some(Timing { elapsed_seconds: start.elapsed().as_secs_f64() });
    }
    Outcome { report, exit_code }
}

fn stages(spec: &TupleSpec, options: &RunOptions, report: &mut ReportDocument) -> Result<(), String> {
    let problem = spec.build().map_err(|e| e.to_string())?;
    let (ops, window, tol) = (&problem.operators, &problem.window, problem.tol);
    let n = ops.len();
    report.settings.window_points = window.cardinality();

    let wants = |a: Action| options.actions.contains(&a);
    let hypotheses = check_equal_range(ops, problem.cap, window, tol).map_err(|e| e.to_string())?;
    let passes = hypotheses.passes();
    report.status.hypotheses_pass = Some(passes);
    report.hypotheses = Some(HypothesesSection::from_report(&hypotheses));
    if !passes {
        report.warnings.push(WarningEntry::new(
            "HypothesesNotSatisfied",
            format!("equal-range conditions fail up to power {}; blocks are candidates only", problem.cap),
        ));
    }

    if wants(Action::Decompose) || wants(Action::Verify) {
        let decomposition = wold_tuple(ops, window, problem.max_power, tol).map_err(|e| e.to_string())?.with_hypotheses(passes);
        report.warnings.extend(decomposition.warnings.iter().map(WarningEntry::from));
        let section = DecompositionSection::from_decomposition(&decomposition, options.interior_only);
        if passes && section.total_dim != section.interior_points {
            report.warnings.push(WarningEntry::new(
                "Incomplete",
                format!("blocks span {} of {} interior dimensions", section.total_dim, section.interior_points),
            ));
        }
        if let Some(recorded) = &options.recorded {
            compare_recorded(recorded, &section)?;
        }
        report.decomposition = Some(section);
        let reducing = verify_reducing(ops, &decomposition);
        report.reducing = Some(ReducingSection::from_report(&reducing, n));
    }

    if wants(Action::Verify) {
        let identities = verify_wandering_identities(ops, window, tol).map_err(|e| e.to_string())?;
        report.identities = Some(IdentitiesSection::from_report(&identities, n));
    }
    Ok(())
}

fn compare_recorded(recorded: &DecompositionSection, computed: &DecompositionSection) -> Result<(), String> {
    if recorded.blocks.len() != computed.blocks.len() {
        return Err(format!(
            "recorded decomposition has {} blocks, recomputed has {}",
            recorded.blocks.len(),
            computed.blocks.len()
        ));
    }
    for (r, c) in recorded.blocks.iter().zip(&computed.blocks) {
        if r.subset != c.subset || r.dim != c.dim || r.classes != c.classes {
            return Err(format!(
                "recorded block {:?} (dim {}) disagrees with recomputed block {:?} (dim {})",
                r.subset, r.dim, c.subset, c.dim
            ));
        }
    }
    Ok(())
}

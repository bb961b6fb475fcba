//! Tuple specification files.
//!
//! A spec names a lattice, a list of operators on it, a window and the
//! numerical settings. Operators and weight rules use serde's external
//! tagging, so a bad field is reported with its full path:
//!
//! ```json
//! {
//!   "lattice": [["half_line"]],
//!   "operators": [{"unilateral_shift": {"axis": 0}}],
//!   "window": {"depth": 8}
//! }
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use wold_core::{AxisKind, Block, Lattice, OperatorKind, StructuredOperator, WeightRule, Window, C64};

/// Allowed deviation of `|w|` from one for listed weights.
pub const WEIGHT_TOL: f64 = 1e-9;
pub const MAX_TOL: f64 = 1e-2;

pub const DEFAULT_MAX_POWER: usize = wold_core::DEFAULT_MAX_POWER;
pub const DEFAULT_CAP: usize = wold_core::DEFAULT_CAP;
pub const DEFAULT_TOL: f64 = 1e-10;

/// A spec that could not be read, with the offending field.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct ParseError {
    /// Dotted path of the field, `.` for the document itself.
    pub field: String,
    pub reason: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParseError({}): {}", self.field, self.reason)?;
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " at line {line}, column {column}")?;
        }
        Ok(())
    }
}

impl ParseError {
    pub fn field(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { field: field.into(), reason: reason.into(), line: None, column: None }
    }
}

/// Complex number written as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Complex(pub C64);

impl From<[f64; 2]> for Complex {
    fn from([re, im]: [f64; 2]) -> Self {
        Complex(C64::new(re, im))
    }
}

impl From<Complex> for [f64; 2] {
    fn from(c: Complex) -> Self {
        [c.0.re, c.0.im]
    }
}

/// Complex number of modulus one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex", into = "Complex")]
pub struct Unimodular(pub C64);

impl TryFrom<Complex> for Unimodular {
    type Error = String;

    fn try_from(c: Complex) -> Result<Self, String> {
        let modulus = c.0.norm();
        if (modulus - 1.0).abs() > WEIGHT_TOL {
            return Err(format!("weight [{}, {}] has modulus {modulus}, expected 1", c.0.re, c.0.im));
        }
        Ok(Unimodular(c.0))
    }
}

impl From<Unimodular> for Complex {
    fn from(u: Unimodular) -> Self {
        Complex(u.0)
    }
}

/// Integer that is at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Positive(pub u64);

impl TryFrom<u64> for Positive {
    type Error = String;

    fn try_from(v: u64) -> Result<Self, String> {
        if v == 0 {
            Err("must be at least 1".into())
        } else {
            Ok(Positive(v))
        }
    }
}

impl From<Positive> for u64 {
    fn from(p: Positive) -> Self {
        p.0
    }
}

/// Tolerance in `(0, 1e-2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(pub f64);

impl TryFrom<f64> for Tolerance {
    type Error = String;

    fn try_from(v: f64) -> Result<Self, String> {
        if v > 0.0 && v <= MAX_TOL {
            Ok(Tolerance(v))
        } else {
            Err(format!("tolerance {v} is outside (0, {MAX_TOL}]"))
        }
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> Self {
        t.0
    }
}

/// Non-empty list of unimodular weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Unimodular>", into = "Vec<Unimodular>")]
pub struct WeightList(pub Vec<Unimodular>);

impl TryFrom<Vec<Unimodular>> for WeightList {
    type Error = String;

    fn try_from(v: Vec<Unimodular>) -> Result<Self, String> {
        if v.is_empty() {
            Err("weight list is empty".into())
        } else {
            Ok(WeightList(v))
        }
    }
}

impl From<WeightList> for Vec<Unimodular> {
    fn from(w: WeightList) -> Self {
        w.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisSpec {
    HalfLine,
    FullLine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant(Unimodular),
    Periodic(WeightList),
    /// `w_k = exp(2 pi i k numerator / denominator)`.
    GeometricPhase { numerator: i64, denominator: Positive },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant(Unimodular(C64::new(1.0, 0.0)))
    }
}

impl WeightSpec {
    fn to_rule(&self) -> WeightRule {
        match self {
            WeightSpec::Constant(u) => WeightRule::Constant(u.0),
            WeightSpec::Periodic(list) => WeightRule::Periodic(list.0.iter().map(|u| u.0).collect()),
            WeightSpec::GeometricPhase { numerator, denominator } => WeightRule::phase(*numerator, denominator.0),
        }
    }

    fn is_unit(&self) -> bool {
        *self == WeightSpec::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Identity,
    UnilateralShift {
        axis: usize,
        #[serde(default, skip_serializing_if = "WeightSpec::is_unit")]
        weights: WeightSpec,
    },
    BilateralShift {
        axis: usize,
        #[serde(default, skip_serializing_if = "WeightSpec::is_unit")]
        weights: WeightSpec,
    },
    DiagonalUnitary {
        axis: usize,
        phases: WeightSpec,
    },
    /// Product in mathematical order: the last factor acts first.
    Compose(Vec<OperatorSpec>),
    /// Primitive factors on distinct axes.
    Tensor(Vec<OperatorSpec>),
    /// One operator per lattice block.
    DirectSum(Vec<OperatorSpec>),
}

impl OperatorSpec {
    pub fn to_kind(&self) -> OperatorKind {
        let all = |list: &[OperatorSpec]| list.iter().map(OperatorSpec::to_kind).collect();
        match self {
            OperatorSpec::Identity => OperatorKind::Identity,
            OperatorSpec::UnilateralShift { axis, weights } => {
                OperatorKind::UnilateralShift { axis: *axis, weights: weights.to_rule() }
            }
            OperatorSpec::BilateralShift { axis, weights } => {
                OperatorKind::BilateralShift { axis: *axis, weights: weights.to_rule() }
            }
            OperatorSpec::DiagonalUnitary { axis, phases } => {
                OperatorKind::DiagonalUnitary { axis: *axis, phases: phases.to_rule() }
            }
            OperatorSpec::Compose(list) => OperatorKind::Compose(all(list)),
            OperatorSpec::Tensor(list) => OperatorKind::Tensor(all(list)),
            OperatorSpec::DirectSum(list) => OperatorKind::DirectSum(all(list)),
        }
    }
}

/// Either one depth for every axis or one depth per block and axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<Positive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<Vec<Positive>>>,
    /// Largest displacement any computation may reach past the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Check,
    Decompose,
    Verify,
}

fn default_max_power() -> Positive {
    Positive(DEFAULT_MAX_POWER as u64)
}

fn default_cap() -> Positive {
    Positive(DEFAULT_CAP as u64)
}

fn default_tol() -> Tolerance {
    Tolerance(DEFAULT_TOL)
}

fn default_actions() -> Vec<Action> {
    vec![Action::Check, Action::Decompose, Action::Verify]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Axis kinds, one list per block.
    pub lattice: Vec<Vec<AxisSpec>>,
    pub operators: Vec<OperatorSpec>,
    pub window: WindowSpec,
    #[serde(default = "default_max_power")]
    pub max_power: Positive,
    /// Largest power tested by the equal-range checks.
    #[serde(default = "default_cap")]
    pub cap: Positive,
    #[serde(default = "default_tol")]
    pub tol: Tolerance,
    #[serde(default = "default_actions")]
    pub actions: Vec<Action>,
}

/// Core objects described by a spec.
#[derive(Clone, Debug)]
pub struct Problem {
    pub lattice: Lattice,
    pub operators: Vec<StructuredOperator>,
    pub window: Window,
    pub max_power: usize,
    pub cap: usize,
    pub tol: f64,
}

impl TupleSpec {
    pub fn build(&self) -> Result<Problem, ParseError> {
        if self.lattice.is_empty() {
            return Err(ParseError::field("lattice", "at least one block is required"));
        }
        let blocks = self
            .lattice
            .iter()
            .map(|axes| {
                Block::new(
                    axes.iter()
                        .map(|a| match a {
                            AxisSpec::HalfLine => AxisKind::HalfLine,
                            AxisSpec::FullLine => AxisKind::FullLine,
                        })
                        .collect(),
                )
            })
            .collect();
        let lattice = Lattice::new(blocks).map_err(|e| ParseError::field("lattice", e.to_string()))?;
        if self.operators.is_empty() {
            return Err(ParseError::field("operators", "at least one operator is required"));
        }
        if self.operators.len() > wold_core::MAX_OPERATORS {
            return Err(ParseError::field(
                "operators",
                format!("{} operators given, at most {} are supported", self.operators.len(), wold_core::MAX_OPERATORS),
            ));
        }
        let operators = self
            .operators
            .iter()
            .enumerate()
            .map(|(i, op)| {
                StructuredOperator::new(op.to_kind(), &lattice).map_err(|e| ParseError::field(format!("operators[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let window = match (&self.window.depth, &self.window.depths) {
            (Some(d), None) => Window::new(&lattice, depth_u32(d.0, "window.depth")?),
            (None, Some(depths)) => {
                let depths = depths
                    .iter()
                    .map(|row| row.iter().map(|d| depth_u32(d.0, "window.depths")).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Window::with_depths(&lattice, &depths).map_err(|e| ParseError::field("window.depths", e.to_string()))?
            }
            _ => return Err(ParseError::field("window", "give exactly one of `depth` and `depths`")),
        };
        let window = match self.window.guard {
            Some(g) => window.with_guard(g),
            None => window,
        };
        Ok(Problem {
            lattice,
            operators,
            window,
            max_power: self.max_power.0 as usize,
            cap: self.cap.0 as usize,
            tol: self.tol.0,
        })
    }

    /// Replaces the window by a uniform one of depth `depth`.
    pub fn set_depth(&mut self, depth: u64) -> Result<(), ParseError> {
        let depth = Positive::try_from(depth).map_err(|e| ParseError::field("--depth", e))?;
        self.window.depth = Some(depth);
        self.window.depths = None;
        Ok(())
    }
}

fn depth_u32(d: u64, field: &str) -> Result<u32, ParseError> {
    u32::try_from(d).map_err(|_| ParseError::field(field, format!("depth {d} is too large")))
}

/// Reads and validates a spec, including that every operator fits the lattice.
pub fn parse_spec(text: &str) -> Result<TupleSpec, ParseError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: TupleSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ParseError {
            field: path,
            reason: strip_position(&inner.to_string()),
            line: Some(inner.line()),
            column: Some(inner.column()),
        }
    })?;
    spec.build()?;
    Ok(spec)
}

/// serde_json appends " at line L column C" to its messages; the position
/// is kept in separate fields instead.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

pub fn to_json(spec: &TupleSpec) -> String {
    serde_json::to_string_pretty(spec).expect("specs always serialize")
}

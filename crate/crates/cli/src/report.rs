//! Report documents and their JSON and text renderings.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use wold_core::{
    HypothesisReport, IdentityKind, OperatorClass, ReducingReport, SparseVector, TupleDecomposition, Verdict,
    WanderingReport, Warning, WarningKind,
};

use crate::spec::{Action, TupleSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: Action,
    /// The spec after command-line overrides.
    pub spec: TupleSpec,
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<HypothesesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reducing: Option<ReducingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<IdentitiesSection>,
    pub warnings: Vec<WarningEntry>,
    pub errors: Vec<String>,
    pub status: Status,
    /// Wall-clock figures, present only when requested so that reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub window_points: usize,
    pub max_power: usize,
    pub cap: usize,
    pub tol: f64,
    pub interior_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses_pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictName {
    Pass,
    Fail,
}

impl From<Verdict> for VerdictName {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Pass => VerdictName::Pass,
            Verdict::Fail => VerdictName::Fail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassName {
    Shift,
    Unitary,
    Inconclusive,
}

impl From<OperatorClass> for ClassName {
    fn from(c: OperatorClass) -> Self {
        match c {
            OperatorClass::Shift => ClassName::Shift,
            OperatorClass::Unitary => ClassName::Unitary,
            OperatorClass::Inconclusive => ClassName::Inconclusive,
        }
    }
}

/// Sparse vector as `[[block, coords...], [re, im]]` entries.
pub type VectorEntries = Vec<(Vec<i64>, [f64; 2])>;

fn entries(v: &SparseVector) -> VectorEntries {
    v.iter()
        .map(|(p, z)| {
            let mut point = vec![p.block as i64];
            point.extend(p.coords.iter().copied());
            (point, [z.re, z.im])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesesSection {
    pub cap: usize,
    pub tol: f64,
    pub coherence_factor: f64,
    pub plain: ConditionEntry,
    pub starred: ConditionEntry,
    /// Range gaps and projection deviations agree on every comparison.
    pub coherent: bool,
    pub commutation: Vec<CommutationEntry>,
    pub checks: Vec<CheckEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub verdict: VerdictName,
    pub worst_gap: f64,
    pub worst_deviation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub i: usize,
    pub j: usize,
    pub mi: usize,
    pub mj: usize,
    /// The adjoint sits on operator `j` instead of `i`.
    pub reversed: bool,
    pub gap: f64,
    pub vector: VectorEntries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub gap: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub i: usize,
    pub j: usize,
    pub mi: usize,
    pub mj: usize,
    pub plain: ComparisonEntry,
    pub starred: ComparisonEntry,
    pub starred_reversed: ComparisonEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutationEntry {
    pub i: usize,
    pub j: usize,
    pub commutator: f64,
    pub star_commutator: f64,
    pub commuting: bool,
    pub doubly_commuting: bool,
}

impl HypothesesSection {
    pub fn from_report(r: &HypothesisReport) -> Self {
        let condition = |c: &wold_core::ConditionSummary| ConditionEntry {
            verdict: c.verdict.into(),
            worst_gap: c.worst_gap,
            worst_deviation: c.worst_deviation,
            witness: c.witness.as_ref().map(|w| WitnessEntry {
                i: w.i,
                j: w.j,
                mi: w.mi,
                mj: w.mj,
                reversed: w.reversed,
                gap: w.gap,
                vector: entries(&w.vector),
            }),
        };
        let cmp = |c: &wold_core::RangeComparison| ComparisonEntry { gap: c.gap, deviation: c.deviation };
        Self {
            cap: r.cap,
            tol: r.tol,
            coherence_factor: r.coherence_factor,
            plain: condition(&r.plain),
            starred: condition(&r.starred),
            coherent: r.coherent,
            commutation: r
                .commutation
                .iter()
                .map(|f| CommutationEntry {
                    i: f.i,
                    j: f.j,
                    commutator: f.commutator,
                    star_commutator: f.star_commutator,
                    commuting: f.commuting,
                    doubly_commuting: f.doubly_commuting,
                })
                .collect(),
            checks: r
                .checks
                .iter()
                .map(|c| CheckEntry {
                    i: c.i,
                    j: c.j,
                    mi: c.mi,
                    mj: c.mj,
                    plain: cmp(&c.plain),
                    starred: cmp(&c.starred),
                    starred_reversed: cmp(&c.starred_reversed),
                })
                .collect(),
        }
    }

    pub fn passes(&self) -> bool {
        self.plain.verdict == VerdictName::Pass && self.starred.verdict == VerdictName::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSection {
    pub interior_points: usize,
    pub total_dim: usize,
    pub completeness_residual: f64,
    pub orthogonality_worst: f64,
    pub joint_wandering_dim: usize,
    pub worst_cross_check_gap: f64,
    pub inconclusive_count: usize,
    pub blocks: Vec<BlockEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    /// Operators acting as shifts on the block.
    pub subset: Vec<usize>,
    /// Dimension on the interior window.
    pub dim: usize,
    /// Dimension on the full window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wandering_dim: Option<usize>,
    pub classes: Vec<ClassName>,
    pub cross_check_gap: f64,
    pub stabilization_gap: f64,
}

impl DecompositionSection {
    pub fn from_decomposition(d: &TupleDecomposition, interior_only: bool) -> Self {
        let window_only = |v: usize| if interior_only { None } else { Some(v) };
        Self {
            interior_points: d.interior_dim(),
            total_dim: d.total_dim(),
            completeness_residual: d.completeness_residual,
            orthogonality_worst: d.orthogonality_worst,
            joint_wandering_dim: d.joint_wandering_dim(),
            worst_cross_check_gap: d.worst_cross_check_gap(),
            inconclusive_count: d.inconclusive_count(),
            blocks: d
                .blocks
                .iter()
                .map(|b| BlockEntry {
                    subset: b.subset.members(d.n),
                    dim: b.dim(),
                    window_dim: window_only(b.window_dim),
                    wandering_dim: window_only(b.wandering_dim),
                    classes: b.classes.iter().map(|&c| c.into()).collect(),
                    cross_check_gap: b.cross_check_gap,
                    stabilization_gap: b.stabilization_gap,
                })
                .collect(),
        }
    }

    pub fn block(&self, subset: &[usize]) -> Option<&BlockEntry> {
        self.blocks.iter().find(|b| b.subset == subset)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducingSection {
    pub worst: f64,
    pub checks: Vec<ReducingEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducingEntry {
    pub subset: Vec<usize>,
    pub operator: usize,
    pub forward: f64,
    pub adjoint: f64,
}

impl ReducingSection {
    pub fn from_report(r: &ReducingReport, n: usize) -> Self {
        Self {
            worst: r.worst,
            checks: r
                .checks
                .iter()
                .map(|c| ReducingEntry {
                    subset: c.subset.members(n),
                    operator: c.operator,
                    forward: c.forward,
                    adjoint: c.adjoint,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    ForwardInvariance,
    AdjointInvariance,
    WanderingDifference,
    ExchangeOutside,
    ExchangeShifts,
    ExchangeAdjoint,
    ExchangeInside,
}

impl From<IdentityKind> for IdentityName {
    fn from(k: IdentityKind) -> Self {
        match k {
            IdentityKind::ForwardInvariance => IdentityName::ForwardInvariance,
            IdentityKind::AdjointInvariance => IdentityName::AdjointInvariance,
            IdentityKind::WanderingDifference => IdentityName::WanderingDifference,
            IdentityKind::ExchangeOutside => IdentityName::ExchangeOutside,
            IdentityKind::ExchangeShifts => IdentityName::ExchangeShifts,
            IdentityKind::ExchangeAdjoint => IdentityName::ExchangeAdjoint,
            IdentityKind::ExchangeInside => IdentityName::ExchangeInside,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitiesSection {
    pub hypotheses_satisfied: bool,
    pub invariance_worst: f64,
    pub difference_worst: f64,
    pub exchange_worst: f64,
    pub checks: Vec<IdentityEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub kind: IdentityName,
    pub subset: Vec<usize>,
    pub operator: usize,
    pub prefix: usize,
    pub power: usize,
    pub gap: f64,
}

impl IdentitiesSection {
    pub fn from_report(r: &WanderingReport, n: usize) -> Self {
        Self {
            hypotheses_satisfied: r.hypotheses_satisfied,
            invariance_worst: r.invariance_worst,
            difference_worst: r.difference_worst,
            exchange_worst: r.exchange_worst,
            checks: r
                .checks
                .iter()
                .map(|c| IdentityEntry {
                    kind: c.kind.into(),
                    subset: c.subset.members(n),
                    operator: c.operator,
                    prefix: c.prefix,
                    power: c.power,
                    gap: c.gap,
                })
                .collect(),
        }
    }

    pub fn worst(&self) -> f64 {
        self.invariance_worst.max(self.difference_worst).max(self.exchange_worst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WarningEntry {
    pub kind: String,
    pub message: String,
}

impl WarningEntry {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into() }
    }
}

impl From<&Warning> for WarningEntry {
    fn from(w: &Warning) -> Self {
        let kind = match w.kind {
            WarningKind::NotStabilized => "NotStabilized",
            WarningKind::Inconclusive => "Inconclusive",
            WarningKind::ClassMismatch => "ClassMismatch",
        };
        WarningEntry::new(kind, w.message.clone())
    }
}

/// Pretty JSON with every float written to 17 significant digits.
struct Precise<'a>(PrettyFormatter<'a>);

impl Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes any value as pretty JSON with 17-digit floats.
pub fn to_precise_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("reports always serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

fn subset_label(members: &[usize]) -> String {
    let inner: Vec<String> = members.iter().map(|m| m.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn verdict(v: VerdictName) -> &'static str {
    match v {
        VerdictName::Pass => "PASS",
        VerdictName::Fail => "FAIL",
    }
}

/// Human-readable summary.
pub fn to_text(r: &ReportDocument) -> String {
    let mut s = String::new();
    let name = r.spec.name.as_deref().unwrap_or("unnamed tuple");
    let _ = writeln!(s, "{name}: {} operators, {} window points", r.spec.operators.len(), r.settings.window_points);
    let _ = writeln!(s, "max power {}, cap {}, tol {:e}", r.settings.max_power, r.settings.cap, r.settings.tol);
    if let Some(h) = &r.hypotheses {
        let _ = writeln!(s, "\nequal-range conditions (powers up to {})", h.cap);
        for (label, c) in [("plain", &h.plain), ("starred", &h.starred)] {
            let _ = writeln!(s, "  {label:<8} {}  worst gap {:.3e}", verdict(c.verdict), c.worst_gap);
            if let Some(w) = &c.witness {
                let _ = writeln!(
                    s,
                    "           witness for pair ({}, {}) at powers ({}, {}){}: gap {:.3e}, {} entries",
                    w.i,
                    w.j,
                    w.mi,
                    w.mj,
                    if w.reversed { ", adjoint on the second" } else { "" },
                    w.gap,
                    w.vector.len()
                );
            }
        }
        let _ = writeln!(s, "  coherent with projections: {}", h.coherent);
        for f in &h.commutation {
            let _ = writeln!(
                s,
                "  pair ({}, {}): commuting {}, doubly commuting {}",
                f.i, f.j, f.commuting, f.doubly_commuting
            );
        }
    }
    if let Some(d) = &r.decomposition {
        let _ = writeln!(s, "\nblocks on the interior window ({} points)", d.interior_points);
        for b in &d.blocks {
            let classes: Vec<&str> = b
                .classes
                .iter()
                .map(|c| match c {
                    ClassName::Shift => "S",
                    ClassName::Unitary => "U",
                    ClassName::Inconclusive => "?",
                })
                .collect();
            let _ = writeln!(
                s,
                "  {:<12} dim {:>6}  classes [{}]  cross-check {:.3e}",
                subset_label(&b.subset),
                b.dim,
                classes.join(""),
                b.cross_check_gap
            );
        }
        let _ = writeln!(s, "  total {} of {}, joint wandering dim {}", d.total_dim, d.interior_points, d.joint_wandering_dim);
        let _ = writeln!(
            s,
            "  completeness residual {:.3e}, orthogonality {:.3e}",
            d.completeness_residual, d.orthogonality_worst
        );
    }
    if let Some(red) = &r.reducing {
        let _ = writeln!(s, "\nreducing check worst residual {:.3e}", red.worst);
    }
    if let Some(id) = &r.identities {
        let _ = writeln!(
            s,
            "identities: invariance {:.3e}, difference {:.3e}, exchange {:.3e}{}",
            id.invariance_worst,
            id.difference_worst,
            id.exchange_worst,
            if id.hypotheses_satisfied { "" } else { " (hypotheses not satisfied)" }
        );
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning [{}]: {}", w.kind, w.message);
    }
    for e in &r.errors {
        let _ = writeln!(s, "error: {e}");
    }
    let _ = writeln!(s, "exit code {}", r.status.exit_code);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let json = to_precise_json(&Timing { elapsed_seconds: 0.1 });
        assert!(json.contains("1.0000000000000001e-1"), "{json}");
        let back: Timing = serde_json::from_str(&json).unwrap();
        assert_eq!(back.elapsed_seconds, 0.1);
    }

    #[test]
    fn awkward_floats_round_trip() {
        for v in [0.0, -0.0, 1e-300, 5e-324, f64::MAX, 1.0 / 3.0, -2.5e17] {
            let json = to_precise_json(&Timing { elapsed_seconds: v });
            let back: Timing = serde_json::from_str(&json).unwrap();
            assert_eq!(back.elapsed_seconds.to_bits(), v.to_bits());
        }
    }
}

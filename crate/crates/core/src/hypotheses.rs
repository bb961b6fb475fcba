//! Window checks of the equal-range conditions
//! `R(Vi^a Vj^b) = R(Vj^b Vi^a)` and `R(Vi*^a Vj^b) = R(Vj^b Vi*^a)`,
//! plus commutation flags used for reporting.

use crate::error::{Error, Result};
use crate::lattice::Window;
use crate::operator::{projection_deviation, range_of_word, window_norm, StructuredOperator, Word};
use crate::subspace::gap_with_witness;
use crate::vector::SparseVector;

/// Default largest power tested per operator.
pub const DEFAULT_CAP: usize = 3;

/// Range equality holds iff the window projection deviation is at most
/// this multiple of `tol`.
pub const COHERENCE_FACTOR: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One range comparison, judged by principal angles and by projections.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeComparison {
    pub gap: f64,
    pub deviation: f64,
    /// Unit vector in one range at distance `gap` from the other.
    pub witness: Option<SparseVector>,
}

impl RangeComparison {
    pub fn passes(&self, tol: f64) -> bool {
        self.gap <= tol
    }

    /// Whether the two judgments agree.
    pub fn coherent(&self, tol: f64) -> bool {
        (self.gap <= tol) == (self.deviation <= COHERENCE_FACTOR * tol)
    }
}

/// Compares `R(x)` and `R(y)` on `window`.
pub fn compare_ranges(x: &Word<'_>, y: &Word<'_>, window: &Window, tol: f64) -> Result<RangeComparison> {
    let rx = range_of_word(x, window, tol)?;
    let ry = range_of_word(y, window, tol)?;
    let (gap, witness) = gap_with_witness(&rx, &ry);
    let deviation = projection_deviation(x, y, window);
    Ok(RangeComparison { gap, deviation, witness: witness.map(|w| w.with_canonical_phase()) })
}

/// All comparisons for one pair `i < j` at powers `(mi, mj)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerCheck {
    pub i: usize,
    pub j: usize,
    pub mi: usize,
    pub mj: usize,
    /// `R(Vi^mi Vj^mj)` against `R(Vj^mj Vi^mi)`.
    pub plain: RangeComparison,
    /// `R(Vi*^mi Vj^mj)` against `R(Vj^mj Vi*^mi)`.
    pub starred: RangeComparison,
    /// `R(Vj*^mj Vi^mi)` against `R(Vi^mi Vj*^mj)`.
    pub starred_reversed: RangeComparison,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Plain,
    Starred,
}

/// Worst case of one condition over all tested pairs and powers.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionSummary {
    pub verdict: Verdict,
    pub worst_gap: f64,
    pub worst_deviation: f64,
    pub witness: Option<Witness>,
}

/// Certificate attached to a failed condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub mi: usize,
    pub mj: usize,
    /// Whether the failing comparison was the `Vj*` form.
    pub reversed: bool,
    pub gap: f64,
    pub vector: SparseVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutationFlags {
    pub i: usize,
    pub j: usize,
    /// `|Vi Vj - Vj Vi|` on the window.
    pub commutator: f64,
    /// Larger of `|Vi* Vj - Vj Vi*|` and `|Vj* Vi - Vi Vj*|`.
    pub star_commutator: f64,
    pub commuting: bool,
    pub doubly_commuting: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub cap: usize,
    pub tol: f64,
    pub coherence_factor: f64,
    pub checks: Vec<PowerCheck>,
    pub plain: ConditionSummary,
    pub starred: ConditionSummary,
    /// Both judgments agreed on every comparison.
    pub coherent: bool,
    pub commutation: Vec<CommutationFlags>,
}

impl HypothesisReport {
    pub fn passes(&self) -> bool {
        self.plain.verdict.is_pass() && self.starred.verdict.is_pass()
    }

    pub fn worst_gap(&self) -> f64 {
        self.plain.worst_gap.max(self.starred.worst_gap)
    }

    pub fn commuting(&self) -> bool {
        self.commutation.iter().all(|f| f.commuting)
    }

    pub fn doubly_commuting(&self) -> bool {
        self.commutation.iter().all(|f| f.doubly_commuting)
    }
}

fn check_shared_lattice(tuple: &[StructuredOperator], window: &Window) -> Result<()> {
    if tuple.iter().any(|op| op.lattice() != window.lattice()) {
        return Err(Error::InvalidArgument("operators and window must share one lattice".into()));
    }
    Ok(())
}

fn pair_check(
    vi: &StructuredOperator,
    vj: &StructuredOperator,
    (i, j, mi, mj): (usize, usize, usize, usize),
    window: &Window,
    tol: f64,
) -> Result<PowerCheck> {
    let (pi, pj) = (Word::power(vi, mi), Word::power(vj, mj));
    let (si, sj) = (Word::adjoint_power(vi, mi), Word::adjoint_power(vj, mj));
    let plain = compare_ranges(&pi.clone().then(pj.clone()), &pj.clone().then(pi.clone()), window, tol)?;
    let starred = compare_ranges(&si.clone().then(pj.clone()), &pj.then(si), window, tol)?;
    let starred_reversed = compare_ranges(&sj.clone().then(pi.clone()), &pi.then(sj), window, tol)?;
    Ok(PowerCheck { i, j, mi, mj, plain, starred, starred_reversed })
}

fn summarize(checks: &[PowerCheck], condition: Condition, tol: f64) -> ConditionSummary {
    let mut worst_gap: f64 = 0.0;
    let mut worst_deviation: f64 = 0.0;
    let mut witness: Option<Witness> = None;
    for c in checks {
        let parts: Vec<(&RangeComparison, bool)> = match condition {
            Condition::Plain => vec![(&c.plain, false)],
            Condition::Starred => vec![(&c.starred, false), (&c.starred_reversed, true)],
        };
        for (cmp, reversed) in parts {
            worst_deviation = worst_deviation.max(cmp.deviation);
            if cmp.gap > worst_gap {
                worst_gap = cmp.gap;
                if !cmp.passes(tol) {
                    witness = cmp.witness.clone().map(|vector| Witness {
                        i: c.i,
                        j: c.j,
                        mi: c.mi,
                        mj: c.mj,
                        reversed,
                        gap: cmp.gap,
                        vector,
                    });
                }
            }
        }
    }
    ConditionSummary { verdict: Verdict::from_pass(worst_gap <= tol), worst_gap, worst_deviation, witness }
}

/// Tests both equal-range conditions for every pair `i < j` and powers
/// `1 <= mi, mj <= cap` on `window`.
pub fn check_equal_range(tuple: &[StructuredOperator], cap: usize, window: &Window, tol: f64) -> Result<HypothesisReport> {
    if cap == 0 {
        return Err(Error::InvalidArgument("power cap must be at least 1".into()));
    }
    check_shared_lattice(tuple, window)?;
    let mut checks = Vec::new();
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            for mi in 1..=cap {
                for mj in 1..=cap {
                    checks.push(pair_check(&tuple[i], &tuple[j], (i, j, mi, mj), window, tol)?);
                }
            }
        }
    }
    let plain = summarize(&checks, Condition::Plain, tol);
    let starred = summarize(&checks, Condition::Starred, tol);
    let coherent = checks
        .iter()
        .all(|c| c.plain.coherent(tol) && c.starred.coherent(tol) && c.starred_reversed.coherent(tol));
    let commutation = classify_commutation(tuple, window, tol);
    Ok(HypothesisReport { cap, tol, coherence_factor: COHERENCE_FACTOR, checks, plain, starred, coherent, commutation })
}

/// Per-pair outcome of the two equivalent starred conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct StarAgreement {
    pub i: usize,
    pub j: usize,
    /// `R(Vi*^a Vj^b) = R(Vj^b Vi*^a)` for all tested powers.
    pub forward: Verdict,
    /// `R(Vj*^b Vi^a) = R(Vi^a Vj*^b)` for all tested powers.
    pub backward: Verdict,
    /// The two verdicts coincide at every tested power pair.
    pub agree: bool,
}

/// Checks that the two starred conditions hold or fail together, which
/// is guaranteed once the plain condition holds.
pub fn check_star_equivalence(
    tuple: &[StructuredOperator],
    cap: usize,
    window: &Window,
    tol: f64,
) -> Result<Vec<StarAgreement>> {
    let report = check_equal_range(tuple, cap, window, tol)?;
    if !report.plain.verdict.is_pass() {
        return Err(Error::PreconditionUnverified(format!(
            "plain equal-range condition fails with gap {:.3e}",
            report.plain.worst_gap
        )));
    }
    let mut out = Vec::new();
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            let pair: Vec<&PowerCheck> = report.checks.iter().filter(|c| c.i == i && c.j == j).collect();
            let forward = pair.iter().all(|c| c.starred.passes(tol));
            let backward = pair.iter().all(|c| c.starred_reversed.passes(tol));
            let agree = pair.iter().all(|c| c.starred.passes(tol) == c.starred_reversed.passes(tol));
            out.push(StarAgreement {
                i,
                j,
                forward: Verdict::from_pass(forward),
                backward: Verdict::from_pass(backward),
                agree,
            });
        }
    }
    Ok(out)
}

/// Commutator norms for every pair `i < j`, on `l2(window)`.
pub fn classify_commutation(tuple: &[StructuredOperator], window: &Window, tol: f64) -> Vec<CommutationFlags> {
    let mut out = Vec::new();
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            let (vi, vj) = (&tuple[i], &tuple[j]);
            let commutator = window_norm(window, |e| vi.apply(&vj.apply(e)).sub(&vj.apply(&vi.apply(e))));
            let star_ij = window_norm(window, |e| vi.apply_adjoint(&vj.apply(e)).sub(&vj.apply(&vi.apply_adjoint(e))));
            let star_ji = window_norm(window, |e| vj.apply_adjoint(&vi.apply(e)).sub(&vi.apply(&vj.apply_adjoint(e))));
            let star_commutator = star_ij.max(star_ji);
            let commuting = commutator <= tol;
            out.push(CommutationFlags {
                i,
                j,
                commutator,
                star_commutator,
                commuting,
                doubly_commuting: commuting && star_commutator <= tol,
            });
        }
    }
    out
}

/// Gap between `R(V1^m1 V2^m2 ... Vn^mn)` and the same range with the
/// first factor moved to the end.
pub fn cyclic_range_gap(tuple: &[StructuredOperator], powers: &[usize], window: &Window, tol: f64) -> Result<f64> {
    if powers.len() != tuple.len() || tuple.is_empty() {
        return Err(Error::InvalidArgument("one power per operator is required".into()));
    }
    let word = |order: &mut dyn Iterator<Item = usize>| {
        order.fold(Word::identity(), |w, k| w.then(Word::power(&tuple[k], powers[k])))
    };
    let n = tuple.len();
    let x = word(&mut (0..n));
    let y = word(&mut (1..n).chain(0..1));
    Ok(compare_ranges(&x, &y, window, tol)?.gap)
}

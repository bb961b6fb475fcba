//! Index lattices of sequence spaces and finite windows into them.
//!
//! A [`Lattice`] is a finite direct sum of blocks, each block a product of
//! half-line (`Z+`) and full-line (`Z`) axes. Vectors of the Hilbert space
//! are indexed by [`LatticePoint`]s; a [`Window`] is a finite box in every
//! block and is what all numerical computations are restricted to.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Integer coordinates of a lattice point inside its block.
pub type Coords = SmallVec<[i64; 4]>;

/// Guard margin assigned to windows that do not set one explicitly.
pub const DEFAULT_GUARD: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxisKind {
    /// Coordinates `0, 1, 2, ...`.
    HalfLine,
    /// Coordinates `..., -1, 0, 1, ...`.
    FullLine,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub axes: Vec<AxisKind>,
}

impl Block {
    pub fn new(axes: Vec<AxisKind>) -> Self {
        Self { axes }
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }
}

/// Index set of a sequence space: a direct sum of product blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    blocks: Vec<Block>,
}

impl Lattice {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidLattice("a lattice needs at least one block".into()));
        }
        if let Some(b) = blocks.iter().position(|b| b.axes.is_empty()) {
            return Err(Error::InvalidLattice(format!("block {b} has no axes")));
        }
        Ok(Self { blocks })
    }

    /// Single block with the given axes.
    pub fn single(axes: Vec<AxisKind>) -> Self {
        Self::new(vec![Block::new(axes)]).expect("non-empty axis list")
    }

    /// `l2(Z+)`.
    pub fn half_line() -> Self {
        Self::single(vec![AxisKind::HalfLine])
    }

    /// `l2(Z)`.
    pub fn full_line() -> Self {
        Self::single(vec![AxisKind::FullLine])
    }

    /// `l2(Z+^k)`, e.g. the Hardy space of the polydisc for `k` variables.
    pub fn half_line_power(k: usize) -> Self {
        Self::single(vec![AxisKind::HalfLine; k])
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> Option<&Block> {
        self.blocks.get(b)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn axis_kind(&self, block: usize, axis: usize) -> Option<AxisKind> {
        self.blocks.get(block).and_then(|b| b.axes.get(axis).copied())
    }

    /// Whether `p` is a valid point of this lattice.
    pub fn contains(&self, p: &LatticePoint) -> bool {
        match self.blocks.get(p.block) {
            Some(block) => {
                block.axes.len() == p.coords.len()
                    && block
                        .axes
                        .iter()
                        .zip(&p.coords)
                        .all(|(k, &c)| *k == AxisKind::FullLine || c >= 0)
            }
            None => false,
        }
    }
}

/// A point of a [`Lattice`]: block index plus coordinates.
///
/// The derived order is lexicographic in `(block, coords)`; every ordered
/// output of the crate uses it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub block: usize,
    pub coords: Coords,
}

impl LatticePoint {
    pub fn new(block: usize, coords: &[i64]) -> Self {
        Self { block, coords: Coords::from_slice(coords) }
    }

    /// Point of a single-block lattice.
    pub fn at(coords: &[i64]) -> Self {
        Self::new(0, coords)
    }

    /// Copy of `self` with `coords[axis]` moved by `delta`.
    pub fn shifted(&self, axis: usize, delta: i64) -> Self {
        let mut q = self.clone();
        q.coords[axis] += delta;
        q
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.block)?;
        for c in &self.coords {
            write!(f, ", {c}")?;
        }
        write!(f, "]")
    }
}

/// Inclusive coordinate range `lo..=hi` on one axis. Empty when `hi < lo`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bound {
    pub lo: i64,
    pub hi: i64,
}

impl Bound {
    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, c: i64) -> bool {
        self.lo <= c && c <= self.hi
    }
}

/// Finite box in every block of a lattice.
///
/// `guard` is the largest total displacement a computation on this window
/// may inflate it by; requests beyond it fail with `GuardTooSmall`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    lattice: Lattice,
    bounds: Vec<Vec<Bound>>,
    guard: u32,
}

impl Window {
    /// Depth-`depth` window: `[0, depth]` on half-lines, `[-depth, depth]`
    /// on full lines.
    pub fn new(lattice: &Lattice, depth: u32) -> Self {
        let depths = lattice
            .blocks()
            .iter()
            .map(|b| vec![depth; b.rank()])
            .collect::<Vec<_>>();
        Self::with_depths(lattice, &depths).expect("shape taken from the lattice")
    }

    /// Window with an individual depth per block and axis.
    pub fn with_depths(lattice: &Lattice, depths: &[Vec<u32>]) -> Result<Self> {
        if depths.len() != lattice.num_blocks() {
            return Err(Error::InvalidWindow(format!(
                "expected depths for {} blocks, got {}",
                lattice.num_blocks(),
                depths.len()
            )));
        }
        let mut bounds = Vec::with_capacity(depths.len());
        for (b, (block, ds)) in lattice.blocks().iter().zip(depths).enumerate() {
            if ds.len() != block.rank() {
                return Err(Error::InvalidWindow(format!(
                    "block {b} has {} axes, got {} depths",
                    block.rank(),
                    ds.len()
                )));
            }
            bounds.push(
                block
                    .axes
                    .iter()
                    .zip(ds)
                    .map(|(kind, &d)| match kind {
                        AxisKind::HalfLine => Bound { lo: 0, hi: d as i64 },
                        AxisKind::FullLine => Bound { lo: -(d as i64), hi: d as i64 },
                    })
                    .collect(),
            );
        }
        Ok(Self { lattice: lattice.clone(), bounds, guard: DEFAULT_GUARD })
    }

    pub fn with_guard(mut self, guard: u32) -> Self {
        self.guard = guard;
        self
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn bound(&self, block: usize, axis: usize) -> Bound {
        self.bounds[block][axis]
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        match self.bounds.get(p.block) {
            Some(bs) => {
                bs.len() == p.coords.len() && bs.iter().zip(&p.coords).all(|(b, &c)| b.contains(c))
            }
            None => false,
        }
    }

    pub fn block_cardinality(&self, block: usize) -> usize {
        self.bounds[block].iter().map(Bound::len).product()
    }

    /// Number of lattice points in the window.
    pub fn cardinality(&self) -> usize {
        (0..self.bounds.len()).map(|b| self.block_cardinality(b)).sum()
    }

    /// Points of the window in lexicographic order.
    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.cardinality());
        for (block, bs) in self.bounds.iter().enumerate() {
            if bs.iter().any(Bound::is_empty) {
                continue;
            }
            let mut cur: Coords = bs.iter().map(|b| b.lo).collect();
            'odometer: loop {
                out.push(LatticePoint { block, coords: cur.clone() });
                for axis in (0..bs.len()).rev() {
                    if cur[axis] < bs[axis].hi {
                        cur[axis] += 1;
                        for later in axis + 1..bs.len() {
                            cur[later] = bs[later].lo;
                        }
                        continue 'odometer;
                    }
                }
                break;
            }
        }
        out
    }

    /// Grows every axis by `d`: upward on half-lines, both ways on full lines.
    pub fn inflate(&self, d: u32) -> Self {
        self.inflate_by(|_, _, kind| match kind {
            AxisKind::HalfLine => (0, d),
            AxisKind::FullLine => (d, d),
        })
    }

    /// Grows axes by per-axis `(down, up)` amounts. Half-lines never extend
    /// below zero.
    pub fn inflate_by(&self, mut amount: impl FnMut(usize, usize, AxisKind) -> (u32, u32)) -> Self {
        let mut out = self.clone();
        for (b, block) in self.lattice.blocks().iter().enumerate() {
            for (a, &kind) in block.axes.iter().enumerate() {
                let (down, up) = amount(b, a, kind);
                let bound = &mut out.bounds[b][a];
                bound.lo -= down as i64;
                if kind == AxisKind::HalfLine {
                    bound.lo = bound.lo.max(0);
                }
                bound.hi += up as i64;
            }
        }
        out
    }

    /// Clamps every half-line axis to `[0, min(hi, cap)]`; `None` empties
    /// every block that has a half-line axis.
    pub fn cap_half_lines(&self, cap: Option<u32>) -> Self {
        let mut out = self.clone();
        for (b, block) in self.lattice.blocks().iter().enumerate() {
            for (a, &kind) in block.axes.iter().enumerate() {
                if kind == AxisKind::HalfLine {
                    let bound = &mut out.bounds[b][a];
                    bound.hi = match cap {
                        Some(c) => bound.hi.min(c as i64),
                        None => -1,
                    };
                }
            }
        }
        out
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_within(&self, other: &Window) -> bool {
        self.lattice == other.lattice
            && self.bounds.iter().zip(&other.bounds).all(|(mine, theirs)| {
                mine.iter().any(Bound::is_empty)
                    || mine.iter().zip(theirs).all(|(m, t)| t.lo <= m.lo && m.hi <= t.hi)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_counts_axes() {
        let lattice = Lattice::new(vec![
            Block::new(vec![AxisKind::HalfLine, AxisKind::FullLine]),
            Block::new(vec![AxisKind::FullLine]),
        ])
        .unwrap();
        let w = Window::new(&lattice, 3);
        assert_eq!(w.cardinality(), 4 * 7 + 7);
        assert_eq!(w.points().len(), w.cardinality());
        let pts = w.points();
        assert!(pts.windows(2).all(|p| p[0] < p[1]));
        assert!(pts.iter().all(|p| w.contains(p) && lattice.contains(p)));
    }

    #[test]
    fn windows_nest_by_depth() {
        let lattice = Lattice::half_line_power(2);
        let small = Window::new(&lattice, 2);
        let big = Window::new(&lattice, 5);
        assert!(small.is_within(&big));
        assert!(!big.is_within(&small));
        assert!(small.inflate(3).is_within(&big) && big.is_within(&small.inflate(3)));
    }

    #[test]
    fn half_line_cap_and_inflation() {
        let lattice = Lattice::single(vec![AxisKind::HalfLine, AxisKind::FullLine]);
        let w = Window::new(&lattice, 4);
        let capped = w.cap_half_lines(Some(1));
        assert_eq!(capped.cardinality(), 2 * 9);
        assert_eq!(w.cap_half_lines(None).cardinality(), 0);
        let grown = w.inflate(2);
        assert_eq!(grown.bound(0, 0), Bound { lo: 0, hi: 6 });
        assert_eq!(grown.bound(0, 1), Bound { lo: -6, hi: 6 });
    }

    #[test]
    fn invalid_lattices_are_rejected() {
        assert!(Lattice::new(vec![]).is_err());
        assert!(Lattice::new(vec![Block::new(vec![])]).is_err());
        assert!(!Lattice::half_line().contains(&LatticePoint::at(&[-1])));
    }
}

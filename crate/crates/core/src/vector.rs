//! Finitely supported vectors over a lattice.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use num_complex::Complex64;

use crate::lattice::{LatticePoint, Window};

pub type C64 = Complex64;

/// Entries at or below this magnitude are treated as exact zeros and dropped.
pub const ZERO_CUTOFF: f64 = 1e-300;

pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

/// A finitely supported element of `l2(lattice)`.
#[derive(Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: BTreeMap<LatticePoint, C64>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Standard basis vector `e_p`.
    pub fn basis(p: LatticePoint) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(p, ONE);
        Self { entries }
    }

    /// Sums repeated points and drops exact zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (LatticePoint, C64)>) -> Self {
        let mut v = Self::zero();
        for (p, z) in entries {
            v.add_at(p, z);
        }
        v
    }

    pub fn get(&self, p: &LatticePoint) -> C64 {
        self.entries.get(p).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> btree_map::Iter<'_, LatticePoint, C64> {
        self.entries.iter()
    }

    pub fn support(&self) -> btree_map::Keys<'_, LatticePoint, C64> {
        self.entries.keys()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        // scaled accumulation keeps tiny and huge entries accurate
        let scale = self.entries.values().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.entries.values().map(|z| (z / scale).norm_sqr()).sum();
        scale * s.sqrt()
    }

    /// `<self, other> = sum conj(self_p) * other_p`.
    pub fn inner(&self, other: &SparseVector) -> C64 {
        let (small, large, flip) = if self.nnz() <= other.nnz() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = ZERO;
        for (p, a) in &small.entries {
            if let Some(b) = large.entries.get(p) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        acc
    }

    pub fn add_at(&mut self, p: LatticePoint, z: C64) {
        match self.entries.entry(p) {
            btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + z;
                if s.norm() <= ZERO_CUTOFF {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            btree_map::Entry::Vacant(e) => {
                if z.norm() > ZERO_CUTOFF {
                    e.insert(z);
                }
            }
        }
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: C64, x: &SparseVector) {
        for (p, z) in &x.entries {
            self.add_at(p.clone(), alpha * z);
        }
    }

    pub fn scaled(&self, alpha: C64) -> SparseVector {
        SparseVector::from_entries(self.entries.iter().map(|(p, z)| (p.clone(), alpha * z)))
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        let mut out = self.clone();
        out.axpy(-ONE, other);
        out
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<SparseVector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn is_supported_in(&self, window: &Window) -> bool {
        self.entries.keys().all(|p| window.contains(p))
    }

    /// Drops the entries outside `window` (compression onto `l2(window)`).
    pub fn compressed_to(&self, window: &Window) -> SparseVector {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(p, _)| window.contains(p))
                .map(|(p, z)| (p.clone(), *z))
                .collect(),
        }
    }

    /// Largest-magnitude entry; ties go to the lexicographically first point.
    pub fn dominant(&self) -> Option<(&LatticePoint, C64)> {
        let mut best: Option<(&LatticePoint, C64)> = None;
        for (p, z) in &self.entries {
            match best {
                Some((_, b)) if z.norm() <= b.norm() * (1.0 + 1e-12) => {}
                _ => best = Some((p, *z)),
            }
        }
        best
    }

    /// Rotates the global phase so that the dominant entry is real positive.
    pub fn with_canonical_phase(&self) -> SparseVector {
        match self.dominant() {
            Some((_, z)) if z.norm() > 0.0 => self.scaled(z.conj() / z.norm()),
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl FromIterator<(LatticePoint, C64)> for SparseVector {
    fn from_iter<I: IntoIterator<Item = (LatticePoint, C64)>>(iter: I) -> Self {
        Self::from_entries(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: i64) -> SparseVector {
        SparseVector::basis(LatticePoint::at(&[k]))
    }

    #[test]
    fn exact_zeros_are_dropped() {
        let mut v = e(0);
        v.axpy(-ONE, &e(0));
        assert!(v.is_zero());
        let w = SparseVector::from_entries([(LatticePoint::at(&[1]), C64::new(1e-310, 0.0))]);
        assert!(w.is_zero());
    }

    #[test]
    fn inner_is_conjugate_linear_in_the_first_slot() {
        let i = C64::new(0.0, 1.0);
        let u = e(0).scaled(i);
        let v = e(0);
        assert_eq!(u.inner(&v), -i);
        assert_eq!(v.inner(&u), i);
    }

    #[test]
    fn norm_and_dominant() {
        let mut v = e(0);
        v.axpy(C64::new(0.0, -2.0), &e(3));
        assert!((v.norm() - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(v.dominant().unwrap().0, &LatticePoint::at(&[3]));
        let c = v.with_canonical_phase();
        let z = c.get(&LatticePoint::at(&[3]));
        assert!(z.im.abs() < 1e-15 && z.re > 0.0);
    }
}

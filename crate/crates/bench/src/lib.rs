//! Shared inputs for the benchmarks.

use wold_core::fixtures::{direct_sum_pattern_tuple, hardy_bidisc_pair, pattern_lattice, weighted_shift_pair};
use wold_core::{StructuredOperator, Window};

/// A named tuple with the window it is measured on.
pub struct Case {
    pub name: &'static str,
    pub operators: Vec<StructuredOperator>,
    pub window: Window,
    pub max_power: usize,
}

pub fn weighted_pair(depth: u32) -> Case {
    let operators = weighted_shift_pair(1, 14);
    let window = Window::new(operators[0].lattice(), depth);
    Case { name: "weighted_pair", operators, window, max_power: depth as usize }
}

pub fn bidisc_pair(depth: u32) -> Case {
    let operators = hardy_bidisc_pair(1, 10);
    let window = Window::new(operators[0].lattice(), depth);
    Case { name: "bidisc_pair", operators, window, max_power: depth as usize }
}

pub fn pattern_tuple(n: usize, depth: u32, max_power: usize) -> Case {
    let lattice = pattern_lattice(n);
    Case { name: "pattern_tuple", operators: direct_sum_pattern_tuple(n), window: Window::new(&lattice, depth), max_power }
}

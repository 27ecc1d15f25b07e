//! Fixtures shared by the criterion benchmarks.

use sl2_core::{oracles, schrodinger, Cocycle, Frequency};

/// Almost Mathieu cocycle at coupling `lambda` and golden frequency.
pub fn amo(lambda: f64, energy: f64) -> Cocycle {
    Cocycle::new(Frequency::golden(), schrodinger(&oracles::amo_potential(lambda), energy))
}

//! Fixtures shared by the benchmarks.

use stickelberger_core::AbelianFieldSpec;

/// Conductors exercised by the per-field benchmarks, smallest first.
pub const CONDUCTORS: [u64; 4] = [7, 15, 24, 40];

pub fn cyclotomic(f: u64) -> AbelianFieldSpec {
    AbelianFieldSpec::cyclotomic(f).expect("benchmark conductors are admissible")
}

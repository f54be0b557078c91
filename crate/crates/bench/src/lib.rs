//! Fixtures shared by the criterion benchmarks.

use dcprox::{generate_instance, ProblemInstance};

/// Paper-sized problem used by the solver benchmarks.
pub const DESK_SIZE: (usize, usize, usize) = (720, 2560, 80);

/// Seeded instance of the given size with the default noise level.
pub fn fixture(m: usize, n: usize, s: usize) -> ProblemInstance {
    generate_instance(m, n, s, 0.01, 0x5eed).expect("valid fixture dimensions")
}

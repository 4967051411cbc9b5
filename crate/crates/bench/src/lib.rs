//! Fixtures shared by the criterion benches.

use idcode_core::pattern::{self, Pattern};

const SQUARE_R2_N9: &str = include_str!("../../core/tests/data/torus_square_r2_n9.txt");
const DEG8_N10: &str = include_str!("../../core/tests/data/deg8_square_r2_n10_a.txt");

/// A 2-identifying code of the square grid with period 9.
pub fn square_r2_code() -> Pattern {
    pattern::parse(SQUARE_R2_N9).expect("corpus file parses")
}

/// A period-10 code containing a codeword with eight pairs.
pub fn degree_eight_code() -> Pattern {
    pattern::parse(DEG8_N10).expect("corpus file parses")
}

//! Density lower bounds from pair counting.
//!
//! Count the ones of the incidence matrix between window vertices and
//! codewords twice. Each codeword lies in `b_r` balls, giving at most
//! `b_r K` ones. Each vertex of the inner window `G_{m-r}` has one
//! codeword (at most `K` such rows), two codewords (at most `P_m` rows,
//! one per pair) or at least three. Hence
//!
//! ```text
//! b_r K >= -2K + 3 |G_{m-r}| - P_m
//! ```
//!
//! and with `P_m <= (k/2) K` the density is at least `6 / (2 b_r + 4 + k)`.

use num_rational::Rational64;

use crate::code::{PeriodicCode, Window};
use crate::grid::{ball_size, BallOffsets, GridKind};

/// `6 / (2 b_r + 4 + k)`, exact and reduced.
pub fn density_lower_bound(b_r: u32, k: Rational64) -> Rational64 {
    assert!(b_r >= 1, "ball size is positive");
    assert!(
        k >= Rational64::from_integer(0),
        "pair degree is nonnegative"
    );
    Rational64::from_integer(6) / (Rational64::from_integer(2 * b_r as i64 + 4) + k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub b_r: u32,
    pub k: Rational64,
    pub value: Rational64,
}

impl BoundResult {
    pub fn new(b_r: u32, k: Rational64) -> Self {
        BoundResult {
            b_r,
            k,
            value: density_lower_bound(b_r, k),
        }
    }
}

/// Terms of the counting inequality on one window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountingTerms {
    pub b_r: u64,
    /// `|C ∩ G_m|`
    pub k: u64,
    /// `|G_{m-r}|`
    pub inner: u64,
    /// Witnesses inside `G_{m-r}`.
    pub p_m: u64,
}

impl CountingTerms {
    pub fn holds(&self) -> bool {
        let lhs = (self.b_r * self.k) as i128;
        let rhs = -2 * self.k as i128 + 3 * self.inner as i128 - self.p_m as i128;
        lhs >= rhs
    }
}

/// Evaluates the counting inequality for `code` on `[-m, m]^2`. The inner
/// window has `(2(m - r) + 1)^2` vertices on both grids.
pub fn counting_inequality_check(code: &PeriodicCode, r: u32, m: u32) -> (bool, CountingTerms) {
    assert!(m > r, "the inner window needs m > r");
    let (k, _) = code.window_census(m);
    let inner = Window::new(code.kind(), m - r);
    let balls = BallOffsets::new(code.kind(), r);
    let p_m = inner
        .vertices()
        .filter(|&v| code.identifying_set_with(&balls, v).len() == 2)
        .count() as u64;
    let terms = CountingTerms {
        b_r: ball_size(code.kind(), r) as u64,
        k,
        inner: inner.len(),
        p_m,
    };
    (terms.holds(), terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownBounds {
    pub kind: GridKind,
    pub r: u32,
    pub previous_lower: Rational64,
    pub new_lower: Rational64,
    pub upper: Rational64,
}

/// Best known densities for small radii: the earlier lower bound, the
/// improved lower bound and the best construction.
pub fn known_bounds_table() -> Vec<KnownBounds> {
    let q = Rational64::new;
    vec![
        KnownBounds {
            kind: GridKind::Hex,
            r: 2,
            previous_lower: q(2, 11),
            new_lower: q(1, 5),
            upper: q(4, 19),
        },
        KnownBounds {
            kind: GridKind::Hex,
            r: 3,
            previous_lower: q(2, 17),
            new_lower: q(3, 25),
            upper: q(1, 6),
        },
        KnownBounds {
            kind: GridKind::Square,
            r: 2,
            previous_lower: q(3, 20),
            new_lower: q(6, 37),
            upper: q(5, 29),
        },
    ]
}

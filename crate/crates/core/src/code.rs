//! Periodic codes, identifying sets, validity and density.

use std::collections::BTreeSet;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::error::CodeError;
use crate::grid::{BallOffsets, GridKind, Vertex, COORD_LIMIT};

/// Largest period side accepted from files and constructors.
pub const MAX_PERIOD: u32 = 4096;

/// An infinite code, periodic under translations by `(px, 0)` and `(0, py)`.
///
/// Membership is decided by reducing coordinates with a nonnegative
/// modulus into the fundamental domain `[0, px) x [0, py)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeriodicCode {
    kind: GridKind,
    px: u32,
    py: u32,
    offsets: BTreeSet<Vertex>,
}

impl PeriodicCode {
    pub fn new(
        kind: GridKind,
        px: u32,
        py: u32,
        offsets: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self, CodeError> {
        if px == 0 || py == 0 || px > MAX_PERIOD || py > MAX_PERIOD {
            return Err(CodeError::BadPeriod { px, py });
        }
        if kind == GridKind::Hex && (!px.is_multiple_of(2) || !py.is_multiple_of(2)) {
            return Err(CodeError::OddHexPeriod { px, py });
        }
        let mut set = BTreeSet::new();
        for v in offsets {
            if v.i < 0 || v.j < 0 || v.i >= px as i64 || v.j >= py as i64 {
                return Err(CodeError::OffsetOutOfDomain(v));
            }
            if !set.insert(v) {
                return Err(CodeError::DuplicateOffset(v));
            }
        }
        if set.is_empty() {
            return Err(CodeError::Empty);
        }
        Ok(PeriodicCode {
            kind,
            px,
            py,
            offsets: set,
        })
    }

    /// The code containing every vertex.
    pub fn all_vertices(kind: GridKind) -> Self {
        let p = match kind {
            GridKind::Square => 1,
            GridKind::Hex => 2,
        };
        let offsets = (0..p).flat_map(|i| (0..p).map(move |j| Vertex::new(i, j)));
        PeriodicCode::new(kind, p as u32, p as u32, offsets).expect("valid by construction")
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn period(&self) -> (u32, u32) {
        (self.px, self.py)
    }

    pub fn offsets(&self) -> &BTreeSet<Vertex> {
        &self.offsets
    }

    pub fn reduce(&self, v: Vertex) -> Vertex {
        Vertex::new(
            v.i.rem_euclid(self.px as i64),
            v.j.rem_euclid(self.py as i64),
        )
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.offsets.contains(&self.reduce(v))
    }

    /// Vertices of the fundamental domain in lexicographic order.
    pub fn domain(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.px as i64).flat_map(move |i| (0..self.py as i64).map(move |j| Vertex::new(i, j)))
    }

    /// Codewords inside the box `[lo.i, hi.i] x [lo.j, hi.j]`.
    pub fn codewords_in_box(&self, lo: Vertex, hi: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        for i in lo.i..=hi.i {
            for j in lo.j..=hi.j {
                let v = Vertex::new(i, j);
                if self.contains(v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Cyclic shift of the offsets by `t`. For the hex grid `t` must be a
    /// parity-preserving translation.
    pub fn shifted(&self, t: Vertex) -> Result<Self, CodeError> {
        if !crate::grid::is_symmetry_translation(self.kind, t) {
            return Err(CodeError::BadShift(t));
        }
        PeriodicCode::new(
            self.kind,
            self.px,
            self.py,
            self.offsets.iter().map(|&v| self.reduce(v + t)),
        )
    }

    /// The same code described with a period `(mx * px, my * py)`.
    pub fn with_period_multiple(&self, mx: u32, my: u32) -> Result<Self, CodeError> {
        let (px, py) = (self.px * mx, self.py * my);
        let mut offsets = Vec::with_capacity(self.offsets.len() * (mx * my) as usize);
        for a in 0..mx as i64 {
            for b in 0..my as i64 {
                for v in &self.offsets {
                    offsets.push(Vertex::new(
                        v.i + a * self.px as i64,
                        v.j + b * self.py as i64,
                    ));
                }
            }
        }
        PeriodicCode::new(self.kind, px, py, offsets)
    }

    /// `I_r(v) = B_r(v) ∩ C`, in lexicographic order.
    pub fn identifying_set(&self, v: Vertex, r: u32) -> Vec<Vertex> {
        self.identifying_set_with(&BallOffsets::new(self.kind, r), v)
    }

    pub fn identifying_set_with(&self, balls: &BallOffsets, v: Vertex) -> Vec<Vertex> {
        balls.around(v).filter(|&u| self.contains(u)).collect()
    }

    /// Checks both identifying-code conditions.
    ///
    /// Every domain vertex must see a codeword, and every domain vertex must
    /// be separated from every other vertex within distance `2r`. Vertices
    /// further apart have disjoint balls, so equal identifying sets would
    /// both be empty, which the first condition already excludes. The first
    /// violation in lexicographic order is reported, empty sets before
    /// indistinct pairs.
    pub fn is_identifying_code(&self, r: u32) -> ValidityReport {
        let balls = BallOffsets::new(self.kind, r);
        let domain: Vec<Vertex> = self.domain().collect();

        let empty = domain
            .par_iter()
            .find_first(|&&v| balls.around(v).all(|u| !self.contains(u)));
        if let Some(&v) = empty {
            return ValidityReport::invalid(Violation::EmptyIdSet(v));
        }

        let near = BallOffsets::new(self.kind, 2 * r);
        let clash = domain.par_iter().find_map_first(|&v| {
            let iv = self.identifying_set_with(&balls, v);
            near.around(v)
                .filter(|&u| u != v)
                .find(|&u| self.identifying_set_with(&balls, u) == iv)
                .map(|u| (v, u))
        });
        match clash {
            Some((v, u)) => ValidityReport::invalid(Violation::Indistinct(v, u)),
            None => ValidityReport::valid(),
        }
    }

    /// Exact density `|offsets| / (px * py)`.
    pub fn density(&self) -> Rational64 {
        Rational64::new(self.offsets.len() as i64, self.px as i64 * self.py as i64)
    }

    /// `(|C ∩ G_m|, |G_m|)` for the window `[-m, m]^2`.
    pub fn window_census(&self, m: u32) -> (u64, u64) {
        let w = Window::new(self.kind, m);
        let k = w.vertices().filter(|&v| self.contains(v)).count() as u64;
        (k, w.len())
    }
}

/// The square window `[-m, m] x [-m, m]`, written `Q_m` or `G_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub kind: GridKind,
    pub m: u32,
}

impl Window {
    pub fn new(kind: GridKind, m: u32) -> Self {
        assert!((m as i64) < COORD_LIMIT);
        Window { kind, m }
    }

    pub fn len(&self) -> u64 {
        let side = 2 * self.m as u64 + 1;
        side * side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Vertex) -> bool {
        let m = self.m as i64;
        v.i.abs() <= m && v.j.abs() <= m
    }

    /// The window shrunk by `r` on every side, `G_{m-r}`.
    pub fn shrink(&self, r: u32) -> Option<Window> {
        self.m.checked_sub(r).map(|m| Window::new(self.kind, m))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        let m = self.m as i64;
        (-m..=m).flat_map(move |i| (-m..=m).map(move |j| Vertex::new(i, j)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    None,
    /// `I_r(v)` is empty.
    EmptyIdSet(Vertex),
    /// `I_r(u) = I_r(v)` with `u != v`.
    Indistinct(Vertex, Vertex),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidityReport {
    pub valid: bool,
    pub violation: Violation,
}

impl ValidityReport {
    pub fn valid() -> Self {
        ValidityReport {
            valid: true,
            violation: Violation::None,
        }
    }

    pub fn invalid(violation: Violation) -> Self {
        ValidityReport {
            valid: false,
            violation,
        }
    }
}

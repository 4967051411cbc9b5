//! Pairs, witnesses and the auxiliary graph.
//!
//! A vertex `v` witnesses the pair `{c, c'}` when its identifying set is
//! exactly `{c, c'}`. `p(c)` counts the witnesses of pairs containing `c`.
//! The auxiliary graph joins two codewords when they form a pair; distinct
//! witnesses have distinct identifying sets, so in a valid code the degree
//! of `c` equals `p(c)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::code::{PeriodicCode, Window};
use crate::error::PairsError;
use crate::grid::{ball, neighbors, BallOffsets, GridKind, Vertex};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairReport {
    /// Witness -> the pair it witnesses, smaller codeword first.
    pub witnesses: BTreeMap<Vertex, (Vertex, Vertex)>,
    /// Pair count per codeword, tallied over the witnesses in the report.
    pub p: BTreeMap<Vertex, usize>,
}

impl PairReport {
    /// Witnesses of pairs containing `c`.
    pub fn witnesses_of(&self, c: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.witnesses
            .iter()
            .filter(move |(_, &(a, b))| a == c || b == c)
            .map(|(&v, _)| v)
    }

    pub fn is_witness_for(&self, v: Vertex, c: Vertex) -> bool {
        matches!(self.witnesses.get(&v), Some(&(a, b)) if a == c || b == c)
    }

    /// Line-oriented dump: `witness` lines then `p` lines, both sorted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, (a, b)) in &self.witnesses {
            writeln!(
                out,
                "witness {} {} pair {} {} {} {}",
                v.i, v.j, a.i, a.j, b.i, b.j
            )
            .unwrap();
        }
        for (c, n) in &self.p {
            writeln!(out, "p {} {} {}", c.i, c.j, n).unwrap();
        }
        out
    }
}

/// Scans every vertex of `window`. Codewords of the window start at zero;
/// partners outside the window are tallied as they appear.
pub fn pair_report(code: &PeriodicCode, r: u32, window: Window) -> PairReport {
    let balls = BallOffsets::new(code.kind(), r);
    let mut report = PairReport::default();
    for v in window.vertices() {
        if code.contains(v) {
            report.p.entry(v).or_insert(0);
        }
        let id = code.identifying_set_with(&balls, v);
        if let [a, b] = id[..] {
            report.witnesses.insert(v, (a, b));
            *report.p.entry(a).or_insert(0) += 1;
            *report.p.entry(b).or_insert(0) += 1;
        }
    }
    report
}

/// `p(c)` computed directly from `B_r(c)`, which holds every witness of a
/// pair containing `c`.
pub fn exact_p(code: &PeriodicCode, r: u32, c: Vertex) -> usize {
    let balls = BallOffsets::new(code.kind(), r);
    balls
        .around(c)
        .filter(|&v| code.identifying_set_with(&balls, v).len() == 2)
        .count()
}

/// Codewords whose radius-`2r` ball lies inside the window. For these the
/// window sees every witness and every partner, so their counts are exact.
pub fn interior_codewords(code: &PeriodicCode, r: u32, window: Window) -> Vec<Vertex> {
    let far = BallOffsets::new(code.kind(), 2 * r);
    window
        .vertices()
        .filter(|&c| code.contains(c) && far.around(c).all(|u| window.contains(u)))
        .collect()
}

/// Auxiliary graph on a finite set of codewords.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuxGraph {
    pub vertices: BTreeSet<Vertex>,
    pub adjacency: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl AuxGraph {
    pub fn with_vertices(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        let adjacency = vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
        AuxGraph {
            vertices,
            adjacency,
        }
    }

    /// Adds the edge `{a, b}` when both ends are vertices.
    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        if a == b || !self.vertices.contains(&a) || !self.vertices.contains(&b) {
            return false;
        }
        self.adjacency.get_mut(&a).unwrap().insert(b);
        self.adjacency.get_mut(&b).unwrap().insert(a)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn degree_sum(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency
            .values()
            .map(BTreeSet::len)
            .max()
            .unwrap_or(0)
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adjacency
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }
}

/// `Γ[C ∩ G_m]`: codewords of the window, joined when some vertex anywhere
/// witnesses their pair. Witnesses of pairs inside the window lie within
/// distance `r` of it, so the scan covers the window grown by `r`.
pub fn aux_graph(code: &PeriodicCode, r: u32, window: Window) -> AuxGraph {
    let balls = BallOffsets::new(code.kind(), r);
    let mut graph = AuxGraph::with_vertices(window.vertices().filter(|&v| code.contains(v)));
    let grown = Window::new(window.kind, window.m + r);
    for v in grown.vertices() {
        if let [a, b] = code.identifying_set_with(&balls, v)[..] {
            graph.add_edge(a, b);
        }
    }
    graph
}

/// The auxiliary graph of the quotient by the period: one vertex per
/// codeword of the fundamental domain. With both periods at least `4r + 1`
/// the quotient is simple and every degree equals the true `p(c)`.
pub fn quotient_aux_graph(code: &PeriodicCode, r: u32) -> Result<AuxGraph, PairsError> {
    let (px, py) = code.period();
    let need = 4 * r + 1;
    if px < need || py < need {
        return Err(PairsError::PeriodTooSmall { px, py, need });
    }
    let balls = BallOffsets::new(code.kind(), r);
    let mut graph = AuxGraph::with_vertices(code.offsets().iter().copied());
    for v in code.domain() {
        if let [a, b] = code.identifying_set_with(&balls, v)[..] {
            graph.add_edge(code.reduce(a), code.reduce(b));
        }
    }
    Ok(graph)
}

/// Structural tags of a square-grid codeword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CodewordClass {
    pub adjacent_to_codeword: bool,
    pub type1: bool,
    pub type2: bool,
    pub type3: bool,
}

impl CodewordClass {
    /// The pair-count bound the tags imply, if any.
    pub fn pair_bound(&self) -> Option<usize> {
        if self.type1 {
            Some(4)
        } else if self.adjacent_to_codeword || self.type2 || self.type3 {
            Some(6)
        } else {
            None
        }
    }

    pub fn tags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.adjacent_to_codeword {
            out.push("adjacent");
        }
        if self.type1 {
            out.push("type1");
        }
        if self.type2 {
            out.push("type2");
        }
        if self.type3 {
            out.push("type3");
        }
        out
    }
}

fn rot90(v: Vertex) -> Vertex {
    Vertex::new(-v.j, v.i)
}

/// The defining partner sets of a codeword type, in every rotation.
pub fn type_patterns(base: [Vertex; 2]) -> Vec<[Vertex; 2]> {
    let mut out: Vec<[Vertex; 2]> = Vec::new();
    let mut cur = base;
    for _ in 0..4 {
        let mut sorted = cur;
        sorted.sort();
        if !out.contains(&sorted) {
            out.push(sorted);
        }
        cur = [rot90(cur[0]), rot90(cur[1])];
    }
    out
}

pub const TYPE1_BASE: [Vertex; 2] = [Vertex::new(0, 1), Vertex::new(0, -1)];
pub const TYPE2_BASE: [Vertex; 2] = [Vertex::new(-1, 2), Vertex::new(2, -1)];
pub const TYPE3_BASE: [Vertex; 2] = [Vertex::new(-2, 1), Vertex::new(2, 1)];

/// Tags `c` using only the membership predicate, so it works on partial
/// window assignments as well as periodic codes. `c` itself is assumed to
/// be a codeword.
pub fn classify_with(is_codeword: impl Fn(Vertex) -> bool, c: Vertex) -> CodewordClass {
    let has = |base: [Vertex; 2]| {
        type_patterns(base)
            .iter()
            .any(|pat| pat.iter().all(|&d| is_codeword(c + d)))
    };
    CodewordClass {
        adjacent_to_codeword: neighbors(GridKind::Square, c).into_iter().any(&is_codeword),
        type1: has(TYPE1_BASE),
        type2: has(TYPE2_BASE),
        type3: has(TYPE3_BASE),
    }
}

pub fn classify_codeword(code: &PeriodicCode, c: Vertex) -> Result<CodewordClass, PairsError> {
    if code.kind() != GridKind::Square {
        return Err(PairsError::NotSquare);
    }
    if !code.contains(c) {
        return Err(PairsError::NotACodeword(c));
    }
    Ok(classify_with(|v| code.contains(v), c))
}

/// `B_r(v) ⊆ ∪_{s ∈ S} B_r(s)`.
pub fn covered_by_union(kind: GridKind, r: u32, v: Vertex, set: &[Vertex]) -> bool {
    let balls = BallOffsets::new(kind, r);
    let covered: BTreeSet<Vertex> = set.iter().flat_map(|&s| balls.around(s)).collect();
    ball(kind, v, r).members.iter().all(|u| covered.contains(u))
}

/// The eight right angles of witnesses around a square-grid codeword, in
/// canonical order, relative to the codeword.
pub const RIGHT_ANGLES: [[Vertex; 3]; 8] = [
    [Vertex::new(1, 0), Vertex::new(2, 0), Vertex::new(1, 1)],
    [Vertex::new(1, 0), Vertex::new(2, 0), Vertex::new(1, -1)],
    [Vertex::new(0, 1), Vertex::new(0, 2), Vertex::new(1, 1)],
    [Vertex::new(0, 1), Vertex::new(0, 2), Vertex::new(-1, 1)],
    [Vertex::new(-1, 0), Vertex::new(-2, 0), Vertex::new(-1, 1)],
    [Vertex::new(-1, 0), Vertex::new(-2, 0), Vertex::new(-1, -1)],
    [Vertex::new(0, -1), Vertex::new(0, -2), Vertex::new(1, -1)],
    [Vertex::new(0, -1), Vertex::new(0, -2), Vertex::new(-1, -1)],
];

/// First right angle (translated to `c`) whose three members all witness
/// pairs containing `c`. Meaningful for square-grid reports at `r = 2`.
pub fn right_angle_of_witnesses(report: &PairReport, c: Vertex) -> Option<[Vertex; 3]> {
    RIGHT_ANGLES
        .iter()
        .map(|set| set.map(|d| c + d))
        .find(|set| set.iter().all(|&v| report.is_witness_for(v, c)))
}

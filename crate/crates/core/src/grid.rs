//! Geometry of the square grid and the hexagonal grid in its brick-wall
//! drawing.
//!
//! Both grids live on `Z x Z`. In the square grid `(i, j)` is adjacent to
//! the four vertices at offsets `(+-1, 0)` and `(0, +-1)`. In the brick wall
//! every vertex keeps its two horizontal neighbours `(i +- 1, j)`, but only
//! one vertical neighbour: `(i, j + (-1)^(i+j+1))`, so vertices with `i + j`
//! even point down and vertices with `i + j` odd point up.
//!
//! Square distances have a closed form. Hex distances are computed by
//! breadth-first search, which is the ground truth for every ball in the
//! crate.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

/// Largest coordinate magnitude accepted by constructors that take user
/// input. Every computation in the crate lives in small windows, so this
/// leaves ample headroom before any `i64` arithmetic could overflow.
pub const COORD_LIMIT: i64 = 1 << 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridKind {
    Square,
    Hex,
}

impl GridKind {
    pub fn degree(self) -> usize {
        match self {
            GridKind::Square => 4,
            GridKind::Hex => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridKind::Square => "square",
            GridKind::Hex => "hex",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(GridKind::Square),
            "hex" => Ok(GridKind::Hex),
            other => Err(format!(
                "unknown grid `{other}` (expected `square` or `hex`)"
            )),
        }
    }
}

/// A lattice point `(i, j)`. Ordering is lexicographic by `(i, j)`, which is
/// the canonical order used for every set and report in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Vertex {
    pub i: i64,
    pub j: i64,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        Vertex { i, j }
    }

    /// `true` when `i + j` is even.
    pub fn is_even(self) -> bool {
        (self.i + self.j).rem_euclid(2) == 0
    }
}

impl From<(i64, i64)> for Vertex {
    fn from((i, j): (i64, i64)) -> Self {
        Vertex { i, j }
    }
}

impl Add for Vertex {
    type Output = Vertex;
    fn add(self, rhs: Vertex) -> Vertex {
        Vertex::new(self.i + rhs.i, self.j + rhs.j)
    }
}

impl Sub for Vertex {
    type Output = Vertex;
    fn sub(self, rhs: Vertex) -> Vertex {
        Vertex::new(self.i - rhs.i, self.j - rhs.j)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Closed ball with its members in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub center: Vertex,
    pub radius: u32,
    pub members: Vec<Vertex>,
}

impl Ball {
    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Vertical offset of the single vertical edge at `v` in the brick wall.
fn hex_vertical(v: Vertex) -> i64 {
    if v.is_even() {
        -1
    } else {
        1
    }
}

pub fn neighbors(kind: GridKind, v: Vertex) -> Vec<Vertex> {
    match kind {
        GridKind::Square => vec![
            Vertex::new(v.i - 1, v.j),
            Vertex::new(v.i, v.j - 1),
            Vertex::new(v.i, v.j + 1),
            Vertex::new(v.i + 1, v.j),
        ],
        GridKind::Hex => {
            let mut out = vec![
                Vertex::new(v.i - 1, v.j),
                Vertex::new(v.i, v.j + hex_vertical(v)),
                Vertex::new(v.i + 1, v.j),
            ];
            out.sort();
            out
        }
    }
}

pub fn are_adjacent(kind: GridKind, u: Vertex, v: Vertex) -> bool {
    let d = v - u;
    match kind {
        GridKind::Square => d.i.abs() + d.j.abs() == 1,
        GridKind::Hex => (d.j == 0 && d.i.abs() == 1) || (d.i == 0 && d.j == hex_vertical(u)),
    }
}

/// Breadth-first distances from `source`, stopping at `limit`.
fn bfs(kind: GridKind, source: Vertex, limit: u32) -> HashMap<Vertex, u32> {
    let mut dist = HashMap::new();
    dist.insert(source, 0u32);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == limit {
            continue;
        }
        for w in neighbors(kind, u) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                du + 1
            });
        }
    }
    dist
}

pub fn distance(kind: GridKind, u: Vertex, v: Vertex) -> u32 {
    let manhattan = ((u.i - v.i).abs() + (u.j - v.j).abs()) as u32;
    match kind {
        GridKind::Square => manhattan,
        GridKind::Hex => {
            // Brick-wall distance is at least the Manhattan distance, so the
            // search can grow ring by ring until it meets `v`.
            if u == v {
                return 0;
            }
            let mut frontier = vec![u];
            let mut seen: BTreeSet<Vertex> = frontier.iter().copied().collect();
            let mut d = 0;
            loop {
                d += 1;
                let mut next = Vec::new();
                for &x in &frontier {
                    for w in neighbors(kind, x) {
                        if w == v {
                            return d;
                        }
                        if seen.insert(w) {
                            next.push(w);
                        }
                    }
                }
                debug_assert!(d <= 2 * manhattan + 2);
                frontier = next;
            }
        }
    }
}

pub fn ball(kind: GridKind, v: Vertex, r: u32) -> Ball {
    let mut members: Vec<Vertex> = match kind {
        GridKind::Square => {
            let r = r as i64;
            let mut out = Vec::new();
            for di in -r..=r {
                let span = r - di.abs();
                for dj in -span..=span {
                    out.push(Vertex::new(v.i + di, v.j + dj));
                }
            }
            out
        }
        GridKind::Hex => bfs(kind, v, r).into_keys().collect(),
    };
    members.sort();
    Ball {
        center: v,
        radius: r,
        members,
    }
}

/// `|B_r(v)|`, independent of the centre.
pub fn ball_size(kind: GridKind, r: u32) -> usize {
    match kind {
        GridKind::Square => {
            let r = r as usize;
            2 * r * r + 2 * r + 1
        }
        GridKind::Hex => {
            let r = r as usize;
            1 + 3 * r * (r + 1) / 2
        }
    }
}

/// Ball offsets for both vertex parities, so balls around many centres can
/// be produced without repeated searches. For the square grid both tables
/// coincide.
#[derive(Clone, Debug)]
pub struct BallOffsets {
    kind: GridKind,
    radius: u32,
    even: Vec<Vertex>,
    odd: Vec<Vertex>,
}

impl BallOffsets {
    pub fn new(kind: GridKind, radius: u32) -> Self {
        let even = ball(kind, Vertex::ORIGIN, radius).members;
        let odd_center = Vertex::new(1, 0);
        let odd = ball(kind, odd_center, radius)
            .members
            .into_iter()
            .map(|u| u - odd_center)
            .collect();
        BallOffsets {
            kind,
            radius,
            even,
            odd,
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Offsets relative to `v`, in lexicographic order.
    pub fn offsets(&self, v: Vertex) -> &[Vertex] {
        if self.kind == GridKind::Hex && !v.is_even() {
            &self.odd
        } else {
            &self.even
        }
    }

    /// Members of `B_r(v)` in lexicographic order.
    pub fn around(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.offsets(v).iter().map(move |&d| v + d)
    }
}

/// `true` when a translation by `t` is a graph automorphism.
pub fn is_symmetry_translation(kind: GridKind, t: Vertex) -> bool {
    match kind {
        GridKind::Square => true,
        GridKind::Hex => (t.i + t.j).rem_euclid(2) == 0,
    }
}

/// Automorphisms of the grid fixing `center`, as functions of a vertex.
///
/// The square grid has the eight elements of the dihedral group of the
/// square. The brick wall has the six symmetries of a hexagonal-lattice
/// vertex; they are built by transporting edge directions, since in brick
/// coordinates the threefold rotation is not linear.
#[derive(Clone, Debug)]
pub struct PointSymmetry {
    kind: GridKind,
    center: Vertex,
    op: SymOp,
}

#[derive(Clone, Copy, Debug)]
enum SymOp {
    /// Signed permutation of the two square axes: `(swap, flip_i, flip_j)`.
    Square(bool, bool, bool),
    /// Permutation of the three hex edge directions.
    Hex([usize; 3]),
}

/// Direction label of the hex edge `u -> w`. From an even vertex the
/// labels 0, 1, 2 mean `(+1,0)`, `(-1,0)`, `(0,-1)`; from an odd vertex the
/// same labels mean the reversed vectors `(-1,0)`, `(+1,0)`, `(0,+1)`.
fn hex_label(u: Vertex, w: Vertex) -> usize {
    let d = w - u;
    let sign = if u.is_even() { 1 } else { -1 };
    match (d.i * sign, d.j * sign) {
        (1, 0) => 0,
        (-1, 0) => 1,
        (0, -1) => 2,
        _ => unreachable!("not a hex edge"),
    }
}

fn hex_step(u: Vertex, label: usize) -> Vertex {
    let sign = if u.is_even() { 1 } else { -1 };
    let (di, dj) = match label {
        0 => (1, 0),
        1 => (-1, 0),
        _ => (0, -1),
    };
    Vertex::new(u.i + di * sign, u.j + dj * sign)
}

impl PointSymmetry {
    pub fn all(kind: GridKind, center: Vertex) -> Vec<PointSymmetry> {
        match kind {
            GridKind::Square => {
                let mut out = Vec::with_capacity(8);
                for swap in [false, true] {
                    for flip_i in [false, true] {
                        for flip_j in [false, true] {
                            out.push(PointSymmetry {
                                kind,
                                center,
                                op: SymOp::Square(swap, flip_i, flip_j),
                            });
                        }
                    }
                }
                out
            }
            GridKind::Hex => {
                let perms = [
                    [0, 1, 2],
                    [0, 2, 1],
                    [1, 0, 2],
                    [1, 2, 0],
                    [2, 0, 1],
                    [2, 1, 0],
                ];
                perms
                    .into_iter()
                    .map(|p| PointSymmetry {
                        kind,
                        center,
                        op: SymOp::Hex(p),
                    })
                    .collect()
            }
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(
            self.op,
            SymOp::Square(false, false, false) | SymOp::Hex([0, 1, 2])
        )
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        match self.op {
            SymOp::Square(swap, flip_i, flip_j) => {
                let d = v - self.center;
                let (mut a, mut b) = if swap { (d.j, d.i) } else { (d.i, d.j) };
                if flip_i {
                    a = -a;
                }
                if flip_j {
                    b = -b;
                }
                self.center + Vertex::new(a, b)
            }
            SymOp::Hex(perm) => {
                // Walk a shortest path from the centre and replay it with
                // permuted direction labels. The map is a lattice
                // automorphism, so the image does not depend on the path.
                let path = hex_path(self.center, v);
                let mut image = self.center;
                for label in path {
                    image = hex_step(image, perm[label]);
                }
                image
            }
        }
    }
}

/// Direction labels of some walk from `from` to `to` in the brick wall.
fn hex_path(from: Vertex, to: Vertex) -> Vec<usize> {
    let mut labels = Vec::new();
    let mut cur = from;
    while cur != to {
        // Greedy step that strictly decreases the distance to `to`.
        let d = distance(GridKind::Hex, cur, to);
        let next = neighbors(GridKind::Hex, cur)
            .into_iter()
            .find(|&w| distance(GridKind::Hex, w, to) + 1 == d)
            .expect("some neighbour lies on a geodesic");
        labels.push(hex_label(cur, next));
        cur = next;
    }
    labels
}

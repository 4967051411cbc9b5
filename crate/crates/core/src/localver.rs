//! Exhaustive verification of local pair-count bounds.
//!
//! Every witness of a pair containing a codeword `c` lies in `B_r(c)`, and
//! its identifying set lies in `B_{2r}(c)`. A bound on `p(c)` therefore
//! only depends on the code restricted to the window `B_{2r}(c)`. The
//! search below ranges over all restrictions that satisfy the conditions a
//! global code must satisfy inside the window (the local laws), so a bound
//! it proves holds for every code.
//!
//! The pruned search enumerates candidate witness sets `W ⊆ B_r(c)` from
//! largest to smallest. For a fixed `W` every witness keeps `c` and exactly
//! one partner, which must avoid every other witness ball (two witnesses
//! sharing a partner would be indistinct). All other cells of the witness
//! balls are non-codewords, and the remaining free cells can be made
//! codewords: adding codewords never breaks a local law, so `W` is
//! realizable exactly when that maximal completion satisfies the laws.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::discharge::Pattern;
use crate::error::LocalError;
use crate::grid::{ball, BallOffsets, GridKind, PointSymmetry, Vertex};
use crate::pairs::{classify_with, type_patterns, TYPE1_BASE, TYPE2_BASE, TYPE3_BASE};

type Mask = u128;

/// Largest window the bit-mask engine handles.
pub const MAX_WINDOW_CELLS: usize = 128;

/// Default node budget of the pruned search.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Largest number of free cells `naive_enumerate` accepts.
pub const NAIVE_MAX_FREE: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellState {
    Codeword,
    NonCodeword,
    Free,
}

impl CellState {
    fn symbol(self) -> char {
        match self {
            CellState::Codeword => '#',
            CellState::NonCodeword => '.',
            CellState::Free => '?',
        }
    }
}

/// Partial assignment of `B_{2r}(center)`; the centre is always a codeword.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    pub kind: GridKind,
    pub r: u32,
    pub center: Vertex,
    cells: BTreeMap<Vertex, CellState>,
}

impl WindowConfig {
    pub fn new(kind: GridKind, r: u32, center: Vertex) -> Result<Self, LocalError> {
        let members = ball(kind, center, 2 * r).members;
        if members.len() > MAX_WINDOW_CELLS {
            return Err(LocalError::WindowTooLarge {
                cells: members.len(),
                max: MAX_WINDOW_CELLS,
            });
        }
        let mut cells: BTreeMap<Vertex, CellState> =
            members.into_iter().map(|v| (v, CellState::Free)).collect();
        cells.insert(center, CellState::Codeword);
        Ok(WindowConfig {
            kind,
            r,
            center,
            cells,
        })
    }

    pub fn fix(&mut self, v: Vertex, state: CellState) -> Result<(), LocalError> {
        if v == self.center && state != CellState::Codeword {
            return Err(LocalError::CenterNotCodeword);
        }
        match self.cells.get_mut(&v) {
            Some(cell) => {
                *cell = state;
                Ok(())
            }
            None => Err(LocalError::OutsideWindow(v)),
        }
    }

    /// Fixes cells given relative to the centre.
    pub fn with_relative(
        mut self,
        offsets: &[(i64, i64)],
        state: CellState,
    ) -> Result<Self, LocalError> {
        for &d in offsets {
            self.fix(self.center + Vertex::from(d), state)?;
        }
        Ok(self)
    }

    pub fn get(&self, v: Vertex) -> Option<CellState> {
        self.cells.get(&v).copied()
    }

    pub fn cells(&self) -> &BTreeMap<Vertex, CellState> {
        &self.cells
    }

    pub fn free_count(&self) -> usize {
        self.cells
            .values()
            .filter(|&&s| s == CellState::Free)
            .count()
    }
}

/// The necessary conditions imposed inside a window: vertices whose balls
/// fit must see a codeword, and pairs of such vertices must be separated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalLawSet {
    pub nonempty: Vec<Vertex>,
    pub distinct: Vec<(Vertex, Vertex)>,
}

impl LocalLawSet {
    pub fn new(kind: GridKind, r: u32, center: Vertex, radius: u32) -> Self {
        let window: BTreeSet<Vertex> = ball(kind, center, radius).members.into_iter().collect();
        let balls = BallOffsets::new(kind, r);
        let nonempty: Vec<Vertex> = window
            .iter()
            .copied()
            .filter(|&v| balls.around(v).all(|u| window.contains(&u)))
            .collect();
        let mut distinct = Vec::new();
        for (a, &u) in nonempty.iter().enumerate() {
            for &v in &nonempty[a + 1..] {
                distinct.push((u, v));
            }
        }
        LocalLawSet { nonempty, distinct }
    }

    pub fn satisfied_by(
        &self,
        kind: GridKind,
        r: u32,
        is_codeword: impl Fn(Vertex) -> bool,
    ) -> bool {
        let balls = BallOffsets::new(kind, r);
        let id =
            |v: Vertex| -> Vec<Vertex> { balls.around(v).filter(|&u| is_codeword(u)).collect() };
        let ids: HashMap<Vertex, Vec<Vertex>> = self.nonempty.iter().map(|&v| (v, id(v))).collect();
        ids.values().all(|s| !s.is_empty()) && self.distinct.iter().all(|(u, v)| ids[u] != ids[v])
    }
}

/// Named cell sets around a square-grid codeword at `r = 2`.
pub struct CellSetCatalog;

impl CellSetCatalog {
    pub const S: [[(i64, i64); 4]; 4] = [
        [(1, 0), (1, 1), (1, -1), (2, 0)],
        [(0, 1), (1, 1), (-1, 1), (0, 2)],
        [(-1, 0), (-1, 1), (-1, -1), (-2, 0)],
        [(0, -1), (1, -1), (-1, -1), (0, -2)],
    ];
    pub const T0: [(i64, i64); 2] = [(0, 1), (0, 2)];
    pub const T1: [(i64, i64); 3] = [(-2, 0), (-1, 0), (-1, 1)];
    pub const T2: [(i64, i64); 3] = [(2, 0), (1, 0), (1, 1)];
    pub const T3: [(i64, i64); 4] = [(-1, -1), (0, -1), (1, -1), (0, -2)];
}

/// Precomputed bit-mask view of a window.
struct Frame {
    kind: GridKind,
    r: u32,
    center: Vertex,
    cells: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    all: Mask,
    center_bit: Mask,
    /// `B_r(v)` restricted to the window.
    ball: Vec<Mask>,
    /// Whether `B_r(v)` fits entirely.
    inside: Vec<bool>,
    scope: Vec<usize>,
    distinct: Vec<Mask>,
    /// Cells of `B_r(center)`, the possible witnesses.
    candidates: Vec<usize>,
    syms: Vec<Vec<usize>>,
}

fn bit(k: usize) -> Mask {
    1 << k
}

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(k)
        }
    })
}

impl Frame {
    fn new(kind: GridKind, r: u32, center: Vertex, radius: u32) -> Result<Self, LocalError> {
        let cells = ball(kind, center, radius).members;
        if cells.len() > MAX_WINDOW_CELLS {
            return Err(LocalError::WindowTooLarge {
                cells: cells.len(),
                max: MAX_WINDOW_CELLS,
            });
        }
        let index: HashMap<Vertex, usize> =
            cells.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let balls = BallOffsets::new(kind, r);
        let mut ball_masks = Vec::with_capacity(cells.len());
        let mut inside = Vec::with_capacity(cells.len());
        for &v in &cells {
            let mut m = 0;
            let mut fits = true;
            for u in balls.around(v) {
                match index.get(&u) {
                    Some(&k) => m |= bit(k),
                    None => fits = false,
                }
            }
            ball_masks.push(m);
            inside.push(fits);
        }
        let scope: Vec<usize> = (0..cells.len()).filter(|&k| inside[k]).collect();
        let mut distinct = Vec::new();
        for (a, &u) in scope.iter().enumerate() {
            for &v in &scope[a + 1..] {
                distinct.push(ball_masks[u] ^ ball_masks[v]);
            }
        }
        let center_idx = index[&center];
        let candidates: Vec<usize> = (0..cells.len())
            .filter(|&k| ball_masks[center_idx] & bit(k) != 0)
            .collect();
        let syms = PointSymmetry::all(kind, center)
            .iter()
            .map(|g| cells.iter().map(|&v| index[&g.apply(v)]).collect())
            .collect();
        let all = if cells.len() == 128 {
            Mask::MAX
        } else {
            bit(cells.len()) - 1
        };
        Ok(Frame {
            kind,
            r,
            center,
            index,
            all,
            center_bit: bit(center_idx),
            ball: ball_masks,
            inside,
            scope,
            distinct,
            candidates,
            syms,
            cells,
        })
    }

    fn laws_ok(&self, code: Mask) -> bool {
        self.scope.iter().all(|&v| self.ball[v] & code != 0)
            && self.distinct.iter().all(|&d| d & code != 0)
    }

    fn states_of(&self, config: &WindowConfig) -> Vec<CellState> {
        self.cells
            .iter()
            .map(|v| config.get(*v).unwrap_or(CellState::Free))
            .collect()
    }

    fn masks(states: &[CellState]) -> (Mask, Mask) {
        let mut code = 0;
        let mut non = 0;
        for (k, s) in states.iter().enumerate() {
            match s {
                CellState::Codeword => code |= bit(k),
                CellState::NonCodeword => non |= bit(k),
                CellState::Free => {}
            }
        }
        (code, non)
    }

    /// Symmetries mapping the given assignment to itself.
    fn stabilizer(&self, states: &[CellState]) -> Vec<&Vec<usize>> {
        self.syms
            .iter()
            .filter(|g| (0..states.len()).all(|k| states[g[k]] == states[k]))
            .collect()
    }

    fn canonical_key(&self, states: &[CellState], group: &[&Vec<usize>]) -> String {
        group
            .iter()
            .map(|g| {
                let mut img = vec![CellState::Free; states.len()];
                for (k, &s) in states.iter().enumerate() {
                    img[g[k]] = s;
                }
                img.into_iter().map(CellState::symbol).collect::<String>()
            })
            .min()
            .expect("group contains the identity")
    }

    fn is_canonical_subset(&self, subset: &[usize], group: &[&Vec<usize>]) -> bool {
        group.iter().all(|g| {
            let mut img: Vec<usize> = subset.iter().map(|&k| g[k]).collect();
            img.sort_unstable();
            subset <= &img[..]
        })
    }

    /// Assignment implied by a witness structure on top of `start`.
    fn structure_states(
        &self,
        start: &[CellState],
        pairs: &[(usize, Option<usize>)],
    ) -> Vec<CellState> {
        let mut states = start.to_vec();
        let mut union = 0;
        for &(w, _) in pairs {
            union |= self.ball[w];
        }
        let (fixed_code, _) = Frame::masks(start);
        let mut code = fixed_code | self.center_bit;
        for &(_, p) in pairs {
            if let Some(p) = p {
                code |= bit(p);
            }
        }
        for k in bits(union) {
            states[k] = if code & bit(k) != 0 {
                CellState::Codeword
            } else {
                CellState::NonCodeword
            };
        }
        for k in bits(code) {
            states[k] = CellState::Codeword;
        }
        states
    }

    /// Cells that are codewords in every law-satisfying completion.
    fn forced(&self, states: &[CellState]) -> Mask {
        let (code, non) = Frame::masks(states);
        let free = self.all & !code & !non;
        let mut forced = code;
        for k in bits(free) {
            if !self.laws_ok(code | (free & !bit(k))) {
                forced |= bit(k);
            }
        }
        forced
    }
}

/// Which witness sets the search may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessFilter {
    Any,
    /// The centre itself witnesses a pair.
    CenterWitness,
    /// The centre does not witness a pair.
    CenterNotWitness,
    /// Exactly this witness set.
    Exactly(BTreeSet<Vertex>),
}

/// A maximizing configuration, up to symmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremal {
    /// Witness -> partner codeword.
    pub pairs: Vec<(Vertex, Vertex)>,
    /// Cell states in lexicographic cell order (`#`, `.`, `?`).
    pub states: Vec<(Vertex, CellState)>,
    /// Lexicographically least symbol string over the symmetry group.
    pub key: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxPairs {
    /// `None` when no witness set passes the filter.
    pub max_p: Option<usize>,
    pub extremal: Vec<Extremal>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<T> {
    Complete(T),
    Inconclusive { nodes: u64 },
}

impl<T> Verdict<T> {
    pub fn complete(self) -> Option<T> {
        match self {
            Verdict::Complete(t) => Some(t),
            Verdict::Inconclusive { .. } => None,
        }
    }
}

pub fn max_pairs(start: &WindowConfig) -> Result<Verdict<MaxPairs>, LocalError> {
    max_pairs_with(start, &WitnessFilter::Any, DEFAULT_BUDGET)
}

struct Solved {
    solutions: Vec<Vec<(usize, usize)>>,
    nodes: u64,
    aborted: bool,
}

/// Enumerates partner assignments for one witness set.
fn solve_witness_set(
    frame: &Frame,
    fixed_code: Mask,
    fixed_non: Mask,
    w: &[usize],
    cap: u64,
) -> Solved {
    let mut solved = Solved {
        solutions: Vec::new(),
        nodes: 0,
        aborted: false,
    };
    let union: Mask = w.iter().fold(0, |acc, &v| acc | frame.ball[v]);
    let mut cands = Vec::with_capacity(w.len());
    for (a, &v) in w.iter().enumerate() {
        let others: Mask = w
            .iter()
            .enumerate()
            .filter(|&(b, _)| b != a)
            .fold(0, |acc, (_, &u)| acc | frame.ball[u]);
        // B_r(v) inside the other witness balls: v cannot witness as well.
        if frame.ball[v] & !others == 0 {
            return solved;
        }
        let mut c = frame.ball[v] & !others & !frame.center_bit & !fixed_non;
        let fixed_here = fixed_code & frame.ball[v] & !frame.center_bit;
        if fixed_here != 0 {
            if fixed_here.count_ones() > 1 || fixed_here & !c != 0 {
                return solved;
            }
            c = fixed_here;
        }
        if c == 0 {
            return solved;
        }
        cands.push(c);
    }
    let outside = frame.all & !union & !fixed_non;
    let base = fixed_code | frame.center_bit | outside;

    struct Ctx<'a> {
        frame: &'a Frame,
        cands: &'a [Mask],
        witnesses: &'a [usize],
        base: Mask,
        cap: u64,
        chosen: Vec<usize>,
    }

    fn rec(ctx: &mut Ctx<'_>, depth: usize, partners: Mask, out: &mut Solved) {
        out.nodes += 1;
        if out.nodes > ctx.cap {
            out.aborted = true;
            return;
        }
        let pending: Mask = ctx.cands[depth..].iter().fold(0, |acc, &c| acc | c);
        if !ctx.frame.laws_ok(ctx.base | partners | pending) {
            return;
        }
        if depth == ctx.cands.len() {
            let sol = ctx
                .chosen
                .iter()
                .enumerate()
                .map(|(a, &p)| (ctx.witnesses[a], p))
                .collect();
            out.solutions.push(sol);
            return;
        }
        for p in bits(ctx.cands[depth]) {
            ctx.chosen.push(p);
            rec(ctx, depth + 1, partners | bit(p), out);
            ctx.chosen.pop();
            if out.aborted {
                return;
            }
        }
    }

    let mut ctx = Ctx {
        frame,
        cands: &cands,
        witnesses: w,
        base,
        cap,
        chosen: Vec::new(),
    };
    rec(&mut ctx, 0, 0, &mut solved);
    solved
}

fn combinations(items: &[usize], size: usize, mut f: impl FnMut(&[usize])) {
    fn go(
        items: &[usize],
        size: usize,
        from: usize,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == size {
            f(cur);
            return;
        }
        let need = size - cur.len();
        if items.len() < from + need {
            return;
        }
        for k in from..=items.len() - need {
            cur.push(items[k]);
            go(items, size, k + 1, cur, f);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::with_capacity(size), &mut f);
}

pub fn max_pairs_with(
    start: &WindowConfig,
    filter: &WitnessFilter,
    budget: u64,
) -> Result<Verdict<MaxPairs>, LocalError> {
    let frame = Frame::new(start.kind, start.r, start.center, 2 * start.r)?;
    let states = frame.states_of(start);
    let (fixed_code, fixed_non) = Frame::masks(&states);
    if !frame.laws_ok(frame.all & !fixed_non) {
        return Err(LocalError::Inconsistent);
    }
    let stab = frame.stabilizer(&states);
    let center_idx = frame.index[&start.center];
    let wanted: Option<Vec<usize>> = match filter {
        WitnessFilter::Exactly(set) => {
            let mut idx = Vec::new();
            for v in set {
                match frame.index.get(v) {
                    Some(&k) if frame.candidates.contains(&k) => idx.push(k),
                    _ => return Err(LocalError::OutsideWindow(*v)),
                }
            }
            idx.sort_unstable();
            Some(idx)
        }
        _ => None,
    };
    let admits = |w: &[usize]| match filter {
        WitnessFilter::Any => true,
        WitnessFilter::CenterWitness => w.contains(&center_idx),
        WitnessFilter::CenterNotWitness => !w.contains(&center_idx),
        WitnessFilter::Exactly(_) => wanted.as_deref() == Some(w),
    };

    let mut nodes = 0u64;
    for size in (0..=frame.candidates.len()).rev() {
        let mut subsets = Vec::new();
        combinations(&frame.candidates, size, |w| {
            if admits(w) && frame.is_canonical_subset(w, &stab) {
                subsets.push(w.to_vec());
            }
        });
        if subsets.is_empty() {
            continue;
        }
        let results: Vec<Solved> = subsets
            .par_iter()
            .map(|w| solve_witness_set(&frame, fixed_code, fixed_non, w, budget))
            .collect();
        let level_nodes: u64 = results.iter().map(|s| s.nodes).sum();
        nodes += level_nodes;
        if results.iter().any(|s| s.aborted) || nodes > budget {
            return Ok(Verdict::Inconclusive { nodes });
        }
        let mut found: BTreeMap<String, Extremal> = BTreeMap::new();
        for sol in results.into_iter().flat_map(|s| s.solutions) {
            let pairs: Vec<(usize, Option<usize>)> =
                sol.iter().map(|&(w, p)| (w, Some(p))).collect();
            let st = frame.structure_states(&states, &pairs);
            let key = frame.canonical_key(&st, &stab);
            found.entry(key.clone()).or_insert_with(|| Extremal {
                pairs: sol
                    .iter()
                    .map(|&(w, p)| (frame.cells[w], frame.cells[p]))
                    .collect(),
                states: frame.cells.iter().copied().zip(st).collect(),
                key,
            });
        }
        if !found.is_empty() {
            return Ok(Verdict::Complete(MaxPairs {
                max_p: Some(size),
                extremal: found.into_values().collect(),
                nodes,
            }));
        }
    }
    Ok(Verdict::Complete(MaxPairs {
        max_p: None,
        extremal: Vec::new(),
        nodes,
    }))
}

/// Brute-force oracle: every completion of the free cells of `start` inside
/// `B_R(center)` is checked against the laws of that smaller window.
///
/// With `R = 2r` the result must match `max_pairs` exactly. With a smaller
/// `R` fewer laws apply and witnesses whose balls leave the window are
/// counted optimistically (at most two codewords seen inside), so the
/// maximum can only grow.
pub fn naive_enumerate(start: &WindowConfig, reduced_radius: u32) -> Result<MaxPairs, LocalError> {
    if reduced_radius > 2 * start.r {
        return Err(LocalError::ReducedRadius {
            reduced: reduced_radius,
            window: 2 * start.r,
        });
    }
    let frame = Frame::new(start.kind, start.r, start.center, reduced_radius)?;
    let states = frame.states_of(start);
    let (fixed_code, _) = Frame::masks(&states);
    let free: Vec<usize> = (0..states.len())
        .filter(|&k| states[k] == CellState::Free)
        .collect();
    if free.len() > NAIVE_MAX_FREE {
        return Err(LocalError::SizeGuard {
            free: free.len(),
            max: NAIVE_MAX_FREE,
        });
    }
    let stab = frame.stabilizer(&states);
    let center_idx = frame.index[&start.center];
    let witness_cells: Vec<usize> = (0..frame.cells.len())
        .filter(|&k| frame.ball[center_idx] & bit(k) != 0 || frame.ball[k] & frame.center_bit != 0)
        .filter(|&k| distance_ok(&frame, k))
        .collect();

    let mut best: Option<usize> = None;
    let mut found: BTreeMap<String, Extremal> = BTreeMap::new();
    for assignment in 0u64..(1u64 << free.len()) {
        let mut code = fixed_code | frame.center_bit;
        for (b, &k) in free.iter().enumerate() {
            if assignment >> b & 1 == 1 {
                code |= bit(k);
            }
        }
        if !frame.laws_ok(code) {
            continue;
        }
        let mut pairs: Vec<(usize, Option<usize>)> = Vec::new();
        for &v in &witness_cells {
            let seen = frame.ball[v] & code;
            let count = seen.count_ones();
            let witness = if frame.inside[v] {
                count == 2
            } else {
                count <= 2
            };
            if witness {
                pairs.push((v, bits(seen & !frame.center_bit).next()));
            }
        }
        let n = pairs.len();
        if best.is_some_and(|b| n < b) {
            continue;
        }
        if best.is_none_or(|b| n > b) {
            best = Some(n);
            found.clear();
        }
        let st = frame.structure_states(&states, &pairs);
        let key = frame.canonical_key(&st, &stab);
        found.entry(key.clone()).or_insert_with(|| Extremal {
            pairs: pairs
                .iter()
                .filter_map(|&(w, p)| p.map(|p| (frame.cells[w], frame.cells[p])))
                .collect(),
            states: frame.cells.iter().copied().zip(st).collect(),
            key,
        });
    }
    if best.is_none() {
        return Err(LocalError::Inconsistent);
    }
    Ok(MaxPairs {
        max_p: best,
        extremal: found.into_values().collect(),
        nodes: 1u64 << free.len(),
    })
}

/// Witnesses of pairs containing the centre lie within distance `r`.
fn distance_ok(frame: &Frame, k: usize) -> bool {
    crate::grid::distance(frame.kind, frame.cells[k], frame.center) <= frame.r
}

/// Local statements with CLI names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statement {
    HexP6,
    SquareP8,
    AdjacentP6,
    Type1P4,
    Type2P6,
    Type3P6,
    ClaimPair,
    ClaimNoPair,
}

impl Statement {
    pub const ALL: [Statement; 8] = [
        Statement::HexP6,
        Statement::SquareP8,
        Statement::AdjacentP6,
        Statement::Type1P4,
        Statement::Type2P6,
        Statement::Type3P6,
        Statement::ClaimPair,
        Statement::ClaimNoPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statement::HexP6 => "hex-p6",
            Statement::SquareP8 => "square-p8",
            Statement::AdjacentP6 => "adjacent-p6",
            Statement::Type1P4 => "type1-p4",
            Statement::Type2P6 => "type2-p6",
            Statement::Type3P6 => "type3-p6",
            Statement::ClaimPair => "claim-pair",
            Statement::ClaimNoPair => "claim-nopair",
        }
    }

    pub fn kind(self) -> GridKind {
        match self {
            Statement::HexP6 => GridKind::Hex,
            _ => GridKind::Square,
        }
    }

    pub fn bound(self) -> usize {
        match self {
            Statement::HexP6 => 6,
            Statement::SquareP8 | Statement::ClaimPair | Statement::ClaimNoPair => 8,
            Statement::AdjacentP6 | Statement::Type2P6 | Statement::Type3P6 => 6,
            Statement::Type1P4 => 4,
        }
    }

    /// Cells fixed as codewords, relative to the centre. One orientation
    /// suffices: the others are images under the point symmetries.
    pub fn fixed_codewords(self) -> &'static [(i64, i64)] {
        match self {
            Statement::AdjacentP6 => &[(0, 1)],
            Statement::Type1P4 => &[(0, 1), (0, -1)],
            Statement::Type2P6 => &[(-1, 2), (2, -1)],
            Statement::Type3P6 => &[(-2, 1), (2, 1)],
            _ => &[],
        }
    }

    pub fn start(self) -> WindowConfig {
        WindowConfig::new(self.kind(), 2, Vertex::ORIGIN)
            .and_then(|w| w.with_relative(self.fixed_codewords(), CellState::Codeword))
            .expect("statement windows are small")
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statement {
    type Err = LocalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Statement::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| LocalError::UnknownStatement(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Certificate for one extremal configuration of a structural claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigRecord {
    pub key: String,
    /// Pattern shared by every leaf, or `None` if some leaf lacks one.
    pub property: Option<Vec<Pattern>>,
    /// Number of case splits needed to decide the pattern.
    pub leaves: usize,
    /// Assignments of uncertified leaves.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationCertificate {
    pub statement: Statement,
    pub bound: usize,
    pub budget: u64,
    pub max_found: Option<usize>,
    pub extremal_count: usize,
    pub nodes: u64,
    pub records: Vec<ConfigRecord>,
    pub checks: Vec<(String, bool)>,
    pub extremal: Vec<Extremal>,
    pub status: Status,
}

impl VerificationCertificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "statement {}", self.statement).unwrap();
        writeln!(out, "grid {}", self.statement.kind()).unwrap();
        writeln!(out, "r 2").unwrap();
        writeln!(out, "bound {}", self.bound).unwrap();
        writeln!(out, "budget {}", self.budget).unwrap();
        match self.max_found {
            Some(m) => writeln!(out, "max_found {m}").unwrap(),
            None => writeln!(out, "max_found none").unwrap(),
        }
        writeln!(out, "extremal_count {}", self.extremal_count).unwrap();
        writeln!(out, "nodes {}", self.nodes).unwrap();
        for (k, rec) in self.records.iter().enumerate() {
            let prop = match &rec.property {
                Some(ps) => ps
                    .iter()
                    .map(|p| format!("{p:?}"))
                    .collect::<Vec<_>>()
                    .join("|"),
                None => "none".to_string(),
            };
            writeln!(
                out,
                "config {k} cells {} certificate {prop} leaves {}",
                rec.key, rec.leaves
            )
            .unwrap();
            for f in &rec.failures {
                writeln!(out, "uncertified {k} cells {f}").unwrap();
            }
        }
        for (name, ok) in &self.checks {
            writeln!(out, "check {name} {}", if *ok { "pass" } else { "fail" }).unwrap();
        }
        writeln!(out, "status {}", self.status.name()).unwrap();
        out
    }
}

/// Pair bound certified for `q` by cells forced to be codewords.
fn certified_bound(frame: &Frame, forced: Mask, q: Vertex) -> Option<usize> {
    let is_cw = |v: Vertex| frame.index.get(&v).is_some_and(|&k| forced & bit(k) != 0);
    classify_with(is_cw, q).pair_bound()
}

/// Cells whose status could certify a bound for `q`.
fn pattern_cells(q: Vertex) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = crate::grid::neighbors(GridKind::Square, q);
    for base in [TYPE1_BASE, TYPE2_BASE, TYPE3_BASE] {
        for pat in type_patterns(base) {
            out.extend(pat.iter().map(|&d| q + d));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn property_of(bounds: &[Option<usize>]) -> Option<Pattern> {
    let low = bounds.iter().filter(|b| **b == Some(4)).count();
    let mid = bounds.iter().filter(|b| b.is_some_and(|x| x <= 6)).count();
    if low >= 1 && mid >= 3 {
        Some(Pattern::P1)
    } else if mid >= 6 {
        Some(Pattern::P2)
    } else {
        None
    }
}

struct Certification {
    patterns: BTreeSet<Pattern>,
    leaves: usize,
    failures: Vec<String>,
}

fn certify(
    frame: &Frame,
    states: &mut Vec<CellState>,
    partners: &[Vertex],
    out: &mut Certification,
) {
    let forced = frame.forced(states);
    let bounds: Vec<Option<usize>> = partners
        .iter()
        .map(|&q| certified_bound(frame, forced, q))
        .collect();
    if let Some(p) = property_of(&bounds) {
        out.patterns.insert(p);
        out.leaves += 1;
        return;
    }
    let split = partners
        .iter()
        .flat_map(|&q| pattern_cells(q))
        .filter_map(|v| frame.index.get(&v).copied())
        .filter(|&k| states[k] == CellState::Free && forced & bit(k) == 0)
        .min();
    match split {
        None => {
            out.leaves += 1;
            out.failures
                .push(states.iter().map(|s| s.symbol()).collect());
        }
        Some(k) => {
            for s in [CellState::Codeword, CellState::NonCodeword] {
                states[k] = s;
                certify(frame, states, partners, out);
            }
            states[k] = CellState::Free;
        }
    }
}

/// Runs the search for a statement and checks its claim.
pub fn verify_bound(
    statement: Statement,
    budget: u64,
) -> Result<VerificationCertificate, LocalError> {
    let start = statement.start();
    let filter = match statement {
        Statement::ClaimPair => WitnessFilter::CenterWitness,
        Statement::ClaimNoPair => WitnessFilter::CenterNotWitness,
        _ => WitnessFilter::Any,
    };
    let verdict = max_pairs_with(&start, &filter, budget)?;
    let mut cert = VerificationCertificate {
        statement,
        bound: statement.bound(),
        budget,
        max_found: None,
        extremal_count: 0,
        nodes: 0,
        records: Vec::new(),
        checks: Vec::new(),
        extremal: Vec::new(),
        status: Status::Inconclusive,
    };
    let result = match verdict {
        Verdict::Inconclusive { nodes } => {
            cert.nodes = nodes;
            return Ok(cert);
        }
        Verdict::Complete(r) => r,
    };
    cert.nodes = result.nodes;
    cert.max_found = result.max_p;
    cert.extremal_count = result.extremal.len();
    let max = result.max_p.unwrap_or(0);
    let mut ok = max <= cert.bound;
    match statement {
        Statement::SquareP8 => ok &= max == 8,
        Statement::ClaimPair | Statement::ClaimNoPair => {
            let frame = Frame::new(start.kind, start.r, start.center, 2 * start.r)?;
            if max == 8 {
                for ext in &result.extremal {
                    let mut states: Vec<CellState> = ext.states.iter().map(|&(_, s)| s).collect();
                    let partners: Vec<Vertex> = ext.pairs.iter().map(|&(_, p)| p).collect();
                    let mut c = Certification {
                        patterns: BTreeSet::new(),
                        leaves: 0,
                        failures: Vec::new(),
                    };
                    certify(&frame, &mut states, &partners, &mut c);
                    let property = c
                        .failures
                        .is_empty()
                        .then(|| c.patterns.iter().copied().collect::<Vec<_>>());
                    let good = match (&property, statement) {
                        (Some(ps), Statement::ClaimPair) => ps == &[Pattern::P1],
                        (Some(_), _) => true,
                        (None, _) => false,
                    };
                    ok &= good;
                    cert.records.push(ConfigRecord {
                        key: ext.key.clone(),
                        property,
                        leaves: c.leaves,
                        failures: c.failures,
                    });
                }
            }
            let checks = structural_checks(&frame, statement, &result.extremal, budget)?;
            for (_, pass) in &checks {
                ok &= *pass;
            }
            cert.checks = checks;
        }
        _ => {}
    }
    cert.extremal = result.extremal;
    cert.status = if ok { Status::Pass } else { Status::Fail };
    Ok(cert)
}

fn forced_at(frame: &Frame, ext: &Extremal) -> impl Fn(Vertex) -> bool {
    let states: Vec<CellState> = ext.states.iter().map(|&(_, s)| s).collect();
    let forced = frame.forced(&states);
    let index = frame.index.clone();
    move |v: Vertex| index.get(&v).is_some_and(|&k| forced & bit(k) != 0)
}

/// The concrete structural facts the claims rest on.
fn structural_checks(
    frame: &Frame,
    statement: Statement,
    extremal: &[Extremal],
    budget: u64,
) -> Result<Vec<(String, bool)>, LocalError> {
    let c = frame.center;
    let units = [(1, 0), (0, 1), (-1, 0), (0, -1)].map(Vertex::from);
    let mut checks = Vec::new();
    match statement {
        Statement::ClaimPair => {
            // A type 1 codeword two steps from the centre, flanked by
            // forced codewords.
            let all = !extremal.is_empty()
                && extremal.iter().all(|ext| {
                    let forced = forced_at(frame, ext);
                    units.iter().any(|&e| {
                        let perp = Vertex::new(-e.j, e.i);
                        let q = c + e + e;
                        forced(q) && forced(q + perp) && forced(q - perp)
                    })
                });
            checks.push(("type1-two-steps-away".to_string(), all));
        }
        Statement::ClaimNoPair => {
            let all = !extremal.is_empty()
                && extremal.iter().all(|ext| {
                    let forced = forced_at(frame, ext);
                    units.iter().all(|&e| forced(c + e + e + e))
                });
            checks.push(("forced-distance-three-axis".to_string(), all));
            let star: BTreeSet<Vertex> = units.iter().flat_map(|&e| [c + e, c + e + e]).collect();
            let start = WindowConfig::new(frame.kind, frame.r, c)?;
            let unsat = match max_pairs_with(&start, &WitnessFilter::Exactly(star), budget)? {
                Verdict::Complete(r) => r.max_p.is_none(),
                Verdict::Inconclusive { .. } => false,
            };
            checks.push(("axis-star-unsatisfiable".to_string(), unsat));
        }
        _ => {}
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind::*;

    fn v(i: i64, j: i64) -> Vertex {
        Vertex::new(i, j)
    }

    fn complete(start: &WindowConfig) -> MaxPairs {
        max_pairs(start)
            .unwrap()
            .complete()
            .expect("small searches finish")
    }

    /// The extremal structure with `free` of its cells reopened.
    fn reopened(start: &WindowConfig, ext: &Extremal, keep_every: usize) -> WindowConfig {
        let mut cfg = start.clone();
        for (k, &(cell, s)) in ext.states.iter().enumerate() {
            if s != CellState::Free && cell != start.center && k % keep_every != 0 {
                cfg.fix(cell, s).unwrap();
            }
        }
        cfg
    }

    #[test]
    fn window_sizes() {
        assert_eq!(
            WindowConfig::new(Square, 2, v(0, 0)).unwrap().cells().len(),
            41
        );
        assert_eq!(
            WindowConfig::new(Hex, 2, v(0, 0)).unwrap().cells().len(),
            31
        );
        assert!(matches!(
            WindowConfig::new(Square, 4, v(0, 0)),
            Err(LocalError::WindowTooLarge { cells: 145, .. })
        ));
    }

    #[test]
    fn fix_rejects_bad_cells() {
        let mut cfg = WindowConfig::new(Square, 2, v(0, 0)).unwrap();
        assert_eq!(
            cfg.fix(v(5, 0), CellState::Codeword),
            Err(LocalError::OutsideWindow(v(5, 0)))
        );
        assert_eq!(
            cfg.fix(v(0, 0), CellState::NonCodeword),
            Err(LocalError::CenterNotCodeword)
        );
    }

    #[test]
    fn statement_names_round_trip() {
        for st in Statement::ALL {
            assert_eq!(st.name().parse::<Statement>().unwrap(), st);
        }
        assert!("square-p9".parse::<Statement>().is_err());
    }

    #[test]
    fn all_statements_pass() {
        for st in Statement::ALL {
            let cert = verify_bound(st, DEFAULT_BUDGET).unwrap();
            assert_eq!(cert.status, Status::Pass, "{}", cert.to_text());
        }
    }

    #[test]
    fn unrestricted_maxima() {
        let sq = complete(&Statement::SquareP8.start());
        assert_eq!(sq.max_p, Some(8));
        let hex = complete(&Statement::HexP6.start());
        assert!(hex.max_p.unwrap() <= 6);
    }

    #[test]
    fn other_orientations_agree() {
        let c = v(0, 0);
        for st in [
            Statement::AdjacentP6,
            Statement::Type1P4,
            Statement::Type2P6,
            Statement::Type3P6,
        ] {
            let want = complete(&st.start()).max_p;
            for g in PointSymmetry::all(Square, c) {
                let mut cfg = WindowConfig::new(Square, 2, c).unwrap();
                for &d in st.fixed_codewords() {
                    cfg.fix(g.apply(c + Vertex::from(d)), CellState::Codeword)
                        .unwrap();
                }
                assert_eq!(complete(&cfg).max_p, want, "{st}");
            }
        }
    }

    #[test]
    fn translated_window_agrees() {
        let at = |c: Vertex| {
            let mut cfg = WindowConfig::new(Square, 2, c).unwrap();
            cfg.fix(c + v(0, 1), CellState::Codeword).unwrap();
            complete(&cfg)
        };
        let a = at(v(0, 0));
        let b = at(v(7, -3));
        assert_eq!(a.max_p, b.max_p);
        assert_eq!(a.extremal.len(), b.extremal.len());
        // Hex translations must keep parity.
        let h0 = complete(&WindowConfig::new(Hex, 2, v(0, 0)).unwrap());
        let h1 = complete(&WindowConfig::new(Hex, 2, v(3, 1)).unwrap());
        assert_eq!(h0.max_p, h1.max_p);
        assert_eq!(h0.extremal.len(), h1.extremal.len());
    }

    #[test]
    fn fixing_cells_never_raises_the_maximum() {
        let base = complete(&Statement::SquareP8.start()).max_p.unwrap();
        for cell in ball(Square, v(0, 0), 4).members {
            if cell == v(0, 0) {
                continue;
            }
            for s in [CellState::Codeword, CellState::NonCodeword] {
                let mut cfg = Statement::SquareP8.start();
                cfg.fix(cell, s).unwrap();
                if let Ok(Verdict::Complete(r)) = max_pairs(&cfg) {
                    assert!(r.max_p.unwrap_or(0) <= base);
                }
            }
        }
    }

    #[test]
    fn extremal_structures_are_valid_witness_sets() {
        let start = Statement::SquareP8.start();
        let laws = LocalLawSet::new(Square, 2, v(0, 0), 4);
        for ext in complete(&start).extremal {
            assert_eq!(ext.pairs.len(), 8);
            // Filling free cells with codewords satisfies the laws.
            let code: BTreeSet<Vertex> = ext
                .states
                .iter()
                .filter(|(_, s)| *s != CellState::NonCodeword)
                .map(|&(c, _)| c)
                .collect();
            assert!(laws.satisfied_by(Square, 2, |u| code.contains(&u)));
            let balls = BallOffsets::new(Square, 2);
            for &(w, p) in &ext.pairs {
                let id: BTreeSet<Vertex> = balls.around(w).filter(|u| code.contains(u)).collect();
                assert_eq!(id, [v(0, 0), p].into_iter().collect());
            }
        }
    }

    #[test]
    fn naive_matches_pruned_on_reopened_structures() {
        let mut checked = 0;
        for st in [Statement::SquareP8, Statement::Type1P4, Statement::HexP6] {
            let start = st.start();
            let exts = complete(&start).extremal;
            for ext in exts.iter().take(4) {
                for keep in [2, 3] {
                    let cfg = reopened(&start, ext, keep);
                    if cfg.free_count() > 20 {
                        continue;
                    }
                    let pruned = complete(&cfg);
                    let naive = naive_enumerate(&cfg, 4).unwrap();
                    assert_eq!(pruned.max_p, naive.max_p);
                    let pk: Vec<&String> = pruned.extremal.iter().map(|e| &e.key).collect();
                    let nk: Vec<&String> = naive.extremal.iter().map(|e| &e.key).collect();
                    assert_eq!(pk, nk);
                    checked += 1;
                }
            }
        }
        assert!(checked >= 6, "{checked}");
    }

    #[test]
    fn reduced_window_only_relaxes() {
        let start = Statement::Type1P4.start();
        let ext = &complete(&start).extremal[0];
        let cfg = reopened(&start, ext, 2);
        let full = complete(&cfg).max_p.unwrap();
        let reduced = naive_enumerate(&cfg, 3).unwrap().max_p.unwrap();
        assert!(reduced >= full);
    }

    #[test]
    fn naive_guards() {
        let start = Statement::SquareP8.start();
        assert!(matches!(
            naive_enumerate(&start, 4),
            Err(LocalError::SizeGuard { .. })
        ));
        assert!(matches!(
            naive_enumerate(&start, 5),
            Err(LocalError::ReducedRadius { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let verdict = max_pairs_with(&Statement::SquareP8.start(), &WitnessFilter::Any, 3).unwrap();
        assert!(matches!(verdict, Verdict::Inconclusive { .. }));
        let cert = verify_bound(Statement::SquareP8, 3).unwrap();
        assert_eq!(cert.status, Status::Inconclusive);
        assert!(cert.to_text().ends_with("status inconclusive\n"));
    }

    #[test]
    fn inconsistent_start_is_rejected() {
        // Empty identifying set at the centre's neighbour.
        let mut cfg = WindowConfig::new(Square, 2, v(0, 0)).unwrap();
        for u in ball(Square, v(1, 0), 2).members {
            if u != v(0, 0) {
                cfg.fix(u, CellState::NonCodeword).unwrap();
            }
        }
        for u in ball(Square, v(2, 0), 2).members {
            if cfg.get(u).is_some() && u != v(0, 0) {
                cfg.fix(u, CellState::NonCodeword).unwrap();
            }
        }
        // I(1,0) and I(2,0) both equal {(0,0)}.
        assert_eq!(max_pairs(&cfg), Err(LocalError::Inconsistent));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let run = |n: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| {
                    verify_bound(Statement::ClaimNoPair, DEFAULT_BUDGET)
                        .unwrap()
                        .to_text()
                })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn catalogue_invariants() {
        let near: BTreeSet<Vertex> = ball(Square, v(0, 0), 2).members.into_iter().collect();
        let cell = |d: &(i64, i64)| Vertex::from(*d);
        let mut union = BTreeSet::new();
        for (k, s) in CellSetCatalog::S.iter().enumerate() {
            // Each S_k is the image of S_0 under a quarter turn.
            let rot = |u: Vertex, n: usize| (0..n).fold(u, |x, _| v(-x.j, x.i));
            let img: BTreeSet<Vertex> = CellSetCatalog::S[0]
                .iter()
                .map(|d| rot(cell(d), k))
                .collect();
            assert_eq!(img, s.iter().map(cell).collect());
            assert!(s.iter().all(|d| near.contains(&cell(d))));
            union.extend(s.iter().map(cell));
        }
        // Together with the centre the S sets cover B_2.
        union.insert(v(0, 0));
        assert_eq!(union, near);
        for t in [
            &CellSetCatalog::T0[..],
            &CellSetCatalog::T1[..],
            &CellSetCatalog::T2[..],
            &CellSetCatalog::T3[..],
        ] {
            assert!(t.iter().all(|d| near.contains(&cell(d))));
        }
    }

    #[test]
    fn law_set_matches_frame() {
        let laws = LocalLawSet::new(Hex, 2, v(0, 0), 4);
        let frame = Frame::new(Hex, 2, v(0, 0), 4).unwrap();
        assert_eq!(laws.nonempty.len(), frame.scope.len());
        assert_eq!(laws.distinct.len(), frame.distinct.len());
        let mut rng = 0x2545f4914f6cdd1du64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng % 100
        };
        assert!(frame.laws_ok(frame.all), "full window");
        let mut verdicts = BTreeSet::new();
        for round in 0..400 {
            let keep = 10 + round % 90;
            let mask = (0..frame.cells.len())
                .filter(|_| next() < keep)
                .fold(0, |m, k| m | bit(k));
            let members: BTreeSet<Vertex> = bits(mask).map(|k| frame.cells[k]).collect();
            let ok = frame.laws_ok(mask);
            assert_eq!(ok, laws.satisfied_by(Hex, 2, |u| members.contains(&u)));
            verdicts.insert(ok);
        }
        assert_eq!(verdicts.len(), 2);
    }
}

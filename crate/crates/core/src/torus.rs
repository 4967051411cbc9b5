//! Identifying codes on finite tori.
//!
//! A code on the `n x n` torus is the same thing as a periodic code with
//! period `n x n`, so torus searches yield explicit periodic codes.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::density_lower_bound;
use crate::code::PeriodicCode;
use crate::error::TorusError;
use crate::grid::{ball_size, neighbors, GridKind, Vertex};

/// Largest torus side accepted.
pub const MAX_SIDE: u32 = 64;

/// Fixed-width bit set over torus vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn xor(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect())
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut m = word;
            std::iter::from_fn(move || {
                if m == 0 {
                    None
                } else {
                    let b = m.trailing_zeros() as usize;
                    m &= m - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }
}

#[derive(Clone, Debug)]
pub struct TorusInstance {
    pub kind: GridKind,
    pub n: u32,
    pub r: u32,
    /// `B_r(v)` on the torus, as sorted vertex indices.
    balls: Vec<Vec<usize>>,
    dist: Vec<Vec<u32>>,
}

impl TorusInstance {
    pub fn new(kind: GridKind, n: u32, r: u32) -> Result<Self, TorusError> {
        if n < 2 || r == 0 {
            return Err(TorusError::BadSide(n));
        }
        if n > MAX_SIDE {
            return Err(TorusError::TooLarge(n as usize));
        }
        if kind == GridKind::Hex && !n.is_multiple_of(2) {
            return Err(TorusError::OddHexSide(n));
        }
        let cells = (n * n) as usize;
        let mut inst = TorusInstance {
            kind,
            n,
            r,
            balls: Vec::with_capacity(cells),
            dist: Vec::with_capacity(cells),
        };
        for k in 0..cells {
            let d = inst.bfs(k);
            inst.balls.push((0..cells).filter(|&u| d[u] <= r).collect());
            inst.dist.push(d);
        }
        Ok(inst)
    }

    pub fn len(&self) -> usize {
        (self.n * self.n) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self, k: usize) -> Vertex {
        let n = self.n as usize;
        Vertex::new((k / n) as i64, (k % n) as i64)
    }

    pub fn index(&self, v: Vertex) -> usize {
        let n = self.n as i64;
        (v.i.rem_euclid(n) * n + v.j.rem_euclid(n)) as usize
    }

    fn torus_neighbors(&self, k: usize) -> Vec<usize> {
        neighbors(self.kind, self.vertex(k))
            .into_iter()
            .map(|u| self.index(u))
            .collect()
    }

    fn bfs(&self, source: usize) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.len()];
        d[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for y in self.torus_neighbors(x) {
                if d[y] == u32::MAX {
                    d[y] = d[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        d
    }

    pub fn distance(&self, u: Vertex, v: Vertex) -> u32 {
        self.dist[self.index(u)][self.index(v)]
    }

    /// Balls stop wrapping onto themselves from this side on, and
    /// vertices further than `2r` apart have disjoint balls.
    pub fn is_large(&self) -> bool {
        self.n > 4 * self.r
    }

    fn ball_bits(&self, k: usize) -> Bits {
        let mut b = Bits::new(self.len());
        for &u in &self.balls[k] {
            b.set(u);
        }
        b
    }

    /// Sets a code must hit: every ball, and the symmetric difference of
    /// every pair of balls that can intersect. `None` if some pair of
    /// vertices can never be separated.
    fn constraints(&self) -> Option<Vec<Bits>> {
        let balls: Vec<Bits> = (0..self.len()).map(|k| self.ball_bits(k)).collect();
        let mut set: BTreeSet<Bits> = balls.iter().cloned().collect();
        for u in 0..self.len() {
            for v in u + 1..self.len() {
                if self.is_large() && self.dist[u][v] > 2 * self.r {
                    continue;
                }
                let d = balls[u].xor(&balls[v]);
                if d.is_empty() {
                    return None;
                }
                set.insert(d);
            }
        }
        // Hitting a set also hits its supersets.
        let mut list: Vec<Bits> = set.into_iter().collect();
        list.sort_by_key(|b| b.ones().count());
        let mut minimal: Vec<Bits> = Vec::new();
        for b in list {
            if !minimal.iter().any(|m| m.is_subset(&b)) {
                minimal.push(b);
            }
        }
        Some(minimal)
    }

    /// Direct check of both conditions over all vertices and all pairs.
    pub fn is_identifying(&self, code: &[Vertex]) -> bool {
        let members: HashSet<usize> = code.iter().map(|&v| self.index(v)).collect();
        let mut seen = HashSet::new();
        for ball in &self.balls {
            let id: Vec<usize> = ball
                .iter()
                .copied()
                .filter(|u| members.contains(u))
                .collect();
            if id.is_empty() || !seen.insert(id) {
                return false;
            }
        }
        true
    }

    pub fn to_periodic(&self, code: &[Vertex]) -> Result<PeriodicCode, crate::error::CodeError> {
        PeriodicCode::new(
            self.kind,
            self.n,
            self.n,
            code.iter().map(|&v| self.vertex(self.index(v))),
        )
    }

    /// Size forced by the proven counting bound, used to stop early.
    fn proven_floor(&self) -> usize {
        if self.kind == GridKind::Square && self.r == 2 && self.is_large() {
            let b = ball_size(self.kind, self.r) as u32;
            let d = density_lower_bound(b, num_rational::Rational64::from_integer(8));
            let cells = self.len() as i64;
            ((d * cells).ceil()).to_integer() as usize
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusOutcome {
    /// A minimum code.
    Optimal(Vec<Vertex>),
    /// Budget ran out; the best code found so far, if any.
    Inconclusive(Option<Vec<Vertex>>),
    /// No identifying code exists on this torus.
    NoCode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusResult {
    pub outcome: TorusOutcome,
    pub nodes: u64,
}

struct Search<'a> {
    cons: &'a [Bits],
    /// Constraints containing each vertex.
    by_vertex: Vec<Vec<usize>>,
    hits: Vec<u32>,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    best: Option<Vec<usize>>,
    floor: usize,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn available(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.cons[c].ones().filter(|&u| !self.excluded[u])
    }

    fn take(&mut self, u: usize) {
        self.chosen.push(u);
        for &c in &self.by_vertex[u] {
            self.hits[c] += 1;
        }
    }

    fn untake(&mut self) {
        let u = self.chosen.pop().unwrap();
        for &c in &self.by_vertex[u] {
            self.hits[c] -= 1;
        }
    }

    fn best_len(&self) -> usize {
        self.best.as_ref().map_or(usize::MAX, Vec::len)
    }

    fn rec(&mut self) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        // Unhit constraints, the tightest first.
        let mut open: Vec<(usize, usize)> = (0..self.cons.len())
            .filter(|&c| self.hits[c] == 0)
            .map(|c| (self.available(c).count(), c))
            .collect();
        if open.is_empty() {
            if self.chosen.len() < self.best_len() {
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        open.sort_unstable();
        if open[0].0 == 0 {
            return;
        }
        // Pairwise disjoint open constraints each need their own codeword.
        let mut used = vec![false; self.excluded.len()];
        let mut packing = 0;
        for &(_, c) in &open {
            if self.available(c).all(|u| !used[u]) {
                packing += 1;
                for u in self.cons[c].ones() {
                    used[u] = true;
                }
            }
        }
        if self.chosen.len() + packing >= self.best_len() {
            return;
        }
        let branch: Vec<usize> = self.available(open[0].1).collect();
        let mut newly_excluded = Vec::new();
        for u in branch {
            self.take(u);
            self.rec();
            self.untake();
            if self.aborted || self.best_len() <= self.floor {
                break;
            }
            self.excluded[u] = true;
            newly_excluded.push(u);
        }
        for u in newly_excluded {
            self.excluded[u] = false;
        }
    }
}

/// Starting incumbent from a short fixed-seed heuristic run.
fn seed_incumbent(inst: &TorusInstance) -> Option<Vec<usize>> {
    heuristic_upper(inst, 0, 200).map(|code| code.into_iter().map(|v| inst.index(v)).collect())
}

/// Minimum identifying code by branch and bound.
pub fn min_code_exact(inst: &TorusInstance, budget: u64) -> TorusResult {
    let Some(cons) = inst.constraints() else {
        return TorusResult {
            outcome: TorusOutcome::NoCode,
            nodes: 0,
        };
    };
    let mut by_vertex = vec![Vec::new(); inst.len()];
    for (c, b) in cons.iter().enumerate() {
        for u in b.ones() {
            by_vertex[u].push(c);
        }
    }
    let mut search = Search {
        cons: &cons,
        by_vertex,
        hits: vec![0; cons.len()],
        excluded: vec![false; inst.len()],
        chosen: Vec::new(),
        best: seed_incumbent(inst),
        floor: inst.proven_floor(),
        nodes: 0,
        budget,
        aborted: false,
    };
    // Translations act transitively on each parity class, so some codeword
    // can be moved to (0,0); on the hex grid either an even codeword exists
    // or every codeword is odd and one can be moved to (1,0).
    search.take(inst.index(Vertex::ORIGIN));
    search.rec();
    search.untake();
    if inst.kind == GridKind::Hex && !search.aborted && search.best_len() > search.floor {
        for k in 0..inst.len() {
            if inst.vertex(k).is_even() {
                search.excluded[k] = true;
            }
        }
        search.take(inst.index(Vertex::new(1, 0)));
        search.rec();
        search.untake();
    }
    let best = search.best.map(|b| {
        let mut code: Vec<Vertex> = b.into_iter().map(|k| inst.vertex(k)).collect();
        code.sort();
        code
    });
    let outcome = match (search.aborted, best) {
        (true, best) => TorusOutcome::Inconclusive(best),
        (false, Some(code)) => TorusOutcome::Optimal(code),
        (false, None) => TorusOutcome::NoCode,
    };
    TorusResult {
        outcome,
        nodes: search.nodes,
    }
}

/// Small code by randomized removal and repair; deterministic per seed.
pub fn heuristic_upper(inst: &TorusInstance, seed: u64, iters: u32) -> Option<Vec<Vertex>> {
    let cons = inst.constraints()?;
    let mut by_vertex = vec![Vec::new(); inst.len()];
    for (c, b) in cons.iter().enumerate() {
        for u in b.ones() {
            by_vertex[u].push(c);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut member = vec![true; inst.len()];
    let mut hits: Vec<u32> = cons.iter().map(|b| b.ones().count() as u32).collect();
    let mut order: Vec<usize> = (0..inst.len()).collect();

    let prune = |member: &mut Vec<bool>, hits: &mut Vec<u32>, order: &[usize]| {
        for &u in order {
            if member[u] && by_vertex[u].iter().all(|&c| hits[c] > 1) {
                member[u] = false;
                for &c in &by_vertex[u] {
                    hits[c] -= 1;
                }
            }
        }
    };

    order.shuffle(&mut rng);
    prune(&mut member, &mut hits, &order);
    let mut best = member.clone();
    let size = |m: &[bool]| m.iter().filter(|&&b| b).count();
    for _ in 0..iters {
        let mut trial = best.clone();
        let mut trial_hits = vec![0u32; cons.len()];
        for (u, _) in trial.iter().enumerate().filter(|(_, &b)| b) {
            for &c in &by_vertex[u] {
                trial_hits[c] += 1;
            }
        }
        // Reopen a few non-codewords, then prune again in a fresh order.
        let kick = rng.gen_range(2..=6);
        for _ in 0..kick {
            let u = rng.gen_range(0..inst.len());
            if !trial[u] {
                trial[u] = true;
                for &c in &by_vertex[u] {
                    trial_hits[c] += 1;
                }
            }
        }
        order.shuffle(&mut rng);
        prune(&mut trial, &mut trial_hits, &order);
        if size(&trial) <= size(&best) {
            best = trial;
        }
    }
    let mut code: Vec<Vertex> = (0..inst.len())
        .filter(|&u| best[u])
        .map(|u| inst.vertex(u))
        .collect();
    code.sort();
    Some(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridKind::*;

    /// Smallest identifying code by trying subsets in order of size.
    fn naive_min(inst: &TorusInstance) -> Option<usize> {
        let cells = inst.len();
        assert!(cells <= 25);
        let mut by_size: Vec<u32> = (1..1u32 << cells).collect();
        by_size.sort_by_key(|m| m.count_ones());
        by_size.into_iter().find_map(|m| {
            let code: Vec<Vertex> = (0..cells)
                .filter(|&k| m >> k & 1 == 1)
                .map(|k| inst.vertex(k))
                .collect();
            inst.is_identifying(&code).then_some(code.len())
        })
    }

    fn exact_size(inst: &TorusInstance) -> Option<usize> {
        match min_code_exact(inst, u64::MAX).outcome {
            TorusOutcome::Optimal(c) => {
                assert!(inst.is_identifying(&c));
                Some(c.len())
            }
            TorusOutcome::NoCode => None,
            TorusOutcome::Inconclusive(_) => panic!("unbounded budget"),
        }
    }

    #[test]
    fn instance_errors() {
        assert_eq!(
            TorusInstance::new(Hex, 5, 1).unwrap_err(),
            TorusError::OddHexSide(5)
        );
        assert!(TorusInstance::new(Square, 1, 1).is_err());
        assert!(TorusInstance::new(Square, 100, 1).is_err());
    }

    #[test]
    fn torus_balls_match_grid_when_large() {
        for (kind, n, r) in [(Square, 9, 2), (Hex, 10, 2), (Hex, 6, 1)] {
            let inst = TorusInstance::new(kind, n, r).unwrap();
            assert!(inst.balls.iter().all(|b| b.len() == ball_size(kind, r)));
            let far = Vertex::new(n as i64 - 1, 0);
            assert_eq!(inst.distance(Vertex::ORIGIN, far), 1);
        }
    }

    #[test]
    fn exact_matches_naive_on_small_tori() {
        for (kind, n, r) in [
            (Square, 3, 1),
            (Square, 4, 1),
            (Square, 5, 1),
            (Hex, 4, 1),
            (Square, 4, 2),
            (Square, 5, 2),
            (Hex, 4, 2),
        ] {
            let inst = TorusInstance::new(kind, n, r).unwrap();
            assert_eq!(exact_size(&inst), naive_min(&inst), "{kind} n={n} r={r}");
        }
    }

    #[test]
    fn heuristic_codes_are_valid() {
        for (kind, n, r) in [(Square, 9, 2), (Hex, 10, 2), (Square, 6, 1)] {
            let inst = TorusInstance::new(kind, n, r).unwrap();
            let code = heuristic_upper(&inst, 7, 200).unwrap();
            assert!(inst.is_identifying(&code));
            let periodic = inst.to_periodic(&code).unwrap();
            assert!(periodic.is_identifying_code(r).valid);
        }
    }

    #[test]
    fn heuristic_is_deterministic() {
        let inst = TorusInstance::new(Square, 9, 2).unwrap();
        assert_eq!(
            heuristic_upper(&inst, 3, 100),
            heuristic_upper(&inst, 3, 100)
        );
    }

    #[test]
    fn exhausted_budget_is_inconclusive() {
        let inst = TorusInstance::new(Square, 9, 2).unwrap();
        let res = min_code_exact(&inst, 10);
        assert!(matches!(res.outcome, TorusOutcome::Inconclusive(_)));
    }

    #[test]
    fn torus_validity_matches_periodic_validity() {
        // For large tori the two notions coincide.
        let inst = TorusInstance::new(Square, 9, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let base = heuristic_upper(&inst, 1, 50).unwrap();
        for _ in 0..30 {
            let mut code = base.clone();
            let drop = rng.gen_range(0..code.len());
            code.remove(drop);
            let extra = inst.vertex(rng.gen_range(0..inst.len()));
            if !code.contains(&extra) {
                code.push(extra);
            }
            let periodic = inst.to_periodic(&code).unwrap();
            assert_eq!(
                inst.is_identifying(&code),
                periodic.is_identifying_code(2).valid
            );
        }
    }
}

//! Discharging on the auxiliary graph.
//!
//! Every vertex starts with charge `deg - 7`. A degree-8 vertex sends its
//! unit of excess away: `2/3` to one neighbour of degree at most 4 and `1/6`
//! to two neighbours of degree at most 6 (pattern P1), or `1/6` to six
//! neighbours of degree at most 6 (pattern P2). When every degree-8 vertex
//! has one of the patterns, every final charge is at most zero and the
//! average degree is at most 7.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_rational::Rational64;

use crate::error::DischargeError;
use crate::fraction;
use crate::grid::Vertex;
use crate::pairs::AuxGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pattern {
    P1,
    P2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub from: Vertex,
    pub to: Vertex,
    pub amount: Rational64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeLedger {
    pub initial: BTreeMap<Vertex, Rational64>,
    pub transfers: Vec<Transfer>,
    pub final_charge: BTreeMap<Vertex, Rational64>,
    /// Pattern used at each degree-8 vertex.
    pub patterns: BTreeMap<Vertex, Pattern>,
}

impl ChargeLedger {
    pub fn total_initial(&self) -> Rational64 {
        self.initial.values().sum()
    }

    pub fn total_final(&self) -> Rational64 {
        self.final_charge.values().sum()
    }

    pub fn all_nonpositive(&self) -> bool {
        self.final_charge
            .values()
            .all(|&e| e <= Rational64::from_integer(0))
    }

    /// Total charge received by `v`.
    pub fn received(&self, v: Vertex) -> Rational64 {
        self.transfers
            .iter()
            .filter(|t| t.to == v)
            .map(|t| t.amount)
            .sum()
    }

    /// `charge` lines in vertex order, then `transfer` lines in the order
    /// they were applied.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, init) in &self.initial {
            let fin = self.final_charge[v];
            writeln!(
                out,
                "charge {} {} initial {} final {}",
                v.i,
                v.j,
                fraction(*init),
                fraction(fin)
            )
            .unwrap();
        }
        for t in &self.transfers {
            writeln!(
                out,
                "transfer {} {} to {} {} amount {}",
                t.from.i,
                t.from.j,
                t.to.i,
                t.to.j,
                fraction(t.amount)
            )
            .unwrap();
        }
        out
    }
}

/// Which pattern (if any) the neighbourhood of `v` offers, with canonical
/// targets: P1 is preferred, and targets are the lexicographically smallest
/// eligible neighbours.
pub fn pattern_targets(graph: &AuxGraph, v: Vertex) -> Option<(Pattern, Vec<Vertex>)> {
    let nbrs: Vec<Vertex> = graph.neighbors(v).collect();
    if let Some(&low) = nbrs.iter().find(|&&u| graph.degree(u) <= 4) {
        let mids: Vec<Vertex> = nbrs
            .iter()
            .copied()
            .filter(|&u| u != low && graph.degree(u) <= 6)
            .take(2)
            .collect();
        if mids.len() == 2 {
            return Some((Pattern::P1, vec![low, mids[0], mids[1]]));
        }
    }
    let six: Vec<Vertex> = nbrs
        .into_iter()
        .filter(|&u| graph.degree(u) <= 6)
        .take(6)
        .collect();
    (six.len() == 6).then_some((Pattern::P2, six))
}

pub fn run_discharging(graph: &AuxGraph) -> Result<ChargeLedger, DischargeError> {
    let seven = Rational64::from_integer(7);
    let mut initial = BTreeMap::new();
    for &v in &graph.vertices {
        let d = graph.degree(v);
        if d > 8 {
            return Err(DischargeError::DegreeTooLarge {
                vertex: v,
                degree: d,
            });
        }
        initial.insert(v, Rational64::from_integer(d as i64) - seven);
    }
    let mut final_charge = initial.clone();
    let mut transfers = Vec::new();
    let mut patterns = BTreeMap::new();
    for &v in &graph.vertices {
        if graph.degree(v) != 8 {
            continue;
        }
        let (pattern, targets) = pattern_targets(graph, v).ok_or(DischargeError::NoPattern(v))?;
        let amounts: Vec<Rational64> = match pattern {
            Pattern::P1 => vec![
                Rational64::new(2, 3),
                Rational64::new(1, 6),
                Rational64::new(1, 6),
            ],
            Pattern::P2 => vec![Rational64::new(1, 6); 6],
        };
        for (to, amount) in targets.into_iter().zip(amounts) {
            *final_charge.get_mut(&v).unwrap() -= amount;
            *final_charge.get_mut(&to).unwrap() += amount;
            transfers.push(Transfer {
                from: v,
                to,
                amount,
            });
        }
        patterns.insert(v, pattern);
    }
    Ok(ChargeLedger {
        initial,
        transfers,
        final_charge,
        patterns,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AverageBound {
    pub holds: bool,
    /// `Σ deg`
    pub lhs: u64,
    /// `7 |V(Γ)|`
    pub rhs: u64,
}

pub fn check_average_bound(graph: &AuxGraph) -> AverageBound {
    let lhs = graph.degree_sum() as u64;
    let rhs = 7 * graph.vertices.len() as u64;
    AverageBound {
        holds: lhs <= rhs,
        lhs,
        rhs,
    }
}

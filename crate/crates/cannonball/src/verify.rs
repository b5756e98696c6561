//! Independent correctness checking and exact desk-scale oracles.
//!
//! Nothing here inspects solver internals: verification re-derives adjacency
//! from the lattice, the exact multichromatic number comes from exhaustive
//! search, and the clique oracle scans raw vertex subsets. These are the
//! second route against which the production paths are compared.

use std::collections::BTreeSet;

use crate::graph::{CannonballGraph, CliqueNumbers};
use crate::lattice::{self, GridVertex};
use crate::multicolor::{ColorAssignment, PaletteColor};

/// One defect found by [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertices: Vec<GridVertex>,
    pub color: Option<PaletteColor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A vertex received fewer colors than its demand.
    DemandShortfall,
    /// Two adjacent vertices share a color.
    EdgeConflict,
    /// The assignment colors a vertex the graph does not know about.
    UnknownVertex,
}

/// Result of checking an assignment against a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every support vertex holds at least its demand in colors and
/// that color sets are disjoint across every edge. Problems are reported, not
/// raised.
pub fn verify(g: &CannonballGraph, f: &ColorAssignment) -> VerificationReport {
    let mut report = VerificationReport::default();

    for v in f.vertices() {
        if g.demand(v) == 0 {
            report.violations.push(Violation {
                kind: ViolationKind::UnknownVertex,
                vertices: vec![v],
                color: f.colors(v).and_then(|s| s.iter().next().copied()),
            });
        }
    }

    for v in g.support() {
        let got = f.color_count(v);
        if got < g.demand(v) as usize {
            report.violations.push(Violation {
                kind: ViolationKind::DemandShortfall,
                vertices: vec![v],
                color: None,
            });
        }
    }

    let support: Vec<GridVertex> = g.support().collect();
    for &v in &support {
        let Some(cv) = f.colors(v) else { continue };
        for &u in &support {
            if u <= v {
                continue;
            }
            if !lattice::are_adjacent(v, u, g.stacking()).unwrap_or(false) {
                continue;
            }
            let Some(cu) = f.colors(u) else { continue };
            if let Some(&shared) = cv.intersection(cu).next() {
                report.violations.push(Violation {
                    kind: ViolationKind::EdgeConflict,
                    vertices: vec![v, u],
                    color: Some(shared),
                });
            }
        }
    }
    report
}

/// Number of distinct palette colors used anywhere in the assignment.
pub fn count_colors(f: &ColorAssignment) -> usize {
    f.distinct_colors()
}

/// Outcome of the exact search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOutcome {
    /// The multichromatic number.
    Exact(u64),
    /// The search ran past the color limit or its node budget. Never a wrong
    /// number: just no answer.
    ExceedsLimit,
}

/// Backtracking nodes allowed per feasibility probe.
const ORACLE_NODE_BUDGET: u64 = 20_000_000;

/// Exact multichromatic number by exhaustive search, for desk-scale
/// instances (intended: at most ~10 support vertices and ~30 demand units,
/// and the answer at most 64).
///
/// Vertices are tried in decreasing-demand order; each receives the
/// lexicographically least feasible index set, with the first vertex pinned
/// to a prefix to break color symmetry. The search starts at the clique lower
/// bound and grows `k` until a proper assignment exists.
pub fn exact_multichromatic(g: &CannonballGraph, limit: u64) -> OracleOutcome {
    let mut vertices: Vec<GridVertex> = g.support().collect();
    if vertices.is_empty() {
        return OracleOutcome::Exact(0);
    }
    vertices.sort_by_key(|&v| (std::cmp::Reverse(g.demand(v)), v));
    let demands: Vec<u32> = vertices.iter().map(|&v| g.demand(v)).collect();
    let n = vertices.len();

    let mut adjacent = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if lattice::are_adjacent(vertices[i], vertices[j], g.stacking()).unwrap_or(false) {
                adjacent[i].push(j);
                adjacent[j].push(i);
            }
        }
    }

    // Color sets are u64 bit sets, so anything past 64 colors is out of
    // reach regardless of the caller's limit.
    let limit = limit.min(64);
    let lower = g.clique_numbers().omega();
    if lower > limit {
        return OracleOutcome::ExceedsLimit;
    }

    for k in lower..=limit {
        let mut budget = ORACLE_NODE_BUDGET;
        match feasible(&demands, &adjacent, k as u32, &mut budget) {
            Some(true) => return OracleOutcome::Exact(k),
            Some(false) => continue,
            None => return OracleOutcome::ExceedsLimit,
        }
    }
    OracleOutcome::ExceedsLimit
}

/// `Some(true)` if a proper assignment into colors `1..=k` exists,
/// `Some(false)` if provably not, `None` on budget exhaustion.
fn feasible(demands: &[u32], adjacent: &[Vec<usize>], k: u32, budget: &mut u64) -> Option<bool> {
    let full: u64 = if k == 64 { !0 } else { (1u64 << k) - 1 };
    let mut sets = vec![0u64; demands.len()];
    assign(demands, adjacent, 0, full, &mut sets, budget)
}

fn assign(
    demands: &[u32],
    adjacent: &[Vec<usize>],
    i: usize,
    full: u64,
    sets: &mut [u64],
    budget: &mut u64,
) -> Option<bool> {
    if i == demands.len() {
        return Some(true);
    }
    if *budget == 0 {
        return None;
    }
    *budget -= 1;

    let mut avail = full;
    for &j in &adjacent[i] {
        if j < i {
            avail &= !sets[j];
        }
    }
    let need = demands[i];
    if avail.count_ones() < need {
        return Some(false);
    }
    if i == 0 {
        // Any color permutation maps a solution to one where the first
        // vertex takes the lowest prefix.
        let set = lowest_bits(avail, need);
        sets[0] = set;
        let r = assign(demands, adjacent, 1, full, sets, budget);
        sets[0] = 0;
        return r;
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(need as usize);
    enumerate_subsets(avail, need, 0, &mut chosen, &mut |set| {
        sets[i] = set;
        let r = assign(demands, adjacent, i + 1, full, sets, budget);
        sets[i] = 0;
        r
    })
}

fn lowest_bits(mut avail: u64, need: u32) -> u64 {
    let mut set = 0u64;
    for _ in 0..need {
        let bit = avail & avail.wrapping_neg();
        set |= bit;
        avail ^= bit;
    }
    set
}

/// Tries every `need`-subset of `avail` (as bit sets, lexicographically least
/// first) until the callback returns a definite `Some(true)`/`None`.
fn enumerate_subsets(
    avail: u64,
    need: u32,
    from: u32,
    chosen: &mut Vec<u32>,
    f: &mut dyn FnMut(u64) -> Option<bool>,
) -> Option<bool> {
    if need == 0 {
        let set = chosen.iter().fold(0u64, |acc, &b| acc | (1u64 << b));
        return f(set);
    }
    let remaining = 64 - from;
    if remaining < need {
        return Some(false);
    }
    for b in from..64 {
        if 64 - b < need {
            break;
        }
        if avail & (1u64 << b) == 0 {
            continue;
        }
        chosen.push(b);
        match enumerate_subsets(avail, need - 1, b + 1, chosen, f) {
            Some(true) => {
                chosen.pop();
                return Some(true);
            }
            Some(false) => {}
            None => {
                chosen.pop();
                return None;
            }
        }
        chosen.pop();
    }
    Some(false)
}

/// Clique numbers by scanning all subsets of size at most four drawn from the
/// support and its grid neighborhood. Exponential in the candidate count:
/// intended as an oracle for small instances only.
pub fn brute_cliques(g: &CannonballGraph) -> CliqueNumbers {
    let mut candidates: BTreeSet<GridVertex> = g.support().collect();
    for v in g.support() {
        for w in g.grid_neighbors(v).expect("support stays in region") {
            candidates.insert(w);
        }
    }
    let vs: Vec<GridVertex> = candidates.into_iter().collect();
    let s = g.stacking();
    let adj = |a: GridVertex, b: GridVertex| lattice::are_adjacent(a, b, s).unwrap_or(false);

    let mut w = CliqueNumbers::default();
    for i in 0..vs.len() {
        let di = g.demand(vs[i]) as u64;
        w.w1 = w.w1.max(di);
        for j in i + 1..vs.len() {
            if !adj(vs[i], vs[j]) {
                continue;
            }
            let dj = di + g.demand(vs[j]) as u64;
            w.w2 = w.w2.max(dj);
            for k in j + 1..vs.len() {
                if !adj(vs[i], vs[k]) || !adj(vs[j], vs[k]) {
                    continue;
                }
                let dk = dj + g.demand(vs[k]) as u64;
                w.w3 = w.w3.max(dk);
                for l in k + 1..vs.len() {
                    if adj(vs[i], vs[l]) && adj(vs[j], vs[l]) && adj(vs[k], vs[l]) {
                        w.w4 = w.w4.max(dk + g.demand(vs[l]) as u64);
                    }
                }
            }
        }
    }
    w.w2 = w.w2.max(w.w1);
    w.w3 = w.w3.max(w.w2);
    w.w4 = w.w4.max(w.w3);
    w
}

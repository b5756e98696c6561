//! Reusable coloring subroutines on abstract weighted graphs.
//!
//! Three building blocks:
//! - optimal multicoloring of weighted bipartite graphs (prefix sets on one
//!   side, shifted prefixes on the other),
//! - constructive 3-coloring of graphs with maximum degree 3 and no K4
//!   component (peel low-degree vertices, handle the cubic core with the
//!   standard two-precolored-neighbors construction, fall back to exhaustive
//!   search on tiny components),
//! - the 3/2-approximate multicoloring of 3-colorable graphs: split demands
//!   in half across the three bipartite graphs obtained by dropping one color
//!   class, and multicolor each optimally with its own palette.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubcolorError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

fn contract(msg: impl Into<String>) -> SubcolorError {
    SubcolorError::ContractViolation(msg.into())
}

/// An undirected vertex-weighted graph on vertices `0..n`.
#[derive(Debug, Clone)]
pub struct AbstractWeightedGraph {
    demands: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl AbstractWeightedGraph {
    pub fn new(demands: Vec<u32>, edges: &[(usize, usize)]) -> Result<Self, SubcolorError> {
        let n = demands.len();
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(contract(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(contract(format!("self-loop at vertex {a}")));
            }
            if seen.insert((a.min(b), a.max(b))) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { demands, adj })
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn demand(&self, v: usize) -> u32 {
        self.demands[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len())
            .flat_map(move |v| self.adj[v].iter().filter(move |&&u| v < u).map(move |&u| (v, u)))
    }

    /// Weighted clique number restricted to cliques of at most two vertices:
    /// the exact clique number for triangle-free (in particular bipartite)
    /// graphs.
    pub fn omega2(&self) -> u64 {
        let singles = self.demands.iter().map(|&d| d as u64).max().unwrap_or(0);
        let pairs = self
            .edges()
            .map(|(v, u)| self.demands[v] as u64 + self.demands[u] as u64)
            .max()
            .unwrap_or(0);
        singles.max(pairs)
    }
}

/// Side of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BipartiteSide {
    Left,
    Right,
}

/// A palette identifier together with the indices taken from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedColorSet {
    pub palette: u32,
    pub indices: BTreeSet<u32>,
}

impl IndexedColorSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Optimal multicoloring of a weighted bipartite graph.
///
/// Left vertices take the prefix `1..=d(v)`; a right vertex takes
/// `m(v)+1..=m(v)+d(v)` where `m(v)` is the largest demand among its
/// neighbors (0 if isolated). Across any edge the right set starts above the
/// left prefix, so the coloring is proper, and the total number of distinct
/// indices equals the weighted clique number of the graph.
pub fn bipartite_multicolor(
    h: &AbstractWeightedGraph,
    part: &[BipartiteSide],
    palette: u32,
) -> Result<Vec<IndexedColorSet>, SubcolorError> {
    if part.len() != h.len() {
        return Err(contract(format!(
            "bipartition length {} does not match vertex count {}",
            part.len(),
            h.len()
        )));
    }
    for (v, u) in h.edges() {
        if part[v] == part[u] {
            return Err(contract(format!("edge ({v},{u}) does not cross the bipartition")));
        }
    }
    let mut out = Vec::with_capacity(h.len());
    for (v, side) in part.iter().enumerate() {
        let d = h.demand(v);
        let start = match side {
            BipartiteSide::Left => 0,
            BipartiteSide::Right => h
                .neighbors(v)
                .iter()
                .map(|&u| h.demand(u))
                .max()
                .unwrap_or(0),
        };
        out.push(IndexedColorSet {
            palette,
            indices: (start + 1..=start + d).collect(),
        });
    }
    Ok(out)
}

/// Proper 3-coloring of a graph with maximum degree 3 and no K4 component.
///
/// Deterministic for a fixed input ordering.
pub fn three_color(h: &AbstractWeightedGraph) -> Result<Vec<u8>, SubcolorError> {
    let n = h.len();
    if h.max_degree() > 3 {
        return Err(contract(format!("maximum degree {} exceeds 3", h.max_degree())));
    }
    let mut colors: Vec<Option<u8>> = vec![None; n];

    // Peel vertices of current degree <= 2. Whatever remains is 3-regular.
    let mut removed = vec![false; n];
    let mut deg: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    let mut stack = Vec::new();
    let mut queue: Vec<usize> = (0..n).filter(|&v| deg[v] <= 2).collect();
    while let Some(v) = queue.pop() {
        if removed[v] {
            continue;
        }
        removed[v] = true;
        stack.push(v);
        for &u in h.neighbors(v) {
            if !removed[u] {
                deg[u] -= 1;
                if deg[u] == 2 {
                    queue.push(u);
                }
            }
        }
    }

    // Color each component of the cubic core.
    let mut visited = vec![false; n];
    for start in 0..n {
        if removed[start] || visited[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut bfs = vec![start];
        visited[start] = true;
        while let Some(v) = bfs.pop() {
            comp.push(v);
            for &u in h.neighbors(v) {
                if !removed[u] && !visited[u] {
                    visited[u] = true;
                    bfs.push(u);
                }
            }
        }
        comp.sort_unstable();
        color_cubic_component(h, &removed, &comp, &mut colors)?;
    }

    // Pop the peeled stack: a popped vertex sees at most two colored
    // neighbors (the ones that outlived it), so a free color always exists.
    while let Some(v) = stack.pop() {
        let mut used = [false; 3];
        for &u in h.neighbors(v) {
            if let Some(c) = colors[u] {
                used[c as usize] = true;
            }
        }
        let c = used
            .iter()
            .position(|&b| !b)
            .ok_or_else(|| contract(format!("no free color at peeled vertex {v}")))?;
        colors[v] = Some(c as u8);
    }

    let result: Vec<u8> = colors
        .into_iter()
        .map(|c| c.expect("every vertex is either peeled or in a core component"))
        .collect();
    for (v, u) in h.edges() {
        if result[v] == result[u] {
            return Err(contract(format!("internal: improper coloring on edge ({v},{u})")));
        }
    }
    Ok(result)
}

/// Upper bound on component size for the exhaustive fallback.
const BACKTRACK_LIMIT: usize = 20;

fn color_cubic_component(
    h: &AbstractWeightedGraph,
    removed: &[bool],
    comp: &[usize],
    colors: &mut [Option<u8>],
) -> Result<(), SubcolorError> {
    let in_comp = |v: usize| comp.binary_search(&v).is_ok();
    let core_nbrs = |v: usize| -> Vec<usize> {
        h.neighbors(v)
            .iter()
            .copied()
            .filter(|&u| !removed[u] && in_comp(u))
            .collect()
    };

    if comp.len() == 4 && comp.iter().all(|&v| core_nbrs(v).len() == 3) {
        // A 3-regular component on 4 vertices is K4.
        let all_adjacent = comp.iter().all(|&v| {
            comp.iter()
                .filter(|&&u| u != v)
                .all(|&u| h.neighbors(v).contains(&u))
        });
        if all_adjacent {
            return Err(contract("component is K4, which is not 3-colorable"));
        }
    }

    // Look for a root with two non-adjacent neighbors whose removal keeps the
    // component connected; precolor those two alike and greedily color the
    // rest from the farthest vertex inward. Every non-root vertex still has
    // its search-tree parent uncolored when reached, so it sees at most two
    // colors; the root sees the repeated precolor plus at most one more.
    for &r in comp {
        let nbrs = core_nbrs(r);
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                let (a, b) = (nbrs[i], nbrs[j]);
                if h.neighbors(a).contains(&b) {
                    continue;
                }
                if let Some(order) = bfs_order_without(comp, &core_nbrs, r, a, b) {
                    colors[a] = Some(0);
                    colors[b] = Some(0);
                    for &v in order.iter().rev() {
                        let mut used = [false; 3];
                        for &u in &core_nbrs(v) {
                            if let Some(c) = colors[u] {
                                used[c as usize] = true;
                            }
                        }
                        let c = used.iter().position(|&x| !x).ok_or_else(|| {
                            contract(format!("no free color at core vertex {v}"))
                        })?;
                        colors[v] = Some(c as u8);
                    }
                    return Ok(());
                }
            }
        }
    }

    if comp.len() <= BACKTRACK_LIMIT {
        return backtrack_color(&core_nbrs, comp, colors);
    }
    Err(contract(format!(
        "no constructive 3-coloring found for a cubic component of {} vertices",
        comp.len()
    )))
}

/// BFS order of `comp` minus `{a, b}` rooted at `r`; `None` if disconnected.
fn bfs_order_without(
    comp: &[usize],
    core_nbrs: &dyn Fn(usize) -> Vec<usize>,
    r: usize,
    a: usize,
    b: usize,
) -> Option<Vec<usize>> {
    let mut order = Vec::with_capacity(comp.len() - 2);
    let mut seen = BTreeSet::new();
    seen.insert(a);
    seen.insert(b);
    seen.insert(r);
    order.push(r);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for u in core_nbrs(v) {
            if seen.insert(u) {
                order.push(u);
            }
        }
    }
    if order.len() == comp.len() - 2 {
        Some(order)
    } else {
        None
    }
}

fn backtrack_color(
    core_nbrs: &dyn Fn(usize) -> Vec<usize>,
    comp: &[usize],
    colors: &mut [Option<u8>],
) -> Result<(), SubcolorError> {
    fn go(
        core_nbrs: &dyn Fn(usize) -> Vec<usize>,
        comp: &[usize],
        idx: usize,
        colors: &mut [Option<u8>],
    ) -> bool {
        if idx == comp.len() {
            return true;
        }
        let v = comp[idx];
        for c in 0..3u8 {
            if core_nbrs(v).iter().any(|&u| colors[u] == Some(c)) {
                continue;
            }
            colors[v] = Some(c);
            if go(core_nbrs, comp, idx + 1, colors) {
                return true;
            }
            colors[v] = None;
        }
        false
    }
    if go(core_nbrs, comp, 0, colors) {
        Ok(())
    } else {
        Err(contract("cubic component admits no 3-coloring"))
    }
}

/// Multicolors a 3-colorable graph with at most `3 * ceil((omega + 1) / 2)`
/// colors across three fresh palettes.
///
/// Dropping one color class leaves a bipartite graph; each vertex belongs to
/// two of the three, and its demand splits as `ceil(d / 2)` in the
/// lower-indexed one and `floor(d / 2)` in the other. Each bipartite piece is
/// multicolored optimally with its own palette, so sets never collide across
/// palettes, and within a palette properness comes from the bipartite rule.
pub fn triple_split_multicolor(
    h: &AbstractWeightedGraph,
    coloring: &[u8],
    palettes: [u32; 3],
) -> Result<Vec<Vec<IndexedColorSet>>, SubcolorError> {
    if coloring.len() != h.len() {
        return Err(contract("coloring length does not match vertex count"));
    }
    if let Some(v) = (0..h.len()).find(|&v| coloring[v] > 2) {
        return Err(contract(format!("vertex {v} has color {} > 2", coloring[v])));
    }
    for (v, u) in h.edges() {
        if coloring[v] == coloring[u] {
            return Err(contract(format!("improper input coloring on edge ({v},{u})")));
        }
    }

    let mut result: Vec<Vec<IndexedColorSet>> = vec![Vec::new(); h.len()];
    for (i, &palette) in palettes.iter().enumerate() {
        let excluded = i as u8;
        let members: Vec<usize> = (0..h.len()).filter(|&v| coloring[v] != excluded).collect();
        if members.is_empty() {
            continue;
        }
        let index_of = |v: usize| members.binary_search(&v).unwrap();

        let demands: Vec<u32> = members
            .iter()
            .map(|&v| {
                let d = h.demand(v);
                // The two subgraphs containing v are those excluding the
                // other two colors; the lower-indexed one gets the ceiling.
                let lower = (0..3).find(|&j| j != coloring[v]).unwrap();
                if excluded == lower {
                    d.div_ceil(2)
                } else {
                    d / 2
                }
            })
            .collect();
        let edges: Vec<(usize, usize)> = h
            .edges()
            .filter(|&(v, u)| coloring[v] != excluded && coloring[u] != excluded)
            .map(|(v, u)| (index_of(v), index_of(u)))
            .collect();
        let sub = AbstractWeightedGraph::new(demands, &edges)?;

        let classes: Vec<u8> = (0..3).filter(|&c| c != excluded).collect();
        let part: Vec<BipartiteSide> = members
            .iter()
            .map(|&v| {
                if coloring[v] == classes[0] {
                    BipartiteSide::Left
                } else {
                    BipartiteSide::Right
                }
            })
            .collect();
        let sets = bipartite_multicolor(&sub, &part, palette)?;
        for (k, set) in sets.into_iter().enumerate() {
            if !set.is_empty() {
                result[members[k]].push(set);
            }
        }
    }

    for (v, sets) in result.iter().enumerate() {
        let total: usize = sets.iter().map(|s| s.len()).sum();
        if total != h.demand(v) as usize {
            return Err(contract(format!(
                "internal: vertex {v} received {total} colors for demand {}",
                h.demand(v)
            )));
        }
    }
    Ok(result)
}

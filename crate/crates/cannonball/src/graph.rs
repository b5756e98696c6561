//! Demand-weighted cannonball graphs over a grid window.
//!
//! The graph is induced on the vertices of positive demand; every other grid
//! vertex behaves as if present with demand 0, so clique weights, the base
//! function kappa, and palette deficits quantify over the full grid. To
//! reproduce that on a finite window, all grid-wide queries run over the
//! window expanded by a one-vertex ring: deeper padding only adds weight-0
//! vertices whose triangles are dominated by triangles the ring already
//! provides.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::lattice::{
    self, GridRegion, GridVertex, LatticeError, StackingSequence, Tetrahedron, Triangle,
    IN_LAYER_STEPS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex {0} in demand list")]
    DuplicateVertex(GridVertex),
    #[error("vertex {0} lies outside the region")]
    OutsideRegion(GridVertex),
    #[error("palette {0} is not a base color")]
    NotABaseColor(u8),
    #[error("deficit of palette {c} is undefined at {v}: it is the vertex's own base color")]
    OwnPalette { v: GridVertex, c: u8 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Demand class of a vertex relative to its base function value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    /// `d(v) <= kappa(v)`
    Light,
    /// `kappa(v) < d(v) <= 2 kappa(v)`
    Heavy,
    /// `d(v) > 2 kappa(v)`
    VeryHeavy,
}

/// Maximal demand sums over grid cliques of bounded size.
///
/// `w1 <= w2 <= w3 <= w4` always, and `w4` is the weighted clique number of
/// the graph: cliques of the grid never exceed four vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CliqueNumbers {
    pub w1: u64,
    pub w2: u64,
    pub w3: u64,
    pub w4: u64,
}

impl CliqueNumbers {
    pub fn omega(&self) -> u64 {
        self.w4
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.w1, self.w2, self.w3, self.w4]
    }
}

/// A demand-weighted graph over a grid window.
///
/// Immutable after construction; all queries are read-only.
#[derive(Debug)]
pub struct CannonballGraph {
    region: GridRegion,
    padded: GridRegion,
    demand: BTreeMap<GridVertex, u32>,
    cliques: OnceLock<CliqueNumbers>,
}

impl CannonballGraph {
    /// Builds a graph from explicit demands. Vertices must be unique and lie
    /// inside the region; zero demands are accepted and ignored.
    pub fn build(
        region: GridRegion,
        demands: &[(GridVertex, u32)],
    ) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for &(v, d) in demands {
            if !region.contains(v) {
                return Err(GraphError::OutsideRegion(v));
            }
            if map.insert(v, d).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        map.retain(|_, d| *d > 0);
        let padded = region.expanded(1);
        Ok(Self {
            region,
            padded,
            demand: map,
            cliques: OnceLock::new(),
        })
    }

    pub fn region(&self) -> &GridRegion {
        &self.region
    }

    /// The region grown by the zero-demand ring used for grid-wide queries.
    pub fn padded_region(&self) -> &GridRegion {
        &self.padded
    }

    pub fn stacking(&self) -> &StackingSequence {
        self.region.stacking()
    }

    /// Demand of a vertex; 0 for anything outside the support.
    pub fn demand(&self, v: GridVertex) -> u32 {
        self.demand.get(&v).copied().unwrap_or(0)
    }

    /// Vertices of positive demand in canonical order.
    pub fn support(&self) -> impl Iterator<Item = GridVertex> + '_ {
        self.demand.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demand.is_empty()
    }

    pub fn base_color(&self, v: GridVertex) -> Result<u8, GraphError> {
        Ok(lattice::base_color(v, self.stacking())?)
    }

    /// Tangent vertices within the padded window (zero-demand ring included).
    pub fn grid_neighbors(&self, v: GridVertex) -> Result<Vec<GridVertex>, GraphError> {
        Ok(lattice::neighbors(v, &self.padded)?)
    }

    /// Tangent support vertices: the neighbors of `v` in the graph proper.
    pub fn support_neighbors(&self, v: GridVertex) -> Result<Vec<GridVertex>, GraphError> {
        let mut out = Vec::new();
        for (du, dv) in IN_LAYER_STEPS {
            let w = GridVertex::new(v.layer, v.u + du, v.v + dv);
            if self.demand.contains_key(&w) {
                out.push(w);
            }
        }
        for dl in [-1i32, 1] {
            let layer = v.layer + dl;
            if layer < 0 || layer as usize >= self.stacking().len() {
                continue;
            }
            for du in -1..=1 {
                for dv in -1..=1 {
                    let w = GridVertex::new(layer, v.u + du, v.v + dv);
                    if self.demand.contains_key(&w)
                        && lattice::are_adjacent(v, w, self.stacking())?
                    {
                        out.push(w);
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// All support edges as canonical pairs `(v, u)` with `v < u`.
    pub fn edges(&self) -> Result<Vec<(GridVertex, GridVertex)>, GraphError> {
        let mut out = Vec::new();
        for v in self.support() {
            for u in self.support_neighbors(v)? {
                if v < u {
                    out.push((v, u));
                }
            }
        }
        Ok(out)
    }

    /// Grid triangles through `v`, quantified over the padded window.
    pub fn triangles_at(&self, v: GridVertex) -> Result<Vec<Triangle>, GraphError> {
        Ok(lattice::triangles_containing(v, &self.padded)?)
    }

    /// Grid tetrahedra through `v`, quantified over the padded window.
    pub fn tetrahedra_at(&self, v: GridVertex) -> Result<Vec<Tetrahedron>, GraphError> {
        Ok(lattice::tetrahedra_containing(v, &self.padded)?)
    }

    fn triangle_weight(&self, t: &Triangle) -> u64 {
        t.0.iter().map(|&w| self.demand(w) as u64).sum()
    }

    /// Clique numbers by enumerating grid cliques incident to the support.
    /// Cliques made of zero-demand vertices only contribute 0 and need not be
    /// scanned.
    pub fn clique_numbers(&self) -> CliqueNumbers {
        *self.cliques.get_or_init(|| {
            let mut w1 = 0u64;
            let mut w2 = 0u64;
            let mut w3 = 0u64;
            let mut w4 = 0u64;
            for v in self.support() {
                let dv = self.demand(v) as u64;
                w1 = w1.max(dv);
                for u in self.support_neighbors(v).expect("support stays in region") {
                    if v < u {
                        w2 = w2.max(dv + self.demand(u) as u64);
                    }
                }
                for t in self.triangles_at(v).expect("support stays in region") {
                    w3 = w3.max(self.triangle_weight(&t));
                }
                for t in self.tetrahedra_at(v).expect("support stays in region") {
                    let sum: u64 = t.0.iter().map(|&w| self.demand(w) as u64).sum();
                    w4 = w4.max(sum);
                }
            }
            w2 = w2.max(w1);
            w3 = w3.max(w2);
            w4 = w4.max(w3);
            CliqueNumbers { w1, w2, w3, w4 }
        })
    }

    /// The base function: the largest ceiling-average demand over grid
    /// triangles through `v`. The padded ring guarantees every region vertex
    /// has triangles, so `kappa(v) >= ceil(d(v) / 3)`.
    pub fn kappa(&self, v: GridVertex) -> Result<u32, GraphError> {
        if !self.region.contains(v) {
            return Err(GraphError::OutsideRegion(v));
        }
        let mut best = 0u64;
        for t in self.triangles_at(v)? {
            best = best.max(self.triangle_weight(&t).div_ceil(3));
        }
        Ok(best as u32)
    }

    pub fn classify(&self, v: GridVertex) -> Result<VertexClass, GraphError> {
        let d = self.demand(v) as u64;
        let k = self.kappa(v)? as u64;
        Ok(if d > 2 * k {
            VertexClass::VeryHeavy
        } else if d > k {
            VertexClass::Heavy
        } else {
            VertexClass::Light
        })
    }

    /// Largest demand among `v`'s grid neighbors of base color `c`.
    pub fn palette_floor(&self, v: GridVertex, c: u8) -> Result<u32, GraphError> {
        if c > 3 {
            return Err(GraphError::NotABaseColor(c));
        }
        let mut memo = BTreeMap::new();
        self.palette_floor_memo(v, c, &mut memo)
    }

    pub(crate) fn palette_floor_memo(
        &self,
        v: GridVertex,
        c: u8,
        memo: &mut BTreeMap<GridVertex, u8>,
    ) -> Result<u32, GraphError> {
        let mut floor = 0u32;
        let mut seen = false;
        for w in self.grid_neighbors(v)? {
            if lattice::base_color_memo(w, self.stacking(), memo)? == c {
                seen = true;
                floor = floor.max(self.demand(w));
            }
        }
        debug_assert!(seen, "padded window always supplies color-{c} neighbors");
        Ok(floor)
    }

    /// Guaranteed borrowable index count of palette `c` at `v`:
    /// `kappa(v) - max(d(u))` over grid neighbors `u` of base color `c`.
    /// Negative for vertices whose color-`c` neighborhood is heavier than
    /// their own base function value.
    pub fn palette_deficit(&self, v: GridVertex, c: u8) -> Result<i64, GraphError> {
        if c > 3 {
            return Err(GraphError::NotABaseColor(c));
        }
        if self.base_color(v)? == c {
            return Err(GraphError::OwnPalette { v, c });
        }
        let k = self.kappa(v)? as i64;
        Ok(k - self.palette_floor(v, c)? as i64)
    }
}

//! Exact integer geometry of close-packed sphere arrangements.
//!
//! Each layer of a close packing is a triangular grid with unit spacing;
//! consecutive layers sit in one of two hollow positions of the layer below.
//! A layer's horizontal position is one of three offsets, written `A`, `B`,
//! `C`, and a packing is described by a stacking sequence over those letters
//! with no letter repeated consecutively (`ABCABC...` is cubic close packing,
//! `ABAB...` is hexagonal close packing).
//!
//! All geometry here is integer-exact. Horizontal coordinates are scaled by 3
//! so the per-layer offsets (0, 1/3, 2/3 of `p + q`) become integral, and the
//! squared distance test reduces to the quadratic form `a^2 + ab + b^2` of the
//! 60-degree basis: two centers touch iff the form equals 9 within a layer or
//! 3 across adjacent layers. No floating point appears on any correctness
//! path.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Errors from geometric queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("layer {layer} is outside the stacking of length {len}")]
    LayerOutOfRange { layer: i32, len: usize },
    #[error("vertex {0} is outside the region")]
    OutsideRegion(GridVertex),
    #[error("invalid stacking sequence: {0}")]
    InvalidStacking(String),
    #[error("base-color extension failed at {0}: the three supporting vertices below do not carry three distinct colors")]
    ExtensionConflict(GridVertex),
}

/// Horizontal offset of a layer, one third of `p + q` per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    /// Offset in thirds along `p + q`.
    pub fn offset(self) -> i64 {
        match self {
            Letter::A => 0,
            Letter::B => 1,
            Letter::C => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'A',
            Letter::B => 'B',
            Letter::C => 'C',
        }
    }
}

/// A stacking sequence: one letter per layer, indexed from layer 0 upward.
///
/// Physically valid sequences never repeat a letter on consecutive layers
/// (a sphere cannot sit directly on top of another).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StackingSequence {
    letters: Vec<Letter>,
}

impl StackingSequence {
    pub fn new(letters: Vec<Letter>) -> Result<Self, LatticeError> {
        if letters.is_empty() {
            return Err(LatticeError::InvalidStacking("empty sequence".into()));
        }
        for w in letters.windows(2) {
            if w[0] == w[1] {
                return Err(LatticeError::InvalidStacking(format!(
                    "consecutive layers share letter {}",
                    w[0].as_char()
                )));
            }
        }
        Ok(Self { letters })
    }

    pub fn parse(s: &str) -> Result<Self, LatticeError> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(Letter::A),
                'B' => Ok(Letter::B),
                'C' => Ok(Letter::C),
                other => Err(LatticeError::InvalidStacking(format!(
                    "unexpected character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }

    /// Periodic `ABCABC...` prefix: cubic close packing (the regular cannonball arrangement).
    pub fn fcc(layers: usize) -> Self {
        let cycle = [Letter::A, Letter::B, Letter::C];
        Self::new((0..layers.max(1)).map(|z| cycle[z % 3]).collect()).unwrap()
    }

    /// Periodic `ABAB...` prefix: hexagonal close packing.
    pub fn hcp(layers: usize) -> Self {
        let cycle = [Letter::A, Letter::B];
        Self::new((0..layers.max(1)).map(|z| cycle[z % 2]).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, layer: i32) -> Result<Letter, LatticeError> {
        if layer < 0 || layer as usize >= self.letters.len() {
            return Err(LatticeError::LayerOutOfRange {
                layer,
                len: self.letters.len(),
            });
        }
        Ok(self.letters[layer as usize])
    }
}

impl fmt::Display for StackingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// A sphere center addressed as (layer, lattice coordinates within the layer).
///
/// `u` and `v` are coordinates in the basis of the in-layer vectors `p` and
/// `q`; the layer's letter adds a fractional horizontal shift on top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridVertex {
    pub layer: i32,
    pub u: i32,
    pub v: i32,
}

impl GridVertex {
    pub fn new(layer: i32, u: i32, v: i32) -> Self {
        Self { layer, u, v }
    }
}

impl fmt::Display for GridVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.layer, self.u, self.v)
    }
}

/// Integer position with horizontal coordinates scaled by 3.
///
/// `x = 3u + off(letter)`, `y = 3v + off(letter)`, `z = layer`. The squared
/// horizontal distance between two positions is `norm(dx, dy) / 9` where
/// `norm(a, b) = a^2 + ab + b^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaledPosition {
    pub x: i64,
    pub y: i64,
    pub z: i32,
}

/// The quadratic form of the 60-degree lattice basis.
fn norm(a: i64, b: i64) -> i64 {
    a * a + a * b + b * b
}

/// Scaled integer position of a vertex under a stacking sequence.
pub fn scaled_position(
    v: GridVertex,
    stacking: &StackingSequence,
) -> Result<ScaledPosition, LatticeError> {
    let off = stacking.letter(v.layer)?.offset();
    Ok(ScaledPosition {
        x: 3 * v.u as i64 + off,
        y: 3 * v.v as i64 + off,
        z: v.layer,
    })
}

/// Whether two sphere centers are at Euclidean distance exactly one.
///
/// With unit sphere diameter and layer height sqrt(6)/3, tangency holds iff
/// the scaled horizontal form equals 9 on the same layer or 3 on adjacent
/// layers; layers two or more apart are always farther than one.
pub fn are_adjacent(
    a: GridVertex,
    b: GridVertex,
    stacking: &StackingSequence,
) -> Result<bool, LatticeError> {
    if a == b {
        return Ok(false);
    }
    let dz = (a.layer - b.layer).abs();
    if dz >= 2 {
        // Still validate the layers so precondition violations surface.
        stacking.letter(a.layer)?;
        stacking.letter(b.layer)?;
        return Ok(false);
    }
    let pa = scaled_position(a, stacking)?;
    let pb = scaled_position(b, stacking)?;
    let n = norm(pa.x - pb.x, pa.y - pb.y);
    Ok(match dz {
        0 => n == 9,
        1 => n == 3,
        _ => unreachable!(),
    })
}

/// In-layer neighbor offsets of the triangular grid.
pub(crate) const IN_LAYER_STEPS: [(i32, i32); 6] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

/// A finite window onto the grid: an inclusive `(u, v)` box applied to every
/// layer of the stacking. An empty box (min above max) yields no vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRegion {
    stacking: StackingSequence,
    u_min: i32,
    u_max: i32,
    v_min: i32,
    v_max: i32,
}

impl GridRegion {
    pub fn new(stacking: StackingSequence, u: (i32, i32), v: (i32, i32)) -> Self {
        Self {
            stacking,
            u_min: u.0,
            u_max: u.1,
            v_min: v.0,
            v_max: v.1,
        }
    }

    /// Smallest region containing all given vertices (empty box if none).
    pub fn bounding(stacking: StackingSequence, vertices: &[GridVertex]) -> Self {
        let mut r = Self::new(stacking, (0, -1), (0, -1));
        let mut first = true;
        for w in vertices {
            if first {
                r.u_min = w.u;
                r.u_max = w.u;
                r.v_min = w.v;
                r.v_max = w.v;
                first = false;
            } else {
                r.u_min = r.u_min.min(w.u);
                r.u_max = r.u_max.max(w.u);
                r.v_min = r.v_min.min(w.v);
                r.v_max = r.v_max.max(w.v);
            }
        }
        r
    }

    pub fn stacking(&self) -> &StackingSequence {
        &self.stacking
    }

    pub fn layer_count(&self) -> usize {
        self.stacking.len()
    }

    pub fn u_range(&self) -> (i32, i32) {
        (self.u_min, self.u_max)
    }

    pub fn v_range(&self) -> (i32, i32) {
        (self.v_min, self.v_max)
    }

    pub fn box_is_empty(&self) -> bool {
        self.u_min > self.u_max || self.v_min > self.v_max
    }

    pub fn contains(&self, w: GridVertex) -> bool {
        w.layer >= 0
            && (w.layer as usize) < self.stacking.len()
            && w.u >= self.u_min
            && w.u <= self.u_max
            && w.v >= self.v_min
            && w.v <= self.v_max
    }

    /// The same window grown by `margin` in every horizontal direction.
    /// Layers are unchanged; an empty box stays empty.
    pub fn expanded(&self, margin: i32) -> Self {
        if self.box_is_empty() {
            return self.clone();
        }
        Self {
            stacking: self.stacking.clone(),
            u_min: self.u_min - margin,
            u_max: self.u_max + margin,
            v_min: self.v_min - margin,
            v_max: self.v_max + margin,
        }
    }

    /// All vertices of the window in canonical (layer, u, v) order.
    pub fn vertices(&self) -> impl Iterator<Item = GridVertex> + '_ {
        let layers = if self.box_is_empty() {
            0
        } else {
            self.stacking.len() as i32
        };
        (0..layers).flat_map(move |layer| {
            (self.u_min..=self.u_max).flat_map(move |u| {
                (self.v_min..=self.v_max).map(move |v| GridVertex::new(layer, u, v))
            })
        })
    }

    pub fn vertex_count(&self) -> usize {
        if self.box_is_empty() {
            0
        } else {
            self.stacking.len()
                * (self.u_max - self.u_min + 1) as usize
                * (self.v_max - self.v_min + 1) as usize
        }
    }
}

/// Tangent vertices of `v` inside the region, canonical order, at most 12.
///
/// An interior vertex of a three-layer window has exactly 6 in-layer
/// neighbors plus 3 in each adjacent layer.
pub fn neighbors(v: GridVertex, region: &GridRegion) -> Result<Vec<GridVertex>, LatticeError> {
    if !region.contains(v) {
        return Err(LatticeError::OutsideRegion(v));
    }
    let mut out = Vec::with_capacity(12);
    for (du, dv) in IN_LAYER_STEPS {
        let w = GridVertex::new(v.layer, v.u + du, v.v + dv);
        if region.contains(w) {
            out.push(w);
        }
    }
    for dl in [-1i32, 1] {
        let layer = v.layer + dl;
        if layer < 0 || layer as usize >= region.layer_count() {
            continue;
        }
        for du in -1..=1 {
            for dv in -1..=1 {
                let w = GridVertex::new(layer, v.u + du, v.v + dv);
                if region.contains(w) && are_adjacent(v, w, region.stacking())? {
                    out.push(w);
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Three pairwise-tangent vertices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle(pub [GridVertex; 3]);

impl Triangle {
    fn new(mut vs: [GridVertex; 3]) -> Self {
        vs.sort_unstable();
        Self(vs)
    }

    pub fn contains(&self, v: GridVertex) -> bool {
        self.0.contains(&v)
    }
}

/// Four pairwise-tangent vertices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tetrahedron(pub [GridVertex; 4]);

impl Tetrahedron {
    fn new(mut vs: [GridVertex; 4]) -> Self {
        vs.sort_unstable();
        Self(vs)
    }
}

/// All grid triangles through `v` within the region, canonical order.
pub fn triangles_containing(
    v: GridVertex,
    region: &GridRegion,
) -> Result<Vec<Triangle>, LatticeError> {
    let nbrs = neighbors(v, region)?;
    let mut out = Vec::new();
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if are_adjacent(a, b, region.stacking())? {
                out.push(Triangle::new([v, a, b]));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// All grid tetrahedra through `v` within the region, canonical order.
pub fn tetrahedra_containing(
    v: GridVertex,
    region: &GridRegion,
) -> Result<Vec<Tetrahedron>, LatticeError> {
    let nbrs = neighbors(v, region)?;
    let mut out = Vec::new();
    for (i, &a) in nbrs.iter().enumerate() {
        for (j, &b) in nbrs.iter().enumerate().skip(i + 1) {
            if !are_adjacent(a, b, region.stacking())? {
                continue;
            }
            for &c in &nbrs[j + 1..] {
                if are_adjacent(a, c, region.stacking())?
                    && are_adjacent(b, c, region.stacking())?
                {
                    out.push(Tetrahedron::new([v, a, b, c]));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The three tangent vertices one layer below `v` (grid-wide, no window).
fn support_triple(
    v: GridVertex,
    stacking: &StackingSequence,
) -> Result<[GridVertex; 3], LatticeError> {
    let mut triple = Vec::with_capacity(3);
    for du in -1..=1 {
        for dv in -1..=1 {
            let w = GridVertex::new(v.layer - 1, v.u + du, v.v + dv);
            if are_adjacent(v, w, stacking)? {
                triple.push(w);
            }
        }
    }
    debug_assert_eq!(triple.len(), 3);
    triple.sort_unstable();
    Ok([triple[0], triple[1], triple[2]])
}

fn layer_zero_color(u: i32, v: i32) -> u8 {
    (u.rem_euclid(2) + 2 * v.rem_euclid(2)) as u8
}

/// The canonical proper 4-coloring of the grid.
///
/// Layer 0 is colored `u mod 2 + 2 (v mod 2)`. A vertex of any higher layer
/// rests on exactly three pairwise-tangent vertices below, which always carry
/// three distinct colors; the vertex receives the unique remaining color.
/// That rainbow property is the load-bearing assumption of the whole palette
/// scheme, so it is checked at runtime rather than assumed.
pub fn base_color(v: GridVertex, stacking: &StackingSequence) -> Result<u8, LatticeError> {
    let mut memo = BTreeMap::new();
    base_color_memo(v, stacking, &mut memo)
}

/// Memoized variant for bulk queries; `memo` may be shared across calls with
/// the same stacking.
pub fn base_color_memo(
    v: GridVertex,
    stacking: &StackingSequence,
    memo: &mut BTreeMap<GridVertex, u8>,
) -> Result<u8, LatticeError> {
    stacking.letter(v.layer)?;
    if let Some(&c) = memo.get(&v) {
        return Ok(c);
    }
    let color = if v.layer == 0 {
        layer_zero_color(v.u, v.v)
    } else {
        let triple = support_triple(v, stacking)?;
        let mut used = [false; 4];
        for w in triple {
            let c = base_color_memo(w, stacking, memo)?;
            if used[c as usize] {
                return Err(LatticeError::ExtensionConflict(v));
            }
            used[c as usize] = true;
        }
        used.iter().position(|&b| !b).unwrap() as u8
    };
    memo.insert(v, color);
    Ok(color)
}

/// Coordinate change from the cubic-close-packing basis `(p, q, r)` to
/// layered coordinates under the periodic `ABC` stacking.
///
/// The third basis vector accumulates one full `(p + q) / 3` offset every
/// three layers, so `u = x + floor(z / 3)` and likewise for `v`.
pub fn fcc_basis_to_layered(x: i32, y: i32, z: i32) -> GridVertex {
    GridVertex::new(z, x + z.div_euclid(3), y + z.div_euclid(3))
}

/// Closed-form base color of the cubic close packing in basis coordinates.
pub fn fcc_base_color(x: i32, y: i32, z: i32) -> u8 {
    let even = ((z + 1).rem_euclid(2)) * (x.rem_euclid(2) + 2 * y.rem_euclid(2));
    let odd = (z.rem_euclid(2)) * ((x + 1).rem_euclid(2) + 2 * (y + 1).rem_euclid(2));
    (even + odd) as u8
}

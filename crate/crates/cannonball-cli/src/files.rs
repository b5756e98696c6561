//! Line-oriented JSON formats for instances and colorings.
//!
//! Both formats start with a header object carrying a `version` and `kind`,
//! followed by one JSON object per vertex in canonical order. One vertex per
//! line keeps files diff-friendly; vertex keys are rendered `"layer,u,v"`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use cannonball::graph::{CannonballGraph, GraphError};
use cannonball::lattice::{GridRegion, GridVertex, LatticeError, StackingSequence};
use cannonball::multicolor::{ColorAssignment, PaletteColor, SolveStats};

pub const INSTANCE_KIND: &str = "cannonball-instance";
pub const COLORING_KIND: &str = "cannonball-coloring";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {detail}")]
    Parse {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("{path}: {detail}")]
    Format { path: String, detail: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn io_err(path: &Path, source: std::io::Error) -> FileError {
    FileError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, detail: impl Into<String>) -> FileError {
    FileError::Parse {
        path: path.display().to_string(),
        line,
        detail: detail.into(),
    }
}

fn format_err(path: &Path, detail: impl Into<String>) -> FileError {
    FileError::Format {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

fn vertex_key(v: GridVertex) -> String {
    format!("{},{},{}", v.layer, v.u, v.v)
}

fn parse_vertex_key(s: &str) -> Option<GridVertex> {
    let mut parts = s.split(',');
    let layer = parts.next()?.trim().parse().ok()?;
    let u = parts.next()?.trim().parse().ok()?;
    let v = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(GridVertex::new(layer, u, v))
}

#[derive(Serialize, Deserialize)]
struct InstanceHeader {
    version: u32,
    kind: String,
    stacking: String,
}

#[derive(Serialize, Deserialize)]
struct VertexLine {
    v: String,
    d: i64,
}

/// An instance: a stacking sequence plus per-vertex demands. Vertices with
/// zero demand are kept; they record the generated window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub stacking: StackingSequence,
    pub vertices: Vec<(GridVertex, u32)>,
}

impl InstanceFile {
    pub fn new(stacking: StackingSequence, mut vertices: Vec<(GridVertex, u32)>) -> Self {
        vertices.sort_by_key(|&(v, _)| v);
        Self { stacking, vertices }
    }

    pub fn to_string_lines(&self) -> String {
        let mut out = String::new();
        let header = InstanceHeader {
            version: FORMAT_VERSION,
            kind: INSTANCE_KIND.into(),
            stacking: self.stacking.to_string(),
        };
        out.push_str(&serde_json::to_string(&header).unwrap());
        out.push('\n');
        for &(v, d) in &self.vertices {
            let line = VertexLine {
                v: vertex_key(v),
                d: d as i64,
            };
            out.push_str(&serde_json::to_string(&line).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        fs::write(path, self.to_string_lines()).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, FileError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header_line) = lines
            .next()
            .ok_or_else(|| format_err(path, "empty file"))?;
        let header: InstanceHeader = serde_json::from_str(header_line)
            .map_err(|e| parse_err(path, 1, e.to_string()))?;
        if header.kind != INSTANCE_KIND {
            return Err(format_err(
                path,
                format!("expected kind {INSTANCE_KIND:?}, found {:?}", header.kind),
            ));
        }
        if header.version != FORMAT_VERSION {
            return Err(format_err(
                path,
                format!("unsupported version {}", header.version),
            ));
        }
        let stacking = StackingSequence::parse(&header.stacking)?;
        let mut vertices = Vec::new();
        let mut seen = BTreeMap::new();
        for (idx, line) in lines {
            let row: VertexLine =
                serde_json::from_str(line).map_err(|e| parse_err(path, idx + 1, e.to_string()))?;
            let v = parse_vertex_key(&row.v)
                .ok_or_else(|| parse_err(path, idx + 1, format!("bad vertex key {:?}", row.v)))?;
            if row.d < 0 {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("negative demand {} at {v}", row.d),
                ));
            }
            if seen.insert(v, ()).is_some() {
                return Err(parse_err(path, idx + 1, format!("duplicate vertex {v}")));
            }
            vertices.push((v, row.d as u32));
        }
        Ok(Self::new(stacking, vertices))
    }

    /// Region spanned by the listed vertices (zero-demand entries included).
    pub fn region(&self) -> GridRegion {
        let verts: Vec<GridVertex> = self.vertices.iter().map(|&(v, _)| v).collect();
        GridRegion::bounding(self.stacking.clone(), &verts)
    }

    pub fn to_graph(&self) -> Result<CannonballGraph, FileError> {
        Ok(CannonballGraph::build(self.region(), &self.vertices)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringHeader {
    version: u32,
    kind: String,
    stacking: String,
    colors_used: u64,
    omega: [u64; 4],
    bound_value: u64,
    bound_risk_events: u32,
    step_colors: [u64; 4],
}

#[derive(Serialize, Deserialize)]
struct ColorLine {
    v: String,
    colors: Vec<(u32, u32)>,
}

/// Per-vertex color sets plus the solve summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringFile {
    pub stacking: StackingSequence,
    pub colors_used: u64,
    pub omega: [u64; 4],
    pub bound_value: u64,
    pub bound_risk_events: u32,
    pub step_colors: [u64; 4],
    pub vertices: Vec<(GridVertex, Vec<PaletteColor>)>,
}

impl ColoringFile {
    pub fn from_solution(
        stacking: &StackingSequence,
        assignment: &ColorAssignment,
        stats: &SolveStats,
    ) -> Self {
        let vertices = assignment
            .iter()
            .map(|(v, set)| (v, set.iter().copied().collect()))
            .collect();
        Self {
            stacking: stacking.clone(),
            colors_used: stats.colors_used as u64,
            omega: stats.omega.as_array(),
            bound_value: stats.bound_value,
            bound_risk_events: stats.bound_risk_events,
            step_colors: stats.step_colors.map(|c| c as u64),
            vertices,
        }
    }

    pub fn to_assignment(&self) -> ColorAssignment {
        let mut f = ColorAssignment::new();
        for (v, colors) in &self.vertices {
            for &c in colors {
                f.insert(*v, c);
            }
        }
        f
    }

    pub fn to_string_lines(&self) -> String {
        let mut out = String::new();
        let header = ColoringHeader {
            version: FORMAT_VERSION,
            kind: COLORING_KIND.into(),
            stacking: self.stacking.to_string(),
            colors_used: self.colors_used,
            omega: self.omega,
            bound_value: self.bound_value,
            bound_risk_events: self.bound_risk_events,
            step_colors: self.step_colors,
        };
        out.push_str(&serde_json::to_string(&header).unwrap());
        out.push('\n');
        for (v, colors) in &self.vertices {
            let line = ColorLine {
                v: vertex_key(*v),
                colors: colors.iter().map(|c| (c.palette, c.index)).collect(),
            };
            out.push_str(&serde_json::to_string(&line).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        fs::write(path, self.to_string_lines()).map_err(|e| io_err(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self, FileError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header_line) = lines
            .next()
            .ok_or_else(|| format_err(path, "empty file"))?;
        let header: ColoringHeader = serde_json::from_str(header_line)
            .map_err(|e| parse_err(path, 1, e.to_string()))?;
        if header.kind != COLORING_KIND {
            return Err(format_err(
                path,
                format!("expected kind {COLORING_KIND:?}, found {:?}", header.kind),
            ));
        }
        if header.version != FORMAT_VERSION {
            return Err(format_err(
                path,
                format!("unsupported version {}", header.version),
            ));
        }
        let stacking = StackingSequence::parse(&header.stacking)?;
        let mut vertices = Vec::new();
        for (idx, line) in lines {
            let row: ColorLine =
                serde_json::from_str(line).map_err(|e| parse_err(path, idx + 1, e.to_string()))?;
            let v = parse_vertex_key(&row.v)
                .ok_or_else(|| parse_err(path, idx + 1, format!("bad vertex key {:?}", row.v)))?;
            let mut colors: Vec<PaletteColor> = row
                .colors
                .into_iter()
                .map(|(p, i)| PaletteColor::new(p, i))
                .collect();
            colors.sort_unstable();
            colors.dedup();
            vertices.push((v, colors));
        }
        vertices.sort_by_key(|&(v, _)| v);
        Ok(Self {
            stacking,
            colors_used: header.colors_used,
            omega: header.omega,
            bound_value: header.bound_value,
            bound_risk_events: header.bound_risk_events,
            step_colors: header.step_colors,
            vertices,
        })
    }
}

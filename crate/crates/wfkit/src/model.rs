//! Core wireframe graph types and validity checking.
//!
//! A wireframe is a graph `(V, E)` of real-valued 2D junctions and
//! undirected junction-index pairs. Coordinates live in
//! `[0, width) x [0, height)`; the canonical evaluation space is 128 x 128,
//! and ingestion from other resolutions rescales into it.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// The canonical evaluation space extent (both axes).
pub const CANONICAL_EXTENT: f64 = 128.0;

/// A 2D point in grid units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: Point2) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn dist_sq(&self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A line segment with a confidence score in `[0, 1]`.
///
/// This is the unit of prediction for every metric in the toolkit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredLine {
    pub p1: Point2,
    pub p2: Point2,
    pub score: f64,
}

impl ScoredLine {
    pub fn new(p1: Point2, p2: Point2, score: f64) -> Self {
        Self { p1, p2, score }
    }
}

/// A wireframe graph: junctions, undirected edges, and optional scores.
///
/// Edges are normalized to `(i, j)` with `i < j` at construction; lines are
/// undirected so the stored order carries no meaning. All fields are
/// immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Wireframe {
    pub width: f64,
    pub height: f64,
    pub junctions: Vec<Point2>,
    pub edges: Vec<(usize, usize)>,
    pub junction_scores: Option<Vec<f64>>,
    pub line_scores: Option<Vec<f64>>,
}

/// One failed wireframe invariant. Violations are data, not failures:
/// `validate` collects them instead of erroring.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveExtent,
    JunctionNotFinite { index: usize },
    JunctionOutOfBounds { index: usize },
    EdgeIndexOutOfRange { edge: usize },
    SelfLoop { edge: usize },
    DuplicateEdge { edge: usize },
    JunctionScoreLengthMismatch { expected: usize, got: usize },
    LineScoreLengthMismatch { expected: usize, got: usize },
    ScoreOutOfRange { which: &'static str, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveExtent => write!(f, "width/height must be positive and finite"),
            Violation::JunctionNotFinite { index } => {
                write!(f, "junction {index} has a non-finite coordinate")
            }
            Violation::JunctionOutOfBounds { index } => {
                write!(f, "junction {index} out of bounds")
            }
            Violation::EdgeIndexOutOfRange { edge } => {
                write!(f, "edge {edge} references a junction index out of range")
            }
            Violation::SelfLoop { edge } => write!(f, "self-loop at edge {edge}"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge at index {edge}"),
            Violation::JunctionScoreLengthMismatch { expected, got } => {
                write!(f, "junction_scores has length {got}, expected {expected}")
            }
            Violation::LineScoreLengthMismatch { expected, got } => {
                write!(f, "line_scores has length {got}, expected {expected}")
            }
            Violation::ScoreOutOfRange { which, index } => {
                write!(f, "{which} score {index} outside [0, 1]")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid wireframe: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl Wireframe {
    /// Builds a wireframe, normalizing every edge to `i < j`. Does not
    /// validate; call [`Wireframe::validate`] for that.
    pub fn new(
        width: f64,
        height: f64,
        junctions: Vec<Point2>,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let edges = edges.into_iter().map(normalize_edge).collect();
        Self { width, height, junctions, edges, junction_scores: None, line_scores: None }
    }

    pub fn with_line_scores(mut self, scores: Vec<f64>) -> Self {
        self.line_scores = Some(scores);
        self
    }

    pub fn with_junction_scores(mut self, scores: Vec<f64>) -> Self {
        self.junction_scores = Some(scores);
        self
    }

    /// Checks every invariant and returns the list of violations, empty iff
    /// the wireframe is valid. Deterministic and side-effect free.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.width > 0.0 && self.height > 0.0)
            || !self.width.is_finite()
            || !self.height.is_finite()
        {
            out.push(Violation::NonPositiveExtent);
        }
        for (i, p) in self.junctions.iter().enumerate() {
            if !p.is_finite() {
                out.push(Violation::JunctionNotFinite { index: i });
            } else if !(0.0 <= p.x && p.x < self.width && 0.0 <= p.y && p.y < self.height) {
                out.push(Violation::JunctionOutOfBounds { index: i });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            if i == j {
                out.push(Violation::SelfLoop { edge: k });
                continue;
            }
            if i >= self.junctions.len() || j >= self.junctions.len() {
                out.push(Violation::EdgeIndexOutOfRange { edge: k });
                continue;
            }
            if !seen.insert(normalize_edge((i, j))) {
                out.push(Violation::DuplicateEdge { edge: k });
            }
        }
        if let Some(s) = &self.junction_scores {
            if s.len() != self.junctions.len() {
                out.push(Violation::JunctionScoreLengthMismatch {
                    expected: self.junctions.len(),
                    got: s.len(),
                });
            }
            for (i, v) in s.iter().enumerate() {
                if !(0.0..=1.0).contains(v) {
                    out.push(Violation::ScoreOutOfRange { which: "junction", index: i });
                }
            }
        }
        if let Some(s) = &self.line_scores {
            if s.len() != self.edges.len() {
                out.push(Violation::LineScoreLengthMismatch {
                    expected: self.edges.len(),
                    got: s.len(),
                });
            }
            for (i, v) in s.iter().enumerate() {
                if !(0.0..=1.0).contains(v) {
                    out.push(Violation::ScoreOutOfRange { which: "line", index: i });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Materializes the edge list as coordinate pairs for the metric
    /// modules. Absent line scores default to 1.0 (ground truth is
    /// unscored, and the metrics need a score).
    pub fn to_scored_lines(&self) -> Result<Vec<ScoredLine>, ModelError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(ModelError::Invalid(violations));
        }
        Ok(self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| {
                let score = self.line_scores.as_ref().map_or(1.0, |s| s[k]);
                ScoredLine::new(self.junctions[i], self.junctions[j], score)
            })
            .collect())
    }

    /// Rescales all junction coordinates into a new coordinate space.
    pub fn rescaled(&self, width: f64, height: f64) -> Wireframe {
        let sx = width / self.width;
        let sy = height / self.height;
        Wireframe {
            width,
            height,
            junctions: self
                .junctions
                .iter()
                .map(|p| Point2::new(p.x * sx, p.y * sy))
                .collect(),
            edges: self.edges.clone(),
            junction_scores: self.junction_scores.clone(),
            line_scores: self.line_scores.clone(),
        }
    }
}

fn normalize_edge((i, j): (usize, usize)) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

/// The JSON interchange schema for wireframes. Unknown fields are rejected.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireframeDoc {
    /// `[width, height]` of the coordinate space.
    pub coord_space: [f64; 2],
    pub junctions: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub junction_scores: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_scores: Option<Vec<f64>>,
}

impl From<&Wireframe> for WireframeDoc {
    fn from(w: &Wireframe) -> Self {
        WireframeDoc {
            coord_space: [w.width, w.height],
            junctions: w.junctions.iter().map(|p| [p.x, p.y]).collect(),
            edges: w.edges.iter().map(|&(i, j)| [i, j]).collect(),
            junction_scores: w.junction_scores.clone(),
            line_scores: w.line_scores.clone(),
        }
    }
}

impl From<WireframeDoc> for Wireframe {
    fn from(d: WireframeDoc) -> Self {
        let mut w = Wireframe::new(
            d.coord_space[0],
            d.coord_space[1],
            d.junctions.into_iter().map(|[x, y]| Point2::new(x, y)).collect(),
            d.edges.into_iter().map(|[i, j]| (i, j)).collect(),
        );
        w.junction_scores = d.junction_scores;
        w.line_scores = d.line_scores;
        w
    }
}

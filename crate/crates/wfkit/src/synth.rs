//! Deterministic synthetic scenes and controlled degradations.
//!
//! Scenes make metric behavior measurable without a trained model:
//! `split_midpoint` breaks every line in two (same heat map, zero
//! structural overlap with ground truth), `duplicate` re-emits lines at a
//! lower score, `jitter` perturbs junctions, `drop` removes lines.
//!
//! All generation runs on ChaCha8 seeded from the caller's seed, so scenes
//! are reproducible byte for byte.

use crate::model::{Point2, Wireframe};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

const EXTENT: f64 = 128.0;
const MARGIN: f64 = 4.0;
const PLACEMENT_RETRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// A square lattice with 4-neighbor adjacency edges.
    Grid,
    /// Axis-aligned rectangles, four corners and four sides each.
    Boxes,
    /// Uniformly placed junctions joined by random long-enough pairs.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub n_junctions: usize,
    pub n_lines: usize,
    pub min_length: f64,
    pub layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegradeMode {
    /// Replace each line `(u, v)` by `(u, m)` and `(m, v)` at the midpoint.
    SplitMidpoint,
    /// Re-emit a fraction of lines at 0.9 of their score.
    Duplicate,
    /// Perturb junction coordinates with normal noise (sigma = param).
    Jitter,
    /// Remove a fraction of lines.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradeSpec {
    pub mode: DegradeMode,
    /// Jitter sigma in grid units, or the drop/duplicate fraction.
    pub param: f64,
}

impl DegradeSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.param.is_nan() || self.param < 0.0 {
            return Err(SynthError::BadSpec("degrade param must be non-negative"));
        }
        if matches!(self.mode, DegradeMode::Duplicate | DegradeMode::Drop) && self.param > 1.0 {
            return Err(SynthError::BadSpec("fraction must be at most 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scene spec: {0}")]
    BadSpec(&'static str),
    #[error("could not place the requested scene: {0}")]
    Infeasible(&'static str),
}

/// Generates a deterministic wireframe scene in the canonical 128 x 128
/// space: requested junction/line counts, every line at least `min_length`
/// long, no duplicate edges.
pub fn gen_scene(spec: &SceneSpec) -> Result<Wireframe, SynthError> {
    if spec.min_length.is_nan() || spec.min_length <= 0.0 {
        return Err(SynthError::BadSpec("min_length must be positive"));
    }
    let max_pairs = spec.n_junctions.saturating_mul(spec.n_junctions.saturating_sub(1)) / 2;
    if spec.n_lines > max_pairs {
        return Err(SynthError::BadSpec("more lines requested than junction pairs"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.layout {
        Layout::Grid => gen_grid(spec, &mut rng),
        Layout::Boxes => gen_boxes(spec, &mut rng),
        Layout::Random => gen_random(spec, &mut rng),
    }
}

fn gen_grid(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Result<Wireframe, SynthError> {
    let side = (spec.n_junctions as f64).sqrt().round() as usize;
    if side * side != spec.n_junctions {
        return Err(SynthError::BadSpec("grid layout needs a square junction count"));
    }
    if side < 2 {
        if spec.n_lines > 0 {
            return Err(SynthError::BadSpec("a 1-junction grid has no edges"));
        }
        let x = rng.random_range(MARGIN..EXTENT - MARGIN);
        let y = rng.random_range(MARGIN..EXTENT - MARGIN);
        return Ok(Wireframe::new(EXTENT, EXTENT, vec![Point2::new(x, y)], vec![]));
    }
    let max_step = (EXTENT - 2.0 * MARGIN) / (side - 1) as f64;
    if spec.min_length > max_step {
        return Err(SynthError::Infeasible("min_length exceeds the largest grid step"));
    }
    let step = rng.random_range(spec.min_length..=max_step);
    let slack = EXTENT - 2.0 * MARGIN - (side - 1) as f64 * step;
    let ox = MARGIN + rng.random_range(0.0..=slack);
    let oy = MARGIN + rng.random_range(0.0..=slack);

    let mut junctions = Vec::with_capacity(spec.n_junctions);
    for r in 0..side {
        for c in 0..side {
            junctions.push(Point2::new(ox + c as f64 * step, oy + r as f64 * step));
        }
    }
    // Right edge then down edge per cell, row-major.
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let idx = r * side + c;
            if c + 1 < side {
                edges.push((idx, idx + 1));
            }
            if r + 1 < side {
                edges.push((idx, idx + side));
            }
        }
    }
    if spec.n_lines > edges.len() {
        return Err(SynthError::BadSpec("grid adjacency has fewer edges than requested"));
    }
    edges.truncate(spec.n_lines);
    Ok(Wireframe::new(EXTENT, EXTENT, junctions, edges))
}

fn gen_boxes(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Result<Wireframe, SynthError> {
    if !spec.n_junctions.is_multiple_of(4) || spec.n_junctions == 0 {
        return Err(SynthError::BadSpec("boxes layout needs a multiple of four junctions"));
    }
    let n_boxes = spec.n_junctions / 4;
    if spec.n_lines > 4 * n_boxes {
        return Err(SynthError::BadSpec("boxes layout has at most four lines per box"));
    }
    let avail = EXTENT - 2.0 * MARGIN;
    let max_side = (0.45 * EXTENT).min(avail);
    if spec.min_length > max_side {
        return Err(SynthError::Infeasible("min_length exceeds the largest box side"));
    }
    let mut junctions = Vec::with_capacity(spec.n_junctions);
    let mut edges = Vec::new();
    for b in 0..n_boxes {
        let w = rng.random_range(spec.min_length..=max_side);
        let h = rng.random_range(spec.min_length..=max_side);
        let x0 = rng.random_range(MARGIN..=EXTENT - MARGIN - w);
        let y0 = rng.random_range(MARGIN..=EXTENT - MARGIN - h);
        let base = 4 * b;
        junctions.push(Point2::new(x0, y0));
        junctions.push(Point2::new(x0 + w, y0));
        junctions.push(Point2::new(x0 + w, y0 + h));
        junctions.push(Point2::new(x0, y0 + h));
        edges.push((base, base + 1));
        edges.push((base + 1, base + 2));
        edges.push((base + 2, base + 3));
        edges.push((base, base + 3));
    }
    edges.truncate(spec.n_lines);
    Ok(Wireframe::new(EXTENT, EXTENT, junctions, edges))
}

fn gen_random(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Result<Wireframe, SynthError> {
    for _ in 0..PLACEMENT_RETRIES {
        let junctions: Vec<Point2> = (0..spec.n_junctions)
            .map(|_| {
                Point2::new(
                    rng.random_range(MARGIN..EXTENT - MARGIN),
                    rng.random_range(MARGIN..EXTENT - MARGIN),
                )
            })
            .collect();
        let mut candidates: Vec<(usize, usize)> = Vec::new();
        for i in 0..junctions.len() {
            for j in (i + 1)..junctions.len() {
                if junctions[i].dist(junctions[j]) >= spec.min_length {
                    candidates.push((i, j));
                }
            }
        }
        if candidates.len() < spec.n_lines {
            continue;
        }
        let (chosen, _) = candidates.partial_shuffle(rng, spec.n_lines);
        let mut edges = chosen.to_vec();
        edges.sort_unstable();
        return Ok(Wireframe::new(EXTENT, EXTENT, junctions, edges));
    }
    Err(SynthError::Infeasible("no placement with enough long pairs found"))
}

/// Applies a degradation, producing a scored prediction wireframe. Lines
/// re-emitted by `duplicate` get fresh junction entries so the result stays
/// a valid wireframe (coincident junctions are allowed; duplicate index
/// pairs are not).
pub fn degrade(w: &Wireframe, spec: &DegradeSpec, seed: u64) -> Wireframe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_scores: Vec<f64> = match &w.line_scores {
        Some(s) => s.clone(),
        None => vec![1.0; w.edges.len()],
    };
    match spec.mode {
        DegradeMode::SplitMidpoint => {
            let mut junctions = w.junctions.clone();
            let mut edges = Vec::with_capacity(2 * w.edges.len());
            let mut scores = Vec::with_capacity(2 * w.edges.len());
            for (k, &(i, j)) in w.edges.iter().enumerate() {
                let (a, b) = (w.junctions[i], w.junctions[j]);
                let mid = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
                let m = junctions.len();
                junctions.push(mid);
                edges.push((i, m));
                edges.push((m, j));
                scores.push(base_scores[k]);
                scores.push(base_scores[k]);
            }
            Wireframe::new(w.width, w.height, junctions, edges).with_line_scores(scores)
        }
        DegradeMode::Duplicate => {
            let n_dup = (spec.param * w.edges.len() as f64).round() as usize;
            let mut indices: Vec<usize> = (0..w.edges.len()).collect();
            let (chosen, _) = indices.partial_shuffle(&mut rng, n_dup);
            let mut chosen = chosen.to_vec();
            chosen.sort_unstable();
            let mut junctions = w.junctions.clone();
            let mut edges = w.edges.clone();
            let mut scores = base_scores.clone();
            for k in chosen {
                let (i, j) = w.edges[k];
                let a = junctions.len();
                junctions.push(w.junctions[i]);
                junctions.push(w.junctions[j]);
                edges.push((a, a + 1));
                scores.push(0.9 * base_scores[k]);
            }
            Wireframe::new(w.width, w.height, junctions, edges).with_line_scores(scores)
        }
        DegradeMode::Jitter => {
            let normal = Normal::new(0.0, spec.param).expect("sigma must be non-negative");
            let junctions: Vec<Point2> = w
                .junctions
                .iter()
                .map(|p| {
                    let nx = normal.sample(&mut rng);
                    let ny = normal.sample(&mut rng);
                    Point2::new(
                        (p.x + nx).clamp(0.0, w.width - 1e-6),
                        (p.y + ny).clamp(0.0, w.height - 1e-6),
                    )
                })
                .collect();
            Wireframe::new(w.width, w.height, junctions, w.edges.clone())
                .with_line_scores(base_scores)
        }
        DegradeMode::Drop => {
            let n_drop = (spec.param * w.edges.len() as f64).round() as usize;
            let mut indices: Vec<usize> = (0..w.edges.len()).collect();
            let (chosen, _) = indices.partial_shuffle(&mut rng, n_drop);
            let dropped: std::collections::HashSet<usize> = chosen.iter().copied().collect();
            let mut edges = Vec::new();
            let mut scores = Vec::new();
            for (k, &e) in w.edges.iter().enumerate() {
                if !dropped.contains(&k) {
                    edges.push(e);
                    scores.push(base_scores[k]);
                }
            }
            Wireframe::new(w.width, w.height, w.junctions.clone(), edges)
                .with_line_scores(scores)
        }
    }
}

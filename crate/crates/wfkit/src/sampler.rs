//! Line proposal sampling.
//!
//! Static samples come from ground truth alone: positives drawn from the
//! edge list, negatives from a mined pool of hard junction pairs. Dynamic
//! samples are built from predicted junctions matched to ground truth
//! within `eta`. Hardness of a candidate pair is the mean occupancy of a
//! low-resolution bitmap of the ground-truth lines along the candidate.
//!
//! Every sampling operation is a pure function of its inputs and an
//! explicit seed (ChaCha8), drawing with replacement in a fixed pool order,
//! so outputs are reproducible byte for byte.

use crate::grid::Grid2D;
use crate::junction_codec::ScoredJunction;
use crate::model::{Point2, ScoredLine, Wireframe};
use crate::raster::supercover_cells;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Static positives per image.
    pub n_s_pos: usize,
    /// Static hard negatives per image.
    pub n_s_neg: usize,
    /// Dynamic positives per image.
    pub n_d_pos: usize,
    /// Dynamic hard negatives per image.
    pub n_d_neg: usize,
    /// Dynamic random draws per image.
    pub n_d_rand: usize,
    /// Junction match threshold, grid units.
    pub eta: f64,
    /// Size of the mined hard-negative pool.
    pub hard_pool_size: usize,
    /// Side length of the hardness bitmap.
    pub raster_size: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_s_pos: 300,
            n_s_neg: 40,
            n_d_pos: 300,
            n_d_neg: 80,
            n_d_rand: 600,
            eta: 1.5,
            hard_pool_size: 2000,
            raster_size: 64,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err("eta must be positive");
        }
        if self.raster_size == 0 {
            return Err("raster_size must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Label {
    #[serde(rename = "positive")]
    Positive,
    #[serde(rename = "negative")]
    Negative,
}

/// Which sample pool a line was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Origin {
    #[serde(rename = "S+")]
    StaticPos,
    #[serde(rename = "S-")]
    StaticNeg,
    #[serde(rename = "D+")]
    DynamicPos,
    #[serde(rename = "D-")]
    DynamicNeg,
    #[serde(rename = "D*")]
    DynamicRand,
}

/// A sampled line with its training label and pool of origin. The line
/// score is unused and set to 1.0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledLine {
    pub line: ScoredLine,
    pub label: Label,
    pub origin: Origin,
}

/// Nearest-ground-truth assignment for one predicted junction. `gt_index`
/// is present iff the distance is strictly below the match threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionMatch {
    pub pred_index: usize,
    pub gt_index: Option<usize>,
    pub distance: f64,
}

/// Rasterizes all ground-truth edges onto a `raster_size x raster_size`
/// binary bitmap, endpoints scaled from the wireframe's coordinate space.
pub fn rasterize_gt(w: &Wireframe, raster_size: usize) -> Grid2D {
    let sx = raster_size as f64 / w.width;
    let sy = raster_size as f64 / w.height;
    let mut bitmap = Grid2D::zeros(raster_size, raster_size);
    for &(i, j) in &w.edges {
        let a = w.junctions[i];
        let b = w.junctions[j];
        let a = Point2::new(a.x * sx, a.y * sy);
        let b = Point2::new(b.x * sx, b.y * sy);
        for (x, y) in supercover_cells(a, b, raster_size, raster_size) {
            bitmap.set(y, x, 1.0);
        }
    }
    bitmap
}

/// Average bitmap occupancy along the candidate segment, endpoints given in
/// the `coord` space and scaled onto the bitmap. Always in `[0, 1]`; a
/// candidate that degenerates to one cell averages that single cell.
pub fn hardness(p1: Point2, p2: Point2, coord: (f64, f64), bitmap: &Grid2D) -> f64 {
    let sx = bitmap.width() as f64 / coord.0;
    let sy = bitmap.height() as f64 / coord.1;
    let a = Point2::new(p1.x * sx, p1.y * sy);
    let b = Point2::new(p2.x * sx, p2.y * sy);
    let cells = supercover_cells(a, b, bitmap.width(), bitmap.height());
    if cells.is_empty() {
        return 0.0;
    }
    let sum: f64 = cells.iter().map(|&(x, y)| bitmap.get(y, x)).sum();
    sum / cells.len() as f64
}

/// Mines the hard-negative pool: among all junction pairs that are not
/// edges, the `hard_pool_size` with the highest hardness against the
/// rasterized ground truth. Ties break lexicographically on the pair.
pub fn static_negatives(w: &Wireframe, cfg: &SamplerConfig) -> Vec<(usize, usize)> {
    let bitmap = rasterize_gt(w, cfg.raster_size);
    let edge_set: HashSet<(usize, usize)> = w.edges.iter().copied().collect();
    let mut scored: Vec<(f64, (usize, usize))> = Vec::new();
    for i in 0..w.junctions.len() {
        for j in (i + 1)..w.junctions.len() {
            if edge_set.contains(&(i, j)) {
                continue;
            }
            let h = hardness(w.junctions[i], w.junctions[j], (w.width, w.height), &bitmap);
            scored.push((h, (i, j)));
        }
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    scored.truncate(cfg.hard_pool_size);
    scored.into_iter().map(|(_, pair)| pair).collect()
}

fn draw_lines<F>(
    rng: &mut ChaCha8Rng,
    pool: &[(Point2, Point2)],
    count: usize,
    mut classify: F,
    out: &mut Vec<LabeledLine>,
) where
    F: FnMut(usize) -> (Label, Origin),
{
    if pool.is_empty() {
        return;
    }
    for _ in 0..count {
        let k = rng.random_range(0..pool.len());
        let (label, origin) = classify(k);
        let (a, b) = pool[k];
        out.push(LabeledLine { line: ScoredLine::new(a, b, 1.0), label, origin });
    }
}

/// Static sampling: `n_s_pos` positives uniformly (with replacement) from
/// the ground-truth edges, then `n_s_neg` negatives from the mined pool.
/// Empty pools contribute nothing.
pub fn sample_static(w: &Wireframe, cfg: &SamplerConfig, rng_seed: u64) -> Vec<LabeledLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::new();
    let positives: Vec<(Point2, Point2)> = w
        .edges
        .iter()
        .map(|&(i, j)| (w.junctions[i], w.junctions[j]))
        .collect();
    draw_lines(&mut rng, &positives, cfg.n_s_pos, |_| (Label::Positive, Origin::StaticPos), &mut out);
    let negatives: Vec<(Point2, Point2)> = static_negatives(w, cfg)
        .into_iter()
        .map(|(i, j)| (w.junctions[i], w.junctions[j]))
        .collect();
    draw_lines(&mut rng, &negatives, cfg.n_s_neg, |_| (Label::Negative, Origin::StaticNeg), &mut out);
    out
}

/// Matches each predicted junction to its nearest ground-truth junction
/// (ties: lowest index). A ground truth may be matched by several
/// predictions; there is no exclusivity here.
pub fn match_junctions(pred: &[ScoredJunction], gt: &Wireframe, eta: f64) -> Vec<JunctionMatch> {
    pred.iter()
        .enumerate()
        .map(|(pred_index, sj)| {
            let mut best: Option<(usize, f64)> = None;
            for (g, q) in gt.junctions.iter().enumerate() {
                let d = sj.p.dist(*q);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((g, d));
                }
            }
            match best {
                Some((g, d)) if d < eta => {
                    JunctionMatch { pred_index, gt_index: Some(g), distance: d }
                }
                Some((_, d)) => JunctionMatch { pred_index, gt_index: None, distance: d },
                None => JunctionMatch { pred_index, gt_index: None, distance: f64::INFINITY },
            }
        })
        .collect()
}

/// Dynamic sampling over predicted junction pairs. A pair joins the
/// positive pool when both endpoints match and the matched ground-truth
/// pair is an edge, the hard-negative pool when the matched pair sits in
/// the mined static pool, and the random pool always; random draws are
/// labeled by the positive-pool test. Endpoint coordinates are the
/// predicted positions.
pub fn sample_dynamic(
    pred: &[ScoredJunction],
    gt: &Wireframe,
    s_neg_pool: &[(usize, usize)],
    cfg: &SamplerConfig,
    rng_seed: u64,
) -> Vec<LabeledLine> {
    let matches = match_junctions(pred, gt, cfg.eta);
    let edge_set: HashSet<(usize, usize)> = gt.edges.iter().copied().collect();
    let neg_set: HashSet<(usize, usize)> = s_neg_pool.iter().copied().collect();

    let norm = |a: usize, b: usize| if a <= b { (a, b) } else { (b, a) };
    let matched_pair = |i1: usize, i2: usize| -> Option<(usize, usize)> {
        match (matches[i1].gt_index, matches[i2].gt_index) {
            (Some(m1), Some(m2)) => Some(norm(m1, m2)),
            _ => None,
        }
    };

    let mut d_pos: Vec<(Point2, Point2)> = Vec::new();
    let mut d_neg: Vec<(Point2, Point2)> = Vec::new();
    let mut d_star: Vec<(Point2, Point2)> = Vec::new();
    let mut d_star_positive: Vec<bool> = Vec::new();
    for i1 in 0..pred.len() {
        for i2 in (i1 + 1)..pred.len() {
            let endpoints = (pred[i1].p, pred[i2].p);
            let is_pos = matched_pair(i1, i2).is_some_and(|m| edge_set.contains(&m));
            if is_pos {
                d_pos.push(endpoints);
            }
            if matched_pair(i1, i2).is_some_and(|m| neg_set.contains(&m)) {
                d_neg.push(endpoints);
            }
            d_star.push(endpoints);
            d_star_positive.push(is_pos);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::new();
    draw_lines(&mut rng, &d_pos, cfg.n_d_pos, |_| (Label::Positive, Origin::DynamicPos), &mut out);
    draw_lines(&mut rng, &d_neg, cfg.n_d_neg, |_| (Label::Negative, Origin::DynamicNeg), &mut out);
    draw_lines(
        &mut rng,
        &d_star,
        cfg.n_d_rand,
        |k| {
            let label = if d_star_positive[k] { Label::Positive } else { Label::Negative };
            (label, Origin::DynamicRand)
        },
        &mut out,
    );
    out
}

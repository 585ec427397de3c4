//! Heat-map line metrics: rasterize scored lines into a confidence map,
//! match predicted pixels against ground-truth pixels under a distance
//! tolerance, and sweep confidence thresholds into a PR curve.
//!
//! Counts are pooled over the dataset (true/false positives summed before
//! precision/recall), and pixel matching is greedy nearest-pair, one-to-one,
//! with deterministic lexicographic tie-breaking.

use crate::grid::Grid2D;
use crate::model::ScoredLine;
use crate::pr::{self, PRCurve, PRPoint};
use crate::raster::supercover_cells;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapEvalConfig {
    /// Side length of the square raster.
    pub resolution: usize,
    /// Pixel matching tolerance, in pixels.
    pub tolerance: f64,
    /// Confidence thresholds, strictly increasing, all in (0, 1).
    pub thresholds: Vec<f64>,
}

impl HeatmapEvalConfig {
    /// The defaults at a given resolution: tolerance of 0.0075 x the map
    /// diagonal and 99 uniform thresholds 0.01..=0.99.
    pub fn for_resolution(resolution: usize) -> Self {
        let diagonal = (2.0 * (resolution as f64).powi(2)).sqrt();
        Self {
            resolution,
            tolerance: 0.0075 * diagonal,
            thresholds: (1..100).map(|k| k as f64 / 100.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), HeatmapError> {
        if self.resolution < 8 {
            return Err(HeatmapError::BadConfig("resolution must be >= 8"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(HeatmapError::BadConfig("tolerance must be positive"));
        }
        if self.thresholds.is_empty()
            || self.thresholds.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(HeatmapError::BadConfig("thresholds must be strictly increasing"));
        }
        Ok(())
    }
}

impl Default for HeatmapEvalConfig {
    fn default() -> Self {
        Self::for_resolution(128)
    }
}

#[derive(Debug, Error)]
pub enum HeatmapError {
    #[error("invalid config: {0}")]
    BadConfig(&'static str),
    #[error("prediction and ground-truth maps have different shapes")]
    ShapeMismatch,
    #[error("ground-truth heat map is empty; recall is undefined")]
    NoGroundTruth,
}

/// Rasterizes scored lines (coordinates already in raster pixel units) into
/// a confidence map: each visited cell takes the maximum score over the
/// lines covering it.
pub fn rasterize_scored(lines: &[ScoredLine], cfg: &HeatmapEvalConfig) -> Grid2D {
    let r = cfg.resolution;
    let mut map = Grid2D::zeros(r, r);
    for line in lines {
        for (x, y) in supercover_cells(line.p1, line.p2, r, r) {
            if line.score > map.get(y, x) {
                map.set(y, x, line.score);
            }
        }
    }
    map
}

/// Matching counts at one threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThresholdCounts {
    pub matched: u64,
    pub pred_on: u64,
}

/// Aggregates per-image matching counts so datasets can be pooled before
/// precision/recall are formed.
#[derive(Debug, Clone)]
pub struct HeatmapAccumulator {
    cfg: HeatmapEvalConfig,
    per_threshold: Vec<ThresholdCounts>,
    gt_on: u64,
}

impl HeatmapAccumulator {
    pub fn new(cfg: HeatmapEvalConfig) -> Result<Self, HeatmapError> {
        cfg.validate()?;
        let n = cfg.thresholds.len();
        Ok(Self { cfg, per_threshold: vec![ThresholdCounts::default(); n], gt_on: 0 })
    }

    pub fn add_image(&mut self, pred: &Grid2D, gt: &Grid2D) -> Result<(), HeatmapError> {
        if pred.height() != gt.height() || pred.width() != gt.width() {
            return Err(HeatmapError::ShapeMismatch);
        }
        let (counts, gt_on) = image_counts(pred, gt, &self.cfg);
        for (acc, c) in self.per_threshold.iter_mut().zip(counts) {
            acc.matched += c.matched;
            acc.pred_on += c.pred_on;
        }
        self.gt_on += gt_on;
        Ok(())
    }

    pub fn merge_counts(&mut self, counts: &[ThresholdCounts], gt_on: u64) {
        for (acc, c) in self.per_threshold.iter_mut().zip(counts) {
            acc.matched += c.matched;
            acc.pred_on += c.pred_on;
        }
        self.gt_on += gt_on;
    }

    pub fn finish(self) -> Result<HeatmapScores, HeatmapError> {
        if self.gt_on == 0 {
            return Err(HeatmapError::NoGroundTruth);
        }
        let mut points = Vec::with_capacity(self.cfg.thresholds.len());
        let mut f_h = 0.0_f64;
        // Descending threshold so recall is non-decreasing along the curve.
        for (i, &t) in self.cfg.thresholds.iter().enumerate().rev() {
            let c = self.per_threshold[i];
            let precision =
                if c.pred_on == 0 { 1.0 } else { c.matched as f64 / c.pred_on as f64 };
            let recall = c.matched as f64 / self.gt_on as f64;
            if precision + recall > 0.0 {
                f_h = f_h.max(2.0 * precision * recall / (precision + recall));
            }
            points.push(PRPoint { threshold: t, precision, recall });
        }
        let ap_h = pr::area_under(&points);
        Ok(HeatmapScores { curve: PRCurve { points, ap: ap_h }, ap_h, f_h })
    }
}

#[derive(Debug, Clone)]
pub struct HeatmapScores {
    pub curve: PRCurve,
    pub ap_h: f64,
    pub f_h: f64,
}

/// Heat-map PR for a single prediction/ground-truth map pair.
pub fn heatmap_pr(
    pred: &Grid2D,
    gt: &Grid2D,
    cfg: &HeatmapEvalConfig,
) -> Result<HeatmapScores, HeatmapError> {
    let mut acc = HeatmapAccumulator::new(cfg.clone())?;
    acc.add_image(pred, gt)?;
    acc.finish()
}

/// Greedy one-to-one pixel matching counts for every configured threshold.
///
/// Candidate pairs (within tolerance) are enumerated once and ordered by
/// ascending squared distance, ties by (row, column) of the ground-truth
/// pixel then of the predicted pixel; each threshold replays that order over
/// the pixels whose confidence clears it.
pub fn image_counts(
    pred: &Grid2D,
    gt: &Grid2D,
    cfg: &HeatmapEvalConfig,
) -> (Vec<ThresholdCounts>, u64) {
    let res_h = gt.height();
    let res_w = gt.width();
    let gt_on: Vec<(usize, usize)> = gt
        .cells()
        .filter(|&(_, _, v)| v > 0.0)
        .map(|(y, x, _)| (y, x))
        .collect();
    let mut gt_index = vec![usize::MAX; res_h * res_w];
    for (i, &(y, x)) in gt_on.iter().enumerate() {
        gt_index[y * res_w + x] = i;
    }

    // Integer offsets within the matching tolerance.
    let reach = cfg.tolerance.floor() as i64;
    let tol_sq = cfg.tolerance * cfg.tolerance;
    let mut offsets = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if ((dy * dy + dx * dx) as f64) <= tol_sq {
                offsets.push((dy, dx));
            }
        }
    }

    // All positive-confidence pixels, and every candidate pair they form.
    let mut pred_pixels: Vec<(usize, usize, f64)> = Vec::new();
    // (dist_sq, gt row, gt col, pred row, pred col, pred pixel id)
    let mut pairs: Vec<(i64, usize, usize, usize, usize, usize)> = Vec::new();
    for (y, x, v) in pred.cells() {
        if v <= 0.0 {
            continue;
        }
        let pid = pred_pixels.len();
        pred_pixels.push((y, x, v));
        for &(dy, dx) in &offsets {
            let gy = y as i64 + dy;
            let gx = x as i64 + dx;
            if gy < 0 || gx < 0 || gy >= res_h as i64 || gx >= res_w as i64 {
                continue;
            }
            let (gy, gx) = (gy as usize, gx as usize);
            if gt_index[gy * res_w + gx] != usize::MAX {
                pairs.push((dy * dy + dx * dx, gy, gx, y, x, pid));
            }
        }
    }
    pairs.sort_unstable();

    // Epoch-marked claim sets avoid clearing between thresholds.
    let mut gt_claim = vec![0u32; gt_on.len()];
    let mut pred_claim = vec![0u32; pred_pixels.len()];
    let mut out = Vec::with_capacity(cfg.thresholds.len());
    for (epoch, &t) in cfg.thresholds.iter().enumerate() {
        let epoch = epoch as u32 + 1;
        let mut matched = 0u64;
        let mut pred_on = 0u64;
        for p in &pred_pixels {
            if p.2 >= t {
                pred_on += 1;
            }
        }
        for &(_, gy, gx, _, _, pid) in &pairs {
            if pred_pixels[pid].2 < t {
                continue;
            }
            let gi = gt_index[gy * res_w + gx];
            if gt_claim[gi] == epoch || pred_claim[pid] == epoch {
                continue;
            }
            gt_claim[gi] = epoch;
            pred_claim[pid] = epoch;
            matched += 1;
        }
        out.push(ThresholdCounts { matched, pred_on });
    }
    (out, gt_on.len() as u64)
}

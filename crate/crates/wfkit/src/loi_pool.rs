//! Line-of-interest pooling: turn a segment over a `C x H x W` feature map
//! into a fixed-length vector.
//!
//! The segment is sampled at `n_points` uniformly spaced points, each point
//! is read from the map with bilinear interpolation (border-clamped), and
//! each channel is reduced by windowed max pooling of width `pool_stride`
//! (the last window may be shorter). The flattened output has length
//! `C * ceil(n_points / pool_stride)`, channel-major.
//!
//! `loi_pool_backward` routes upstream gradients through the recorded
//! argmax sample of each output slot onto the four bilinear corner cells.
//! Gradients with respect to the endpoint coordinates are not computed:
//! endpoints are trained through the junction offsets, not through pooling.

use crate::grid::Grid3D;
use crate::model::Point2;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoiConfig {
    pub n_points: usize,
    pub pool_stride: usize,
}

impl Default for LoiConfig {
    fn default() -> Self {
        Self { n_points: 32, pool_stride: 4 }
    }
}

impl LoiConfig {
    pub fn validate(&self) -> Result<(), LoiError> {
        if self.n_points < 2 {
            return Err(LoiError::BadConfig("n_points must be >= 2"));
        }
        if self.pool_stride == 0 || self.pool_stride > self.n_points {
            return Err(LoiError::BadConfig("pool_stride must be in 1..=n_points"));
        }
        Ok(())
    }

    /// Output slots per channel: `ceil(n_points / pool_stride)`.
    pub fn slots_per_channel(&self) -> usize {
        self.n_points.div_ceil(self.pool_stride)
    }
}

/// A pooled line feature: flattened channel-major values plus, per output
/// slot, the index of the sample point that won its pooling window (used
/// for gradient routing).
#[derive(Debug, Clone, PartialEq)]
pub struct LoiFeature {
    pub values: Vec<f64>,
    pub argmax_index: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum LoiError {
    #[error("invalid config: {0}")]
    BadConfig(&'static str),
    #[error("upstream gradient has length {got}, expected {expected}")]
    UpstreamLength { expected: usize, got: usize },
    #[error("line endpoints coincide; direction is undefined")]
    DegenerateLine,
}

/// `n_points` uniformly spaced points from `p1` to `p2` inclusive:
/// `q_k = (1 - t_k) p1 + t_k p2` with `t_k = k / (n_points - 1)`.
pub fn sample_points(p1: Point2, p2: Point2, n_points: usize) -> Vec<Point2> {
    debug_assert!(n_points >= 2);
    (0..n_points)
        .map(|k| {
            let t = k as f64 / (n_points - 1) as f64;
            Point2::new(
                (1.0 - t) * p1.x + t * p2.x,
                (1.0 - t) * p1.y + t * p2.y,
            )
        })
        .collect()
}

/// The four bilinear corner cells and weights for a sample location.
/// Coordinates are aligned so an integer `(x, y)` reads `fm[:, y, x]`
/// exactly; out-of-range locations clamp to the border first.
fn bilinear_corners(width: usize, height: usize, q: Point2) -> [(usize, usize, f64); 4] {
    let x = q.x.clamp(0.0, (width - 1) as f64);
    let y = q.y.clamp(0.0, (height - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    [
        (y0, x0, (1.0 - fx) * (1.0 - fy)),
        (y0, x1, fx * (1.0 - fy)),
        (y1, x0, (1.0 - fx) * fy),
        (y1, x1, fx * fy),
    ]
}

/// Bilinear read of all channels at `q`.
pub fn bilinear(fm: &Grid3D, q: Point2) -> Vec<f64> {
    let corners = bilinear_corners(fm.width(), fm.height(), q);
    (0..fm.channels())
        .map(|c| {
            corners
                .iter()
                .map(|&(y, x, w)| w * fm.get(c, y, x))
                .sum()
        })
        .collect()
}

/// Forward LoI pooling. Window ties resolve to the lowest sample index.
pub fn loi_pool_forward(fm: &Grid3D, line: (Point2, Point2), cfg: &LoiConfig) -> LoiFeature {
    let points = sample_points(line.0, line.1, cfg.n_points);
    let corners: Vec<_> = points
        .iter()
        .map(|&q| bilinear_corners(fm.width(), fm.height(), q))
        .collect();
    let slots = cfg.slots_per_channel();
    let mut values = Vec::with_capacity(fm.channels() * slots);
    let mut argmax_index = Vec::with_capacity(fm.channels() * slots);
    for c in 0..fm.channels() {
        let sampled: Vec<f64> = corners
            .iter()
            .map(|cs| cs.iter().map(|&(y, x, w)| w * fm.get(c, y, x)).sum())
            .collect();
        for w in 0..slots {
            let start = w * cfg.pool_stride;
            let end = (start + cfg.pool_stride).min(cfg.n_points);
            let mut best_k = start;
            for k in start + 1..end {
                if sampled[k] > sampled[best_k] {
                    best_k = k;
                }
            }
            values.push(sampled[best_k]);
            argmax_index.push(best_k);
        }
    }
    LoiFeature { values, argmax_index }
}

/// Backward LoI pooling: the gradient of `upstream . forward(fm)` with
/// respect to the feature map. Each slot's upstream value flows to its
/// argmax sample and from there to the four bilinear corners.
pub fn loi_pool_backward(
    fm: &Grid3D,
    line: (Point2, Point2),
    cfg: &LoiConfig,
    upstream: &[f64],
) -> Result<Grid3D, LoiError> {
    let slots = cfg.slots_per_channel();
    let expected = fm.channels() * slots;
    if upstream.len() != expected {
        return Err(LoiError::UpstreamLength { expected, got: upstream.len() });
    }
    let feature = loi_pool_forward(fm, line, cfg);
    let points = sample_points(line.0, line.1, cfg.n_points);
    let mut grad = Grid3D::zeros(fm.channels(), fm.height(), fm.width());
    for c in 0..fm.channels() {
        for w in 0..slots {
            let slot = c * slots + w;
            let g = upstream[slot];
            let k = feature.argmax_index[slot];
            for (y, x, weight) in bilinear_corners(fm.width(), fm.height(), points[k]) {
                grad.add(c, y, x, weight * g);
            }
        }
    }
    Ok(grad)
}

/// The 6-dimensional coordinate feature of a line: both endpoints plus the
/// normalized direction `(p1 - p2) / |p1 - p2|`.
pub fn manual_feature(line: (Point2, Point2)) -> Result<[f64; 6], LoiError> {
    let (p1, p2) = line;
    let dx = p1.x - p2.x;
    let dy = p1.y - p2.y;
    let norm = (dx * dx + dy * dy).sqrt();
    if norm == 0.0 {
        return Err(LoiError::DegenerateLine);
    }
    Ok([p1.x, p1.y, p2.x, p2.y, dx / norm, dy / norm])
}

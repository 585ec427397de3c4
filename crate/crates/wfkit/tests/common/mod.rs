//! Shared helpers for the integration test suites: independent brute-force
//! oracles and deterministic instance generators. Everything here derives
//! expected values from first principles, never from the code under test.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wfkit::grid::{Grid2D, Grid3D};
use wfkit::loi_pool::{loi_pool_forward, sample_points, LoiConfig};
use wfkit::model::Point2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Segment / cell intersection oracle
// ---------------------------------------------------------------------------

/// Feasible parameter interval of a 1D family of linear constraints over
/// t in [0, 1], with open/closed bound bookkeeping.
struct TInterval {
    lo: f64,
    hi: f64,
    lo_open: bool,
    hi_open: bool,
    empty: bool,
}

impl TInterval {
    fn unit() -> Self {
        TInterval { lo: 0.0, hi: 1.0, lo_open: false, hi_open: false, empty: false }
    }

    fn add_lower(&mut self, t: f64, open: bool) {
        if t > self.lo || (t == self.lo && open && !self.lo_open) {
            self.lo = t;
            self.lo_open = open;
        }
    }

    fn add_upper(&mut self, t: f64, open: bool) {
        if t < self.hi || (t == self.hi && open && !self.hi_open) {
            self.hi = t;
            self.hi_open = open;
        }
    }

    fn nonempty(&self) -> bool {
        if self.empty {
            return false;
        }
        if self.lo < self.hi {
            return true;
        }
        self.lo == self.hi && !self.lo_open && !self.hi_open
    }

    /// Constrain `origin + t * slope >= bound` (closed) or `> bound` when
    /// `open`.
    fn constrain_ge(&mut self, origin: f64, slope: f64, bound: f64, open: bool) {
        if slope == 0.0 {
            if origin < bound || (open && origin == bound) {
                self.empty = true;
            }
            return;
        }
        let t = (bound - origin) / slope;
        if slope > 0.0 {
            self.add_lower(t, open);
        } else {
            self.add_upper(t, open);
        }
    }

    /// Constrain `origin + t * slope <= bound` (closed) or `< bound` when
    /// `open`.
    fn constrain_le(&mut self, origin: f64, slope: f64, bound: f64, open: bool) {
        if slope == 0.0 {
            if origin > bound || (open && origin == bound) {
                self.empty = true;
            }
            return;
        }
        let t = (bound - origin) / slope;
        if slope > 0.0 {
            self.add_upper(t, open);
        } else {
            self.add_lower(t, open);
        }
    }
}

/// Does the closed segment intersect the half-open unit cell
/// `[cx, cx+1) x [cy, cy+1)`?
pub fn segment_visits_cell(a: Point2, b: Point2, cx: usize, cy: usize) -> bool {
    let (cx, cy) = (cx as f64, cy as f64);
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let mut t = TInterval::unit();
    t.constrain_ge(a.x, dx, cx, false);
    t.constrain_le(a.x, dx, cx + 1.0, true);
    t.constrain_ge(a.y, dy, cy, false);
    t.constrain_le(a.y, dy, cy + 1.0, true);
    t.nonempty()
}

/// Exhaustive per-cell rasterization of a segment (grid coordinates).
pub fn oracle_cells(a: Point2, b: Point2, width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for cy in 0..height {
        for cx in 0..width {
            if segment_visits_cell(a, b, cx, cy) {
                out.push((cx, cy));
            }
        }
    }
    out
}

/// Oracle hardness: mean bitmap occupancy over the oracle-visited cells of
/// the candidate scaled onto the bitmap.
pub fn oracle_hardness(p1: Point2, p2: Point2, coord: (f64, f64), bitmap: &Grid2D) -> f64 {
    let sx = bitmap.width() as f64 / coord.0;
    let sy = bitmap.height() as f64 / coord.1;
    let a = Point2::new(p1.x * sx, p1.y * sy);
    let b = Point2::new(p2.x * sx, p2.y * sy);
    let cells = oracle_cells(a, b, bitmap.width(), bitmap.height());
    if cells.is_empty() {
        return 0.0;
    }
    let sum: f64 = cells.iter().map(|&(x, y)| bitmap.get(y, x)).sum();
    sum / cells.len() as f64
}

// ---------------------------------------------------------------------------
// Structural matching oracle: a literal replay of the one-shot rules
// ---------------------------------------------------------------------------

fn sq(v: f64) -> f64 {
    v * v
}

fn endpoint_distance_sq(line: RawSeg, gt: RawSeg) -> f64 {
    let ((x1, y1), (x2, y2)) = line;
    let ((u1, v1), (u2, v2)) = gt;
    let direct = sq(x1 - u1) + sq(y1 - v1) + sq(x2 - u2) + sq(y2 - v2);
    let flipped = sq(x1 - u2) + sq(y1 - v2) + sq(x2 - u1) + sq(y2 - v1);
    if direct < flipped {
        direct
    } else {
        flipped
    }
}

/// A raw segment as coordinate pairs.
pub type RawSeg = ((f64, f64), (f64, f64));
/// A raw segment with a confidence score in front.
pub type ScoredSeg = (f64, (f64, f64), (f64, f64));

/// TP flags per prediction (input order), replaying the ranked one-shot
/// argmin rule: walk predictions by descending score, find the argmin
/// ground truth, mark TP only when its distance clears theta and it is
/// still unclaimed.
pub fn brute_match_lines(pred: &[ScoredSeg], gt: &[RawSeg], theta: f64) -> Vec<bool> {
    let n = pred.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pred[b].0.partial_cmp(&pred[a].0).unwrap());
    let mut claimed = vec![false; gt.len()];
    let mut tp = vec![false; n];
    for idx in order {
        let (_, p1, p2) = pred[idx];
        let mut argmin = usize::MAX;
        let mut best = f64::INFINITY;
        for (g, &seg) in gt.iter().enumerate() {
            let d = endpoint_distance_sq((p1, p2), seg);
            if d < best {
                best = d;
                argmin = g;
            }
        }
        if argmin != usize::MAX && best <= theta && !claimed[argmin] {
            claimed[argmin] = true;
            tp[idx] = true;
        }
    }
    tp
}

/// Literal all-point interpolated AP: at each recall increment, take the
/// maximum precision among all points with at least that recall.
pub fn brute_ap(ranked: &[(f64, bool)], total_gt: usize) -> f64 {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut tp = 0usize;
    for (k, &(_, is_tp)) in ranked.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        points.push((tp as f64 / total_gt as f64, tp as f64 / (k + 1) as f64));
    }
    let mut levels: Vec<f64> = points.iter().map(|&(r, _)| r).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    let mut ap = 0.0;
    let mut prev = 0.0;
    for r in levels {
        let max_p = points
            .iter()
            .filter(|&&(pr, _)| pr >= r)
            .map(|&(_, pp)| pp)
            .fold(0.0_f64, f64::max);
        ap += (r - prev) * max_p;
        prev = r;
    }
    ap
}

// ---------------------------------------------------------------------------
// LoI gradient oracle: central finite differences
// ---------------------------------------------------------------------------

/// d(upstream . forward)/d(cell) by central differences at step `h`.
pub fn fd_gradient(
    fm: &Grid3D,
    line: (Point2, Point2),
    cfg: &LoiConfig,
    upstream: &[f64],
    h: f64,
) -> Grid3D {
    let objective = |map: &Grid3D| -> f64 {
        loi_pool_forward(map, line, cfg)
            .values
            .iter()
            .zip(upstream)
            .map(|(v, u)| v * u)
            .sum()
    };
    let mut grad = Grid3D::zeros(fm.channels(), fm.height(), fm.width());
    for c in 0..fm.channels() {
        for y in 0..fm.height() {
            for x in 0..fm.width() {
                let mut plus = fm.clone();
                plus.set(c, y, x, fm.get(c, y, x) + h);
                let mut minus = fm.clone();
                minus.set(c, y, x, fm.get(c, y, x) - h);
                grad.set(c, y, x, (objective(&plus) - objective(&minus)) / (2.0 * h));
            }
        }
    }
    grad
}

/// Rejects feature-map/line instances whose pooling windows have a top-2
/// value gap below `min_gap` in any channel: finite differences are
/// meaningless across a max kink.
pub fn window_gaps_clear(fm: &Grid3D, line: (Point2, Point2), cfg: &LoiConfig, min_gap: f64) -> bool {
    let points = sample_points(line.0, line.1, cfg.n_points);
    for c in 0..fm.channels() {
        let sampled: Vec<f64> = points
            .iter()
            .map(|&q| wfkit::loi_pool::bilinear(fm, q)[c])
            .collect();
        let slots = cfg.slots_per_channel();
        for w in 0..slots {
            let start = w * cfg.pool_stride;
            let end = (start + cfg.pool_stride).min(cfg.n_points);
            let mut window: Vec<f64> = sampled[start..end].to_vec();
            window.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if window.len() >= 2 && window[0] - window[1] < min_gap {
                return false;
            }
        }
    }
    true
}

/// A random feature map with values in [0, 1).
pub fn random_map(rng: &mut ChaCha8Rng, channels: usize, height: usize, width: usize) -> Grid3D {
    let mut fm = Grid3D::zeros(channels, height, width);
    for c in 0..channels {
        for y in 0..height {
            for x in 0..width {
                fm.set(c, y, x, rng.random_range(0.0..1.0));
            }
        }
    }
    fm
}

/// A random line whose samples stay strictly inside the map.
pub fn random_inbounds_line(rng: &mut ChaCha8Rng, height: usize, width: usize) -> (Point2, Point2) {
    let max_x = (width - 1) as f64 - 0.2;
    let max_y = (height - 1) as f64 - 0.2;
    loop {
        let p1 = Point2::new(rng.random_range(0.2..max_x), rng.random_range(0.2..max_y));
        let p2 = Point2::new(rng.random_range(0.2..max_x), rng.random_range(0.2..max_y));
        if p1.dist(p2) >= 2.0 {
            return (p1, p2);
        }
    }
}

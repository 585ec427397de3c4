//! Overlapped-line removal.
//!
//! Lines are visited in descending score order. For each higher-ranked line
//! `L_i` and close lower-ranked line `L_j`: delete `L_j` when both of its
//! endpoint projections fall inside `L_i`'s extent, cut it back to the
//! extent boundary when exactly one does, retain it otherwise. Deleted
//! lines never serve as `L_i`; a cut line keeps its score and participates
//! in later comparisons with its updated geometry.

use crate::model::{Point2, ScoredLine};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapConfig {
    /// Closeness threshold in normalized units: point-to-segment distances
    /// are divided by the coordinate-space diagonal before comparison.
    pub eta_s: f64,
}

impl Default for OverlapConfig {
    fn default() -> Self {
        Self { eta_s: 0.01 }
    }
}

/// Euclidean distance from `p` to the closed segment `seg`. A degenerate
/// segment is treated as its single point.
pub fn point_segment_distance(p: Point2, seg: (Point2, Point2)) -> f64 {
    let (a, b) = seg;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq).clamp(0.0, 1.0);
    p.dist(Point2::new(a.x + t * dx, a.y + t * dy))
}

/// The symmetric closeness predicate, with distances normalized by the
/// diagonal of the `coord` space.
pub fn lines_close(a: &ScoredLine, b: &ScoredLine, coord: (f64, f64), cfg: &OverlapConfig) -> bool {
    let diag = (coord.0 * coord.0 + coord.1 * coord.1).sqrt();
    let seg_a = (a.p1, a.p2);
    let seg_b = (b.p1, b.p2);
    let b_to_a = point_segment_distance(b.p1, seg_a).max(point_segment_distance(b.p2, seg_a));
    let a_to_b = point_segment_distance(a.p1, seg_b).max(point_segment_distance(a.p2, seg_b));
    b_to_a.min(a_to_b) / diag <= cfg.eta_s
}

/// Projection parameter of `p` onto the infinite line through `seg`;
/// `0..=1` means inside the segment extent.
fn projection_t(p: Point2, seg: (Point2, Point2)) -> f64 {
    let (a, b) = seg;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)
}

/// Applies the delete/cut/retain rules to a scored line list. Scores are
/// never modified; output is in descending score order (ties keep input
/// order).
///
/// A single ranked pass is not confluent: cutting a line can create an
/// overlap with a line that was already processed, which only the next
/// pass would see. Passes repeat until nothing changes, so the output is a
/// fixed point and the operation is idempotent. Termination is guaranteed
/// because every changing pass deletes a line or strictly shortens one.
pub fn resolve_overlaps(
    lines: &[ScoredLine],
    coord: (f64, f64),
    cfg: &OverlapConfig,
) -> Vec<ScoredLine> {
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| lines[b].score.partial_cmp(&lines[a].score).unwrap());
    let mut current: Vec<ScoredLine> = order.iter().map(|&i| lines[i]).collect();
    loop {
        let (next, changed) = resolve_pass(&current, coord, cfg);
        current = next;
        if !changed {
            return current;
        }
    }
}

/// One ranked pass over lines already sorted by descending score. Returns
/// the surviving lines (order preserved) and whether anything changed.
fn resolve_pass(
    lines: &[ScoredLine],
    coord: (f64, f64),
    cfg: &OverlapConfig,
) -> (Vec<ScoredLine>, bool) {
    let mut current = lines.to_vec();
    let mut alive = vec![true; current.len()];
    let mut changed = false;

    for i in 0..current.len() {
        if !alive[i] {
            continue;
        }
        for j in (i + 1)..current.len() {
            if !alive[j] {
                continue;
            }
            let (li, lj) = (current[i], current[j]);
            if !lines_close(&li, &lj, coord, cfg) {
                continue;
            }
            let seg_i = (li.p1, li.p2);
            let t1 = projection_t(lj.p1, seg_i);
            let t2 = projection_t(lj.p2, seg_i);
            let inside = |t: f64| (0.0..=1.0).contains(&t);
            match (inside(t1), inside(t2)) {
                (true, true) => {
                    alive[j] = false;
                    changed = true;
                }
                (true, false) | (false, true) => {
                    let (t_in, t_out, e_in, e_out) = if inside(t1) {
                        (t1, t2, lj.p1, lj.p2)
                    } else {
                        (t2, t1, lj.p2, lj.p1)
                    };
                    let boundary = if t_out > 1.0 { 1.0 } else { 0.0 };
                    let s = (boundary - t_in) / (t_out - t_in);
                    let cut = Point2::new(
                        e_in.x + s * (e_out.x - e_in.x),
                        e_in.y + s * (e_out.y - e_in.y),
                    );
                    if cut != e_in {
                        current[j] = ScoredLine::new(cut, e_out, lj.score);
                        changed = true;
                    }
                }
                (false, false) => {}
            }
        }
    }
    let survivors = current
        .into_iter()
        .zip(alive)
        .filter_map(|(line, keep)| keep.then_some(line))
        .collect();
    (survivors, changed)
}

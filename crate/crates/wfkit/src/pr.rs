//! Precision-recall curves and their area-under-curve.
//!
//! One integration rule is used everywhere: all-point interpolation, where
//! the precision at each recall level is the maximum precision at any
//! recall at least that high, summed over recall increments.

/// One point of a PR sweep: the score threshold together with the
/// precision/recall reached at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PRPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// An ordered PR curve plus its area under the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PRCurve {
    pub points: Vec<PRPoint>,
    pub ap: f64,
}

impl PRCurve {
    /// Builds a curve from a ranked detection list (already sorted by score
    /// descending) and the total ground-truth count. Point `k` carries the
    /// k-th score as its threshold and the cumulative precision/recall.
    pub fn from_ranked(ranked: &[(f64, bool)], total_gt: usize) -> PRCurve {
        debug_assert!(total_gt > 0, "recall undefined without ground truth");
        let mut points = Vec::with_capacity(ranked.len());
        let mut tp = 0u64;
        for (k, &(score, is_tp)) in ranked.iter().enumerate() {
            if is_tp {
                tp += 1;
            }
            points.push(PRPoint {
                threshold: score,
                precision: tp as f64 / (k + 1) as f64,
                recall: tp as f64 / total_gt as f64,
            });
        }
        let ap = area_under(&points);
        PRCurve { points, ap }
    }

    /// Builds a curve from threshold-sweep points, computing the AP with
    /// the shared integration rule.
    pub fn from_points(points: Vec<PRPoint>) -> PRCurve {
        let ap = area_under(&points);
        PRCurve { points, ap }
    }
}

/// All-point interpolated area under a set of PR points. The points need
/// not be sorted; recall level zero is implicit.
pub fn area_under(points: &[PRPoint]) -> f64 {
    let mut rp: Vec<(f64, f64)> = points.iter().map(|p| (p.recall, p.precision)).collect();
    rp.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Max-precision envelope, built right to left.
    let mut envelope = vec![0.0; rp.len()];
    let mut best = 0.0_f64;
    for (i, &(_, p)) in rp.iter().enumerate().rev() {
        best = best.max(p);
        envelope[i] = best;
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (i, &(r, _)) in rp.iter().enumerate() {
        ap += (r - prev_recall) * envelope[i];
        prev_recall = r;
    }
    ap
}

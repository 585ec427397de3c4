//! Structural average precision over vectorized lines and mean AP over
//! vectorized junctions.
//!
//! A predicted line is correct iff its orientation-minimized summed squared
//! endpoint distance to an unclaimed ground-truth line is within the
//! threshold; each ground-truth line may be claimed once, and claiming is
//! by argmin only, so a second prediction of an already-claimed line is a
//! false positive even if another ground truth would be near enough.
//! Junctions instead match their nearest unclaimed ground truth. Both
//! metrics pool outcomes over images before curve construction.

use crate::junction_codec::ScoredJunction;
use crate::model::{Point2, ScoredLine};
use crate::pr::PRCurve;
use std::collections::BTreeMap;
use thiserror::Error;

/// Line matching thresholds (squared distance) used throughout: sAP is
/// reported at 5, 10, and 15 in the 128-unit space.
pub const DEFAULT_SAP_THETAS: [f64; 3] = [5.0, 10.0, 15.0];

/// Junction matching distances averaged into the mean junction AP.
pub const DEFAULT_JUNCTION_TAUS: [f64; 3] = [0.5, 1.0, 2.0];

/// TP/FP assignment of one prediction within one image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOutcome {
    pub pred_index: usize,
    pub is_tp: bool,
    /// The ground-truth index claimed by this prediction, present iff TP.
    pub matched_gt: Option<usize>,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no ground-truth {0} in the dataset; recall is undefined")]
    NoGroundTruth(&'static str),
    #[error("prediction/ground-truth image sets differ: {0:?} only on one side")]
    ImageKeyMismatch(Vec<String>),
}

/// Orientation-minimized squared endpoint distance between a predicted line
/// and a ground-truth segment.
pub fn line_distance_sq(p1: Point2, p2: Point2, u: Point2, v: Point2) -> f64 {
    let direct = p1.dist_sq(u) + p2.dist_sq(v);
    let flipped = p1.dist_sq(v) + p2.dist_sq(u);
    direct.min(flipped)
}

/// Ranks prediction indices by score descending; ties keep input order.
fn rank_by_score(scores: impl Iterator<Item = f64>) -> Vec<usize> {
    let mut order: Vec<(usize, f64)> = scores.enumerate().collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    order.into_iter().map(|(i, _)| i).collect()
}

/// One-shot line matching for a single image. Predictions are processed in
/// descending score order (ties: input order); the argmin ground truth
/// (ties: lowest index) is claimed on a TP and never rematched.
pub fn match_lines(
    pred: &[ScoredLine],
    gt: &[(Point2, Point2)],
    theta: f64,
) -> Vec<MatchOutcome> {
    let mut outcomes = vec![
        MatchOutcome { pred_index: 0, is_tp: false, matched_gt: None };
        pred.len()
    ];
    for (i, o) in outcomes.iter_mut().enumerate() {
        o.pred_index = i;
    }
    let mut claimed = vec![false; gt.len()];
    for idx in rank_by_score(pred.iter().map(|l| l.score)) {
        let line = &pred[idx];
        let mut best: Option<(usize, f64)> = None;
        for (g, &(u, v)) in gt.iter().enumerate() {
            let d = line_distance_sq(line.p1, line.p2, u, v);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((g, d));
            }
        }
        if let Some((g, d)) = best {
            if d <= theta && !claimed[g] {
                claimed[g] = true;
                outcomes[idx].is_tp = true;
                outcomes[idx].matched_gt = Some(g);
            }
        }
    }
    outcomes
}

fn check_keys<A, B>(
    pred: &BTreeMap<String, A>,
    gt: &BTreeMap<String, B>,
) -> Result<(), MetricsError> {
    if pred.len() == gt.len() && pred.keys().eq(gt.keys()) {
        return Ok(());
    }
    let mut odd: Vec<String> = pred.keys().filter(|k| !gt.contains_key(*k)).cloned().collect();
    odd.extend(gt.keys().filter(|k| !pred.contains_key(*k)).cloned());
    Err(MetricsError::ImageKeyMismatch(odd))
}

/// Pools ranked per-image `(score, is_tp)` outcomes into one curve.
/// Images are visited in lexicographic id order, so tie ordering is
/// deterministic.
fn pooled_curve(mut pooled: Vec<(f64, bool)>, total_gt: usize) -> PRCurve {
    pooled.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    PRCurve::from_ranked(&pooled, total_gt)
}

/// Structural AP at threshold `theta` over a dataset of images.
pub fn structural_ap(
    per_image_pred: &BTreeMap<String, Vec<ScoredLine>>,
    per_image_gt: &BTreeMap<String, Vec<(Point2, Point2)>>,
    theta: f64,
) -> Result<PRCurve, MetricsError> {
    check_keys(per_image_pred, per_image_gt)?;
    let total_gt: usize = per_image_gt.values().map(|g| g.len()).sum();
    if total_gt == 0 {
        return Err(MetricsError::NoGroundTruth("lines"));
    }
    let mut pooled = Vec::new();
    for (id, pred) in per_image_pred {
        let gt = &per_image_gt[id];
        for outcome in match_lines(pred, gt, theta) {
            pooled.push((pred[outcome.pred_index].score, outcome.is_tp));
        }
    }
    Ok(pooled_curve(pooled, total_gt))
}

/// One-shot junction matching for a single image at distance `tau`: each
/// prediction takes its nearest still-unclaimed ground truth if that lies
/// within `tau` (ties: lowest index).
pub fn match_junctions_once(
    pred: &[ScoredJunction],
    gt: &[Point2],
    tau: f64,
) -> Vec<MatchOutcome> {
    let mut outcomes = vec![
        MatchOutcome { pred_index: 0, is_tp: false, matched_gt: None };
        pred.len()
    ];
    for (i, o) in outcomes.iter_mut().enumerate() {
        o.pred_index = i;
    }
    let mut claimed = vec![false; gt.len()];
    for idx in rank_by_score(pred.iter().map(|j| j.score)) {
        let p = pred[idx].p;
        let mut best: Option<(usize, f64)> = None;
        for (g, q) in gt.iter().enumerate() {
            if claimed[g] {
                continue;
            }
            let d = p.dist(*q);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((g, d));
            }
        }
        if let Some((g, d)) = best {
            if d <= tau {
                claimed[g] = true;
                outcomes[idx].is_tp = true;
                outcomes[idx].matched_gt = Some(g);
            }
        }
    }
    outcomes
}

/// Junction AP per distance threshold plus the mean over thresholds.
pub fn junction_map(
    per_image_pred: &BTreeMap<String, Vec<ScoredJunction>>,
    per_image_gt: &BTreeMap<String, Vec<Point2>>,
    thresholds: &[f64],
) -> Result<(Vec<PRCurve>, f64), MetricsError> {
    check_keys(per_image_pred, per_image_gt)?;
    let total_gt: usize = per_image_gt.values().map(|g| g.len()).sum();
    if total_gt == 0 {
        return Err(MetricsError::NoGroundTruth("junctions"));
    }
    let mut curves = Vec::with_capacity(thresholds.len());
    for &tau in thresholds {
        let mut pooled = Vec::new();
        for (id, pred) in per_image_pred {
            let gt = &per_image_gt[id];
            for outcome in match_junctions_once(pred, gt, tau) {
                pooled.push((pred[outcome.pred_index].score, outcome.is_tp));
            }
        }
        curves.push(pooled_curve(pooled, total_gt));
    }
    let mean_ap = curves.iter().map(|c| c.ap).sum::<f64>() / curves.len() as f64;
    Ok((curves, mean_ap))
}

//! Directory-pair evaluation: ground truth and predictions live in
//! directories of same-named `<image_id>.json` wireframes. Unmatched names
//! are a hard error, never a skip -- silent skips corrupt recall
//! denominators. Per-image work runs on a rayon pool; aggregation follows
//! lexicographic image id, so reports do not depend on the worker count.

use crate::CliError;
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::path::Path;
use wfkit::junction_codec::ScoredJunction;
use wfkit::metrics_heatmap::{image_counts, rasterize_scored, HeatmapAccumulator, HeatmapEvalConfig, HeatmapScores};
use wfkit::metrics_structural::match_lines;
use wfkit::model::{Point2, ScoredLine, Wireframe, CANONICAL_EXTENT};
use wfkit::pr::PRCurve;

/// One evaluation image, rescaled into the canonical 128 x 128 space.
/// `load_pairs` returns images in lexicographic id order; pooling relies
/// on that ordering for deterministic tie-breaking.
pub struct EvalImage {
    pub gt_lines: Vec<(Point2, Point2)>,
    pub pred_lines: Vec<ScoredLine>,
    pub gt_junctions: Vec<Point2>,
    pub pred_junctions: Vec<ScoredJunction>,
}

fn json_stems(dir: &Path) -> Result<BTreeSet<String>, CliError> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io(format!("cannot list {}: {e}", dir.display())))?;
    let mut stems = BTreeSet::new();
    for entry in entries {
        let path = entry
            .map_err(|e| CliError::Io(format!("cannot list {}: {e}", dir.display())))?
            .path();
        if path.extension().is_some_and(|x| x == "json") {
            stems.insert(path.file_stem().unwrap().to_string_lossy().into_owned());
        }
    }
    Ok(stems)
}

fn load_wireframe(dir: &Path, id: &str) -> Result<Wireframe, CliError> {
    let path = dir.join(format!("{id}.json"));
    let w = wfkit::io::read_wireframe(&path)
        .map_err(|e| CliError::from_io_error(&path, e))?;
    let violations = w.validate();
    if !violations.is_empty() {
        let detail: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Validation(format!(
            "{}: invalid wireframe: {}",
            path.display(),
            detail.join("; ")
        )));
    }
    Ok(w.rescaled(CANONICAL_EXTENT, CANONICAL_EXTENT))
}

/// Loads a gt/pred directory pair into per-image evaluation inputs.
pub fn load_pairs(gt_dir: &Path, pred_dir: &Path) -> Result<Vec<EvalImage>, CliError> {
    let gt_ids = json_stems(gt_dir)?;
    let pred_ids = json_stems(pred_dir)?;
    if gt_ids != pred_ids {
        let only_gt: Vec<_> = gt_ids.difference(&pred_ids).cloned().collect();
        let only_pred: Vec<_> = pred_ids.difference(&gt_ids).cloned().collect();
        return Err(CliError::Validation(format!(
            "gt/pred image sets differ (gt-only: {only_gt:?}, pred-only: {only_pred:?})"
        )));
    }
    if gt_ids.is_empty() {
        return Err(CliError::Validation(format!(
            "no .json images found under {}",
            gt_dir.display()
        )));
    }
    let mut images = Vec::with_capacity(gt_ids.len());
    for id in gt_ids {
        let gt = load_wireframe(gt_dir, &id)?;
        let pred = load_wireframe(pred_dir, &id)?;
        let gt_lines = gt
            .to_scored_lines()
            .expect("validated above")
            .into_iter()
            .map(|l| (l.p1, l.p2))
            .collect();
        let pred_lines = pred.to_scored_lines().expect("validated above");
        let gt_junctions = gt.junctions.clone();
        let pred_junctions = pred
            .junctions
            .iter()
            .enumerate()
            .map(|(i, &p)| ScoredJunction {
                p,
                score: pred.junction_scores.as_ref().map_or(1.0, |s| s[i]),
            })
            .collect();
        images.push(EvalImage { gt_lines, pred_lines, gt_junctions, pred_junctions });
    }
    Ok(images)
}

pub fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(format!("cannot build worker pool: {e}")))
}

fn pooled_curve(mut ranked: Vec<(f64, bool)>, total_gt: usize) -> Result<PRCurve, CliError> {
    if total_gt == 0 {
        return Err(CliError::Validation(
            "no ground-truth annotations in the dataset; recall is undefined".into(),
        ));
    }
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(PRCurve::from_ranked(&ranked, total_gt))
}

/// Structural AP at each theta, pooled over the dataset.
pub fn eval_sap(
    images: &[EvalImage],
    thetas: &[f64],
    pool: &rayon::ThreadPool,
) -> Result<Vec<(f64, PRCurve)>, CliError> {
    let total_gt: usize = images.iter().map(|im| im.gt_lines.len()).sum();
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let per_image: Vec<Vec<(f64, bool)>> = pool.install(|| {
            images
                .par_iter()
                .map(|im| {
                    match_lines(&im.pred_lines, &im.gt_lines, theta)
                        .iter()
                        .map(|o| (im.pred_lines[o.pred_index].score, o.is_tp))
                        .collect()
                })
                .collect()
        });
        out.push((theta, pooled_curve(per_image.into_iter().flatten().collect(), total_gt)?));
    }
    Ok(out)
}

/// Junction AP at each tau, pooled over the dataset, plus the mean.
pub fn eval_jmap(
    images: &[EvalImage],
    taus: &[f64],
    pool: &rayon::ThreadPool,
) -> Result<(Vec<(f64, PRCurve)>, f64), CliError> {
    let total_gt: usize = images.iter().map(|im| im.gt_junctions.len()).sum();
    let mut curves = Vec::with_capacity(taus.len());
    for &tau in taus {
        let per_image: Vec<Vec<(f64, bool)>> = pool.install(|| {
            images
                .par_iter()
                .map(|im| {
                    wfkit::metrics_structural::match_junctions_once(
                        &im.pred_junctions,
                        &im.gt_junctions,
                        tau,
                    )
                    .iter()
                    .map(|o| (im.pred_junctions[o.pred_index].score, o.is_tp))
                    .collect()
                })
                .collect()
        });
        curves.push((tau, pooled_curve(per_image.into_iter().flatten().collect(), total_gt)?));
    }
    let mean = curves.iter().map(|(_, c)| c.ap).sum::<f64>() / curves.len() as f64;
    Ok((curves, mean))
}

/// Pooled heat-map PR over the dataset.
pub fn eval_aph(
    images: &[EvalImage],
    cfg: &HeatmapEvalConfig,
    pool: &rayon::ThreadPool,
) -> Result<HeatmapScores, CliError> {
    cfg.validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let scale = cfg.resolution as f64 / CANONICAL_EXTENT;
    let rescale = |lines: &[ScoredLine]| -> Vec<ScoredLine> {
        lines
            .iter()
            .map(|l| {
                ScoredLine::new(
                    Point2::new(l.p1.x * scale, l.p1.y * scale),
                    Point2::new(l.p2.x * scale, l.p2.y * scale),
                    l.score,
                )
            })
            .collect()
    };
    let per_image: Vec<(Vec<wfkit::metrics_heatmap::ThresholdCounts>, u64)> =
        pool.install(|| {
            images
                .par_iter()
                .map(|im| {
                    let gt_lines: Vec<ScoredLine> = im
                        .gt_lines
                        .iter()
                        .map(|&(a, b)| ScoredLine::new(a, b, 1.0))
                        .collect();
                    let gt_map = rasterize_scored(&rescale(&gt_lines), cfg);
                    let pred_map = rasterize_scored(&rescale(&im.pred_lines), cfg);
                    image_counts(&pred_map, &gt_map, cfg)
                })
                .collect()
        });
    let mut acc = HeatmapAccumulator::new(cfg.clone())
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (counts, gt_on) in per_image {
        acc.merge_counts(&counts, gt_on);
    }
    acc.finish()
        .map_err(|e| CliError::Validation(e.to_string()))
}

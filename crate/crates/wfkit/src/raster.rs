//! Supercover line traversal: which grid cells does a continuous segment
//! pass through?
//!
//! A cell is the half-open unit square `[x, x+1) x [y, y+1)`. The walk
//! visits exactly the cells that contain at least one point of the segment,
//! so corner touches count for the cell whose lower-left corner is hit, and
//! an exact lattice diagonal visits only the diagonal cells. The visited set
//! depends only on the point set of the segment, never on endpoint order.

use crate::model::Point2;

/// Coordinates within this distance of an integer are treated as exactly on
/// the boundary. Keeps crossing arithmetic stable for the dyadic
/// coordinates produced by scaling.
const SNAP_EPS: f64 = 1e-9;

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < SNAP_EPS {
        r
    } else {
        v
    }
}

fn cell_of(x: f64, y: f64, w: usize, h: usize) -> Option<(usize, usize)> {
    let cx = snap(x).floor();
    let cy = snap(y).floor();
    if cx < 0.0 || cy < 0.0 || cx >= w as f64 || cy >= h as f64 {
        return None;
    }
    Some((cx as usize, cy as usize))
}

/// Returns the `(x, y)` cells of a `width x height` grid visited by the
/// segment `p1`-`p2`, in traversal order, without duplicates. Cells outside
/// the grid are dropped.
pub fn supercover_cells(
    p1: Point2,
    p2: Point2,
    width: usize,
    height: usize,
) -> Vec<(usize, usize)> {
    // Canonical endpoint order makes the walk reversal-invariant.
    let (a, b) = if (p2.x, p2.y) < (p1.x, p1.y) { (p2, p1) } else { (p1, p2) };
    let (x1, y1) = (snap(a.x), snap(a.y));
    let (x2, y2) = (snap(b.x), snap(b.y));
    let dx = x2 - x1;
    let dy = y2 - y1;

    // Parameter values where the cell assignment can change: the endpoints
    // plus every axis-boundary crossing.
    let mut events = vec![0.0_f64, 1.0];
    if dx != 0.0 {
        let lo = x1.min(x2).ceil() as i64;
        let hi = x1.max(x2).floor() as i64;
        for k in lo..=hi {
            events.push((k as f64 - x1) / dx);
        }
    }
    if dy != 0.0 {
        let lo = y1.min(y2).ceil() as i64;
        let hi = y1.max(y2).floor() as i64;
        for k in lo..=hi {
            events.push((k as f64 - y1) / dy);
        }
    }
    events.retain(|t| (0.0..=1.0).contains(t));
    events.sort_by(|p, q| p.partial_cmp(q).unwrap());
    events.dedup();

    let point_at = |t: f64| (x1 + t * dx, y1 + t * dy);
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut push = |cell: Option<(usize, usize)>| {
        if let Some(c) = cell {
            if out.last() != Some(&c) {
                out.push(c);
            }
        }
    };

    for (i, &t) in events.iter().enumerate() {
        // The event point itself: catches endpoint cells and corner touches.
        let (x, y) = point_at(t);
        push(cell_of(x, y, width, height));
        // The open interval up to the next event lies inside one cell;
        // sample its midpoint.
        if let Some(&t_next) = events.get(i + 1) {
            let (mx, my) = point_at(0.5 * (t + t_next));
            push(cell_of(mx, my, width, height));
        }
    }
    out
}

//! Junction likelihood/offset grid codec.
//!
//! Ground-truth junctions are encoded into a per-bin likelihood grid `J`
//! and a 2-channel sub-bin offset grid `O`; predicted grids are decoded
//! back into scored junction candidates with 8-neighborhood non-maximum
//! suppression and top-K selection.
//!
//! The offset convention is `O(b) = p - center(b)` with
//! `center(bx, by) = (bx + 0.5, by + 0.5)`, so each component lies in
//! `[-0.5, 0.5)` and decoding is `p = center(b) + O(b)`. Coordinates are in
//! bin-lattice units; with the canonical 128 x 128 bins over the 128-unit
//! space the bin size is 1 and lattice units equal grid units.

use crate::grid::{Grid2D, Grid3D};
use crate::model::{Point2, Wireframe};
use thiserror::Error;

/// Paired junction likelihood and offset grids over `H_b x W_b` bins.
///
/// `j` holds values in `[0, 1]`; `o` has shape `2 x H_b x W_b` with channel
/// 0 the x offset and channel 1 the y offset. Wherever `j` is zero in an
/// encoded map, the offset is `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionMaps {
    pub j: Grid2D,
    pub o: Grid3D,
}

impl JunctionMaps {
    /// Shape consistency check: same spatial extent, two offset channels.
    pub fn is_consistent(&self) -> bool {
        self.o.channels() == 2
            && self.o.height() == self.j.height()
            && self.o.width() == self.j.width()
    }
}

/// A decoded junction candidate: position in bin-lattice units plus its
/// likelihood score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredJunction {
    pub p: Point2,
    pub score: f64,
}

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("junction {index} at {x}, {y} falls outside the {bins_w} x {bins_h} bin grid")]
    JunctionOutsideGrid { index: usize, x: f64, y: f64, bins_w: usize, bins_h: usize },
    #[error("bins must be positive")]
    EmptyBins,
}

/// Encodes ground-truth junctions into likelihood/offset grids over
/// `(bins_h, bins_w)` bins. Junction coordinates are scaled from the
/// wireframe's coordinate space onto the bin lattice. When two junctions
/// land in one bin, the one nearest the bin center wins (ties: lowest
/// index).
pub fn encode(w: &Wireframe, bins: (usize, usize)) -> Result<JunctionMaps, CodecError> {
    let (bins_h, bins_w) = bins;
    if bins_h == 0 || bins_w == 0 {
        return Err(CodecError::EmptyBins);
    }
    let sx = bins_w as f64 / w.width;
    let sy = bins_h as f64 / w.height;

    let mut j = Grid2D::zeros(bins_h, bins_w);
    let mut o = Grid3D::zeros(2, bins_h, bins_w);
    // Distance to bin center of the junction currently occupying each bin.
    let mut occupant_dist = vec![f64::INFINITY; bins_h * bins_w];

    for (index, p) in w.junctions.iter().enumerate() {
        let x = p.x * sx;
        let y = p.y * sy;
        let bx = x.floor();
        let by = y.floor();
        if bx < 0.0 || by < 0.0 || bx >= bins_w as f64 || by >= bins_h as f64 {
            return Err(CodecError::JunctionOutsideGrid {
                index,
                x: p.x,
                y: p.y,
                bins_w,
                bins_h,
            });
        }
        let (bx, by) = (bx as usize, by as usize);
        let ox = x - (bx as f64 + 0.5);
        let oy = y - (by as f64 + 0.5);
        let d = ox * ox + oy * oy;
        let slot = by * bins_w + bx;
        if d < occupant_dist[slot] {
            occupant_dist[slot] = d;
            j.set(by, bx, 1.0);
            o.set(0, by, bx, ox);
            o.set(1, by, bx, oy);
        }
    }
    Ok(JunctionMaps { j, o })
}

/// Non-maximum suppression: a cell survives iff it equals the maximum of
/// its 8-neighborhood (truncated at the grid border). Ties survive on both
/// sides, matching a max-pool-equality implementation. The input is not
/// mutated.
pub fn nms(j: &Grid2D) -> Grid2D {
    let (h, w) = (j.height(), j.width());
    let mut out = Grid2D::zeros(h, w);
    for y in 0..h {
        for x in 0..w {
            let v = j.get(y, x);
            let mut neighborhood_max = f64::NEG_INFINITY;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let ny = y as i64 + dy;
                    let nx = x as i64 + dx;
                    if ny < 0 || nx < 0 || ny >= h as i64 || nx >= w as i64 {
                        continue;
                    }
                    neighborhood_max = neighborhood_max.max(j.get(ny as usize, nx as usize));
                }
            }
            if v >= neighborhood_max {
                out.set(y, x, v);
            }
        }
    }
    out
}

/// Decodes up to `k` junction candidates: NMS, then the highest-likelihood
/// positive bins (ties broken by row-major bin order), each reconstructed
/// as `center(b) + O(b)`. Output is sorted by score descending.
pub fn decode_topk(m: &JunctionMaps, k: usize) -> Vec<ScoredJunction> {
    let suppressed = nms(&m.j);
    let mut candidates: Vec<(f64, usize, usize)> = suppressed
        .cells()
        .filter(|&(_, _, v)| v > 0.0)
        .map(|(y, x, v)| (v, y, x))
        .collect();
    // cells() yields row-major order; stable sort keeps it for ties.
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    candidates.truncate(k);
    candidates
        .into_iter()
        .map(|(score, y, x)| ScoredJunction {
            p: Point2::new(
                x as f64 + 0.5 + m.o.get(0, y, x),
                y as f64 + 0.5 + m.o.get(1, y, x),
            ),
            score,
        })
        .collect()
}

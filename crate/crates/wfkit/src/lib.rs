//! Geometric and evaluation machinery for wireframe parsing.
//!
//! A wireframe is a graph of 2D junctions connected by straight line
//! segments. This crate covers everything around that representation that
//! does not require a trained network:
//!
//! - [`model`]: the wireframe graph itself, validation, and the JSON
//!   interchange schema
//! - [`junction_codec`]: encoding junctions into likelihood/offset grids and
//!   decoding grids back into scored junction candidates (NMS + top-K)
//! - [`sampler`]: static and dynamic line proposal sampling, including the
//!   rasterization-based hardness miner for negatives
//! - [`loi_pool`]: line-of-interest feature pooling over a dense feature map,
//!   with analytic gradients with respect to the map
//! - [`metrics_structural`]: structural AP over vectorized lines and mean AP
//!   over vectorized junctions
//! - [`metrics_heatmap`]: heat-map AP / F-score over rasterized lines
//! - [`postprocess`]: overlapped-line removal (delete / cut / retain)
//! - [`synth`]: deterministic synthetic scenes and controlled degradations
//! - [`io`]: tensor file format, wireframe JSON helpers, PR-curve CSV
//!
//! All coordinates live in a continuous `[0, width) x [0, height)` space;
//! the canonical evaluation space is 128 x 128. Everything here is pure and
//! deterministic: randomized operations take an explicit seed.

pub mod grid;
pub mod io;
pub mod junction_codec;
pub mod loi_pool;
pub mod metrics_heatmap;
pub mod metrics_structural;
pub mod model;
pub mod postprocess;
pub mod pr;
pub mod raster;
pub mod sampler;
pub mod synth;

pub use grid::{Grid2D, Grid3D};
pub use model::{Point2, ScoredLine, Wireframe};
pub use pr::PRCurve;

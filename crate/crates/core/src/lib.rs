//! Geometry toolkit: diagonal triangulation of simple polygons, inscribed
//! polygon approximation of circles, cross-section meshing of box solids,
//! and position estimation from noisy tower ranges.
//!
//! Each capability has a runnable program under `examples/`; the `trikit`
//! binary wraps them for JSON-in, JSON/CSV/SVG-out batch use.

pub mod circle;
pub mod cli;
pub mod geometry;
pub mod localization;
pub mod report;
pub mod shapes;
pub mod solid;
pub mod svg;
pub mod triangulation;

pub use geometry::{Point2, Point3, SimplePolygon, Tolerance};
pub use report::VerificationReport;

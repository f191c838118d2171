//! Inscribed regular polygons as circle approximations, and how much of the
//! disc they cover as the vertex count grows.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ring_signed_area, signed_area, GeometryError, Point2, SimplePolygon};

/// Upper bound on the vertex count searched by [`min_vertices_for_ratio`].
pub const MAX_VERTICES: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircleError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("an inscribed polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("a coverage curve needs n_max >= 4, got {0}")]
    CurveTooShort(usize),
    #[error("target ratio must lie strictly between 0 and 1, got {0}")]
    InvalidTarget(f64),
    #[error("target ratio {0} needs more than {MAX_VERTICES} vertices")]
    TargetUnreachable(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    center: Point2,
    radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self, CircleError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(CircleError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn unit() -> Self {
        Self { center: Point2::default(), radius: 1.0 }
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Regular n-gon with vertex `k` at angle `phase + 2πk/n` on the circle.
pub fn inscribed_polygon(c: &Circle, n: usize, phase: f64) -> Result<SimplePolygon, CircleError> {
    if n < 3 {
        return Err(CircleError::TooFewVertices(n));
    }
    Ok(SimplePolygon::new(inscribed_ring(c, n, phase))?)
}

fn inscribed_ring(c: &Circle, n: usize, phase: f64) -> Vec<Point2> {
    (0..n)
        .map(|k| {
            let (s, co) = (phase + TAU * k as f64 / n as f64).sin_cos();
            Point2::new(c.center.x + c.radius * co, c.center.y + c.radius * s)
        })
        .collect()
}

/// Area of any polygon relative to the disc area.
pub fn coverage_ratio_of(c: &Circle, poly: &SimplePolygon) -> f64 {
    signed_area(poly) / c.area()
}

/// Shoelace area of the inscribed regular n-gon over the disc area.
///
/// The ring is convex by construction, so the polygon validation done by
/// [`inscribed_polygon`] is skipped; the result is the same shoelace value.
pub fn coverage_ratio(c: &Circle, n: usize) -> Result<f64, CircleError> {
    if n < 3 {
        return Err(CircleError::TooFewVertices(n));
    }
    Ok(ring_signed_area(&inscribed_ring(c, n, 0.0)) / c.area())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub n: usize,
    pub ratio: f64,
    /// `ratio(n) - ratio(n - 1)`; absent for the first entry (n = 3).
    pub marginal_gain: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub entries: Vec<CoverageEntry>,
}

impl CoverageCurve {
    pub fn ratios_strictly_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1].ratio > w[0].ratio)
    }

    pub fn gains_strictly_decreasing(&self) -> bool {
        let gains: Vec<f64> = self.entries.iter().filter_map(|e| e.marginal_gain).collect();
        gains.windows(2).all(|w| w[1] < w[0])
    }

    pub fn all_below_one(&self) -> bool {
        self.entries.iter().all(|e| e.ratio > 0.0 && e.ratio < 1.0)
    }

    /// Vertex count whose addition gave the largest gain (the step `n-1 -> n`).
    pub fn argmax_gain(&self) -> Option<usize> {
        self.entries
            .iter()
            .filter_map(|e| e.marginal_gain.map(|g| (e.n, g)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(n, _)| n)
    }

    /// `n,ratio,gain` rows with a header; the first gain cell is empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio,gain\n");
        for e in &self.entries {
            let gain = e.marginal_gain.map(|g| format!("{g:.17}")).unwrap_or_default();
            out.push_str(&format!("{},{:.17},{}\n", e.n, e.ratio, gain));
        }
        out
    }
}

pub fn marginal_gain_curve(c: &Circle, n_max: usize) -> Result<CoverageCurve, CircleError> {
    if n_max < 4 {
        return Err(CircleError::CurveTooShort(n_max));
    }
    let ratios = (3..=n_max).into_par_iter().map(|n| coverage_ratio(c, n)).collect::<Result<Vec<_>, _>>()?;
    let entries = ratios
        .iter()
        .enumerate()
        .map(|(k, &ratio)| CoverageEntry {
            n: k + 3,
            ratio,
            marginal_gain: k.checked_sub(1).map(|j| ratio - ratios[j]),
        })
        .collect();
    Ok(CoverageCurve { entries })
}

/// Smallest n with `coverage_ratio(n) >= target`.
///
/// The ratio is monotone in n, so the search doubles an upper bound and then
/// bisects, evaluating O(log n) polygons.
pub fn min_vertices_for_ratio(c: &Circle, target: f64) -> Result<usize, CircleError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(CircleError::InvalidTarget(target));
    }
    let reaches = |n: usize| coverage_ratio(c, n).map(|r| r >= target);
    if reaches(3)? {
        return Ok(3);
    }
    let (mut lo, mut hi) = (3, 4);
    while !reaches(hi)? {
        lo = hi;
        hi *= 2;
        if hi > MAX_VERTICES {
            return Err(CircleError::TargetUnreachable(target));
        }
    }
    // invariant: ratio(lo) < target <= ratio(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

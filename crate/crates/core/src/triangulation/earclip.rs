use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Method, Triangulation, TriangulationError};
use crate::geometry::{
    orientation, point_in_triangle, Containment, Orientation, Point2, SimplePolygon, Tolerance, Triangle2,
};

/// Indices of the ears of a polygon, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarReport {
    pub ear_indices: Vec<usize>,
}

impl EarReport {
    pub fn len(&self) -> usize {
        self.ear_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ear_indices.is_empty()
    }
}

/// Convex turn at `cur` and no other candidate vertex inside or on the
/// triangle `(prev, cur, next)`.
fn ear_test(
    v: &[Point2],
    prev: usize,
    cur: usize,
    next: usize,
    others: impl Iterator<Item = usize>,
    tol: Tolerance,
) -> bool {
    if orientation(v[prev], v[cur], v[next], tol) != Orientation::CounterClockwise {
        return false;
    }
    let t = Triangle2 { a: v[prev], b: v[cur], c: v[next] };
    others
        .filter(|&k| k != prev && k != cur && k != next)
        .all(|k| point_in_triangle(v[k], &t, tol) == Containment::Outside)
}

pub fn is_ear(poly: &SimplePolygon, i: usize, tol: Tolerance) -> bool {
    ear_test(poly.vertices(), poly.prev(i), i, poly.next(i), 0..poly.len(), tol)
}

pub fn find_ears(poly: &SimplePolygon) -> EarReport {
    let tol = poly.tolerance();
    EarReport { ear_indices: (0..poly.len()).filter(|&i| is_ear(poly, i, tol)).collect() }
}

/// Doubly linked ring over the original vertex indices.
struct Ring {
    prev: Vec<usize>,
    next: Vec<usize>,
    head: usize,
    len: usize,
}

impl Ring {
    fn new(n: usize) -> Self {
        Self {
            prev: (0..n).map(|i| (i + n - 1) % n).collect(),
            next: (0..n).map(|i| (i + 1) % n).collect(),
            head: 0,
            len: n,
        }
    }

    fn unlink(&mut self, i: usize) {
        let (p, q) = (self.prev[i], self.next[i]);
        self.next[p] = q;
        self.prev[q] = p;
        if self.head == i {
            self.head = q;
        }
        self.len -= 1;
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head;
        (0..self.len).map(move |_| {
            let v = cur;
            cur = self.next[cur];
            v
        })
    }

    fn is_ear(&self, v: &[Point2], i: usize, tol: Tolerance) -> bool {
        ear_test(v, self.prev[i], i, self.next[i], self.iter(), tol)
    }
}

/// Ear clipping in O(n²): repeatedly removes the lowest-index ear of the
/// shrinking ring until one triangle remains.
pub fn triangulate_earclip(poly: &SimplePolygon) -> Result<Triangulation, TriangulationError> {
    let v = poly.vertices();
    let tol = poly.tolerance();
    let mut ring = Ring::new(v.len());
    let mut ears: BTreeSet<usize> = (0..v.len()).filter(|&i| ring.is_ear(v, i, tol)).collect();
    let mut triangles = Vec::with_capacity(v.len() - 2);

    while ring.len > 3 {
        let i = match ears.first() {
            Some(&i) => i,
            None => {
                // clipping can unblock non-neighbours; rescan before giving up
                ears = ring.iter().filter(|&i| ring.is_ear(v, i, tol)).collect();
                *ears.first().ok_or(TriangulationError::NoEar { remaining: ring.len })?
            }
        };
        let (p, q) = (ring.prev[i], ring.next[i]);
        triangles.push([p, i, q]);
        ring.unlink(i);
        ears.remove(&i);
        for w in [p, q] {
            if ring.is_ear(v, w, tol) {
                ears.insert(w);
            } else {
                ears.remove(&w);
            }
        }
    }
    let h = ring.head;
    triangles.push([ring.prev[h], h, ring.next[h]]);
    Ok(Triangulation::from_triangles(poly.clone(), triangles, Method::EarClip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::verify_triangulation;

    fn poly(coords: &[(f64, f64)]) -> SimplePolygon {
        SimplePolygon::new(coords.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn l_shape() -> SimplePolygon {
        poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)])
    }

    #[test]
    fn square_vertices_are_all_ears() {
        let sq = poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        for i in 0..4 {
            assert!(is_ear(&sq, i, sq.tolerance()));
        }
    }

    #[test]
    fn reflex_corner_of_l_is_not_an_ear() {
        let l = l_shape();
        let tol = l.tolerance();
        assert_eq!(orientation(l.vertex(2), l.vertex(3), l.vertex(4), tol), Orientation::Clockwise);
        assert!(!is_ear(&l, 3, tol));
        assert_eq!(find_ears(&l).ear_indices, vec![1, 2, 4, 5]);
    }

    #[test]
    fn spike_tip_blocks_comb_ear() {
        // tooth tip (2,1) sits inside the triangle of vertex 0's neighbours
        let comb = poly(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (3.0, 4.0), (2.0, 1.0), (1.0, 4.0), (-2.0, 4.0)]);
        let tol = comb.tolerance();
        let t = Triangle2 { a: comb.vertex(6), b: comb.vertex(0), c: comb.vertex(1) };
        assert_eq!(point_in_triangle(comb.vertex(4), &t, tol), Containment::Inside);
        assert!(!is_ear(&comb, 0, tol));
    }

    #[test]
    fn small_polygons() {
        let tri = poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(find_ears(&tri).ear_indices, vec![0, 1, 2]);
        let t = triangulate_earclip(&tri).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 2]]);
        assert!(t.diagonals().is_empty());

        let rect = poly(&[(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 1.0)]);
        let t = triangulate_earclip(&rect).unwrap();
        assert_eq!(t.triangles().len(), 2);
        assert_eq!(t.diagonals().len(), 1);
    }

    #[test]
    fn l_shape_triangulation_verifies() {
        let l = l_shape();
        let t = triangulate_earclip(&l).unwrap();
        assert_eq!(t.triangles(), &[[0, 1, 2], [0, 2, 3], [0, 3, 5], [3, 4, 5]]);
        assert!(verify_triangulation(&l, &t).all_passed());
    }
}

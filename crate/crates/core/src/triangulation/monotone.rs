//! O(n log n) triangulation: a sweep from top to bottom inserts diagonals
//! that split the polygon into y-monotone pieces, and each piece is then
//! triangulated with the classic two-chain stack walk.
//!
//! "Above" is lexicographic on (larger y, smaller x, smaller index), which
//! acts as an infinitesimal rotation so no two vertices share a sweep
//! position.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::{Method, Triangulation, TriangulationError};
use crate::geometry::{orientation, Orientation, Point2, SimplePolygon, Tolerance};

fn compare_above(v: &[Point2], a: usize, b: usize) -> Ordering {
    v[b].y.total_cmp(&v[a].y).then(v[a].x.total_cmp(&v[b].x)).then(a.cmp(&b))
}

fn above(v: &[Point2], a: usize, b: usize) -> bool {
    compare_above(v, a, b) == Ordering::Less
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VertexKind {
    Start,
    Split,
    End,
    Merge,
    Regular,
}

fn classify(v: &[Point2], i: usize) -> VertexKind {
    let n = v.len();
    let (p, q) = ((i + n - 1) % n, (i + 1) % n);
    let convex = (v[i] - v[p]).cross(v[q] - v[i]) > 0.0;
    match (above(v, i, p), above(v, i, q), convex) {
        (true, true, true) => VertexKind::Start,
        (true, true, false) => VertexKind::Split,
        (false, false, true) => VertexKind::End,
        (false, false, false) => VertexKind::Merge,
        _ => VertexKind::Regular,
    }
}

/// Edges crossing the sweep line with the interior to their right,
/// ordered left to right. Edge `e` runs from vertex `e` to `e + 1`.
struct Status<'a> {
    v: &'a [Point2],
    edges: Vec<usize>,
    helper: Vec<usize>,
}

impl<'a> Status<'a> {
    fn x_at(&self, e: usize, y: f64) -> f64 {
        let (a, b) = (self.v[e], self.v[(e + 1) % self.v.len()]);
        if y == b.y {
            b.x
        } else if y == a.y {
            a.x
        } else {
            a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x)
        }
    }

    fn insert(&mut self, e: usize, at: Point2) {
        let pos = self.edges.partition_point(|&f| self.x_at(f, at.y) < at.x);
        self.edges.insert(pos, e);
        self.helper[e] = e;
    }

    fn remove(&mut self, e: usize, at: Point2) {
        let guess = self.edges.partition_point(|&f| self.x_at(f, at.y) < at.x);
        let pos = (guess.saturating_sub(1)..self.edges.len().min(guess + 2))
            .find(|&k| self.edges[k] == e)
            .or_else(|| self.edges.iter().position(|&f| f == e))
            .expect("edge present in sweep status");
        self.edges.remove(pos);
    }

    /// Edge immediately to the left of `p`.
    fn left_of(&self, p: Point2) -> Option<usize> {
        let pos = self.edges.partition_point(|&f| self.x_at(f, p.y) < p.x);
        pos.checked_sub(1).map(|k| self.edges[k])
    }
}

/// Diagonals that cut the polygon into y-monotone pieces.
fn monotone_diagonals(v: &[Point2]) -> Result<Vec<(usize, usize)>, TriangulationError> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| compare_above(v, a, b));
    let kinds: Vec<VertexKind> = (0..n).map(|i| classify(v, i)).collect();
    let mut status = Status { v, edges: Vec::new(), helper: vec![usize::MAX; n] };
    let mut diagonals = Vec::new();
    let missing = |i: usize| TriangulationError::MonotoneFailure(format!("no edge left of vertex {i}"));

    for &i in &order {
        let prev_edge = (i + n - 1) % n;
        let p = v[i];
        match kinds[i] {
            VertexKind::Start => status.insert(i, p),
            VertexKind::End => {
                let h = status.helper[prev_edge];
                if kinds[h] == VertexKind::Merge {
                    diagonals.push((i, h));
                }
                status.remove(prev_edge, p);
            }
            VertexKind::Split => {
                let e = status.left_of(p).ok_or_else(|| missing(i))?;
                diagonals.push((i, status.helper[e]));
                status.helper[e] = i;
                status.insert(i, p);
            }
            VertexKind::Merge => {
                let h = status.helper[prev_edge];
                if kinds[h] == VertexKind::Merge {
                    diagonals.push((i, h));
                }
                status.remove(prev_edge, p);
                let e = status.left_of(p).ok_or_else(|| missing(i))?;
                if kinds[status.helper[e]] == VertexKind::Merge {
                    diagonals.push((i, status.helper[e]));
                }
                status.helper[e] = i;
            }
            VertexKind::Regular => {
                if above(v, prev_edge, i) {
                    // boundary descends here: interior lies to the right
                    let h = status.helper[prev_edge];
                    if kinds[h] == VertexKind::Merge {
                        diagonals.push((i, h));
                    }
                    status.remove(prev_edge, p);
                    status.insert(i, p);
                } else {
                    let e = status.left_of(p).ok_or_else(|| missing(i))?;
                    if kinds[status.helper[e]] == VertexKind::Merge {
                        diagonals.push((i, status.helper[e]));
                    }
                    status.helper[e] = i;
                }
            }
        }
    }
    Ok(diagonals)
}

/// Traces the bounded faces of the polygon plus diagonals, each as a
/// counterclockwise index ring.
fn faces(v: &[Point2], diagonals: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let n = v.len();
    let mut adj: Vec<Vec<usize>> = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
    for &(a, b) in diagonals {
        adj[a].push(b);
        adj[b].push(a);
    }
    for (i, nbrs) in adj.iter_mut().enumerate() {
        nbrs.sort_by(|&a, &b| {
            let (da, db) = (v[a] - v[i], v[b] - v[i]);
            da.y.atan2(da.x).total_cmp(&db.y.atan2(db.x))
        });
        nbrs.dedup();
    }
    // next half-edge after u->w: the neighbour of w just clockwise of u
    let turn = |u: usize, w: usize| {
        let nbrs = &adj[w];
        let k = nbrs.iter().position(|&x| x == u).expect("symmetric adjacency");
        nbrs[(k + nbrs.len() - 1) % nbrs.len()]
    };
    let starts = (0..n).map(|i| (i, (i + 1) % n)).chain(diagonals.iter().flat_map(|&(a, b)| [(a, b), (b, a)]));
    let mut used = HashSet::new();
    let mut out = Vec::new();
    for (a, b) in starts {
        if used.contains(&(a, b)) {
            continue;
        }
        let mut face = Vec::new();
        let (mut u, mut w) = (a, b);
        while used.insert((u, w)) {
            face.push(u);
            let next = turn(u, w);
            u = w;
            w = next;
        }
        out.push(face);
    }
    out
}

/// Stack walk over one y-monotone piece given as a CCW ring.
fn triangulate_piece(
    v: &[Point2],
    piece: &[usize],
    tol: Tolerance,
    out: &mut Vec<[usize; 3]>,
) -> Result<(), TriangulationError> {
    let k = piece.len();
    if k == 3 {
        out.push([piece[0], piece[1], piece[2]]);
        return Ok(());
    }
    let top = (0..k).min_by(|&a, &b| compare_above(v, piece[a], piece[b])).expect("non-empty piece");
    let bottom = (0..k).max_by(|&a, &b| compare_above(v, piece[a], piece[b])).expect("non-empty piece");
    // walking forward (CCW) from the top descends the left chain
    let mut on_left = vec![false; v.len()];
    let mut pos = top;
    while pos != bottom {
        on_left[piece[pos]] = true;
        pos = (pos + 1) % k;
    }

    let mut sorted = piece.to_vec();
    sorted.sort_by(|&a, &b| compare_above(v, a, b));
    let mut stack = vec![sorted[0], sorted[1]];
    for j in 2..k - 1 {
        let u = sorted[j];
        let top_of_stack = *stack.last().expect("stack holds two vertices");
        if on_left[u] != on_left[top_of_stack] {
            out.extend(stack.windows(2).map(|w| [u, w[0], w[1]]));
            stack = vec![sorted[j - 1], u];
        } else {
            let mut last = stack.pop().expect("stack holds two vertices");
            while let Some(&t) = stack.last() {
                let visible = if on_left[u] {
                    orientation(v[t], v[last], v[u], tol) == Orientation::CounterClockwise
                } else {
                    orientation(v[u], v[last], v[t], tol) == Orientation::CounterClockwise
                };
                if !visible {
                    break;
                }
                out.push([u, last, t]);
                last = stack.pop().expect("checked non-empty");
            }
            stack.push(last);
            stack.push(u);
        }
    }
    let u = sorted[k - 1];
    out.extend(stack.windows(2).map(|w| [u, w[0], w[1]]));
    Ok(())
}

pub fn triangulate_monotone(poly: &SimplePolygon) -> Result<Triangulation, TriangulationError> {
    let v = poly.vertices();
    let n = v.len();
    let diagonals = monotone_diagonals(v)?;
    let pieces = faces(v, &diagonals);
    if pieces.len() != diagonals.len() + 1 {
        return Err(TriangulationError::MonotoneFailure(format!(
            "{} diagonals produced {} pieces",
            diagonals.len(),
            pieces.len()
        )));
    }
    let mut triangles = Vec::with_capacity(n - 2);
    for piece in &pieces {
        triangulate_piece(v, piece, poly.tolerance(), &mut triangles)?;
    }
    if triangles.len() != n - 2 {
        return Err(TriangulationError::MonotoneFailure(format!(
            "produced {} triangles for {} vertices",
            triangles.len(),
            n
        )));
    }
    Ok(Triangulation::from_triangles(poly.clone(), triangles, Method::Monotone))
}

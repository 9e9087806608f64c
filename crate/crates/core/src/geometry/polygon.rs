//! Planar polygon with holes. Free space is the closed region bounded by the
//! outer ring minus the open interiors of the holes.

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonWithHoles {
    outer: Vec<Vec2>,
    holes: Vec<Vec<Vec2>>,
    edges: Vec<(Vec2, Vec2)>,
}

fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn signed_area(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| cross(ring[i], ring[(i + 1) % n]))
        .sum::<f64>()
        / 2.0
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if len2 == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    };
    let dx = ap[0] - s * ab[0];
    let dy = ap[1] - s * ab[1];
    (dx * dx + dy * dy).sqrt()
}

impl PolygonWithHoles {
    /// Builds the polygon, normalising ring orientation (outer
    /// counter-clockwise, holes clockwise) and dropping a repeated closing
    /// vertex if present.
    pub fn new(outer: Vec<Vec2>, holes: Vec<Vec<Vec2>>) -> Result<Self> {
        let outer = normalize_ring(outer, true)?;
        let holes = holes
            .into_iter()
            .map(|h| normalize_ring(h, false))
            .collect::<Result<Vec<_>>>()?;
        let mut poly = PolygonWithHoles {
            outer,
            holes,
            edges: Vec::new(),
        };
        poly.rebuild_edges();
        for (k, hole) in poly.holes.iter().enumerate() {
            if !point_in_ring(hole[0], &poly.outer) {
                return Err(Error::usage(format!(
                    "hole {k} is not inside the outer ring"
                )));
            }
        }
        Ok(poly)
    }

    fn rebuild_edges(&mut self) {
        self.edges.clear();
        for ring in std::iter::once(&self.outer).chain(self.holes.iter()) {
            let n = ring.len();
            for i in 0..n {
                self.edges.push((ring[i], ring[(i + 1) % n]));
            }
        }
    }

    pub fn outer(&self) -> &[Vec2] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Vec2>] {
        &self.holes
    }

    pub fn edges(&self) -> &[(Vec2, Vec2)] {
        &self.edges
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.outer).abs()
            - self.holes.iter().map(|h| signed_area(h).abs()).sum::<f64>()
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.outer {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Largest distance between two outer vertices.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.outer.iter().enumerate() {
            for b in &self.outer[i + 1..] {
                let d = sub(*a, *b);
                best = best.max((d[0] * d[0] + d[1] * d[1]).sqrt());
            }
        }
        best
    }

    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed membership: points within `tol` of any edge count as inside.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let mut inside = false;
        for &(a, b) in &self.edges {
            if segment_distance(p, a, b) <= tol {
                return true;
            }
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Line parameters at which `origin + t * dir` meets the boundary,
    /// sorted ascending with near-duplicates merged.
    pub fn line_crossings(&self, origin: Vec2, dir: Vec2) -> Vec<f64> {
        let mut ts = Vec::with_capacity(16);
        for &(p, q) in &self.edges {
            let e = sub(q, p);
            let w = sub(p, origin);
            let denom = cross(dir, e);
            let elen = (e[0] * e[0] + e[1] * e[1]).sqrt();
            if denom.abs() <= 1e-12 * elen {
                // Parallel: only a collinear edge contributes, via its endpoints.
                if cross(w, dir).abs() <= 1e-12 * elen.max(1.0) {
                    ts.push(w[0] * dir[0] + w[1] * dir[1]);
                    let wq = sub(q, origin);
                    ts.push(wq[0] * dir[0] + wq[1] * dir[1]);
                }
                continue;
            }
            let s = cross(w, dir) / denom;
            if (-1e-12..=1.0 + 1e-12).contains(&s) {
                ts.push(cross(w, e) / denom);
            }
        }
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        ts
    }

    /// Maximal interval `[t_minus, t_plus]` (with `t_minus <= 0 <= t_plus`)
    /// of the line `origin + t * dir` that stays in the free space and
    /// contains `origin`. Intervals touching at a tangency point are merged.
    pub fn chord_params(&self, origin: Vec2, dir: Vec2, tol: f64) -> (f64, f64) {
        let ts = self.line_crossings(origin, dir);
        let at = |t: f64| [origin[0] + t * dir[0], origin[1] + t * dir[1]];
        let walk = |iter: &mut dyn Iterator<Item = f64>| {
            let mut prev = 0.0;
            for t in iter {
                if !self.contains(at(0.5 * (prev + t)), tol) {
                    break;
                }
                prev = t;
            }
            prev
        };
        let t_plus = walk(&mut ts.iter().copied().filter(|&t| t > 0.0));
        let t_minus = walk(&mut ts.iter().rev().copied().filter(|&t| t < 0.0));
        (t_minus, t_plus)
    }
}

fn normalize_ring(mut ring: Vec<Vec2>, ccw: bool) -> Result<Vec<Vec2>> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    if ring.len() < 3 {
        return Err(Error::usage("polygon ring needs at least three vertices"));
    }
    if ring.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
        return Err(Error::usage("polygon ring has non-finite coordinates"));
    }
    let area = signed_area(&ring);
    if area == 0.0 {
        return Err(Error::usage("polygon ring has zero area"));
    }
    if (area > 0.0) != ccw {
        ring.reverse();
    }
    Ok(ring)
}

fn point_in_ring(p: Vec2, ring: &[Vec2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_with_hole() -> PolygonWithHoles {
        PolygonWithHoles::new(
            vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0]],
            vec![vec![[1.0, 1.0], [3.0, 1.0], [3.0, 3.0], [1.0, 3.0]]],
        )
        .unwrap()
    }

    #[test]
    fn orientation_is_normalized() {
        let p = square_with_hole();
        assert!(signed_area(p.outer()) > 0.0);
        assert!(signed_area(&p.holes()[0]) < 0.0);
        assert!((p.area() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn membership_respects_holes_and_boundary() {
        let p = square_with_hole();
        assert!(p.contains([0.5, 0.5], 1e-9));
        assert!(!p.contains([2.0, 2.0], 1e-9));
        assert!(p.contains([1.0, 2.0], 1e-9));
        assert!(p.contains([4.0, 2.0], 1e-9));
        assert!(!p.contains([4.1, 2.0], 1e-9));
    }

    #[test]
    fn chord_stops_at_hole() {
        let p = square_with_hole();
        let (tm, tp) = p.chord_params([0.5, 2.0], [1.0, 0.0], 1e-9);
        assert!((tm + 0.5).abs() < 1e-12);
        assert!((tp - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chord_along_edge_and_through_vertex() {
        let p = square_with_hole();
        // Runs along the hole's bottom edge: boundary counts as free.
        let (tm, tp) = p.chord_params([2.0, 1.0], [1.0, 0.0], 1e-9);
        assert!((tm + 2.0).abs() < 1e-12 && (tp - 2.0).abs() < 1e-12);
        // y = x + 2 touches the hole only at its corner (1,3).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (tm, tp) = p.chord_params([0.5, 2.5], [s, s], 1e-9);
        assert!((tm + 0.5 / s).abs() < 1e-9);
        assert!((tp - 1.5 / s).abs() < 1e-9, "tp={tp}");
    }

    #[test]
    fn rejects_degenerate_rings() {
        assert!(PolygonWithHoles::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![]).is_err());
        assert!(PolygonWithHoles::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], vec![]).is_err());
        assert!(PolygonWithHoles::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]],
            vec![vec![[5.0, 5.0], [6.0, 5.0], [6.0, 6.0]]]
        )
        .is_err());
    }
}

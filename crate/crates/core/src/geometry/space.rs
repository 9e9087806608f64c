use std::fmt;
use std::sync::Arc;

use super::point::{dist, norm, Point};
use super::polygon::PolygonWithHoles;
use crate::error::{Error, Result};
use crate::volume::unit_ball_volume;

/// Boundary tolerance for exact polygon and analytic predicates.
pub const GEOMETRY_TOLERANCE: f64 = 1e-9;
/// Bisection tolerance for chords of implicit regions.
pub const IMPLICIT_TOLERANCE: f64 = 1e-6;
/// Number of interior samples used by `sees` on implicit regions.
pub const IMPLICIT_VISIBILITY_SAMPLES: usize = 1000;

type Membership = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A free space known only through a membership function and a bounding box.
#[derive(Clone)]
pub struct ImplicitRegion {
    lo: Vec<f64>,
    hi: Vec<f64>,
    membership: Arc<Membership>,
    march_steps: usize,
}

impl ImplicitRegion {
    pub fn new(
        lo: Vec<f64>,
        hi: Vec<f64>,
        membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        check_box(&lo, &hi)?;
        Ok(ImplicitRegion {
            lo,
            hi,
            membership: Arc::new(membership),
            march_steps: 2000,
        })
    }

    /// Number of bracketing steps across the bounding-box diagonal used when
    /// searching for a chord endpoint.
    pub fn with_march_steps(mut self, steps: usize) -> Self {
        self.march_steps = steps.max(1);
        self
    }
}

impl fmt::Debug for ImplicitRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitRegion")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("march_steps", &self.march_steps)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Shape {
    Polygon(PolygonWithHoles),
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Ball minus a concentric ball: an annulus in the plane.
    Shell {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
    Implicit(ImplicitRegion),
}

/// The maximal connected interval of a line inside the free space through a
/// query point. `a` is reached by moving along `-direction`, `b` along
/// `+direction`; `t_minus <= 0 <= t_plus` are their line parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Chord {
    pub origin: Point,
    pub direction: Vec<f64>,
    pub t_minus: f64,
    pub t_plus: f64,
    pub a: Point,
    pub b: Point,
}

impl Chord {
    fn new(origin: &Point, direction: &[f64], t_minus: f64, t_plus: f64) -> Chord {
        Chord {
            a: origin.offset(direction, t_minus),
            b: origin.offset(direction, t_plus),
            origin: origin.clone(),
            direction: direction.to_vec(),
            t_minus,
            t_plus,
        }
    }

    pub fn len(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    pub fn is_degenerate(&self) -> bool {
        self.len() <= 0.0
    }

    pub fn at(&self, t: f64) -> Point {
        self.origin.offset(&self.direction, t)
    }

    /// The same interval seen with the direction reversed.
    pub fn reversed(&self) -> Chord {
        Chord {
            origin: self.origin.clone(),
            direction: self.direction.iter().map(|d| -d).collect(),
            t_minus: -self.t_plus,
            t_plus: -self.t_minus,
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

/// A bounded, connected region of R^n answering membership and chord
/// queries. Immutable after construction and cheap to clone.
#[derive(Debug, Clone)]
pub struct FreeSpace {
    shape: Shape,
    tolerance: f64,
    name: String,
}

impl FreeSpace {
    pub fn polygon(poly: PolygonWithHoles) -> Self {
        FreeSpace {
            shape: Shape::Polygon(poly),
            tolerance: GEOMETRY_TOLERANCE,
            name: "polygon".into(),
        }
    }

    pub fn aabb(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_box(&lo, &hi)?;
        Ok(FreeSpace {
            shape: Shape::Box { lo, hi },
            tolerance: GEOMETRY_TOLERANCE,
            name: "box".into(),
        })
    }

    pub fn unit_box(n: usize) -> Self {
        FreeSpace::aabb(vec![0.0; n], vec![1.0; n]).expect("valid unit box")
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::usage("dimension must be at least 2"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::usage("ball radius must be positive"));
        }
        Ok(FreeSpace {
            shape: Shape::Ball { center, radius },
            tolerance: GEOMETRY_TOLERANCE,
            name: "ball".into(),
        })
    }

    pub fn unit_ball(n: usize) -> Self {
        FreeSpace::ball(vec![0.0; n], 1.0).expect("valid unit ball")
    }

    pub fn shell(center: Vec<f64>, inner: f64, outer: f64) -> Result<Self> {
        if center.len() < 2 {
            return Err(Error::usage("dimension must be at least 2"));
        }
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::usage("shell radii must satisfy 0 < inner < outer"));
        }
        Ok(FreeSpace {
            shape: Shape::Shell {
                center,
                inner,
                outer,
            },
            tolerance: GEOMETRY_TOLERANCE,
            name: "annulus".into(),
        })
    }

    pub fn implicit(region: ImplicitRegion) -> Self {
        FreeSpace {
            shape: Shape::Implicit(region),
            tolerance: IMPLICIT_TOLERANCE,
            name: "implicit".into(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn as_polygon(&self) -> Option<&PolygonWithHoles> {
        match &self.shape {
            Shape::Polygon(p) => Some(p),
            _ => None,
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            Shape::Polygon(_) => 2,
            Shape::Box { lo, .. } => lo.len(),
            Shape::Ball { center, .. } | Shape::Shell { center, .. } => center.len(),
            Shape::Implicit(r) => r.lo.len(),
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self.shape, Shape::Box { .. } | Shape::Ball { .. })
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Polygon(p) => {
                let (lo, hi) = p.bounding_box();
                (lo.to_vec(), hi.to_vec())
            }
            Shape::Box { lo, hi } => (lo.clone(), hi.clone()),
            Shape::Ball { center, radius } => ball_box(center, *radius),
            Shape::Shell { center, outer, .. } => ball_box(center, *outer),
            Shape::Implicit(r) => (r.lo.clone(), r.hi.clone()),
        }
    }

    /// Membership with the boundary counted as inside.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.check_dim(self.dimension())?;
        Ok(self.contains_unchecked(p.coords()))
    }

    pub(crate) fn contains_unchecked(&self, x: &[f64]) -> bool {
        let tol = self.tolerance;
        match &self.shape {
            Shape::Polygon(poly) => poly.contains([x[0], x[1]], tol),
            Shape::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            Shape::Ball { center, radius } => dist(x, center) <= radius + tol,
            Shape::Shell {
                center,
                inner,
                outer,
            } => {
                let r = dist(x, center);
                r >= inner - tol && r <= outer + tol
            }
            Shape::Implicit(region) => (region.membership)(x),
        }
    }

    /// Maximal connected interval of the line through `u` along `dir` that
    /// lies in the free space. A point on the boundary looking outwards gets
    /// a degenerate chord.
    pub fn chord(&self, u: &Point, dir: &[f64]) -> Result<Chord> {
        let n = self.dimension();
        u.check_dim(n)?;
        if dir.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: dir.len(),
            });
        }
        let dn = norm(dir);
        if (dn - 1.0).abs() > 1e-9 {
            return Err(Error::usage(format!(
                "direction must be a unit vector (norm {dn})"
            )));
        }
        if !self.contains_unchecked(u.coords()) {
            return Err(Error::precondition(
                "chord query point is outside the free space",
            ));
        }
        let (tm, tp) = self.chord_params(u.coords(), dir);
        Ok(Chord::new(u, dir, tm, tp))
    }

    /// Chord parameters without validation; `u` must be a member.
    pub(crate) fn chord_params(&self, u: &[f64], dir: &[f64]) -> (f64, f64) {
        match &self.shape {
            Shape::Polygon(poly) => {
                poly.chord_params([u[0], u[1]], [dir[0], dir[1]], self.tolerance)
            }
            Shape::Box { lo, hi } => {
                let mut tm = f64::NEG_INFINITY;
                let mut tp = f64::INFINITY;
                for k in 0..u.len() {
                    if dir[k] == 0.0 {
                        continue;
                    }
                    let t1 = (lo[k] - u[k]) / dir[k];
                    let t2 = (hi[k] - u[k]) / dir[k];
                    let (s1, s2) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
                    tm = tm.max(s1);
                    tp = tp.min(s2);
                }
                (tm.min(0.0), tp.max(0.0))
            }
            Shape::Ball { center, radius } => sphere_roots(u, dir, center, *radius)
                .map_or((0.0, 0.0), |(a, b)| (a.min(0.0), b.max(0.0))),
            Shape::Shell {
                center,
                inner,
                outer,
            } => {
                let (mut tm, mut tp) = sphere_roots(u, dir, center, *outer)
                    .map_or((0.0, 0.0), |(a, b)| (a.min(0.0), b.max(0.0)));
                if let Some((s1, s2)) = sphere_roots(u, dir, center, *inner) {
                    // Tangent lines only touch the hole; keep the longer interval.
                    if s2 - s1 > 1e-12 {
                        if s1 >= 0.0 {
                            tp = tp.min(s1);
                        } else if s2 <= 0.0 {
                            tm = tm.max(s2);
                        }
                    }
                }
                (tm, tp)
            }
            Shape::Implicit(region) => {
                let step = dist(&region.lo, &region.hi) / region.march_steps as f64;
                let tp = self.implicit_extent(u, dir, step, 1.0);
                let tm = -self.implicit_extent(u, dir, step, -1.0);
                (tm, tp)
            }
        }
    }

    fn implicit_extent(&self, u: &[f64], dir: &[f64], step: f64, sign: f64) -> f64 {
        let at =
            |t: f64| -> Vec<f64> { u.iter().zip(dir).map(|(p, d)| p + sign * t * d).collect() };
        let (lo, hi) = self.bounding_box();
        let limit = dist(&lo, &hi);
        let mut inside = 0.0;
        let mut t = step;
        while t <= limit + step {
            if !self.contains_unchecked(&at(t)) {
                let mut outside = t;
                while outside - inside > IMPLICIT_TOLERANCE {
                    let mid = 0.5 * (inside + outside);
                    if self.contains_unchecked(&at(mid)) {
                        inside = mid;
                    } else {
                        outside = mid;
                    }
                }
                return inside;
            }
            inside = t;
            t += step;
        }
        inside
    }

    /// True iff the closed segment `[u, v]` lies in the free space.
    pub fn sees(&self, u: &Point, v: &Point) -> Result<bool> {
        let n = self.dimension();
        u.check_dim(n)?;
        v.check_dim(n)?;
        Ok(self.sees_unchecked(u.coords(), v.coords()))
    }

    pub(crate) fn sees_unchecked(&self, u: &[f64], v: &[f64]) -> bool {
        if !self.contains_unchecked(u) || !self.contains_unchecked(v) {
            return false;
        }
        let len = dist(u, v);
        if len == 0.0 {
            return true;
        }
        match &self.shape {
            Shape::Box { .. } | Shape::Ball { .. } => true,
            Shape::Polygon(_) | Shape::Shell { .. } => {
                let dir: Vec<f64> = u.iter().zip(v).map(|(a, b)| (b - a) / len).collect();
                let (_, tp) = self.chord_params(u, &dir);
                tp >= len - self.tolerance
            }
            Shape::Implicit(_) => {
                let k = IMPLICIT_VISIBILITY_SAMPLES;
                (1..=k).all(|i| {
                    let s = i as f64 / (k + 1) as f64;
                    let p: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + s * (b - a)).collect();
                    self.contains_unchecked(&p)
                })
            }
        }
    }

    /// Diameter of the free space. Exact for analytic shapes and polygons;
    /// the bounding-box diagonal (an upper bound) for implicit regions.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Polygon(p) => p.diameter(),
            Shape::Box { lo, hi } => dist(lo, hi),
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Shell { outer, .. } => 2.0 * outer,
            Shape::Implicit(r) => dist(&r.lo, &r.hi),
        }
    }

    /// Volume (area in 2D), when known in closed form.
    pub fn volume(&self) -> Option<f64> {
        let n = self.dimension();
        match &self.shape {
            Shape::Polygon(p) => Some(p.area()),
            Shape::Box { lo, hi } => Some(lo.iter().zip(hi).map(|(l, h)| h - l).product()),
            Shape::Ball { radius, .. } => Some(unit_ball_volume(n) * radius.powi(n as i32)),
            Shape::Shell { inner, outer, .. } => {
                Some(unit_ball_volume(n) * (outer.powi(n as i32) - inner.powi(n as i32)))
            }
            Shape::Implicit(_) => None,
        }
    }

    /// Euclidean distance from a member point to the boundary.
    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        p.check_dim(self.dimension())?;
        let x = p.coords();
        Ok(match &self.shape {
            Shape::Polygon(poly) => poly.boundary_distance([x[0], x[1]]),
            Shape::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (l, h))| (v - l).min(h - v))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Shape::Ball { center, radius } => (radius - dist(x, center)).max(0.0),
            Shape::Shell {
                center,
                inner,
                outer,
            } => {
                let r = dist(x, center);
                (r - inner).min(outer - r).max(0.0)
            }
            Shape::Implicit(_) => {
                return Err(Error::domain(
                    "boundary distance is not available for implicit regions",
                ))
            }
        })
    }
}

fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch {
            expected: lo.len(),
            got: hi.len(),
        });
    }
    if lo.len() < 2 {
        return Err(Error::usage("dimension must be at least 2"));
    }
    if lo
        .iter()
        .zip(hi)
        .any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite())
    {
        return Err(Error::usage("box bounds must be finite with lo < hi"));
    }
    Ok(())
}

fn ball_box(center: &[f64], r: f64) -> (Vec<f64>, Vec<f64>) {
    (
        center.iter().map(|c| c - r).collect(),
        center.iter().map(|c| c + r).collect(),
    )
}

/// Roots of `|u + t d - c| = r` for unit `d`, if the line meets the sphere.
fn sphere_roots(u: &[f64], dir: &[f64], center: &[f64], r: f64) -> Option<(f64, f64)> {
    let w: Vec<f64> = u.iter().zip(center).map(|(a, c)| a - c).collect();
    let b: f64 = w.iter().zip(dir).map(|(a, d)| a * d).sum();
    let c: f64 = w.iter().map(|a| a * a).sum::<f64>() - r * r;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((-b - s, -b + s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_membership() {
        let s = FreeSpace::unit_box(2);
        assert!(s.contains(&Point::xy(0.5, 0.5)).unwrap());
        assert!(!s.contains(&Point::xy(1.5, 0.5)).unwrap());
        assert!(s.contains(&Point::xy(1.0, 0.5)).unwrap());
        assert!(matches!(
            s.contains(&Point::new(vec![0.5, 0.5, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn box_axis_chord() {
        let s = FreeSpace::unit_box(2);
        let c = s.chord(&Point::xy(0.5, 0.5), &[1.0, 0.0]).unwrap();
        assert_eq!(c.a, Point::xy(0.0, 0.5));
        assert_eq!(c.b, Point::xy(1.0, 0.5));
    }

    #[test]
    fn ball_center_chord_is_diameter() {
        let s = FreeSpace::unit_ball(3);
        let d = [0.6, 0.0, 0.8];
        let c = s.chord(&Point::zeros(3), &d).unwrap();
        assert!((c.len() - 2.0).abs() < 1e-12);
        assert!((c.a.dist(&c.b) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chord_rejects_outside_point_and_bad_direction() {
        let s = FreeSpace::unit_box(2);
        assert!(matches!(
            s.chord(&Point::xy(2.0, 0.5), &[1.0, 0.0]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            s.chord(&Point::xy(0.5, 0.5), &[1.0, 1.0]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn shell_chord_stops_at_inner_circle() {
        let s = FreeSpace::shell(vec![0.0, 0.0], 1.0, 3.0).unwrap();
        let c = s.chord(&Point::xy(-2.0, 0.0), &[1.0, 0.0]).unwrap();
        assert!((c.t_plus - 1.0).abs() < 1e-12);
        assert!((c.t_minus + 1.0).abs() < 1e-12);
        // Tangent to the hole: passes straight by.
        let c = s.chord(&Point::xy(-2.0, 1.0), &[1.0, 0.0]).unwrap();
        assert!(c.t_plus > 3.0);
        assert!(!s.sees(&Point::xy(-2.0, 0.0), &Point::xy(2.0, 0.0)).unwrap());
        assert!(s.sees(&Point::xy(-2.0, 1.5), &Point::xy(2.0, 1.5)).unwrap());
    }

    #[test]
    fn implicit_disk_matches_analytic() {
        let region = ImplicitRegion::new(vec![-1.0, -1.0], vec![1.0, 1.0], |x: &[f64]| {
            x[0] * x[0] + x[1] * x[1] <= 1.0
        })
        .unwrap();
        let s = FreeSpace::implicit(region);
        let c = s.chord(&Point::xy(0.0, 0.5), &[1.0, 0.0]).unwrap();
        let half = (1.0f64 - 0.25).sqrt();
        assert!((c.t_plus - half).abs() < 2e-6);
        assert!((c.t_minus + half).abs() < 2e-6);
        assert!(s.sees(&Point::xy(-0.5, 0.0), &Point::xy(0.5, 0.0)).unwrap());
        assert!(s.boundary_distance(&Point::xy(0.0, 0.0)).is_err());
    }

    #[test]
    fn degenerate_segment_is_visible() {
        let s = FreeSpace::unit_box(2);
        let u = Point::xy(0.3, 0.3);
        assert!(s.sees(&u, &u).unwrap());
        assert!(s.sees(&Point::xy(0.1, 0.1), &Point::xy(0.9, 0.9)).unwrap());
    }

    #[test]
    fn diameters() {
        assert_eq!(FreeSpace::unit_ball(2).diameter(), 2.0);
        let b = FreeSpace::aabb(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        assert!((b.diameter() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
    }
}

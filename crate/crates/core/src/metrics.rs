//! Cross-ratio distances, conductance and mixing-time bounds, and
//! Monte-Carlo checkers for the geometric inequalities behind them.

use std::f64::consts::{E, FRAC_PI_4, PI};

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, FreeSpace, Point};
use crate::planner::uniform_point;
use crate::sampler::hnr_next;
use crate::volume::unit_ball_volume;

/// Default number of sampled waypoints for [`tau_best_distance`].
pub const DEFAULT_WAYPOINTS: usize = 512;

/// Cross-ratio `|a-b||u-v| / (|a-u||v-b|)` of collinear points in the
/// order `a, u, v, b`.
pub fn cross_ratio_value(a: &[f64], u: &[f64], v: &[f64], b: &[f64]) -> f64 {
    let uv = dist(u, v);
    if uv == 0.0 {
        return 0.0;
    }
    dist(a, b) * uv / (dist(a, u) * dist(v, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioSample {
    pub a: Point,
    pub u: Point,
    pub v: Point,
    pub b: Point,
    pub value: f64,
}

/// Cross-ratio distance between two mutually visible points.
///
/// `a` is the chord endpoint on the side of `u`. Equal points give zero and
/// a point on the boundary gives infinity.
pub fn cross_ratio(space: &FreeSpace, u: &Point, v: &Point) -> Result<CrossRatioSample> {
    let n = space.dimension();
    u.check_dim(n)?;
    v.check_dim(n)?;
    if !space.sees(u, v)? {
        return Err(Error::domain("points do not see each other"));
    }
    let Some((dir, _)) = u.direction_to(v) else {
        return Ok(CrossRatioSample {
            a: u.clone(),
            u: u.clone(),
            v: v.clone(),
            b: v.clone(),
            value: 0.0,
        });
    };
    // Evaluate in a canonical orientation so the value is exactly symmetric.
    let flip = u.coords() > v.coords();
    let (p, q, d) = if flip {
        (v, u, dir.iter().map(|c| -c).collect::<Vec<_>>())
    } else {
        (u, v, dir)
    };
    let chord = space.chord(p, &d)?;
    let value = cross_ratio_value(chord.a.coords(), p.coords(), q.coords(), chord.b.coords());
    let (a, b) = if flip {
        (chord.b, chord.a)
    } else {
        (chord.a, chord.b)
    };
    Ok(CrossRatioSample {
        a,
        u: u.clone(),
        v: v.clone(),
        b,
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauBest {
    pub distance: f64,
    /// Waypoints from `u` to `v`, consecutive entries mutually visible.
    pub chain: Vec<Point>,
    pub waypoints: usize,
}

/// Shortest summed cross-ratio over chains of mutually visible waypoints,
/// on a visibility graph of `u`, `v` and `waypoints` uniform samples.
pub fn tau_best_distance<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    v: &Point,
    waypoints: usize,
    rng: &mut R,
) -> Result<TauBest> {
    for p in [u, v] {
        if !space.contains(p)? {
            return Err(Error::precondition(
                "tau-best endpoints must lie in the free space",
            ));
        }
    }
    if u == v {
        return Ok(TauBest {
            distance: 0.0,
            chain: vec![u.clone()],
            waypoints,
        });
    }
    let mut pts = vec![u.clone(), v.clone()];
    for _ in 0..waypoints {
        pts.push(uniform_point(space, rng)?);
    }
    let mut graph = UnGraph::<(), f64>::with_capacity(pts.len(), 0);
    let idx: Vec<NodeIndex> = pts.iter().map(|_| graph.add_node(())).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if !space.sees(&pts[i], &pts[j])? {
                continue;
            }
            let w = cross_ratio(space, &pts[i], &pts[j])?.value;
            if w.is_finite() {
                graph.add_edge(idx[i], idx[j], w);
            }
        }
    }
    let found = astar(&graph, idx[0], |n| n == idx[1], |e| *e.weight(), |_| 0.0);
    let Some((distance, route)) = found else {
        return Err(Error::Unreachable(format!(
            "no visible waypoint chain with {waypoints} waypoints"
        )));
    };
    Ok(TauBest {
        distance,
        chain: route.into_iter().map(|n| pts[n.index()].clone()).collect(),
        waypoints,
    })
}

/// Largest value of `|x-b| / |x-c|` over a disk of radius `r`, with `x` at
/// least `eps` from the boundary, `b` the nearer chord end and `c` any
/// boundary point: `sqrt((2r - eps) / eps)`.
pub fn ball_r_epsilon(r: f64, eps: f64) -> Result<f64> {
    check_eps(r, eps)?;
    Ok(((2.0 * r - eps) / eps).sqrt())
}

fn check_eps(r: f64, eps: f64) -> Result<()> {
    if !(r > 0.0 && eps > 0.0 && eps < r) {
        return Err(Error::usage("need 0 < eps < radius"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct REpsilonEstimate {
    pub estimate: f64,
    /// `r / eps`, which no configuration can exceed.
    pub cap: f64,
    pub samples: usize,
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let rho = radius * rng.random::<f64>().sqrt();
    let th = rng.random_range(0.0..2.0 * PI);
    [rho * th.cos(), rho * th.sin()]
}

/// Shorter and longer distances from `x` to the circle of radius `r` along
/// `dir` and `-dir`.
fn disk_chord_halves(r: f64, x: [f64; 2], dir: [f64; 2]) -> (f64, f64) {
    let s = x[0] * dir[0] + x[1] * dir[1];
    let q = r * r - x[0] * x[0] - x[1] * x[1];
    let root = (s * s + q).max(0.0).sqrt();
    let fwd = root - s;
    let back = root + s;
    (fwd.min(back), fwd.max(back))
}

/// Monte-Carlo estimate of the largest `|x-b| / |x-c|` on a disk of radius
/// `omega_radius`: `x` uniform on the inner disk of radius `r - eps`, chord
/// direction uniform, and `c` the boundary point nearest `x`.
pub fn r_epsilon<R: Rng + ?Sized>(
    omega_radius: f64,
    eps: f64,
    samples: usize,
    rng: &mut R,
) -> Result<REpsilonEstimate> {
    check_eps(omega_radius, eps)?;
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let x = uniform_in_disk(omega_radius - eps, rng);
        let th = rng.random_range(0.0..2.0 * PI);
        let (near, _) = disk_chord_halves(omega_radius, x, [th.cos(), th.sin()]);
        let to_c = omega_radius - x[0].hypot(x[1]);
        best = best.max(near / to_c);
    }
    Ok(REpsilonEstimate {
        estimate: best,
        cap: omega_radius / eps,
        samples,
    })
}

/// Summary of a Monte-Carlo checker, serialised one per checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checker: String,
    pub trials: usize,
    pub violations: usize,
    pub min_margin: Option<f64>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl CheckReport {
    fn new(checker: &str, config: serde_json::Value) -> Self {
        CheckReport {
            checker: checker.to_string(),
            trials: 0,
            violations: 0,
            min_margin: None,
            config,
            skipped: None,
        }
    }

    fn record(&mut self, margin: f64, ok: bool) {
        self.trials += 1;
        if !ok {
            self.violations += 1;
        }
        self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
    }

    pub fn passed(&self) -> bool {
        self.skipped.is_none() && self.violations == 0
    }
}

/// The product `(|b-a|/|a-x1|) (|x1-c|/|c-d|) (|d-x2|/|x2-b|)` for collinear
/// `a, x1, x2, b`. Rejects configurations with `|x1-a| >= |x2-a|`.
pub fn cross_ratio_lemma_value(
    a: &[f64],
    x1: &[f64],
    x2: &[f64],
    b: &[f64],
    c: &[f64],
    d: &[f64],
) -> Result<f64> {
    if dist(x1, a) >= dist(x2, a) {
        return Err(Error::precondition("need |x1 - a| < |x2 - a|"));
    }
    Ok(dist(b, a) / dist(a, x1) * (dist(x1, c) / dist(c, d)) * (dist(d, x2) / dist(x2, b)))
}

/// Lower bound `1 / (4 R (1 + 2R))`.
pub fn cross_ratio_lemma_bound(r_eps: f64) -> f64 {
    1.0 / (4.0 * r_eps * (1.0 + 2.0 * r_eps))
}

/// Random collinear `a, x1, x2, b` on a disk with `x1, x2` at least `eps`
/// inside, and random boundary points `c, d`, checked against
/// [`cross_ratio_lemma_bound`] with the exact disk value of `R_eps`.
/// The margin is `value / bound - 1`.
pub fn check_cross_ratio_lemma<R: Rng + ?Sized>(
    omega_radius: f64,
    eps: f64,
    trials: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    let r_eps = ball_r_epsilon(omega_radius, eps)?;
    let mut report = CheckReport::new(
        "cross_ratio_lemma",
        serde_json::json!({ "omega_radius": omega_radius, "eps": eps, "r_eps": r_eps }),
    );
    if r_eps * (1.0 + 8.0 * r_eps) < 2.0 / 3.0 {
        report.skipped = Some(format!("hypothesis R(1+8R) >= 2/3 fails for R = {r_eps}"));
        return Ok(report);
    }
    let bound = cross_ratio_lemma_bound(r_eps);
    let circle = |t: f64| [omega_radius * t.cos(), omega_radius * t.sin()];
    while report.trials < trials {
        let p = uniform_in_disk(omega_radius - eps, rng);
        let q = uniform_in_disk(omega_radius - eps, rng);
        let len = dist(&p, &q);
        if len == 0.0 {
            continue;
        }
        let dir = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
        let s = p[0] * dir[0] + p[1] * dir[1];
        let root = (s * s + omega_radius * omega_radius - p[0] * p[0] - p[1] * p[1]).sqrt();
        let a = [p[0] - (root + s) * dir[0], p[1] - (root + s) * dir[1]];
        let b = [p[0] + (root - s) * dir[0], p[1] + (root - s) * dir[1]];
        let c = circle(rng.random_range(0.0..2.0 * PI));
        let d = circle(rng.random_range(0.0..2.0 * PI));
        let value = cross_ratio_lemma_value(&a, &p, &q, &b, &c, &d)?;
        report.record(value / bound - 1.0, value >= bound);
    }
    Ok(report)
}

/// Checks that the cross-ratio distance on a chord `[a, b]` is
/// super-additive along `a < y1 < ... < ym < b`: the sum over consecutive
/// pairs does not exceed `d(y1, ym)`, up to floating-point rounding of the
/// sum.
pub fn check_chain_triangle(a: f64, ys: &[f64], b: f64) -> Result<bool> {
    if ys.len() < 2 {
        return Err(Error::usage("need at least two chord points"));
    }
    let ordered = a < ys[0] && ys.windows(2).all(|w| w[0] < w[1]) && ys[ys.len() - 1] < b;
    if !ordered {
        return Err(Error::precondition(
            "chord points must satisfy a < y1 < ... < ym < b",
        ));
    }
    let d = |x: f64, y: f64| (b - a) * (y - x) / ((x - a) * (b - y));
    let sum: f64 = ys.windows(2).map(|w| d(w[0], w[1])).sum();
    let whole = d(ys[0], ys[ys.len() - 1]);
    let slack = 4.0 * f64::EPSILON * ys.len() as f64 * whole;
    Ok(sum <= whole + slack)
}

/// Random monotone tuples on random chords; the margin is
/// `1 - sum / whole`.
pub fn check_chain_triangle_fuzz<R: Rng + ?Sized>(
    trials: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("chain_triangle", serde_json::json!({ "max_points": 8 }));
    for _ in 0..trials {
        let a = rng.random_range(-10.0..10.0);
        let b = a + rng.random_range(0.1..20.0);
        let m = rng.random_range(2..=8);
        let mut ys: Vec<f64> = (0..m).map(|_| rng.random_range(a..b)).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup();
        if ys.len() < 2 || ys[0] <= a {
            continue;
        }
        let ok = check_chain_triangle(a, &ys, b)?;
        let d = |x: f64, y: f64| (b - a) * (y - x) / ((x - a) * (b - y));
        let sum: f64 = ys.windows(2).map(|w| d(w[0], w[1])).sum();
        report.record(1.0 - sum / d(ys[0], ys[ys.len() - 1]), ok);
    }
    Ok(report)
}

/// Lower bound `d(u, v) >= 4 |u - v| / D` on random visible pairs; the
/// margin is `d D / (4 |u - v|) - 1`.
pub fn check_cross_ratio_lower_bound<R: Rng + ?Sized>(
    space: &FreeSpace,
    pairs: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    let diameter = space.diameter();
    let mut report = CheckReport::new(
        "cross_ratio_lower_bound",
        serde_json::json!({ "map": space.name(), "diameter": diameter }),
    );
    while report.trials < pairs {
        let u = uniform_point(space, rng)?;
        let v = Point::new(hnr_next(space, u.coords(), rng));
        let len = u.dist(&v);
        if len == 0.0 {
            continue;
        }
        let d = cross_ratio(space, &u, &v)?.value;
        let bound = 4.0 * len / diameter;
        report.record(d / bound - 1.0, d >= bound * (1.0 - 1e-12));
    }
    Ok(report)
}

/// Identity-map check on a convex space: `d(x1, x2) <= 4R(1+2R) d(x1, x2)`
/// for pairs at least `eps` from the boundary, with `r_eps` supplied.
pub fn check_lipschitz_identity<R: Rng + ?Sized>(
    space: &FreeSpace,
    eps: f64,
    r_eps: f64,
    pairs: usize,
    rng: &mut R,
) -> Result<CheckReport> {
    if !space.is_convex() {
        return Err(Error::precondition("identity check needs a convex space"));
    }
    let factor = 4.0 * r_eps * (1.0 + 2.0 * r_eps);
    let mut report = CheckReport::new(
        "lipschitz_identity",
        serde_json::json!({ "map": space.name(), "eps": eps, "r_eps": r_eps, "factor": factor }),
    );
    let mut inner = || -> Result<Point> {
        loop {
            let p = uniform_point(space, rng)?;
            if space.boundary_distance(&p)? >= eps {
                return Ok(p);
            }
        }
    };
    while report.trials < pairs {
        let x1 = inner()?;
        let x2 = inner()?;
        let d = cross_ratio(space, &x1, &x2)?.value;
        report.record(factor - 1.0, d <= factor * d);
    }
    Ok(report)
}

/// Constants of the bilipschitz reference map and curvature bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    pub l_sigma: f64,
    pub l_omega: f64,
    pub kappa: f64,
    /// Radius of the reference ball.
    pub r: f64,
    pub n: usize,
    pub d_sigma: f64,
    pub d_omega: f64,
}

impl ConstantsProfile {
    /// Profile whose reference ball has unit volume.
    pub fn unit_volume(n: usize, l_sigma: f64, l_omega: f64, kappa: f64, d_sigma: f64) -> Self {
        let r = (1.0 / unit_ball_volume(n)).powf(1.0 / n as f64);
        ConstantsProfile {
            l_sigma,
            l_omega,
            kappa,
            r,
            n,
            d_sigma,
            d_omega: 2.0 * r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.l_sigma >= 1.0
            && self.l_omega >= 1.0
            && self.kappa > 0.0
            && self.r > 0.0
            && self.n >= 1
            && self.d_sigma > 0.0
            && self.d_omega > 0.0;
        if !ok {
            return Err(Error::usage(
                "constants need L >= 1, kappa > 0, r > 0, n >= 1 and positive diameters",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundBreakdown {
    pub delta: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub eps_prime: f64,
    #[serde(rename = "N")]
    pub n_factor: f64,
    pub r_eps_prime: f64,
    pub phi: f64,
}

/// Conductance lower bound and its intermediate quantities. Without a
/// supplied `R` at `eps' = 9r/(20n)`, the cap `r / eps'` is used.
pub fn conductance_lower_bound(
    profile: &ConstantsProfile,
    r_eps_prime: Option<f64>,
) -> Result<BoundBreakdown> {
    profile.validate()?;
    let ConstantsProfile {
        l_sigma,
        l_omega,
        kappa,
        r,
        n,
        d_sigma,
        d_omega,
    } = *profile;
    let nf = n as f64;
    let delta = 9.0 * r / (320.0 * E.powi(4) * nf * l_omega * d_sigma);
    let g = FRAC_PI_4.min((PI / 8.0).sin() / kappa) / 6.0;
    let eps_prime = 9.0 * r / (20.0 * nf);
    let big_r = r_eps_prime.unwrap_or(r / eps_prime);
    if !(big_r > 0.0) {
        return Err(Error::usage("R must be positive"));
    }
    let n_factor =
        9.0 * r / (80.0 * nf * l_sigma.powi(2) * l_omega.powi(3) * big_r * (1.0 + 2.0 * big_r));
    let inner = (2.0 / nf.sqrt()) * (1.0 / (8.0 * nf.sqrt())).min(g);
    let phi = delta / 4.0
        * (2.0 / (5.0 * nf * d_omega)).min(n_factor * (1.0 / (24.0 * d_sigma)).min(inner));
    let out = BoundBreakdown {
        delta,
        g,
        eps_prime,
        n_factor,
        r_eps_prime: big_r,
        phi,
    };
    if [delta, g, eps_prime, n_factor, phi]
        .iter()
        .any(|x| !x.is_finite())
    {
        return Err(Error::domain(
            "non-finite intermediate in conductance bound",
        ));
    }
    Ok(out)
}

/// Smallest `t` with `sqrt(M) (1 - phi^2/2)^t <= eps`.
pub fn mixing_time_bound(phi: f64, m: f64, eps: f64) -> Result<u64> {
    if !(phi > 0.0 && phi <= 1.0 && m >= 1.0 && eps > 0.0 && eps < 1.0) {
        return Err(Error::usage("need 0 < phi <= 1, M >= 1 and 0 < eps < 1"));
    }
    let target = m.sqrt().ln() - eps.ln();
    if target <= 0.0 {
        return Ok(0);
    }
    let rate = -(-0.5 * phi * phi).ln_1p();
    let mut t = (target / rate).ceil().max(0.0) as u64;
    // Guard against rounding in the division.
    let decayed = |t: u64| t as f64 * rate >= target;
    while t > 0 && decayed(t - 1) {
        t -= 1;
    }
    while !decayed(t) {
        t += 1;
    }
    Ok(t)
}

/// Density-ratio bound for a point start, approximated as the free-space
/// volume divided by the volume of a cell of side `cell`.
pub fn point_start_m(space: &FreeSpace, cell: f64) -> Result<f64> {
    let vol = space
        .volume()
        .ok_or_else(|| Error::domain("free-space volume is not available"))?;
    Ok((vol / cell.powi(space.dimension() as i32)).max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductanceEstimate {
    pub value: f64,
    pub std_err: f64,
    /// Fraction of uniform samples in the first part.
    pub p_a: f64,
    pub flow_ab: f64,
    pub flow_ba: f64,
    pub samples: usize,
}

/// Conductance of the partition `{in_a, not in_a}` under one Hit-and-Run
/// step: uniform starts, one step each, symmetrised crossing flow divided
/// by the smaller part's mass.
pub fn empirical_conductance<R, F>(
    space: &FreeSpace,
    in_a: F,
    samples: usize,
    rng: &mut R,
) -> Result<ConductanceEstimate>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> bool,
{
    if samples == 0 {
        return Err(Error::usage("need at least one sample"));
    }
    let (mut n_a, mut ab, mut ba) = (0usize, 0usize, 0usize);
    for _ in 0..samples {
        let u = uniform_point(space, rng)?;
        let v = hnr_next(space, u.coords(), rng);
        let from_a = in_a(u.coords());
        let to_a = in_a(&v);
        n_a += usize::from(from_a);
        match (from_a, to_a) {
            (true, false) => ab += 1,
            (false, true) => ba += 1,
            _ => {}
        }
    }
    let nf = samples as f64;
    let p_a = n_a as f64 / nf;
    let small = p_a.min(1.0 - p_a);
    if small == 0.0 {
        return Err(Error::domain("partition has an empty part in the sample"));
    }
    let cross = (ab + ba) as f64 / nf;
    Ok(ConductanceEstimate {
        value: cross / 2.0 / small,
        std_err: (cross * (1.0 - cross) / nf).sqrt() / 2.0 / small,
        p_a,
        flow_ab: ab as f64 / nf,
        flow_ba: ba as f64 / nf,
        samples,
    })
}

/// Partition of a disk by two parallel lines: `Omega1` below the band,
/// `Omega3` the band of the given width, `Omega2` above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabPartition {
    /// Angle of the band normal.
    pub angle: f64,
    /// Signed distance of the band centre line from the disk centre.
    pub offset: f64,
    pub width: f64,
}

impl SlabPartition {
    pub fn normal(&self) -> [f64; 2] {
        [self.angle.cos(), self.angle.sin()]
    }

    /// 1, 2 or 3 for the part containing `x` (relative to the disk centre).
    pub fn part(&self, x: &[f64]) -> u8 {
        let nrm = self.normal();
        let s = x[0] * nrm[0] + x[1] * nrm[1] - self.offset;
        if s < -self.width / 2.0 {
            1
        } else if s > self.width / 2.0 {
            2
        } else {
            3
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetryCheck {
    pub holds: bool,
    /// Estimated volumes of the three parts.
    pub volumes: [f64; 3],
    pub h: f64,
    /// `vol3 - h min(vol1, vol2)`.
    pub margin: f64,
    pub sigma: f64,
    pub hypothesis_violations: usize,
}

/// Isoperimetric inequality `vol3 >= E(h) min(vol1, vol2)` on a disk for a
/// band partition, with the constant `h = min(1, 4 width / D) / 3` that
/// satisfies its hypothesis since the cross-ratio distance
/// between the outer parts is at least `4 width / D`. The hypothesis is
/// also checked on sampled pairs. Holds within 3 sigma.
pub fn check_isoperimetry<R: Rng + ?Sized>(
    radius: f64,
    partition: &SlabPartition,
    samples: usize,
    rng: &mut R,
) -> Result<IsoperimetryCheck> {
    if !(radius > 0.0 && partition.width >= 0.0 && samples > 0) {
        return Err(Error::usage("need radius > 0, width >= 0 and samples > 0"));
    }
    let diameter = 2.0 * radius;
    let h = (4.0 * partition.width / diameter).min(1.0) / 3.0;
    let area = PI * radius * radius;
    let mut counts = [0usize; 3];
    let mut ones = Vec::new();
    let mut twos = Vec::new();
    for _ in 0..samples {
        let x = uniform_in_disk(radius, rng);
        let k = partition.part(&x);
        counts[k as usize - 1] += 1;
        match k {
            1 if ones.len() < 64 => ones.push(x),
            2 if twos.len() < 64 => twos.push(x),
            _ => {}
        }
    }
    let nf = samples as f64;
    let frac = counts.map(|c| c as f64 / nf);
    let volumes = frac.map(|f| f * area);
    let small = if frac[0] <= frac[1] { 0 } else { 1 };
    // Per-sample indicator of (part 3) - h (smaller outer part).
    let mean = frac[2] - h * frac[small];
    let second = frac[2] + h * h * frac[small];
    let sigma = ((second - mean * mean).max(0.0) / nf).sqrt() * area;
    let margin = mean * area;

    let disk = FreeSpace::ball(vec![0.0, 0.0], radius)?;
    let mut hypothesis_violations = 0;
    for (x, y) in ones.iter().zip(&twos) {
        let d = cross_ratio(&disk, &Point::new(x.to_vec()), &Point::new(y.to_vec()))?.value;
        if h > d.min(1.0) / 3.0 * (1.0 + 1e-12) {
            hypothesis_violations += 1;
        }
    }
    Ok(IsoperimetryCheck {
        holds: margin >= -3.0 * sigma && hypothesis_violations == 0,
        volumes,
        h,
        margin,
        sigma,
        hypothesis_violations,
    })
}

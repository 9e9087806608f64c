//! Double-integrator planning. The state is position and velocity, the
//! control an acceleration in the unit ball; a state whose position arc
//! leaves the free space stops at the first boundary crossing with its
//! velocity zeroed.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist2, norm, FreeSpace, GoalRegion, Point};
use crate::planner::{uniform_point, Algorithm, PlanResult};
use crate::rng::RngSeed;
use crate::sampler::hnr_next;

/// Position samples per step used to detect a boundary crossing.
pub const ARC_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinoConfig {
    /// Integration step.
    pub dt: f64,
    /// Speed limit, applied radially.
    pub v_max: f64,
    /// Weight of the velocity error in the state metric.
    pub lambda: f64,
    /// Controller sub-steps allowed per proposal.
    pub k_max: usize,
}

impl Default for KinoConfig {
    fn default() -> Self {
        KinoConfig {
            dt: 1.0,
            v_max: 2.0,
            lambda: 1.0,
            k_max: 50,
        }
    }
}

impl KinoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.v_max > 0.0 && self.lambda >= 0.0 && self.k_max >= 1) {
            return Err(Error::usage(
                "kinematic config needs dt > 0, v_max > 0, lambda >= 0 and k_max >= 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinoState {
    pub position: Point,
    pub velocity: Vec<f64>,
}

impl KinoState {
    pub fn at_rest(position: Point) -> Self {
        let n = position.dim();
        KinoState {
            position,
            velocity: vec![0.0; n],
        }
    }

    pub fn speed(&self) -> f64 {
        norm(&self.velocity)
    }
}

/// Result of one integration step.
#[derive(Debug, Clone, PartialEq)]
pub struct KinoStep {
    pub state: KinoState,
    /// The arc hit the boundary and the state was stopped there.
    pub stopped: bool,
}

/// Squared state distance `|p - p*|^2 + lambda |v - v*|^2`.
pub fn state_metric(s: &KinoState, t: &KinoState, lambda: f64) -> f64 {
    dist2(s.position.coords(), t.position.coords()) + lambda * dist2(&s.velocity, &t.velocity)
}

/// One exact double-integrator step with inelastic boundary stops.
pub fn propagate(
    space: &FreeSpace,
    s: &KinoState,
    accel: &[f64],
    cfg: &KinoConfig,
) -> Result<KinoStep> {
    let n = space.dimension();
    s.position.check_dim(n)?;
    if accel.len() != n || s.velocity.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: accel.len().min(s.velocity.len()),
        });
    }
    if norm(accel) > 1.0 + 1e-12 {
        return Err(Error::usage("acceleration must lie in the unit ball"));
    }
    let p = s.position.coords();
    let v = &s.velocity;
    let arc = |t: f64| -> Vec<f64> {
        (0..n)
            .map(|k| p[k] + v[k] * t + 0.5 * accel[k] * t * t)
            .collect()
    };
    let dt = cfg.dt;
    let mut prev = 0.0;
    for i in 1..=ARC_SAMPLES {
        let t = dt * i as f64 / ARC_SAMPLES as f64;
        if !space.contains_unchecked(&arc(t)) {
            let (mut lo, mut hi) = (prev, t);
            let tol = space.tolerance();
            while hi - lo > f64::EPSILON * dt {
                let speed = (0..n)
                    .map(|k| (v[k] + accel[k] * hi).powi(2))
                    .sum::<f64>()
                    .sqrt()
                    .max(1.0);
                if (hi - lo) * speed <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if space.contains_unchecked(&arc(mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(KinoStep {
                state: KinoState {
                    position: Point::new(arc(lo)),
                    velocity: vec![0.0; n],
                },
                stopped: true,
            });
        }
        prev = t;
    }
    let mut vel: Vec<f64> = (0..n).map(|k| v[k] + accel[k] * dt).collect();
    let speed = norm(&vel);
    if speed > cfg.v_max {
        for c in &mut vel {
            *c *= cfg.v_max / speed;
        }
    }
    Ok(KinoStep {
        state: KinoState {
            position: Point::new(arc(dt)),
            velocity: vel,
        },
        stopped: false,
    })
}

/// Acceleration in the unit ball minimising
/// `|p + v dt + a dt^2/2 - p*|^2 + lambda |v + a dt - v*|^2`.
///
/// The cost is an isotropic quadratic in `a`, so the constrained optimum is
/// the unconstrained one pulled radially onto the ball.
pub fn best_control(s: &KinoState, target: &KinoState, cfg: &KinoConfig) -> Vec<f64> {
    let dt = cfg.dt;
    let h = 0.5 * dt * dt;
    let p = s.position.coords();
    let ps = target.position.coords();
    let denom = h * h + cfg.lambda * dt * dt;
    let mut a: Vec<f64> = (0..p.len())
        .map(|k| {
            let ep = p[k] + s.velocity[k] * dt - ps[k];
            let ev = s.velocity[k] - target.velocity[k];
            -(h * ep + cfg.lambda * dt * ev) / denom
        })
        .collect();
    let len = norm(&a);
    if len > 1.0 {
        for c in &mut a {
            *c /= len;
        }
    }
    a
}

/// Controller cost of applying `a` from `s` towards `target`.
pub fn control_cost(s: &KinoState, target: &KinoState, a: &[f64], cfg: &KinoConfig) -> f64 {
    let dt = cfg.dt;
    let p = s.position.coords();
    let ps = target.position.coords();
    (0..p.len())
        .map(|k| {
            let ep = p[k] + s.velocity[k] * dt + 0.5 * a[k] * dt * dt - ps[k];
            let ev = s.velocity[k] + a[k] * dt - target.velocity[k];
            ep * ep + cfg.lambda * ev * ev
        })
        .sum()
}

/// Tracks `target` from `s` with the best-control law: sub-steps continue
/// while the state metric strictly decreases, up to `k_max` sub-steps, and
/// end at a boundary stop. A sub-step that fails to decrease the metric is
/// discarded. Returns the applied sub-steps (possibly none).
pub fn steer(
    space: &FreeSpace,
    s: &KinoState,
    target: &KinoState,
    cfg: &KinoConfig,
) -> Result<Vec<KinoStep>> {
    let mut steps = Vec::new();
    let mut cur = s.clone();
    let mut d = state_metric(&cur, target, cfg.lambda);
    for _ in 0..cfg.k_max {
        let a = best_control(&cur, target, cfg);
        let step = propagate(space, &cur, &a, cfg)?;
        if step.stopped {
            steps.push(step);
            break;
        }
        let nd = state_metric(&step.state, target, cfg.lambda);
        if nd >= d {
            break;
        }
        d = nd;
        cur = step.state.clone();
        steps.push(step);
    }
    Ok(steps)
}

fn uniform_velocity<R: Rng + ?Sized>(n: usize, v_max: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-v_max..=v_max)).collect();
        if norm(&v) <= v_max {
            return v;
        }
    }
}

/// A Hit-and-Run style proposal for the kinematic chain.
#[derive(Debug, Clone)]
pub struct KinoProposal {
    pub target: KinoState,
    pub substeps: Vec<KinoStep>,
    pub state: KinoState,
}

/// Draws the desired position by one chord step from the current position
/// and the desired velocity uniformly from the speed ball, then tracks it.
pub fn kino_propose_hnr<R: Rng + ?Sized>(
    space: &FreeSpace,
    s: &KinoState,
    cfg: &KinoConfig,
    rng: &mut R,
) -> Result<KinoProposal> {
    if !space.contains(&s.position)? {
        return Err(Error::precondition(
            "kinematic state is outside the free space",
        ));
    }
    let n = space.dimension();
    let target = KinoState {
        position: Point::new(hnr_next(space, s.position.coords(), rng)),
        velocity: uniform_velocity(n, cfg.v_max, rng),
    };
    let substeps = steer(space, s, &target, cfg)?;
    let state = substeps
        .last()
        .map_or_else(|| s.clone(), |st| st.state.clone());
    Ok(KinoProposal {
        target,
        substeps,
        state,
    })
}

/// Kinematic planning run: the usual [`PlanResult`] (path = states after
/// each proposal, or the tree branch for RRT) plus every integration step
/// that was applied.
#[derive(Debug, Clone)]
pub struct KinoPlanResult {
    pub result: PlanResult,
    pub states: Vec<KinoState>,
    pub trajectory: Vec<KinoStep>,
}

impl KinoPlanResult {
    /// CSV with header `step,px,py,vx,vy,stopped`.
    pub fn write_trace_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "px", "py", "vx", "vy", "stopped"])?;
        for (i, st) in self.trajectory.iter().enumerate() {
            let p = st.state.position.coords();
            let v = &st.state.velocity;
            w.write_record([
                i.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                v[0].to_string(),
                v[1].to_string(),
                u8::from(st.stopped).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_start(space: &FreeSpace, start: &KinoState, cfg: &KinoConfig) -> Result<()> {
    cfg.validate()?;
    if !space.contains(&start.position)? {
        return Err(Error::precondition("start is outside the free space"));
    }
    if start.speed() > cfg.v_max + 1e-12 {
        return Err(Error::precondition("start speed exceeds v_max"));
    }
    Ok(())
}

pub fn kino_hnr_plan(
    space: &FreeSpace,
    start: &KinoState,
    goal: &GoalRegion,
    cfg: &KinoConfig,
    max_transitions: usize,
    seed: RngSeed,
) -> Result<KinoPlanResult> {
    let clock = Instant::now();
    check_start(space, start, cfg)?;
    let mut rng = seed.rng();
    let mut states = vec![start.clone()];
    let mut trajectory = vec![KinoStep {
        state: start.clone(),
        stopped: false,
    }];
    let mut success = goal.contains(&start.position);
    let mut transitions = 0;
    while !success && transitions < max_transitions {
        transitions += 1;
        let cur = states.last().expect("non-empty");
        let prop = kino_propose_hnr(space, cur, cfg, &mut rng)?;
        trajectory.extend(prop.substeps);
        success = goal.contains(&prop.state.position);
        states.push(prop.state);
    }
    Ok(KinoPlanResult {
        result: PlanResult {
            algorithm: Algorithm::Hnr,
            path: states.iter().map(|s| s.position.clone()).collect(),
            transitions,
            nodes: states.len(),
            success,
            wall_time: clock.elapsed(),
            seed,
        },
        states,
        trajectory,
    })
}

pub fn kino_rrt_plan(
    space: &FreeSpace,
    start: &KinoState,
    goal: &GoalRegion,
    cfg: &KinoConfig,
    max_transitions: usize,
    seed: RngSeed,
) -> Result<KinoPlanResult> {
    let clock = Instant::now();
    check_start(space, start, cfg)?;
    let mut rng = seed.rng();
    let n = space.dimension();
    let mut nodes = vec![start.clone()];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut trajectory = vec![KinoStep {
        state: start.clone(),
        stopped: false,
    }];
    let mut reached = goal.contains(&start.position).then_some(0);
    let mut transitions = 0;
    while reached.is_none() && transitions < max_transitions {
        transitions += 1;
        let target = KinoState {
            position: uniform_point(space, &mut rng)?,
            velocity: uniform_velocity(n, cfg.v_max, &mut rng),
        };
        let near = nodes
            .iter()
            .enumerate()
            .map(|(i, s)| (i, state_metric(s, &target, cfg.lambda)))
            .fold(
                (0, f64::INFINITY),
                |best, c| if c.1 < best.1 { c } else { best },
            )
            .0;
        let steps = steer(space, &nodes[near], &target, cfg)?;
        let Some(last) = steps.last() else {
            continue;
        };
        let new_state = last.state.clone();
        trajectory.extend(steps);
        let hit = goal.contains(&new_state.position);
        nodes.push(new_state);
        parent.push(Some(near));
        if hit {
            reached = Some(nodes.len() - 1);
        }
    }
    let mut branch = Vec::new();
    if let Some(mut i) = reached {
        branch.push(nodes[i].clone());
        while let Some(p) = parent[i] {
            branch.push(nodes[p].clone());
            i = p;
        }
        branch.reverse();
    } else {
        branch.push(start.clone());
    }
    Ok(KinoPlanResult {
        result: PlanResult {
            algorithm: Algorithm::Rrt,
            path: branch.iter().map(|s| s.position.clone()).collect(),
            transitions,
            nodes: nodes.len(),
            success: reached.is_some(),
            wall_time: clock.elapsed(),
            seed,
        },
        states: branch,
        trajectory,
    })
}

pub fn kino_plan(
    algorithm: Algorithm,
    space: &FreeSpace,
    start: &KinoState,
    goal: &GoalRegion,
    cfg: &KinoConfig,
    max_transitions: usize,
    seed: RngSeed,
) -> Result<KinoPlanResult> {
    match algorithm {
        Algorithm::Hnr => kino_hnr_plan(space, start, goal, cfg, max_transitions, seed),
        Algorithm::Rrt => kino_rrt_plan(space, start, goal, cfg, max_transitions, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_map, MapSpec};

    fn open() -> FreeSpace {
        FreeSpace::aabb(vec![-100.0, -100.0], vec![100.0, 100.0]).unwrap()
    }

    fn state(p: [f64; 2], v: [f64; 2]) -> KinoState {
        KinoState {
            position: Point::xy(p[0], p[1]),
            velocity: v.to_vec(),
        }
    }

    #[test]
    fn exact_kinematics_in_free_space() {
        let cfg = KinoConfig::default();
        let st = propagate(&open(), &state([0.0, 0.0], [1.0, 0.0]), &[0.0, 1.0], &cfg).unwrap();
        assert!(!st.stopped);
        assert_eq!(st.state.position, Point::xy(1.0, 0.5));
        assert_eq!(st.state.velocity, vec![1.0, 1.0]);
    }

    #[test]
    fn inelastic_stop_at_wall() {
        let space = FreeSpace::aabb(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let cfg = KinoConfig::default();
        let st = propagate(&space, &state([0.9, 0.0], [1.0, 0.0]), &[0.0, 0.0], &cfg).unwrap();
        assert!(st.stopped);
        assert!(st.state.position.dist(&Point::xy(1.0, 0.0)) <= 1e-9);
        assert_eq!(st.state.velocity, vec![0.0, 0.0]);
        assert!(space.contains(&st.state.position).unwrap());
    }

    #[test]
    fn rest_is_a_fixed_point() {
        let cfg = KinoConfig::default();
        let s = state([3.0, 4.0], [0.0, 0.0]);
        let st = propagate(&open(), &s, &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(st.state, s);
    }

    #[test]
    fn oversized_control_is_rejected() {
        let cfg = KinoConfig::default();
        let s = state([0.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            propagate(&open(), &s, &[1.0, 1.0], &cfg),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn speed_is_clipped() {
        let cfg = KinoConfig::default();
        let st = propagate(&open(), &state([0.0, 0.0], [2.0, 0.0]), &[1.0, 0.0], &cfg).unwrap();
        assert!((st.state.speed() - cfg.v_max).abs() < 1e-12);
    }

    #[test]
    fn best_control_recovers_reachable_target() {
        let cfg = KinoConfig::default();
        let s = state([1.0, 2.0], [0.5, -0.3]);
        let a0 = [0.3, -0.6];
        let target = propagate(&open(), &s, &a0, &cfg).unwrap().state;
        let a = best_control(&s, &target, &cfg);
        assert!((a[0] - a0[0]).abs() < 1e-12 && (a[1] - a0[1]).abs() < 1e-12);
    }

    #[test]
    fn best_control_saturates_towards_far_target() {
        let cfg = KinoConfig::default();
        let s = state([0.0, 0.0], [0.0, 0.0]);
        let target = state([1e9, 0.0], [0.0, 0.0]);
        let a = best_control(&s, &target, &cfg);
        assert!((norm(&a) - 1.0).abs() < 1e-12);
        assert!((a[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_substep_config() {
        let m = generate_map(&MapSpec::corridor(2.0)).unwrap();
        let cfg = KinoConfig {
            k_max: 1,
            ..KinoConfig::default()
        };
        let mut rng = RngSeed(3).rng();
        let s = KinoState::at_rest(m.start.clone());
        for _ in 0..200 {
            let p = kino_propose_hnr(&m.space, &s, &cfg, &mut rng).unwrap();
            assert!(p.substeps.len() <= 1);
        }
    }

    #[test]
    fn wedged_state_stays_valid() {
        let space = FreeSpace::unit_box(2);
        let cfg = KinoConfig::default();
        let mut rng = RngSeed(8).rng();
        let mut s = KinoState::at_rest(Point::xy(0.0, 0.0));
        for _ in 0..200 {
            s = kino_propose_hnr(&space, &s, &cfg, &mut rng).unwrap().state;
            assert!(space.contains(&s.position).unwrap());
        }
    }

    #[test]
    fn goal_at_start_takes_no_transitions() {
        let m = generate_map(&MapSpec::corridor(2.0)).unwrap();
        let goal = GoalRegion::ball(m.start.clone(), 0.5).unwrap();
        let s = KinoState::at_rest(m.start.clone());
        let cfg = KinoConfig::default();
        for alg in [Algorithm::Hnr, Algorithm::Rrt] {
            let r = kino_plan(alg, &m.space, &s, &goal, &cfg, 100, RngSeed(1)).unwrap();
            assert!(r.result.success);
            assert_eq!(r.result.transitions, 0);
        }
    }

    #[test]
    fn kino_trace_header() {
        let m = generate_map(&MapSpec::corridor(2.0)).unwrap();
        let s = KinoState::at_rest(m.start.clone());
        let r =
            kino_hnr_plan(&m.space, &s, &m.goal, &KinoConfig::default(), 5, RngSeed(1)).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,px,py,vx,vy,stopped\n0,1,0,0,0,0\n"));
    }
}

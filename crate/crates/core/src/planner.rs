//! Position-only planners: plain RRT and the Hit-and-Run chain run until it
//! enters the goal region.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist2, FreeSpace, GoalRegion, Point};
use crate::rng::RngSeed;
use crate::sampler::hnr_next;

/// Bounding-box draws allowed per uniform sample before giving up. At a
/// free-space fraction of 1e-4 the chance of exhausting it is about e^-10.
pub const REJECTION_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Hnr,
    Rrt,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Hnr => "hnr",
            Algorithm::Rrt => "rrt",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hnr" => Ok(Algorithm::Hnr),
            "rrt" => Ok(Algorithm::Rrt),
            other => Err(Error::usage(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Outcome of one planning run. One transition is one proposal: a chain
/// step for Hit-and-Run, a sample-and-extend attempt for RRT.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub algorithm: Algorithm,
    pub path: Vec<Point>,
    pub transitions: usize,
    pub nodes: usize,
    pub success: bool,
    pub wall_time: Duration,
    pub seed: RngSeed,
}

impl PlanResult {
    pub fn path_length(&self) -> f64 {
        self.path.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }
}

/// Uniform point of the free space by rejection from its bounding box,
/// together with the number of box draws used.
pub fn uniform_point_counted<R: Rng + ?Sized>(
    space: &FreeSpace,
    rng: &mut R,
) -> Result<(Point, usize)> {
    let (lo, hi) = space.bounding_box();
    let mut x = vec![0.0; lo.len()];
    for tries in 1..=REJECTION_BUDGET {
        for k in 0..x.len() {
            x[k] = rng.random_range(lo[k]..hi[k]);
        }
        if space.contains_unchecked(&x) {
            return Ok((Point::new(x), tries));
        }
    }
    Err(Error::Environment(format!(
        "rejection sampling found no free point in {REJECTION_BUDGET} draws"
    )))
}

pub fn uniform_point<R: Rng + ?Sized>(space: &FreeSpace, rng: &mut R) -> Result<Point> {
    uniform_point_counted(space, rng).map(|(p, _)| p)
}

/// Tree of mutually visible states rooted at the start point.
#[derive(Debug, Clone)]
pub struct RrtTree {
    nodes: Vec<Point>,
    parent: Vec<Option<usize>>,
    flat: Vec<f64>,
    dim: usize,
    grid: Option<Grid>,
    pub iterations_used: usize,
}

/// Bucket grid over a planar bounding box for exact nearest queries.
#[derive(Debug, Clone)]
struct Grid {
    lo: [f64; 2],
    cell: [f64; 2],
    side: usize,
    buckets: Vec<Vec<usize>>,
}

const GRID_SIDE: usize = 128;

impl Grid {
    fn new(lo: &[f64], hi: &[f64]) -> Option<Grid> {
        let cell = [
            (hi[0] - lo[0]) / GRID_SIDE as f64,
            (hi[1] - lo[1]) / GRID_SIDE as f64,
        ];
        (cell[0] > 0.0 && cell[1] > 0.0 && cell.iter().all(|c| c.is_finite())).then(|| Grid {
            lo: [lo[0], lo[1]],
            cell,
            side: GRID_SIDE,
            buckets: vec![Vec::new(); GRID_SIDE * GRID_SIDE],
        })
    }

    /// Cell of `x`, or `None` outside the box.
    fn cell_of(&self, x: &[f64]) -> Option<(usize, usize)> {
        let i = ((x[0] - self.lo[0]) / self.cell[0]).floor();
        let j = ((x[1] - self.lo[1]) / self.cell[1]).floor();
        let n = self.side as f64;
        // The upper face belongs to the last cell.
        let clamp = |v: f64| if v == n { n - 1.0 } else { v };
        let (i, j) = (clamp(i), clamp(j));
        (i >= 0.0 && j >= 0.0 && i < n && j < n).then_some((i as usize, j as usize))
    }

    fn insert(&mut self, x: &[f64], id: usize) -> bool {
        match self.cell_of(x) {
            Some((i, j)) => {
                self.buckets[i * self.side + j].push(id);
                true
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// The target itself was added.
    Reached(usize),
    /// The farthest visible point towards the target was added.
    Partial(usize),
    /// Blocked at the nearest node or zero-length edge; nothing added.
    NoOp,
}

impl Extension {
    pub fn added(self) -> Option<usize> {
        match self {
            Extension::Reached(i) | Extension::Partial(i) => Some(i),
            Extension::NoOp => None,
        }
    }
}

impl RrtTree {
    pub fn new(root: Point) -> Self {
        let dim = root.dim();
        RrtTree {
            flat: root.coords().to_vec(),
            nodes: vec![root],
            parent: vec![None],
            dim,
            grid: None,
            iterations_used: 0,
        }
    }

    /// Tree whose nearest-node queries are accelerated by a grid over the
    /// box `[lo, hi]`. Only planar trees use the grid; results are the same
    /// as [`RrtTree::new`].
    pub fn with_bounds(root: Point, lo: &[f64], hi: &[f64]) -> Self {
        let mut tree = RrtTree::new(root);
        if tree.dim == 2 && lo.len() == 2 && hi.len() == 2 {
            tree.grid = Grid::new(lo, hi);
            tree.index_node(0);
        }
        tree
    }

    fn index_node(&mut self, id: usize) {
        if let Some(g) = &mut self.grid {
            if !g.insert(self.nodes[id].coords(), id) {
                self.grid = None;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (p, c)))
    }

    fn push(&mut self, p: Point, parent: usize) -> usize {
        self.flat.extend_from_slice(p.coords());
        self.nodes.push(p);
        self.parent.push(Some(parent));
        let id = self.nodes.len() - 1;
        self.index_node(id);
        id
    }

    /// Exact Euclidean nearest node; ties go to the older node.
    pub fn nearest(&self, x: &[f64]) -> usize {
        if let Some(g) = &self.grid {
            if let Some(i) = self.grid_nearest(g, x) {
                return i;
            }
        }
        self.scan_nearest(x)
    }

    fn scan_nearest(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.flat.chunks_exact(self.dim).enumerate() {
            let d = dist2(c, x);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Ring search outwards from the query cell. Gives up (returning `None`)
    /// once it has probed more cells than there are nodes, where a plain
    /// scan is cheaper.
    fn grid_nearest(&self, g: &Grid, x: &[f64]) -> Option<usize> {
        let (ci, cj) = g.cell_of(x)?;
        let side = g.side as isize;
        let h = g.cell[0].min(g.cell[1]);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut probed = 0usize;
        for r in 0..side {
            let (lo_i, hi_i) = (ci as isize - r, ci as isize + r);
            let (lo_j, hi_j) = (cj as isize - r, cj as isize + r);
            for i in lo_i.max(0)..=hi_i.min(side - 1) {
                let edge_i = i == lo_i || i == hi_i;
                let mut j = lo_j.max(0);
                while j <= hi_j.min(side - 1) {
                    probed += 1;
                    for &id in &g.buckets[i as usize * g.side + j as usize] {
                        let d = dist2(&self.flat[id * 2..id * 2 + 2], x);
                        if (d, id) < best {
                            best = (d, id);
                        }
                    }
                    // Interior rows only touch the two ring columns.
                    j = if edge_i || j == hi_j { j + 1 } else { hi_j };
                }
            }
            let reach = r as f64 * h;
            if best.1 != usize::MAX && best.0 <= reach * reach {
                return Some(best.1);
            }
            if probed > self.nodes.len() {
                return None;
            }
        }
        (best.1 != usize::MAX).then_some(best.1)
    }

    /// Root-to-node branch.
    pub fn branch(&self, mut i: usize) -> Vec<Point> {
        let mut path = vec![self.nodes[i].clone()];
        while let Some(p) = self.parent[i] {
            path.push(self.nodes[p].clone());
            i = p;
        }
        path.reverse();
        path
    }
}

/// One RRT extension towards `target`: connect the nearest node to the
/// target if the segment is free, otherwise to the farthest point of the
/// segment that the nearest node still sees.
pub fn rrt_extend(space: &FreeSpace, tree: &mut RrtTree, target: &Point) -> Result<Extension> {
    target.check_dim(space.dimension())?;
    let near = tree.nearest(target.coords());
    let from = &tree.nodes[near];
    let Some((dir, len)) = from.direction_to(target) else {
        return Ok(Extension::NoOp);
    };
    let (_, t_plus) = space.chord_params(from.coords(), &dir);
    if t_plus >= len {
        let i = tree.push(target.clone(), near);
        return Ok(Extension::Reached(i));
    }
    if t_plus <= space.tolerance() {
        return Ok(Extension::NoOp);
    }
    let p = from.offset(&dir, t_plus);
    Ok(Extension::Partial(tree.push(p, near)))
}

pub fn rrt_plan(
    space: &FreeSpace,
    start: &Point,
    goal: &GoalRegion,
    max_iters: usize,
    seed: RngSeed,
) -> Result<(PlanResult, RrtTree)> {
    let clock = Instant::now();
    if !space.contains(start)? {
        return Err(Error::precondition("start is outside the free space"));
    }
    let mut rng = seed.rng();
    let (lo, hi) = space.bounding_box();
    let mut tree = RrtTree::with_bounds(start.clone(), &lo, &hi);
    let mut reached = goal.contains(start).then_some(0);
    while reached.is_none() && tree.iterations_used < max_iters {
        tree.iterations_used += 1;
        let target = uniform_point(space, &mut rng)?;
        if let Some(i) = rrt_extend(space, &mut tree, &target)?.added() {
            if goal.contains(&tree.nodes[i]) {
                reached = Some(i);
            }
        }
    }
    let result = PlanResult {
        algorithm: Algorithm::Rrt,
        path: match reached {
            Some(i) => tree.branch(i),
            None => vec![start.clone()],
        },
        transitions: tree.iterations_used,
        nodes: tree.len(),
        success: reached.is_some(),
        wall_time: clock.elapsed(),
        seed,
    };
    Ok((result, tree))
}

/// Runs the Hit-and-Run chain until a state lands in the goal. The path is
/// the whole chain, unpruned.
pub fn hnr_plan(
    space: &FreeSpace,
    start: &Point,
    goal: &GoalRegion,
    max_steps: usize,
    seed: RngSeed,
) -> Result<PlanResult> {
    let clock = Instant::now();
    if !space.contains(start)? {
        return Err(Error::precondition("start is outside the free space"));
    }
    let mut rng = seed.rng();
    let mut path = vec![start.clone()];
    let mut cur = start.coords().to_vec();
    let mut success = goal.contains(start);
    while !success && path.len() - 1 < max_steps {
        cur = hnr_next(space, &cur, &mut rng);
        success = goal.contains_coords(&cur);
        path.push(Point::new(cur.clone()));
    }
    Ok(PlanResult {
        algorithm: Algorithm::Hnr,
        transitions: path.len() - 1,
        nodes: path.len(),
        path,
        success,
        wall_time: clock.elapsed(),
        seed,
    })
}

pub fn plan(
    algorithm: Algorithm,
    space: &FreeSpace,
    start: &Point,
    goal: &GoalRegion,
    budget: usize,
    seed: RngSeed,
) -> Result<PlanResult> {
    match algorithm {
        Algorithm::Hnr => hnr_plan(space, start, goal, budget, seed),
        Algorithm::Rrt => rrt_plan(space, start, goal, budget, seed).map(|(r, _)| r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolygonWithHoles;

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = RngSeed(5).rng();
        let mut tree = RrtTree::with_bounds(Point::xy(0.0, 0.0), &[-1.2, -1.2], &[1.2, 1.2]);
        assert!(tree.grid.is_some());
        for _ in 0..5000 {
            let p = Point::xy(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            tree.push(p, 0);
        }
        for _ in 0..2000 {
            let q = [rng.random_range(-1.3..1.3), rng.random_range(-1.3..1.3)];
            let brute = tree
                .nodes()
                .iter()
                .map(|n| crate::geometry::dist2(n.coords(), &q))
                .fold(f64::INFINITY, f64::min);
            let got = tree.nearest(&q);
            assert_eq!(
                crate::geometry::dist2(tree.nodes()[got].coords(), &q),
                brute
            );
            assert_eq!(got, tree.scan_nearest(&q));
        }
    }

    fn walled() -> FreeSpace {
        // Strip [0,3]x[0,1] with a wall at x in [1,1.2] open above y = 0.8.
        let outer = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 0.8],
            [1.2, 0.8],
            [1.2, 0.0],
            [3.0, 0.0],
            [3.0, 1.0],
            [0.0, 1.0],
        ];
        FreeSpace::polygon(PolygonWithHoles::new(outer, vec![]).unwrap())
    }

    #[test]
    fn uniform_point_on_box_accepts_everything() {
        let s = FreeSpace::unit_box(2);
        let mut rng = RngSeed(1).rng();
        for _ in 0..1000 {
            let (_, tries) = uniform_point_counted(&s, &mut rng).unwrap();
            assert_eq!(tries, 1);
        }
    }

    #[test]
    fn extend_to_visible_target_adds_it() {
        let s = FreeSpace::unit_box(2);
        let mut t = RrtTree::new(Point::xy(0.1, 0.1));
        let e = rrt_extend(&s, &mut t, &Point::xy(0.8, 0.9)).unwrap();
        assert_eq!(e, Extension::Reached(1));
        assert_eq!(t.nodes()[1], Point::xy(0.8, 0.9));
    }

    #[test]
    fn extend_stops_at_wall() {
        let s = walled();
        let mut t = RrtTree::new(Point::xy(0.5, 0.5));
        let e = rrt_extend(&s, &mut t, &Point::xy(2.0, 0.5)).unwrap();
        let i = match e {
            Extension::Partial(i) => i,
            other => panic!("unexpected {other:?}"),
        };
        assert!(t.nodes()[i].dist(&Point::xy(1.0, 0.5)) < 1e-9);
    }

    #[test]
    fn extend_to_existing_node_is_noop() {
        let s = FreeSpace::unit_box(2);
        let mut t = RrtTree::new(Point::xy(0.1, 0.1));
        assert_eq!(
            rrt_extend(&s, &mut t, &Point::xy(0.1, 0.1)).unwrap(),
            Extension::NoOp
        );
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn blocked_immediately_is_noop() {
        let s = walled();
        let mut t = RrtTree::new(Point::xy(1.0, 0.5));
        assert_eq!(
            rrt_extend(&s, &mut t, &Point::xy(2.0, 0.5)).unwrap(),
            Extension::NoOp
        );
    }

    #[test]
    fn start_in_goal_takes_no_transitions() {
        let s = FreeSpace::unit_box(2);
        let g = GoalRegion::ball(Point::xy(0.5, 0.5), 0.2).unwrap();
        let start = Point::xy(0.5, 0.55);
        let (r, _) = rrt_plan(&s, &start, &g, 100, RngSeed(1)).unwrap();
        assert!(r.success);
        assert_eq!(r.transitions, 0);
        assert_eq!(r.path, vec![start.clone()]);
        let h = hnr_plan(&s, &start, &g, 100, RngSeed(1)).unwrap();
        assert!(h.success && h.transitions == 0);
    }

    #[test]
    fn exhausted_budget_reports_failure() {
        let s = FreeSpace::unit_box(2);
        let g = GoalRegion::ball(Point::xy(0.9, 0.9), 1e-6).unwrap();
        let (r, tree) = rrt_plan(&s, &Point::xy(0.1, 0.1), &g, 50, RngSeed(2)).unwrap();
        assert!(!r.success);
        assert_eq!(r.transitions, 50);
        assert_eq!(tree.iterations_used, 50);
        let h = hnr_plan(&s, &Point::xy(0.1, 0.1), &g, 50, RngSeed(2)).unwrap();
        assert!(!h.success);
        assert_eq!(h.transitions, 50);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Hnr, Algorithm::Rrt] {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("prm".parse::<Algorithm>().is_err());
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::point::{dist, Point};
use crate::error::{Error, Result};

/// Target region of a planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoalRegion {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl GoalRegion {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::usage("goal radius must be positive"));
        }
        Ok(GoalRegion::Ball {
            center: center.into_inner(),
            radius,
        })
    }

    pub fn dimension(&self) -> usize {
        match self {
            GoalRegion::Ball { center, .. } => center.len(),
            GoalRegion::Box { lo, .. } => lo.len(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.contains_coords(p.coords())
    }

    pub fn contains_coords(&self, x: &[f64]) -> bool {
        match self {
            GoalRegion::Ball { center, radius } => dist(x, center) <= *radius,
            GoalRegion::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= *l && *v <= *h),
        }
    }

    /// Uniform sample from the region.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            GoalRegion::Ball { center, radius } => loop {
                let x: Vec<f64> = center
                    .iter()
                    .map(|c| c + radius * rng.random_range(-1.0..=1.0))
                    .collect();
                if dist(&x, center) <= *radius {
                    return Point::new(x);
                }
            },
            GoalRegion::Box { lo, hi } => Point::new(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| rng.random_range(*l..=*h))
                    .collect(),
            ),
        }
    }
}

use serde::{Deserialize, Serialize};
use std::ops::Index;

use crate::error::{Error, Result};

/// A point of the workspace, stored as a coordinate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point(vec![x, y])
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + t * dir`
    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        Point(self.0.iter().zip(dir).map(|(p, d)| p + t * d).collect())
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        dist2(&self.0, &other.0)
    }

    pub fn lerp(&self, other: &Point, s: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * (b - a))
                .collect(),
        )
    }

    /// Unit vector from `self` towards `other` and the distance between them,
    /// or `None` when the points coincide.
    pub fn direction_to(&self, other: &Point) -> Option<(Vec<f64>, f64)> {
        let d = other.sub(self);
        let len = norm(&d);
        if len == 0.0 {
            return None;
        }
        Some((d.iter().map(|c| c / len).collect(), len))
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point(v.to_vec())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

/// Returns `v / |v|`, or `None` for a zero or non-finite vector.
pub fn normalized(v: &[f64]) -> Option<Vec<f64>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|c| c / n).collect())
}

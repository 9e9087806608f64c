//! Cell rasterisation of a free space, used to check connectivity of
//! generated maps independently of the chord machinery.

use std::collections::VecDeque;

use super::point::Point;
use super::space::FreeSpace;

/// Membership sampled at the centres of a uniform grid over the bounding box
/// of a planar free space.
#[derive(Debug, Clone)]
pub struct Raster {
    pub lo: [f64; 2],
    pub cell: f64,
    pub nx: usize,
    pub ny: usize,
    pub inside: Vec<bool>,
}

impl Raster {
    pub fn new(space: &FreeSpace, cell: f64) -> Raster {
        assert_eq!(space.dimension(), 2, "raster is planar");
        let (lo, hi) = space.bounding_box();
        let nx = ((hi[0] - lo[0]) / cell).ceil().max(1.0) as usize;
        let ny = ((hi[1] - lo[1]) / cell).ceil().max(1.0) as usize;
        let mut inside = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let x = lo[0] + (i as f64 + 0.5) * cell;
                let y = lo[1] + (j as f64 + 0.5) * cell;
                inside.push(space.contains_unchecked(&[x, y]));
            }
        }
        Raster {
            lo: [lo[0], lo[1]],
            cell,
            nx,
            ny,
            inside,
        }
    }

    pub fn cell_of(&self, p: &Point) -> Option<usize> {
        let i = ((p[0] - self.lo[0]) / self.cell).floor();
        let j = ((p[1] - self.lo[1]) / self.cell).floor();
        if i < 0.0 || j < 0.0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        Some(j as usize * self.nx + i as usize)
    }

    pub fn inside_fraction(&self) -> f64 {
        self.inside.iter().filter(|&&b| b).count() as f64 / self.inside.len() as f64
    }

    /// 4-connected component labels of inside cells (`usize::MAX` outside)
    /// and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.inside.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.inside.len() {
            if !self.inside[start] || label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(c) = queue.pop_front() {
                let (i, j) = (c % self.nx, c / self.nx);
                let mut visit = |k: usize| {
                    if self.inside[k] && label[k] == usize::MAX {
                        label[k] = count;
                        queue.push_back(k);
                    }
                };
                if i > 0 {
                    visit(c - 1);
                }
                if i + 1 < self.nx {
                    visit(c + 1);
                }
                if j > 0 {
                    visit(c - self.nx);
                }
                if j + 1 < self.ny {
                    visit(c + self.nx);
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// True when both points fall in inside cells of the same component.
    pub fn connected(&self, p: &Point, q: &Point) -> bool {
        let (label, _) = self.components();
        match (self.cell_of(p), self.cell_of(q)) {
            (Some(a), Some(b)) => label[a] != usize::MAX && label[a] == label[b],
            _ => false,
        }
    }
}

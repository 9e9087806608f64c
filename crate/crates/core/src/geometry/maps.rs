//! Built-in map generators and the JSON map file format.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::goal::GoalRegion;
use super::point::Point;
use super::polygon::{PolygonWithHoles, Vec2};
use super::raster::Raster;
use super::space::FreeSpace;
use crate::error::{Error, Result};

pub const DEFAULT_SPIRAL_LOOPS: f64 = 2.5;
pub const DEFAULT_SPIRAL_ARM_LENGTH: f64 = 30.0;
pub const DEFAULT_SPIRAL_PITCH: f64 = 2.1;
pub const DEFAULT_CORRIDOR_LEGS: [f64; 3] = [10.0, 10.0, 10.0];

/// Recipe for a free space together with a start point and goal region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum MapSpec {
    /// Rectangular clockwise spiral corridor winding inwards from the bottom
    /// left. `arm_length` is the length of the outermost arm and `pitch` the
    /// spacing between neighbouring arm centre lines; both are absolute so
    /// that varying `arm_width` changes difficulty rather than scale.
    Spiral {
        arm_width: f64,
        loops: f64,
        arm_length: f64,
        pitch: f64,
    },
    /// Axis-aligned corridor alternating right and up legs; three legs give
    /// the two-turn S shape, one leg a straight hallway.
    Corridor {
        width: f64,
        legs: Vec<f64>,
    },
    Ball {
        radius: f64,
        dimension: usize,
    },
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// Two unit squares joined by a thin horizontal neck.
    Dumbbell {
        neck_width: f64,
        neck_length: f64,
    },
    Annulus {
        inner: f64,
        outer: f64,
    },
    PolygonFile {
        path: PathBuf,
    },
}

impl MapSpec {
    pub fn spiral(arm_width: f64) -> MapSpec {
        MapSpec::Spiral {
            arm_width,
            loops: DEFAULT_SPIRAL_LOOPS,
            arm_length: DEFAULT_SPIRAL_ARM_LENGTH,
            pitch: DEFAULT_SPIRAL_PITCH,
        }
    }

    pub fn corridor(width: f64) -> MapSpec {
        MapSpec::Corridor {
            width,
            legs: DEFAULT_CORRIDOR_LEGS.to_vec(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSpec::Spiral { .. } => "spiral",
            MapSpec::Corridor { .. } => "corridor",
            MapSpec::Ball { .. } => "ball",
            MapSpec::Box { .. } => "box",
            MapSpec::Dumbbell { .. } => "dumbbell",
            MapSpec::Annulus { .. } => "annulus",
            MapSpec::PolygonFile { .. } => "file",
        }
    }

    /// The characteristic width swept by experiments, where meaningful.
    pub fn width(&self) -> Option<f64> {
        match self {
            MapSpec::Spiral { arm_width, .. } => Some(*arm_width),
            MapSpec::Corridor { width, .. } => Some(*width),
            MapSpec::Dumbbell { neck_width, .. } => Some(*neck_width),
            _ => None,
        }
    }
}

/// A free space with a designated start point and goal region.
#[derive(Debug, Clone)]
pub struct GeneratedMap {
    pub space: FreeSpace,
    pub start: Point,
    pub goal: GoalRegion,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::usage(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

pub fn generate_map(spec: &MapSpec) -> Result<GeneratedMap> {
    match spec {
        MapSpec::Spiral {
            arm_width,
            loops,
            arm_length,
            pitch,
        } => spiral(*arm_width, *loops, *arm_length, *pitch),
        MapSpec::Corridor { width, legs } => corridor(*width, legs),
        MapSpec::Ball { radius, dimension } => {
            positive("radius", *radius)?;
            let n = *dimension;
            let space = FreeSpace::ball(vec![0.0; n], *radius)?;
            let mut start = vec![0.0; n];
            start[0] = -0.5 * radius;
            let mut goal = vec![0.0; n];
            goal[0] = 0.5 * radius;
            Ok(GeneratedMap {
                space,
                start: Point::new(start),
                goal: GoalRegion::ball(Point::new(goal), 0.1 * radius)?,
            })
        }
        MapSpec::Box { lo, hi } => {
            let space = FreeSpace::aabb(lo.clone(), hi.clone())?;
            let ext: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| h - l).collect();
            let start = lo.iter().zip(&ext).map(|(l, e)| l + 0.1 * e).collect();
            let goal = hi.iter().zip(&ext).map(|(h, e)| h - 0.1 * e).collect();
            let r = 0.1 * ext.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(GeneratedMap {
                space,
                start: Point::new(start),
                goal: GoalRegion::ball(Point::new(goal), r)?,
            })
        }
        MapSpec::Dumbbell {
            neck_width,
            neck_length,
        } => dumbbell(*neck_width, *neck_length),
        MapSpec::Annulus { inner, outer } => {
            positive("inner radius", *inner)?;
            let space = FreeSpace::shell(vec![0.0, 0.0], *inner, *outer)?;
            let mid = 0.5 * (inner + outer);
            Ok(GeneratedMap {
                space,
                start: Point::xy(mid, 0.0),
                goal: GoalRegion::ball(Point::xy(-mid, 0.0), 0.25 * (outer - inner))?,
            })
        }
        MapSpec::PolygonFile { path } => MapFile::read(path)?.into_map(),
    }
}

/// Offsets an axis-aligned centre line by `width / 2` on both sides and
/// returns the outline as a single ring.
fn thicken(centre: &[Vec2], width: f64) -> Vec<Vec2> {
    let h = 0.5 * width;
    let dir = |a: Vec2, b: Vec2| {
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
        [d[0] / l, d[1] / l]
    };
    let left = |d: Vec2| [-d[1], d[0]];
    let m = centre.len();
    let mut left_side = Vec::with_capacity(m);
    let mut right_side = Vec::with_capacity(m);
    for i in 0..m {
        let n = if i == 0 {
            left(dir(centre[0], centre[1]))
        } else if i == m - 1 {
            left(dir(centre[m - 2], centre[m - 1]))
        } else {
            let n1 = left(dir(centre[i - 1], centre[i]));
            let n2 = left(dir(centre[i], centre[i + 1]));
            let k = 1.0 + n1[0] * n2[0] + n1[1] * n2[1];
            [(n1[0] + n2[0]) / k, (n1[1] + n2[1]) / k]
        };
        let c = centre[i];
        left_side.push([c[0] + h * n[0], c[1] + h * n[1]]);
        right_side.push([c[0] - h * n[0], c[1] - h * n[1]]);
    }
    right_side.reverse();
    left_side.extend(right_side);
    left_side
}

/// Start one half-width inside the first end cap; goal ball of radius
/// `width / 2` touching the far end cap.
fn corridor_map(centre: &[Vec2], width: f64, name: &str) -> Result<GeneratedMap> {
    let poly = PolygonWithHoles::new(thicken(centre, width), vec![])?;
    let space = FreeSpace::polygon(poly).with_name(name);
    let m = centre.len();
    let step = |a: Vec2, b: Vec2, t: f64| {
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
        Point::xy(a[0] + t * d[0] / l, a[1] + t * d[1] / l)
    };
    let start = step(centre[0], centre[1], 0.5 * width);
    let goal_centre = step(centre[m - 1], centre[m - 2], 0.5 * width);
    let goal = GoalRegion::ball(goal_centre.clone(), 0.5 * width)?;
    let raster = Raster::new(&space, width / 8.0);
    if !raster.connected(&start, &goal_centre) {
        return Err(Error::usage(format!(
            "generated {name} map is not connected"
        )));
    }
    Ok(GeneratedMap { space, start, goal })
}

fn spiral(width: f64, loops: f64, arm_length: f64, pitch: f64) -> Result<GeneratedMap> {
    positive("arm width", width)?;
    positive("loops", loops)?;
    positive("arm length", arm_length)?;
    positive("pitch", pitch)?;
    if width >= pitch {
        return Err(Error::usage(format!(
            "arm width {width} must be smaller than the pitch {pitch}"
        )));
    }
    let arms = (loops * 4.0).round().max(1.0) as usize;
    // Clockwise from the bottom-left: up, right, down, left.
    const DIRS: [Vec2; 4] = [[0.0, 1.0], [1.0, 0.0], [0.0, -1.0], [-1.0, 0.0]];
    let mut centre = vec![[0.0, 0.0]];
    for i in 0..arms {
        let shrink = if i < 3 { 0 } else { (i - 1) / 2 };
        let len = arm_length - pitch * shrink as f64;
        if len <= pitch {
            return Err(Error::usage(format!(
                "spiral with {loops} loops does not fit in arm length {arm_length} at pitch {pitch}"
            )));
        }
        let p = *centre.last().unwrap();
        let d = DIRS[i % 4];
        centre.push([p[0] + len * d[0], p[1] + len * d[1]]);
    }
    corridor_map(&centre, width, "spiral")
}

fn corridor(width: f64, legs: &[f64]) -> Result<GeneratedMap> {
    positive("corridor width", width)?;
    if legs.is_empty() {
        return Err(Error::usage("corridor needs at least one leg"));
    }
    let mut centre = vec![[0.0, 0.0]];
    for (i, &len) in legs.iter().enumerate() {
        positive("corridor leg length", len)?;
        if i + 1 < legs.len() && len <= width {
            return Err(Error::usage("corridor legs must be longer than the width"));
        }
        let p = *centre.last().unwrap();
        centre.push(if i % 2 == 0 {
            [p[0] + len, p[1]]
        } else {
            [p[0], p[1] + len]
        });
    }
    corridor_map(&centre, width, "corridor")
}

fn dumbbell(neck_width: f64, neck_length: f64) -> Result<GeneratedMap> {
    positive("neck width", neck_width)?;
    positive("neck length", neck_length)?;
    if neck_width >= 1.0 {
        return Err(Error::usage("neck width must be below the bell size 1"));
    }
    let (y0, y1) = (0.5 - 0.5 * neck_width, 0.5 + 0.5 * neck_width);
    let (x1, x2) = (1.0, 1.0 + neck_length);
    let outer = vec![
        [0.0, 0.0],
        [x1, 0.0],
        [x1, y0],
        [x2, y0],
        [x2, 0.0],
        [x2 + 1.0, 0.0],
        [x2 + 1.0, 1.0],
        [x2, 1.0],
        [x2, y1],
        [x1, y1],
        [x1, 1.0],
        [0.0, 1.0],
    ];
    let space = FreeSpace::polygon(PolygonWithHoles::new(outer, vec![])?).with_name("dumbbell");
    Ok(GeneratedMap {
        space,
        start: Point::xy(0.5, 0.5),
        goal: GoalRegion::ball(Point::xy(x2 + 0.5, 0.5), 0.1)?,
    })
}

/// On-disk map: a polygon with holes plus start and goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub dimension: usize,
    pub outer: Vec<Vec2>,
    pub holes: Vec<Vec<Vec2>>,
    pub start: Vec<f64>,
    pub goal: GoalRegion,
}

impl MapFile {
    pub fn read(path: &Path) -> Result<MapFile> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_map(map: &GeneratedMap) -> Result<MapFile> {
        let poly = match map.space.as_polygon() {
            Some(p) => p.clone(),
            None => match map.space.shape() {
                super::space::Shape::Box { lo, hi } if lo.len() == 2 => PolygonWithHoles::new(
                    vec![
                        [lo[0], lo[1]],
                        [hi[0], lo[1]],
                        [hi[0], hi[1]],
                        [lo[0], hi[1]],
                    ],
                    vec![],
                )?,
                _ => {
                    return Err(Error::usage(format!(
                        "map '{}' has no polygon representation",
                        map.space.name()
                    )))
                }
            },
        };
        Ok(MapFile {
            dimension: 2,
            outer: poly.outer().to_vec(),
            holes: poly.holes().to_vec(),
            start: map.start.coords().to_vec(),
            goal: map.goal.clone(),
        })
    }

    pub fn into_map(self) -> Result<GeneratedMap> {
        if self.dimension != 2 {
            return Err(Error::usage("map files describe planar maps (dimension 2)"));
        }
        let poly = PolygonWithHoles::new(self.outer, self.holes)?;
        let space = FreeSpace::polygon(poly).with_name("file");
        let start = Point::new(self.start);
        if !space.contains(&start)? {
            return Err(Error::usage(
                "map file start point is outside the free space",
            ));
        }
        if self.goal.dimension() != 2 {
            return Err(Error::usage("goal dimension must be 2"));
        }
        Ok(GeneratedMap {
            space,
            start,
            goal: self.goal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_rejects_bad_width() {
        assert!(matches!(
            generate_map(&MapSpec::spiral(0.0)),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            generate_map(&MapSpec::spiral(-1.0)),
            Err(Error::Usage(_))
        ));
        assert!(generate_map(&MapSpec::spiral(3.0)).is_err());
    }

    #[test]
    fn corridor_is_three_rectangles() {
        let m = generate_map(&MapSpec::Corridor {
            width: 2.0,
            legs: vec![10.0, 10.0, 10.0],
        })
        .unwrap();
        let poly = m.space.as_polygon().unwrap();
        assert_eq!(poly.outer().len(), 8);
        // [0,11]x[-1,1] + [9,11]x[1,9] + [9,20]x[9,11]
        assert!((poly.area() - 60.0).abs() < 1e-9, "area {}", poly.area());
        assert_eq!(m.start, Point::xy(1.0, 0.0));
        assert!(m.space.contains(&Point::xy(10.5, 5.0)).unwrap());
        assert!(!m.space.contains(&Point::xy(5.0, 5.0)).unwrap());
    }

    #[test]
    fn map_file_round_trip() {
        let m = generate_map(&MapSpec::spiral(1.2)).unwrap();
        let f = MapFile::from_map(&m).unwrap();
        let json = f.to_json().unwrap();
        let back: MapFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        assert!(json.contains("\"ball\""));
        let again = back.into_map().unwrap();
        assert_eq!(again.start, m.start);
    }

    #[test]
    fn ball_has_no_polygon_file() {
        let m = generate_map(&MapSpec::Ball {
            radius: 1.0,
            dimension: 2,
        })
        .unwrap();
        assert!(MapFile::from_map(&m).is_err());
    }
}

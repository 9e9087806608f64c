//! Free spaces and the two oracle queries the algorithms rely on: point
//! membership and the longest visible chord through a point.

mod goal;
mod maps;
mod point;
mod polygon;
mod raster;
mod space;

pub use goal::GoalRegion;
pub use maps::{
    generate_map, GeneratedMap, MapFile, MapSpec, DEFAULT_CORRIDOR_LEGS, DEFAULT_SPIRAL_ARM_LENGTH,
    DEFAULT_SPIRAL_LOOPS, DEFAULT_SPIRAL_PITCH,
};
pub use point::{dist, dist2, dot, norm, normalized, Point};
pub use polygon::{PolygonWithHoles, Vec2};
pub use raster::Raster;
pub use space::{
    Chord, FreeSpace, ImplicitRegion, Shape, GEOMETRY_TOLERANCE, IMPLICIT_TOLERANCE,
    IMPLICIT_VISIBILITY_SAMPLES,
};

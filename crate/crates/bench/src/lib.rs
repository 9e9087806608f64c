//! Fixtures shared by the criterion benchmarks in `benches/`.

use hitrun_core::{generate_map, FreeSpace, GeneratedMap, MapSpec};

/// Maps the kernels are timed on, by name.
pub fn fixture_spaces() -> Vec<FreeSpace> {
    vec![
        FreeSpace::unit_box(2).with_name("box"),
        FreeSpace::unit_ball(2).with_name("disk"),
        spiral().space,
    ]
}

/// The default-width spiral used by the planner benchmarks.
pub fn spiral() -> GeneratedMap {
    generate_map(&MapSpec::spiral(1.2)).expect("default spiral is valid")
}

/// The default-width two-turn corridor used by the kinematic benchmarks.
pub fn corridor() -> GeneratedMap {
    generate_map(&MapSpec::corridor(2.0)).expect("default corridor is valid")
}

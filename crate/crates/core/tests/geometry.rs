use hitrun_core::planner::uniform_point_counted;
use hitrun_core::{generate_map, FreeSpace, MapSpec, Point, RngSeed};

/// Largest `t` such that every sample of `[u, u + s dir]`, `s <= t`, is inside.
fn scan_extent(space: &FreeSpace, u: &Point, dir: &[f64], max: f64, step: f64) -> f64 {
    let mut t = 0.0;
    while t + step <= max {
        if !space.contains(&u.offset(dir, t + step)).unwrap() {
            break;
        }
        t += step;
    }
    t
}

#[test]
fn spiral_start_and_goal_are_inside() {
    let map = generate_map(&MapSpec::spiral(1.2)).unwrap();
    assert!(map.space.contains(&map.start).unwrap());
    let mut rng = RngSeed(3).rng();
    let mut inside = 0;
    for _ in 0..2000 {
        let p = map.goal.sample(&mut rng);
        inside += usize::from(map.space.contains(&p).unwrap());
    }
    assert_eq!(inside, 2000);
}

#[test]
fn spiral_chord_stops_at_inner_wall() {
    let map = generate_map(&MapSpec::spiral(1.2)).unwrap();
    // Start of the outer arm, looking right across the first inner wall.
    let u = Point::xy(0.0, 5.0);
    assert!(map.space.contains(&u).unwrap());
    let dir = [1.0, 0.0];
    let chord = map.space.chord(&u, &dir).unwrap();
    let scanned = scan_extent(&map.space, &u, &dir, 40.0, 1e-3);
    let reach = chord.b.coords()[0] - u.coords()[0];
    assert!(
        (reach - scanned).abs() < 2e-3,
        "chord {reach} vs scan {scanned}"
    );
    assert!(reach < 1.0, "chord crossed the wall: {reach}");
}

#[test]
fn chords_agree_with_dense_scans() {
    let map = generate_map(&MapSpec::spiral(1.2)).unwrap();
    let mut rng = RngSeed(4).rng();
    for _ in 0..50 {
        let (u, _) = uniform_point_counted(&map.space, &mut rng).unwrap();
        let th: f64 = rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::TAU);
        let dir = [th.cos(), th.sin()];
        let chord = map.space.chord(&u, &dir).unwrap();
        let fwd = chord.b.dist(&u);
        let scanned = scan_extent(&map.space, &u, &dir, 50.0, 1e-3);
        assert!(
            (fwd - scanned).abs() < 2e-3,
            "chord {fwd} vs scan {scanned}"
        );
    }
}

#[test]
fn sees_matches_segment_scan_in_corridor() {
    let map = generate_map(&MapSpec::corridor(2.0)).unwrap();
    let mut rng = RngSeed(5).rng();
    for _ in 0..300 {
        let (u, _) = uniform_point_counted(&map.space, &mut rng).unwrap();
        let (v, _) = uniform_point_counted(&map.space, &mut rng).unwrap();
        let d = u.dist(&v);
        let Some((dir, _)) = u.direction_to(&v) else {
            continue;
        };
        let steps = (d / 1e-3).ceil() as usize;
        let clear = (0..=steps).all(|k| {
            map.space
                .contains(&u.offset(&dir, d * k as f64 / steps as f64))
                .unwrap()
        });
        // Grazing segments can disagree with a finite scan; only check clear cases.
        let margin_ok = map.space.boundary_distance(&u).unwrap() > 1e-2;
        if margin_ok && clear {
            assert!(map.space.sees(&u, &v).unwrap());
        }
        if !clear {
            assert!(!map.space.sees(&u, &v).unwrap());
        }
    }
}

#[test]
fn spiral_diameter_is_the_widest_vertex_pair() {
    let map = generate_map(&MapSpec::spiral(1.2)).unwrap();
    let poly = map.space.as_polygon().unwrap();
    let verts: Vec<[f64; 2]> = poly
        .outer()
        .iter()
        .chain(poly.holes().iter().flatten())
        .copied()
        .collect();
    let mut best: f64 = 0.0;
    for a in &verts {
        for b in &verts {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    assert!((map.space.diameter() - best).abs() < 1e-9);
}

#[test]
fn square_diameter() {
    let sq = FreeSpace::aabb(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
    assert!((sq.diameter() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn spiral_acceptance_rate_matches_raster_area() {
    let map = generate_map(&MapSpec::spiral(1.2)).unwrap();
    let (lo, hi) = map.space.bounding_box();
    let n = 600;
    let mut inside = 0;
    for i in 0..n {
        for j in 0..n {
            let x = lo[0] + (i as f64 + 0.5) / n as f64 * (hi[0] - lo[0]);
            let y = lo[1] + (j as f64 + 0.5) / n as f64 * (hi[1] - lo[1]);
            inside += usize::from(map.space.contains(&Point::xy(x, y)).unwrap());
        }
    }
    let area_ratio = inside as f64 / (n * n) as f64;
    let mut rng = RngSeed(6).rng();
    let draws: usize = (0..20_000)
        .map(|_| uniform_point_counted(&map.space, &mut rng).unwrap().1)
        .sum();
    let acceptance = 20_000.0 / draws as f64;
    assert!(
        (acceptance - area_ratio).abs() < 0.02,
        "{acceptance} vs {area_ratio}"
    );
}

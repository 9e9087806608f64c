use std::f64::consts::PI;

use hitrun_core::metrics::{
    check_isoperimetry, conductance_lower_bound, empirical_conductance, ConstantsProfile,
    SlabPartition,
};
use hitrun_core::planner::uniform_point;
use hitrun_core::sampler::{
    estimate_f, hnr_chain, invisible_mass, occupancy_tv_uniform, proposal_tv, random_direction,
};
use hitrun_core::stats::chi_square_uniform;
use hitrun_core::{FreeSpace, Point, RngSeed};

#[test]
fn directions_are_uniform_in_angle_and_centred() {
    let mut rng = RngSeed(10).rng();
    let n = 100_000;
    let mut counts = vec![0u64; 36];
    let (mut sx, mut sy) = (0.0, 0.0);
    for _ in 0..n {
        let d = random_direction(2, &mut rng).unwrap();
        assert!((d[0].hypot(d[1]) - 1.0).abs() <= 1e-12);
        sx += d[0];
        sy += d[1];
        let th = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
        counts[((th / (2.0 * PI) * 36.0) as usize).min(35)] += 1;
    }
    let (_, p) = chi_square_uniform(&counts);
    assert!(p > 0.01, "p = {p}");
    let tol = 3.0 / (n as f64).sqrt();
    assert!((sx / n as f64).abs() < tol && (sy / n as f64).abs() < tol);
}

#[test]
#[ignore = "TV < 0.05 is below the multinomial noise floor (about 0.084) for 9000 draws on 400 bins"]
fn chain_from_a_corner_reaches_uniform_occupancy() {
    let space = FreeSpace::unit_box(2);
    let trace = hnr_chain(&space, &Point::xy(0.01, 0.01), 10_000, RngSeed(11)).unwrap();
    assert!(trace.states.iter().all(|p| space.contains(p).unwrap()));
    let tv = occupancy_tv_uniform(&space, &trace.states[1001..], 20, 1);
    assert!(tv < 0.05, "tv = {tv}");
}

#[test]
fn corner_chain_occupancy_is_within_iid_noise() {
    let space = FreeSpace::unit_box(2);
    let trace = hnr_chain(&space, &Point::xy(0.01, 0.01), 10_000, RngSeed(11)).unwrap();
    let chain_tv = occupancy_tv_uniform(&space, &trace.states[1001..], 20, 1);
    let mut rng = RngSeed(19).rng();
    let iid: Vec<Point> = (0..trace.states.len() - 1001)
        .map(|_| uniform_point(&space, &mut rng).unwrap())
        .collect();
    let iid_tv = occupancy_tv_uniform(&space, &iid, 20, 1);
    assert!(chain_tv < 1.5 * iid_tv, "chain {chain_tv} vs iid {iid_tv}");
}

#[test]
fn f_at_disk_centre_is_an_eighth() {
    let disk = FreeSpace::unit_ball(2);
    let f = estimate_f(&disk, &Point::zeros(2), 100_000, &mut RngSeed(12).rng()).unwrap();
    assert!((f - 0.125).abs() < 0.01, "F = {f}");
}

#[test]
fn proposal_tv_of_a_point_with_itself_is_noise() {
    let space = FreeSpace::unit_box(2);
    let u = Point::xy(0.4, 0.4);
    let tv = proposal_tv(&space, &u, &u, 10, 100_000, &mut RngSeed(13).rng()).unwrap();
    assert!(tv < 0.03, "tv = {tv}");
}

#[test]
fn nearby_points_have_close_kernels() {
    // Deep inside the disk; both points far from the boundary.
    let disk = FreeSpace::unit_ball(2);
    let (u, v) = (Point::xy(0.0, 0.0), Point::xy(0.01, 0.0));
    let eps = 0.5;
    let tv = proposal_tv(&disk, &u, &v, 10, 200_000, &mut RngSeed(14).rng()).unwrap();
    let bound = 1.0 - eps / (8.0 * 4f64.exp() * 2.0);
    assert!(tv < bound, "tv = {tv}, bound {bound}");
}

#[test]
fn annulus_invisible_mass_is_controlled_by_separation() {
    let annulus = FreeSpace::shell(vec![0.0, 0.0], 0.5, 1.0).unwrap();
    let (eps, sep) = (0.1, 0.05);
    let kappa: f64 = 1.0 / 0.5;
    let factor = (4.0 / PI).max(kappa / (PI / 8.0).sin());
    let mut rng = RngSeed(15).rng();
    let n = 20_000;
    for k in 0..8 {
        let th = k as f64 * PI / 4.0;
        let r = 0.75;
        let u = Point::xy(r * th.cos(), r * th.sin());
        let v = Point::xy(r * th.cos() - sep * th.sin(), r * th.sin() + sep * th.cos());
        let m = invisible_mass(&annulus, &u, &v, n, &mut rng).unwrap();
        let sigma = (m * (1.0 - m) / n as f64).sqrt();
        assert!(m <= factor * sep / eps + 3.0 * sigma, "mass {m}");
    }
    let u = Point::xy(0.0, 0.75);
    assert_eq!(
        invisible_mass(
            &FreeSpace::unit_box(2),
            &Point::xy(0.2, 0.3),
            &Point::xy(0.6, 0.7),
            1000,
            &mut rng
        )
        .unwrap(),
        0.0
    );
    assert_eq!(
        invisible_mass(&annulus, &u, &u, 1000, &mut rng).unwrap(),
        0.0
    );
}

#[test]
fn half_box_conductance_is_symmetric_and_positive() {
    let space = FreeSpace::unit_box(2);
    let left =
        empirical_conductance(&space, |x| x[0] < 0.5, 100_000, &mut RngSeed(16).rng()).unwrap();
    let right =
        empirical_conductance(&space, |x| x[0] >= 0.5, 100_000, &mut RngSeed(16).rng()).unwrap();
    assert!(left.value > 0.0);
    assert!((left.value - right.value).abs() < 1e-12);
}

#[test]
fn disk_conductance_exceeds_the_lower_bound() {
    let disk = FreeSpace::unit_ball(2);
    let est = empirical_conductance(&disk, |x| x[0] < 0.0, 50_000, &mut RngSeed(17).rng()).unwrap();
    let profile = ConstantsProfile {
        l_sigma: 1.0,
        l_omega: 1.0,
        kappa: 1.0,
        r: 1.0,
        n: 2,
        d_sigma: 2.0,
        d_omega: 2.0,
    };
    let phi = conductance_lower_bound(&profile, None).unwrap().phi;
    assert!(
        est.value - 3.0 * est.std_err >= phi,
        "{} vs {phi}",
        est.value
    );
}

#[test]
fn isoperimetry_on_diameter_bands() {
    for width in [0.05, 0.1, 0.2] {
        let part = SlabPartition {
            angle: 0.0,
            offset: 0.0,
            width,
        };
        let rep = check_isoperimetry(1.0, &part, 100_000, &mut RngSeed(18).rng()).unwrap();
        assert!(rep.holds, "width {width}: {rep:?}");
    }
}

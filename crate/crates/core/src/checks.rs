//! Named batches of Monte-Carlo checks, each producing [`CheckReport`]s.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{generate_map, FreeSpace, MapSpec, Point};
use crate::metrics::{
    ball_r_epsilon, check_chain_triangle_fuzz, check_cross_ratio_lemma,
    check_cross_ratio_lower_bound, check_isoperimetry, check_lipschitz_identity, CheckReport,
    SlabPartition,
};
use crate::planner::uniform_point;
use crate::rng::RngSeed;
use crate::sampler::{
    density_histogram_tv, estimate_f, hnr_walk, occupancy_tv_uniform, one_step_samples,
};
use crate::stats::{chi_square_uniform, ks_statistic, GridHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Density,
    Uniformity,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "density" => Ok(Suite::Density),
            "uniformity" => Ok(Suite::Uniformity),
            other => Err(Error::usage(format!("unknown suite '{other}'"))),
        }
    }
}

/// Default trial count per checker.
pub const DEFAULT_TRIALS: usize = 10_000;

pub fn run_suite(suite: Suite, trials: usize, seed: RngSeed) -> Result<Vec<CheckReport>> {
    if trials == 0 {
        return Err(Error::usage("trials must be positive"));
    }
    match suite {
        Suite::Lemmas => lemmas(trials, seed),
        Suite::Density => density(trials, seed),
        Suite::Uniformity => uniformity(trials, seed),
    }
}

fn threshold_report(
    checker: &str,
    trials: usize,
    value: f64,
    limit: f64,
    config: serde_json::Value,
) -> CheckReport {
    let ok = value < limit;
    CheckReport {
        checker: checker.to_string(),
        trials,
        violations: usize::from(!ok),
        min_margin: Some(limit - value),
        config,
        skipped: None,
    }
}

/// Maps used by the cross-ratio lower-bound check.
pub fn lower_bound_maps() -> Result<Vec<FreeSpace>> {
    Ok(vec![
        FreeSpace::unit_box(2).with_name("box"),
        FreeSpace::unit_ball(2).with_name("disk"),
        generate_map(&MapSpec::spiral(1.2))?.space,
    ])
}

fn lemmas(trials: usize, seed: RngSeed) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    out.push(check_cross_ratio_lemma(
        1.0,
        0.1,
        trials,
        &mut seed.derive(&[0]).rng(),
    )?);
    out.push(check_chain_triangle_fuzz(
        trials,
        &mut seed.derive(&[1]).rng(),
    )?);
    for (k, space) in lower_bound_maps()?.iter().enumerate() {
        out.push(check_cross_ratio_lower_bound(
            space,
            trials,
            &mut seed.derive(&[2, k as u64]).rng(),
        )?);
    }
    let r_eps = ball_r_epsilon(1.0, 0.1)?;
    out.push(check_lipschitz_identity(
        &FreeSpace::unit_ball(2),
        0.1,
        r_eps,
        trials,
        &mut seed.derive(&[3]).rng(),
    )?);
    out.push(isoperimetry_report(trials.max(10_000), seed.derive(&[4]))?);
    Ok(out)
}

/// Band partitions of the unit disk: the three fixed widths through the
/// centre, then 50 random bands.
pub fn isoperimetry_report(samples: usize, seed: RngSeed) -> Result<CheckReport> {
    let mut rng = seed.rng();
    let mut parts: Vec<SlabPartition> = [0.05, 0.1, 0.2]
        .iter()
        .map(|&width| SlabPartition {
            angle: 0.0,
            offset: 0.0,
            width,
        })
        .collect();
    for _ in 0..50 {
        parts.push(SlabPartition {
            angle: rng.random_range(0.0..PI),
            offset: rng.random_range(-0.6..0.6),
            width: rng.random_range(0.02..0.3),
        });
    }
    let mut report = CheckReport {
        checker: "isoperimetry".to_string(),
        trials: 0,
        violations: 0,
        min_margin: None,
        config: serde_json::json!({ "radius": 1.0, "samples": samples, "partitions": parts.len() }),
        skipped: None,
    };
    for p in &parts {
        let rep = check_isoperimetry(1.0, p, samples, &mut rng)?;
        report.trials += 1;
        if !rep.holds {
            report.violations += 1;
        }
        // Margin in units of the Monte-Carlo standard deviation.
        let m = if rep.sigma > 0.0 {
            rep.margin / rep.sigma
        } else {
            rep.margin
        };
        report.min_margin = Some(report.min_margin.map_or(m, |x: f64| x.min(m)));
    }
    Ok(report)
}

/// One-step distances from the centre of the unit disk, KS against
/// Uniform(0, 1).
pub fn centre_step_ks(samples: usize, seed: RngSeed) -> Result<f64> {
    let disk = FreeSpace::unit_ball(2);
    let centre = Point::zeros(2);
    let mut d: Vec<f64> = one_step_samples(&disk, &centre, samples, &mut seed.rng())?
        .iter()
        .map(|w| w.dist(&centre))
        .collect();
    Ok(ks_statistic(&mut d, |x| x.clamp(0.0, 1.0)))
}

/// Smallest ratio `estimate_f(u) / (h / 16)` over `points` uniform points
/// of `space`, where `h` is the distance of `u` to the boundary.
pub fn f_bound_ratio(
    space: &FreeSpace,
    points: usize,
    samples: usize,
    seed: RngSeed,
) -> Result<f64> {
    let mut rng = seed.rng();
    let mut worst = f64::INFINITY;
    let mut done = 0;
    while done < points {
        let u = uniform_point(space, &mut rng)?;
        let h = space.boundary_distance(&u)?;
        if h <= 0.0 {
            continue;
        }
        let f = estimate_f(space, &u, samples, &mut rng)?;
        worst = worst.min(f / (h / 16.0));
        done += 1;
    }
    Ok(worst)
}

fn density(trials: usize, seed: RngSeed) -> Result<Vec<CheckReport>> {
    let samples = trials * 10;
    let mut out = Vec::new();
    let ks = centre_step_ks(samples, seed.derive(&[0]))?;
    out.push(threshold_report(
        "centre_step_law",
        samples,
        ks,
        0.01,
        serde_json::json!({ "map": "disk", "ks": ks }),
    ));

    let boxed = FreeSpace::unit_box(2);
    let u = Point::xy(0.3, 0.6);
    let (tv, integral) =
        density_histogram_tv(&boxed, &u, 20, 16, samples, &mut seed.derive(&[1]).rng())?;
    out.push(threshold_report(
        "proposal_density_match",
        samples,
        tv,
        0.05,
        serde_json::json!({ "map": "box", "u": u, "bins": 20, "tv": tv }),
    ));
    let err = (integral - 1.0).abs();
    out.push(threshold_report(
        "proposal_density_integral",
        1,
        err,
        0.01,
        serde_json::json!({ "map": "box", "u": u, "integral": integral }),
    ));

    let spaces = [
        FreeSpace::unit_box(2).with_name("box"),
        FreeSpace::unit_ball(2).with_name("disk"),
    ];
    for (k, space) in spaces.iter().enumerate() {
        let points = (trials / 100).max(1);
        let worst = f_bound_ratio(space, points, 10_000, seed.derive(&[2, k as u64]))?;
        out.push(CheckReport {
            checker: "f_quantile_bound".to_string(),
            trials: points,
            violations: usize::from(worst < 1.0),
            min_margin: Some(worst - 1.0),
            config: serde_json::json!({ "map": space.name(), "samples_per_point": 10_000 }),
            skipped: None,
        });
    }
    Ok(out)
}

/// Occupancy TV of a unit-box chain against the uniform law on a
/// `bins` x `bins` grid.
pub fn box_chain_tv(steps: usize, burn_in: usize, bins: usize, seed: RngSeed) -> Result<f64> {
    let space = FreeSpace::unit_box(2);
    let states = hnr_walk(
        &space,
        &Point::xy(0.5, 0.5),
        burn_in + steps,
        &mut seed.rng(),
    )?;
    Ok(occupancy_tv_uniform(
        &space,
        &states[burn_in + 1..],
        bins,
        1,
    ))
}

fn uniformity(trials: usize, seed: RngSeed) -> Result<Vec<CheckReport>> {
    let steps = trials * 10;
    let burn_in = trials;
    let tv = box_chain_tv(steps, burn_in, 20, seed.derive(&[0]))?;
    let mut out = vec![threshold_report(
        "chain_occupancy",
        steps,
        tv,
        0.05,
        serde_json::json!({ "map": "box", "burn_in": burn_in, "bins": 20, "tv": tv }),
    )];

    let space = FreeSpace::unit_box(2);
    let mut rng = seed.derive(&[1]).rng();
    let mut h = GridHistogram::new(vec![0.0, 0.0], vec![1.0, 1.0], 10);
    for _ in 0..steps {
        h.add(uniform_point(&space, &mut rng)?.coords());
    }
    let (stat, p) = chi_square_uniform(h.counts());
    out.push(CheckReport {
        checker: "rejection_uniformity".to_string(),
        trials: steps,
        violations: usize::from(p <= 0.01),
        min_margin: Some(p - 0.01),
        config: serde_json::json!({ "map": "box", "bins": 10, "chi_square": stat, "p_value": p }),
        skipped: None,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!("lemmas".parse::<Suite>().unwrap(), Suite::Lemmas);
        assert!("nope".parse::<Suite>().unwrap_err().is_usage());
    }

    #[test]
    fn small_lemma_suite_passes() {
        let reps = run_suite(Suite::Lemmas, 300, RngSeed(1)).unwrap();
        assert_eq!(reps.len(), 7);
        for r in &reps {
            assert!(r.passed(), "{r:?}");
        }
    }
}

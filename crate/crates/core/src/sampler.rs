//! The Hit-and-Run kernel: pick a uniformly random direction, then move to a
//! uniform point of the longest chord of the free space through the current
//! state in that direction. Also the closed-form one-step density and a few
//! kernel-level Monte-Carlo diagnostics.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{dist, Chord, FreeSpace, Point};
use crate::rng::RngSeed;
use crate::stats::{quantile, total_variation, GridHistogram};
use crate::volume::unit_ball_volume;

/// Smallest sample count accepted by [`estimate_f`].
pub const MIN_F_SAMPLES: usize = 1000;

/// Uniform direction on the unit sphere S^{n-1}, drawn as a normalised
/// isotropic Gaussian.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::usage(format!(
            "direction dimension must be >= 2, got {n}"
        )));
    }
    Ok(gaussian_direction(n, rng))
}

pub(crate) fn gaussian_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-300 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// One Hit-and-Run transition.
#[derive(Debug, Clone)]
pub struct ProposalSample {
    pub from: Point,
    pub to: Point,
    pub chord: Chord,
    pub step_length: f64,
}

pub fn hnr_step<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    rng: &mut R,
) -> Result<ProposalSample> {
    if !space.contains(u)? {
        return Err(Error::precondition(
            "Hit-and-Run step from a point outside the free space",
        ));
    }
    let dir = gaussian_direction(space.dimension(), rng);
    let chord = space.chord(u, &dir)?;
    let t = if chord.is_degenerate() {
        0.0
    } else {
        rng.random_range(chord.t_minus..=chord.t_plus)
    };
    let to = u.offset(&dir, t);
    Ok(ProposalSample {
        from: u.clone(),
        step_length: t.abs(),
        to,
        chord,
    })
}

/// Next state only; skips building the [`ProposalSample`].
pub(crate) fn hnr_next<R: Rng + ?Sized>(space: &FreeSpace, u: &[f64], rng: &mut R) -> Vec<f64> {
    let dir = gaussian_direction(space.dimension(), rng);
    let (tm, tp) = space.chord_params(u, &dir);
    let t = if tp > tm {
        rng.random_range(tm..=tp)
    } else {
        0.0
    };
    u.iter().zip(&dir).map(|(p, d)| p + t * d).collect()
}

/// Accepted states of a Hit-and-Run chain, starting point included.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub states: Vec<Point>,
    pub seed: Option<RngSeed>,
    pub steps: usize,
    pub space_id: String,
}

impl ChainTrace {
    /// CSV with header `step,x0,...,x{n-1}`, one row per state.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_trace_csv(&self.states, out)
    }
}

pub fn write_trace_csv<W: Write>(states: &[Point], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let n = states.first().map_or(0, Point::dim);
    let mut header = vec!["step".to_string()];
    header.extend((0..n).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for (i, p) in states.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.coords().iter().map(|c| c.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `steps` transitions from `start` with the given RNG.
pub fn hnr_walk<R: Rng + ?Sized>(
    space: &FreeSpace,
    start: &Point,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !space.contains(start)? {
        return Err(Error::precondition("chain start is outside the free space"));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(start.clone());
    let mut cur = start.coords().to_vec();
    for _ in 0..steps {
        cur = hnr_next(space, &cur, rng);
        states.push(Point::new(cur.clone()));
    }
    Ok(states)
}

/// Seeded chain: identical seeds give identical traces.
pub fn hnr_chain(
    space: &FreeSpace,
    start: &Point,
    steps: usize,
    seed: RngSeed,
) -> Result<ChainTrace> {
    let mut rng = seed.rng();
    let states = hnr_walk(space, start, steps, &mut rng)?;
    Ok(ChainTrace {
        states,
        seed: Some(seed),
        steps,
        space_id: space.name().to_string(),
    })
}

/// Value of the one-step density `f_u(v)`. The density blows up at `v = u`,
/// which is reported separately instead of as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Finite(f64),
    Singular,
}

impl Density {
    pub fn value(self) -> Option<f64> {
        match self {
            Density::Finite(v) => Some(v),
            Density::Singular => None,
        }
    }
}

/// `f_u(v) = 2 * 1{v visible from u} / (n * pi_n * |chord(u,v)| * |u - v|^(n-1))`.
pub fn proposal_density(space: &FreeSpace, u: &Point, v: &Point) -> Result<Density> {
    let n = space.dimension();
    v.check_dim(n)?;
    if !space.contains(u)? {
        return Err(Error::precondition(
            "density base point is outside the free space",
        ));
    }
    let Some((dir, r)) = u.direction_to(v) else {
        return Ok(Density::Singular);
    };
    if !space.sees_unchecked(u.coords(), v.coords()) {
        return Ok(Density::Finite(0.0));
    }
    let (tm, tp) = space.chord_params(u.coords(), &dir);
    let chord_len = tp - tm;
    let denom = n as f64 * unit_ball_volume(n) * chord_len * r.powi(n as i32 - 1);
    Ok(Density::Finite(2.0 / denom))
}

/// `samples` independent one-step proposals from `u`.
pub fn one_step_samples<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !space.contains(u)? {
        return Err(Error::precondition(
            "proposal base point is outside the free space",
        ));
    }
    Ok((0..samples)
        .map(|_| Point::new(hnr_next(space, u.coords(), rng)))
        .collect())
}

/// Empirical 1/8-quantile of the one-step displacement `|w - u|`.
pub fn estimate_f<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples < MIN_F_SAMPLES {
        return Err(Error::usage(format!(
            "estimate_f needs at least {MIN_F_SAMPLES} samples, got {samples}"
        )));
    }
    let mut d: Vec<f64> = one_step_samples(space, u, samples, rng)?
        .iter()
        .map(|w| w.dist(u))
        .collect();
    Ok(quantile(&mut d, 0.125))
}

/// Total variation between the one-step laws from `u` and from `v`,
/// estimated from histograms on a shared grid over the bounding box.
pub fn proposal_tv<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    v: &Point,
    grid_resolution: usize,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi) = space.bounding_box();
    let mut hu = GridHistogram::new(lo.clone(), hi.clone(), grid_resolution);
    let mut hv = GridHistogram::new(lo, hi, grid_resolution);
    for w in one_step_samples(space, u, samples, rng)? {
        hu.add(w.coords());
    }
    for w in one_step_samples(space, v, samples, rng)? {
        hv.add(w.coords());
    }
    Ok(total_variation(&hu.probabilities(), &hv.probabilities()))
}

/// Fraction of one-step samples from `u` that `v` cannot see.
pub fn invisible_mass<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    v: &Point,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if !space.contains(v)? {
        return Err(Error::precondition("viewpoint is outside the free space"));
    }
    let hidden = one_step_samples(space, u, samples, rng)?
        .iter()
        .filter(|w| !space.sees_unchecked(v.coords(), w.coords()))
        .count();
    Ok(hidden as f64 / samples.max(1) as f64)
}

/// Histogram of chain states after discarding `burn_in`, compared with the
/// uniform law on the free space (cells weighted by their inside fraction,
/// estimated with `sub` x `sub` membership probes per cell).
pub fn occupancy_tv_uniform(space: &FreeSpace, states: &[Point], bins: usize, sub: usize) -> f64 {
    let (lo, hi) = space.bounding_box();
    let mut h = GridHistogram::new(lo, hi, bins);
    for s in states {
        h.add(s.coords());
    }
    let reference = uniform_cell_weights(space, &h, sub);
    total_variation(&h.probabilities(), &reference)
}

fn uniform_cell_weights(space: &FreeSpace, h: &GridHistogram, sub: usize) -> Vec<f64> {
    let cells = h.counts().len();
    let mut w = Vec::with_capacity(cells);
    for idx in 0..cells {
        let (lo, side) = h.cell_bounds(idx);
        let mut inside = 0usize;
        let mut total = 0usize;
        let n = lo.len();
        let probes = sub.pow(n as u32);
        for k in 0..probes {
            let mut rem = k;
            let x: Vec<f64> = (0..n)
                .map(|d| {
                    let b = rem % sub;
                    rem /= sub;
                    lo[d] + (b as f64 + 0.5) / sub as f64 * side[d]
                })
                .collect();
            total += 1;
            if space.contains_unchecked(&x) {
                inside += 1;
            }
        }
        w.push(inside as f64 / total as f64);
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Mass of the one-step law from `u` in each cell of a `bins`-per-axis grid
/// over the bounding box, by midpoint quadrature of [`proposal_density`]
/// with `sub` probes per axis and cell. Probes that coincide with `u` are
/// skipped.
pub fn density_cell_masses(
    space: &FreeSpace,
    u: &Point,
    bins: usize,
    sub: usize,
) -> Result<Vec<f64>> {
    if bins == 0 || sub == 0 {
        return Err(Error::usage("grid needs at least one bin and one probe"));
    }
    let (lo, hi) = space.bounding_box();
    let h = GridHistogram::new(lo, hi, bins);
    let n = space.dimension();
    let probes = sub.pow(n as u32);
    let mut masses = Vec::with_capacity(h.counts().len());
    for idx in 0..h.counts().len() {
        let (clo, side) = h.cell_bounds(idx);
        let cell_vol: f64 = side.iter().product();
        let mut acc = 0.0;
        for k in 0..probes {
            let mut rem = k;
            let x: Vec<f64> = (0..n)
                .map(|d| {
                    let b = rem % sub;
                    rem /= sub;
                    clo[d] + (b as f64 + 0.5) / sub as f64 * side[d]
                })
                .collect();
            if !space.contains_unchecked(&x) {
                continue;
            }
            if let Density::Finite(f) = proposal_density(space, u, &Point::new(x))? {
                acc += f;
            }
        }
        masses.push(acc * cell_vol / probes as f64);
    }
    Ok(masses)
}

/// Total variation between `samples` one-step draws from `u`, binned on the
/// grid, and the quadrature masses of [`density_cell_masses`] (normalised).
/// Also returns the unnormalised quadrature total.
pub fn density_histogram_tv<R: Rng + ?Sized>(
    space: &FreeSpace,
    u: &Point,
    bins: usize,
    sub: usize,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let masses = density_cell_masses(space, u, bins, sub)?;
    let total: f64 = masses.iter().sum();
    let expected: Vec<f64> = masses.iter().map(|m| m / total).collect();
    let (lo, hi) = space.bounding_box();
    let mut h = GridHistogram::new(lo, hi, bins);
    for w in one_step_samples(space, u, samples, rng)? {
        h.add(w.coords());
    }
    Ok((total_variation(&h.probabilities(), &expected), total))
}

/// Distances of consecutive states; used by trace consumers.
pub fn step_lengths(states: &[Point]) -> Vec<f64> {
    states
        .windows(2)
        .map(|w| dist(w[0].coords(), w[1].coords()))
        .collect()
}

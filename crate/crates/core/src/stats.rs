//! Small statistics helpers shared by the diagnostics: grid histograms,
//! total variation, Kolmogorov-Smirnov and chi-square uniformity tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Counts over a uniform grid spanning an axis-aligned box. Points outside
/// the box are clamped into the border cells.
#[derive(Debug, Clone)]
pub struct GridHistogram {
    lo: Vec<f64>,
    hi: Vec<f64>,
    bins: usize,
    counts: Vec<u64>,
    total: u64,
}

impl GridHistogram {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, bins: usize) -> Self {
        assert!(bins > 0);
        let cells = bins.pow(lo.len() as u32);
        GridHistogram {
            lo,
            hi,
            bins,
            counts: vec![0; cells],
            total: 0,
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn cell_index(&self, x: &[f64]) -> usize {
        let mut idx = 0;
        for k in (0..self.lo.len()).rev() {
            let f = (x[k] - self.lo[k]) / (self.hi[k] - self.lo[k]);
            let b = ((f * self.bins as f64).floor().max(0.0) as usize).min(self.bins - 1);
            idx = idx * self.bins + b;
        }
        idx
    }

    /// Lower corner and side lengths of cell `idx`.
    pub fn cell_bounds(&self, idx: usize) -> (Vec<f64>, Vec<f64>) {
        let mut rem = idx;
        let mut lo = Vec::with_capacity(self.lo.len());
        let mut side = Vec::with_capacity(self.lo.len());
        for k in 0..self.lo.len() {
            let b = rem % self.bins;
            rem /= self.bins;
            let w = (self.hi[k] - self.lo[k]) / self.bins as f64;
            lo.push(self.lo[k] + b as f64 * w);
            side.push(w);
        }
        (lo, side)
    }

    pub fn add(&mut self, x: &[f64]) {
        let i = self.cell_index(x);
        self.counts[i] += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

/// Total variation distance between two discrete distributions on the same
/// support: half the L1 distance.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Pearson chi-square statistic and its p-value for counts against equal
/// expected frequencies.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let k = counts.len();
    let n: u64 = counts.iter().sum();
    let expected = n as f64 / k as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((k - 1) as f64).expect("k >= 2");
    (stat, 1.0 - dist.cdf(stat))
}

/// Empirical `q`-quantile using the lower order statistic.
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.total_cmp(b));
    let idx = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len()) - 1;
    values[idx]
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_indexing() {
        let mut h = GridHistogram::new(vec![0.0, 0.0], vec![1.0, 2.0], 4);
        h.add(&[0.1, 0.1]);
        h.add(&[0.9, 1.9]);
        h.add(&[1.0, 2.0]);
        assert_eq!(h.counts()[0], 1);
        assert_eq!(h.counts()[15], 2);
        let (lo, side) = h.cell_bounds(h.cell_index(&[0.6, 1.1]));
        assert_eq!(lo, vec![0.5, 1.0]);
        assert_eq!(side, vec![0.25, 0.5]);
    }

    #[test]
    fn tv_of_disjoint_is_one() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
    }

    #[test]
    fn ks_of_perfect_grid() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn chi_square_flat_counts() {
        let (stat, p) = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(stat, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_uniform(&[400, 0, 0, 0]);
        assert!(p < 1e-10);
    }

    #[test]
    fn quantile_and_median() {
        let mut v: Vec<f64> = (1..=8).map(f64::from).collect();
        assert_eq!(quantile(&mut v, 0.125), 1.0);
        assert_eq!(quantile(&mut v, 0.5), 4.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-12);
    }
}

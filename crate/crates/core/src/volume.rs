//! Volume of the unit n-ball, `pi_n = pi^(n/2) / Gamma(n/2 + 1)`.

use statrs::function::gamma::ln_gamma;

pub fn ln_unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * std::f64::consts::PI.ln() - ln_gamma(h + 1.0)
}

/// Underflows to zero for very large `n`; use [`ln_unit_ball_volume`] there.
pub fn unit_ball_volume(n: usize) -> f64 {
    ln_unit_ball_volume(n).exp()
}

/// Radius `r` with `r^n * pi_n = 1`, i.e. the ball of unit volume.
pub fn unit_volume_radius(n: usize) -> f64 {
    (-ln_unit_ball_volume(n) / n as f64).exp()
}

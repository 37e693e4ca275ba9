//! Exact PG(1, z) draws by Devroye's alternating-series method.
//!
//! `4 X` with `X ~ PG(1, z)` is a Jacobi-type variable whose density is an
//! alternating series. Proposals come from a two-piece envelope: a
//! truncated inverse Gaussian below the switch point `t` and an exponential
//! above it. Acceptance is decided by partial sums that bracket the
//! density, so no term of the series is ever dropped.

use std::f64::consts::{FRAC_2_PI, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use statrs::function::erf::erfc;

/// Switch point of the envelope on the `4 X` scale.
const T: f64 = 0.64;

/// `E[PG(1, z)] = tanh(z / 2) / (2 z)`, `1/4` at zero.
pub fn pg1_mean(z: f64) -> f64 {
    let z = z.abs();
    if z < 1e-6 {
        0.25 - z * z / 48.0
    } else {
        (z / 2.0).tanh() / (2.0 * z)
    }
}

/// `Var[PG(1, z)]`.
pub fn pg1_variance(z: f64) -> f64 {
    let z = z.abs();
    if z < 1e-3 {
        1.0 / 24.0 - z * z / 240.0
    } else {
        (z.sinh() - z) / (4.0 * z.powi(3) * (z / 2.0).cosh().powi(2))
    }
}

fn ln_norm_sf(a: f64) -> f64 {
    // log P(N(0,1) > a)
    if a < 30.0 {
        (0.5 * erfc(a / std::f64::consts::SQRT_2)).ln()
    } else {
        let a2 = a * a;
        -0.5 * a2 - a.ln() - 0.5 * (2.0 * PI).ln() + (1.0 - 1.0 / a2 + 3.0 / (a2 * a2)).ln()
    }
}

/// `P(IG(mu = 1/z, lambda = 1) < t)`.
fn inverse_gaussian_cdf(t: f64, z: f64) -> f64 {
    let root = (1.0 / t).sqrt();
    let lower = ln_norm_sf(-root * (t * z - 1.0)).exp();
    let upper = (2.0 * z + ln_norm_sf(root * (t * z + 1.0))).exp();
    lower + upper
}

/// Envelope coefficient `a_n(x)` of the series.
fn series_term(n: usize, x: f64) -> f64 {
    let k = n as f64 + 0.5;
    if x > T {
        PI * k * (-0.5 * k * k * PI * PI * x).exp()
    } else {
        PI * k * (FRAC_2_PI / x).powf(1.5) * (-2.0 * k * k / x).exp()
    }
}

/// Inverse Gaussian `IG(mu = 1/z, 1)` truncated to `(0, T)`.
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let mu = if z > 0.0 { 1.0 / z } else { f64::INFINITY };
    if mu > T {
        loop {
            let x = loop {
                let e: f64 = Exp1.sample(rng);
                let e1: f64 = Exp1.sample(rng);
                if e * e <= 2.0 * e1 / T {
                    let x = 1.0 + e * T;
                    break T / (x * x);
                }
            };
            let alpha = (-0.5 * z * z * x).exp();
            if rng.random::<f64>() <= alpha {
                return x;
            }
        }
    }
    loop {
        let n: f64 = StandardNormal.sample(rng);
        let y = n * n;
        let mut x = mu + 0.5 * mu * mu * y - 0.5 * mu * (4.0 * mu * y + (mu * y).powi(2)).sqrt();
        if rng.random::<f64>() > mu / (mu + x) {
            x = mu * mu / x;
        }
        if x < T {
            return x;
        }
    }
}

/// One exact draw from `PG(1, z)`.
pub fn sample_pg1<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let z = 0.5 * z.abs();
    let k = PI * PI / 8.0 + 0.5 * z * z;
    let p = PI / (2.0 * k) * (-k * T).exp();
    let q = 2.0 * (-z).exp() * inverse_gaussian_cdf(T, z);
    let split = p / (p + q);
    loop {
        let x = if rng.random::<f64>() < split {
            let e: f64 = Exp1.sample(rng);
            T + e / k
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = series_term(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= series_term(n, x);
                if y <= s {
                    return 0.25 * x;
                }
            } else {
                s += series_term(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

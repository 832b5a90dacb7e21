//! Reference implementations shared by the integration tests. Nothing here
//! calls into the transform code it is used to check.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_signal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `Σ_j x_j e^{sign·i2πjk/N}` by explicit summation.
pub fn direct_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Independent evaluation of the kernel definition: Zwicker–Terhardt Bark,
/// Schroeder spreading in dB, square root to amplitude, column
/// normalization over the M = N/2 bands, three-case bin mapping.
pub fn oracle_kernel(n: usize, fs: f64) -> Vec<Vec<f64>> {
    let bands = n / 2;
    let hz = |k: usize| fs * k as f64 / n as f64;
    let z = |f: f64| 13.0 * (0.00076 * f).atan() + 3.5 * ((f / 7500.0) * (f / 7500.0)).atan();
    let u = |from: f64, to: f64| {
        let d = z(to) - z(from) + 0.474;
        let db = 15.81 + 7.5 * d - 17.5 * (1.0 + d * d).sqrt();
        (10f64.powf(db / 10.0)).sqrt()
    };
    let mf = |f: f64| (0..bands).map(|m| u(hz(m), f).powi(2)).sum::<f64>().sqrt();
    (0..bands)
        .map(|m| {
            (0..n)
                .map(|bin| {
                    if bin == 0 {
                        u(hz(m), hz(1)) / mf(hz(1))
                    } else if bin < n / 2 {
                        u(hz(m), hz(bin)) / mf(hz(bin))
                    } else {
                        u(hz(m), hz(n - bin)) / mf(hz(n - bin))
                    }
                })
                .collect()
        })
        .collect()
}

/// `K_{l,m} = Σ_n X_{m,n} e^{i2πln/N}` by explicit summation.
pub fn direct_time_kernel(row: &[f64]) -> Vec<Complex64> {
    direct_dft(&to_complex(row), 1.0)
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// dB magnitudes with values below `ε · peak` clamped to that floor.
pub fn to_db_floored(v: &[f64]) -> Vec<f64> {
    let peak = v.iter().cloned().fold(0.0, f64::max);
    let floor = f64::EPSILON * peak;
    v.iter().map(|&x| 20.0 * x.max(floor).log10()).collect()
}

/// Fraction of energy inside a circular window of `width` samples centered
/// on the largest-magnitude sample.
pub fn centered_energy_fraction(x: &[f64], width: usize) -> f64 {
    let n = x.len();
    let peak = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap();
    let half = width / 2;
    let inside: f64 = (0..width).map(|k| x[(peak + n + k - half) % n].powi(2)).sum();
    inside / x.iter().map(|v| v * v).sum::<f64>()
}

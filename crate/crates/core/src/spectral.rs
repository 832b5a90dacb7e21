//! DFT conventions and the Fourier identities the rest of the crate relies on.
//!
//! Forward transforms are unnormalized, `ŝ_k = Σ_n s_n e^{-i2πnk/N}`; the
//! inverse carries the `1/N` factor. rustfft leaves both directions
//! unnormalized, so [`Dft::inverse`] scales explicitly.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DatError, Result};

/// Finite real sample sequence with its sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl RealSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(DatError::InvalidSampleRate(sample_rate_hz));
        }
        check_finite(&samples)?;
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }
}

impl AsRef<[f64]> for RealSignal {
    fn as_ref(&self) -> &[f64] {
        &self.samples
    }
}

/// Full length-N complex DFT coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    coefficients: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(coefficients: Vec<Complex64>) -> Self {
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }

    /// Largest `|ŝ_k − conj(ŝ_{N−k})|` over `k = 1..N−1`, relative to the
    /// largest magnitude. Zero for spectra of real signals up to round-off.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let n = self.coefficients.len();
        let peak = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        (1..n)
            .map(|k| (self.coefficients[k] - self.coefficients[n - k].conj()).norm())
            .fold(0.0, f64::max)
            / peak
    }
}

/// Planned forward/inverse FFT pair for one length.
#[derive(Clone)]
pub struct Dft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft").field("len", &self.len).finish()
    }
}

impl Dft {
    pub fn new(len: usize) -> Result<Self> {
        if len < 2 {
            return Err(DatError::TooShort { len, min: 2 });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    /// Inverse transform in place, including the `1/N` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    /// `N ×` the inverse transform, i.e. `Σ_n x_n e^{+i2πnj/N}` with no
    /// normalization.
    pub fn inverse_unnormalized(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }

    pub fn forward_real(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }
}

pub(crate) fn check_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(DatError::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_finite_complex(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
        Some(index) => Err(DatError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Forward DFT of a real sequence.
pub fn dft_forward(samples: &[f64]) -> Result<ComplexSpectrum> {
    check_finite(samples)?;
    let dft = Dft::new(samples.len())?;
    Ok(ComplexSpectrum::new(dft.forward_real(samples)))
}

/// Forward DFT of a complex sequence.
pub fn dft_forward_complex(values: &[Complex64]) -> Result<ComplexSpectrum> {
    check_finite_complex(values)?;
    let dft = Dft::new(values.len())?;
    let mut buf = values.to_vec();
    dft.forward(&mut buf);
    Ok(ComplexSpectrum::new(buf))
}

/// Inverse DFT, `s_n = (1/N) Σ_k ŝ_k e^{i2πnk/N}`.
pub fn dft_inverse(spectrum: &ComplexSpectrum) -> Result<Vec<Complex64>> {
    check_finite_complex(spectrum.coefficients())?;
    let dft = Dft::new(spectrum.len())?;
    let mut buf = spectrum.coefficients().to_vec();
    dft.inverse(&mut buf);
    Ok(buf)
}

/// Relative mismatch between the two sides of the Plancherel-Parseval
/// equality `Σ s_n t_n* = (1/N) Σ ŝ_k t̂_k*`. Zero when both sides vanish.
pub fn plancherel_residual(s: &[f64], t: &[f64]) -> Result<f64> {
    if s.len() != t.len() {
        return Err(DatError::LengthMismatch {
            expected: s.len(),
            found: t.len(),
        });
    }
    let s_hat = dft_forward(s)?;
    let t_hat = dft_forward(t)?;
    let time: f64 = s.iter().zip(t).map(|(a, b)| a * b).sum();
    let freq: Complex64 = s_hat
        .coefficients()
        .iter()
        .zip(t_hat.coefficients())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        / s.len() as f64;
    Ok(relative_gap(Complex64::new(time, 0.0), freq))
}

/// Relative mismatch of the energy identity `Σ|s_n|² = (1/N) Σ|ŝ_k|²`.
pub fn energy_residual(s: &[f64]) -> Result<f64> {
    let s_hat = dft_forward(s)?;
    let time: f64 = s.iter().map(|x| x * x).sum();
    let freq: f64 = s_hat.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() / s.len() as f64;
    Ok(relative_gap(Complex64::new(time, 0.0), Complex64::new(freq, 0.0)))
}

pub(crate) fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn direct_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, v)| v * Complex64::from_polar(1.0, sign * 2.0 * PI * (j * k) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
        let peak = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / peak
    }

    #[test]
    fn delta_and_constant() {
        let s = dft_forward(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(s.coefficients().iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let s = dft_forward(&[1.0; 4]).unwrap();
        assert!((s.coefficients()[0] - Complex64::new(4.0, 0.0)).norm() < 1e-15);
        assert!(s.coefficients()[1..].iter().all(|c| c.norm() < 1e-15));

        let back = dft_inverse(&s).unwrap();
        assert!(back.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let zero = dft_inverse(&ComplexSpectrum::new(vec![Complex64::default(); 4])).unwrap();
        assert!(zero.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn forward_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let s: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = dft_forward(&s).unwrap();
        let cs: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!(max_rel(fast.coefficients(), &direct_dft(&cs, -1.0)) <= 1e-12);
    }

    #[test]
    fn inverse_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let spec: Vec<Complex64> = (0..32)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let fast = dft_inverse(&ComplexSpectrum::new(spec.clone())).unwrap();
        let direct: Vec<Complex64> = direct_dft(&spec, 1.0).into_iter().map(|c| c / 32.0).collect();
        assert!(max_rel(&fast, &direct) <= 1e-12);
    }

    #[test]
    fn non_power_of_two_lengths_are_accepted() {
        let s = dft_forward(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((s.coefficients()[0].re - 21.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_short_and_non_finite() {
        assert!(matches!(dft_forward(&[1.0]), Err(DatError::TooShort { .. })));
        assert!(matches!(
            dft_forward(&[0.0, 1.0, f64::NAN, 0.0]),
            Err(DatError::NonFinite { index: 2 })
        ));
        let bad = ComplexSpectrum::new(vec![Complex64::default(), Complex64::new(0.0, f64::INFINITY)]);
        assert!(matches!(dft_inverse(&bad), Err(DatError::NonFinite { index: 1 })));
    }

    #[test]
    fn plancherel_cases() {
        let delta = [1.0, 0.0, 0.0, 0.0];
        assert!(plancherel_residual(&delta, &delta).unwrap() <= 1e-12);
        assert_eq!(plancherel_residual(&[0.0; 4], &[0.3, -2.0, 1.0, 5.0]).unwrap(), 0.0);
        assert!(matches!(
            plancherel_residual(&[0.0; 4], &[0.0; 8]),
            Err(DatError::LengthMismatch { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(128);
        let s: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(plancherel_residual(&s, &t).unwrap() <= 1e-12);
    }

    #[test]
    fn real_spectra_are_conjugate_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(dft_forward(&s).unwrap().conjugate_symmetry_error() <= 1e-12);
    }

    #[test]
    fn signal_validation() {
        assert!(matches!(
            RealSignal::new(vec![0.0, f64::INFINITY], 8000.0),
            Err(DatError::NonFinite { index: 1 })
        ));
        assert!(matches!(RealSignal::new(vec![0.0; 4], 0.0), Err(DatError::InvalidSampleRate(_))));
    }
}

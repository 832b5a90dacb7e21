//! The discrete auditory transform.
//!
//! Forward: `S_{j,m} = Σ_l s_l K_{j−l,m}` with `K` taken `N`-periodic, or
//! equivalently `S_{·,m} = N · IDFT(ŝ ⊙ X_{m,·})`. Inverse: per band, the
//! forward DFT of `S_{·,m}` divided by `N` recovers `ŝ_n X_{m,n}`; weighting
//! by `X_{m,n}` and summing over bands recovers `ŝ_n` because the kernel
//! columns are unit vectors.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{DatError, Result};
use crate::exec::Execution;
use crate::psychoacoustics::{KernelId, SpreadingKernel};
use crate::spectral::{check_finite, relative_gap, Dft, RealSignal};

/// `N × M` coefficient array `S_{j,m}`; `j` is time, `m` is band.
#[derive(Debug, Clone, PartialEq)]
pub struct DatCoefficients {
    kernel_id: KernelId,
    frame_len: usize,
    bands: usize,
    // Band-major: band m occupies values[m*N..(m+1)*N].
    values: Vec<Complex64>,
}

impl DatCoefficients {
    /// Wraps band-major values computed elsewhere (e.g. read from a file).
    pub fn from_band_major(kernel: &SpreadingKernel, values: Vec<Complex64>) -> Result<Self> {
        let n = kernel.frame_len();
        if values.len() != n * kernel.bands() {
            return Err(DatError::LengthMismatch {
                expected: n * kernel.bands(),
                found: values.len(),
            });
        }
        Ok(Self {
            kernel_id: kernel.id(),
            frame_len: n,
            bands: kernel.bands(),
            values,
        })
    }

    pub fn zeros(kernel: &SpreadingKernel) -> Self {
        Self {
            kernel_id: kernel.id(),
            frame_len: kernel.frame_len(),
            bands: kernel.bands(),
            values: vec![Complex64::default(); kernel.frame_len() * kernel.bands()],
        }
    }

    pub fn kernel_id(&self) -> KernelId {
        self.kernel_id
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn at(&self, time: usize, band: usize) -> Complex64 {
        self.values[band * self.frame_len + time]
    }

    pub fn set(&mut self, time: usize, band: usize, value: Complex64) {
        self.values[band * self.frame_len + time] = value;
    }

    pub fn band(&self, band: usize) -> &[Complex64] {
        &self.values[band * self.frame_len..(band + 1) * self.frame_len]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|Im S|` relative to the largest `|S|`; zero for all-zero arrays.
    pub fn max_imag_ratio(&self) -> f64 {
        let peak = self.max_magnitude();
        if peak == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak
    }

    /// `(1/N²) Σ_{m,j} |S_{j,m}|²`, which equals the signal energy.
    pub fn normalized_energy(&self) -> f64 {
        let n = self.frame_len as f64;
        self.values.iter().map(|c| c.norm_sqr()).sum::<f64>() / (n * n)
    }

    /// `(1/N²) Σ_{m,j} S_{j,m} T*_{j,m}`.
    pub fn normalized_inner(&self, other: &DatCoefficients) -> Result<Complex64> {
        self.check_same_shape(other.frame_len, other.bands)?;
        let n = self.frame_len as f64;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / (n * n))
    }

    fn check_same_shape(&self, frames: usize, bands: usize) -> Result<()> {
        if self.frame_len != frames || self.bands != bands {
            return Err(DatError::DimensionMismatch {
                frames,
                bands,
                found_frames: self.frame_len,
                found_bands: self.bands,
            });
        }
        Ok(())
    }
}

/// Per-band magnitude `spec(m)` with the band center frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DatSpectrum {
    pub values: Vec<f64>,
    pub band_frequencies_hz: Vec<f64>,
}

/// Inverse transform output together with the discarded imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub samples: Vec<f64>,
    /// Largest `|Im s_j|` relative to the largest `|s_j|`.
    pub imag_residual: f64,
}

fn check_signal(samples: &[f64], kernel: &SpreadingKernel) -> Result<()> {
    if samples.len() != kernel.frame_len() {
        return Err(DatError::LengthMismatch {
            expected: kernel.frame_len(),
            found: samples.len(),
        });
    }
    check_finite(samples)
}

/// Reference forward transform by explicit circular convolution with a
/// directly summed time kernel. `O(N²·M)`; no FFT involved.
pub fn dat_forward_direct(samples: &[f64], kernel: &SpreadingKernel) -> Result<DatCoefficients> {
    dat_forward_direct_with(samples, kernel, Execution::default())
}

pub fn dat_forward_direct_with(
    samples: &[f64],
    kernel: &SpreadingKernel,
    exec: Execution,
) -> Result<DatCoefficients> {
    check_signal(samples, kernel)?;
    let n = kernel.frame_len();
    let bands = exec.map_indexed(kernel.bands(), |m| {
        let row = kernel.row(m);
        let time_kernel: Vec<Complex64> = (0..n)
            .map(|l| {
                row.iter()
                    .enumerate()
                    .map(|(bin, &x)| {
                        let phase = 2.0 * PI * ((l * bin) % n) as f64 / n as f64;
                        Complex64::from_polar(x, phase)
                    })
                    .sum()
            })
            .collect();
        (0..n)
            .map(|j| {
                samples
                    .iter()
                    .enumerate()
                    .map(|(l, &s)| time_kernel[(j + n - l) % n] * s)
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>()
    });
    DatCoefficients::from_band_major(kernel, bands.concat())
}

/// Forward transform through the spectrum: one FFT of the signal and one
/// inverse FFT per band. `O(M·N·log N)`.
pub fn dat_forward_fast(samples: &[f64], kernel: &SpreadingKernel) -> Result<DatCoefficients> {
    dat_forward_fast_with(samples, kernel, Execution::default())
}

pub fn dat_forward_fast_with(
    samples: &[f64],
    kernel: &SpreadingKernel,
    exec: Execution,
) -> Result<DatCoefficients> {
    check_signal(samples, kernel)?;
    let dft = Dft::new(kernel.frame_len())?;
    let spectrum = dft.forward_real(samples);
    let bands = exec.map_indexed(kernel.bands(), |m| {
        let mut buf: Vec<Complex64> = spectrum
            .iter()
            .zip(kernel.row(m))
            .map(|(s, &x)| s * x)
            .collect();
        dft.inverse_unnormalized(&mut buf);
        buf
    });
    DatCoefficients::from_band_major(kernel, bands.concat())
}

/// Inverse transform. Returns the real part; see [`dat_inverse_detailed`]
/// for the imaginary residual.
pub fn dat_inverse(coeffs: &DatCoefficients, kernel: &SpreadingKernel) -> Result<RealSignal> {
    let rec = dat_inverse_detailed(coeffs, kernel, Execution::default())?;
    RealSignal::new(rec.samples, kernel.sample_rate_hz())
}

pub fn dat_inverse_detailed(
    coeffs: &DatCoefficients,
    kernel: &SpreadingKernel,
    exec: Execution,
) -> Result<Reconstruction> {
    coeffs.check_same_shape(kernel.frame_len(), kernel.bands())?;
    let n = kernel.frame_len();
    let dft = Dft::new(n)?;
    let band_spectra = exec.map_indexed(kernel.bands(), |m| {
        let mut buf = coeffs.band(m).to_vec();
        dft.forward(&mut buf);
        buf
    });

    // Fixed band order keeps the sum bitwise independent of scheduling.
    let mut acc = vec![Complex64::default(); n];
    for (m, spec) in band_spectra.iter().enumerate() {
        for ((a, s), &x) in acc.iter_mut().zip(spec).zip(kernel.row(m)) {
            *a += s * x;
        }
    }
    let scale = 1.0 / n as f64;
    acc.iter_mut().for_each(|a| *a *= scale);
    dft.inverse(&mut acc);

    let peak = acc.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let imag_residual = if peak == 0.0 {
        0.0
    } else {
        acc.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak
    };
    Ok(Reconstruction {
        samples: acc.into_iter().map(|c| c.re).collect(),
        imag_residual,
    })
}

/// `spec(m) = (Σ_n |ŝ_n X_{m,n}|²)^{1/2}`.
pub fn dat_spectrum(samples: &[f64], kernel: &SpreadingKernel) -> Result<DatSpectrum> {
    check_signal(samples, kernel)?;
    let dft = Dft::new(kernel.frame_len())?;
    let spectrum = dft.forward_real(samples);
    let values = kernel
        .rows()
        .map(|row| {
            spectrum
                .iter()
                .zip(row)
                .map(|(s, &x)| (s * x).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    Ok(DatSpectrum {
        values,
        band_frequencies_hz: band_frequencies(kernel),
    })
}

/// Same quantity from the coefficients: `spec(m) = ((1/N) Σ_j |S_{j,m}|²)^{1/2}`.
pub fn dat_spectrum_from_coefficients(coeffs: &DatCoefficients, kernel: &SpreadingKernel) -> Result<DatSpectrum> {
    coeffs.check_same_shape(kernel.frame_len(), kernel.bands())?;
    let n = coeffs.frame_len() as f64;
    let values = (0..coeffs.bands())
        .map(|m| (coeffs.band(m).iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt())
        .collect();
    Ok(DatSpectrum {
        values,
        band_frequencies_hz: band_frequencies(kernel),
    })
}

fn band_frequencies(kernel: &SpreadingKernel) -> Vec<f64> {
    (0..kernel.bands()).map(|m| kernel.band_frequency_hz(m)).collect()
}

/// Time-domain atom of band `m`: `N × IDFT(conj(X_{m,·}))`. Real because each
/// kernel row is even about `N/2`.
pub fn basis_function(kernel: &SpreadingKernel, band: usize) -> Result<Vec<f64>> {
    Ok(basis_function_complex(kernel, band)?.into_iter().map(|c| c.re).collect())
}

pub fn basis_function_complex(kernel: &SpreadingKernel, band: usize) -> Result<Vec<Complex64>> {
    if band >= kernel.bands() {
        return Err(DatError::BandOutOfRange {
            band,
            bands: kernel.bands(),
        });
    }
    let dft = Dft::new(kernel.frame_len())?;
    // X is real, so conjugation is the identity on the stored row.
    let mut buf: Vec<Complex64> = kernel.row(band).iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft.inverse_unnormalized(&mut buf);
    Ok(buf)
}

/// Relative residual of `(1/N²) Σ|S|² = Σ s²`.
pub fn energy_identity_residual(samples: &[f64], coeffs: &DatCoefficients) -> f64 {
    let energy: f64 = samples.iter().map(|x| x * x).sum();
    relative_gap(
        Complex64::new(coeffs.normalized_energy(), 0.0),
        Complex64::new(energy, 0.0),
    )
}

/// Relative residual of `(1/N²) Σ S T* = Σ s t*`.
pub fn plancherel_identity_residual(
    s: &[f64],
    t: &[f64],
    s_coeffs: &DatCoefficients,
    t_coeffs: &DatCoefficients,
) -> Result<f64> {
    if s.len() != t.len() {
        return Err(DatError::LengthMismatch {
            expected: s.len(),
            found: t.len(),
        });
    }
    let time: f64 = s.iter().zip(t).map(|(a, b)| a * b).sum();
    let transformed = s_coeffs.normalized_inner(t_coeffs)?;
    Ok(relative_gap(transformed, Complex64::new(time, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psychoacoustics::{build_kernel, kernel_time_kernel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        (num / den).sqrt()
    }

    #[test]
    fn zero_and_delta() {
        let k = build_kernel(16, 16000.0).unwrap();
        for coeffs in [dat_forward_fast(&[0.0; 16], &k).unwrap(), dat_forward_direct(&[0.0; 16], &k).unwrap()] {
            assert!(coeffs.values().iter().all(|c| c.norm() == 0.0));
        }
        let mut delta = vec![0.0; 16];
        delta[0] = 1.0;
        let tk = kernel_time_kernel(&k);
        for coeffs in [dat_forward_fast(&delta, &k).unwrap(), dat_forward_direct(&delta, &k).unwrap()] {
            for m in 0..8 {
                for j in 0..16 {
                    assert!((coeffs.at(j, m) - tk.get(j, m)).norm() < 1e-12);
                }
            }
        }
        let back = dat_inverse(&dat_forward_fast(&delta, &k).unwrap(), &k).unwrap();
        assert!(rel_l2(back.samples(), &delta) <= 1e-10);
        let zero = dat_inverse(&DatCoefficients::zeros(&k), &k).unwrap();
        assert!(zero.samples().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn paths_agree_on_small_frames() {
        let k = build_kernel(8, 8000.0).unwrap();
        let s = random(8, 1);
        let a = dat_forward_direct(&s, &k).unwrap();
        let b = dat_forward_fast(&s, &k).unwrap();
        let peak = b.max_magnitude();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-10 * peak);
        }
    }

    #[test]
    fn round_trip_and_energy() {
        for n in [8, 64, 128] {
            let k = build_kernel(n, 16000.0).unwrap();
            let s = random(n, n as u64);
            let c = dat_forward_fast(&s, &k).unwrap();
            assert!(c.max_imag_ratio() <= 1e-9);
            assert!(energy_identity_residual(&s, &c) <= 1e-10);
            let rec = dat_inverse_detailed(&c, &k, Execution::Sequential).unwrap();
            assert!(rec.imag_residual <= 1e-9);
            assert!(rel_l2(&rec.samples, &s) <= 1e-10);
        }
    }

    #[test]
    fn spectrum_routes_agree() {
        let k = build_kernel(64, 16000.0).unwrap();
        let s = random(64, 9);
        let a = dat_spectrum(&s, &k).unwrap();
        let b = dat_spectrum_from_coefficients(&dat_forward_fast(&s, &k).unwrap(), &k).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300));
        }
        let total: f64 = a.values.iter().map(|v| v * v).sum();
        let energy: f64 = s.iter().map(|x| x * x).sum();
        assert!((total - 64.0 * energy).abs() <= 1e-10 * total);
        assert_eq!(a.band_frequencies_hz[1], 250.0);

        let zero = dat_spectrum(&[0.0; 64], &k).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn errors() {
        let k = build_kernel(8, 8000.0).unwrap();
        assert!(matches!(dat_forward_fast(&[0.0; 16], &k), Err(DatError::LengthMismatch { .. })));
        assert!(matches!(dat_forward_direct(&[0.0; 4], &k), Err(DatError::LengthMismatch { .. })));
        let other = build_kernel(16, 8000.0).unwrap();
        let c = DatCoefficients::zeros(&other);
        assert!(matches!(dat_inverse(&c, &k), Err(DatError::DimensionMismatch { .. })));
        assert!(matches!(basis_function(&k, 4), Err(DatError::BandOutOfRange { band: 4, bands: 4 })));
    }

    #[test]
    fn basis_is_real_and_inverts_to_row() {
        let k = build_kernel(128, 16000.0).unwrap();
        let b = basis_function_complex(&k, 20).unwrap();
        let peak = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(b.iter().all(|c| c.im.abs() <= 1e-10 * peak));

        let real: Vec<f64> = b.iter().map(|c| c.re).collect();
        let row = crate::spectral::dft_forward(&real).unwrap();
        for (c, &x) in row.coefficients().iter().zip(k.row(20)) {
            assert!((c.conj() / 128.0 - Complex64::new(x, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn parallel_and_sequential_are_bitwise_equal() {
        let k = build_kernel(128, 16000.0).unwrap();
        let s = random(128, 3);
        let a = dat_forward_fast_with(&s, &k, Execution::Sequential).unwrap();
        let b = dat_forward_fast_with(&s, &k, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let ra = dat_inverse_detailed(&a, &k, Execution::Sequential).unwrap();
        let rb = dat_inverse_detailed(&a, &k, Execution::Parallel).unwrap();
        assert_eq!(ra, rb);
    }
}

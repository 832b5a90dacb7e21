//! Bark-scale spreading kernel.
//!
//! Each band `m` spreads energy from frequency `f_m` onto every analysis bin
//! with the Schroeder masking curve. The square root of the spreading energy
//! gives amplitudes `U_{m,n}`; dividing every column by its Euclidean norm
//! gives the kernel `X_{m,n}` whose columns are unit vectors. Bins above
//! `N/2` mirror the lower half so the kernel respects the conjugate symmetry
//! of real-signal spectra.

use num_complex::Complex64;

use crate::error::{DatError, Result};
use crate::spectral::Dft;

/// Hz → critical-band rate mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BarkScale {
    /// `13·atan(0.00076 f) + 3.5·atan((f/7500)²)`
    #[default]
    ZwickerTerhardt,
    /// `7·asinh(f/650)`
    Schroeder,
}

impl BarkScale {
    pub fn bark(self, freq_hz: f64) -> Result<f64> {
        if !freq_hz.is_finite() || freq_hz < 0.0 {
            return Err(DatError::InvalidFrequency(freq_hz));
        }
        Ok(match self {
            BarkScale::ZwickerTerhardt => {
                13.0 * (0.00076 * freq_hz).atan() + 3.5 * (freq_hz / 7500.0).powi(2).atan()
            }
            BarkScale::Schroeder => 7.0 * (freq_hz / 650.0).asinh(),
        })
    }
}

/// Critical-band rate of `freq_hz` under the default (Zwicker–Terhardt) mapping.
pub fn bark(freq_hz: f64) -> Result<f64> {
    BarkScale::ZwickerTerhardt.bark(freq_hz)
}

/// Sign convention for the Bark distance fed to the spreading curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpreadOrientation {
    /// `Δ = b_to − b_from`: the shallow skirt points toward higher bands.
    #[default]
    Upward,
    /// `Δ = b_from − b_to`.
    Downward,
}

/// Orientation used by [`spreading_energy`] and the default model.
pub const DEFAULT_ORIENTATION: SpreadOrientation = SpreadOrientation::Upward;

/// Schroeder spreading curve in dB for a Bark distance `delta`.
pub fn spreading_db(delta: f64) -> f64 {
    let x = delta + 0.474;
    15.81 + 7.5 * x - 17.5 * (1.0 + x * x).sqrt()
}

/// Energy spread from `b_from` onto `b_to` (both in Bark), linear scale.
pub fn spreading_energy(b_from: f64, b_to: f64) -> Result<f64> {
    SpreadingModel::default().energy(b_from, b_to)
}

/// Everything that shapes a kernel besides its size and sample rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadingModel {
    pub bark: BarkScale,
    pub orientation: SpreadOrientation,
    /// Global factor applied to the spreading energy. The column
    /// normalization cancels it, so it only exists to exercise that fact.
    pub energy_scale: f64,
}

impl Default for SpreadingModel {
    fn default() -> Self {
        Self {
            bark: BarkScale::default(),
            orientation: DEFAULT_ORIENTATION,
            energy_scale: 1.0,
        }
    }
}

impl SpreadingModel {
    pub fn energy(&self, b_from: f64, b_to: f64) -> Result<f64> {
        if !(b_from.is_finite() && b_to.is_finite()) {
            return Err(DatError::NonFiniteBark);
        }
        let delta = match self.orientation {
            SpreadOrientation::Upward => b_to - b_from,
            SpreadOrientation::Downward => b_from - b_to,
        };
        Ok(self.energy_scale * 10f64.powf(spreading_db(delta) / 10.0))
    }

    /// Amplitude-scale spreading `U(f_from, f_to)`, the square root of the energy.
    pub fn amplitude(&self, f_from: f64, f_to: f64) -> Result<f64> {
        let e = self.energy(self.bark.bark(f_from)?, self.bark.bark(f_to)?)?;
        Ok(e.sqrt())
    }
}

/// Identifies the kernel a set of coefficients was computed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelId {
    pub frame_len: usize,
    pub sample_rate_hz: f64,
    pub model: SpreadingModel,
}

/// The `M × N` spreading matrix `X_{m,n}`, `M = N/2`.
///
/// Invariants: every column has unit Euclidean norm, entries lie in `[0, 1]`,
/// and `X_{m,n} = X_{m,N−n}` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingKernel {
    id: KernelId,
    bands: usize,
    // Row-major: band m occupies values[m*N..(m+1)*N].
    values: Vec<f64>,
}

pub(crate) fn check_frame_len(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(DatError::NotPowerOfTwo(n));
    }
    Ok(())
}

/// Builds the kernel for frame length `n` at `sample_rate_hz` with the default model.
pub fn build_kernel(n: usize, sample_rate_hz: f64) -> Result<SpreadingKernel> {
    SpreadingKernel::build(n, sample_rate_hz, SpreadingModel::default())
}

impl SpreadingKernel {
    pub fn build(n: usize, sample_rate_hz: f64, model: SpreadingModel) -> Result<Self> {
        check_frame_len(n)?;
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(DatError::InvalidSampleRate(sample_rate_hz));
        }
        if !(model.energy_scale.is_finite() && model.energy_scale > 0.0) {
            return Err(DatError::InvalidAlpha(model.energy_scale));
        }
        let bands = n / 2;
        let half = n / 2;
        let freq = |k: usize| sample_rate_hz * k as f64 / n as f64;

        // amplitude[m][k] for k = 0..=N/2
        let mut amplitude = vec![0.0; bands * (half + 1)];
        for m in 0..bands {
            for k in 0..=half {
                amplitude[m * (half + 1) + k] = model.amplitude(freq(m), freq(k))?;
            }
        }
        let mut col_norm = vec![0.0; half + 1];
        for (k, norm) in col_norm.iter_mut().enumerate().skip(1) {
            let sq: f64 = (0..bands).map(|m| amplitude[m * (half + 1) + k].powi(2)).sum();
            *norm = sq.sqrt();
            if !(*norm > 0.0 && norm.is_finite()) {
                return Err(DatError::DegenerateSpreading { bin: k });
            }
        }

        let mut values = vec![0.0; bands * n];
        for m in 0..bands {
            let row = &mut values[m * n..(m + 1) * n];
            for (bin, x) in row.iter_mut().enumerate() {
                let k = match bin {
                    0 => 1,
                    b if b < half => b,
                    b => n - b,
                };
                *x = amplitude[m * (half + 1) + k] / col_norm[k];
            }
        }

        Ok(Self {
            id: KernelId {
                frame_len: n,
                sample_rate_hz,
                model,
            },
            bands,
            values,
        })
    }

    pub fn id(&self) -> KernelId {
        self.id
    }

    pub fn frame_len(&self) -> usize {
        self.id.frame_len
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.id.sample_rate_hz
    }

    pub fn get(&self, band: usize, bin: usize) -> f64 {
        self.values[band * self.id.frame_len + bin]
    }

    pub fn row(&self, band: usize) -> &[f64] {
        let n = self.id.frame_len;
        &self.values[band * n..(band + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.id.frame_len)
    }

    /// Center frequency of band `m` (same grid as the analysis bins).
    pub fn band_frequency_hz(&self, band: usize) -> f64 {
        self.id.sample_rate_hz * band as f64 / self.id.frame_len as f64
    }

    /// Largest `|Σ_m X_{m,n}² − 1|` over all columns.
    pub fn column_norm_error(&self) -> f64 {
        let n = self.id.frame_len;
        (0..n)
            .map(|bin| {
                let sq: f64 = (0..self.bands).map(|m| self.get(m, bin).powi(2)).sum();
                (sq - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Time-domain kernel `K_{l,m} = Σ_n X_{m,n} e^{i2πln/N}`, stored per band.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeKernel {
    frame_len: usize,
    bands: usize,
    values: Vec<Complex64>,
}

impl TimeKernel {
    pub fn get(&self, lag: usize, band: usize) -> Complex64 {
        self.values[band * self.frame_len + lag]
    }

    pub fn band(&self, band: usize) -> &[Complex64] {
        &self.values[band * self.frame_len..(band + 1) * self.frame_len]
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    /// Largest imaginary part relative to the largest magnitude.
    pub fn max_imag_ratio(&self) -> f64 {
        let peak = self.values.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak
    }
}

pub fn kernel_time_kernel(kernel: &SpreadingKernel) -> TimeKernel {
    let n = kernel.frame_len();
    let dft = Dft::new(n).expect("kernel frame length is at least 4");
    let mut values = Vec::with_capacity(n * kernel.bands());
    for row in kernel.rows() {
        let mut buf: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        dft.inverse_unnormalized(&mut buf);
        values.extend(buf);
    }
    TimeKernel {
        frame_len: n,
        bands: kernel.bands(),
        values,
    }
}

//! Spectral-thresholding denoiser for the DFT and the DAT, plus the SNR
//! sweep that compares them.
//!
//! Each frame gets a threshold `T = α · mean_k |ŝ_k|` computed from the DFT
//! of the noisy frame. Components (DFT bins or DAT coefficients) with
//! magnitude below `T` are zeroed before inverting.
//!
//! Noise for sweep condition `(segment i, grid point j)` is drawn from a
//! ChaCha8 generator seeded with [`condition_seed`]`(master, i, j)`; both
//! transforms see the same noisy segment.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dat::{dat_forward_fast_with, dat_inverse_detailed, Reconstruction};
use crate::error::{DatError, Result};
use crate::exec::Execution;
use crate::psychoacoustics::{check_frame_len, SpreadingKernel, SpreadingModel};
use crate::signal_io::fmt_f64;
use crate::spectral::{check_finite, Dft, RealSignal};

/// Default master seed for sweeps and CLI noise generation.
pub const DEFAULT_SEED: u64 = 20_070_512;

/// Input SNR grid in dB: −12 to +12 in 3 dB steps.
pub fn default_snr_grid() -> Vec<f64> {
    (-4..=4).map(|i| f64::from(i) * 3.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Transform {
    Dft,
    Dat,
}

impl Transform {
    pub const ALL: [Transform; 2] = [Transform::Dft, Transform::Dat];

    pub fn as_str(self) -> &'static str {
        match self {
            Transform::Dft => "dft",
            Transform::Dat => "dat",
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dft" => Ok(Transform::Dft),
            "dat" => Ok(Transform::Dat),
            other => Err(format!("unknown transform {other:?} (expected dft or dat)")),
        }
    }
}

/// What happens to a trailing partial frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    #[default]
    ZeroPad,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramePlan {
    pub frame_len: usize,
    pub hop: usize,
    pub padding: Padding,
}

impl FramePlan {
    /// Non-overlapping rectangular frames, zero-padded at the end.
    pub fn new(frame_len: usize) -> Self {
        Self {
            frame_len,
            hop: frame_len,
            padding: Padding::ZeroPad,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_frame_len(self.frame_len)?;
        if self.hop == 0 || self.hop > self.frame_len {
            return Err(DatError::InvalidFramePlan(format!(
                "hop {} must be in 1..={}",
                self.hop, self.frame_len
            )));
        }
        Ok(())
    }
}

/// Frames cut from a signal, with what is needed to put them back.
#[derive(Debug, Clone, PartialEq)]
pub struct Frames {
    pub frames: Vec<Vec<f64>>,
    /// Number of real (non-padding) samples in each frame.
    pub true_lens: Vec<usize>,
    pub hop: usize,
    pub source_len: usize,
}

impl Frames {
    /// Overlap-averages frames back into a signal of the source length.
    /// Samples not covered by any frame (dropped tail) come back as zero.
    pub fn reassemble(&self, frames: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.source_len];
        let mut count = vec![0u32; self.source_len];
        for (i, (frame, &len)) in frames.iter().zip(&self.true_lens).enumerate() {
            let start = i * self.hop;
            for (k, &x) in frame.iter().take(len).enumerate() {
                out[start + k] += x;
                count[start + k] += 1;
            }
        }
        if self.hop < self.frames.first().map_or(0, Vec::len) {
            for (x, &c) in out.iter_mut().zip(&count) {
                if c > 1 {
                    *x /= f64::from(c);
                }
            }
        }
        out
    }
}

pub fn frame_signal(samples: &[f64], plan: &FramePlan) -> Result<Frames> {
    plan.validate()?;
    let n = plan.frame_len;
    let mut frames = Vec::new();
    let mut true_lens = Vec::new();
    let mut start = 0;
    while start < samples.len() {
        let end = (start + n).min(samples.len());
        let len = end - start;
        if len < n && plan.padding == Padding::Drop {
            break;
        }
        let mut frame = samples[start..end].to_vec();
        frame.resize(n, 0.0);
        frames.push(frame);
        true_lens.push(len);
        if end == samples.len() {
            break;
        }
        start += plan.hop;
    }
    Ok(Frames {
        frames,
        true_lens,
        hop: plan.hop,
        source_len: samples.len(),
    })
}

/// `α · (1/N) Σ_k |ŝ_k|` for the DFT of `frame`.
pub fn threshold_value(frame: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_finite(frame)?;
    let dft = Dft::new(frame.len())?;
    Ok(alpha * mean_magnitude(&dft.forward_real(frame)))
}

fn mean_magnitude(spectrum: &[Complex64]) -> f64 {
    spectrum.iter().map(|c| c.norm()).sum::<f64>() / spectrum.len() as f64
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(DatError::InvalidAlpha(alpha));
    }
    Ok(())
}

fn imag_ratio(values: &[Complex64]) -> f64 {
    let peak = values.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        0.0
    } else {
        values.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / peak
    }
}

/// Zeroes DFT bins with `|ŝ_k| < threshold` and inverts.
pub fn denoise_frame_dft(frame: &[f64], threshold: f64) -> Result<Reconstruction> {
    check_finite(frame)?;
    let n = frame.len();
    let dft = Dft::new(n)?;
    let mut spectrum = dft.forward_real(frame);
    let keep: Vec<bool> = spectrum.iter().map(|c| c.norm() >= threshold).collect();
    // Conjugate pairs have equal magnitude, so the rule already treats them alike.
    debug_assert!((1..n).all(|k| {
        keep[k] == keep[n - k] || (spectrum[k].norm() - spectrum[n - k].norm()).abs() <= 1e-9 * threshold.max(1.0)
    }));
    for (c, &k) in spectrum.iter_mut().zip(&keep) {
        if !k {
            *c = Complex64::default();
        }
    }
    dft.inverse(&mut spectrum);
    Ok(Reconstruction {
        imag_residual: imag_ratio(&spectrum),
        samples: spectrum.into_iter().map(|c| c.re).collect(),
    })
}

/// Zeroes DAT coefficients with `|S_{j,m}| < threshold` and inverts.
pub fn denoise_frame_dat(frame: &[f64], threshold: f64, kernel: &SpreadingKernel) -> Result<Reconstruction> {
    denoise_frame_dat_with(frame, threshold, kernel, Execution::default())
}

pub fn denoise_frame_dat_with(
    frame: &[f64],
    threshold: f64,
    kernel: &SpreadingKernel,
    exec: Execution,
) -> Result<Reconstruction> {
    let mut coeffs = dat_forward_fast_with(frame, kernel, exec)?;
    for c in coeffs.values_mut() {
        if c.norm() < threshold {
            *c = Complex64::default();
        }
    }
    dat_inverse_detailed(&coeffs, kernel, exec)
}

/// `10·log10(Σ clean² / Σ (clean − test)²)`; `+∞` when the two match exactly.
pub fn snr_db(clean: &[f64], test: &[f64]) -> Result<f64> {
    if clean.len() != test.len() {
        return Err(DatError::LengthMismatch {
            expected: clean.len(),
            found: test.len(),
        });
    }
    let signal: f64 = clean.iter().map(|x| x * x).sum();
    if signal == 0.0 {
        return Err(DatError::ZeroSignal);
    }
    let error: f64 = clean.iter().zip(test).map(|(c, t)| (c - t).powi(2)).sum();
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / error).log10())
}

/// Adds seeded white Gaussian noise scaled so the realized SNR equals
/// `target_snr_db`. An infinite target returns the clean signal.
pub fn add_noise_at_snr(clean: &[f64], target_snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    check_finite(clean)?;
    let signal: f64 = clean.iter().map(|x| x * x).sum();
    if signal == 0.0 {
        return Err(DatError::ZeroSignal);
    }
    if target_snr_db == f64::INFINITY {
        return Ok(clean.to_vec());
    }
    if !target_snr_db.is_finite() {
        return Err(DatError::InvalidFramePlan(format!("target SNR {target_snr_db} dB")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..clean.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let noise_power: f64 = noise.iter().map(|x| x * x).sum();
    let scale = (signal / (noise_power * 10f64.powf(target_snr_db / 10.0))).sqrt();
    Ok(clean.iter().zip(&noise).map(|(c, g)| c + scale * g).collect())
}

/// Which samples share one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdScope {
    #[default]
    PerFrame,
    /// Mean of the per-frame thresholds over the whole segment.
    PerSegment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseConfig {
    pub plan: FramePlan,
    pub sample_rate_hz: f64,
    pub alpha_dft: f64,
    pub alpha_dat: f64,
    pub scope: ThresholdScope,
    pub model: SpreadingModel,
}

impl DenoiseConfig {
    pub fn new(frame_len: usize, sample_rate_hz: f64) -> Self {
        Self {
            plan: FramePlan::new(frame_len),
            sample_rate_hz,
            alpha_dft: 1.0,
            alpha_dat: 1.0,
            scope: ThresholdScope::PerFrame,
            model: SpreadingModel::default(),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_dft = alpha;
        self.alpha_dat = alpha;
        self
    }

    pub fn alpha(&self, transform: Transform) -> f64 {
        match transform {
            Transform::Dft => self.alpha_dft,
            Transform::Dat => self.alpha_dat,
        }
    }

    pub fn build_kernel(&self) -> Result<SpreadingKernel> {
        SpreadingKernel::build(self.plan.frame_len, self.sample_rate_hz, self.model)
    }
}

/// Frames, thresholds and reconstructs a whole signal with one transform.
///
/// `kernel` is required for [`Transform::Dat`] and must match the frame length.
pub fn denoise_signal(
    samples: &[f64],
    transform: Transform,
    config: &DenoiseConfig,
    kernel: Option<&SpreadingKernel>,
) -> Result<Vec<f64>> {
    let alpha = config.alpha(transform);
    check_alpha(alpha)?;
    let frames = frame_signal(samples, &config.plan)?;
    let mut thresholds = frames
        .frames
        .iter()
        .map(|f| threshold_value(f, alpha))
        .collect::<Result<Vec<_>>>()?;
    if config.scope == ThresholdScope::PerSegment && !thresholds.is_empty() {
        let mean = thresholds.iter().sum::<f64>() / thresholds.len() as f64;
        thresholds.iter_mut().for_each(|t| *t = mean);
    }
    let owned;
    let kernel = match (transform, kernel) {
        (Transform::Dat, Some(k)) => Some(k),
        (Transform::Dat, None) => {
            owned = config.build_kernel()?;
            Some(&owned)
        }
        (Transform::Dft, _) => None,
    };
    let processed = frames
        .frames
        .iter()
        .zip(&thresholds)
        .map(|(frame, &t)| {
            let rec = match kernel {
                Some(k) => denoise_frame_dat_with(frame, t, k, Execution::Sequential)?,
                None => denoise_frame_dft(frame, t)?,
            };
            Ok(rec.samples)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(frames.reassemble(&processed))
}

/// Labeled clean segment for the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub label: String,
    pub signal: RealSignal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub denoise: DenoiseConfig,
    pub snr_grid: Vec<f64>,
    pub seed: u64,
    pub exec: Execution,
}

impl SweepConfig {
    pub fn new(frame_len: usize, sample_rate_hz: f64) -> Self {
        Self {
            denoise: DenoiseConfig::new(frame_len, sample_rate_hz),
            snr_grid: default_snr_grid(),
            seed: DEFAULT_SEED,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub segment: String,
    pub transform: Transform,
    pub input_snr_db: f64,
    pub output_snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseReport {
    pub records: Vec<SweepRecord>,
    pub seed: u64,
}

pub const REPORT_HEADER: &str = "segment,transform,input_snr_db,output_snr_db,seed";

fn fmt_db(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        fmt_f64(x)
    }
}

impl DenoiseReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.segment,
                r.transform,
                fmt_db(r.input_snr_db),
                fmt_db(r.output_snr_db),
                r.seed
            ));
        }
        out
    }

    pub fn find(&self, segment: &str, transform: Transform, input_snr_db: f64) -> Option<&SweepRecord> {
        self.records
            .iter()
            .find(|r| r.segment == segment && r.transform == transform && r.input_snr_db == input_snr_db)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-condition noise seed: `splitmix64(master ^ splitmix64((segment << 32) | grid_index))`.
pub fn condition_seed(master: u64, segment: usize, grid_index: usize) -> u64 {
    splitmix64(master ^ splitmix64(((segment as u64) << 32) | grid_index as u64))
}

/// Runs every (segment, input SNR, transform) condition. Records are ordered
/// by segment (input order), transform (DFT first), then grid order.
pub fn run_sweep(segments: &[Segment], config: &SweepConfig) -> Result<DenoiseReport> {
    if config.snr_grid.is_empty() {
        return Err(DatError::EmptyGrid);
    }
    let n = config.denoise.plan.frame_len;
    config.denoise.plan.validate()?;
    for seg in segments {
        if seg.signal.len() < n {
            return Err(DatError::TooShort {
                len: seg.signal.len(),
                min: n,
            });
        }
    }
    let kernel = config.denoise.build_kernel()?;
    let grid = config.snr_grid.len();
    let conditions = config.exec.map_indexed(segments.len() * grid, |idx| {
        let (si, gi) = (idx / grid, idx % grid);
        let seg = &segments[si];
        let clean = seg.signal.samples();
        let seed = condition_seed(config.seed, si, gi);
        let input_snr = config.snr_grid[gi];
        let noisy = add_noise_at_snr(clean, input_snr, seed)?;
        Transform::ALL
            .iter()
            .map(|&t| {
                let out = denoise_signal(&noisy, t, &config.denoise, Some(&kernel))?;
                Ok(SweepRecord {
                    segment: seg.label.clone(),
                    transform: t,
                    input_snr_db: input_snr,
                    output_snr_db: snr_db(clean, &out)?,
                    seed,
                })
            })
            .collect::<Result<Vec<_>>>()
    });

    let mut records = Vec::with_capacity(segments.len() * grid * 2);
    for si in 0..segments.len() {
        for t in 0..Transform::ALL.len() {
            for gi in 0..grid {
                let cond = conditions[si * grid + gi].as_ref().map_err(clone_err)?;
                records.push(cond[t].clone());
            }
        }
    }
    Ok(DenoiseReport {
        records,
        seed: config.seed,
    })
}

fn clone_err(e: &DatError) -> DatError {
    // DatError holds io::Error and is not Clone; sweep conditions never do I/O.
    match e {
        DatError::TooShort { len, min } => DatError::TooShort { len: *len, min: *min },
        DatError::ZeroSignal => DatError::ZeroSignal,
        other => DatError::InvalidFramePlan(other.to_string()),
    }
}

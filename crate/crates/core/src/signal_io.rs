//! WAV and CSV signal I/O plus the synthetic test material.

use std::f64::consts::PI;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{DatError, Result};
use crate::spectral::{check_finite, Dft, RealSignal};
use num_complex::Complex64;

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 16000.0;

/// Mono clip with samples normalized to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavClip {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
    pub bits_per_sample: u16,
}

impl WavClip {
    pub fn from_signal(signal: &RealSignal) -> Self {
        Self {
            samples: signal.samples().to_vec(),
            sample_rate_hz: signal.sample_rate_hz(),
            bits_per_sample: 16,
        }
    }

    pub fn to_signal(&self) -> Result<RealSignal> {
        RealSignal::new(self.samples.clone(), self.sample_rate_hz)
    }
}

fn is_short_read(e: &std::io::Error) -> bool {
    e.kind() == std::io::ErrorKind::UnexpectedEof
        || (e.kind() == std::io::ErrorKind::Other && e.to_string().contains("enough bytes"))
}

fn map_hound(path: &Path, err: hound::Error) -> DatError {
    match err {
        // hound reports short reads as a custom `Other` error.
        hound::Error::IoError(e) if is_short_read(&e) => DatError::WavHeader {
            path: path.into(),
            reason: "unexpected end of file".into(),
        },
        hound::Error::IoError(e) => DatError::io(path, e),
        hound::Error::FormatError(reason) => DatError::WavHeader {
            path: path.into(),
            reason: reason.into(),
        },
        hound::Error::Unsupported => DatError::WavUnsupported {
            path: path.into(),
            reason: "codec not supported".into(),
        },
        other => DatError::WavUnsupported {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}

/// Reads a PCM (8/16/24-bit integer) or 32-bit float WAV file.
///
/// Integer samples `x` map to `x / 2^(bits-1)`. Multichannel files are
/// rejected unless `downmix` is set, in which case channels are averaged.
pub fn read_wav(path: impl AsRef<Path>, downmix: bool) -> Result<WavClip> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(DatError::WavHeader {
            path: path.into(),
            reason: "zero channels".into(),
        });
    }
    if channels > 1 && !downmix {
        return Err(DatError::WavMultichannel {
            path: path.into(),
            channels: spec.channels,
        });
    }
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, bits @ (8 | 16 | 24)) => {
            let scale = 1.0 / f64::from(1u32 << (bits - 1));
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|x| f64::from(x) * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| map_hound(path, e))?
        }
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (format, bits) => {
            return Err(DatError::WavUnsupported {
                path: path.into(),
                reason: format!("{bits}-bit {format:?}"),
            })
        }
    };
    if interleaved.is_empty() {
        return Err(DatError::WavEmpty { path: path.into() });
    }
    let samples = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| frame.iter().sum::<f64>() / channels as f64)
            .collect()
    };
    Ok(WavClip {
        samples,
        sample_rate_hz: f64::from(spec.sample_rate),
        bits_per_sample: spec.bits_per_sample,
    })
}

/// Writes a mono 16-bit PCM WAV. Samples outside `[-1, 1]` are clipped;
/// returns how many were.
pub fn write_wav(clip: &WavClip, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    check_finite(&clip.samples)?;
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: clip.sample_rate_hz.round() as u32,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    let mut clipped = 0;
    for &x in &clip.samples {
        if !(-1.0..=1.0).contains(&x) {
            clipped += 1;
        }
        let v = (x.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer.write_sample(v).map_err(|e| map_hound(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound(path, e))?;
    Ok(clipped)
}

/// Reads a one-sample-per-line CSV signal. A non-numeric first line is
/// treated as a header; blank lines are skipped.
pub fn read_signal_csv(path: impl AsRef<Path>, sample_rate_hz: f64) -> Result<RealSignal> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| DatError::io(path, e))?;
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => samples.push(v),
            Ok(_) => {
                return Err(DatError::Parse {
                    path: path.into(),
                    line: idx + 1,
                    reason: format!("non-finite sample {field:?}"),
                })
            }
            Err(_) if idx == 0 => {}
            Err(_) => {
                return Err(DatError::Parse {
                    path: path.into(),
                    line: idx + 1,
                    reason: format!("expected a number, found {field:?}"),
                })
            }
        }
    }
    RealSignal::new(samples, sample_rate_hz)
}

pub fn write_signal_csv(samples: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| DatError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| DatError::io(path, e);
    writeln!(out, "sample").map_err(io)?;
    for x in samples {
        writeln!(out, "{}", fmt_f64(*x)).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a signal from `.wav` or CSV depending on the extension.
pub fn read_signal(path: impl AsRef<Path>, sample_rate_hz: f64, downmix: bool) -> Result<RealSignal> {
    let path = path.as_ref();
    let is_wav = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        read_wav(path, downmix)?.to_signal()
    } else {
        read_signal_csv(path, sample_rate_hz)
    }
}

/// Decimal rendering with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// ±1 square wave, 50% duty, high for the first half period.
pub fn gen_square(freq_hz: f64, sample_rate_hz: f64, n_samples: usize) -> Result<RealSignal> {
    if !(freq_hz > 0.0 && freq_hz < sample_rate_hz / 2.0) {
        return Err(DatError::InvalidFrequency(freq_hz));
    }
    let samples = (0..n_samples)
        .map(|i| {
            let phase = (i as f64 * freq_hz / sample_rate_hz).fract();
            if phase < 0.5 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    RealSignal::new(samples, sample_rate_hz)
}

pub const VOICED_F0_HZ: f64 = 120.0;
pub const VOICED_MAX_HZ: f64 = 4000.0;
const FORMANTS: [(f64, f64, f64); 2] = [(500.0, 150.0, 1.0), (1500.0, 200.0, 0.5)];
const ENVELOPE_FLOOR: f64 = 0.02;

/// Two-formant envelope used to weight the voiced harmonics.
fn formant_envelope(freq_hz: f64) -> f64 {
    FORMANTS
        .iter()
        .map(|&(center, width, gain)| gain * (-0.5 * ((freq_hz - center) / width).powi(2)).exp())
        .sum::<f64>()
        + ENVELOPE_FLOOR
}

fn normalize_peak(samples: &mut [f64]) {
    let peak = samples.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if peak > 0.0 {
        samples.iter_mut().for_each(|x| *x /= peak);
    }
}

/// Vowel-like harmonic complex: 120 Hz fundamental, harmonics up to 4 kHz
/// under a two-formant envelope (500 Hz and 1500 Hz), seeded random phases,
/// unit peak.
pub fn gen_voiced_surrogate(n_samples: usize, sample_rate_hz: f64, seed: u64) -> Result<RealSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = VOICED_MAX_HZ.min(sample_rate_hz / 2.0);
    let harmonics = (top / VOICED_F0_HZ).floor() as usize;
    let partials: Vec<(f64, f64, f64)> = (1..=harmonics)
        .map(|h| {
            let f = h as f64 * VOICED_F0_HZ;
            (f, formant_envelope(f), rng.random_range(0.0..2.0 * PI))
        })
        .collect();
    let mut samples: Vec<f64> = (0..n_samples)
        .map(|i| {
            let t = i as f64 / sample_rate_hz;
            partials
                .iter()
                .map(|&(f, a, phi)| a * (2.0 * PI * f * t + phi).cos())
                .sum()
        })
        .collect();
    normalize_peak(&mut samples);
    RealSignal::new(samples, sample_rate_hz)
}

pub const UNVOICED_CUTOFF_HZ: f64 = 2000.0;

/// Fricative-like burst: seeded white Gaussian noise, high-passed at 2 kHz
/// with a raised-cosine transition one octave wide, unit peak.
pub fn gen_unvoiced_surrogate(n_samples: usize, sample_rate_hz: f64, seed: u64) -> Result<RealSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..n_samples).map(|_| StandardNormal.sample(&mut rng)).collect();
    if n_samples < 2 {
        return RealSignal::new(noise, sample_rate_hz);
    }
    let dft = Dft::new(n_samples)?;
    let mut spec: Vec<Complex64> = dft.forward_real(&noise);
    for (k, c) in spec.iter_mut().enumerate() {
        let bin = k.min(n_samples - k);
        let f = sample_rate_hz * bin as f64 / n_samples as f64;
        *c *= highpass_gain(f);
    }
    dft.inverse(&mut spec);
    let mut samples: Vec<f64> = spec.into_iter().map(|c| c.re).collect();
    normalize_peak(&mut samples);
    RealSignal::new(samples, sample_rate_hz)
}

fn highpass_gain(freq_hz: f64) -> f64 {
    let lo = UNVOICED_CUTOFF_HZ / 2.0;
    if freq_hz >= UNVOICED_CUTOFF_HZ {
        1.0
    } else if freq_hz <= lo {
        0.0
    } else {
        0.5 - 0.5 * (PI * (freq_hz - lo) / (UNVOICED_CUTOFF_HZ - lo)).cos()
    }
}

//! The `dat` command-line tool.
//!
//! Every numeric export is CSV. Floating-point values are written with 17
//! significant digits so files round-trip exactly; linear magnitudes of zero
//! are written as `0` and their dB value as `-inf`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::dat::{dat_forward_fast, dat_inverse, dat_spectrum, DatCoefficients};
use crate::denoise::{
    add_noise_at_snr, condition_seed, default_snr_grid, denoise_signal, frame_signal, run_sweep, snr_db,
    DenoiseConfig, FramePlan, Segment, SweepConfig, ThresholdScope, Transform, DEFAULT_SEED,
};
use crate::error::DatError;
use crate::psychoacoustics::{BarkScale, SpreadingKernel, SpreadingModel};
use crate::signal_io::{
    fmt_f64, gen_unvoiced_surrogate, gen_voiced_surrogate, read_signal, write_signal_csv, write_wav, WavClip,
};
use crate::spectral::{Dft, RealSignal};

/// Length of the built-in sweep segments.
pub const SEGMENT_LEN: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dat(#[from] DatError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Dat(_) => 1,
        }
    }

    /// `dat: error[<kind>]: <message>` on a single line.
    pub fn one_line(&self) -> String {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Dat(DatError::Io { .. }) => "io",
            CliError::Dat(DatError::Parse { .. }) => "parse",
            CliError::Dat(
                DatError::WavHeader { .. }
                | DatError::WavUnsupported { .. }
                | DatError::WavEmpty { .. }
                | DatError::WavMultichannel { .. },
            ) => "wav",
            CliError::Dat(_) => "input",
        };
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("dat: error[{kind}]: {msg}")
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dat", version, about = "Discrete auditory transform toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Frame length (power of two)
    #[arg(long = "n", global = true, default_value_t = 128)]
    pub n: usize,
    /// Sample rate in Hz
    #[arg(long = "fs", global = true, default_value_t = 16000.0)]
    pub fs: f64,
    /// Threshold scale applied to the mean DFT magnitude
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,
    /// Separate threshold scale for the DAT path (defaults to --alpha)
    #[arg(long, global = true)]
    pub alpha_dat: Option<f64>,
    /// Master seed for noise and surrogate generation
    #[arg(long, global = true, env = "DAT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Bark mapping: zwicker or schroeder
    #[arg(long, global = true, default_value = "zwicker", value_parser = parse_bark)]
    pub bark: BarkScale,
    /// Output path (stdout when omitted, CSV outputs only)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Average channels of multichannel WAV input instead of rejecting it
    #[arg(long, global = true)]
    pub downmix: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Export the spreading kernel X (rows m, columns n)
    Kernel {
        /// Row filter start:step:end, e.g. 5:10:55
        #[arg(long)]
        rows: Option<String>,
    },
    /// Forward DAT of every frame of a signal
    Transform {
        #[arg(long)]
        input: PathBuf,
    },
    /// Inverse DAT of a coefficient file (writes WAV when --out ends in .wav)
    Invert {
        #[arg(long)]
        input: PathBuf,
    },
    /// DFT magnitude and DAT spectrum per frame
    Spectrum {
        #[arg(long, conflicts_with = "square")]
        input: Option<PathBuf>,
        /// Generate a square wave of this frequency instead of reading input
        #[arg(long)]
        square: Option<f64>,
        /// Length of the generated square wave
        #[arg(long, default_value_t = 512)]
        samples: usize,
    },
    /// Threshold-denoise one signal
    Denoise {
        /// Noisy input (WAV or CSV)
        #[arg(long, conflicts_with = "clean")]
        input: Option<PathBuf>,
        /// Clean input; noise is added at --snr
        #[arg(long, requires = "snr")]
        clean: Option<PathBuf>,
        /// Clean reference for reporting SNRs of a noisy --input
        #[arg(long, requires = "input")]
        reference: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        snr: Option<f64>,
        #[arg(long, default_value = "dat")]
        transform: Transform,
    },
    /// SNR sweep over DFT and DAT thresholding
    Sweep {
        /// Input SNR grid: start:step:end or a comma list
        #[arg(long, allow_hyphen_values = true)]
        snr_grid: Option<String>,
        /// User segments (WAV or CSV); built-in surrogates when omitted
        #[arg(long, num_args = 1..)]
        segments: Vec<PathBuf>,
        /// Use one threshold per segment instead of per frame
        #[arg(long)]
        per_segment: bool,
    },
}

fn parse_bark(s: &str) -> Result<BarkScale, String> {
    match s.to_ascii_lowercase().as_str() {
        "zwicker" | "zwicker-terhardt" => Ok(BarkScale::ZwickerTerhardt),
        "schroeder" => Ok(BarkScale::Schroeder),
        other => Err(format!("unknown Bark mapping {other:?}")),
    }
}

/// `start:step:end` (inclusive) or `a,b,c`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("invalid grid {spec:?}"));
    let spec = spec.trim();
    if spec.is_empty() {
        return Err(CliError::Usage("SNR grid is empty".into()));
    }
    let values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        let [start, step, end] = parts[..] else {
            return Err(bad());
        };
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(bad());
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        spec.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| match p.trim() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                v => v.parse::<f64>().map_err(|_| bad()),
            })
            .collect::<CliResult<_>>()?
    };
    if values.is_empty() {
        return Err(CliError::Usage("SNR grid is empty".into()));
    }
    Ok(values)
}

fn parse_rows(spec: &str, bands: usize) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("invalid row filter {spec:?}"));
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let rows: Vec<usize> = match parts[..] {
        [single] => vec![single],
        [start, end] => (start..=end).collect(),
        [start, step, end] if step > 0 => (start..=end).step_by(step).collect(),
        _ => return Err(bad()),
    };
    if let Some(&m) = rows.iter().find(|&&m| m >= bands) {
        return Err(CliError::Dat(DatError::BandOutOfRange { band: m, bands }));
    }
    Ok(rows)
}

impl Common {
    fn model(&self) -> SpreadingModel {
        SpreadingModel {
            bark: self.bark,
            ..SpreadingModel::default()
        }
    }

    fn kernel(&self) -> CliResult<SpreadingKernel> {
        SpreadingKernel::build(self.n, self.fs, self.model()).map_err(|e| match e {
            DatError::NotPowerOfTwo(_) | DatError::InvalidSampleRate(_) => CliError::Usage(e.to_string()),
            other => other.into(),
        })
    }

    fn denoise_config(&self) -> DenoiseConfig {
        let mut cfg = DenoiseConfig::new(self.n, self.fs).with_alpha(self.alpha);
        if let Some(a) = self.alpha_dat {
            cfg.alpha_dat = a;
        }
        cfg.model = self.model();
        cfg
    }

    fn read(&self, path: &Path) -> CliResult<RealSignal> {
        if !path.exists() {
            return Err(CliError::Usage(format!("input file {} does not exist", path.display())));
        }
        Ok(read_signal(path, self.fs, self.downmix)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| DatError::io(path, e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn db(linear: f64) -> String {
    if linear == 0.0 {
        "-inf".into()
    } else {
        fmt_f64(20.0 * linear.log10())
    }
}

/// Kernel CSV: header `m,0,1,…,N−1`, then one row per band.
pub fn kernel_csv(kernel: &SpreadingKernel, rows: Option<&[usize]>) -> String {
    let n = kernel.frame_len();
    let mut out = String::from("m");
    for bin in 0..n {
        write!(out, ",{bin}").unwrap();
    }
    out.push('\n');
    let all: Vec<usize> = (0..kernel.bands()).collect();
    for &m in rows.unwrap_or(&all) {
        write!(out, "{m}").unwrap();
        for &x in kernel.row(m) {
            write!(out, ",{}", fmt_f64(x)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Coefficient CSV. The first line carries the dimensions:
/// `# dat-coefficients n=<N> bands=<M> frames=<F> samples=<len> fs=<Hz>`,
/// then a header `frame,j,re_0,im_0,…` and one row per (frame, j).
pub fn coefficients_csv(frames: &[DatCoefficients], source_len: usize, fs: f64) -> String {
    let (n, bands) = frames.first().map_or((0, 0), |c| (c.frame_len(), c.bands()));
    let mut out = format!(
        "# dat-coefficients n={n} bands={bands} frames={} samples={source_len} fs={}\n",
        frames.len(),
        fmt_f64(fs)
    );
    out.push_str("frame,j");
    for m in 0..bands {
        write!(out, ",re_{m},im_{m}").unwrap();
    }
    out.push('\n');
    for (f, coeffs) in frames.iter().enumerate() {
        for j in 0..n {
            write!(out, "{f},{j}").unwrap();
            for m in 0..bands {
                let c = coeffs.at(j, m);
                write!(out, ",{},{}", fmt_f64(c.re), fmt_f64(c.im)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Parsed coefficient file.
#[derive(Debug, Clone)]
pub struct CoefficientFile {
    pub frames: Vec<DatCoefficients>,
    pub source_len: usize,
}

pub fn parse_coefficients(path: &Path, text: &str, kernel: &SpreadingKernel) -> CliResult<CoefficientFile> {
    let err = |line: usize, reason: String| {
        CliError::Dat(DatError::Parse {
            path: path.into(),
            line,
            reason,
        })
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, meta) = lines.next().ok_or_else(|| err(1, "empty coefficient file".into()))?;
    let meta = meta
        .strip_prefix("# dat-coefficients")
        .ok_or_else(|| err(ln, "missing '# dat-coefficients' header".into()))?;
    let mut dims = std::collections::HashMap::new();
    for field in meta.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| err(ln, format!("malformed header field {field:?}")))?;
        dims.insert(k, v);
    }
    let dim = |key: &str| -> CliResult<usize> {
        dims.get(key)
            .ok_or_else(|| err(ln, format!("header lacks {key}")))?
            .parse()
            .map_err(|_| err(ln, format!("header field {key} is not an integer")))
    };
    let (n, bands, frame_count, source_len) = (dim("n")?, dim("bands")?, dim("frames")?, dim("samples")?);
    if n != kernel.frame_len() || bands != kernel.bands() {
        return Err(err(
            ln,
            format!(
                "dimensions {n}x{bands} do not match configured kernel {}x{}",
                kernel.frame_len(),
                kernel.bands()
            ),
        ));
    }
    if frame_count == 0 {
        return Err(err(ln, "file holds no frames".into()));
    }
    if source_len > frame_count * n {
        return Err(err(ln, format!("samples={source_len} exceeds frames*n")));
    }
    let (ln, header) = lines.next().ok_or_else(|| err(ln + 1, "missing column header".into()))?;
    let expected_cols = 2 + 2 * bands;
    if header.split(',').count() != expected_cols || !header.starts_with("frame,j") {
        return Err(err(ln, format!("expected {expected_cols} columns starting with frame,j")));
    }

    let mut values = vec![vec![Complex64::default(); n * bands]; frame_count];
    let mut seen = vec![false; n * frame_count];
    let mut last = ln;
    for (ln, line) in lines {
        last = ln;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols {
            return Err(err(ln, format!("expected {expected_cols} fields, found {}", fields.len())));
        }
        let idx = |s: &str, what: &str| -> CliResult<usize> {
            s.trim().parse().map_err(|_| err(ln, format!("bad {what} index {s:?}")))
        };
        let (f, j) = (idx(fields[0], "frame")?, idx(fields[1], "time")?);
        if f >= frame_count || j >= n {
            return Err(err(ln, format!("index ({f}, {j}) out of range")));
        }
        if std::mem::replace(&mut seen[f * n + j], true) {
            return Err(err(ln, format!("duplicate row ({f}, {j})")));
        }
        for m in 0..bands {
            let num = |s: &str| -> CliResult<f64> {
                match s.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(err(ln, format!("bad number {s:?}"))),
                }
            };
            let re = num(fields[2 + 2 * m])?;
            let im = num(fields[3 + 2 * m])?;
            values[f][m * n + j] = Complex64::new(re, im);
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(err(
            last,
            format!("missing row frame={} j={}", missing / n, missing % n),
        ));
    }
    let frames = values
        .into_iter()
        .map(|v| DatCoefficients::from_band_major(kernel, v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoefficientFile { frames, source_len })
}

pub fn cmd_kernel(common: &Common, rows: Option<&str>) -> CliResult<String> {
    let kernel = common.kernel()?;
    let rows = rows.map(|r| parse_rows(r, kernel.bands())).transpose()?;
    Ok(kernel_csv(&kernel, rows.as_deref()))
}

pub fn cmd_transform(common: &Common, signal: &RealSignal) -> CliResult<String> {
    let kernel = common.kernel()?;
    let frames = frame_signal(signal.samples(), &FramePlan::new(kernel.frame_len()))?;
    if frames.frames.is_empty() {
        return Err(CliError::Dat(DatError::TooShort { len: 0, min: 1 }));
    }
    let coeffs = frames
        .frames
        .iter()
        .map(|f| dat_forward_fast(f, &kernel))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(coefficients_csv(&coeffs, signal.len(), common.fs))
}

pub fn cmd_invert(common: &Common, path: &Path, text: &str) -> CliResult<Vec<f64>> {
    let kernel = common.kernel()?;
    let file = parse_coefficients(path, text, &kernel)?;
    let mut samples = Vec::with_capacity(file.frames.len() * kernel.frame_len());
    for coeffs in &file.frames {
        samples.extend_from_slice(dat_inverse(coeffs, &kernel)?.samples());
    }
    samples.truncate(file.source_len);
    Ok(samples)
}

/// Long-format spectrum CSV: `frame,kind,index,freq_hz,linear,db` with
/// `kind` = `dft` (bins 0..=N/2) or `dat` (bands 0..M−1). Only whole frames
/// are analyzed.
pub fn cmd_spectrum(common: &Common, signal: &RealSignal) -> CliResult<String> {
    let kernel = common.kernel()?;
    let n = kernel.frame_len();
    if signal.len() < n {
        return Err(CliError::Dat(DatError::TooShort { len: signal.len(), min: n }));
    }
    let dft = Dft::new(n)?;
    let mut out = String::from("frame,kind,index,freq_hz,linear,db\n");
    for (f, frame) in signal.samples().chunks_exact(n).enumerate() {
        let spectrum = dft.forward_real(frame);
        for (k, c) in spectrum.iter().enumerate().take(n / 2 + 1) {
            let mag = c.norm();
            let freq = common.fs * k as f64 / n as f64;
            writeln!(out, "{f},dft,{k},{},{},{}", fmt_f64(freq), fmt_f64(mag), db(mag)).unwrap();
        }
        let spec = dat_spectrum(frame, &kernel)?;
        for (m, (&v, &freq)) in spec.values.iter().zip(&spec.band_frequencies_hz).enumerate() {
            writeln!(out, "{f},dat,{m},{},{},{}", fmt_f64(freq), fmt_f64(v), db(v)).unwrap();
        }
    }
    Ok(out)
}

/// Result of a single-signal denoising run.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseOutcome {
    pub output: Vec<f64>,
    pub input_snr_db: Option<f64>,
    pub output_snr_db: Option<f64>,
}

pub fn cmd_denoise(
    common: &Common,
    noisy: &RealSignal,
    clean: Option<&RealSignal>,
    transform: Transform,
) -> CliResult<DenoiseOutcome> {
    let config = common.denoise_config();
    config.plan.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let kernel = match transform {
        Transform::Dat => Some(common.kernel()?),
        Transform::Dft => None,
    };
    let output = denoise_signal(noisy.samples(), transform, &config, kernel.as_ref())?;
    let (input_snr_db, output_snr_db) = match clean {
        Some(c) => (
            Some(snr_db(c.samples(), noisy.samples())?),
            Some(snr_db(c.samples(), &output)?),
        ),
        None => (None, None),
    };
    Ok(DenoiseOutcome {
        output,
        input_snr_db,
        output_snr_db,
    })
}

/// Voiced and unvoiced surrogates, two generator seeds each, derived from
/// the master seed.
pub fn builtin_segments(seed: u64, fs: f64) -> crate::Result<Vec<Segment>> {
    let seg_seed = |i: usize| condition_seed(seed, i, u32::MAX as usize);
    Ok(vec![
        Segment {
            label: "voiced_a".into(),
            signal: gen_voiced_surrogate(SEGMENT_LEN, fs, seg_seed(0))?,
        },
        Segment {
            label: "voiced_b".into(),
            signal: gen_voiced_surrogate(SEGMENT_LEN, fs, seg_seed(1))?,
        },
        Segment {
            label: "unvoiced_a".into(),
            signal: gen_unvoiced_surrogate(SEGMENT_LEN, fs, seg_seed(2))?,
        },
        Segment {
            label: "unvoiced_b".into(),
            signal: gen_unvoiced_surrogate(SEGMENT_LEN, fs, seg_seed(3))?,
        },
    ])
}

pub fn cmd_sweep(
    common: &Common,
    snr_grid: Option<&str>,
    segments: &[PathBuf],
    per_segment: bool,
) -> CliResult<String> {
    let grid = match snr_grid {
        Some(g) => parse_grid(g)?,
        None => default_snr_grid(),
    };
    common.kernel()?;
    let segments = if segments.is_empty() {
        builtin_segments(common.seed, common.fs)?
    } else {
        segments
            .iter()
            .map(|p| {
                let label = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().replace(',', "_"))
                    .unwrap_or_else(|| "segment".into());
                Ok(Segment {
                    label,
                    signal: common.read(p)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    let mut config = SweepConfig::new(common.n, common.fs);
    config.denoise = common.denoise_config();
    if per_segment {
        config.denoise.scope = ThresholdScope::PerSegment;
    }
    config.snr_grid = grid;
    config.seed = common.seed;
    Ok(run_sweep(&segments, &config)?.to_csv())
}

fn write_samples(path: &Path, samples: &[f64], fs: f64) -> CliResult<()> {
    let is_wav = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        let clip = WavClip {
            samples: samples.to_vec(),
            sample_rate_hz: fs,
            bits_per_sample: 16,
        };
        let clipped = write_wav(&clip, path)?;
        if clipped > 0 {
            eprintln!("dat: warning: {clipped} samples clipped to [-1, 1]");
        }
        Ok(())
    } else {
        Ok(write_signal_csv(samples, path)?)
    }
}

fn emit_samples(out: Option<&Path>, samples: &[f64], fs: f64) -> CliResult<()> {
    match out {
        Some(path) => write_samples(path, samples, fs),
        None => {
            let mut text = String::from("sample\n");
            for &x in samples {
                text.push_str(&fmt_f64(x));
                text.push('\n');
            }
            emit(None, &text)
        }
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    let common = &cli.common;
    if common.n < 4 || !common.n.is_power_of_two() {
        return Err(CliError::Usage(format!("--n {} is not a power of two >= 4", common.n)));
    }
    if !(common.alpha.is_finite() && common.alpha >= 0.0) || common.alpha_dat.is_some_and(|a| !a.is_finite() || a < 0.0) {
        return Err(CliError::Usage("threshold scale must be non-negative".into()));
    }
    let out = common.out.as_deref();
    match &cli.command {
        Command::Kernel { rows } => emit(out, &cmd_kernel(common, rows.as_deref())?),
        Command::Transform { input } => {
            let signal = common.read(input)?;
            emit(out, &cmd_transform(common, &signal)?)
        }
        Command::Invert { input } => {
            if !input.exists() {
                return Err(CliError::Usage(format!("input file {} does not exist", input.display())));
            }
            let text = fs::read_to_string(input).map_err(|e| DatError::io(input, e))?;
            let samples = cmd_invert(common, input, &text)?;
            emit_samples(out, &samples, common.fs)
        }
        Command::Spectrum { input, square, samples } => {
            let signal = match (input, square) {
                (Some(p), _) => common.read(p)?,
                (None, Some(hz)) => crate::signal_io::gen_square(*hz, common.fs, *samples)?,
                (None, None) => return Err(CliError::Usage("spectrum needs --input or --square".into())),
            };
            emit(out, &cmd_spectrum(common, &signal)?)
        }
        Command::Denoise {
            input,
            clean,
            reference,
            snr,
            transform,
        } => {
            let (noisy, clean_sig) = match (input, clean) {
                (Some(p), None) => {
                    let noisy = common.read(p)?;
                    let reference = reference.as_ref().map(|r| common.read(r)).transpose()?;
                    (noisy, reference)
                }
                (None, Some(p)) => {
                    let clean = common.read(p)?;
                    let snr = snr.ok_or_else(|| CliError::Usage("--clean requires --snr".into()))?;
                    let noisy = add_noise_at_snr(clean.samples(), snr, common.seed)?;
                    (RealSignal::new(noisy, clean.sample_rate_hz())?, Some(clean))
                }
                _ => return Err(CliError::Usage("denoise needs --input or --clean".into())),
            };
            let outcome = cmd_denoise(common, &noisy, clean_sig.as_ref(), *transform)?;
            match out {
                Some(path) => write_samples(path, &outcome.output, noisy.sample_rate_hz())?,
                None => emit_samples(None, &outcome.output, noisy.sample_rate_hz())?,
            }
            if let (Some(i), Some(o)) = (outcome.input_snr_db, outcome.output_snr_db) {
                eprintln!("transform={transform} input_snr_db={} output_snr_db={}", fmt_f64(i), fmt_f64(o));
            }
            Ok(())
        }
        Command::Sweep {
            snr_grid,
            segments,
            per_segment,
        } => emit(out, &cmd_sweep(common, snr_grid.as_deref(), segments, *per_segment)?),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// `--help`/`--version` print and return `Ok`.
pub fn run<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(());
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    execute(cli)
}

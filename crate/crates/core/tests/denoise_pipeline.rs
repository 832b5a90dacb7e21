mod common;

use common::random_signal;
use dat_core::dat::dat_forward_fast;
use dat_core::denoise::{
    add_noise_at_snr, denoise_frame_dat, denoise_frame_dft, denoise_signal, run_sweep, snr_db, threshold_value,
    DenoiseConfig, Segment, SweepConfig, ThresholdScope, Transform,
};
use dat_core::psychoacoustics::build_kernel;
use dat_core::signal_io::{gen_unvoiced_surrogate, gen_voiced_surrogate};
use dat_core::spectral::dft_forward;
use dat_core::Execution;
use proptest::prelude::*;

#[test]
fn threshold_is_mean_dft_magnitude() {
    let frame = random_signal(128, 8);
    let spec = dft_forward(&frame).unwrap();
    let direct = spec.magnitudes().iter().sum::<f64>() / 128.0;
    assert!((threshold_value(&frame, 1.0).unwrap() - direct).abs() <= 1e-12 * direct);
    assert!((threshold_value(&frame, 0.5).unwrap() - 0.5 * direct).abs() <= 1e-12 * direct);
}

#[test]
fn whole_signal_identity_at_zero_alpha() {
    let clean = gen_voiced_surrogate(500, 16000.0, 3).unwrap();
    let config = DenoiseConfig::new(128, 16000.0).with_alpha(0.0);
    for t in Transform::ALL {
        let out = denoise_signal(clean.samples(), t, &config, None).unwrap();
        assert_eq!(out.len(), 500);
        let err: f64 = out.iter().zip(clean.samples()).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(err.sqrt() <= 1e-10 * clean.energy().sqrt(), "{t}");
    }
}

#[test]
fn per_segment_scope_runs() {
    let clean = gen_voiced_surrogate(512, 16000.0, 3).unwrap();
    let noisy = add_noise_at_snr(clean.samples(), 0.0, 9).unwrap();
    let mut config = DenoiseConfig::new(128, 16000.0);
    config.scope = ThresholdScope::PerSegment;
    let out = denoise_signal(&noisy, Transform::Dat, &config, None).unwrap();
    assert!(snr_db(clean.samples(), &out).unwrap().is_finite());
}

#[test]
fn sweep_is_deterministic_and_policy_independent() {
    let segments = vec![
        Segment {
            label: "v".into(),
            signal: gen_voiced_surrogate(512, 16000.0, 1).unwrap(),
        },
        Segment {
            label: "u".into(),
            signal: gen_unvoiced_surrogate(512, 16000.0, 2).unwrap(),
        },
    ];
    let mut cfg = SweepConfig::new(128, 16000.0);
    let a = run_sweep(&segments, &cfg).unwrap();
    let b = run_sweep(&segments, &cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    cfg.exec = Execution::Sequential;
    assert_eq!(run_sweep(&segments, &cfg).unwrap().to_csv(), a.to_csv());
    assert_eq!(a.records.len(), 2 * 2 * 9);
    for r in &a.records {
        assert!(r.output_snr_db.is_finite());
    }
}

#[test]
fn sweep_rejects_short_segments() {
    let segments = vec![Segment {
        label: "short".into(),
        signal: gen_voiced_surrogate(100, 16000.0, 1).unwrap(),
    }];
    assert!(run_sweep(&segments, &SweepConfig::new(128, 16000.0)).is_err());
}

fn frame() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thresholding_never_adds_energy(x in frame(), alpha in 0.0f64..3.0) {
        let k = build_kernel(128, 16000.0).unwrap();
        let t = threshold_value(&x, alpha).unwrap();
        let energy: f64 = x.iter().map(|v| v * v).sum();

        let dft = denoise_frame_dft(&x, t).unwrap();
        prop_assert!(dft.imag_residual <= 1e-9);
        let e: f64 = dft.samples.iter().map(|v| v * v).sum();
        prop_assert!(e <= energy * (1.0 + 1e-10));

        let dat = denoise_frame_dat(&x, t, &k).unwrap();
        prop_assert!(dat.imag_residual <= 1e-9);
        // Kept coefficients carry no more energy than all of them, and the
        // inverse is a contraction on the coefficient space.
        let kept: f64 = dat_forward_fast(&x, &k).unwrap().values().iter()
            .filter(|c| c.norm() >= t).map(|c| c.norm_sqr()).sum::<f64>() / (128.0 * 128.0);
        prop_assert!(kept <= energy * (1.0 + 1e-10));
        let e: f64 = dat.samples.iter().map(|v| v * v).sum();
        prop_assert!(e <= kept * (1.0 + 1e-10) + 1e-24);
    }

    #[test]
    fn realized_snr_is_exact(seed in any::<u64>(), target in -20.0f64..20.0) {
        let clean = gen_voiced_surrogate(512, 16000.0, 7).unwrap();
        let noisy = add_noise_at_snr(clean.samples(), target, seed).unwrap();
        prop_assert!((snr_db(clean.samples(), &noisy).unwrap() - target).abs() <= 0.01);
    }
}

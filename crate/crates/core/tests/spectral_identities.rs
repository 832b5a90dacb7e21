mod common;

use common::{direct_dft, random_signal, to_complex};
use dat_core::spectral::{dft_forward, dft_inverse, energy_residual, ComplexSpectrum};
use num_complex::Complex64;
use proptest::prelude::*;

fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let peak = b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / peak
}

#[test]
fn forward_matches_direct_sum_up_to_32() {
    for n in [2, 3, 4, 5, 8, 12, 16, 31, 32] {
        let s = random_signal(n, n as u64);
        let fast = dft_forward(&s).unwrap();
        assert!(max_rel(fast.coefficients(), &direct_dft(&to_complex(&s), -1.0)) <= 1e-12, "n={n}");
    }
}

#[test]
fn round_trip_sizes() {
    for n in [2, 8, 64, 256, 1024] {
        let s = random_signal(n, 100 + n as u64);
        let back = dft_inverse(&dft_forward(&s).unwrap()).unwrap();
        let err = back.iter().zip(&s).map(|(c, x)| (c - x).norm()).fold(0.0, f64::max);
        let peak = s.iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!(err <= 1e-12 * peak);
    }
}

fn signal(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

proptest! {
    #[test]
    fn energy_identity(s in prop::sample::select(vec![4usize, 16, 64, 256, 1024]).prop_flat_map(signal)) {
        prop_assume!(s.iter().any(|&x| x != 0.0));
        prop_assert!(energy_residual(&s).unwrap() <= 1e-12);
    }

    #[test]
    fn conjugate_symmetry(s in signal(128)) {
        prop_assert!(dft_forward(&s).unwrap().conjugate_symmetry_error() <= 1e-12);
    }

    #[test]
    fn linearity(s in signal(64), t in signal(64), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mix: Vec<f64> = s.iter().zip(&t).map(|(x, y)| a * x + b * y).collect();
        let lhs = dft_forward(&mix).unwrap();
        let fs = dft_forward(&s).unwrap();
        let ft = dft_forward(&t).unwrap();
        let rhs: Vec<Complex64> = fs.coefficients().iter().zip(ft.coefficients()).map(|(x, y)| x * a + y * b).collect();
        let peak = rhs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let err = lhs.coefficients().iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12 * peak.max(fs.magnitudes().into_iter().fold(0.0, f64::max)));
    }

    #[test]
    fn complex_round_trip(re in signal(32), im in signal(32)) {
        let spec: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let time = dft_inverse(&ComplexSpectrum::new(spec.clone())).unwrap();
        let direct: Vec<Complex64> = direct_dft(&spec, 1.0).into_iter().map(|c| c / 32.0).collect();
        prop_assert!(max_rel(&time, &direct) <= 1e-12);
    }
}

//! Property-based checks for the numerical kernels, plus a small Monte-Carlo
//! exercise of the dip fit under measurement noise.

use epmspdc::counts::{
    accidental_probability, coincidence_rates, infer_pair_rate, singles_probability,
    DetectionConfig,
};
use epmspdc::dispersion::{ktp_y, ktp_z, omega_from_lambda};
use epmspdc::hom::{
    fit_triangular_dip, leakage_adjusted_visibility, visibility, AxisUnit,
};
use epmspdc::jsa::{
    linspace, pairwise_sum, schmidt_decompose, sinc, FrequencyGrid, JointSpectralAmplitude,
    PumpSpec,
};
use epmspdc::phasematch::{regime_check, Regime};
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Complex64 = Complex<f64>;

fn base_detection() -> DetectionConfig {
    DetectionConfig {
        pair_rate: 4.0e6,
        transmission: [0.17983, 0.13035],
        efficiency: [0.16, 0.24],
        dark_rate: [40.0, 20.0],
        gate_width: 20e-9,
        gate_rate: 50e3,
        coincidence_window: 1.8e-9,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singles_probability_is_monotone_in_flux(
        flux in 0.0..5e7f64,
        bump in 1.0..1e6f64,
        eta in 0.01..0.9f64,
        dark in 0.0..1e4f64,
    ) {
        let g = 20e-9;
        let p_lo = singles_probability(flux, eta, dark, g);
        let p_hi = singles_probability(flux + bump, eta, dark, g);
        prop_assert!(p_hi >= p_lo);
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
    }

    #[test]
    fn accidentals_are_symmetric_and_linear_in_window(
        p1 in 1e-6..0.05f64,
        p2 in 1e-6..0.05f64,
        frac in 0.01..1.0f64,
    ) {
        let g = 20e-9;
        let w = frac * g;
        let a = accidental_probability(p1, p2, w, g).unwrap();
        let b = accidental_probability(p2, p1, w, g).unwrap();
        prop_assert!((a - b).abs() <= 1e-18 + 1e-12 * a.abs());
        let half = accidental_probability(p1, p2, 0.5 * w, g).unwrap();
        prop_assert!((a - 2.0 * half).abs() <= 1e-18 + 1e-12 * a.abs());
    }

    #[test]
    fn pair_rate_inference_inverts_the_forward_model(
        pair_rate in 1e3..1e8f64,
        t1 in 0.01..0.9f64,
        t2 in 0.01..0.9f64,
        e1 in 0.05..0.9f64,
        e2 in 0.05..0.9f64,
    ) {
        let cfg = DetectionConfig {
            pair_rate,
            transmission: [t1, t2],
            efficiency: [e1, e2],
            ..base_detection()
        };
        let rates = coincidence_rates(&cfg).unwrap();
        let inferred = infer_pair_rate(rates.rate_true_pairs, &cfg).unwrap();
        prop_assert!((inferred / pair_rate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn leakage_adjustment_stays_in_range(v in 0.0..1.0f64, eps in 0.0..0.5f64) {
        let adj = leakage_adjusted_visibility(v, eps).unwrap();
        prop_assert!(adj >= 0.0);
        prop_assert!(adj <= v);
    }

    #[test]
    fn flat_curves_are_degenerate(level in 0.01..2.0f64) {
        let c = vec![level; 64];
        let vis = visibility(&c).unwrap();
        prop_assert!(vis.degenerate);
        prop_assert!(vis.v == 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_summation(v in prop::collection::vec(-1e3..1e3f64, 1..300)) {
        let naive: f64 = v.iter().sum();
        let pair = pairwise_sum(&v);
        prop_assert!((pair - naive).abs() <= 1e-9 * (1.0 + naive.abs()));
    }

    #[test]
    fn group_slowness_matches_finite_differences(lam_um in 0.6..1.8f64) {
        for set in [ktp_y(), ktp_z()] {
            let w = omega_from_lambda(lam_um * 1e-6);
            let h = w * 1e-5;
            let kp = set.k_prime(w).unwrap();
            let fd = (set.k(w + h).unwrap() - set.k(w - h).unwrap()) / (2.0 * h);
            prop_assert!(((kp - fd) / kp).abs() < 1e-7);
        }
    }

    #[test]
    fn sinc_is_even_and_bounded(x in -50.0..50.0f64) {
        prop_assert!((sinc(x) - sinc(-x)).abs() < 1e-15);
        prop_assert!(sinc(x).abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn linspace_hits_both_endpoints(a in -10.0..10.0f64, span in 0.1..10.0f64, n in 2..200usize) {
        let b = a + span;
        let v = linspace(a, b, n);
        prop_assert!(v.len() == n);
        prop_assert!(v[0] == a && v[n - 1] == b);
        prop_assert!(v.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn frequency_grid_axis_is_symmetric(half in 1e12..1e14f64, exp in 4u32..9u32) {
        let n = 1usize << exp;
        let center = 10.0 * half;
        let grid = FrequencyGrid::new(center, half, n).unwrap();
        let ax = grid.axis();
        prop_assert!(ax.len() == n);
        for i in 0..n {
            let lo = ax[i] - center;
            let hi = ax[n - 1 - i] - center;
            prop_assert!((lo + hi).abs() < 1e-3 * half);
        }
        prop_assert!((ax[0] - (center - half)).abs() < 1e-6);
        prop_assert!((ax[n - 1] - (center + half)).abs() < 1e-6);
    }

    #[test]
    fn separable_gaussian_states_have_unit_schmidt_number(
        ws in 3e11..3e12f64,
        wi in 3e11..3e12f64,
    ) {
        let half = 4.0 * ws.max(wi);
        let grid = FrequencyGrid::new(20.0 * half, half, 64).unwrap();
        let ax = grid.axis();
        let mut a = DMatrix::<Complex64>::zeros(64, 64);
        for j in 0..64 {
            for k in 0..64 {
                let ds = (ax[j] - grid.center) / ws;
                let di = (ax[k] - grid.center) / wi;
                a[(j, k)] = Complex64::new((-0.5 * (ds * ds + di * di)).exp(), 0.0);
            }
        }
        let mut jsa = JointSpectralAmplitude { grid, a, normalized: false };
        jsa.normalize().unwrap();
        prop_assert!((jsa.total_probability() - 1.0).abs() < 1e-9);
        let schmidt = schmidt_decompose(&jsa).unwrap();
        let lambda_sum: f64 = schmidt.coefficients.iter().sum();
        prop_assert!((lambda_sum - 1.0).abs() < 1e-6);
        prop_assert!((schmidt.k - 1.0).abs() < 1e-9);
    }

    #[test]
    fn regime_classification_is_consistent(
        omega_c in 1e11..1e13f64,
        f_pump in 0.1..10.0f64,
        f_epm in 0.1..10.0f64,
    ) {
        let omega_p = f_pump * omega_c;
        let omega_epm = f_epm * omega_p;
        let r = 2.0;
        let got = regime_check(omega_c, omega_p, omega_epm, r);
        if omega_p >= r * omega_c && omega_epm >= r * omega_p {
            prop_assert!(got == Regime::Satisfied);
        } else if omega_p <= omega_c || omega_epm <= omega_p {
            prop_assert!(got == Regime::Violated);
        } else {
            prop_assert!(got == Regime::Marginal);
        }
    }
}

#[test]
fn pump_envelope_integral_matches_the_gaussian_closed_form() {
    // integral over omega of |alpha|^2 = sigma * sqrt(pi)
    let pump = PumpSpec::Pulsed {
        lambda: 790e-9,
        fwhm: 6e-9,
    };
    let sigma = pump.sigma_omega().unwrap();
    let w0 = pump.center_omega();
    let ax = linspace(w0 - 8.0 * sigma, w0 + 8.0 * sigma, 20001);
    let dw = ax[1] - ax[0];
    let total: f64 = ax
        .iter()
        .map(|&w| pump.envelope(w).unwrap().powi(2) * dw)
        .sum();
    let expected = sigma * std::f64::consts::PI.sqrt();
    assert!(
        ((total - expected) / expected).abs() < 1e-6,
        "integral {total:.6e} vs {expected:.6e}"
    );
}

#[test]
fn triangular_fit_survives_measurement_noise() {
    // Synthetic dip with Gaussian counting noise; the fit should recover the
    // generating parameters across seeds.
    let b_true = 0.5;
    let v_true = 0.98;
    let x0_true = 0.2e-12;
    let w_true = 3.0e-12;
    let delays = linspace(-6e-12, 6e-12, 321);
    let model = |x: f64| {
        b_true * (1.0 - v_true * (1.0 - (x - x0_true).abs() / (w_true / 2.0)).max(0.0))
    };
    for seed in [11u64, 23, 47] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = || {
            // Box-Muller from two uniforms.
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let c: Vec<f64> = delays
            .iter()
            .map(|&x| (model(x) + 0.002 * gauss()).max(0.0))
            .collect();
        let fit = fit_triangular_dip(&delays, &c, AxisUnit::Seconds).unwrap();
        assert!(
            (fit.visibility - v_true).abs() < 0.03,
            "seed {seed}: V {}",
            fit.visibility
        );
        assert!(
            ((fit.width - w_true) / w_true).abs() < 0.05,
            "seed {seed}: width {}",
            fit.width
        );
        assert!(
            (fit.center - x0_true).abs() < 0.15e-12,
            "seed {seed}: centre {}",
            fit.center
        );
        assert!(fit.sigma.is_some());
    }
}

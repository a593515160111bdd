//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with `cargo test -p memsim-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::time::Instant;

use memsim_cli::{run_scenario, Registry};
use memsim_core::{
    afc_echo, bloch_integrate, build_gaussian_profile, dephasing_factor, deduce_eta_t,
    fit_exp_decay, fit_gaussian_decay, fit_gaussian_profile, fit_rose_decay, fit_sinusoid,
    focal_spot_diameter, gamma_inh_from_t2star, insertion_loss_db, od_from_transmission,
    phase_matching, rose_echo, rose_efficiency, spin_wave_echo, two_pulse_echo,
    AbsorptionProfile, Amplitude, BlochVector, Branching, BurnSweep, class_clean, create_afc,
    spin_polarize, CombSpec, FreqRef, FrequencyGrid, LevelScheme, MemoryParams, NoiseGen, Pulse,
    PulseShape, SpectralState,
};

fn assert_within(actual: f64, expected: f64, rel_tol: f64, what: &str) {
    let err = (actual - expected).abs() / expected.abs();
    assert!(
        err <= rel_tol,
        "{what}: {actual} vs {expected} (relative error {err:.3e} > {rel_tol:.1e})"
    );
}

fn nominal_params() -> MemoryParams<f64> {
    MemoryParams {
        od: 1.75,
        t2: 202e-6,
        t2eff: 37.4e-6,
        t2star: 3.3e-6,
        delta: 125e3,
        bandwidth: 2e6,
        eta_t: 0.80,
    }
}

fn square_comb(delta: f64, finesse: f64, od_tooth: f64, half_band: f64) -> AbsorptionProfile<f64> {
    let grid = FrequencyGrid::symmetric(2.0 * half_band, 1e3).unwrap();
    let half_tooth = delta / (2.0 * finesse);
    let od = grid
        .values()
        .map(|d| {
            if d.abs() > half_band {
                return 0.0;
            }
            let center = ((d / delta).floor() + 0.5) * delta;
            if (d - center).abs() <= half_tooth {
                od_tooth
            } else {
                0.0
            }
        })
        .collect();
    AbsorptionProfile::new(grid, od).unwrap()
}

fn gaussian_input() -> Pulse<f64> {
    Pulse {
        name: "in".into(),
        shape: PulseShape::Gaussian,
        t0: 0.0,
        width: 5e-7,
        freq: FreqRef::F0,
        chirp_bandwidth: 0.0,
        phase: 0.0,
        amplitude: Amplitude::RabiHz(0.0),
        direction: 1,
    }
}

#[test]
fn criterion_1_derived_constants() {
    let start = Instant::now();
    assert_within(od_from_transmission(0.174).unwrap(), 1.749, 0.005, "OD");
    assert_within(
        gamma_inh_from_t2star(3.3e-6),
        113.6e3,
        0.005,
        "spin linewidth",
    );
    assert_within(
        focal_spot_diameter(75e-3, 580e-9, 6e-3),
        5.44e-6,
        0.005,
        "focal spot",
    );
    assert_within(
        insertion_loss_db(0.24, 0.75).unwrap(),
        4.95,
        0.005,
        "insertion loss",
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 (derived constants, 0.5%): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_eq2_consistency() {
    assert_within(deduce_eta_t(0.344, 1.75).unwrap(), 0.804, 0.01, "eta_t");
    let forward = rose_efficiency(0.80, 1.75, 0.0, 1.0);
    assert_within(forward, 0.3407, 0.015, "eta0 forward vs stated value");
    assert_within(forward, 0.344, 0.015, "eta0 forward vs measured value");
    println!("criterion 2 (transfer-efficiency consistency): PASS");
}

#[test]
fn criterion_3_echo_timing_laws() {
    let params = nominal_params();

    let r1 = Pulse {
        name: "r1".into(),
        shape: PulseShape::Chs,
        t0: 2.5e-6,
        width: 0.94e-6,
        freq: FreqRef::F0,
        chirp_bandwidth: 2e6,
        phase: 0.0,
        amplitude: Amplitude::RabiHz(1e6),
        direction: -1,
    };
    let r2 = Pulse {
        t0: 7.44e-6,
        name: "r2".into(),
        ..r1.clone()
    };
    let tau = 4.94e-6;
    let rose = rose_echo(&params, tau, (&r1, &r2), 1).unwrap();
    assert_eq!(rose.secondary.time, 2.0 * tau);
    assert_within(rose.secondary.time, 9.88e-6, 1e-12, "rose echo time");

    let comb = square_comb(125e3, 4.0, 1.2, 1e6);
    let afc = afc_echo(&comb, &params, &gaussian_input()).unwrap();
    assert_eq!(afc.time, 1.0 / 125e3);
    assert_within(afc.time, 8.0e-6, 1e-12, "afc echo time");

    let control = Pulse {
        name: "c".into(),
        shape: PulseShape::Chs,
        t0: 3e-6,
        width: 1.7e-6,
        freq: FreqRef::FPlus,
        chirp_bandwidth: 2e6,
        phase: 0.0,
        amplitude: Amplitude::RabiHz(6e5),
        direction: 1,
    };
    let tau_s = 1.7e-6;
    let sw = spin_wave_echo(&comb, &params, (&control, &control), tau_s).unwrap();
    assert_eq!(sw.echo.time, tau_s + 1.0 / 125e3);
    assert_within(sw.echo.time, 9.7e-6, 1e-9, "spin-wave echo time");

    let tpe = two_pulse_echo(&params, 101e-6);
    assert_eq!(tpe.time, 2.0 * 101e-6);

    println!("criterion 3 (echo timing laws, exact): PASS");
}

#[test]
fn criterion_4_phase_matching() {
    assert_eq!(phase_matching(1, &[-1]), (-3, false));
    assert_eq!(phase_matching(1, &[-1, -1]), (1, true));
    println!("criterion 4 (wavevector phase matching): PASS");
}

#[test]
fn criterion_5_fit_round_trips() {
    let start = Instant::now();

    // optical coherence times
    for t2 in [202e-6, 186e-6] {
        let taus: Vec<f64> = (1..=8).map(|k| k as f64 * 10e-6).collect();
        let amps: Vec<f64> = taus.iter().map(|t| (-2.0 * t / t2).exp()).collect();
        let fit = fit_exp_decay(&taus, &amps).unwrap();
        assert_within(fit.param("t2").unwrap(), t2, 1e-3, "t2 round trip");
    }

    // rephasing decay
    let taus: Vec<f64> = (1..=15).map(|k| k as f64 * 2e-6).collect();
    let effs: Vec<f64> = taus
        .iter()
        .map(|t| 0.344 * (-4.0 * t / 37.4e-6).exp())
        .collect();
    let fit = fit_rose_decay(&taus, &effs).unwrap();
    assert_within(fit.param("eta0").unwrap(), 0.344, 1e-3, "eta0 round trip");
    assert_within(fit.param("t2eff").unwrap(), 37.4e-6, 1e-3, "t2eff round trip");

    // spin dephasing
    let taus: Vec<f64> = (1..=12).map(|k| k as f64 * 0.5e-6).collect();
    let amps: Vec<f64> = taus
        .iter()
        .map(|t| (-(t / 3.3e-6).powi(2)).exp())
        .collect();
    let fit = fit_gaussian_decay(&taus, &amps).unwrap();
    assert_within(fit.param("t2star").unwrap(), 3.3e-6, 1e-3, "t2star round trip");

    // inhomogeneous linewidths
    for (fwhm, peak) in [(4.7e9, 3.00), (11.8e9, 1.75)] {
        let grid = FrequencyGrid::symmetric(30e9, 10e6).unwrap();
        let profile = build_gaussian_profile(fwhm, peak, &grid).unwrap();
        let fit = fit_gaussian_profile(&profile).unwrap();
        assert_within(fit.param("fwhm").unwrap(), fwhm, 1e-3, "linewidth round trip");
    }

    // visibilities
    for v in [0.97, 0.99] {
        let phases: Vec<f64> = (0..18).map(|k| k as f64 * 20f64.to_radians()).collect();
        let intens: Vec<f64> = phases
            .iter()
            .map(|p| 0.5 * (1.0 + v * (p + 0.3).sin()))
            .collect();
        let fit = fit_sinusoid(&phases, &intens).unwrap();
        assert_within(fit.param("v").unwrap(), v, 1e-3, "visibility round trip");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 5 (noiseless fit round trips, 0.1%): PASS in {elapsed:?}");
}

#[test]
fn criterion_6_visibility_replicate_spread() {
    // 100 seeded replicates of the 18-point, 20-degree scan at V = 0.99
    // with the calibrated noise level from the fig5b scenario.
    let registry = Registry::standard();
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&registry, "fig5b-afc-visibility", &[], dir.path()).unwrap();
    assert!(report.passed, "targets: {:?}", report.target_lines);
    let summary =
        std::fs::read_to_string(report.out_dir.join("summary.txt")).unwrap();
    let spread: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("result.v_spread="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (0.01..=0.05).contains(&spread),
        "replicate spread {spread} outside [0.01, 0.05]"
    );
    println!("criterion 6 (visibility spread {spread:.4} in [0.01, 0.05]): PASS");
}

#[test]
fn criterion_7_property_suites() {
    // Bloch norm conservation over 1000 randomized pulses.
    let mut rng = NoiseGen::new(860);
    let shapes = [PulseShape::Gaussian, PulseShape::Chs, PulseShape::Square];
    let mut max_drift: f64 = 0.0;
    for i in 0..1000 {
        let pulse = Pulse {
            name: format!("p{i}"),
            shape: shapes[i % 3],
            t0: 1e-5 * rng.uniform(),
            width: 2e-7 + 1.8e-6 * rng.uniform(),
            freq: FreqRef::F0,
            chirp_bandwidth: if i % 2 == 0 { 2e6 * rng.uniform() } else { 0.0 },
            phase: std::f64::consts::TAU * rng.uniform() - std::f64::consts::PI,
            amplitude: Amplitude::RabiHz(2e6 * rng.uniform()),
            direction: if rng.uniform() < 0.5 { 1 } else { -1 },
        };
        let detuning = 4e6 * rng.uniform() - 2e6;
        let out = bloch_integrate(&pulse, detuning, BlochVector::ground()).unwrap();
        max_drift = max_drift.max((out.norm() - 1.0).abs());
    }
    assert!(max_drift < 1e-6, "worst norm drift {max_drift:e}");

    // Population conservation across the full preparation chain.
    let scheme = LevelScheme::<f64>::default();
    let grid = FrequencyGrid::symmetric(4e6, 1e3).unwrap();
    let state = SpectralState::uniform(grid, 1.2, 1.0 / 3.0).unwrap();
    let mk = |center: f64| BurnSweep::new(center, 4e6, 2e-3, 100, 0.5).unwrap();
    let cleaned = class_clean(
        &state,
        &scheme,
        &[mk(0.0), mk(scheme.f_plus()), mk(scheme.f_minus())],
        &Branching::uniform(),
    )
    .unwrap();
    let polarized = spin_polarize(
        &cleaned,
        &scheme,
        &[mk(scheme.f_plus()), mk(scheme.f_minus())],
        &Branching::uniform(),
    )
    .unwrap();
    let comb = create_afc(
        &polarized,
        &CombSpec::new(125e3, 2e6, 4.0, 50).unwrap(),
        &scheme,
    )
    .unwrap();
    let before = state.total_population();
    for s in [&cleaned, &polarized, &comb] {
        let drift = (s.total_population() - before).abs() / before;
        assert!(drift < 1e-9, "population drift {drift:e}");
    }

    // Dephasing factor: exactly 1 at t = 0, magnitude never above 1.
    for seed in 0..50u64 {
        let grid = FrequencyGrid::symmetric(1e6, 2e3).unwrap();
        let mut noise = NoiseGen::new(seed);
        let od: Vec<f64> = (0..grid.count()).map(|_| 3.0 * noise.uniform()).collect();
        let profile = AbsorptionProfile::new(grid, od).unwrap();
        let at_zero = dephasing_factor(&profile, (-1e6, 1e6), 0.0).unwrap();
        assert!((at_zero.re - 1.0).abs() < 1e-12 && at_zero.im.abs() < 1e-12);
        for k in 1..=20 {
            let t = 1e-6 * k as f64;
            let g = dephasing_factor(&profile, (-1e6, 1e6), t).unwrap();
            assert!(g.norm() <= 1.0 + 1e-12);
        }
    }

    // The forward-recall bound holds on a grid of (OD, tau) for eta_t <= 1.
    let bound = 4.0 * (-2.0f64).exp();
    for eta_i in 0..=10 {
        let eta_t = eta_i as f64 / 10.0;
        for od_i in 1..=40 {
            let od = od_i as f64 * 0.25;
            for tau_i in 0..=20 {
                let tau = tau_i as f64 * 5e-6;
                let eff = rose_efficiency(eta_t, od, tau, 37.4e-6);
                assert!(eff <= bound + 1e-12, "eta({eta_t},{od},{tau}) = {eff}");
            }
        }
    }

    println!("criterion 7 (property suites): PASS (worst Bloch drift {max_drift:.2e})");
}

#[test]
fn criterion_8_gaussian_spin_line_oracle() {
    // Numeric quadrature over a Gaussian detuning distribution of FWHM
    // gamma reproduces the 1/e intensity decay at T2* = sqrt(2 ln2)/(pi
    // gamma) within 0.5%.
    for gamma in [60e3f64, 114e3, 200e3] {
        let t2star = (2.0 * 2f64.ln()).sqrt() / (std::f64::consts::PI * gamma);
        let half_span = 4.0 * gamma;
        let grid = FrequencyGrid::symmetric(half_span, gamma / 500.0).unwrap();
        let line = build_gaussian_profile(gamma, 1.0, &grid).unwrap();
        let intensity = dephasing_factor(&line, (-half_span, half_span), t2star)
            .unwrap()
            .norm_sqr();
        assert_within(intensity, (-1.0f64).exp(), 0.005, "spin-line 1/e point");
        assert_within(
            gamma_inh_from_t2star(t2star),
            gamma,
            1e-9,
            "closed-form linewidth",
        );
    }
    println!("criterion 8 (Gaussian spin-line oracle, 0.5%): PASS");
}

#[test]
fn criterion_9_calibrated_reproductions() {
    let registry = Registry::standard();
    let dir = tempfile::tempdir().unwrap();

    // AFC storage at 5% +/- 1% and the spin-wave/AFC intensity ratio.
    let afc = run_scenario(&registry, "afc-storage", &[], dir.path()).unwrap();
    assert!(afc.passed, "afc-storage targets: {:?}", afc.target_lines);
    let summary = std::fs::read_to_string(afc.out_dir.join("summary.txt")).unwrap();
    let value = |key: &str| -> f64 {
        summary
            .lines()
            .find_map(|l| l.strip_prefix(&format!("result.{key}=")))
            .unwrap_or_else(|| panic!("missing {key}"))
            .parse()
            .unwrap()
    };
    let afc_eff = value("afc_efficiency");
    assert!(
        (afc_eff - 0.05).abs() <= 0.011,
        "afc efficiency {afc_eff} outside 0.05 +/- 0.011"
    );
    let ratio = value("ratio");
    assert!(ratio < 0.3, "spin-wave/AFC ratio {ratio} not below 0.3");

    // CHS rephasing transfer efficiency at 0.80 +/- 0.02.
    let rose = run_scenario(&registry, "rose-storage", &[], dir.path()).unwrap();
    assert!(rose.passed, "rose-storage targets: {:?}", rose.target_lines);
    let summary = std::fs::read_to_string(rose.out_dir.join("summary.txt")).unwrap();
    let eta_t: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("result.eta_t="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (eta_t - 0.80).abs() <= 0.02,
        "transfer efficiency {eta_t} outside 0.80 +/- 0.02"
    );

    println!(
        "criterion 9 (calibrated reproduction: afc {afc_eff:.4}, ratio {ratio:.3}, eta_t {eta_t:.4}): PASS"
    );
}

//! Registered scenarios.
//!
//! Each scenario wires preparation, pulses, echo computation and fitting
//! into one reproducible pipeline, returns its headline numbers as a
//! value map, and ships its plot-ready artifacts as files. Expected
//! targets live in the scenario's configuration file next to the inputs
//! they depend on.

use std::collections::BTreeMap;

use memsim_core::{
    afc_echo, class_clean, comb_metrics, create_afc, deduce_eta_t, echo_trace_csv, fit_exp_decay,
    fit_gaussian_decay, fit_gaussian_profile, fit_rose_decay, fit_sinusoid, focal_spot_diameter,
    gamma_inh_from_t2star, insertion_loss_db, interfere, od_from_transmission, parse_sequence,
    rose_echo, rose_efficiency, spin_polarize, spin_wave_echo, transfer_efficiency,
    two_pulse_echo, Branching, BurnSweep, CombSpec, Complex, FrequencyGrid, GroundLevel,
    LevelScheme, MemoryParams, NoiseGen, Pulse, Scheme, Sequence, SpectralState,
};

use crate::config::Config;
use crate::runner::{Outcome, ScenarioError};

pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub config_text: &'static str,
    pub run: fn(&Config) -> Result<Outcome, ScenarioError>,
}

/// All scenarios shipped with the binary, alphabetized by name.
pub fn standard_scenarios() -> Vec<Scenario> {
    let mut list = vec![
        Scenario {
            name: "afc-storage",
            description: "preparation pipeline, comb quality, two-level and spin-wave storage",
            config_text: include_str!("../assets/afc-storage.cfg"),
            run: run_afc_storage,
        },
        Scenario {
            name: "derived-constants",
            description: "closed-form constants: OD, spin linewidth, focal spot, insertion loss",
            config_text: include_str!("../assets/derived-constants.cfg"),
            run: run_derived_constants,
        },
        Scenario {
            name: "fig3-absorption",
            description: "bulk and waveguide absorption profiles with Gaussian refits",
            config_text: include_str!("../assets/fig3-absorption.cfg"),
            run: run_fig3_absorption,
        },
        Scenario {
            name: "fig4-t2",
            description: "two-pulse echo decay series refit for the optical coherence times",
            config_text: include_str!("../assets/fig4-t2.cfg"),
            run: run_fig4_t2,
        },
        Scenario {
            name: "fig5a-rose-visibility",
            description: "revived-echo interference fringe and visibility fit",
            config_text: include_str!("../assets/fig5a-rose-visibility.cfg"),
            run: run_fig5a_visibility,
        },
        Scenario {
            name: "fig5b-afc-visibility",
            description: "spin-wave echo visibility over seeded noise replicates",
            config_text: include_str!("../assets/fig5b-afc-visibility.cfg"),
            run: run_fig5b_visibility,
        },
        Scenario {
            name: "fig6a-rose-decay",
            description: "storage-efficiency decay refit for eta0 and T2eff",
            config_text: include_str!("../assets/fig6a-rose-decay.cfg"),
            run: run_fig6a_rose_decay,
        },
        Scenario {
            name: "fig6b-spinwave-decay",
            description: "spin-wave echo decay refit for T2* and the spin linewidth",
            config_text: include_str!("../assets/fig6b-spinwave-decay.cfg"),
            run: run_fig6b_spinwave_decay,
        },
        Scenario {
            name: "rose-storage",
            description: "rephasing transfer efficiency and revived-echo numbers",
            config_text: include_str!("../assets/rose-storage.cfg"),
            run: run_rose_storage,
        },
    ];
    list.sort_by_key(|s| s.name);
    list
}

fn sequence_asset(name: &str) -> Result<&'static str, ScenarioError> {
    match name {
        "rose.seq" => Ok(include_str!("../assets/rose.seq")),
        "spinwave.seq" => Ok(include_str!("../assets/spinwave.seq")),
        "prep.seq" => Ok(include_str!("../assets/prep.seq")),
        other => Err(ScenarioError::Failed(format!(
            "unknown sequence file `{other}`"
        ))),
    }
}

fn load_sequence(cfg: &Config, key: &str) -> Result<Sequence<f64>, ScenarioError> {
    let text = sequence_asset(cfg.raw(key)?)?;
    Ok(parse_sequence::<f64>(text)?.sequence)
}

fn named_pulse<'a>(seq: &'a Sequence<f64>, name: &str) -> Result<&'a Pulse<f64>, ScenarioError> {
    seq.pulse(name)
        .ok_or_else(|| ScenarioError::Failed(format!("sequence has no pulse `{name}`")))
}

fn memory_params(cfg: &Config, eta_t: f64) -> Result<MemoryParams<f64>, ScenarioError> {
    let params = MemoryParams {
        od: cfg.number("od")?,
        t2: cfg.time("t2")?,
        t2eff: cfg.time("t2eff")?,
        t2star: cfg.time("t2star")?,
        delta: cfg.frequency("delta")?,
        bandwidth: cfg.frequency("bandwidth")?,
        eta_t,
    };
    params.validate()?;
    Ok(params)
}

fn kv_report(values: &BTreeMap<String, f64>) -> String {
    let mut out = String::new();
    for (key, value) in values {
        out.push_str(&format!("{key}={value:.12e}\n"));
    }
    out
}

/// Reference amplitude ratio that yields a fringe visibility `v` for an
/// interference of two fields: V = 2r/(1+r^2), solved for the r < 1 root.
fn ratio_for_visibility(v: f64) -> f64 {
    (1.0 - (1.0 - v * v).sqrt()) / v
}

/// Intensity scan of the echo against a phase-stepped reference.
fn phase_scan(
    echo_amplitude: Complex<f64>,
    visibility_target: f64,
    points: usize,
    step_rad: f64,
) -> Result<(Vec<f64>, Vec<f64>), ScenarioError> {
    let r = ratio_for_visibility(visibility_target);
    let reference = Complex::from_polar(echo_amplitude.norm() * r, 0.0);
    let echo = memsim_core::EchoResult {
        time: 0.0,
        amplitude: echo_amplitude,
        silenced: false,
        wavevector: 1,
    };
    let mut phases = Vec::with_capacity(points);
    let mut intensities = Vec::with_capacity(points);
    for k in 0..points {
        let phi = step_rad * k as f64;
        phases.push(phi);
        intensities.push(interfere(&echo, reference, phi)?);
    }
    Ok((phases, intensities))
}

// ---------------------------------------------------------------------------

fn run_derived_constants(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let od = od_from_transmission(cfg.number("transmission_ratio")?)?;
    let gamma = gamma_inh_from_t2star(cfg.time("t2star")?);
    let focal = focal_spot_diameter(
        cfg.number("focal_length")?,
        cfg.number("wavelength")?,
        cfg.number("beam_diameter")?,
    );
    let loss = insertion_loss_db(cfg.number("coupling")?, cfg.number("other_optics")?)?;
    let eta_t_deduced = deduce_eta_t(cfg.number("eta0")?, cfg.number("od")?)?;
    let eta0_forward = rose_efficiency(cfg.number("eta_t")?, cfg.number("od")?, 0.0, 1.0);

    let mut values = BTreeMap::new();
    values.insert("od".into(), od);
    values.insert("gamma_inh_hz".into(), gamma);
    values.insert("focal_um".into(), focal * 1e6);
    values.insert("loss_db".into(), loss);
    values.insert("eta_t_deduced".into(), eta_t_deduced);
    values.insert("eta0_forward".into(), eta0_forward);

    let mut data = String::from("quantity,value\n");
    for (key, value) in &values {
        data.push_str(&format!("{key},{value:.16e}\n"));
    }
    Ok(Outcome {
        fit_report: kv_report(&values),
        data_csv: data,
        extra_files: vec![],
        values,
    })
}

fn run_fig3_absorption(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let grid = FrequencyGrid::symmetric(cfg.frequency("grid_half_span")?, cfg.frequency("grid_step")?)?;
    let bulk = memsim_core::build_gaussian_profile(
        cfg.frequency("gamma_bulk")?,
        cfg.number("peak_od_bulk")?,
        &grid,
    )?;
    let waveguide = memsim_core::build_gaussian_profile(
        cfg.frequency("gamma_waveguide")?,
        cfg.number("peak_od_waveguide")?,
        &grid,
    )?;
    let bulk_fit = fit_gaussian_profile(&bulk)?;
    let wg_fit = fit_gaussian_profile(&waveguide)?;

    let mut values = BTreeMap::new();
    values.insert("fwhm_bulk_hz".into(), bulk_fit.param("fwhm").unwrap_or(f64::NAN));
    values.insert("peak_bulk".into(), bulk_fit.param("peak_od").unwrap_or(f64::NAN));
    values.insert(
        "fwhm_waveguide_hz".into(),
        wg_fit.param("fwhm").unwrap_or(f64::NAN),
    );
    values.insert(
        "peak_waveguide".into(),
        wg_fit.param("peak_od").unwrap_or(f64::NAN),
    );

    let fit_report = format!(
        "# waveguide\n{}# bulk\n{}",
        wg_fit.to_report(),
        bulk_fit.to_report()
    );
    Ok(Outcome {
        values,
        data_csv: waveguide.to_csv(),
        fit_report,
        extra_files: vec![("bulk.csv".into(), bulk.to_csv())],
    })
}

fn run_fig4_t2(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let points = cfg.integer("points")? as usize;
    let tau_start = cfg.time("tau_start")?;
    let tau_step = cfg.time("tau_step")?;
    let taus: Vec<f64> = (0..points).map(|k| tau_start + tau_step * k as f64).collect();

    let series = |t2: f64| -> (Vec<f64>, memsim_core::FitResult<f64>) {
        let params = MemoryParams {
            od: 1.75,
            t2,
            t2eff: t2,
            t2star: 3.3e-6,
            delta: 125e3,
            bandwidth: 2e6,
            eta_t: 0.8,
        };
        let amps: Vec<f64> = taus
            .iter()
            .map(|&tau| two_pulse_echo(&params, tau).amplitude.norm())
            .collect();
        let fit = fit_exp_decay(&taus, &amps).expect("synthetic series is fittable");
        (amps, fit)
    };
    let (wg_amps, wg_fit) = series(cfg.time("t2_waveguide")?);
    let (bulk_amps, bulk_fit) = series(cfg.time("t2_bulk")?);

    let mut values = BTreeMap::new();
    values.insert(
        "t2_waveguide_us".into(),
        wg_fit.param("t2").unwrap_or(f64::NAN) * 1e6,
    );
    values.insert(
        "t2_bulk_us".into(),
        bulk_fit.param("t2").unwrap_or(f64::NAN) * 1e6,
    );

    let mut data = String::from("tau_us,amplitude_waveguide,amplitude_bulk\n");
    for (i, tau) in taus.iter().enumerate() {
        data.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            tau * 1e6,
            wg_amps[i],
            bulk_amps[i]
        ));
    }
    let fit_report = format!(
        "# waveguide\n{}# bulk\n{}",
        wg_fit.to_report(),
        bulk_fit.to_report()
    );
    Ok(Outcome {
        values,
        data_csv: data,
        fit_report,
        extra_files: vec![],
    })
}

fn run_fig5a_visibility(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let seq = load_sequence(cfg, "sequence")?;
    if seq.scheme != Scheme::Rose {
        return Err(ScenarioError::Failed("sequence is not a rose timeline".into()));
    }
    let kappa = cfg.number("kappa_f0")?;
    let r1 = named_pulse(&seq, "r1")?.with_rabi_calibration(kappa);
    let r2 = named_pulse(&seq, "r2")?.with_rabi_calibration(kappa);
    let input = named_pulse(&seq, "in")?;

    let band = cfg.frequency("bandwidth")? / 2.0;
    let eta_t = transfer_efficiency(&r1, (-band, band), cfg.integer("transfer_samples")? as usize)?
        .efficiency;
    let params = memory_params(cfg, eta_t)?;
    let tau = cfg.time("tau")?;
    let rose = rose_echo(&params, tau, (&r1, &r2), input.direction)?;

    let points = cfg.integer("phase_points")? as usize;
    let step = cfg.angle("phase_step")?;
    let target = cfg.number("visibility_target")?;
    let (phases, clean) = phase_scan(rose.secondary.amplitude, target, points, step)?;

    let mut rng = NoiseGen::new(cfg.integer("seed")?);
    let sigma = cfg.number("noise_sigma")?;
    let noisy: Vec<f64> = clean.iter().map(|i| rng.multiplicative(*i, sigma)).collect();
    let fit = fit_sinusoid(&phases, &noisy)?;

    let mut values = BTreeMap::new();
    values.insert("visibility".into(), fit.param("v").unwrap_or(f64::NAN));
    values.insert("eta_t".into(), eta_t);
    values.insert("echo_time_us".into(), rose.secondary.time * 1e6);
    values.insert("echo_efficiency".into(), rose.secondary.efficiency());

    let mut data = String::from("phase_deg,intensity\n");
    for (phi, i) in phases.iter().zip(&noisy) {
        data.push_str(&format!("{:.16e},{:.16e}\n", phi.to_degrees(), i));
    }
    Ok(Outcome {
        values,
        data_csv: data,
        fit_report: fit.to_report(),
        extra_files: vec![],
    })
}

fn run_fig5b_visibility(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let replicates = cfg.integer("replicates")? as usize;
    let points = cfg.integer("phase_points")? as usize;
    let step = cfg.angle("phase_step")?;
    let target = cfg.number("visibility_target")?;
    let sigma = cfg.number("noise_sigma")?;
    let (phases, clean) = phase_scan(Complex::new(1.0, 0.0), target, points, step)?;

    let mut rng = NoiseGen::new(cfg.integer("seed")?);
    let mut fitted = Vec::with_capacity(replicates);
    let mut first_scan: Option<Vec<f64>> = None;
    let mut last_fit = None;
    for _ in 0..replicates {
        let noisy: Vec<f64> = clean.iter().map(|i| rng.multiplicative(*i, sigma)).collect();
        let fit = fit_sinusoid(&phases, &noisy)?;
        fitted.push(fit.param("v").unwrap_or(f64::NAN));
        if first_scan.is_none() {
            first_scan = Some(noisy);
        }
        last_fit = Some(fit);
    }
    let n = fitted.len() as f64;
    let mean = fitted.iter().sum::<f64>() / n;
    let var = fitted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let spread = var.sqrt();

    let mut values = BTreeMap::new();
    values.insert("v_mean".into(), mean);
    values.insert("v_spread".into(), spread);

    let mut data = String::from("replicate,visibility\n");
    for (i, v) in fitted.iter().enumerate() {
        data.push_str(&format!("{i},{v:.16e}\n"));
    }
    let mut scan0 = String::from("phase_deg,intensity\n");
    for (phi, i) in phases.iter().zip(first_scan.as_deref().unwrap_or(&[])) {
        scan0.push_str(&format!("{:.16e},{:.16e}\n", phi.to_degrees(), i));
    }
    Ok(Outcome {
        values,
        data_csv: data,
        fit_report: last_fit.map(|f| f.to_report()).unwrap_or_default(),
        extra_files: vec![("scan0.csv".into(), scan0)],
    })
}

fn run_fig6a_rose_decay(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let seq = load_sequence(cfg, "sequence")?;
    let r1 = named_pulse(&seq, "r1")?;
    let r2 = named_pulse(&seq, "r2")?;
    let input = named_pulse(&seq, "in")?;
    let params = memory_params(cfg, cfg.number("eta_t")?)?;

    let points = cfg.integer("points")? as usize;
    let tau_start = cfg.time("tau_start")?;
    let tau_step = cfg.time("tau_step")?;
    let mut taus = Vec::with_capacity(points);
    let mut effs = Vec::with_capacity(points);
    for k in 0..points {
        let tau = tau_start + tau_step * k as f64;
        let rose = rose_echo(&params, tau, (r1, r2), input.direction)?;
        taus.push(tau);
        effs.push(rose.secondary.efficiency());
    }
    let fit = fit_rose_decay(&taus, &effs)?;

    let mut values = BTreeMap::new();
    values.insert("eta0".into(), fit.param("eta0").unwrap_or(f64::NAN));
    values.insert(
        "t2eff_us".into(),
        fit.param("t2eff").unwrap_or(f64::NAN) * 1e6,
    );

    let mut data = String::from("tau_us,efficiency\n");
    for (tau, eff) in taus.iter().zip(&effs) {
        data.push_str(&format!("{:.16e},{:.16e}\n", tau * 1e6, eff));
    }
    Ok(Outcome {
        values,
        data_csv: data,
        fit_report: fit.to_report(),
        extra_files: vec![],
    })
}

fn run_fig6b_spinwave_decay(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let points = cfg.integer("points")? as usize;
    let start = cfg.time("tau_s_start")?;
    let step = cfg.time("tau_s_step")?;
    let a0 = cfg.number("a0")?;
    let t2star = cfg.time("t2star")?;
    let taus: Vec<f64> = (0..points).map(|k| start + step * k as f64).collect();
    let intensities: Vec<f64> = taus
        .iter()
        .map(|t| a0 * (-(t / t2star).powi(2)).exp())
        .collect();
    let fit = fit_gaussian_decay(&taus, &intensities)?;
    let fitted_t2star = fit.param("t2star").unwrap_or(f64::NAN);

    let mut values = BTreeMap::new();
    values.insert("t2star_us".into(), fitted_t2star * 1e6);
    values.insert("gamma_inh_hz".into(), gamma_inh_from_t2star(fitted_t2star));

    let mut data = String::from("tau_s_us,intensity\n");
    for (tau, i) in taus.iter().zip(&intensities) {
        data.push_str(&format!("{:.16e},{:.16e}\n", tau * 1e6, i));
    }
    Ok(Outcome {
        values,
        data_csv: data,
        fit_report: fit.to_report(),
        extra_files: vec![],
    })
}

fn run_afc_storage(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let scheme = LevelScheme::<f64>::default();
    let grid = FrequencyGrid::symmetric(cfg.frequency("grid_half_span")?, cfg.frequency("grid_step")?)?;
    let state = SpectralState::uniform(grid, cfg.number("od_scale")?, cfg.number("background")?)?;

    // Preparation recipe: sweep parameters come from the sequence file,
    // repetitions and pump strength from this configuration.
    let prep = load_sequence(cfg, "prep_sequence")?;
    let reps = cfg.integer("prep_repetitions")? as u32;
    let strength = cfg.number("pump_strength")?;
    let sweep = |name: &str| -> Result<BurnSweep<f64>, ScenarioError> {
        let p = named_pulse(&prep, name)?;
        BurnSweep::new(
            p.freq.resolve(&scheme),
            p.chirp_bandwidth,
            p.width,
            reps,
            strength,
        )
        .map_err(Into::into)
    };
    let branching = Branching::uniform();
    let cleaned = class_clean(
        &state,
        &scheme,
        &[sweep("cc0")?, sweep("ccp")?, sweep("ccm")?],
        &branching,
    )?;
    let polarized = spin_polarize(&cleaned, &scheme, &[sweep("sp1")?, sweep("sp2")?], &branching)?;

    let comb_spec = CombSpec::new(
        cfg.frequency("delta")?,
        cfg.frequency("bandwidth")?,
        cfg.number("finesse")?,
        cfg.integer("comb_cycles")? as u32,
    )?;
    let comb_state = create_afc(&polarized, &comb_spec, &scheme)?;
    let profile = comb_state.absorption_profile(GroundLevel::G1);

    let half_band = comb_spec.bandwidth / 2.0;
    let metrics = comb_metrics(&profile, (-half_band, half_band))?;

    let storage = load_sequence(cfg, "sequence")?;
    let input = named_pulse(&storage, "in")?;
    let kappa_plus = cfg.number("kappa_plus")?;
    let c1 = named_pulse(&storage, "c1")?.with_rabi_calibration(kappa_plus);
    let c2 = named_pulse(&storage, "c2")?.with_rabi_calibration(kappa_plus);

    let params = memory_params(cfg, 0.80)?;
    let afc = afc_echo(&profile, &params, input)?;
    let tau_s = cfg.time("tau_s")?;
    let spin_wave = spin_wave_echo(&profile, &params, (&c1, &c2), tau_s)?;

    let mut values = BTreeMap::new();
    values.insert("comb_delta_hz".into(), metrics.delta);
    values.insert("comb_finesse".into(), metrics.finesse);
    values.insert("comb_background_od".into(), metrics.background_od);
    values.insert("comb_peak_od".into(), metrics.peak_od);
    values.insert("afc_time_us".into(), afc.time * 1e6);
    values.insert("afc_efficiency".into(), afc.efficiency());
    values.insert("spinwave_time_us".into(), spin_wave.echo.time * 1e6);
    values.insert("spinwave_efficiency".into(), spin_wave.echo.efficiency());
    values.insert(
        "ratio".into(),
        spin_wave.echo.efficiency() / afc.efficiency(),
    );
    values.insert("control_transfer".into(), spin_wave.control_transfer[0]);

    Ok(Outcome {
        fit_report: kv_report(&values),
        data_csv: profile.to_csv(),
        extra_files: vec![],
        values,
    })
}

fn run_rose_storage(cfg: &Config) -> Result<Outcome, ScenarioError> {
    let seq = load_sequence(cfg, "sequence")?;
    let kappa = cfg.number("kappa_f0")?;
    let input = named_pulse(&seq, "in")?;
    let r1 = named_pulse(&seq, "r1")?.with_rabi_calibration(kappa);
    let r2 = named_pulse(&seq, "r2")?.with_rabi_calibration(kappa);

    let half_band = cfg.frequency("bandwidth")? / 2.0;
    let samples = cfg.integer("transfer_samples")? as usize;
    let eta_t = transfer_efficiency(&r1, (-half_band, half_band), samples)?.efficiency;

    let tau = cfg.time("tau")?;
    let pipeline_params = memory_params(cfg, eta_t)?;
    let pipeline = rose_echo(&pipeline_params, tau, (&r1, &r2), input.direction)?;
    let nominal = rose_efficiency(0.80, pipeline_params.od, tau, pipeline_params.t2eff);

    let mut values = BTreeMap::new();
    values.insert("eta_t".into(), eta_t);
    values.insert("secondary_time_us".into(), pipeline.secondary.time * 1e6);
    values.insert("secondary_k".into(), pipeline.secondary.wavevector as f64);
    values.insert("primary_k".into(), pipeline.primary.wavevector as f64);
    values.insert(
        "primary_silenced".into(),
        if pipeline.primary.silenced { 1.0 } else { 0.0 },
    );
    values.insert(
        "primary_emitted_intensity".into(),
        pipeline.primary.emitted_intensity(),
    );
    values.insert("efficiency_pipeline".into(), pipeline.secondary.efficiency());
    values.insert("efficiency_nominal".into(), nominal);

    // Time-resolved trace of the revived echo over the readout window.
    let window = seq
        .windows
        .first()
        .ok_or_else(|| ScenarioError::Failed("sequence has no readout window".into()))?;
    let dt = cfg.time("trace_step")?;
    let envelope_fwhm = input.width;
    let mut times = Vec::new();
    let mut amps = Vec::new();
    let mut t = window.start;
    while t <= window.end {
        let x = (t - pipeline.secondary.time) / envelope_fwhm;
        let envelope = (-4.0 * 2f64.ln() * x * x).exp();
        times.push(t);
        amps.push(pipeline.secondary.amplitude * envelope);
        t += dt;
    }

    Ok(Outcome {
        fit_report: kv_report(&values),
        data_csv: echo_trace_csv(&times, &amps),
        extra_files: vec![],
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_for_visibility_inverts_the_fringe_formula() {
        for v in [0.5, 0.9, 0.97, 0.99] {
            let r = ratio_for_visibility(v);
            assert!((2.0 * r / (1.0 + r * r) - v).abs() < 1e-12);
            assert!(r < 1.0);
        }
    }

    #[test]
    fn all_scenario_configs_parse() {
        for scenario in standard_scenarios() {
            let cfg = Config::parse(scenario.config_text);
            assert!(cfg.is_ok(), "{}: {:?}", scenario.name, cfg.err());
        }
    }

    #[test]
    fn all_sequence_assets_parse() {
        for asset in ["rose.seq", "spinwave.seq", "prep.seq"] {
            let text = sequence_asset(asset).unwrap();
            let parsed = parse_sequence::<f64>(text);
            assert!(parsed.is_ok(), "{asset}: {:?}", parsed.err());
        }
    }
}

//! Echo emission for the four storage schemes.
//!
//! Emission times follow the exact scheme laws (two-pulse at 2*tau1, AFC
//! at 1/delta, spin-wave AFC at tau_s + 1/delta, ROSE at 2*tau).
//! Efficiencies combine the collective dephasing factor evaluated on the
//! actual absorption profile, an absorption/re-emission factor computed
//! from the mean optical depth, the coherence decays, and — for the
//! rephasing schemes — the measured transfer efficiency of the control
//! pulses. Wavevector bookkeeping decides whether an echo is silenced by
//! phase mismatch.

use num_complex::Complex;
use thiserror::Error;

use crate::bloch::{transfer_efficiency, BlochError, DEFAULT_TRANSFER_SAMPLES};
use crate::prepare::{comb_metrics, PrepareError};
use crate::pulse::{FreqRef, Pulse, PulseError};
use crate::real::{as_f64, rf, Real};
use crate::spectral::{AbsorptionProfile, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EchoError {
    #[error("invalid memory parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate profile: no absorption in the requested band")]
    DegenerateProfile,
    #[error("no comb of period {expected_hz} Hz found in the profile: {reason}")]
    CombAbsent { expected_hz: f64, reason: String },
    #[error("control pulses must sit on the f+ transition")]
    ControlFrequency,
    #[error("spin storage time {tau_s_s} s is shorter than the control duration {duration_s} s")]
    SpinStorageTooShort { tau_s_s: f64, duration_s: f64 },
    #[error("rephasing spacing must exceed the rephasing pulse duration")]
    RephasingTooClose,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot interfere with a silenced echo")]
    SilencedEcho,
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Phenomenological memory constants.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryParams<T> {
    /// Optical depth of the storage transition.
    pub od: T,
    /// Optical coherence time, s.
    pub t2: T,
    /// Effective coherence time under rephasing pulses, s.
    pub t2eff: T,
    /// Inhomogeneous spin dephasing time, s.
    pub t2star: T,
    /// Comb tooth period, Hz.
    pub delta: T,
    /// Storage bandwidth, Hz.
    pub bandwidth: T,
    /// Transfer efficiency of a single rephasing pulse.
    pub eta_t: T,
}

impl<T: Real> MemoryParams<T> {
    pub fn validate(&self) -> Result<(), EchoError> {
        let pos = [
            (self.od, "od"),
            (self.t2, "t2"),
            (self.t2eff, "t2eff"),
            (self.t2star, "t2star"),
            (self.delta, "delta"),
            (self.bandwidth, "bandwidth"),
            (self.eta_t, "eta_t"),
        ];
        for (value, name) in pos {
            if !(value > T::zero()) {
                return Err(EchoError::InvalidParams(format!(
                    "{name} must be strictly positive"
                )));
            }
        }
        if self.t2eff > self.t2 {
            return Err(EchoError::InvalidParams(
                "t2eff cannot exceed t2 (spectral diffusion only shortens coherence)".into(),
            ));
        }
        if self.eta_t > T::one() {
            return Err(EchoError::InvalidParams("eta_t cannot exceed 1".into()));
        }
        Ok(())
    }
}

/// A single computed echo. `efficiency()` is the would-be retrieval
/// efficiency |amplitude|^2; a silenced echo reports it but emits nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult<T> {
    /// Emission time, s (input pulse at t = 0).
    pub time: T,
    /// Complex field amplitude, input normalized to 1.
    pub amplitude: Complex<T>,
    /// True when phase mismatch suppresses the emission.
    pub silenced: bool,
    /// Echo wavevector in units of |k_in|, signed.
    pub wavevector: i32,
}

impl<T: Real> EchoResult<T> {
    pub fn efficiency(&self) -> T {
        self.amplitude.norm_sqr()
    }

    /// Intensity actually leaving the sample: zero when silenced.
    pub fn emitted_intensity(&self) -> T {
        if self.silenced {
            T::zero()
        } else {
            self.efficiency()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoWarning {
    /// Control chirp narrower than the storage bandwidth; transfer is
    /// partial.
    PartialTransfer,
    /// The primary echo is emitted into an inverted medium
    /// (co-propagating rephasing): amplified spontaneous noise expected.
    PopulationInversionNoise,
}

/// Spin-wave AFC outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinWaveEcho<T> {
    pub echo: EchoResult<T>,
    /// Measured transfer efficiency of each control pulse.
    pub control_transfer: [T; 2],
    pub warning: Option<EchoWarning>,
}

/// ROSE outcome: the silenced primary echo and the revived secondary.
#[derive(Debug, Clone, PartialEq)]
pub struct RoseEcho<T> {
    pub primary: EchoResult<T>,
    pub secondary: EchoResult<T>,
    pub warning: Option<EchoWarning>,
}

/// Collective dephasing factor of the ensemble restricted to `band`:
/// sum of od-weighted phasors exp(-i 2 pi delta t), unit-normalized.
pub fn dephasing_factor<T: Real>(
    profile: &AbsorptionProfile<T>,
    band: (T, T),
    t: T,
) -> Result<Complex<T>, EchoError> {
    let (lo, hi) = profile.grid().band_indices(band.0, band.1)?;
    let two_pi = T::PI() + T::PI();
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut total = T::zero();
    for i in lo..=hi {
        let weight = profile.od_at(i);
        let delta = profile.grid().value(i);
        sum += Complex::from_polar(weight, -two_pi * delta * t);
        total += weight;
    }
    if !(total > T::zero()) {
        return Err(EchoError::DegenerateProfile);
    }
    Ok(sum / total)
}

/// Eq.-style ROSE efficiency kernel:
/// eta = eta_t^2 * OD^2 * exp(-OD) * exp(-4 tau / T2eff).
pub fn rose_efficiency<T: Real>(eta_t: T, od: T, tau: T, t2eff: T) -> T {
    eta_t * eta_t * od * od * (-od).exp() * (-rf::<T>(4.0) * tau / t2eff).exp()
}

/// AFC efficiency pieces shared by the two-level and spin-wave schemes:
/// (intensity efficiency at the rephasing time, emission phase).
fn afc_efficiency_parts<T: Real>(
    profile: &AbsorptionProfile<T>,
    params: &MemoryParams<T>,
) -> Result<(T, T), EchoError> {
    params.validate()?;
    let half_band = params.bandwidth / rf(2.0);
    let band = (-half_band, half_band);

    // The profile must actually contain a comb at the expected period.
    let metrics = comb_metrics(profile, band).map_err(|e| match e {
        PrepareError::InsufficientStructure => EchoError::CombAbsent {
            expected_hz: as_f64(params.delta),
            reason: "fewer than 3 teeth detected".into(),
        },
        other => EchoError::CombAbsent {
            expected_hz: as_f64(params.delta),
            reason: other.to_string(),
        },
    })?;
    let step = profile.grid().step();
    let tol = (step + step).max(params.delta * rf(0.02));
    if (metrics.delta - params.delta).abs() > tol {
        return Err(EchoError::CombAbsent {
            expected_hz: as_f64(params.delta),
            reason: format!("detected period {} Hz", as_f64(metrics.delta)),
        });
    }

    let storage_time = T::one() / params.delta;
    let rephasing = dephasing_factor(profile, band, storage_time)?;

    // Mean optical depth over the band drives absorption and re-emission.
    let (lo, hi) = profile.grid().band_indices(band.0, band.1)?;
    let mut mean_od = T::zero();
    for i in lo..=hi {
        mean_od += profile.od_at(i);
    }
    mean_od /= rf((hi - lo + 1) as f64);

    let two = rf::<T>(2.0);
    let decay = (-two * storage_time / params.t2).exp();
    let efficiency = rephasing.norm_sqr() * mean_od * mean_od * (-mean_od).exp() * decay;
    Ok((efficiency, rephasing.arg()))
}

/// Two-level AFC echo of `input` stored in the comb described by
/// `profile`: emitted at 1/delta.
pub fn afc_echo<T: Real>(
    profile: &AbsorptionProfile<T>,
    params: &MemoryParams<T>,
    input: &Pulse<T>,
) -> Result<EchoResult<T>, EchoError> {
    input.validate()?;
    let (efficiency, comb_phase) = afc_efficiency_parts(profile, params)?;
    let time = T::one() / params.delta;
    Ok(EchoResult {
        time,
        amplitude: Complex::from_polar(efficiency.sqrt(), input.phase + comb_phase),
        silenced: false,
        wavevector: input.direction as i32,
    })
}

/// Spin-wave AFC echo: the optical excitation is parked in the spin state
/// by the first control pulse for `tau_s` and retrieved by the second,
/// re-emitting at tau_s + 1/delta.
pub fn spin_wave_echo<T: Real>(
    profile: &AbsorptionProfile<T>,
    params: &MemoryParams<T>,
    controls: (&Pulse<T>, &Pulse<T>),
    tau_s: T,
) -> Result<SpinWaveEcho<T>, EchoError> {
    let (c1, c2) = controls;
    c1.validate()?;
    c2.validate()?;
    for c in [c1, c2] {
        if c.freq != FreqRef::FPlus {
            return Err(EchoError::ControlFrequency);
        }
    }
    let max_width = c1.width.max(c2.width);
    // tau_s equal to the control duration is the experimentally pinned
    // edge case; only strictly shorter spacings are rejected.
    if tau_s < max_width * (T::one() - rf(1e-9)) {
        return Err(EchoError::SpinStorageTooShort {
            tau_s_s: as_f64(tau_s),
            duration_s: as_f64(max_width),
        });
    }

    let (afc_eff, comb_phase) = afc_efficiency_parts(profile, params)?;

    let warning = if c1.chirp_bandwidth < params.bandwidth || c2.chirp_bandwidth < params.bandwidth
    {
        Some(EchoWarning::PartialTransfer)
    } else {
        None
    };

    let half_band = params.bandwidth / rf(2.0);
    let band = (-half_band, half_band);
    let eta1 = transfer_efficiency(c1, band, DEFAULT_TRANSFER_SAMPLES)?.efficiency;
    let eta2 = transfer_efficiency(c2, band, DEFAULT_TRANSFER_SAMPLES)?.efficiency;

    let spin_ratio = tau_s / params.t2star;
    let spin_factor = (-spin_ratio * spin_ratio).exp();

    let efficiency = afc_eff * eta1 * eta2 * spin_factor;
    let time = tau_s + T::one() / params.delta;
    let phase = comb_phase + c2.phase - c1.phase;
    Ok(SpinWaveEcho {
        echo: EchoResult {
            time,
            amplitude: Complex::from_polar(efficiency.sqrt(), phase),
            silenced: false,
            wavevector: 1,
        },
        control_transfer: [eta1, eta2],
        warning,
    })
}

/// ROSE: two rephasing pulses separated by `tau` revive the echo at
/// 2*tau; the primary echo at twice the first rephasing time is silenced
/// when the rephasing beams counter-propagate.
pub fn rose_echo<T: Real>(
    params: &MemoryParams<T>,
    tau: T,
    rephasing: (&Pulse<T>, &Pulse<T>),
    input_direction: i8,
) -> Result<RoseEcho<T>, EchoError> {
    params.validate()?;
    let (r1, r2) = rephasing;
    r1.validate()?;
    r2.validate()?;
    if input_direction != 1 && input_direction != -1 {
        return Err(EchoError::Domain("input direction must be +1 or -1".into()));
    }
    if !(tau > r1.width.max(r2.width)) {
        return Err(EchoError::RephasingTooClose);
    }

    let two = rf::<T>(2.0);
    let four = rf::<T>(4.0);

    // Primary echo: one rephasing pass, emitted at twice the first
    // rephasing time, suppressed unless phase matched.
    let (k_primary, primary_emitted) = phase_matching(input_direction, &[r1.direction]);
    let t1 = r1.t0;
    let primary_eff = params.eta_t
        * params.od
        * params.od
        * (-params.od).exp()
        * (-four * t1 / params.t2eff).exp();
    let primary = EchoResult {
        time: two * t1,
        amplitude: Complex::from_polar(primary_eff.sqrt(), two * r1.phase),
        silenced: !primary_emitted,
        wavevector: k_primary,
    };

    let (k_secondary, secondary_emitted) =
        phase_matching(input_direction, &[r1.direction, r2.direction]);
    let efficiency = rose_efficiency(params.eta_t, params.od, tau, params.t2eff);
    let secondary = EchoResult {
        time: two * tau,
        amplitude: Complex::from_polar(efficiency.sqrt(), two * (r2.phase - r1.phase)),
        silenced: !secondary_emitted,
        wavevector: k_secondary,
    };

    let warning = if primary_emitted {
        Some(EchoWarning::PopulationInversionNoise)
    } else {
        None
    };
    Ok(RoseEcho {
        primary,
        secondary,
        warning,
    })
}

/// Conventional two-pulse echo: rephased at 2*tau1 with field amplitude
/// exp(-2 tau1 / T2) (amplitude normalized to 1 at tau1 = 0).
pub fn two_pulse_echo<T: Real>(params: &MemoryParams<T>, tau1: T) -> EchoResult<T> {
    let two = rf::<T>(2.0);
    let amplitude = (-two * tau1 / params.t2).exp();
    EchoResult {
        time: two * tau1,
        amplitude: Complex::new(amplitude, T::zero()),
        silenced: false,
        wavevector: 1,
    }
}

/// Wavevector bookkeeping: each rephasing pulse maps the stored coherence
/// k to 2*k_pulse - k. The echo is emitted when it ends phase matched to
/// a propagating mode, |k| = 1.
pub fn phase_matching(input_direction: i8, pulse_directions: &[i8]) -> (i32, bool) {
    let mut k = input_direction as i32;
    for &p in pulse_directions {
        k = 2 * (p as i32) - k;
    }
    (k, k.abs() == 1)
}

/// Intensity of the interference between an echo and a reference pulse
/// injected with relative phase `delta_phi`.
pub fn interfere<T: Real>(
    echo: &EchoResult<T>,
    reference_amplitude: Complex<T>,
    delta_phi: T,
) -> Result<T, EchoError> {
    if echo.silenced {
        return Err(EchoError::SilencedEcho);
    }
    let rotated = reference_amplitude * Complex::from_polar(T::one(), delta_phi);
    Ok((echo.amplitude + rotated).norm_sqr())
}

/// Time-resolved echo trace as CSV `t_us,re_amplitude,im_amplitude,intensity`.
pub fn echo_trace_csv<T: Real>(times: &[T], amplitudes: &[Complex<T>]) -> String {
    let mut out = String::with_capacity(times.len() * 64 + 40);
    out.push_str("t_us,re_amplitude,im_amplitude,intensity\n");
    let million = rf::<T>(1e6);
    for (t, a) in times.iter().zip(amplitudes) {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            *t * million,
            a.re,
            a.im,
            a.norm_sqr()
        ));
    }
    out
}

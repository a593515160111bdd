//! Single-ion optical-Bloch dynamics.
//!
//! The Bloch vector (u, v, w) of an ion detuned by `delta` (rad/s) from
//! the instantaneous pulse carrier, driven at Rabi rate `omega(t)`
//! (rad/s) with static carrier phase `phi`, obeys
//!
//! ```text
//! du/dt = -delta(t) v + omega sin(phi) w
//! dv/dt =  delta(t) u + omega cos(phi) w
//! dw/dt = -omega cos(phi) v - omega sin(phi) u
//! ```
//!
//! which is the usual (-Δv, Δu + Ωw, -Ωv) at phi = 0. A chirp enters as
//! a time-dependent part of `delta(t)`; no decay terms are included at
//! these pulse timescales.
//!
//! Integration is fixed-step RK4 over the pulse support with a step of
//! `width / 4096`, repeated at half the step as a Richardson consistency
//! check: if the two results disagree by more than 1e-6 the integration
//! is rejected. This keeps results deterministic and bit-stable across
//! platforms for a given scalar type.

use thiserror::Error;

use crate::pulse::{BlochVector, Pulse, PulseError, PulseShape};
use crate::real::{as_f64, rf, Real};

/// Steps per pulse width; the support is a small multiple of the width.
const STEPS_PER_WIDTH: usize = 4096;

/// Maximum allowed disagreement between the full-step and half-step runs.
const RICHARDSON_TOL: f64 = 1e-6;

/// Detuning samples used when a caller does not choose a count.
pub const DEFAULT_TRANSFER_SAMPLES: usize = 33;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlochError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration step underflowed to zero")]
    StepUnderflow,
    #[error("step-halving check failed: results differ by {disagreement:e}")]
    RichardsonMismatch { disagreement: f64 },
    #[error(transparent)]
    Pulse(#[from] PulseError),
}

/// Transfer efficiency averaged over a detuning band, with an annotation
/// when the requested band is wider than the pulse's spectral coverage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferReport<T> {
    pub efficiency: T,
    pub band_exceeds_coverage: bool,
}

fn steps_for(shape: PulseShape) -> usize {
    // support / width: gaussian 6, chs 2, square 1
    match shape {
        PulseShape::Gaussian => 6 * STEPS_PER_WIDTH,
        PulseShape::Chs => 2 * STEPS_PER_WIDTH,
        PulseShape::Square => STEPS_PER_WIDTH,
    }
}

struct Drive<'a, T> {
    pulse: &'a Pulse<T>,
    omega_peak: T,
    delta_atom_rad: T,
    cos_phi: T,
    sin_phi: T,
}

impl<T: Real> Drive<'_, T> {
    #[inline]
    fn rhs(&self, t: T, b: BlochVector<T>) -> BlochVector<T> {
        let omega = self.omega_peak * self.pulse.amplitude_at(t);
        let delta = self.delta_atom_rad - self.pulse.chirp_rate_rad(t);
        let oc = omega * self.cos_phi;
        let os = omega * self.sin_phi;
        BlochVector {
            u: -delta * b.v + os * b.w,
            v: delta * b.u + oc * b.w,
            w: -oc * b.v - os * b.u,
        }
    }

    fn rk4(&self, start: T, dt: T, steps: usize, mut b: BlochVector<T>) -> BlochVector<T> {
        let half = dt / rf(2.0);
        let sixth = dt / rf(6.0);
        let two = rf::<T>(2.0);
        for i in 0..steps {
            let t = start + dt * rf(i as f64);
            let k1 = self.rhs(t, b);
            let k2 = self.rhs(
                t + half,
                BlochVector {
                    u: b.u + half * k1.u,
                    v: b.v + half * k1.v,
                    w: b.w + half * k1.w,
                },
            );
            let k3 = self.rhs(
                t + half,
                BlochVector {
                    u: b.u + half * k2.u,
                    v: b.v + half * k2.v,
                    w: b.w + half * k2.w,
                },
            );
            let k4 = self.rhs(
                t + dt,
                BlochVector {
                    u: b.u + dt * k3.u,
                    v: b.v + dt * k3.v,
                    w: b.w + dt * k3.w,
                },
            );
            b = BlochVector {
                u: b.u + sixth * (k1.u + two * k2.u + two * k3.u + k4.u),
                v: b.v + sixth * (k1.v + two * k2.v + two * k3.v + k4.v),
                w: b.w + sixth * (k1.w + two * k2.w + two * k3.w + k4.w),
            };
        }
        b
    }
}

/// Integrates the Bloch equations across the pulse support for an ion at
/// `detuning_hz` relative to the pulse carrier.
pub fn bloch_integrate<T: Real>(
    pulse: &Pulse<T>,
    detuning_hz: T,
    initial: BlochVector<T>,
) -> Result<BlochVector<T>, BlochError> {
    pulse.validate()?;
    if initial.norm() > T::one() + rf(1e-9) {
        return Err(BlochError::Domain(
            "initial Bloch vector must have norm at most 1".into(),
        ));
    }
    if !detuning_hz.is_finite() {
        return Err(BlochError::Domain("detuning must be finite".into()));
    }
    let omega_peak = pulse.peak_rabi_rad()?;
    let (lo, hi) = pulse.support();
    let steps = steps_for(pulse.shape);
    let dt = (hi - lo) / rf(steps as f64);
    if !(dt > T::zero()) || lo + dt == lo {
        return Err(BlochError::StepUnderflow);
    }

    let two_pi = T::PI() + T::PI();
    let drive = Drive {
        pulse,
        omega_peak,
        delta_atom_rad: two_pi * detuning_hz,
        cos_phi: pulse.phase.cos(),
        sin_phi: pulse.phase.sin(),
    };

    let coarse = drive.rk4(lo, dt, steps, initial);
    let half_dt = dt / rf(2.0);
    if lo + half_dt == lo {
        return Err(BlochError::StepUnderflow);
    }
    let fine = drive.rk4(lo, half_dt, 2 * steps, initial);

    let disagreement = (coarse.u - fine.u)
        .abs()
        .max((coarse.v - fine.v).abs())
        .max((coarse.w - fine.w).abs());
    if disagreement > rf(RICHARDSON_TOL) {
        return Err(BlochError::RichardsonMismatch {
            disagreement: as_f64(disagreement),
        });
    }
    Ok(fine)
}

/// Population transfer efficiency of a pulse over a detuning band:
/// the mean of (1 + w_final)/2 over `samples` uniformly spaced detunings,
/// starting from the ground state.
pub fn transfer_efficiency<T: Real>(
    pulse: &Pulse<T>,
    band: (T, T),
    samples: usize,
) -> Result<TransferReport<T>, BlochError> {
    if samples < 3 {
        return Err(BlochError::Domain("need at least 3 detuning samples".into()));
    }
    let (lo, hi) = band;
    if !(lo < hi) {
        return Err(BlochError::Domain("band must satisfy lo < hi".into()));
    }
    let coverage = if pulse.chirp_bandwidth > T::zero() {
        pulse.chirp_bandwidth
    } else {
        // Fourier-limited coverage estimate for unchirped pulses.
        rf::<T>(2.0) / pulse.width
    };
    let band_exceeds_coverage = (hi - lo) > coverage * (T::one() + rf(1e-9));

    let span = hi - lo;
    let n1 = rf::<T>((samples - 1) as f64);
    let half = rf::<T>(0.5);
    let mut acc = T::zero();
    for i in 0..samples {
        let delta = lo + span * rf(i as f64) / n1;
        let final_state = bloch_integrate(pulse, delta, BlochVector::ground())?;
        acc += half * (T::one() + final_state.w);
    }
    Ok(TransferReport {
        efficiency: acc / rf(samples as f64),
        band_exceeds_coverage,
    })
}

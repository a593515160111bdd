//! Parameterised optical pulses.
//!
//! A pulse carries shape, timing, carrier offset, chirp, static phase,
//! drive amplitude and a propagation direction tag. Complex hyperbolic
//! secant (CHS) pulses use the parameterization
//! `beta = 10.6 / duration`, `mu = pi * chirp_bandwidth / beta`, so that
//! the amplitude at the nominal duration edges (t0 ± duration/2) is about
//! 1e-2 of the peak and the instantaneous frequency sweeps from
//! `-chirp_bandwidth/2` to `+chirp_bandwidth/2`.

use num_complex::Complex;
use thiserror::Error;

use crate::real::{rf, Real};
use crate::spectral::LevelScheme;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PulseError {
    #[error("invalid pulse `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("pulse `{0}` has a peak power but no Rabi calibration was applied")]
    NeedsRabiCalibration(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Gaussian,
    Chs,
    Square,
}

impl PulseShape {
    pub fn as_str(self) -> &'static str {
        match self {
            PulseShape::Gaussian => "gaussian",
            PulseShape::Chs => "chs",
            PulseShape::Square => "square",
        }
    }
}

/// Carrier frequency relative to the reference transition: symbolic f0,
/// f+, f-, or an explicit offset in Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreqRef<T> {
    F0,
    FPlus,
    FMinus,
    Offset(T),
}

impl<T: Real> FreqRef<T> {
    pub fn resolve(&self, scheme: &LevelScheme<T>) -> T {
        match self {
            FreqRef::F0 => T::zero(),
            FreqRef::FPlus => scheme.f_plus(),
            FreqRef::FMinus => scheme.f_minus(),
            FreqRef::Offset(x) => *x,
        }
    }
}

/// Drive amplitude: either a peak Rabi rate (stored in cycles/s as
/// parsed; see [`Pulse::peak_rabi_rad`]) or a peak power awaiting a
/// power-to-Rabi calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Amplitude<T> {
    RabiHz(T),
    PowerW(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pulse<T> {
    pub name: String,
    pub shape: PulseShape,
    /// Envelope centre (gaussian) or midpoint (chs, square), seconds.
    pub t0: T,
    /// FWHM for gaussian, duration for chs/square, seconds.
    pub width: T,
    pub freq: FreqRef<T>,
    /// Full chirp span in Hz; 0 for unchirped pulses.
    pub chirp_bandwidth: T,
    /// Static carrier phase, radians.
    pub phase: T,
    pub amplitude: Amplitude<T>,
    /// Propagation direction along the memory axis, +1 or -1.
    pub direction: i8,
}

impl<T: Real> Pulse<T> {
    pub fn validate(&self) -> Result<(), PulseError> {
        let fail = |reason: &str| {
            Err(PulseError::Invalid {
                name: self.name.clone(),
                reason: reason.into(),
            })
        };
        if !(self.width > T::zero()) || !self.width.is_finite() {
            return fail("width must be positive");
        }
        if !(self.chirp_bandwidth >= T::zero()) {
            return fail("chirp bandwidth must be non-negative");
        }
        if self.direction != 1 && self.direction != -1 {
            return fail("direction must be +1 or -1");
        }
        if !self.t0.is_finite() || !self.phase.is_finite() {
            return fail("t0 and phase must be finite");
        }
        match self.amplitude {
            Amplitude::RabiHz(x) if !(x >= T::zero()) => fail("Rabi rate must be non-negative"),
            Amplitude::PowerW(x) if !(x >= T::zero()) => fail("power must be non-negative"),
            _ => Ok(()),
        }
    }

    /// Truncation window used for integration and overlap checks:
    /// ±3 FWHM for gaussian, ±duration for chs, ±duration/2 for square.
    pub fn support(&self) -> (T, T) {
        let half = match self.shape {
            PulseShape::Gaussian => self.width * rf(3.0),
            PulseShape::Chs => self.width,
            PulseShape::Square => self.width / rf(2.0),
        };
        (self.t0 - half, self.t0 + half)
    }

    fn beta(&self) -> T {
        rf::<T>(10.6) / self.width
    }

    fn mu(&self) -> T {
        T::PI() * self.chirp_bandwidth / self.beta()
    }

    /// Dimensionless envelope magnitude, peak 1 at the pulse centre.
    pub fn amplitude_at(&self, t: T) -> T {
        let tau = t - self.t0;
        match self.shape {
            PulseShape::Gaussian => {
                let four_ln2 = rf::<T>(4.0) * T::LN_2();
                (-four_ln2 * tau * tau / (self.width * self.width)).exp()
            }
            PulseShape::Chs => {
                let x = self.beta() * tau;
                T::one() / x.cosh()
            }
            PulseShape::Square => {
                // Slack of one part in 1e9 keeps the edge samples of the
                // integrator consistent across step sizes.
                if tau.abs() <= self.width * (rf::<T>(0.5) + rf(1e-9)) {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Instantaneous carrier frequency offset in Hz relative to the
    /// pulse's own carrier. CHS pulses sweep mu*beta*tanh(beta*tau)
    /// (angular); chirped gaussian/square pulses ramp linearly across
    /// their width.
    pub fn instantaneous_freq_offset(&self, t: T) -> T {
        if self.chirp_bandwidth == T::zero() {
            return T::zero();
        }
        let tau = t - self.t0;
        match self.shape {
            PulseShape::Chs => {
                let two_pi = T::PI() + T::PI();
                self.mu() * self.beta() * (self.beta() * tau).tanh() / two_pi
            }
            PulseShape::Gaussian | PulseShape::Square => {
                let half = self.width / rf(2.0);
                let clamped = tau.max(-half).min(half);
                self.chirp_bandwidth * clamped / self.width
            }
        }
    }

    /// Instantaneous angular frequency offset of the chirp, rad/s.
    pub fn chirp_rate_rad(&self, t: T) -> T {
        (T::PI() + T::PI()) * self.instantaneous_freq_offset(t)
    }

    /// Complex envelope at time `t`: magnitude times the static phase and
    /// the accumulated chirp phase; peak magnitude 1.
    pub fn envelope(&self, t: T) -> Complex<T> {
        let tau = t - self.t0;
        let chirp_phase = if self.chirp_bandwidth == T::zero() {
            T::zero()
        } else {
            match self.shape {
                PulseShape::Chs => self.mu() * (self.beta() * tau).cosh().ln(),
                PulseShape::Gaussian | PulseShape::Square => {
                    T::PI() * self.chirp_bandwidth * tau * tau / self.width
                }
            }
        };
        Complex::from_polar(self.amplitude_at(t), self.phase + chirp_phase)
    }

    /// Peak Rabi rate in rad/s. Fails if the pulse still carries a raw
    /// power (apply [`Pulse::with_rabi_calibration`] first).
    pub fn peak_rabi_rad(&self) -> Result<T, PulseError> {
        match self.amplitude {
            Amplitude::RabiHz(x) => Ok((T::PI() + T::PI()) * x),
            Amplitude::PowerW(_) => Err(PulseError::NeedsRabiCalibration(self.name.clone())),
        }
    }

    /// Resolves a peak power into a Rabi rate with the calibration
    /// constant `kappa` (rad/s per sqrt(W)). Pulses already carrying a
    /// Rabi rate are returned unchanged.
    pub fn with_rabi_calibration(&self, kappa: T) -> Pulse<T> {
        let mut out = self.clone();
        if let Amplitude::PowerW(p) = self.amplitude {
            let two_pi = T::PI() + T::PI();
            out.amplitude = Amplitude::RabiHz(kappa * p.sqrt() / two_pi);
        }
        out
    }

    /// The time-and-phase-reversed copy of the pulse: the drive that
    /// undoes this pulse's rotation when integrated at the opposite
    /// detuning. For the time-symmetric shapes used here it is the same
    /// pulse with the carrier phase advanced by pi.
    pub fn time_phase_reversed(&self) -> Pulse<T> {
        let mut out = self.clone();
        out.phase = self.phase + T::PI();
        out
    }
}

/// Single-ion state for transfer-dynamics integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T> {
    pub u: T,
    pub v: T,
    pub w: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(u: T, v: T, w: T) -> Self {
        Self { u, v, w }
    }

    /// Ground state (0, 0, -1).
    pub fn ground() -> Self {
        Self {
            u: T::zero(),
            v: T::zero(),
            w: -T::one(),
        }
    }

    pub fn norm(&self) -> T {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(width: f64) -> Pulse<f64> {
        Pulse {
            name: "in".into(),
            shape: PulseShape::Gaussian,
            t0: 0.0,
            width,
            freq: FreqRef::F0,
            chirp_bandwidth: 0.0,
            phase: 0.0,
            amplitude: Amplitude::RabiHz(1e5),
            direction: 1,
        }
    }

    fn chs(width: f64, chirp: f64) -> Pulse<f64> {
        Pulse {
            name: "r1".into(),
            shape: PulseShape::Chs,
            t0: 0.0,
            width,
            freq: FreqRef::F0,
            chirp_bandwidth: chirp,
            phase: 0.0,
            amplitude: Amplitude::RabiHz(1e6),
            direction: -1,
        }
    }

    #[test]
    fn gaussian_envelope_peak_and_half_maximum() {
        let p = gaussian(5e-7);
        assert_eq!(p.envelope(0.0), num_complex::Complex::new(1.0, 0.0));
        assert_relative_eq!(p.envelope(2.5e-7).norm(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(p.envelope(-2.5e-7).norm(), 0.5, max_relative = 1e-12);
        let mut phased = p.clone();
        phased.phase = 1.25;
        assert_relative_eq!(phased.envelope(0.0).arg(), 1.25, max_relative = 1e-12);
    }

    #[test]
    fn chs_frequency_sweeps_across_the_chirp_band() {
        let p = chs(0.94e-6, 2e6);
        let (lo, hi) = p.support();
        let f_lo = p.instantaneous_freq_offset(lo);
        let f_hi = p.instantaneous_freq_offset(hi);
        assert_relative_eq!(f_lo, -1e6, max_relative = 1e-6);
        assert_relative_eq!(f_hi, 1e6, max_relative = 1e-6);
        // monotone sweep
        let mut last = f_lo;
        for k in 1..=100 {
            let t = lo + (hi - lo) * (k as f64) / 100.0;
            let f = p.instantaneous_freq_offset(t);
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn chs_edge_amplitude_is_one_percent_at_nominal_duration() {
        let p = chs(0.94e-6, 2e6);
        let edge = p.amplitude_at(0.94e-6 / 2.0);
        assert!((edge - 0.01).abs() < 2e-3, "sech truncation target, got {edge}");
    }

    #[test]
    fn square_envelope_is_a_boxcar() {
        let p = Pulse {
            shape: PulseShape::Square,
            ..gaussian(1e-6)
        };
        assert_eq!(p.amplitude_at(0.0), 1.0);
        assert_eq!(p.amplitude_at(0.49e-6), 1.0);
        assert_eq!(p.amplitude_at(0.51e-6), 0.0);
    }

    #[test]
    fn power_requires_calibration() {
        let mut p = gaussian(5e-7);
        p.amplitude = Amplitude::PowerW(0.013);
        assert!(matches!(
            p.peak_rabi_rad(),
            Err(PulseError::NeedsRabiCalibration(_))
        ));
        let calibrated = p.with_rabi_calibration(1e8);
        let expected = 1e8 * 0.013f64.sqrt();
        assert_relative_eq!(calibrated.peak_rabi_rad().unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn validate_rejects_bad_fields() {
        let mut p = gaussian(5e-7);
        p.width = 0.0;
        assert!(p.validate().is_err());
        let mut p = gaussian(5e-7);
        p.direction = 0;
        assert!(p.validate().is_err());
        let mut p = gaussian(5e-7);
        p.chirp_bandwidth = -1.0;
        assert!(p.validate().is_err());
    }
}

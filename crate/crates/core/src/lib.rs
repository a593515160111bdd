//! Deterministic desk-scale simulator and analysis toolkit for
//! rare-earth-ion ensemble optical memories.
//!
//! The crate covers the full chain from spectral preparation to echo
//! analysis:
//!
//! - [`spectral`]: the inhomogeneously broadened ensemble as populations
//!   on a detuning grid, optical depth and transmission conversions;
//! - [`prepare`]: hole-burning preparation (class cleaning, spin
//!   polarization, comb creation) as iterative population transfer;
//! - [`pulse`] / [`sequence`]: parameterised optical pulses and the
//!   line-oriented sequence file format;
//! - [`bloch`]: single-ion optical-Bloch integration and pulse transfer
//!   efficiencies;
//! - [`echo`]: emission times, amplitudes and efficiencies for two-pulse,
//!   AFC, spin-wave AFC and ROSE storage, with wavevector phase matching;
//! - [`fit`]: the least-squares fits and closed-form formulas used to
//!   analyse decay curves, fringes and absorption profiles;
//! - [`noise`]: a fully specified seeded noise stream for replicate
//!   studies.
//!
//! Everything numeric is generic over the scalar type through
//! [`real::Real`]; the `*64` aliases below pin the common `f64` case.

// Validation uses `!(x > 0)` rather than `x <= 0` so that NaN inputs
// fail the checks too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod echo;
pub mod fit;
pub mod noise;
pub mod prepare;
pub mod pulse;
pub mod real;
pub mod sequence;
pub mod spectral;
pub mod units;

pub use num_complex::Complex;
pub use real::Real;

pub use bloch::{bloch_integrate, transfer_efficiency, BlochError, TransferReport};
pub use echo::{
    afc_echo, dephasing_factor, echo_trace_csv, interfere, phase_matching, rose_echo,
    rose_efficiency, spin_wave_echo, two_pulse_echo, EchoError, EchoResult, EchoWarning,
    MemoryParams, RoseEcho, SpinWaveEcho,
};
pub use fit::{
    deduce_eta_t, fit_exp_decay, fit_gaussian_decay, fit_gaussian_profile, fit_rose_decay,
    fit_sinusoid, focal_spot_diameter, gamma_inh_from_t2star, FitError, FitResult,
};
pub use noise::NoiseGen;
pub use prepare::{
    class_clean, comb_metrics, create_afc, spin_polarize, Branching, BurnSweep, CombMetrics,
    CombSpec, PrepareError,
};
pub use pulse::{Amplitude, BlochVector, FreqRef, Pulse, PulseError, PulseShape};
pub use sequence::{
    parse_sequence, serialize_sequence, ParseWarning, ParsedSequence, Scheme, Sequence,
    SequenceError, Window,
};
pub use spectral::{
    build_gaussian_profile, insertion_loss_db, od_from_transmission, transmission,
    AbsorptionProfile, FrequencyGrid, GroundLevel, LevelScheme, SpectralError, SpectralState,
};

/// Concrete `f64` aliases for the main domain types.
pub type Grid64 = FrequencyGrid<f64>;
pub type LevelScheme64 = LevelScheme<f64>;
pub type State64 = SpectralState<f64>;
pub type Profile64 = AbsorptionProfile<f64>;
pub type Pulse64 = Pulse<f64>;
pub type BlochVector64 = BlochVector<f64>;
pub type Sequence64 = Sequence<f64>;
pub type MemoryParams64 = MemoryParams<f64>;
pub type EchoResult64 = EchoResult<f64>;
pub type FitResult64 = FitResult<f64>;

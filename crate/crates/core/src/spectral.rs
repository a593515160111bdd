//! Inhomogeneously broadened ensemble on a detuning grid.
//!
//! The ensemble is represented by per-bin populations of the three ground
//! hyperfine levels of one ion class, plus a removable background term for
//! everything else that absorbs inside the window (other classes, aliased
//! transitions). Optical depth is proportional to the population of the
//! ground level that is resonant at a bin; the proportionality constant
//! `peak_od` is the optical depth a fully populated level would show.

use crate::real::{as_f64, rf, Real};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid span {span_hz} Hz does not cover the required {required_hz} Hz")]
    UnderSpanned { span_hz: f64, required_hz: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coupling {coupling} exceeds the transmission {transmission} of the remaining optics")]
    InconsistentLoss { coupling: f64, transmission: f64 },
    #[error("band [{lo_hz}, {hi_hz}] Hz is outside the grid")]
    BandOutsideGrid { lo_hz: f64, hi_hz: f64 },
}

/// Uniform detuning grid. `start` is the detuning of bin 0 relative to the
/// reference optical frequency; bins are spaced by `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T> {
    start: T,
    step: T,
    count: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(start: T, step: T, count: usize) -> Result<Self, SpectralError> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(SpectralError::InvalidGrid("step must be positive".into()));
        }
        if count < 2 {
            return Err(SpectralError::InvalidGrid("count must be at least 2".into()));
        }
        if !start.is_finite() {
            return Err(SpectralError::InvalidGrid("start must be finite".into()));
        }
        Ok(Self { start, step, count })
    }

    /// Grid centred on `center` that covers at least `span`, with bins of
    /// width `step`. Fails if the requested span collapses below one bin.
    pub fn spanning(center: T, span: T, step: T) -> Result<Self, SpectralError> {
        if !(span > T::zero()) {
            return Err(SpectralError::InvalidGrid("span must be positive".into()));
        }
        if !(step > T::zero()) {
            return Err(SpectralError::InvalidGrid("step must be positive".into()));
        }
        let half_bins = (span / (step + step)).ceil();
        let half_bins_us = half_bins
            .to_usize()
            .ok_or_else(|| SpectralError::InvalidGrid("span/step overflows".into()))?;
        let grid = Self::new(center - half_bins * step, step, 2 * half_bins_us + 1)?;
        grid.ensure_spans(span)?;
        Ok(grid)
    }

    /// Symmetric grid over `±half_span` around zero detuning.
    pub fn symmetric(half_span: T, step: T) -> Result<Self, SpectralError> {
        Self::spanning(T::zero(), half_span + half_span, step)
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> T {
        self.start + self.step * rf((self.count - 1) as f64)
    }

    pub fn span(&self) -> T {
        self.step * rf((self.count - 1) as f64)
    }

    pub fn value(&self, index: usize) -> T {
        self.start + self.step * rf(index as f64)
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(move |i| self.value(i))
    }

    /// Index of the bin nearest to `freq`, if `freq` lies on the grid.
    pub fn index_nearest(&self, freq: T) -> Option<usize> {
        let pos = ((freq - self.start) / self.step).round();
        let idx = pos.to_isize()?;
        if idx < 0 || idx as usize >= self.count {
            None
        } else {
            Some(idx as usize)
        }
    }

    /// Inclusive index range of bins whose centre lies in `[lo, hi]`.
    pub fn band_indices(&self, lo: T, hi: T) -> Result<(usize, usize), SpectralError> {
        if !(lo < hi) {
            return Err(SpectralError::Domain("band must satisfy lo < hi".into()));
        }
        let eps = rf::<T>(1e-9);
        let first = ((lo - self.start) / self.step - eps).ceil();
        let last = ((hi - self.start) / self.step + eps).floor();
        let (first, last) = match (first.to_isize(), last.to_isize()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(SpectralError::BandOutsideGrid {
                    lo_hz: as_f64(lo),
                    hi_hz: as_f64(hi),
                })
            }
        };
        let first = first.max(0) as usize;
        if last < 0 || first as isize > last || first >= self.count {
            return Err(SpectralError::BandOutsideGrid {
                lo_hz: as_f64(lo),
                hi_hz: as_f64(hi),
            });
        }
        Ok((first, (last as usize).min(self.count - 1)))
    }

    /// Validates that the grid covers a feature of width `required`.
    pub fn ensure_spans(&self, required: T) -> Result<(), SpectralError> {
        if self.span() < required {
            return Err(SpectralError::UnderSpanned {
                span_hz: as_f64(self.span()),
                required_hz: as_f64(required),
            });
        }
        Ok(())
    }
}

/// Ground hyperfine levels of the tracked ion class:
/// g1 = |±1/2>g, g2 = |±3/2>g, g3 = |±5/2>g. Optical transitions go to a
/// single excited level (|±5/2>e).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroundLevel {
    G1,
    G2,
    G3,
}

impl GroundLevel {
    pub const ALL: [GroundLevel; 3] = [GroundLevel::G1, GroundLevel::G2, GroundLevel::G3];

    pub fn index(self) -> usize {
        match self {
            GroundLevel::G1 => 0,
            GroundLevel::G2 => 1,
            GroundLevel::G3 => 2,
        }
    }
}

/// Optical transition offsets of the tracked class relative to the g1
/// transition: f0 -> 0, f+ -> `f_plus`, f- -> `f_minus`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme<T> {
    f_plus: T,
    f_minus: T,
}

impl<T: Real> LevelScheme<T> {
    pub fn new(f_plus: T, f_minus: T) -> Result<Self, SpectralError> {
        if !(f_plus > T::zero()) || !(f_minus < T::zero()) {
            return Err(SpectralError::Domain(
                "transition offsets must satisfy f+ > 0 > f-".into(),
            ));
        }
        Ok(Self { f_plus, f_minus })
    }

    pub fn f_plus(&self) -> T {
        self.f_plus
    }

    pub fn f_minus(&self) -> T {
        self.f_minus
    }

    pub fn offset(&self, level: GroundLevel) -> T {
        match level {
            GroundLevel::G1 => T::zero(),
            GroundLevel::G2 => self.f_plus,
            GroundLevel::G3 => self.f_minus,
        }
    }
}

impl<T: Real> Default for LevelScheme<T> {
    /// Zero-field offsets of 151Eu3+:Y2SiO5: f+ = +34.5 MHz, f- = -20.9 MHz.
    fn default() -> Self {
        Self {
            f_plus: rf(34.5e6),
            f_minus: rf(-20.9e6),
        }
    }
}

/// Per-bin populations of the three ground levels plus a removable
/// background (other ion classes and aliased transitions) and a
/// far-detuned reservoir where pumped-away population is parked.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState<T> {
    pub(crate) grid: FrequencyGrid<T>,
    pub(crate) pops: Vec<[T; 3]>,
    pub(crate) background: Vec<T>,
    pub(crate) reservoir: T,
    pub(crate) peak_od: T,
}

impl<T: Real> SpectralState<T> {
    /// Unprepared state: every bin holds the three levels equally populated
    /// plus `background` population units of foreign absorption.
    pub fn uniform(
        grid: FrequencyGrid<T>,
        peak_od: T,
        background: T,
    ) -> Result<Self, SpectralError> {
        if !(peak_od >= T::zero()) || !peak_od.is_finite() {
            return Err(SpectralError::Domain("peak_od must be non-negative".into()));
        }
        if !(background >= T::zero()) || !(background <= T::one()) {
            return Err(SpectralError::Domain("background must lie in [0, 1]".into()));
        }
        let third = T::one() / rf(3.0);
        let count = grid.count();
        Ok(Self {
            grid,
            pops: vec![[third; 3]; count],
            background: vec![background; count],
            reservoir: T::zero(),
            peak_od,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn peak_od(&self) -> T {
        self.peak_od
    }

    pub fn reservoir(&self) -> T {
        self.reservoir
    }

    pub fn populations(&self, bin: usize) -> [T; 3] {
        self.pops[bin]
    }

    pub fn background(&self, bin: usize) -> T {
        self.background[bin]
    }

    /// Total population over the window and the reservoir; conserved by
    /// every preparation operation.
    pub fn total_population(&self) -> T {
        let mut total = T::zero();
        for (p, b) in self.pops.iter().zip(&self.background) {
            total += p[0] + p[1] + p[2] + *b;
        }
        total + self.reservoir
    }

    /// Optical depth profile seen through the transition of `level`,
    /// including the background term.
    pub fn absorption_profile(&self, level: GroundLevel) -> AbsorptionProfile<T> {
        let k = level.index();
        let od = self
            .pops
            .iter()
            .zip(&self.background)
            .map(|(p, b)| self.peak_od * (p[k] + *b))
            .collect();
        AbsorptionProfile {
            grid: self.grid.clone(),
            od,
        }
    }
}

/// Optical depth per grid bin.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionProfile<T> {
    grid: FrequencyGrid<T>,
    od: Vec<T>,
}

impl<T: Real> AbsorptionProfile<T> {
    pub fn new(grid: FrequencyGrid<T>, od: Vec<T>) -> Result<Self, SpectralError> {
        if od.len() != grid.count() {
            return Err(SpectralError::Domain(
                "profile length does not match grid".into(),
            ));
        }
        if od.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(SpectralError::Domain(
                "optical depth must be finite and non-negative".into(),
            ));
        }
        Ok(Self { grid, od })
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn od(&self) -> &[T] {
        &self.od
    }

    pub fn od_at(&self, bin: usize) -> T {
        self.od[bin]
    }

    /// Trapezoid integral of the profile over the grid, in OD·Hz.
    pub fn integral_trapezoid(&self) -> T {
        let mut acc = T::zero();
        let half = rf::<T>(0.5);
        for w in self.od.windows(2) {
            acc += (w[0] + w[1]) * half;
        }
        acc * self.grid.step()
    }

    /// CSV serialization: header `detuning_hz,od`, LF line endings, full
    /// double precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.od.len() * 48 + 16);
        out.push_str("detuning_hz,od\n");
        for (i, od) in self.od.iter().enumerate() {
            out.push_str(&format!("{:.16e},{:.16e}\n", self.grid.value(i), od));
        }
        out
    }
}

/// Gaussian absorption line of the given FWHM and peak optical depth:
/// od(delta) = peak_od * exp(-4 ln2 * delta^2 / fwhm^2).
pub fn build_gaussian_profile<T: Real>(
    gamma_inh_fwhm: T,
    peak_od: T,
    grid: &FrequencyGrid<T>,
) -> Result<AbsorptionProfile<T>, SpectralError> {
    if !(gamma_inh_fwhm > T::zero()) {
        return Err(SpectralError::Domain("linewidth must be positive".into()));
    }
    if !(peak_od >= T::zero()) {
        return Err(SpectralError::Domain("peak_od must be non-negative".into()));
    }
    grid.ensure_spans(gamma_inh_fwhm + gamma_inh_fwhm)?;
    let four_ln2 = rf::<T>(4.0) * T::LN_2();
    let inv_w2 = T::one() / (gamma_inh_fwhm * gamma_inh_fwhm);
    let od = grid
        .values()
        .map(|d| peak_od * (-four_ln2 * d * d * inv_w2).exp())
        .collect();
    Ok(AbsorptionProfile {
        grid: grid.clone(),
        od,
    })
}

/// Optical depth from an intensity transmission ratio: -ln(ratio).
pub fn od_from_transmission<T: Real>(ratio: T) -> Result<T, SpectralError> {
    if !(ratio > T::zero()) || !(ratio <= T::one()) {
        return Err(SpectralError::Domain(
            "transmission ratio must lie in (0, 1]".into(),
        ));
    }
    Ok(-ratio.ln())
}

/// Intensity transmission through a medium of the given optical depth.
pub fn transmission<T: Real>(od: T) -> Result<T, SpectralError> {
    if !(od >= T::zero()) || !od.is_finite() {
        return Err(SpectralError::Domain(
            "optical depth must be finite and non-negative".into(),
        ));
    }
    Ok((-od).exp())
}

/// Insertion loss in dB of a device measured as `total_coupling` overall
/// throughput when the remaining optics alone transmit
/// `other_optics_transmission`.
pub fn insertion_loss_db<T: Real>(
    total_coupling: T,
    other_optics_transmission: T,
) -> Result<T, SpectralError> {
    if !(total_coupling > T::zero()) || !(other_optics_transmission <= T::one()) {
        return Err(SpectralError::Domain(
            "efficiencies must lie in (0, 1]".into(),
        ));
    }
    if total_coupling > other_optics_transmission {
        return Err(SpectralError::InconsistentLoss {
            coupling: as_f64(total_coupling),
            transmission: as_f64(other_optics_transmission),
        });
    }
    Ok(-rf::<T>(10.0) * (total_coupling / other_optics_transmission).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn wide_grid() -> FrequencyGrid<f64> {
        FrequencyGrid::symmetric(15e9, 10e6).unwrap()
    }

    #[test]
    fn grid_construction() {
        let g = FrequencyGrid::new(-1e6, 1e3, 2001).unwrap();
        assert_eq!(g.count(), 2001);
        assert_eq!(g.value(1000), 0.0);
        assert_eq!(g.end(), 1e6);
        assert!(FrequencyGrid::new(0.0, 0.0, 5).is_err());
        assert!(FrequencyGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn band_indices_cover_inclusive_range() {
        let g = FrequencyGrid::new(-10.0, 1.0, 21).unwrap();
        let (lo, hi) = g.band_indices(-2.0, 2.0).unwrap();
        assert_eq!((lo, hi), (8, 12));
        assert!(g.band_indices(100.0, 200.0).is_err());
    }

    #[test]
    fn gaussian_profile_bulk_line() {
        // 4.7 GHz FWHM at peak OD 3.00: half maximum sits at half the FWHM.
        let profile = build_gaussian_profile(4.7e9, 3.00, &wide_grid()).unwrap();
        let center = profile.grid().index_nearest(0.0).unwrap();
        assert_relative_eq!(profile.od_at(center), 3.00, max_relative = 1e-12);
        let half = profile.grid().index_nearest(2.35e9).unwrap();
        assert_relative_eq!(profile.od_at(half), 1.50, max_relative = 1e-9);
        let half_neg = profile.grid().index_nearest(-2.35e9).unwrap();
        assert_relative_eq!(profile.od_at(half_neg), 1.50, max_relative = 1e-9);
    }

    #[test]
    fn gaussian_profile_waveguide_line() {
        let grid = FrequencyGrid::symmetric(30e9, 10e6).unwrap();
        let profile = build_gaussian_profile(11.8e9, 1.75, &grid).unwrap();
        let center = profile.grid().index_nearest(0.0).unwrap();
        assert_relative_eq!(profile.od_at(center), 1.75, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_profile_zero_peak() {
        let grid = FrequencyGrid::symmetric(10.0, 0.5).unwrap();
        let profile = build_gaussian_profile(1.0, 0.0, &grid).unwrap();
        assert!(profile.od().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gaussian_profile_rejects_narrow_grid() {
        let grid = FrequencyGrid::symmetric(4e9, 10e6).unwrap();
        assert!(matches!(
            build_gaussian_profile(4.7e9, 3.0, &grid),
            Err(SpectralError::UnderSpanned { .. })
        ));
    }

    #[test]
    fn gaussian_profile_integral_matches_closed_form() {
        // Integral of the FWHM-parameterized Gaussian:
        // peak * fwhm * sqrt(pi / (4 ln2)).
        let profile = build_gaussian_profile(4.7e9, 3.00, &wide_grid()).unwrap();
        let expected = 3.00 * 4.7e9 * (std::f64::consts::PI / (4.0 * 2f64.ln())).sqrt();
        assert_relative_eq!(profile.integral_trapezoid(), expected, max_relative = 1e-3);
    }

    #[test]
    fn od_and_transmission() {
        assert_relative_eq!(
            od_from_transmission(0.174).unwrap(),
            1.7486999797676082,
            max_relative = 1e-12
        );
        assert_eq!(od_from_transmission(1.0).unwrap(), 0.0);
        assert_relative_eq!(
            od_from_transmission((-3.0f64).exp()).unwrap(),
            3.0,
            max_relative = 1e-12
        );
        assert!(od_from_transmission(0.0).is_err());
        assert!(od_from_transmission(1.0 + 1e-9).is_err());

        assert_relative_eq!(
            transmission(3.00).unwrap(),
            0.049787068367863944,
            max_relative = 1e-12
        );
        assert_eq!(transmission(0.0).unwrap(), 1.0);
        assert_relative_eq!(
            transmission(1.75).unwrap(),
            0.17377394345044514,
            max_relative = 1e-12
        );
        assert!(transmission(-0.1).is_err());
    }

    #[test]
    fn insertion_loss_cases() {
        assert_relative_eq!(
            insertion_loss_db(0.24, 0.75).unwrap(),
            4.94850021680094,
            max_relative = 1e-12
        );
        assert_eq!(insertion_loss_db(0.5, 0.5).unwrap(), 0.0);
        assert_relative_eq!(insertion_loss_db(0.1, 1.0).unwrap(), 10.0, max_relative = 1e-12);
        assert!(matches!(
            insertion_loss_db(0.8, 0.75),
            Err(SpectralError::InconsistentLoss { .. })
        ));
        assert!(insertion_loss_db(0.0, 0.75).is_err());
    }

    #[test]
    fn profile_csv_format() {
        let grid = FrequencyGrid::new(-1.0, 1.0, 3).unwrap();
        let profile = AbsorptionProfile::new(grid, vec![0.25, 1.0, 0.25]).unwrap();
        let csv = profile.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("detuning_hz,od"));
        assert_eq!(
            lines.next(),
            Some("-1.0000000000000000e0,2.5000000000000000e-1")
        );
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn state_bookkeeping() {
        let grid = FrequencyGrid::symmetric(1e6, 1e3).unwrap();
        let state = SpectralState::uniform(grid, 1.2, 1.0 / 3.0).unwrap();
        let bins = state.grid().count() as f64;
        assert_relative_eq!(
            state.total_population(),
            bins * (1.0 + 1.0 / 3.0),
            max_relative = 1e-12
        );
        let profile = state.absorption_profile(GroundLevel::G1);
        // one third of the class plus the background, scaled by peak od
        assert_relative_eq!(profile.od_at(0), 1.2 * (2.0 / 3.0), max_relative = 1e-12);
    }

    #[test]
    fn level_scheme_offsets() {
        let scheme = LevelScheme::<f64>::default();
        assert_eq!(scheme.offset(GroundLevel::G1), 0.0);
        assert_eq!(scheme.offset(GroundLevel::G2), 34.5e6);
        assert_eq!(scheme.offset(GroundLevel::G3), -20.9e6);
        assert!(LevelScheme::new(-1.0, -2.0).is_err());
    }
}

//! Spectral-hole-burning preparation.
//!
//! Class cleaning, spin polarization and comb creation are modelled as
//! memoryless per-repetition rate maps: each swept transition excites a
//! fixed fraction of the resonant population per pass, and the excited
//! fraction decays back to the ground levels with configurable branching.
//! Foreign absorption (other classes, aliased transitions) is pumped out
//! of the window into the reservoir.

use crate::real::{as_f64, rf, Real};
use crate::spectral::{AbsorptionProfile, GroundLevel, LevelScheme, SpectralState};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrepareError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("sweep centred at {center_hz} Hz matches no transition offset")]
    UnmatchedSweep { center_hz: f64 },
    #[error("sweeps must address distinct transitions")]
    DuplicateTransition,
    #[error("sweep window [{lo_hz}, {hi_hz}] Hz reaches past the grid into the reservoir region")]
    SweepOverlapsReservoir { lo_hz: f64, hi_hz: f64 },
    #[error("invalid branching ratios: {0}")]
    InvalidBranching(String),
    #[error("invalid comb spec: {0}")]
    InvalidComb(String),
    #[error("comb period {delta_hz} Hz spans fewer than 4 grid bins of {step_hz} Hz")]
    CombUnderResolved { delta_hz: f64, step_hz: f64 },
    #[error("profile has fewer than 3 resolvable teeth in the requested band")]
    InsufficientStructure,
}

/// One frequency-swept hole-burning pump.
///
/// `pump_strength` is the per-repetition excitation probability for
/// population resonant anywhere inside the swept span (the sweep
/// homogenizes excitation across the span).
#[derive(Debug, Clone, PartialEq)]
pub struct BurnSweep<T> {
    pub center_offset: T,
    pub span: T,
    pub duration: T,
    pub repetitions: u32,
    pub pump_strength: T,
}

impl<T: Real> BurnSweep<T> {
    pub fn new(
        center_offset: T,
        span: T,
        duration: T,
        repetitions: u32,
        pump_strength: T,
    ) -> Result<Self, PrepareError> {
        let sweep = Self {
            center_offset,
            span,
            duration,
            repetitions,
            pump_strength,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<(), PrepareError> {
        if !(self.span > T::zero()) {
            return Err(PrepareError::InvalidSweep("span must be positive".into()));
        }
        if self.repetitions < 1 {
            return Err(PrepareError::InvalidSweep(
                "repetitions must be at least 1".into(),
            ));
        }
        if !(self.pump_strength >= T::zero()) || !(self.pump_strength <= T::one()) {
            return Err(PrepareError::InvalidSweep(
                "pump_strength must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Branching ratios for decay from the excited level into the three
/// ground levels. The defaults are uniform; measured ratios can be
/// supplied instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Branching<T>(pub [T; 3]);

impl<T: Real> Branching<T> {
    pub fn new(ratios: [T; 3]) -> Result<Self, PrepareError> {
        if ratios.iter().any(|r| !(*r >= T::zero())) {
            return Err(PrepareError::InvalidBranching(
                "ratios must be non-negative".into(),
            ));
        }
        let sum = ratios[0] + ratios[1] + ratios[2];
        if (sum - T::one()).abs() > rf(1e-9) {
            return Err(PrepareError::InvalidBranching("ratios must sum to 1".into()));
        }
        Ok(Self(ratios))
    }

    pub fn uniform() -> Self {
        let third = T::one() / rf(3.0);
        Self([third; 3])
    }
}

impl<T: Real> Default for Branching<T> {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Target comb: tooth period, total bandwidth, finesse (period over tooth
/// width) and the number of shaping cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct CombSpec<T> {
    pub delta: T,
    pub bandwidth: T,
    pub finesse: T,
    pub cycles: u32,
}

impl<T: Real> CombSpec<T> {
    pub fn new(delta: T, bandwidth: T, finesse: T, cycles: u32) -> Result<Self, PrepareError> {
        let spec = Self {
            delta,
            bandwidth,
            finesse,
            cycles,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PrepareError> {
        if !(self.delta > T::zero()) {
            return Err(PrepareError::InvalidComb("delta must be positive".into()));
        }
        if self.bandwidth < self.delta + self.delta {
            return Err(PrepareError::InvalidComb(
                "bandwidth must cover at least two periods".into(),
            ));
        }
        if !(self.finesse > T::one()) {
            return Err(PrepareError::InvalidComb("finesse must exceed 1".into()));
        }
        Ok(())
    }
}

/// Diagnostics extracted from a measured or simulated comb.
#[derive(Debug, Clone, PartialEq)]
pub struct CombMetrics<T> {
    pub delta: T,
    pub finesse: T,
    pub peak_od: T,
    pub background_od: T,
}

/// Per-repetition anti-hole pump strength used by [`create_afc`].
const COMB_PUMP_PER_CYCLE: f64 = 0.5;

struct MatchedSweep<'a, T> {
    sweep: &'a BurnSweep<T>,
    level: GroundLevel,
    bins: (usize, usize),
}

fn match_sweeps<'a, T: Real>(
    state: &SpectralState<T>,
    scheme: &LevelScheme<T>,
    sweeps: &'a [BurnSweep<T>],
    allowed: &[GroundLevel],
) -> Result<Vec<MatchedSweep<'a, T>>, PrepareError> {
    let mut matched = Vec::with_capacity(sweeps.len());
    let mut seen = [false; 3];
    for sweep in sweeps {
        sweep.validate()?;
        let tol = rf::<T>(1e-3) + sweep.center_offset.abs() * rf(1e-9);
        let level = allowed
            .iter()
            .copied()
            .find(|&l| (sweep.center_offset - scheme.offset(l)).abs() <= tol)
            .ok_or(PrepareError::UnmatchedSweep {
                center_hz: as_f64(sweep.center_offset),
            })?;
        if seen[level.index()] {
            return Err(PrepareError::DuplicateTransition);
        }
        seen[level.index()] = true;

        // The swept span in the ion-detuning frame of the matched level.
        let half = sweep.span / rf(2.0);
        let lo = sweep.center_offset - scheme.offset(level) - half;
        let hi = sweep.center_offset - scheme.offset(level) + half;
        let grid = state.grid();
        if lo < grid.start() || hi > grid.end() {
            return Err(PrepareError::SweepOverlapsReservoir {
                lo_hz: as_f64(lo),
                hi_hz: as_f64(hi),
            });
        }
        let bins = grid
            .band_indices(lo, hi)
            .map_err(|_| PrepareError::SweepOverlapsReservoir {
                lo_hz: as_f64(lo),
                hi_hz: as_f64(hi),
            })?;
        matched.push(MatchedSweep { sweep, level, bins });
    }
    // Deterministic sweep order regardless of caller ordering.
    matched.sort_by_key(|m| m.level.index());
    Ok(matched)
}

/// Applies the matched sweeps simultaneously for the requested number of
/// repetitions: per repetition, every swept level loses `pump_strength`
/// of its population to the excited state, which decays back according
/// to `branching`; background absorption inside a swept window is pumped
/// to the reservoir.
fn run_sweeps<T: Real>(
    state: &mut SpectralState<T>,
    matched: &[MatchedSweep<'_, T>],
    branching: &Branching<T>,
) {
    let max_reps = matched.iter().map(|m| m.sweep.repetitions).max().unwrap_or(0);
    let beta = branching.0;
    for rep in 0..max_reps {
        let active: Vec<&MatchedSweep<'_, T>> = matched
            .iter()
            .filter(|m| rep < m.sweep.repetitions)
            .collect();
        // Simultaneous excitation: amounts are computed from the state at
        // the start of the repetition, then redistributed.
        for bin in 0..state.grid.count() {
            let mut excited = T::zero();
            let mut bg_pumped = T::zero();
            for m in &active {
                if bin < m.bins.0 || bin > m.bins.1 {
                    continue;
                }
                let q = m.sweep.pump_strength;
                let taken = q * state.pops[bin][m.level.index()];
                state.pops[bin][m.level.index()] -= taken;
                excited += taken;
                let bg = q * state.background[bin];
                state.background[bin] -= bg;
                bg_pumped += bg;
            }
            if excited > T::zero() {
                for (p, b) in state.pops[bin].iter_mut().zip(&beta) {
                    *p += *b * excited;
                }
            }
            state.reservoir += bg_pumped;
        }
    }
}

/// Class cleaning: three simultaneous sweeps at the f0, f+ and f-
/// transitions of the target class. The target class keeps recycling
/// within its own levels while everything else resonant inside the
/// windows (the background term) is pumped to the reservoir.
pub fn class_clean<T: Real>(
    state: &SpectralState<T>,
    scheme: &LevelScheme<T>,
    sweeps: &[BurnSweep<T>; 3],
    branching: &Branching<T>,
) -> Result<SpectralState<T>, PrepareError> {
    let mut out = state.clone();
    let matched = match_sweeps(&out, scheme, sweeps, &GroundLevel::ALL)?;
    run_sweeps(&mut out, &matched, branching);
    Ok(out)
}

/// Spin polarization: sweeps at f+ and f- empty g2 and g3 into g1.
/// Assumes class cleaning has already been applied; that precondition is
/// not detectable from the state and is the caller's responsibility.
pub fn spin_polarize<T: Real>(
    state: &SpectralState<T>,
    scheme: &LevelScheme<T>,
    sweeps: &[BurnSweep<T>; 2],
    branching: &Branching<T>,
) -> Result<SpectralState<T>, PrepareError> {
    let mut out = state.clone();
    let matched = match_sweeps(
        &out,
        scheme,
        sweeps,
        &[GroundLevel::G2, GroundLevel::G3],
    )?;
    run_sweeps(&mut out, &matched, branching);
    Ok(out)
}

/// Comb creation on the g1 transition: square teeth of width
/// `delta / finesse` centred at odd half-multiples of `delta`, shaped in
/// parallel by pumping the anti-tooth g1 population into g2 over
/// `cycles` repetitions.
pub fn create_afc<T: Real>(
    state: &SpectralState<T>,
    spec: &CombSpec<T>,
    _scheme: &LevelScheme<T>,
) -> Result<SpectralState<T>, PrepareError> {
    spec.validate()?;
    let step = state.grid().step();
    if spec.delta < step * rf(4.0) {
        return Err(PrepareError::CombUnderResolved {
            delta_hz: as_f64(spec.delta),
            step_hz: as_f64(step),
        });
    }
    let mut out = state.clone();
    if spec.cycles == 0 {
        return Ok(out);
    }
    // Anti-holes narrower than one bin cannot be resolved; nothing burns.
    if spec.delta * (T::one() - T::one() / spec.finesse) < step {
        return Ok(out);
    }
    let half_band = spec.bandwidth / rf(2.0);
    let half_tooth = spec.delta / (spec.finesse * rf(2.0));
    // Residual fraction after all cycles; applying the per-cycle map n
    // times is the same multiplicative factor.
    let keep = (T::one() - rf::<T>(COMB_PUMP_PER_CYCLE)).powi(spec.cycles as i32);
    let edge_slack = rf::<T>(1e-12) * spec.delta;
    for bin in 0..out.grid.count() {
        let delta_hz = out.grid.value(bin);
        if delta_hz.abs() > half_band {
            continue;
        }
        let cell = (delta_hz / spec.delta).floor();
        let nearest_tooth = (cell + rf(0.5)) * spec.delta;
        let dist = (delta_hz - nearest_tooth).abs();
        if dist > half_tooth + edge_slack {
            let moved = out.pops[bin][0] * (T::one() - keep);
            out.pops[bin][0] -= moved;
            out.pops[bin][1] += moved;
        }
    }
    Ok(out)
}

/// Estimates comb period, finesse, mean tooth height and anti-tooth
/// background from an absorption profile restricted to `band`.
pub fn comb_metrics<T: Real>(
    profile: &AbsorptionProfile<T>,
    band: (T, T),
) -> Result<CombMetrics<T>, PrepareError> {
    let grid = profile.grid();
    let (lo, hi) = grid
        .band_indices(band.0, band.1)
        .map_err(|_| PrepareError::InsufficientStructure)?;
    let od = &profile.od()[lo..=hi];
    if od.len() < 3 {
        return Err(PrepareError::InsufficientStructure);
    }
    let mut max = od[0];
    let mut min = od[0];
    for &v in od {
        if v > max {
            max = v;
        }
        if v < min {
            min = v;
        }
    }
    if max - min <= rf::<T>(1e-9) * max.max(T::one()) {
        return Err(PrepareError::InsufficientStructure);
    }
    let threshold = (max + min) / rf(2.0);

    // Contiguous runs above the half contrast are teeth.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for (i, &v) in od.iter().enumerate() {
        if v > threshold {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            runs.push((s, i - 1));
        }
    }
    if let Some(s) = start {
        runs.push((s, od.len() - 1));
    }
    if runs.len() < 3 {
        return Err(PrepareError::InsufficientStructure);
    }

    let step = grid.step();
    let centers: Vec<T> = runs
        .iter()
        .map(|&(a, b)| grid.value(lo + a) + step * rf((b - a) as f64) / rf(2.0))
        .collect();
    let mut spacing = T::zero();
    for w in centers.windows(2) {
        spacing += w[1] - w[0];
    }
    let delta = spacing / rf((centers.len() - 1) as f64);

    let mut width = T::zero();
    let mut peak = T::zero();
    for &(a, b) in &runs {
        width += step * rf((b - a + 1) as f64);
        let mut run_max = od[a];
        for &v in &od[a..=b] {
            if v > run_max {
                run_max = v;
            }
        }
        peak += run_max;
    }
    let n_runs = rf::<T>(runs.len() as f64);
    let mean_width = width / n_runs;
    let peak_od = peak / n_runs;

    let mut background = T::zero();
    for w in centers.windows(2) {
        let mid = (w[0] + w[1]) / rf(2.0);
        if let Some(idx) = grid.index_nearest(mid) {
            background += profile.od_at(idx);
        }
    }
    let background_od = background / rf((centers.len() - 1) as f64);

    Ok(CombMetrics {
        delta,
        finesse: delta / mean_width,
        peak_od,
        background_od,
    })
}

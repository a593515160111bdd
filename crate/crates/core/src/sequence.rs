//! Line-oriented experiment sequence files.
//!
//! Grammar (UTF-8, LF, `#` starts a comment):
//!
//! ```text
//! directive scheme=<two_pulse_echo|afc|spin_wave_afc|rose>
//! pulse <id> shape=<gaussian|chs|square> t0=<time> fwhm=<time>|dur=<time>
//!       freq=<f0|f+|f-|offset> [chirp=<freq>] [phase=<angle>]
//!       [power=<power>|rabi=<freq>] dir=<+1|-1>
//! window <id> start=<time> end=<time>
//! ```
//!
//! Times accept `ns us ms s`, frequencies `Hz kHz MHz GHz`, angles
//! `deg rad`, powers `mW W`; bare numbers are base SI units. Pulses out
//! of time order are sorted with a warning; a readout window overlapping
//! a pulse support is a hard error.

use thiserror::Error;

use crate::pulse::{Amplitude, FreqRef, Pulse, PulseShape};
use crate::real::{rf, Real};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    TwoPulseEcho,
    Afc,
    SpinWaveAfc,
    Rose,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::TwoPulseEcho => "two_pulse_echo",
            Scheme::Afc => "afc",
            Scheme::SpinWaveAfc => "spin_wave_afc",
            Scheme::Rose => "rose",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "two_pulse_echo" => Some(Scheme::TwoPulseEcho),
            "afc" => Some(Scheme::Afc),
            "spin_wave_afc" => Some(Scheme::SpinWaveAfc),
            "rose" => Some(Scheme::Rose),
            _ => None,
        }
    }
}

/// Readout window in which emitted light is recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct Window<T> {
    pub name: String,
    pub start: T,
    pub end: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence<T> {
    pub scheme: Scheme,
    pub pulses: Vec<Pulse<T>>,
    pub windows: Vec<Window<T>>,
}

impl<T: Real> Sequence<T> {
    pub fn pulse(&self, name: &str) -> Option<&Pulse<T>> {
        self.pulses.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSequence<T> {
    pub sequence: Sequence<T>,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SequenceError {
    #[error("no scheme directive found")]
    SchemeUnset,
    #[error("line {line}: duplicate scheme directive")]
    DuplicateScheme { line: usize },
    #[error("line {line}: unknown record type `{what}`")]
    UnknownRecord { line: usize, what: String },
    #[error("line {line}: malformed token `{token}` (expected key=value)")]
    MalformedToken { line: usize, token: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate or conflicting field `{field}`")]
    ConflictingField { line: usize, field: String },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: String },
    #[error("line {line}: field `{field}`: {reason}")]
    BadValue {
        line: usize,
        field: String,
        reason: String,
    },
    #[error("line {line}: window `{window}` overlaps the support of pulse `{pulse}`")]
    WindowOverlapsPulse {
        line: usize,
        window: String,
        pulse: String,
    },
}

fn kv(token: &str, line: usize) -> Result<(&str, &str), SequenceError> {
    token.split_once('=').ok_or_else(|| SequenceError::MalformedToken {
        line,
        token: token.to_string(),
    })
}

fn bad<T>(line: usize, field: &str, reason: impl ToString) -> Result<T, SequenceError> {
    Err(SequenceError::BadValue {
        line,
        field: field.into(),
        reason: reason.to_string(),
    })
}

fn parse_pulse_line<T: Real>(
    line_no: usize,
    id: &str,
    tokens: &[&str],
) -> Result<Pulse<T>, SequenceError> {
    let mut shape: Option<PulseShape> = None;
    let mut t0: Option<T> = None;
    let mut width: Option<T> = None;
    let mut freq: Option<FreqRef<T>> = None;
    let mut chirp: Option<T> = None;
    let mut phase: Option<T> = None;
    let mut amplitude: Option<Amplitude<T>> = None;
    let mut dir: Option<i8> = None;

    for token in tokens {
        let (key, value) = kv(token, line_no)?;
        match key {
            "shape" => {
                let s = match value {
                    "gaussian" => PulseShape::Gaussian,
                    "chs" => PulseShape::Chs,
                    "square" => PulseShape::Square,
                    other => return bad(line_no, "shape", format!("unknown shape `{other}`")),
                };
                if shape.replace(s).is_some() {
                    return Err(SequenceError::ConflictingField {
                        line: line_no,
                        field: "shape".into(),
                    });
                }
            }
            "t0" => match units::parse_time(value) {
                Ok(v) => {
                    if t0.replace(rf(v)).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: "t0".into(),
                        });
                    }
                }
                Err(e) => return bad(line_no, "t0", e),
            },
            "fwhm" | "dur" => match units::parse_time(value) {
                Ok(v) if v > 0.0 => {
                    if width.replace(rf(v)).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: key.into(),
                        });
                    }
                }
                Ok(_) => return bad(line_no, key, "must be positive"),
                Err(e) => return bad(line_no, key, e),
            },
            "freq" => {
                let f = match value {
                    "f0" => FreqRef::F0,
                    "f+" => FreqRef::FPlus,
                    "f-" => FreqRef::FMinus,
                    other => match units::parse_frequency(other) {
                        Ok(v) => FreqRef::Offset(rf(v)),
                        Err(e) => return bad(line_no, "freq", e),
                    },
                };
                if freq.replace(f).is_some() {
                    return Err(SequenceError::ConflictingField {
                        line: line_no,
                        field: "freq".into(),
                    });
                }
            }
            "chirp" => match units::parse_frequency(value) {
                Ok(v) if v >= 0.0 => {
                    if chirp.replace(rf(v)).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: "chirp".into(),
                        });
                    }
                }
                Ok(_) => return bad(line_no, "chirp", "must be non-negative"),
                Err(e) => return bad(line_no, "chirp", e),
            },
            "phase" => match units::parse_angle(value) {
                Ok(v) => {
                    if phase.replace(rf(v)).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: "phase".into(),
                        });
                    }
                }
                Err(e) => return bad(line_no, "phase", e),
            },
            "power" => match units::parse_power(value) {
                Ok(v) if v >= 0.0 => {
                    if amplitude.replace(Amplitude::PowerW(rf(v))).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: "power".into(),
                        });
                    }
                }
                Ok(_) => return bad(line_no, "power", "must be non-negative"),
                Err(e) => return bad(line_no, "power", e),
            },
            "rabi" => match units::parse_frequency(value) {
                Ok(v) if v >= 0.0 => {
                    if amplitude.replace(Amplitude::RabiHz(rf(v))).is_some() {
                        return Err(SequenceError::ConflictingField {
                            line: line_no,
                            field: "rabi".into(),
                        });
                    }
                }
                Ok(_) => return bad(line_no, "rabi", "must be non-negative"),
                Err(e) => return bad(line_no, "rabi", e),
            },
            "dir" => {
                let d = match value {
                    "+1" => 1i8,
                    "-1" => -1i8,
                    other => return bad(line_no, "dir", format!("expected +1 or -1, got `{other}`")),
                };
                if dir.replace(d).is_some() {
                    return Err(SequenceError::ConflictingField {
                        line: line_no,
                        field: "dir".into(),
                    });
                }
            }
            other => {
                return Err(SequenceError::UnknownKey {
                    line: line_no,
                    key: other.to_string(),
                })
            }
        }
    }

    let missing = |field: &str| SequenceError::MissingField {
        line: line_no,
        field: field.into(),
    };
    Ok(Pulse {
        name: id.to_string(),
        shape: shape.ok_or_else(|| missing("shape"))?,
        t0: t0.ok_or_else(|| missing("t0"))?,
        width: width.ok_or_else(|| missing("fwhm|dur"))?,
        freq: freq.ok_or_else(|| missing("freq"))?,
        chirp_bandwidth: chirp.unwrap_or_else(T::zero),
        phase: phase.unwrap_or_else(T::zero),
        amplitude: amplitude.unwrap_or(Amplitude::RabiHz(T::zero())),
        direction: dir.ok_or_else(|| missing("dir"))?,
    })
}

/// Parses a sequence file. Returns the validated sequence plus any
/// recoverable warnings (currently only the auto-sort notice).
pub fn parse_sequence<T: Real>(text: &str) -> Result<ParsedSequence<T>, SequenceError> {
    let mut scheme: Option<Scheme> = None;
    let mut pulses: Vec<(Pulse<T>, usize)> = Vec::new();
    let mut windows: Vec<(Window<T>, usize)> = Vec::new();
    let mut warnings: Vec<ParseWarning> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens[0] {
            "directive" => {
                for token in &tokens[1..] {
                    let (key, value) = kv(token, line_no)?;
                    match key {
                        "scheme" => {
                            let s = Scheme::parse(value).ok_or_else(|| SequenceError::BadValue {
                                line: line_no,
                                field: "scheme".into(),
                                reason: format!("unknown scheme `{value}`"),
                            })?;
                            if scheme.replace(s).is_some() {
                                return Err(SequenceError::DuplicateScheme { line: line_no });
                            }
                        }
                        other => {
                            return Err(SequenceError::UnknownKey {
                                line: line_no,
                                key: other.to_string(),
                            })
                        }
                    }
                }
                if scheme.is_none() {
                    return Err(SequenceError::MissingField {
                        line: line_no,
                        field: "scheme".into(),
                    });
                }
            }
            "pulse" => {
                let id = tokens.get(1).copied().filter(|t| !t.contains('=')).ok_or(
                    SequenceError::MissingField {
                        line: line_no,
                        field: "id".into(),
                    },
                )?;
                let pulse = parse_pulse_line(line_no, id, &tokens[2..])?;
                pulse.validate().map_err(|e| SequenceError::BadValue {
                    line: line_no,
                    field: "pulse".into(),
                    reason: e.to_string(),
                })?;
                pulses.push((pulse, line_no));
            }
            "window" => {
                let id = tokens.get(1).copied().filter(|t| !t.contains('=')).ok_or(
                    SequenceError::MissingField {
                        line: line_no,
                        field: "id".into(),
                    },
                )?;
                let mut start: Option<T> = None;
                let mut end: Option<T> = None;
                for token in &tokens[2..] {
                    let (key, value) = kv(token, line_no)?;
                    match key {
                        "start" => match units::parse_time(value) {
                            Ok(v) => start = Some(rf(v)),
                            Err(e) => return bad(line_no, "start", e),
                        },
                        "end" => match units::parse_time(value) {
                            Ok(v) => end = Some(rf(v)),
                            Err(e) => return bad(line_no, "end", e),
                        },
                        other => {
                            return Err(SequenceError::UnknownKey {
                                line: line_no,
                                key: other.to_string(),
                            })
                        }
                    }
                }
                let start = start.ok_or(SequenceError::MissingField {
                    line: line_no,
                    field: "start".into(),
                })?;
                let end = end.ok_or(SequenceError::MissingField {
                    line: line_no,
                    field: "end".into(),
                })?;
                if !(start < end) {
                    return bad(line_no, "end", "window must satisfy start < end");
                }
                windows.push((
                    Window {
                        name: id.to_string(),
                        start,
                        end,
                    },
                    line_no,
                ));
            }
            other => {
                return Err(SequenceError::UnknownRecord {
                    line: line_no,
                    what: other.to_string(),
                })
            }
        }
    }

    let scheme = scheme.ok_or(SequenceError::SchemeUnset)?;

    // Auto-sort out-of-order pulses (warning, not an error).
    let sorted = pulses.windows(2).all(|w| w[0].0.t0 <= w[1].0.t0);
    if !sorted {
        let first_bad = pulses
            .windows(2)
            .find(|w| w[0].0.t0 > w[1].0.t0)
            .map(|w| w[1].1)
            .unwrap_or(0);
        warnings.push(ParseWarning {
            line: first_bad,
            message: "pulses were not sorted by t0; sorted automatically".into(),
        });
        pulses.sort_by(|a, b| a.0.t0.partial_cmp(&b.0.t0).unwrap_or(std::cmp::Ordering::Equal));
    }

    // Readout windows must not overlap any pulse support.
    for (window, wline) in &windows {
        for (pulse, _) in &pulses {
            let (lo, hi) = pulse.support();
            if window.start < hi && lo < window.end {
                return Err(SequenceError::WindowOverlapsPulse {
                    line: *wline,
                    window: window.name.clone(),
                    pulse: pulse.name.clone(),
                });
            }
        }
    }

    Ok(ParsedSequence {
        sequence: Sequence {
            scheme,
            pulses: pulses.into_iter().map(|(p, _)| p).collect(),
            windows: windows.into_iter().map(|(w, _)| w).collect(),
        },
        warnings,
    })
}

/// Canonical serialization; `parse_sequence` of the output reproduces the
/// sequence exactly (values are emitted in base SI units).
pub fn serialize_sequence<T: Real>(seq: &Sequence<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!("directive scheme={}\n", seq.scheme.as_str()));
    for p in &seq.pulses {
        let width_key = match p.shape {
            PulseShape::Gaussian => "fwhm",
            PulseShape::Chs | PulseShape::Square => "dur",
        };
        let freq = match p.freq {
            FreqRef::F0 => "f0".to_string(),
            FreqRef::FPlus => "f+".to_string(),
            FreqRef::FMinus => "f-".to_string(),
            FreqRef::Offset(x) => format!("{}Hz", x),
        };
        let amp = match p.amplitude {
            Amplitude::RabiHz(x) => format!("rabi={}Hz", x),
            Amplitude::PowerW(x) => format!("power={}W", x),
        };
        out.push_str(&format!(
            "pulse {} shape={} t0={}s {}={}s freq={} chirp={}Hz phase={}rad {} dir={}\n",
            p.name,
            p.shape.as_str(),
            p.t0,
            width_key,
            p.width,
            freq,
            p.chirp_bandwidth,
            p.phase,
            amp,
            if p.direction >= 0 { "+1" } else { "-1" },
        ));
    }
    for w in &seq.windows {
        out.push_str(&format!(
            "window {} start={}s end={}s\n",
            w.name, w.start, w.end
        ));
    }
    out
}

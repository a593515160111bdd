//! Unit-suffixed numeric values.
//!
//! The sequence grammar and the scenario configuration files accept
//! `<number><suffix>` tokens: `ns us ms s`, `Hz kHz MHz GHz`, `deg rad`,
//! `mW W`. A bare number is read in the base unit of the requested kind
//! (seconds, hertz, radians, watts). Internally everything is SI.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Time,
    Frequency,
    Angle,
    Power,
    Bare,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("empty value")]
    Empty,
    #[error("unparsable value `{0}`")]
    BadNumber(String),
}

const TIME: &[(&str, f64)] = &[("ns", 1e-9), ("us", 1e-6), ("ms", 1e-3), ("s", 1.0)];
const FREQUENCY: &[(&str, f64)] = &[("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("Hz", 1.0)];
const ANGLE: &[(&str, f64)] = &[("deg", PI / 180.0), ("rad", 1.0)];
const POWER: &[(&str, f64)] = &[("mW", 1e-3), ("W", 1.0)];

/// Parses a token of the given kind into its SI base unit.
pub fn parse(token: &str, kind: UnitKind) -> Result<f64, UnitError> {
    let token = token.trim();
    if token.is_empty() {
        return Err(UnitError::Empty);
    }
    let table: &[(&str, f64)] = match kind {
        UnitKind::Time => TIME,
        UnitKind::Frequency => FREQUENCY,
        UnitKind::Angle => ANGLE,
        UnitKind::Power => POWER,
        UnitKind::Bare => &[],
    };
    for &(suffix, scale) in table {
        if let Some(mantissa) = token.strip_suffix(suffix) {
            let value: f64 = mantissa
                .trim()
                .parse()
                .map_err(|_| UnitError::BadNumber(token.to_string()))?;
            return Ok(value * scale);
        }
    }
    token
        .parse()
        .map_err(|_| UnitError::BadNumber(token.to_string()))
}

pub fn parse_time(token: &str) -> Result<f64, UnitError> {
    parse(token, UnitKind::Time)
}

pub fn parse_frequency(token: &str) -> Result<f64, UnitError> {
    parse(token, UnitKind::Frequency)
}

pub fn parse_angle(token: &str) -> Result<f64, UnitError> {
    parse(token, UnitKind::Angle)
}

pub fn parse_power(token: &str) -> Result<f64, UnitError> {
    parse(token, UnitKind::Power)
}

pub fn parse_bare(token: &str) -> Result<f64, UnitError> {
    parse(token, UnitKind::Bare)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn suffixes() {
        close(parse_time("500ns").unwrap(), 5e-7);
        close(parse_time("4.94us").unwrap(), 4.94e-6);
        close(parse_time("2ms").unwrap(), 2e-3);
        assert_eq!(parse_time("1.5e-6s").unwrap(), 1.5e-6);
        assert_eq!(parse_frequency("125kHz").unwrap(), 125e3);
        close(parse_frequency("-20.9MHz").unwrap(), -20.9e6);
        close(parse_frequency("4.7GHz").unwrap(), 4.7e9);
        close(parse_power("13mW").unwrap(), 0.013);
        assert!((parse_angle("20deg").unwrap() - PI / 9.0).abs() < 1e-15);
    }

    #[test]
    fn bare_number_is_base_unit() {
        assert_eq!(parse_time("2.5e-6").unwrap(), 2.5e-6);
        assert_eq!(parse_frequency("340").unwrap(), 340.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_time("bogus").is_err());
        assert!(parse_time("").is_err());
        assert!(parse_frequency("12qHz").is_err());
    }
}

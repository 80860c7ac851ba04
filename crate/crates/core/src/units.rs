//! Unit-tagged quantities as they appear in catalogs, configs and CLI flags.
//!
//! A quantity is written as a number followed by an optional unit, with or
//! without a space: `0.51099895 MeV`, `1um`, `1.44 Å`, `108 amu`. A bare
//! number is taken to be in SI base units. Everything is converted to SI on
//! parse.

use crate::constants::{AMU, ANGSTROM, BOHR_MAGNETON, ELEMENTARY_CHARGE, FERMI, MEV_PER_C2};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    Mass,
    Length,
    Time,
    Energy,
    Speed,
    MagneticMoment,
    MagneticField,
    FieldGradient,
    Rate,
}

impl Dimension {
    fn scale(self, unit: &str) -> Option<f64> {
        use Dimension::*;
        let s = match (self, unit) {
            (_, "") => 1.0,
            (Mass, "kg") => 1.0,
            (Mass, "g") => 1e-3,
            (Mass, "mg") => 1e-6,
            (Mass, "amu" | "u" | "Da" | "au") => AMU,
            (Mass, "eV") => MEV_PER_C2 * 1e-6,
            (Mass, "keV") => MEV_PER_C2 * 1e-3,
            (Mass, "MeV") => MEV_PER_C2,
            (Mass, "GeV") => MEV_PER_C2 * 1e3,
            (Length, "m") => 1.0,
            (Length, "cm") => 1e-2,
            (Length, "mm") => 1e-3,
            (Length, "um" | "µm" | "μm" | "micron") => 1e-6,
            (Length, "nm") => 1e-9,
            (Length, "pm") => 1e-12,
            (Length, "Å" | "A" | "angstrom") => ANGSTROM,
            (Length, "fm") => FERMI,
            (Time, "s") => 1.0,
            (Time, "ms") => 1e-3,
            (Time, "us" | "µs" | "μs") => 1e-6,
            (Time, "ns") => 1e-9,
            (Time, "ps") => 1e-12,
            (Time, "fs") => 1e-15,
            (Time, "yr") => 365.25 * 86_400.0,
            (Energy, "J") => 1.0,
            (Energy, "meV") => ELEMENTARY_CHARGE * 1e-3,
            (Energy, "eV") => ELEMENTARY_CHARGE,
            (Energy, "keV") => ELEMENTARY_CHARGE * 1e3,
            (Energy, "MeV") => ELEMENTARY_CHARGE * 1e6,
            (Speed, "m/s") => 1.0,
            (Speed, "km/s") => 1e3,
            (MagneticMoment, "J/T") => 1.0,
            (MagneticMoment, "muB" | "μB" | "µB") => BOHR_MAGNETON,
            (MagneticField, "T") => 1.0,
            (MagneticField, "G" | "gauss") => 1e-4,
            (FieldGradient, "T/m") => 1.0,
            (FieldGradient, "T/cm") => 1e2,
            (Rate, "1/s" | "Hz") => 1.0,
            _ => return None,
        };
        Some(s)
    }
}

/// Parse `"<number> <unit>"` into an SI value of the given dimension.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let t = text.trim();
    let split = t
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E') && i > 0 && looks_like_exponent(&t[i..])))
        })
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .parse()
        .map_err(|_| Error::Parse(format!("`{text}`: expected a number, optionally followed by a unit")))?;
    let unit = unit.trim();
    let scale = dim
        .scale(unit)
        .ok_or_else(|| Error::Parse(format!("`{text}`: unknown {dim:?} unit `{unit}`")))?;
    Ok(value * scale)
}

fn looks_like_exponent(rest: &str) -> bool {
    let mut chars = rest.chars().skip(1);
    match chars.next() {
        Some(c) if c.is_ascii_digit() => true,
        Some('+' | '-') => matches!(chars.next(), Some(c) if c.is_ascii_digit()),
        _ => false,
    }
}

/// Parse an angle: radians (`0.785`), multiples of pi (`pi/4`, `3pi/4`, `pi`),
/// or degrees (`45deg`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().replace(' ', "");
    let bad = || Error::Parse(format!("`{text}`: expected an angle such as 0.5, pi/4 or 45deg"));
    if let Some(deg) = t.strip_suffix("deg") {
        return deg.parse::<f64>().map(f64::to_radians).map_err(|_| bad());
    }
    if let Some(pos) = t.find("pi").or_else(|| t.find('π')) {
        let plen = if t[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
        let coeff = match &t[..pos] {
            "" => 1.0,
            "-" => -1.0,
            c => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[pos + plen..];
        let div = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad()),
        };
        return Ok(coeff * std::f64::consts::PI / div);
    }
    t.parse::<f64>().map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    #[test]
    fn lengths() {
        assert!(close(parse_quantity("1um", Dimension::Length).unwrap(), 1e-6));
        assert!(close(parse_quantity("1.44 Å", Dimension::Length).unwrap(), 1.44e-10));
        assert!(close(parse_quantity("16 mm", Dimension::Length).unwrap(), 0.016));
        assert!(close(parse_quantity("0.84 fm", Dimension::Length).unwrap(), 0.84e-15));
        assert_eq!(parse_quantity("0", Dimension::Length).unwrap(), 0.0);
    }

    #[test]
    fn masses() {
        let e = parse_quantity("0.51099895 MeV", Dimension::Mass).unwrap();
        assert!((e / crate::constants::ELECTRON_MASS - 1.0).abs() < 1e-8);
        assert!(close(parse_quantity("108 amu", Dimension::Mass).unwrap(), 108.0 * AMU));
        assert!(close(parse_quantity("1 g", Dimension::Mass).unwrap(), 1e-3));
    }

    #[test]
    fn exponents_and_bare_numbers() {
        assert!(close(parse_quantity("1e-3 kg", Dimension::Mass).unwrap(), 1e-3));
        assert!(close(parse_quantity("2.5E+2m", Dimension::Length).unwrap(), 250.0));
        assert!(close(parse_quantity("3e8", Dimension::Speed).unwrap(), 3e8));
    }

    #[test]
    fn rejects_unknown_units() {
        assert!(parse_quantity("3 furlong", Dimension::Length).is_err());
        assert!(parse_quantity("3 kg", Dimension::Length).is_err());
        assert!(parse_quantity("abc", Dimension::Length).is_err());
    }

    #[test]
    fn angles() {
        use std::f64::consts::PI;
        assert!(close(parse_angle("pi/4").unwrap(), PI / 4.0));
        assert!(close(parse_angle("pi").unwrap(), PI));
        assert!(close(parse_angle("3pi/4").unwrap(), 0.75 * PI));
        assert!(close(parse_angle("90deg").unwrap(), PI / 2.0));
        assert!(close(parse_angle("0.5").unwrap(), 0.5));
        assert!(parse_angle("pie").is_err());
    }
}

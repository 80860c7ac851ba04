//! The quantum ratio `Q = R_q / L_0` and the quantum/classical criterion built on it.
//!
//! `R_q` is the spatial extent of a body's centre-of-mass wave function in a
//! given setting (packet spread, branch separation, grating height) and is
//! always supplied by the caller. `L_0` is the extent of the internal
//! bound-state wave function, zero for elementary particles, in which case
//! `Q` is infinite.
//!
//! [`quantum_ratio`] only needs field arithmetic and ordering, so it also runs
//! over exact rationals.

use std::fmt;

use num_traits::Num;
use serde::{Serialize, Serializer};

use crate::constants::FERMI;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// A nonnegative value on the extended real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Clone> Extended<T> {
    pub fn finite(&self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v.clone()),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

impl<T: PartialOrd> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Some(Less),
            (Extended::Infinite, Extended::Finite(_)) => Some(Greater),
            (Extended::Infinite, Extended::Infinite) => Some(Equal),
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => v.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Finite values serialize as numbers, the infinite value as the string `"inf"`.
impl<T: Serialize> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => v.serialize(s),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumRatio<T> {
    pub r_q: T,
    pub l_0: T,
    pub q: Extended<T>,
}

impl<T: Real> QuantumRatio<T> {
    pub fn log10(&self) -> Extended<T> {
        match self.q {
            Extended::Finite(q) => Extended::Finite(q.log10()),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

/// `Q = r_q / l_0`; `l_0 = 0` gives the infinite value.
pub fn quantum_ratio<T>(r_q: T, l_0: T) -> Result<QuantumRatio<T>>
where
    T: Num + PartialOrd + Clone + fmt::Debug,
{
    if !(r_q > T::zero()) {
        return Err(domain(format!("R_q must be positive, got {r_q:?}")));
    }
    if l_0 < T::zero() {
        return Err(domain(format!("L_0 must be nonnegative, got {l_0:?}")));
    }
    let q = if l_0.is_zero() {
        Extended::Infinite
    } else {
        Extended::Finite(r_q.clone() / l_0.clone())
    };
    Ok(QuantumRatio { r_q, l_0, q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Quantum,
    Classical,
    Borderline,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Quantum => "quantum",
            Regime::Classical => "classical",
            Regime::Borderline => "borderline",
        })
    }
}

/// Bounds of the three-way criterion: `Q >= hi` is quantum, `Q <= lo` classical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Thresholds<T> {
    pub hi: T,
    pub lo: T,
}

impl<T: Real> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            hi: T::lit(10.0),
            lo: T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification<T> {
    pub regime: Regime,
    pub threshold_hi: T,
    pub threshold_lo: T,
}

pub fn classify<T>(qr: &QuantumRatio<T>, thresholds: Thresholds<T>) -> Result<Classification<T>>
where
    T: PartialOrd + Clone + fmt::Debug,
{
    if thresholds.lo > thresholds.hi {
        return Err(Error::Config(format!(
            "inverted thresholds: lo = {:?} > hi = {:?}",
            thresholds.lo, thresholds.hi
        )));
    }
    let regime = match &qr.q {
        Extended::Infinite => Regime::Quantum,
        Extended::Finite(q) if *q >= thresholds.hi => Regime::Quantum,
        Extended::Finite(q) if *q <= thresholds.lo => Regime::Classical,
        Extended::Finite(_) => Regime::Borderline,
    };
    Ok(Classification {
        regime,
        threshold_hi: thresholds.hi,
        threshold_lo: thresholds.lo,
    })
}

/// Nuclear radius estimate `A^(1/3)` fm for mass number `A`.
pub fn nucleus_size<T: Real>(mass_number: u32) -> Result<T> {
    if mass_number < 1 {
        return Err(domain("mass number must be at least 1"));
    }
    Ok(T::lit(f64::from(mass_number)).cbrt() * T::lit(FERMI))
}

/// `h / (m v)`.
pub fn de_broglie_wavelength<T: Real>(mass: T, speed: T) -> Result<T> {
    if !(mass > T::zero()) || !(speed > T::zero()) {
        return Err(domain(format!(
            "de Broglie wavelength needs positive mass and speed, got m = {mass}, v = {speed}"
        )));
    }
    Ok(T::lit(crate::constants::PLANCK) / (mass * speed))
}

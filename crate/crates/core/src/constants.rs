//! CODATA 2018 constants in SI units.

use crate::scalar::Real;

/// Planck constant (J s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Unified atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Bohr magneton (J/T).
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// 1 MeV/c^2 expressed in kg.
pub const MEV_PER_C2: f64 = 1.0e6 * ELEMENTARY_CHARGE / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
/// Boltzmann constant (J/K), exact.
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const FERMI: f64 = 1e-15;
pub const ANGSTROM: f64 = 1e-10;

/// The constants used by the simulations, converted to the working scalar type.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub h: T,
    pub electron_mass: T,
    pub amu: T,
    pub bohr_magneton: T,
    pub c: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn si() -> Self {
        Self {
            hbar: T::lit(HBAR),
            h: T::lit(PLANCK),
            electron_mass: T::lit(ELECTRON_MASS),
            amu: T::lit(AMU),
            bohr_magneton: T::lit(BOHR_MAGNETON),
            c: T::lit(SPEED_OF_LIGHT),
        }
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::si()
    }
}

//! Two-branch reduced density matrices and environment-induced decoherence.
//!
//! A body split into two spatial branches centred at `r1`, `r2` is described
//! by the weights `w1`, `w2` and one off-diagonal element. Scattering of
//! environment particles with wavelength `lambda` at rate `Lambda` damps that
//! element; by default as `exp(-Lambda t min(1, (|r1 - r2|/lambda)^2))`, so
//! branches closer than `lambda` decohere slowly and well separated ones at
//! the full rate. Populations never change: a decohered beam gives the same
//! Stern-Gerlach spots as a coherent one, only interference tells them apart.

use num_complex::Complex;
use serde::Serialize;

use crate::constants::{AMU, BOLTZMANN, PLANCK};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::sterngerlach::{band_intensities, DensityMatrix2, SpinHalfState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchDensity<T> {
    pub w1: T,
    pub w2: T,
    pub off_diagonal: Complex<T>,
    /// m
    pub r1: T,
    /// m
    pub r2: T,
    /// Width `a` of each branch (m).
    pub width: T,
}

impl<T: Real> BranchDensity<T> {
    pub fn new(w1: T, w2: T, off_diagonal: Complex<T>, r1: T, r2: T, width: T) -> Result<Self> {
        let tol = T::epsilon() * T::lit(1e4);
        if !(w1 >= T::zero() && w2 >= T::zero()) || (w1 + w2 - T::one()).abs() > tol {
            return Err(domain(format!(
                "branch weights must be nonnegative and sum to 1, got {w1}, {w2}"
            )));
        }
        if off_diagonal.norm() > (w1 * w2).sqrt() * (T::one() + tol) + tol {
            return Err(domain("|off-diagonal| exceeds sqrt(w1 w2)"));
        }
        if !(width >= T::zero()) {
            return Err(domain("branch width must be nonnegative"));
        }
        Ok(Self {
            w1,
            w2,
            off_diagonal,
            r1,
            r2,
            width,
        })
    }

    /// Pure superposition `c1 |1> + c2 |2>`.
    pub fn pure(c1: Complex<T>, c2: Complex<T>, r1: T, r2: T, width: T) -> Result<Self> {
        Self::new(c1.norm_sqr(), c2.norm_sqr(), c1 * c2.conj(), r1, r2, width)
    }

    /// Spin state mapped onto the two Stern-Gerlach branches.
    pub fn from_spin(s: &SpinHalfState<T>, r1: T, r2: T, width: T) -> Result<Self> {
        let (c1, c2) = s.coefficients();
        Self::pure(c1, c2, r1, r2, width)
    }

    pub fn separation(&self) -> T {
        (self.r1 - self.r2).abs()
    }

    /// `Tr rho^2 = w1^2 + w2^2 + 2 |off|^2`.
    pub fn purity(&self) -> T {
        self.w1 * self.w1 + self.w2 * self.w2 + T::lit(2.0) * self.off_diagonal.norm_sqr()
    }

    /// `gamma = |off| / sqrt(w1 w2)`; zero when a branch is empty.
    pub fn coherence(&self) -> T {
        let p = (self.w1 * self.w2).sqrt();
        if p > T::zero() {
            (self.off_diagonal.norm() / p).min(T::one())
        } else {
            T::zero()
        }
    }

    /// Same populations, coherence set to `gamma` times its pure-state maximum
    /// with the phase kept.
    pub fn with_coherence(&self, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(domain(format!("coherence factor must lie in [0, 1], got {gamma}")));
        }
        let max = (self.w1 * self.w2).sqrt();
        let phase = if self.off_diagonal.norm() > T::zero() {
            self.off_diagonal / self.off_diagonal.norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        Ok(Self {
            off_diagonal: phase * (max * gamma),
            ..*self
        })
    }

    pub fn to_spin_density(&self) -> DensityMatrix2<T> {
        DensityMatrix2 {
            rho: [
                [Complex::new(self.w1, T::zero()), self.off_diagonal],
                [self.off_diagonal.conj(), Complex::new(self.w2, T::zero())],
            ],
        }
    }

    /// Normalized two-path intensity `1 + gamma cos(phi + arg rho_12)`.
    pub fn two_path_intensity(&self, phi: T) -> T {
        T::one() + self.coherence() * (phi + self.off_diagonal.arg()).cos()
    }

    /// `(I_max - I_min)/(I_max + I_min)` of the two-path intensity, which
    /// is `gamma` itself; returned in closed form so the equality is exact.
    pub fn fringe_visibility(&self) -> T {
        self.coherence()
    }
}

/// Scattering environment: rate `Lambda` and wavelength `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct EnvironmentSpec<T> {
    /// 1/s
    pub rate_lambda: T,
    /// m
    pub env_wavelength: T,
    pub label: String,
}

impl<T: Real> EnvironmentSpec<T> {
    pub fn new(rate_lambda: T, env_wavelength: T, label: impl Into<String>) -> Result<Self> {
        if !(rate_lambda > T::zero() && env_wavelength > T::zero()) {
            return Err(domain("decoherence rate and environment wavelength must be positive"));
        }
        Ok(Self {
            rate_lambda,
            env_wavelength,
            label: label.into(),
        })
    }

    /// Electron in air at 300 K and 1 atm: coherence lost in 1e-13 s. The
    /// wavelength is the thermal de Broglie wavelength of N2 at 300 K.
    pub fn air_300k_electron() -> Self {
        let lambda = thermal_wavelength(28.0 * AMU, 300.0);
        Self::new(T::lit(1e13), T::lit(lambda), "300K air, 1 atm, electron").expect("preset is valid")
    }
}

/// `h / sqrt(2 pi m k_B T)`.
pub fn thermal_wavelength(mass: f64, temperature: f64) -> f64 {
    PLANCK / (2.0 * std::f64::consts::PI * mass * BOLTZMANN * temperature).sqrt()
}

/// How the off-diagonal decay rate depends on the branch separation.
pub trait DecayLaw<T: Real> {
    fn rate(&self, env: &EnvironmentSpec<T>, separation: T) -> T;
}

/// `Lambda min(1, (separation/lambda)^2)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Interpolating;

impl<T: Real> DecayLaw<T> for Interpolating {
    fn rate(&self, env: &EnvironmentSpec<T>, separation: T) -> T {
        let x = separation / env.env_wavelength;
        env.rate_lambda * (x * x).min(T::one())
    }
}

/// Full rate once the branches are at least `lambda` apart, none before.
#[derive(Clone, Copy, Debug, Default)]
pub struct Threshold;

impl<T: Real> DecayLaw<T> for Threshold {
    fn rate(&self, env: &EnvironmentSpec<T>, separation: T) -> T {
        if separation >= env.env_wavelength {
            env.rate_lambda
        } else {
            T::zero()
        }
    }
}

pub fn decohere<T: Real>(rho: &BranchDensity<T>, env: &EnvironmentSpec<T>, t: T) -> Result<BranchDensity<T>> {
    decohere_with(&Interpolating, rho, env, t)
}

pub fn decohere_with<T: Real>(
    law: &dyn DecayLaw<T>,
    rho: &BranchDensity<T>,
    env: &EnvironmentSpec<T>,
    t: T,
) -> Result<BranchDensity<T>> {
    if !(t >= T::zero()) {
        return Err(domain(format!("decoherence time must be nonnegative, got {t}")));
    }
    let gamma = law.rate(env, rho.separation());
    Ok(BranchDensity {
        off_diagonal: rho.off_diagonal * (-gamma * t).exp(),
        ..*rho
    })
}

pub fn purity<T: Real>(rho: &BranchDensity<T>) -> T {
    rho.purity()
}

/// Stern-Gerlach spot intensities of the two-branch state; the off-diagonal
/// element plays no role.
pub fn sg_mixed_prediction<T: Real>(rho: &BranchDensity<T>) -> Result<(T, T)> {
    band_intensities(&rho.to_spin_density())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct TimescaleSet<T> {
    pub tau_dec: T,
    pub tau_trans: T,
    pub tau_diff: T,
    pub tau_diss: T,
}

impl<T: Real> TimescaleSet<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [self.tau_dec, self.tau_trans, self.tau_diff, self.tau_diss];
        if all.iter().all(|t| *t > T::zero()) {
            Ok(())
        } else {
            Err(domain("all timescales must be positive"))
        }
    }
}

/// One "much less than" inequality `lhs * strictness <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeCheck<T> {
    /// `cond1`, `cond2` or `cond3`.
    pub condition: &'static str,
    pub inequality: String,
    pub lhs: T,
    pub rhs: T,
    /// `rhs / lhs`; the check passes when the margin reaches the strictness.
    pub margin: T,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeReport<T> {
    pub strictness: T,
    pub checks: Vec<RegimeCheck<T>>,
    pub all_pass: bool,
}

/// Check the timescale and length hierarchy under which a split body is a
/// mixture of two well-defined branches.
pub fn validate_regime<T: Real>(
    ts: &TimescaleSet<T>,
    a: T,
    lambda_env: T,
    separation: T,
    strictness: T,
) -> Result<RegimeReport<T>> {
    if !(strictness > T::one()) {
        return Err(Error::Config(format!("strictness must exceed 1, got {strictness}")));
    }
    ts.validate()?;
    if !(a > T::zero() && lambda_env > T::zero() && separation > T::zero()) {
        return Err(domain("width, environment wavelength and separation must be positive"));
    }
    let check = |condition, inequality: &str, lhs: T, rhs: T, fail_note: Option<&str>| {
        let pass = lhs * strictness <= rhs;
        RegimeCheck {
            condition,
            inequality: inequality.to_string(),
            lhs,
            rhs,
            margin: rhs / lhs,
            pass,
            note: if pass { None } else { fail_note.map(str::to_string) },
        }
    };
    let checks = vec![
        check("cond1", "tau_dec << tau_trans", ts.tau_dec, ts.tau_trans, None),
        check("cond1", "tau_trans << tau_diff", ts.tau_trans, ts.tau_diff, None),
        check(
            "cond1",
            "tau_trans << tau_diss",
            ts.tau_trans,
            ts.tau_diss,
            Some("dissipation faster than transit: totally random motion"),
        ),
        check("cond2", "a << |r1 - r2|", a, separation, None),
        check("cond3", "a << lambda", a, lambda_env, None),
        check("cond3", "lambda << |r1 - r2|", lambda_env, separation, None),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(RegimeReport {
        strictness,
        checks,
        all_pass,
    })
}

/// Hot C70 decoheres by its own thermal emission until the coherent range is
/// about one grating period: `R_q = d`. The value is good to an order of
/// magnitude only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HotC70<T> {
    pub r_q: T,
    /// Decades of uncertainty in `R_q`.
    pub tolerance_decades: T,
}

impl<T: Real> HotC70<T> {
    pub fn new(grating_period: T) -> Self {
        Self {
            r_q: grating_period,
            tolerance_decades: T::lit(0.5),
        }
    }
}

//! Gaussian wave-packet dynamics.
//!
//! The packet is the normalized Gaussian
//!
//! ```text
//! psi(z) ∝ exp{ -(1/(4G) - i sigma) (z - zbar)^2 + i pbar (z - zbar) / hbar }
//! ```
//!
//! with complex width parameter `G` and complex chirp `sigma`. Only the
//! combination `A = 1/(4G) - i sigma` is observable; its real part fixes the
//! position variance `1/(4 Re A)`. The parameters obey
//!
//! ```text
//! dzbar/dt = pbar/m        dpbar/dt = ±mu dB_z/dz(zbar)
//! dG/dt = (4 hbar/m) sigma G      dsigma/dt = -(2 hbar/m) sigma^2 + hbar/(8 m G^2)
//! ```
//!
//! which in a linear field have a closed-form solution. Two constructors cover
//! the two usual parametrisations of an unchirped packet: [`GaussianPacket::from_std_dev`]
//! (real `G0 = 2 s^2`, `sigma0 = i/(4 G0)`, for which `G(t) = G0 + i hbar t/m`) and
//! [`GaussianPacket::from_variance`] (real `G0 = s^2`, `sigma0 = 0`).

use num_complex::Complex;
use serde::Serialize;

use crate::constants::HBAR;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianPacket<T> {
    /// Mean position (m).
    pub center: T,
    /// Mean momentum (kg m/s).
    pub mean_momentum: T,
    /// Complex width parameter `G` (m^2).
    pub width_g: Complex<T>,
    /// Complex chirp `sigma` (1/m^2).
    pub phase_sigma: Complex<T>,
    /// kg
    pub mass: T,
}

impl<T: Real> GaussianPacket<T> {
    pub fn new(center: T, mean_momentum: T, width_g: Complex<T>, phase_sigma: Complex<T>, mass: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(domain(format!("packet mass must be positive, got {mass}")));
        }
        let p = Self {
            center,
            mean_momentum,
            width_g,
            phase_sigma,
            mass,
        };
        if !p.is_normalizable() {
            return Err(domain("Re(1/(4G) - i sigma) must be positive"));
        }
        Ok(p)
    }

    /// Unchirped packet with position standard deviation `std_dev`, in the
    /// parametrisation `G0 = 2 std_dev^2`, `sigma0 = i/(4 G0)`.
    pub fn from_std_dev(center: T, mean_momentum: T, std_dev: T, mass: T) -> Result<Self> {
        if !(std_dev > T::zero()) {
            return Err(domain(format!("packet width must be positive, got {std_dev}")));
        }
        let g0 = T::lit(2.0) * std_dev * std_dev;
        Self::from_width_parameter(center, mean_momentum, g0, mass)
    }

    /// Packet with real initial width parameter `g0` and `sigma0 = i/(4 g0)`.
    pub fn from_width_parameter(center: T, mean_momentum: T, g0: T, mass: T) -> Result<Self> {
        if !(g0 > T::zero()) {
            return Err(domain(format!("width parameter must be positive, got {g0}")));
        }
        let g = Complex::new(g0, T::zero());
        let sigma = Complex::new(T::zero(), T::lit(0.25) / g0);
        Self::new(center, mean_momentum, g, sigma, mass)
    }

    /// Unchirped packet with position variance `variance`, as real `G0 = variance`, `sigma0 = 0`.
    pub fn from_variance(center: T, mean_momentum: T, variance: T, mass: T) -> Result<Self> {
        if !(variance > T::zero()) {
            return Err(domain(format!("variance must be positive, got {variance}")));
        }
        Self::new(
            center,
            mean_momentum,
            Complex::new(variance, T::zero()),
            Complex::new(T::zero(), T::zero()),
            mass,
        )
    }

    /// `A = 1/(4G) - i sigma`, the coefficient of `(z - zbar)^2` in the exponent.
    pub fn exponent(&self) -> Complex<T> {
        let quarter = T::lit(0.25);
        self.width_g.inv() * quarter - Complex::<T>::i() * self.phase_sigma
    }

    pub fn is_normalizable(&self) -> bool {
        let a = self.exponent();
        a.re > T::zero() && a.re.is_finite() && a.im.is_finite()
    }

    pub fn variance(&self) -> T {
        T::one() / (T::lit(4.0) * self.exponent().re)
    }

    pub fn std_dev(&self) -> T {
        self.variance().sqrt()
    }

    /// Full width `2 std_dev`, the packet "size".
    pub fn size(&self) -> T {
        T::lit(2.0) * self.std_dev()
    }

    pub fn velocity(&self) -> T {
        self.mean_momentum / self.mass
    }

    /// Normalized wave function value at `z`.
    pub fn amplitude(&self, z: T) -> Complex<T> {
        let a = self.exponent();
        let hbar = T::lit(HBAR);
        let dz = z - self.center;
        let norm = (T::lit(2.0) * a.re / T::PI()).powf(T::lit(0.25));
        let arg = -a * dz * dz + Complex::new(T::zero(), self.mean_momentum * dz / hbar);
        arg.exp() * norm
    }
}

/// Width parameters after free evolution for time `t`.
fn evolve_width<T: Real>(g0: Complex<T>, sigma0: Complex<T>, mass: T, t: T) -> (Complex<T>, Complex<T>) {
    let hbar_m = T::lit(HBAR) / mass;
    let two = T::lit(2.0);
    let u = Complex::new(T::one(), T::zero()) + sigma0 * (two * hbar_m * t);
    let v = Complex::new(hbar_m * t / two, T::zero()) / g0;
    let g = g0 * (u * u + v * v);
    // dG/dt = (4 hbar/m) sigma G
    let gdot = g0 * (u * sigma0 * (T::lit(4.0) * hbar_m) + v * v * (two / t.max(T::min_positive_value())));
    let sigma = if t == T::zero() {
        sigma0
    } else {
        gdot / (g * (T::lit(4.0) * hbar_m))
    };
    (g, sigma)
}

/// Free evolution over time `t >= 0`.
pub fn free_evolve<T: Real>(p: &GaussianPacket<T>, t: T) -> Result<GaussianPacket<T>> {
    if t < T::zero() {
        return Err(domain(format!("evolution time must be nonnegative, got {t}")));
    }
    let (g, sigma) = evolve_width(p.width_g, p.phase_sigma, p.mass, t);
    Ok(GaussianPacket {
        center: p.center + p.mean_momentum * t / p.mass,
        width_g: g,
        phase_sigma: sigma,
        ..*p
    })
}

/// Time for a free packet of full size `initial_size` (= 2 standard deviations)
/// to double its size: `t = 2 sqrt(3) m s0^2 / hbar` with `s0 = initial_size/2`.
pub fn doubling_time<T: Real>(mass: T, initial_size: T) -> Result<T> {
    if !(mass > T::zero()) || !(initial_size > T::zero()) {
        return Err(domain(format!(
            "doubling time needs positive mass and size, got m = {mass}, size = {initial_size}"
        )));
    }
    let s0 = initial_size / T::lit(2.0);
    Ok(T::lit(2.0 * 3f64.sqrt()) * (mass / T::lit(HBAR)) * s0 * s0)
}

/// Harmonic-oscillator coherent state `x0 = A cos(phi)`, `p0 = m omega A sin(phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoherentState<T> {
    pub amplitude: T,
    pub phase: T,
    pub omega: T,
    pub mass: T,
}

impl<T: Real> CoherentState<T> {
    pub fn new(amplitude: T, phase: T, omega: T, mass: T) -> Result<Self> {
        if !(omega > T::zero()) || !(mass > T::zero()) {
            return Err(domain("coherent state needs positive omega and mass"));
        }
        Ok(Self {
            amplitude,
            phase,
            omega,
            mass,
        })
    }

    /// Position variance `hbar / (2 m omega)`.
    pub fn width(&self) -> T {
        T::lit(HBAR) / (T::lit(2.0) * self.mass * self.omega)
    }
}

/// Centre, mean momentum and variance of the coherent state at time `t`.
pub fn coherent_evolve<T: Real>(s: &CoherentState<T>, t: T) -> (T, T, T) {
    let arg = s.phase + s.omega * t;
    (
        s.amplitude * arg.cos(),
        s.mass * s.omega * s.amplitude * arg.sin(),
        s.width(),
    )
}

/// Switch the oscillator off at `t0`: the result is a free packet with the
/// coherent state's centre, momentum and variance at that instant.
pub fn quench<T: Real>(s: &CoherentState<T>, t0: T) -> GaussianPacket<T> {
    let (x0, p0, d) = coherent_evolve(s, t0);
    GaussianPacket::from_variance(x0, p0, d, s.mass).expect("coherent state width is positive")
}

/// Spin branch of a Stern-Gerlach split. `Up` is deflected toward `+z` when
/// the field gradient is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpinBranch {
    Up,
    Down,
}

impl SpinBranch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            SpinBranch::Up => T::one(),
            SpinBranch::Down => -T::one(),
        }
    }
}

/// Stern-Gerlach magnet: `B_z = B0 + b0 z` over a region of given length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct SGFieldSpec<T> {
    /// `b0`, T/m
    pub b0_gradient: T,
    /// `B0`, T
    pub b0_bias: T,
    /// Magnetic moment coupling to the gradient, J/T.
    pub mu: T,
    /// m
    pub region_length: T,
    /// m/s
    pub beam_speed: T,
    /// Largest |y| the beam explores, used by the validity check (m).
    pub transverse_extent: T,
    /// How much larger |B0| must be than |b0 y| ("much greater than").
    pub validity_factor: T,
}

impl<T: Real> SGFieldSpec<T> {
    pub fn transit_time(&self) -> T {
        self.region_length / self.beam_speed
    }

    pub fn force(&self) -> T {
        self.mu * self.b0_gradient
    }

    pub fn linear_field(&self) -> LinearField<T> {
        LinearField {
            bias: self.b0_bias,
            gradient: self.b0_gradient,
        }
    }

    /// `|B0| >= factor |b0 y|` over the transverse extent, plus positivity of
    /// the geometry.
    pub fn check_validity(&self) -> Result<()> {
        if !(self.region_length > T::zero()) || !(self.beam_speed > T::zero()) {
            return Err(Error::Config("region_length and beam_speed must be positive".into()));
        }
        let lhs = self.b0_bias.abs();
        let rhs = self.validity_factor * (self.b0_gradient * self.transverse_extent).abs();
        if lhs < rhs {
            return Err(Error::Regime(format!(
                "|B0| >> |b0 y| violated: |B0| = {lhs} T < {} x |b0 y| = {rhs} T",
                self.validity_factor
            )));
        }
        Ok(())
    }
}

/// Longitudinal profile `B_z(z)` of a Stern-Gerlach field.
pub trait FieldProfile<T: Real>: Sync {
    fn b_z(&self, z: T) -> T;

    /// `dB_z/dz`; central difference unless overridden.
    fn gradient(&self, z: T) -> T {
        let h = T::epsilon().cbrt() * z.abs().max(T::lit(1e-3));
        (self.b_z(z + h) - self.b_z(z - h)) / (h + h)
    }
}

impl<T: Real, F: Fn(T) -> T + Sync> FieldProfile<T> for F {
    fn b_z(&self, z: T) -> T {
        self(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearField<T> {
    pub bias: T,
    pub gradient: T,
}

impl<T: Real> FieldProfile<T> for LinearField<T> {
    fn b_z(&self, z: T) -> T {
        self.bias + self.gradient * z
    }

    fn gradient(&self, _z: T) -> T {
        self.gradient
    }
}

/// Closed-form branch evolution in the linear field for time `t`.
pub fn sg_closed_form<T: Real>(
    p: &GaussianPacket<T>,
    branch: SpinBranch,
    field: &SGFieldSpec<T>,
    t: T,
) -> GaussianPacket<T> {
    let f = branch.sign::<T>() * field.force();
    let (g, sigma) = evolve_width(p.width_g, p.phase_sigma, p.mass, t);
    GaussianPacket {
        center: p.center + (p.mean_momentum * t + T::lit(0.5) * f * t * t) / p.mass,
        mean_momentum: p.mean_momentum + f * t,
        width_g: g,
        phase_sigma: sigma,
        mass: p.mass,
    }
}

#[derive(Clone, Copy, Debug)]
struct OdeState<T> {
    z: T,
    p: T,
    g: Complex<T>,
    s: Complex<T>,
}

impl<T: Real> OdeState<T> {
    fn axpy(&self, h: T, d: &OdeState<T>) -> OdeState<T> {
        OdeState {
            z: self.z + d.z * h,
            p: self.p + d.p * h,
            g: self.g + d.g * h,
            s: self.s + d.s * h,
        }
    }

    fn is_finite(&self) -> bool {
        self.z.is_finite()
            && self.p.is_finite()
            && self.g.re.is_finite()
            && self.g.im.is_finite()
            && self.s.re.is_finite()
            && self.s.im.is_finite()
    }
}

/// Fixed-step solution of the packet equations of motion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<GaussianPacket<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn last(&self) -> &GaussianPacket<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub const COLUMNS: [&'static str; 6] = ["t", "z_mean", "p_mean", "re_g", "im_g", "std_dev"];

    /// One row per step in [`Self::COLUMNS`] order.
    pub fn rows(&self) -> impl Iterator<Item = [T; 6]> + '_ {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| [t, s.center, s.mean_momentum, s.width_g.re, s.width_g.im, s.std_dev()])
    }
}

/// Upper bound on the number of RK4 steps of one integration.
pub const MAX_STEPS: usize = 100_000_000;

/// RK4 integration of the packet equations in an arbitrary field profile.
///
/// The centre feels `±mu dB_z/dz` at `zbar`; the width equations are the
/// field-independent ones, exact for linear and quadratic `B_z`. The step is
/// `t_end / n` with `n = ceil(t_end / dt)`.
pub fn sg_ode_integrate<T: Real>(
    p: &GaussianPacket<T>,
    branch: SpinBranch,
    mu: T,
    field: &dyn FieldProfile<T>,
    dt: T,
    t_end: T,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !(t_end >= T::zero()) {
        return Err(domain(format!(
            "need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let ratio = (t_end / dt).to_f64_lossy();
    if !ratio.is_finite() || ratio > MAX_STEPS as f64 {
        return Err(Error::Integration {
            time: 0.0,
            reason: format!("{ratio:e} steps exceeds the limit of {MAX_STEPS}"),
        });
    }
    let n = ((ratio - 1e-9).ceil() as usize).max(1);
    let h = t_end / T::from_usize_lossy(n);
    let m = p.mass;
    let hbar_m = T::lit(HBAR) / m;
    let force_sign = branch.sign::<T>() * mu;
    let four = T::lit(4.0);
    let rhs = |y: &OdeState<T>| OdeState {
        z: y.p / m,
        p: force_sign * field.gradient(y.z),
        g: y.s * y.g * (four * hbar_m),
        s: y.s * y.s * (-T::lit(2.0) * hbar_m) + (y.g * y.g).inv() * (hbar_m / T::lit(8.0)),
    };
    let mut y = OdeState {
        z: p.center,
        p: p.mean_momentum,
        g: p.width_g,
        s: p.phase_sigma,
    };
    let to_packet = |y: &OdeState<T>| GaussianPacket {
        center: y.z,
        mean_momentum: y.p,
        width_g: y.g,
        phase_sigma: y.s,
        mass: m,
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(T::zero());
    states.push(*p);
    let half = T::lit(0.5);
    let sixth = h / T::lit(6.0);
    for i in 0..n {
        let k1 = rhs(&y);
        let k2 = rhs(&y.axpy(h * half, &k1));
        let k3 = rhs(&y.axpy(h * half, &k2));
        let k4 = rhs(&y.axpy(h, &k3));
        y = OdeState {
            z: y.z + (k1.z + (k2.z + k3.z) * T::lit(2.0) + k4.z) * sixth,
            p: y.p + (k1.p + (k2.p + k3.p) * T::lit(2.0) + k4.p) * sixth,
            g: y.g + (k1.g + (k2.g + k3.g) * T::lit(2.0) + k4.g) * sixth,
            s: y.s + (k1.s + (k2.s + k3.s) * T::lit(2.0) + k4.s) * sixth,
        };
        let t = h * T::from_usize_lossy(i + 1);
        let packet = to_packet(&y);
        if !y.is_finite() || !packet.is_normalizable() {
            return Err(Error::Integration {
                time: t.to_f64_lossy(),
                reason: "state became non-finite or non-normalizable".into(),
            });
        }
        times.push(t);
        states.push(packet);
    }
    Ok(Trajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{AMU, BOHR_MAGNETON, ELECTRON_MASS};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn silver_field() -> SGFieldSpec<f64> {
        SGFieldSpec {
            b0_gradient: 800.0,
            b0_bias: 0.1,
            mu: BOHR_MAGNETON,
            region_length: 0.035,
            beam_speed: 500.0,
            transverse_extent: 1e-5,
            validity_factor: 10.0,
        }
    }

    #[test]
    fn free_evolve_zero_time_is_identity() {
        let p = GaussianPacket::from_std_dev(1e-6, 3e-27, 0.5e-6, ELECTRON_MASS).unwrap();
        assert_eq!(free_evolve(&p, 0.0).unwrap(), p);
        let q = GaussianPacket::from_variance(0.0, 0.0, 1e-12, ELECTRON_MASS).unwrap();
        assert_eq!(free_evolve(&q, 0.0).unwrap(), q);
        assert!(free_evolve(&p, -1.0).is_err());
    }

    #[test]
    fn free_evolve_matches_standard_spreading() {
        let s0 = 0.5e-6;
        let m = ELECTRON_MASS;
        let p = GaussianPacket::from_std_dev(0.0, 2e-28, s0, m).unwrap();
        let q = GaussianPacket::from_variance(0.0, 2e-28, s0 * s0, m).unwrap();
        for t in [1e-10, 1e-9, 7.5e-9, 1e-7] {
            let want = s0 * (1.0 + (HBAR * t / (2.0 * m * s0 * s0)).powi(2)).sqrt();
            let a = free_evolve(&p, t).unwrap();
            let b = free_evolve(&q, t).unwrap();
            assert!(rel(a.std_dev(), want) < 1e-12);
            assert!(rel(b.std_dev(), want) < 1e-12);
            assert!(rel(a.center, 2e-28 * t / m) < 1e-15);
            // G(t) = G0 + i hbar t / m in the closed-form parametrisation
            assert!(rel(a.width_g.re, 2.0 * s0 * s0) < 1e-12);
            assert!(rel(a.width_g.im, HBAR * t / m) < 1e-12);
        }
    }

    #[test]
    fn doubling_time_against_bisection_on_free_evolution() {
        // independent route: bisect on the evolved width
        let (m, size) = (1.6735e-27, 1e-6);
        let p = GaussianPacket::from_std_dev(0.0, 0.0, size / 2.0, m).unwrap();
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if free_evolve(&p, mid).unwrap().size() < 2.0 * size {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(rel(doubling_time(m, size).unwrap(), lo) < 1e-10);
    }

    #[test]
    fn doubling_time_table_orders_of_magnitude() {
        let rows = [(ELECTRON_MASS, 1e-8), (1.6735e-27, 1.6e-5), (1e-3, 1e19)];
        for (m, table) in rows {
            let t = doubling_time(m, 1e-6).unwrap();
            assert!(t / table < 3.0 && table / t < 3.0, "m = {m}: {t} vs {table}");
        }
        assert!(doubling_time(0.0, 1e-6).is_err());
        assert!(doubling_time(1.0, -1e-6).is_err());
    }

    #[test]
    fn doubling_time_scaling() {
        let base = doubling_time(2e-26, 1e-6).unwrap();
        assert!(rel(doubling_time(6e-26, 1e-6).unwrap(), 3.0 * base) < 1e-14);
        assert!(rel(doubling_time(2e-26, 4e-6).unwrap(), 16.0 * base) < 1e-14);
    }

    #[test]
    fn coherent_state_values() {
        let m = ELECTRON_MASS;
        let s = CoherentState::new(2e-6, 0.3, 1e6, m).unwrap();
        let (x0, p0, d) = coherent_evolve(&s, 0.0);
        assert_eq!(x0, 2e-6 * 0.3f64.cos());
        assert_eq!(p0, m * 1e6 * 2e-6 * 0.3f64.sin());
        assert!(rel(d, HBAR / (2.0 * m * 1e6)) < 1e-15);
        let period = 2.0 * std::f64::consts::PI / 1e6;
        let (x1, p1, d1) = coherent_evolve(&s, period);
        assert!((x1 - x0).abs() < 1e-15 * 2e-6 * 10.0);
        assert!((p1 - p0).abs() < 1e-14 * m * 1e6 * 2e-6);
        assert_eq!(d1, d);
        assert!(CoherentState::new(1.0, 0.0, 0.0, m).is_err());
    }

    #[test]
    fn quench_continuity_and_width() {
        let m = ELECTRON_MASS;
        let s = CoherentState::new(1e-6, 0.0, 2e5, m).unwrap();
        let p = quench(&s, 1.3e-5);
        let (x0, p0, d) = coherent_evolve(&s, 1.3e-5);
        let q = free_evolve(&p, 0.0).unwrap();
        assert_eq!((q.center, q.mean_momentum), (x0, p0));
        assert!(rel(p.variance(), d) < 1e-14);
    }

    #[test]
    fn closed_form_reduces_to_free_without_gradient() {
        let p = GaussianPacket::from_std_dev(0.0, 1e-24, 1e-5, 108.0 * AMU).unwrap();
        let mut f = silver_field();
        f.b0_gradient = 0.0;
        let t = f.transit_time();
        let a = sg_closed_form(&p, SpinBranch::Up, &f, t);
        let b = free_evolve(&p, t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_form_branch_separation() {
        let m = 108.0 * AMU;
        let p = GaussianPacket::from_std_dev(0.0, 0.0, 1e-5, m).unwrap();
        let f = silver_field();
        let t = f.transit_time();
        let up = sg_closed_form(&p, SpinBranch::Up, &f, t);
        let down = sg_closed_form(&p, SpinBranch::Down, &f, t);
        let sep = up.center - down.center;
        assert!(up.center > 0.0);
        assert!(rel(sep, f.force() * t * t / m) < 1e-12);
        assert!(rel(up.mean_momentum - down.mean_momentum, 2.0 * f.force() * t) < 1e-12);
    }

    #[test]
    fn width_follows_the_free_diffusion_law() {
        let m = 108.0 * AMU;
        let p = GaussianPacket::from_std_dev(0.0, 0.0, 1e-5, m).unwrap();
        let g0 = p.width_g;
        let f = silver_field();
        for k in 0..=20 {
            let t = f.transit_time() * 50.0 * k as f64 / 20.0;
            let q = sg_closed_form(&p, SpinBranch::Up, &f, t);
            let lhs = q.exponent();
            let rhs = (Complex::new(0.0, HBAR * t / m) + g0).inv() * 0.5;
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn trajectory_rows() {
        let p = GaussianPacket::from_std_dev(0.0, 0.0, 1e-6, ELECTRON_MASS).unwrap();
        let tr = sg_ode_integrate(
            &p,
            SpinBranch::Up,
            0.0,
            &LinearField {
                bias: 0.0,
                gradient: 0.0,
            },
            1e-9,
            1e-8,
        )
        .unwrap();
        let rows: Vec<_> = tr.rows().collect();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0], [0.0, 0.0, 0.0, p.width_g.re, p.width_g.im, 1e-6]);
    }

    #[test]
    fn validity_check_names_inequality() {
        let mut f = silver_field();
        assert!(f.check_validity().is_ok());
        f.b0_bias = 1e-4;
        match f.check_validity() {
            Err(Error::Regime(msg)) => assert!(msg.contains("|B0| >> |b0 y|")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rk4_linear_field_tracks_closed_form() {
        let m = 108.0 * AMU;
        let p = GaussianPacket::from_std_dev(0.0, 0.0, 1e-5, m).unwrap();
        let f = silver_field();
        let t = f.transit_time();
        let traj = sg_ode_integrate(&p, SpinBranch::Down, f.mu, &f.linear_field(), t / 1e4, t).unwrap();
        assert_eq!(traj.states.len(), 10_001);
        let end = traj.last();
        let cf = sg_closed_form(&p, SpinBranch::Down, &f, t);
        assert!(rel(end.center, cf.center) < 1e-8);
        assert!(rel(end.width_g.im, cf.width_g.im) < 1e-8);
    }

    #[test]
    fn rk4_is_fourth_order() {
        // a light packet over several spreading times exercises the width equations
        let m = ELECTRON_MASS;
        let p = GaussianPacket::from_variance(0.0, 0.0, 1e-14, m).unwrap();
        let t_end = 5.0 * m * 1e-14 / HBAR;
        let exact = free_evolve(&p, t_end).unwrap();
        let err = |n: f64| {
            let tr = sg_ode_integrate(
                &p,
                SpinBranch::Up,
                0.0,
                &LinearField {
                    bias: 0.0,
                    gradient: 0.0,
                },
                t_end / n,
                t_end,
            )
            .unwrap();
            (tr.last().width_g - exact.width_g).norm() / exact.width_g.norm()
        };
        let (e1, e2) = (err(40.0), err(80.0));
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn ehrenfest_force_in_quadratic_field() {
        // B = B0 + b z + c z^2: <dB/dz> = dB/dz(zbar) exactly for a Gaussian
        let m = 108.0 * AMU;
        let (b, c) = (500.0, 4e6);
        let field = move |z: f64| 0.2 + b * z + c * z * z;
        let p = GaussianPacket::from_std_dev(1e-4, 0.0, 1e-5, m).unwrap();
        let t_end = 7e-5;
        let dt = t_end / 2000.0;
        let tr = sg_ode_integrate(&p, SpinBranch::Up, BOHR_MAGNETON, &field, dt, t_end).unwrap();
        for i in [100, 700, 1500] {
            let pdot = (tr.states[i + 1].mean_momentum - tr.states[i - 1].mean_momentum) / (2.0 * dt);
            let want = BOHR_MAGNETON * (b + 2.0 * c * tr.states[i].center);
            assert!(rel(pdot, want) < 1e-6, "{pdot} vs {want}");
        }
    }

    #[test]
    fn integration_errors() {
        let p = GaussianPacket::from_std_dev(0.0, 0.0, 1e-6, ELECTRON_MASS).unwrap();
        let f = LinearField {
            bias: 0.0,
            gradient: 1.0,
        };
        assert!(matches!(
            sg_ode_integrate(&p, SpinBranch::Up, 1.0, &f, 1e-20, 1.0),
            Err(Error::Integration { .. })
        ));
        assert!(sg_ode_integrate(&p, SpinBranch::Up, 1.0, &f, 0.0, 1.0).is_err());
        let blowup = |z: f64| (1e3 * z).exp();
        let r = sg_ode_integrate(&p, SpinBranch::Up, 1e20, &blowup, 1e-3, 10.0);
        assert!(matches!(r, Err(Error::Integration { time, .. }) if time > 0.0));
    }

    #[test]
    fn amplitude_is_normalized() {
        let p = free_evolve(
            &GaussianPacket::from_std_dev(0.0, 1e-28, 1e-7, ELECTRON_MASS).unwrap(),
            3e-9,
        )
        .unwrap();
        let s = p.std_dev();
        let n = 4000;
        let h = 16.0 * s / n as f64;
        let norm: f64 = (0..=n)
            .map(|i| p.amplitude(p.center - 8.0 * s + i as f64 * h).norm_sqr() * h)
            .sum();
        assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn f32_packets_work() {
        let p = GaussianPacket::<f32>::from_std_dev(0.0, 0.0, 0.5e-6, 9.109e-31).unwrap();
        let q = free_evolve(&p, doubling_time(9.109e-31f32, 1e-6).unwrap()).unwrap();
        assert!((q.size() / 2e-6 - 1.0).abs() < 1e-4);
    }
}

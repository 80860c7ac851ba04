//! One-dimensional barrier transmission.
//!
//! Two routes: the semiclassical `exp(-2 \int kappa dz)` over the forbidden
//! region (no prefactor), and an exact transfer matrix for piecewise-constant
//! barriers. The exact route carries a running log-scale so opaque barriers
//! never overflow; `ln_transmission` stays finite when `transmission` itself
//! underflows to zero.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::decoherence::BranchDensity;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub z_start: T,
    pub z_end: T,
    /// J
    pub height: T,
}

impl<T: Real> Segment<T> {
    pub fn width(&self) -> T {
        self.z_end - self.z_start
    }
}

/// Barrier with finite support; `V = 0` outside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierSpec<T> {
    Piecewise {
        segments: Vec<Segment<T>>,
    },
    /// Samples of a smooth `V(z)`, linearly interpolated between nodes.
    Sampled {
        z: Vec<T>,
        v: Vec<T>,
    },
}

impl<T: Real> BarrierSpec<T> {
    pub fn piecewise(segments: Vec<Segment<T>>) -> Result<Self> {
        let b = Self::Piecewise { segments };
        b.validate()?;
        Ok(b)
    }

    /// Height `v0` on `[0, width]`.
    pub fn rectangle(v0: T, width: T) -> Result<Self> {
        Self::piecewise(vec![Segment {
            z_start: T::zero(),
            z_end: width,
            height: v0,
        }])
    }

    pub fn sampled(z: Vec<T>, v: Vec<T>) -> Result<Self> {
        let b = Self::Sampled { z, v };
        b.validate()?;
        Ok(b)
    }

    /// Sample `f` at `n` evenly spaced points on `[-a, a]`.
    pub fn from_fn(f: impl Fn(T) -> T, a: T, n: usize) -> Result<Self> {
        if n < 2 || !(a > T::zero()) {
            return Err(domain("need a > 0 and at least two samples"));
        }
        let h = T::lit(2.0) * a / T::from_usize_lossy(n - 1);
        let z: Vec<T> = (0..n).map(|i| -a + h * T::from_usize_lossy(i)).collect();
        let v = z.iter().map(|&x| f(x)).collect();
        Self::sampled(z, v)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Piecewise { segments } => {
                for s in segments {
                    if !(s.z_start.is_finite() && s.z_end.is_finite() && s.height.is_finite()) {
                        return Err(domain("barrier segments must be finite"));
                    }
                    if s.z_end < s.z_start {
                        return Err(domain("segment ends before it starts"));
                    }
                }
                if segments.windows(2).any(|w| w[1].z_start < w[0].z_end) {
                    return Err(domain("barrier segments must be ordered and non-overlapping"));
                }
            }
            Self::Sampled { z, v } => {
                if z.len() < 2 || z.len() != v.len() {
                    return Err(domain("sampled barrier needs matching z and V arrays of length >= 2"));
                }
                if z.iter().chain(v.iter()).any(|x| !x.is_finite()) {
                    return Err(domain("sampled barrier must be finite"));
                }
                if z.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(domain("sample positions must increase strictly"));
                }
            }
        }
        Ok(())
    }

    pub fn max_height(&self) -> T {
        let zero = T::zero();
        match self {
            Self::Piecewise { segments } => segments
                .iter()
                .filter(|s| s.width() > zero)
                .fold(zero, |m, s| m.max(s.height)),
            Self::Sampled { v, .. } => v.iter().fold(zero, |m, &x| m.max(x)),
        }
    }

    /// `(lo, hi)` of the support.
    pub fn support(&self) -> (T, T) {
        match self {
            Self::Piecewise { segments } => match (segments.first(), segments.last()) {
                (Some(a), Some(b)) => (a.z_start, b.z_end),
                _ => (T::zero(), T::zero()),
            },
            Self::Sampled { z, .. } => (z[0], z[z.len() - 1]),
        }
    }

    pub fn potential(&self, x: T) -> T {
        match self {
            Self::Piecewise { segments } => segments
                .iter()
                .find(|s| x >= s.z_start && x < s.z_end)
                .map_or(T::zero(), |s| s.height),
            Self::Sampled { z, v } => {
                if x < z[0] || x > z[z.len() - 1] {
                    return T::zero();
                }
                let i = z.partition_point(|&zi| zi <= x).clamp(1, z.len() - 1);
                let f = (x - z[i - 1]) / (z[i] - z[i - 1]);
                v[i - 1] + f * (v[i] - v[i - 1])
            }
        }
    }

    /// Piecewise-constant approximation. Sampled barriers are cut into `n`
    /// equal slabs valued at their midpoints; piecewise ones are returned as is.
    pub fn staircase(&self, n: usize) -> Result<Self> {
        match self {
            Self::Piecewise { .. } => Ok(self.clone()),
            Self::Sampled { .. } => {
                if n == 0 {
                    return Err(domain("staircase needs at least one segment"));
                }
                let (lo, hi) = self.support();
                let h = (hi - lo) / T::from_usize_lossy(n);
                let segments = (0..n)
                    .map(|i| {
                        let a = lo + h * T::from_usize_lossy(i);
                        let b = if i + 1 == n {
                            hi
                        } else {
                            lo + h * T::from_usize_lossy(i + 1)
                        };
                        Segment {
                            z_start: a,
                            z_end: b,
                            height: self.potential(a + h * T::lit(0.5)),
                        }
                    })
                    .collect();
                Self::piecewise(segments)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Wkb,
    TransferMatrix,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::Wkb => "WKB, no prefactor",
            Self::TransferMatrix => "exact transfer matrix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransmissionResult<T> {
    pub method: Method,
    pub label: &'static str,
    /// Exact route only.
    pub t_amplitude: Option<Complex<T>>,
    pub r_amplitude: Option<Complex<T>>,
    /// WKB route only: `exp(-\int kappa dz)`.
    pub t_magnitude: Option<T>,
    pub transmission: T,
    pub reflection: Option<T>,
    pub ln_transmission: T,
    /// `transmission` underflowed; use `ln_transmission`.
    pub log_only: bool,
}

impl<T: Real> TransmissionResult<T> {
    fn from_log(method: Method, ln_t: T) -> Self {
        let transmission = ln_t.exp();
        Self {
            method,
            label: method.label(),
            t_amplitude: None,
            r_amplitude: None,
            t_magnitude: None,
            transmission,
            reflection: None,
            ln_transmission: ln_t,
            log_only: !transmission.is_normal(),
        }
    }
}

/// `sqrt(2 m |dv|) / hbar`, ordered so SI magnitudes stay representable in f32.
fn wavenumber<T: Real>(m: T, dv: T) -> T {
    (T::lit(2.0) * m).sqrt() * dv.abs().sqrt() / T::lit(HBAR)
}

fn check_energy<T: Real>(e: T, m: T) -> Result<()> {
    if !(e > T::zero() && e.is_finite()) {
        return Err(domain(format!("energy must be positive, got {e}")));
    }
    if !(m > T::zero()) {
        return Err(domain(format!("mass must be positive, got {m}")));
    }
    Ok(())
}

/// Semiclassical transmission `exp(-2 \int kappa dz)` with no prefactor.
pub fn wkb_transmission<T: Real>(b: &BarrierSpec<T>, e: T, m: T) -> Result<TransmissionResult<T>> {
    check_energy(e, m)?;
    b.validate()?;
    let vmax = b.max_height();
    if e >= vmax {
        return Err(Error::AboveBarrier(format!(
            "E = {e} J is not below the barrier top {vmax} J; no forbidden region"
        )));
    }
    let action = match b {
        BarrierSpec::Piecewise { segments } => segments
            .iter()
            .filter(|s| s.height > e)
            .fold(T::zero(), |acc, s| acc + wavenumber(m, s.height - e) * s.width()),
        BarrierSpec::Sampled { z, .. } => {
            let (lo, hi) = b.support();
            let tol = (hi - lo) * T::lit(1e-6);
            let f = |x: T| b.potential(x);
            forbidden_intervals(&f, z, e, tol)
                .into_iter()
                .map(|(za, zb)| forbidden_action(&f, za, zb, e, m))
                .fold(T::zero(), |a, x| a + x)
        }
    };
    let mut r = TransmissionResult::from_log(Method::Wkb, -T::lit(2.0) * action);
    r.t_magnitude = Some((-action).exp());
    Ok(r)
}

/// Semiclassical exponent `\int kappa dz` for an arbitrary potential on
/// `[lo, hi]`; turning points are bracketed on an `n`-point grid, then bisected.
pub fn wkb_action_fn<T: Real>(v: &dyn Fn(T) -> T, lo: T, hi: T, n: usize, e: T, m: T) -> Result<T> {
    check_energy(e, m)?;
    if !(hi > lo) || n < 2 {
        return Err(domain("need hi > lo and at least two grid points"));
    }
    let h = (hi - lo) / T::from_usize_lossy(n - 1);
    let grid: Vec<T> = (0..n).map(|i| lo + h * T::from_usize_lossy(i)).collect();
    let intervals = forbidden_intervals(v, &grid, e, (hi - lo) * T::lit(1e-6));
    if intervals.is_empty() {
        return Err(Error::AboveBarrier(format!("E = {e} J clears the barrier everywhere")));
    }
    Ok(intervals
        .into_iter()
        .map(|(a, b)| forbidden_action(v, a, b, e, m))
        .fold(T::zero(), |s, x| s + x))
}

/// Maximal intervals where `v > e`, with edges found by bisection to `tol`.
fn forbidden_intervals<T: Real>(v: &dyn Fn(T) -> T, grid: &[T], e: T, tol: T) -> Vec<(T, T)> {
    let above = |x: T| v(x) > e;
    let bisect = |mut a: T, mut b: T| {
        // invariant: above(a) != above(b)
        let left_above = above(a);
        while (b - a).abs() > tol {
            let mid = (a + b) * T::lit(0.5);
            if above(mid) == left_above {
                a = mid;
            } else {
                b = mid;
            }
        }
        (a + b) * T::lit(0.5)
    };
    let mut out = Vec::new();
    let mut start = if above(grid[0]) { Some(grid[0]) } else { None };
    for w in grid.windows(2) {
        match (above(w[0]), above(w[1])) {
            (false, true) => start = Some(bisect(w[0], w[1])),
            (true, false) => {
                if let Some(s) = start.take() {
                    out.push((s, bisect(w[0], w[1])));
                }
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, grid[grid.len() - 1]));
    }
    out
}

/// `\int_a^b kappa dz` with `z = c - r cos(phi)`, which turns the square-root
/// zeros at the turning points into smooth `sin` factors.
fn forbidden_action<T: Real>(v: &dyn Fn(T) -> T, a: T, b: T, e: T, m: T) -> T {
    let c = (a + b) * T::lit(0.5);
    let r = (b - a) * T::lit(0.5);
    let g = |phi: T| {
        let z = c - r * phi.cos();
        let dv = v(z) - e;
        if dv > T::zero() {
            wavenumber(m, dv) * r * phi.sin()
        } else {
            T::zero()
        }
    };
    let pi = T::PI();
    let (fa, fm, fb) = (g(T::zero()), g(pi * T::lit(0.5)), g(pi));
    let whole = simpson(T::zero(), pi, fa, fm, fb);
    adaptive_simpson(
        &g,
        T::zero(),
        pi,
        fa,
        fm,
        fb,
        whole,
        T::lit(1e-12) * whole.abs().max(T::min_positive_value()),
        48,
    )
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, eps: T, depth: u32) -> T {
    let m = (a + b) * T::lit(0.5);
    let (lm, rm) = ((a + m) * T::lit(0.5), (m + b) * T::lit(0.5));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * eps {
        return left + right + delta / T::lit(15.0);
    }
    let half = eps * T::lit(0.5);
    adaptive_simpson(f, a, m, fa, flm, fm, left, half, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, half, depth - 1)
}

type Mat2<T> = [[Complex<T>; 2]; 2];

fn matmul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut c = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Exact transmission through a piecewise-constant barrier.
pub fn transfer_matrix_transmission<T: Real>(b: &BarrierSpec<T>, e: T, m: T) -> Result<TransmissionResult<T>> {
    check_energy(e, m)?;
    b.validate()?;
    let segments = match b {
        BarrierSpec::Piecewise { segments } => segments,
        BarrierSpec::Sampled { .. } => {
            return Err(domain(
                "the exact method needs a piecewise-constant barrier; staircase it first",
            ))
        }
    };
    // regions as (V, width), gaps filled with V = 0
    let mut regions: Vec<(T, T)> = Vec::with_capacity(2 * segments.len());
    let mut cursor: Option<T> = None;
    for s in segments.iter().filter(|s| s.width() > T::zero()) {
        if let Some(c) = cursor {
            if s.z_start > c {
                regions.push((T::zero(), s.z_start - c));
            }
        }
        regions.push((s.height, s.width()));
        cursor = Some(s.z_end);
    }
    regions.push((T::zero(), T::zero()));

    let nudge = e * T::lit(1e-10);
    let k_of = |v: T| {
        let mut dv = e - v;
        if dv.abs() < nudge {
            dv = nudge;
        }
        let k = wavenumber(m, dv);
        if dv > T::zero() {
            Complex::new(k, T::zero())
        } else {
            Complex::new(T::zero(), k)
        }
    };
    let half = T::lit(0.5);
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let mut mat: Mat2<T> = [[one, zero], [zero, one]];
    let mut log_scale = T::zero();
    let (mut k_prev, mut w_prev) = (k_of(T::zero()), T::zero());
    for &(v, w) in &regions {
        let k = k_of(v);
        let s = k_prev.im.abs() * w_prev;
        let ikw = Complex::new(T::zero(), T::one()) * k_prev * w_prev;
        let p: Mat2<T> = [[(ikw - s).exp(), zero], [zero, (-ikw - s).exp()]];
        let q = k_prev / k;
        let iface: Mat2<T> = [
            [(one + q) * half, (one - q) * half],
            [(one - q) * half, (one + q) * half],
        ];
        mat = matmul(&iface, &matmul(&p, &mat));
        let norm = mat.iter().flatten().fold(T::zero(), |a, c| a.max(c.norm()));
        mat.iter_mut().flatten().for_each(|c| *c /= norm);
        log_scale = log_scale + s + norm.ln();
        k_prev = k;
        w_prev = w;
    }
    let m22 = mat[1][1];
    let r = -mat[1][0] / m22;
    let t = (one / m22) * (-log_scale).exp();
    let ln_t = -T::lit(2.0) * (log_scale + m22.norm().ln());
    let mut out = TransmissionResult::from_log(Method::TransferMatrix, ln_t);
    out.t_amplitude = Some(t);
    out.r_amplitude = Some(r);
    out.reflection = Some(r.norm_sqr());
    Ok(out)
}

pub fn transmission<T: Real>(method: Method, b: &BarrierSpec<T>, e: T, m: T) -> Result<TransmissionResult<T>> {
    match method {
        Method::Wkb => wkb_transmission(b, e, m),
        Method::TransferMatrix => transfer_matrix_transmission(&b.staircase(400)?, e, m),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow<T> {
    pub energy: T,
    pub t_exact: T,
    pub r_exact: T,
    /// `None` above the barrier top.
    pub t_wkb: Option<T>,
    /// `ln T_wkb / ln T_exact`.
    pub ln_ratio: Option<T>,
}

/// Exact and semiclassical transmission over an energy list; sampled barriers
/// go through a 400-slab staircase for the exact column.
pub fn energy_scan<T: Real>(b: &BarrierSpec<T>, m: T, energies: &[T]) -> Result<Vec<ScanRow<T>>> {
    let stairs = b.staircase(400)?;
    energies
        .par_iter()
        .map(|&e| {
            let exact = transfer_matrix_transmission(&stairs, e, m)?;
            let wkb = match wkb_transmission(b, e, m) {
                Ok(w) => Some(w),
                Err(Error::AboveBarrier(_)) => None,
                Err(err) => return Err(err),
            };
            Ok(ScanRow {
                energy: e,
                t_exact: exact.transmission,
                r_exact: exact.reflection.unwrap_or(T::zero()),
                t_wkb: wkb.map(|w| w.transmission),
                ln_ratio: wkb.map(|w| w.ln_transmission / exact.ln_transmission),
            })
        })
        .collect()
}

/// Body split into two transverse branches, approaching the barrier along z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitTransverseSpec<T: Default> {
    pub c1: Complex<T>,
    pub c2: Complex<T>,
    pub r1: T,
    pub r2: T,
    pub gamma: T,
    #[serde(default)]
    pub width: T,
}

impl<T: Real + Default> SplitTransverseSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let n = self.c1.norm_sqr() + self.c2.norm_sqr();
        if (n - T::one()).abs() > T::epsilon() * T::lit(1e4) {
            return Err(domain(format!("|c1|^2 + |c2|^2 must be 1, got {n}")));
        }
        if !(self.gamma >= T::zero() && self.gamma <= T::one()) {
            return Err(domain(format!("gamma must lie in [0, 1], got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn incident(&self) -> Result<BranchDensity<T>> {
        self.validate()?;
        BranchDensity::pure(self.c1, self.c2, self.r1, self.r2, self.width)?.with_coherence(self.gamma)
    }
}

/// Longitudinal packet spread is negligible while the transit time stays
/// well below `2 m hbar / b^2`, `b` being the momentum spread.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransitCheck<T> {
    pub transit_time: T,
    pub spread_bound: T,
    pub ok: bool,
}

pub fn transit_check<T: Real>(b: &BarrierSpec<T>, m: T, speed: T, momentum_spread: T) -> Result<TransitCheck<T>> {
    if !(speed > T::zero() && momentum_spread > T::zero() && m > T::zero()) {
        return Err(domain("speed, momentum spread and mass must be positive"));
    }
    let (lo, hi) = b.support();
    let transit_time = (hi - lo) / speed;
    let spread_bound = T::lit(2.0) * m * T::lit(HBAR) / (momentum_spread * momentum_spread);
    Ok(TransitCheck {
        transit_time,
        spread_bound,
        ok: transit_time * T::lit(10.0) <= spread_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TunnelOutcome<T> {
    pub transmission: TransmissionResult<T>,
    /// Probability that the body got through.
    pub transmitted: T,
    /// Exact method only.
    pub reflected: Option<T>,
    pub incident_state: BranchDensity<T>,
    /// Transverse state of the transmitted part, normalized.
    pub transmitted_state: BranchDensity<T>,
    pub coherence: T,
    pub fringe_visibility: T,
}

/// The barrier acts on z only, so the transverse state passes through
/// unchanged whatever its coherence, and the transmitted fraction does not
/// depend on gamma.
pub fn tunnel_scenario<T: Real + Default>(
    split: &SplitTransverseSpec<T>,
    b: &BarrierSpec<T>,
    e: T,
    m: T,
    method: Method,
) -> Result<TunnelOutcome<T>> {
    let incident = split.incident()?;
    let tr = transmission(method, b, e, m)?;
    Ok(TunnelOutcome {
        transmitted: tr.transmission,
        reflected: tr.reflection,
        transmission: tr,
        incident_state: incident,
        transmitted_state: incident,
        coherence: incident.coherence(),
        fringe_visibility: incident.fringe_visibility(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE};

    const EV: f64 = ELEMENTARY_CHARGE;
    const M: f64 = ELECTRON_MASS;

    fn closed_form(v0: f64, w: f64, e: f64) -> f64 {
        let kappa = (2.0 * M * (v0 - e)).sqrt() / HBAR;
        let s = (kappa * w).sinh();
        1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (v0 - e)))
    }

    fn width_for(kw: f64, v0: f64, e: f64) -> f64 {
        kw / ((2.0 * M * (v0 - e)).sqrt() / HBAR)
    }

    #[test]
    fn rectangle_matches_closed_form() {
        for (e, v0, kw) in [
            (1.0, 2.0, 0.3),
            (1.0, 2.0, 3.0),
            (0.3, 5.0, 7.0),
            (4.9, 5.0, 1.0),
            (1.0, 2.0, 20.0),
        ] {
            let w = width_for(kw, v0 * EV, e * EV);
            let b = BarrierSpec::rectangle(v0 * EV, w).unwrap();
            let r = transfer_matrix_transmission(&b, e * EV, M).unwrap();
            let want = closed_form(v0 * EV, w, e * EV);
            assert!(
                (r.transmission / want - 1.0).abs() < 1e-10,
                "{e} {v0} {kw}: {} vs {want}",
                r.transmission
            );
            assert!((r.transmission + r.reflection.unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_barrier_is_a_pure_phase() {
        let b = BarrierSpec::piecewise(vec![]).unwrap();
        let r = transfer_matrix_transmission(&b, EV, M).unwrap();
        assert!((r.t_amplitude.unwrap().norm() - 1.0).abs() < 1e-14);
        assert!(r.reflection.unwrap() < 1e-28);
    }

    #[test]
    fn zero_width_segments_are_skipped() {
        let w = width_for(2.0, 2.0 * EV, EV);
        let plain = BarrierSpec::rectangle(2.0 * EV, w).unwrap();
        let padded = BarrierSpec::piecewise(vec![
            Segment {
                z_start: 0.0,
                z_end: 0.0,
                height: 9.0 * EV,
            },
            Segment {
                z_start: 0.0,
                z_end: w,
                height: 2.0 * EV,
            },
            Segment {
                z_start: w,
                z_end: w,
                height: 9.0 * EV,
            },
        ])
        .unwrap();
        let a = transfer_matrix_transmission(&plain, EV, M).unwrap();
        let b = transfer_matrix_transmission(&padded, EV, M).unwrap();
        assert!((a.transmission - b.transmission).abs() < 1e-14);
    }

    #[test]
    fn opaque_barrier_keeps_a_log() {
        let w = width_for(800.0, 2.0 * EV, EV);
        let b = BarrierSpec::rectangle(2.0 * EV, w).unwrap();
        let r = transfer_matrix_transmission(&b, EV, M).unwrap();
        assert!(r.log_only);
        // ln T -> -2 kappa w + ln(16 E (V0-E) / V0^2) = -1600 + ln 4
        assert!(
            (r.ln_transmission - (-1600.0 + 4f64.ln())).abs() < 1e-9,
            "{}",
            r.ln_transmission
        );
        assert!((r.reflection.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn above_barrier_resonances() {
        let v0 = EV;
        let w = 2e-9;
        for n in 1..4 {
            // k' w = n pi
            let kp = n as f64 * std::f64::consts::PI / w;
            let e = v0 + (HBAR * kp).powi(2) / (2.0 * M);
            let b = BarrierSpec::rectangle(v0, w).unwrap();
            let r = transfer_matrix_transmission(&b, e, M).unwrap();
            assert!((r.transmission - 1.0).abs() < 1e-10, "n = {n}: {}", r.transmission);
            let off = transfer_matrix_transmission(&b, e * 1.05, M).unwrap();
            assert!(off.transmission < 1.0 - 1e-6);
        }
    }

    #[test]
    fn energy_at_barrier_top_is_nudged() {
        let b = BarrierSpec::rectangle(EV, 1e-9).unwrap();
        let r = transfer_matrix_transmission(&b, EV, M).unwrap();
        assert!(r.transmission.is_finite() && r.transmission > 0.0);
        assert!((r.transmission + r.reflection.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn wkb_rectangle_examples() {
        let (e, v0) = (EV, 2.0 * EV);
        let w = width_for(10.0, v0, e);
        let b = BarrierSpec::rectangle(v0, w).unwrap();
        let wkb = wkb_transmission(&b, e, M).unwrap();
        assert!((wkb.ln_transmission + 20.0).abs() < 1e-12);
        assert_eq!(wkb.label, "WKB, no prefactor");
        let exact = transfer_matrix_transmission(&b, e, M).unwrap();
        assert!((wkb.ln_transmission / exact.ln_transmission - 1.0).abs() <= 0.1);
        assert!(matches!(wkb_transmission(&b, v0, M), Err(Error::AboveBarrier(_))));
        assert!(matches!(wkb_transmission(&b, 0.0, M), Err(Error::Domain(_))));
        let near = wkb_transmission(&b, v0 * (1.0 - 1e-12), M).unwrap();
        assert!(near.transmission > 0.999);
    }

    #[test]
    fn wkb_ladder_improves() {
        let (e, v0) = (EV, 2.0 * EV);
        let mut prev = f64::INFINITY;
        for (kw, expect) in [(3.0, 0.299), (5.0, 0.161), (10.0, 0.0745), (20.0, 0.036)] {
            let b = BarrierSpec::rectangle(v0, width_for(kw, v0, e)).unwrap();
            let ratio = wkb_transmission(&b, e, M).unwrap().ln_transmission
                / transfer_matrix_transmission(&b, e, M).unwrap().ln_transmission;
            let dev = (ratio - 1.0).abs();
            assert!((dev - expect).abs() < 1e-3, "kw = {kw}: {dev}");
            assert!(dev < prev);
            prev = dev;
        }
    }

    #[test]
    fn wkb_parabola_matches_closed_form() {
        // V = V0 (1 - z^2/a^2): \int kappa = pi sqrt(2 m V0) z_t^2 / (2 a hbar)
        let (v0, a, e) = (3.0 * EV, 2e-9, EV);
        let zt2 = a * a * (v0 - e) / v0;
        let want = std::f64::consts::PI * (2.0 * M * v0).sqrt() * zt2 / (2.0 * a * HBAR);
        let f = |z: f64| v0 * (1.0 - z * z / (a * a));
        let got = wkb_action_fn(&f, -a, a, 64, e, M).unwrap();
        assert!((got / want - 1.0).abs() < 1e-8, "{got} vs {want}");
        let b = BarrierSpec::from_fn(f, a, 4001).unwrap();
        let sampled = -0.5 * wkb_transmission(&b, e, M).unwrap().ln_transmission;
        assert!((sampled / want - 1.0).abs() < 1e-6, "{sampled} vs {want}");
    }

    #[test]
    fn double_barrier_wkb_adds_actions() {
        let (e, v0) = (EV, 2.0 * EV);
        let w = width_for(3.0, v0, e);
        let b = BarrierSpec::piecewise(vec![
            Segment {
                z_start: 0.0,
                z_end: w,
                height: v0,
            },
            Segment {
                z_start: 3.0 * w,
                z_end: 4.0 * w,
                height: v0,
            },
        ])
        .unwrap();
        assert!((wkb_transmission(&b, e, M).unwrap().ln_transmission + 12.0).abs() < 1e-12);
        let r = transfer_matrix_transmission(&b, e, M).unwrap();
        assert!((r.transmission + r.reflection.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn staircase_converges() {
        let (v0, a) = (2.0 * EV, 1e-9);
        let b = BarrierSpec::from_fn(|z: f64| v0 * (-(z / (0.4 * a)).powi(2)).exp(), a, 2001).unwrap();
        let t = |n| {
            transfer_matrix_transmission(&b.staircase(n).unwrap(), EV, M)
                .unwrap()
                .transmission
        };
        let (t200, t400, t800) = (t(200), t(400), t(800));
        assert!((t400 - t800).abs() < (t200 - t400).abs());
        assert!((t400 / t800 - 1.0).abs() < 1e-4, "{t400} {t800}");
    }

    #[test]
    fn validation() {
        let bad = vec![
            Segment {
                z_start: 0.0,
                z_end: 2.0,
                height: 1.0,
            },
            Segment {
                z_start: 1.0,
                z_end: 3.0,
                height: 1.0,
            },
        ];
        assert!(BarrierSpec::piecewise(bad).is_err());
        assert!(BarrierSpec::sampled(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(transfer_matrix_transmission(&BarrierSpec::from_fn(|_| 1.0, 1.0, 3).unwrap(), 0.5, 1.0).is_err());
    }

    #[test]
    fn scenario_examples() {
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let b = BarrierSpec::rectangle(2.0 * EV, width_for(5.0, 2.0 * EV, EV)).unwrap();
        let mut split = SplitTransverseSpec {
            c1: h,
            c2: h * Complex::new(0.0, 1.0),
            r1: -1e-6,
            r2: 1e-6,
            gamma: 1.0,
            width: 1e-8,
        };
        let pure = tunnel_scenario(&split, &b, EV, M, Method::TransferMatrix).unwrap();
        assert!((pure.coherence - 1.0).abs() < 1e-15);
        assert_eq!(pure.transmitted_state.off_diagonal, pure.incident_state.off_diagonal);
        assert!((pure.transmitted + pure.reflected.unwrap() - 1.0).abs() < 1e-10);
        split.gamma = 0.0;
        let mixed = tunnel_scenario(&split, &b, EV, M, Method::TransferMatrix).unwrap();
        assert_eq!(mixed.transmitted, pure.transmitted);
        assert_eq!(mixed.transmitted_state.off_diagonal.norm(), 0.0);
        assert!((mixed.transmitted_state.w1 - 0.5).abs() < 1e-15);
        split.gamma = 0.4;
        let part = tunnel_scenario(&split, &b, EV, M, Method::Wkb).unwrap();
        assert!((part.fringe_visibility - 0.4).abs() < 1e-15);
        split.c1 = Complex::new(0.9, 0.0);
        assert!(tunnel_scenario(&split, &b, EV, M, Method::Wkb).is_err());
    }

    #[test]
    fn transit_flag() {
        let b = BarrierSpec::rectangle(2.0 * EV, 1e-9).unwrap();
        let ok = transit_check(&b, M, 1e6, 1e-27).unwrap();
        assert!(ok.ok, "{ok:?}");
        let bad = transit_check(&b, M, 1e6, 1e-23).unwrap();
        assert!(!bad.ok);
    }

    #[test]
    fn scan_rows() {
        let b = BarrierSpec::rectangle(2.0 * EV, 1e-9).unwrap();
        let es: Vec<f64> = (1..=100).map(|i| i as f64 * 0.03 * EV).collect();
        let rows = energy_scan(&b, M, &es).unwrap();
        assert_eq!(rows.len(), 100);
        for r in &rows {
            assert!((r.t_exact + r.r_exact - 1.0).abs() < 1e-10);
            assert_eq!(r.t_wkb.is_some(), r.energy < 2.0 * EV);
        }
    }
}

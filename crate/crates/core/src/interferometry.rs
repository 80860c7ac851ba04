//! Near-field matter-wave optics in one transverse dimension: a point (or
//! incoherent multi-point) source, a binary amplitude grating G2, paraxial
//! Fresnel propagation to a plane G3, Talbot self-imaging and Talbot-Lau
//! transmission scans.
//!
//! A field illuminated by a point source at distance `R` carries the
//! spherical phase `exp(i pi (x - xc)^2 / (lambda R))` analytically rather
//! than on the grid. By the Fresnel scaling theorem, propagating such a field
//! by `z` equals propagating its slowly varying part by `z/M` on the
//! unmagnified grid, then stretching coordinates by `M = (R + z)/R` about
//! `xc`. The sampled amplitude therefore never has to resolve the spherical
//! phase, and the grid pitch grows with the geometric magnification.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::Particle;
use crate::error::{domain, Error, Result};
use crate::ratio::{quantum_ratio, QuantumRatio};
use crate::scalar::{CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct GratingSpec<T> {
    /// m
    pub period: T,
    /// Open part of each period, in `(0, 1]`.
    pub open_fraction: T,
    pub n_slits: usize,
    /// Transverse position of the grating centre (m).
    #[serde(default)]
    pub offset: T,
}

impl<T: Real> GratingSpec<T> {
    pub fn new(period: T, open_fraction: T, n_slits: usize) -> Result<Self> {
        let g = Self {
            period,
            open_fraction,
            n_slits,
            offset: T::zero(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period > T::zero()) || !self.period.is_finite() {
            return Err(domain(format!("grating period must be positive, got {}", self.period)));
        }
        if !(self.open_fraction > T::zero() && self.open_fraction <= T::one()) {
            return Err(domain(format!(
                "open fraction must lie in (0, 1], got {}",
                self.open_fraction
            )));
        }
        if self.n_slits < 2 {
            return Err(domain(format!(
                "a grating needs at least 2 slits, got {}",
                self.n_slits
            )));
        }
        Ok(())
    }

    /// Total height `H = n_slits * period`.
    pub fn height(&self) -> T {
        T::from_usize_lossy(self.n_slits) * self.period
    }

    pub fn shifted(&self, by: T) -> Self {
        Self {
            offset: self.offset + by,
            ..*self
        }
    }

    fn start(&self) -> T {
        self.offset - self.height() * T::lit(0.5)
    }

    pub fn is_fully_open(&self) -> bool {
        self.open_fraction >= T::one()
    }

    /// Open length between the grating start and `x`.
    fn cumulative_open(&self, x: T) -> T {
        let p = self.period;
        let open = self.open_fraction * p;
        let rel = x - self.start();
        if rel <= T::zero() {
            return T::zero();
        }
        if rel >= self.height() {
            return open * T::from_usize_lossy(self.n_slits);
        }
        let k = (rel / p).floor();
        let r = rel - k * p;
        k * open + r.min(open)
    }

    /// Fraction of `[a, b]` lying inside slit openings. A fully open grating
    /// transmits everywhere.
    pub fn open_fraction_of(&self, a: T, b: T) -> T {
        if self.is_fully_open() {
            return T::one();
        }
        let w = b - a;
        if w <= T::zero() {
            return T::zero();
        }
        ((self.cumulative_open(b) - self.cumulative_open(a)) / w)
            .max(T::zero())
            .min(T::one())
    }
}

/// Source-to-G2 distance `l1`, G2-to-G3 distance `l2` and de Broglie wavelength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct GeometrySpec<T> {
    pub l1: T,
    pub l2: T,
    pub wavelength: T,
}

impl<T: Real> GeometrySpec<T> {
    pub fn new(l1: T, l2: T, wavelength: T) -> Result<Self> {
        if !(l1 > T::zero() && l2 > T::zero() && wavelength > T::zero()) {
            return Err(domain("l1, l2 and the wavelength must be positive"));
        }
        Ok(Self { l1, l2, wavelength })
    }

    /// Geometry in which G3 sits at `L2 = order * M2 * L_T`, i.e. at an
    /// effective distance of `order` Talbot lengths. Needs `l1 > order L_T`.
    pub fn resonant(l1: T, wavelength: T, period: T, order: T) -> Result<Self> {
        let zt = order * talbot_length(period, wavelength)?;
        if !(l1 > zt) {
            return Err(domain(format!(
                "no resonant G3 position: l1 = {l1} m must exceed {order} L_T = {zt} m"
            )));
        }
        Self::new(l1, zt * l1 / (l1 - zt), wavelength)
    }

    /// `M1 = (L1 + L2)/L2`
    pub fn m1(&self) -> T {
        (self.l1 + self.l2) / self.l2
    }

    /// `M2 = (L1 + L2)/L1`
    pub fn m2(&self) -> T {
        (self.l1 + self.l2) / self.l1
    }

    /// `L2 / M2`, the distance the unmagnified pattern effectively travels.
    pub fn effective_distance(&self) -> T {
        self.l2 / self.m2()
    }
}

/// `L_T = d^2 / lambda`.
pub fn talbot_length<T: Real>(d: T, lambda: T) -> Result<T> {
    if !(d > T::zero() && lambda > T::zero()) {
        return Err(domain(format!(
            "Talbot length needs positive d and lambda, got {d}, {lambda}"
        )));
    }
    Ok(d * d / lambda)
}

/// Spherical phase `exp(i pi (x - center)^2 / (lambda radius))` carried analytically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Curvature<T> {
    pub radius: T,
    pub center: T,
}

/// Complex amplitude on a uniform transverse grid. Sample `i` sits at
/// `origin + i * pitch`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveField<T> {
    pub amplitudes: Vec<Complex<T>>,
    pub origin: T,
    pub pitch: T,
    pub wavelength: T,
    pub curvature: Option<Curvature<T>>,
}

impl<T: Real> WaveField<T> {
    /// `n` samples of pitch `pitch` centred on `x = 0`; for even `n` the
    /// cell edges fall on integer multiples of the pitch.
    pub fn centered_grid(n: usize, pitch: T) -> T {
        -T::from_usize_lossy(n) * pitch * T::lit(0.5) + pitch * T::lit(0.5)
    }

    /// Plane wave of unit amplitude.
    pub fn plane(n: usize, pitch: T, wavelength: T) -> Result<Self> {
        if n == 0 || !(pitch > T::zero()) || !(wavelength > T::zero()) {
            return Err(domain("grid needs n > 0, pitch > 0 and wavelength > 0"));
        }
        Ok(Self {
            amplitudes: vec![Complex::new(T::one(), T::zero()); n],
            origin: Self::centered_grid(n, pitch),
            pitch,
            wavelength,
            curvature: None,
        })
    }

    /// Unit-amplitude paraxial spherical wave from a point at transverse
    /// position `x_source`, a distance `l1` before the grid plane.
    pub fn point_source(x_source: T, l1: T, n: usize, pitch: T, wavelength: T) -> Result<Self> {
        if !(l1 > T::zero()) {
            return Err(domain(format!("source distance must be positive, got {l1}")));
        }
        let mut f = Self::plane(n, pitch, wavelength)?;
        f.curvature = Some(Curvature {
            radius: l1,
            center: x_source,
        });
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn x(&self, i: usize) -> T {
        self.origin + self.pitch * T::from_usize_lossy(i)
    }

    pub fn intensity(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum |psi|^2 * pitch`.
    pub fn power(&self) -> T {
        let mut acc = CompensatedSum::new();
        for a in &self.amplitudes {
            acc.add(a.norm_sqr());
        }
        acc.value() * self.pitch
    }

    /// Full complex amplitude at sample `i`, spherical phase included.
    pub fn psi(&self, i: usize) -> Complex<T> {
        match self.curvature {
            None => self.amplitudes[i],
            Some(c) => {
                let dx = self.x(i) - c.center;
                let phase = T::PI() * dx * dx / (self.wavelength * c.radius);
                self.amplitudes[i] * Complex::from_polar(T::one(), phase)
            }
        }
    }
}

/// Binary amplitude mask: each sample is multiplied by the open fraction of its cell.
pub fn apply_grating<T: Real>(f: &WaveField<T>, g: &GratingSpec<T>) -> Result<WaveField<T>> {
    g.validate()?;
    if f.pitch > g.period / T::lit(16.0) {
        return Err(domain(format!(
            "grid pitch {} m is coarser than period/16 = {} m",
            f.pitch,
            g.period / T::lit(16.0)
        )));
    }
    let half = f.pitch * T::lit(0.5);
    let (lo, hi) = (f.origin - half, f.x(f.len() - 1) + half);
    if g.start() < lo || g.start() + g.height() > hi {
        return Err(domain("the grid does not cover the grating"));
    }
    let mut out = f.clone();
    for (i, a) in out.amplitudes.iter_mut().enumerate() {
        let x = f.x(i);
        *a *= g.open_fraction_of(x - half, x + half);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct PropagationOptions<T> {
    /// Largest allowed edge intensity relative to the peak.
    pub leak_tolerance: T,
}

impl<T: Real> Default for PropagationOptions<T> {
    fn default() -> Self {
        Self {
            leak_tolerance: T::lit(1e-3),
        }
    }
}

/// Largest FFT length used to tabulate the propagation kernel.
pub const MAX_KERNEL_FFT: usize = 1 << 23;

/// Fresnel propagator restricted to the spatial frequencies the grid can
/// carry, `K_k = h * integral over |f| < 1/(2h) of exp(-i pi lambda z f^2 + 2 pi i f k h) df`,
/// for every sample offset `-(n-1)..=(n-1)`.
///
/// Convolution with this kernel is unitary on the infinite lattice, so
/// sampled power is conserved up to what leaves the grid. Point-sampling the
/// continuous chirp instead aliases the sharp grating edges by several
/// percent. The integral is tabulated with one inverse FFT, over a period long
/// enough that the kernel's reach `lambda z / (2 h^2)` samples never wraps.
fn lattice_kernel<T: Real>(n: usize, h: T, lambda_z: T) -> Result<Vec<Complex<T>>> {
    let (h, lz) = (h.to_f64_lossy(), lambda_z.to_f64_lossy());
    let reach = (lz / (2.0 * h * h)).ceil();
    let want = 4.0 * n as f64 + 2.0 * reach;
    if !(want <= MAX_KERNEL_FFT as f64) {
        return Err(Error::Aliasing(format!(
            "propagation kernel reaches {reach:e} samples, beyond the {MAX_KERNEL_FFT}-point table"
        )));
    }
    let p = (want as usize).next_power_of_two();
    let df = 1.0 / (p as f64 * h);
    let mut spec: Vec<Complex<f64>> = (0..p)
        .map(|q| {
            let f = if q < p / 2 { q as f64 } else { q as f64 - p as f64 } * df;
            Complex::from_polar(1.0 / p as f64, -std::f64::consts::PI * lz * f * f)
        })
        .collect();
    rustfft::FftPlanner::new().plan_fft_inverse(p).process(&mut spec);
    Ok((0..2 * n - 1)
        .map(|idx| {
            let k = idx as isize - (n as isize - 1);
            let z = spec[k.rem_euclid(p as isize) as usize];
            Complex::new(T::lit(z.re), T::lit(z.im))
        })
        .collect())
}

/// Paraxial propagation over `distance` by direct quadrature.
pub fn propagate<T: Real>(f: &WaveField<T>, distance: T) -> Result<WaveField<T>> {
    propagate_with(f, distance, PropagationOptions::default())
}

pub fn propagate_with<T: Real>(f: &WaveField<T>, distance: T, opts: PropagationOptions<T>) -> Result<WaveField<T>> {
    if !(distance > T::zero()) || !distance.is_finite() {
        return Err(domain(format!("propagation distance must be positive, got {distance}")));
    }
    if f.is_empty() {
        return Err(domain("empty wave field"));
    }
    let (mag, z_eff, curvature) = match f.curvature {
        None => (T::one(), distance, None),
        Some(c) => {
            let m = (c.radius + distance) / c.radius;
            (
                m,
                distance / m,
                Some(Curvature {
                    radius: c.radius + distance,
                    center: c.center,
                }),
            )
        }
    };
    let n = f.len();
    let kernel = lattice_kernel(n, f.pitch, f.wavelength * z_eff)?;
    let sources: Vec<(usize, Complex<T>)> = f
        .amplitudes
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| a.re != T::zero() || a.im != T::zero())
        .collect();
    let scale = T::one() / mag.sqrt();
    let amplitudes: Vec<Complex<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(j, a) in &sources {
                acc += kernel[i + n - 1 - j] * a;
            }
            acc * scale
        })
        .collect();
    let out = WaveField {
        amplitudes,
        origin: match f.curvature {
            None => f.origin,
            Some(c) => c.center + (f.origin - c.center) * mag,
        },
        pitch: f.pitch * mag,
        wavelength: f.wavelength,
        curvature,
    };
    check_leak(&out, opts.leak_tolerance)?;
    Ok(out)
}

fn check_leak<T: Real>(f: &WaveField<T>, tol: T) -> Result<()> {
    let inten = f.intensity();
    let peak = inten.iter().copied().fold(T::zero(), T::max);
    if !peak.is_finite() {
        return Err(Error::Aliasing("non-finite intensity after propagation".into()));
    }
    if peak == T::zero() {
        return Ok(());
    }
    let band = (f.len() / 100).max(16).min(f.len());
    let edge = inten[..band]
        .iter()
        .chain(&inten[f.len() - band..])
        .copied()
        .fold(T::zero(), T::max);
    if edge > tol * peak {
        return Err(Error::Aliasing(format!(
            "edge intensity is {} of the peak, above the tolerance {tol}",
            edge / peak
        )));
    }
    Ok(())
}

/// Grid used for a grating experiment: total samples and samples per period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub samples: usize,
    pub per_period: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            samples: 1 << 14,
            per_period: 32,
        }
    }
}

/// Where the particles come from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Source<T> {
    /// Coherent point source at this transverse position.
    Point(T),
    /// Mutually incoherent point sources; intensities add.
    Incoherent(Vec<T>),
}

impl<T: Real> Source<T> {
    fn positions(&self) -> Vec<T> {
        match self {
            Source::Point(x) => vec![*x],
            Source::Incoherent(v) => v.clone(),
        }
    }

    /// Points spread over the openings of a source grating G1: `per_slit`
    /// equally spaced points inside each slit.
    pub fn from_source_grating(g1: &GratingSpec<T>, per_slit: usize) -> Result<Self> {
        g1.validate()?;
        if per_slit == 0 {
            return Err(domain("need at least one point per source slit"));
        }
        let open = g1.open_fraction * g1.period;
        let mut v = Vec::with_capacity(g1.n_slits * per_slit);
        for k in 0..g1.n_slits {
            let a = g1.start() + g1.period * T::from_usize_lossy(k);
            for j in 0..per_slit {
                v.push(a + open * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(per_slit));
            }
        }
        Ok(Source::Incoherent(v))
    }
}

/// Field just behind G2 for a source at `x_source`.
fn behind_grating<T: Real>(
    x_source: T,
    g: &GratingSpec<T>,
    geo: &GeometrySpec<T>,
    grid: GridSpec,
) -> Result<WaveField<T>> {
    if grid.per_period < 16 {
        return Err(domain("need at least 16 samples per grating period"));
    }
    let pitch = g.period / T::from_usize_lossy(grid.per_period);
    let f = WaveField::point_source(x_source, geo.l1, grid.samples, pitch, geo.wavelength)?;
    apply_grating(&f, g)
}

/// Pearson correlation of two equally long slices.
fn pearson<T: Real>(a: &[T], b: &[T]) -> T {
    let n = T::from_usize_lossy(a.len());
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (*x - ma, *y - mb);
        sab.add(dx * dy);
        saa.add(dx * dx);
        sbb.add(dy * dy);
    }
    let den = (saa.value() * sbb.value()).sqrt();
    if den > T::zero() {
        sab.value() / den
    } else {
        T::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfImage<T> {
    /// Best correlation over one period of shifts.
    pub correlation: T,
    /// Shift of the G3 pattern at the best correlation, in G3 coordinates (m).
    pub best_shift: T,
    /// `best_shift / (M2 d)`, in `[0, 1)`.
    pub best_shift_periods: T,
    pub correlation_at_zero: T,
    /// Correlation for each shift of `k` grid samples, `k = 0..per_period`.
    pub correlations: Vec<T>,
    pub m2: T,
    pub effective_distance: T,
    pub talbot_length: T,
}

/// Compare the intensity at G3, rescaled by `1/M2`, with the pattern just
/// behind G2 over the central 80% of the grating periods.
pub fn self_image_check<T: Real>(
    x_source: T,
    g: &GratingSpec<T>,
    geo: &GeometrySpec<T>,
    grid: GridSpec,
) -> Result<SelfImage<T>> {
    let behind = behind_grating(x_source, g, geo, grid)?;
    let reference = behind.intensity();
    let at_g3 = propagate(&behind, geo.l2)?;
    let image = at_g3.intensity();
    let per = grid.per_period;
    // first sample inside the grating, then skip 10% of the periods
    let left_edge = behind.origin - behind.pitch * T::lit(0.5);
    let first = ((g.start() - left_edge) / behind.pitch).round().to_f64_lossy() as usize;
    let skip = g.n_slits / 10;
    let i0 = first + skip * per;
    let i1 = first + (g.n_slits - skip) * per;
    if i0 >= i1 || i1 + per > image.len() {
        return Err(domain("grating too small for the correlation window"));
    }
    let correlations: Vec<T> = (0..per)
        .map(|s| pearson(&image[i0 + s..i1 + s], &reference[i0..i1]))
        .collect();
    let (best, &correlation) =
        correlations.iter().enumerate().fold(
            (0, &T::neg_infinity()),
            |acc, (i, c)| if *c > *acc.1 { (i, c) } else { acc },
        );
    let m2 = geo.m2();
    Ok(SelfImage {
        correlation,
        best_shift: T::from_usize_lossy(best) * at_g3.pitch,
        best_shift_periods: T::from_usize_lossy(best) / T::from_usize_lossy(per),
        correlation_at_zero: correlations[0],
        correlations,
        m2,
        effective_distance: geo.effective_distance(),
        talbot_length: talbot_length(g.period, geo.wavelength)?,
    })
}

/// `(max - min)/(max + min)`, zero for an empty or all-zero array.
pub fn visibility<T: Real>(values: &[T]) -> T {
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    let min = values.iter().copied().fold(T::infinity(), T::min);
    if values.is_empty() || !(max + min > T::zero()) {
        return T::zero();
    }
    ((max - min) / (max + min)).max(T::zero()).min(T::one())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TalbotLauScan<T> {
    pub shifts: Vec<T>,
    /// Fraction of the particles leaving G2 that pass G3, per shift.
    pub transmissions: Vec<T>,
    pub visibility: T,
    /// G3 period differs from `M2 d` by more than 10%.
    pub period_mismatch: bool,
    pub warnings: Vec<String>,
}

/// Total transmission through G3 as it is shifted transversely.
pub fn talbot_lau_scan<T: Real>(
    source: &Source<T>,
    g2: &GratingSpec<T>,
    g3: &GratingSpec<T>,
    geo: &GeometrySpec<T>,
    shifts: &[T],
    grid: GridSpec,
) -> Result<TalbotLauScan<T>> {
    g3.validate()?;
    let positions = source.positions();
    if positions.is_empty() {
        return Err(domain("source has no points"));
    }
    let mut warnings = Vec::new();
    let matched = geo.m2() * g2.period;
    let period_mismatch = ((g3.period - matched) / matched).abs() > T::lit(0.1);
    if period_mismatch {
        warnings.push(format!(
            "G3 period {} m is more than 10% away from M2 d = {matched} m",
            g3.period
        ));
    }
    // the reduced field behind G2 does not depend on the source position; only
    // the magnification centre does, so one propagation serves every point
    let behind = behind_grating(T::zero(), g2, geo, grid)?;
    let incident = behind.power();
    let at_g3 = propagate(&behind, geo.l2)?;
    let inten = at_g3.intensity();
    let m = geo.m2();
    let half = at_g3.pitch * T::lit(0.5);
    let transmissions: Vec<T> = shifts
        .par_iter()
        .map(|&s| {
            let mask = g3.shifted(s);
            let mut acc = CompensatedSum::new();
            for &xs in &positions {
                let origin = at_g3.origin + (T::one() - m) * xs;
                for (i, w) in inten.iter().enumerate() {
                    if *w == T::zero() {
                        continue;
                    }
                    let x = origin + at_g3.pitch * T::from_usize_lossy(i);
                    acc.add(*w * mask.open_fraction_of(x - half, x + half));
                }
            }
            acc.value() * at_g3.pitch / (incident * T::from_usize_lossy(positions.len()))
        })
        .collect();
    Ok(TalbotLauScan {
        shifts: shifts.to_vec(),
        visibility: visibility(&transmissions),
        transmissions,
        period_mismatch,
        warnings,
    })
}

/// `n` shifts evenly covering one G3 period.
pub fn one_period_shifts<T: Real>(period: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|i| period * T::from_usize_lossy(i) / T::from_usize_lossy(n))
        .collect()
}

/// Intensity behind G2 at several distances, in coordinates scaled back by
/// `1/M2` so that every row shares the columns of the G2 plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Carpet<T> {
    pub distances: Vec<T>,
    pub magnifications: Vec<T>,
    pub x_reduced: Vec<T>,
    pub intensity: Vec<Vec<T>>,
    pub talbot_length: T,
    pub geometry: GeometrySpec<T>,
}

/// Talbot carpet for a point source at `x = 0`; columns cover the grating
/// height plus 10% on each side, keeping every `stride`-th sample.
pub fn talbot_carpet<T: Real>(
    g: &GratingSpec<T>,
    geo: &GeometrySpec<T>,
    distances: &[T],
    grid: GridSpec,
    stride: usize,
) -> Result<Carpet<T>> {
    let behind = behind_grating(T::zero(), g, geo, grid)?;
    let stride = stride.max(1);
    let margin = g.height() * T::lit(0.6);
    let cols: Vec<usize> = (0..behind.len())
        .filter(|&i| (behind.x(i) - g.offset).abs() <= margin)
        .step_by(stride)
        .collect();
    let mut intensity = Vec::with_capacity(distances.len());
    let mut magnifications = Vec::with_capacity(distances.len());
    for &z in distances {
        let f = propagate(&behind, z)?;
        magnifications.push(f.pitch / behind.pitch);
        intensity.push(cols.iter().map(|&i| f.amplitudes[i].norm_sqr()).collect());
    }
    Ok(Carpet {
        distances: distances.to_vec(),
        magnifications,
        x_reduced: cols.iter().map(|&i| behind.x(i)).collect(),
        intensity,
        talbot_length: talbot_length(g.period, geo.wavelength)?,
        geometry: *geo,
    })
}

/// `Q` with `R_q` taken as the grating height.
pub fn coherence_quantum_ratio<T: Real>(g2: &GratingSpec<T>, particle: &Particle) -> Result<QuantumRatio<T>> {
    g2.validate()?;
    quantum_ratio(g2.height(), T::lit(particle.size_l0))
}

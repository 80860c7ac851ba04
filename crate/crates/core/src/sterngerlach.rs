//! Stern-Gerlach experiment: spin-1/2 predictions for pure and mixed beams,
//! screen images, the classical-magnet comparison, and the large-spin limit in
//! which the S_z distribution collapses onto a single classical trajectory.
//!
//! The fast Larmor precession about the bias field is averaged analytically:
//! only the force along the gradient survives, `+mu b0` on the up branch and
//! `-mu b0` on the down branch.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{AMU, ANGSTROM, BOHR_MAGNETON};
use crate::error::{domain, Error, Result};
use crate::ratio::{classify, quantum_ratio, Classification, Extended, Thresholds};
use crate::scalar::{erf, CompensatedSum, Real};
use crate::wavepacket::{sg_closed_form, GaussianPacket, SGFieldSpec, SpinBranch};

/// Spin-1/2 pure state along the direction `(theta, phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpinHalfState<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> SpinHalfState<T> {
    pub fn new(theta: T, phi: T) -> Self {
        Self { theta, phi }
    }

    /// `c1 = e^{-i phi/2} cos(theta/2)`, `c2 = e^{i phi/2} sin(theta/2)`.
    pub fn coefficients(&self) -> (Complex<T>, Complex<T>) {
        let half = T::lit(0.5);
        let (s, c) = (self.theta * half).sin_cos();
        (
            Complex::from_polar(c, -self.phi * half),
            Complex::from_polar(s, self.phi * half),
        )
    }

    pub fn density_matrix(&self) -> DensityMatrix2<T> {
        let (c1, c2) = self.coefficients();
        DensityMatrix2 {
            rho: [[c1 * c1.conj(), c1 * c2.conj()], [c2 * c1.conj(), c2 * c2.conj()]],
        }
    }
}

/// 2x2 spin density matrix in the `(up, down)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityMatrix2<T> {
    pub rho: [[Complex<T>; 2]; 2],
}

impl<T: Real> DensityMatrix2<T> {
    /// Validated constructor.
    pub fn new(rho: [[Complex<T>; 2]; 2]) -> Result<Self> {
        let m = Self { rho };
        m.validate()?;
        Ok(m)
    }

    /// Diagonal (fully decohered) matrix with weight `w_up` in the upper band.
    pub fn diagonal(w_up: T) -> Result<Self> {
        let z = Complex::new(T::zero(), T::zero());
        Self::new([
            [Complex::new(w_up, T::zero()), z],
            [z, Complex::new(T::one() - w_up, T::zero())],
        ])
    }

    pub fn unpolarized() -> Self {
        Self::diagonal(T::lit(0.5)).expect("half identity is a density matrix")
    }

    /// Same populations with the coherence scaled by `gamma` in `[0, 1]`.
    pub fn with_coherence(&self, gamma: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(domain(format!("coherence factor must lie in [0, 1], got {gamma}")));
        }
        let mut rho = self.rho;
        rho[0][1] *= gamma;
        rho[1][0] *= gamma;
        Self::new(rho)
    }

    fn tolerance() -> T {
        T::epsilon() * T::lit(1e4)
    }

    pub fn validate(&self) -> Result<()> {
        let tol = Self::tolerance();
        let r = &self.rho;
        let finite = r.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(domain("density matrix has non-finite entries"));
        }
        if r[0][0].im.abs() > tol || r[1][1].im.abs() > tol || (r[0][1] - r[1][0].conj()).norm() > tol {
            return Err(domain("density matrix is not Hermitian"));
        }
        if r[0][0].re < -tol || r[1][1].re < -tol {
            return Err(domain("density matrix has a negative population"));
        }
        if (self.trace() - T::one()).abs() > tol {
            return Err(domain(format!("density matrix trace is {}, not 1", self.trace())));
        }
        let det = r[0][0].re * r[1][1].re - r[0][1].norm_sqr();
        if det < -tol {
            return Err(domain(format!(
                "density matrix is not positive semidefinite (det = {det})"
            )));
        }
        Ok(())
    }

    pub fn trace(&self) -> T {
        self.rho[0][0].re + self.rho[1][1].re
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> T {
        let r = &self.rho;
        r[0][0].re * r[0][0].re + r[1][1].re * r[1][1].re + T::lit(2.0) * r[0][1].norm_sqr()
    }

    /// `|rho_12| / sqrt(rho_11 rho_22)`, zero when a population vanishes.
    pub fn coherence(&self) -> T {
        let p = (self.rho[0][0].re * self.rho[1][1].re).sqrt();
        if p > T::zero() {
            (self.rho[0][1].norm() / p).min(T::one())
        } else {
            T::zero()
        }
    }
}

/// Relative intensities of the upper and lower spots, `(rho_11, rho_22)`.
pub fn band_intensities<T: Real>(rho: &DensityMatrix2<T>) -> Result<(T, T)> {
    rho.validate()?;
    Ok((rho.rho[0][0].re, rho.rho[1][1].re))
}

/// Magnet, incoming packet and the body size entering the quantum ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SgConfig<T> {
    pub field: SGFieldSpec<T>,
    pub packet: GaussianPacket<T>,
    /// m
    pub size_l0: T,
    pub thresholds: Thresholds<T>,
}

impl<T: Real> SgConfig<T> {
    /// Silver beam with `mu = muB`, `v = 500 m/s`, a 3.5 cm magnet and a
    /// 0.01 mm wide beam. The gradient is solved from a 0.2 mm branch
    /// separation: `b0 = sep m / (mu t^2)`, about 789 T/m.
    pub fn silver() -> Self {
        let mass = 108.0 * AMU;
        let (length, speed, sep) = (0.035, 500.0, 0.2e-3);
        let t = length / speed;
        let b0 = sep * mass / (BOHR_MAGNETON * t * t);
        let field = SGFieldSpec {
            b0_gradient: T::lit(b0),
            b0_bias: T::lit(0.1),
            mu: T::lit(BOHR_MAGNETON),
            region_length: T::lit(length),
            beam_speed: T::lit(speed),
            transverse_extent: T::lit(1e-5),
            validity_factor: T::lit(10.0),
        };
        let packet = GaussianPacket::from_std_dev(T::zero(), T::zero(), T::lit(1e-5), T::lit(mass))
            .expect("preset packet is valid");
        Self {
            field,
            packet,
            size_l0: T::lit(1.44 * ANGSTROM),
            thresholds: Thresholds::default(),
        }
    }
}

/// Outcome of a Stern-Gerlach run.
#[derive(Clone, Debug, Serialize)]
pub struct SgReport<T> {
    pub config: SgConfig<T>,
    pub density_matrix: DensityMatrix2<T>,
    pub transit_time: T,
    pub up: GaussianPacket<T>,
    pub down: GaussianPacket<T>,
    /// `|zbar_up - zbar_down|` at the magnet exit (m).
    pub separation: T,
    pub weight_up: T,
    pub weight_down: T,
    /// Separation plus one standard deviation on the outer side of each branch.
    pub r_q: T,
    pub q: Extended<T>,
    pub q_separation_only: Extended<T>,
    pub classification: Classification<T>,
    pub pure: bool,
    pub purity: T,
    pub conventions: Vec<String>,
}

/// Evolve both branches through the magnet for a beam in state `rho`.
pub fn run_sg<T: Real>(config: &SgConfig<T>, rho: &DensityMatrix2<T>) -> Result<SgReport<T>> {
    config.field.check_validity()?;
    let (weight_up, weight_down) = band_intensities(rho)?;
    let t = config.field.transit_time();
    let up = sg_closed_form(&config.packet, SpinBranch::Up, &config.field, t);
    let down = sg_closed_form(&config.packet, SpinBranch::Down, &config.field, t);
    let separation = (up.center - down.center).abs();
    let r_q = separation + up.std_dev() + down.std_dev();
    let qr = quantum_ratio(r_q, config.size_l0)?;
    let q_separation_only = if separation > T::zero() {
        quantum_ratio(separation, config.size_l0)?.q
    } else {
        Extended::Finite(T::zero())
    };
    let classification = classify(&qr, config.thresholds)?;
    let purity = rho.purity();
    Ok(SgReport {
        config: *config,
        density_matrix: *rho,
        transit_time: t,
        up,
        down,
        separation,
        weight_up,
        weight_down,
        r_q,
        q: qr.q,
        q_separation_only,
        classification,
        pure: (purity - T::one()).abs() <= DensityMatrix2::<T>::tolerance(),
        purity,
        conventions: vec![
            "hbar restored in the packet equations".into(),
            "spin up is deflected toward +z for b0 > 0".into(),
            "precession averaged: force mu b0 along z only".into(),
            format!("mu = {} J/T as given", config.field.mu),
        ],
    })
}

/// Pure beam polarized along `(theta, phi)`.
pub fn run_sg_pure<T: Real>(config: &SgConfig<T>, s: &SpinHalfState<T>) -> Result<SgReport<T>> {
    run_sg(config, &s.density_matrix())
}

/// Uniform binning of the screen: `bins` bins spanning `span` times the
/// extreme arrivals about their midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Binning<T> {
    pub bins: usize,
    pub span: T,
}

impl<T: Real> Default for Binning<T> {
    fn default() -> Self {
        Self {
            bins: 512,
            span: T::lit(1.2),
        }
    }
}

impl<T: Real> Binning<T> {
    fn range(&self, lo: T, hi: T) -> Result<(T, T)> {
        if self.bins == 0 || !(self.span >= T::one()) {
            return Err(Error::Config("binning needs at least one bin and span >= 1".into()));
        }
        let mid = (lo + hi) * T::lit(0.5);
        let half = (hi - lo) * T::lit(0.5) * self.span;
        Ok((mid - half, mid + half))
    }
}

/// Histogram of arrival positions on the detection screen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenImage<T> {
    pub lo: T,
    pub hi: T,
    pub centers: Vec<T>,
    /// Fraction of the beam per bin; sums to 1.
    pub weights: Vec<T>,
    pub band_centers: Vec<T>,
    pub band_widths: Vec<T>,
}

impl<T: Real> ScreenImage<T> {
    fn grid(lo: T, hi: T, bins: usize) -> Vec<T> {
        let h = (hi - lo) / T::from_usize_lossy(bins);
        (0..bins)
            .map(|i| lo + h * (T::from_usize_lossy(i) + T::lit(0.5)))
            .collect()
    }

    pub fn bin_width(&self) -> T {
        (self.hi - self.lo) / T::from_usize_lossy(self.weights.len())
    }

    /// Fraction of the weight in bins whose centre lies within `nsigma`
    /// band widths of some band centre.
    pub fn band_concentration(&self, nsigma: T) -> T {
        let mut acc = CompensatedSum::new();
        for (z, w) in self.centers.iter().zip(&self.weights) {
            let inside = self
                .band_centers
                .iter()
                .zip(&self.band_widths)
                .any(|(c, s)| (*z - *c).abs() <= nsigma * *s);
            if inside {
                acc.add(*w);
            }
        }
        acc.value()
    }

    /// Smallest bin weight, relative to the mean, among bins lying entirely
    /// inside `[a, b]`.
    pub fn interior_min_over_mean(&self, a: T, b: T) -> Option<T> {
        let h = self.bin_width() * T::lit(0.5);
        let inner: Vec<T> = self
            .centers
            .iter()
            .zip(&self.weights)
            .filter(|(z, _)| **z - h >= a && **z + h <= b)
            .map(|(_, w)| *w)
            .collect();
        if inner.is_empty() {
            return None;
        }
        let mean = inner.iter().copied().sum::<T>() / T::from_usize_lossy(inner.len());
        let min = inner.iter().copied().fold(T::infinity(), T::min);
        Some(min / mean)
    }

    /// Rows `(bin_center, weight)`.
    pub fn rows(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.centers.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Screen image of a quantum run: each branch is a Gaussian band whose weight
/// is integrated exactly over every bin.
pub fn quantum_screen_image<T: Real>(report: &SgReport<T>, binning: Binning<T>) -> Result<ScreenImage<T>> {
    let bands = [
        (report.up.center, report.up.std_dev(), report.weight_up),
        (report.down.center, report.down.std_dev(), report.weight_down),
    ];
    let five = T::lit(5.0);
    let lo = bands.iter().map(|(c, s, _)| *c - five * *s).fold(T::infinity(), T::min);
    let hi = bands
        .iter()
        .map(|(c, s, _)| *c + five * *s)
        .fold(T::neg_infinity(), T::max);
    let (lo, hi) = binning.range(lo, hi)?;
    let h = (hi - lo) / T::from_usize_lossy(binning.bins);
    let sqrt2 = T::SQRT_2();
    let mut weights: Vec<T> = (0..binning.bins)
        .map(|i| {
            let a = lo + h * T::from_usize_lossy(i);
            let b = a + h;
            bands
                .iter()
                .map(|(c, s, w)| *w * T::lit(0.5) * (erf((b - *c) / (sqrt2 * *s)) - erf((a - *c) / (sqrt2 * *s))))
                .sum()
        })
        .collect();
    let total = crate::scalar::stable_sum(weights.iter().copied());
    for w in &mut weights {
        *w /= total;
    }
    Ok(ScreenImage {
        lo,
        hi,
        centers: ScreenImage::grid(lo, hi, binning.bins),
        weights,
        band_centers: bands.iter().map(|b| b.0).collect(),
        band_widths: bands.iter().map(|b| b.1).collect(),
    })
}

/// Distribution of classical magnetic-moment directions `(theta, phi)`.
pub trait OrientationSampler<T>: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> (T, T);
}

/// Directions uniform on the sphere: `cos(theta)` uniform on `[-1, 1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Isotropic;

impl<T: Real> OrientationSampler<T> for Isotropic {
    fn sample(&self, rng: &mut ChaCha8Rng) -> (T, T) {
        let u: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (T::lit(u.acos()), T::lit(phi))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FixedOrientation<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> OrientationSampler<T> for FixedOrientation<T> {
    fn sample(&self, _rng: &mut ChaCha8Rng) -> (T, T) {
        (self.theta, self.phi)
    }
}

const CHUNK: usize = 4096;

/// Newtonian arrival of a classical moment at angle `theta` to the field.
pub fn classical_arrival<T: Real>(config: &SgConfig<T>, theta: T) -> T {
    let t = config.field.transit_time();
    let p = &config.packet;
    let f = config.field.force() * theta.cos();
    p.center + (p.mean_momentum * t + T::lit(0.5) * f * t * t) / p.mass
}

/// Classical beam: every atom starts at the packet centre with its mean
/// momentum and moves in the precession-averaged force `mu cos(theta) b0`.
///
/// Samples are drawn in fixed-size chunks, each from its own ChaCha stream,
/// and binned into integer counts, so the image depends only on `seed`.
pub fn classical_sg_ensemble<T: Real>(
    config: &SgConfig<T>,
    sampler: &dyn OrientationSampler<T>,
    n_samples: usize,
    seed: u64,
    binning: Binning<T>,
) -> Result<ScreenImage<T>> {
    if n_samples == 0 {
        return Err(domain("classical ensemble needs at least one sample"));
    }
    let zc = classical_arrival(config, T::FRAC_PI_2());
    let zmax = (classical_arrival(config, T::zero()) - zc).abs();
    let half = zmax.max(config.packet.std_dev());
    let (lo, hi) = binning.range(zc - half, zc + half)?;
    let nb = binning.bins;
    let h = (hi - lo) / T::from_usize_lossy(nb);
    let chunks = n_samples.div_ceil(CHUNK);
    let partial: Vec<(Vec<u64>, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut hist = vec![0u64; nb];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let (theta, _phi) = sampler.sample(&mut rng);
                let z = classical_arrival(config, theta);
                let idx = ((z - lo) / h).floor().to_f64_lossy();
                let idx = idx.clamp(0.0, (nb - 1) as f64) as usize;
                hist[idx] += 1;
                let dz = (z - zc).to_f64_lossy();
                s1 += dz;
                s2 += dz * dz;
            }
            (hist, s1, s2)
        })
        .collect();
    let mut counts = vec![0u64; nb];
    let (mut s1, mut s2) = (0.0, 0.0);
    for (hist, a, b) in &partial {
        for (c, x) in counts.iter_mut().zip(hist) {
            *c += x;
        }
        s1 += a;
        s2 += b;
    }
    let n = n_samples as f64;
    let mean = s1 / n;
    let std = (s2 / n - mean * mean).max(0.0).sqrt();
    let total = T::from_usize_lossy(n_samples);
    Ok(ScreenImage {
        lo,
        hi,
        centers: ScreenImage::grid(lo, hi, nb),
        weights: counts
            .iter()
            .map(|&c| T::from_usize_lossy(c as usize) / total)
            .collect(),
        band_centers: vec![zc + T::lit(mean)],
        band_widths: vec![T::lit(std)],
    })
}

/// Largest N accepted by [`large_spin_coefficients`].
pub const MAX_SPINS: u64 = 10_000_000;

/// `|c_k|^2` for N spin-1/2 particles all polarized along `theta`, with k
/// counting the spins up: a binomial distribution with success probability
/// `cos^2(theta/2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeSpinDistribution<T> {
    pub n: u64,
    pub theta: T,
    pub weights: Vec<T>,
}

pub fn large_spin_coefficients<T: Real>(n: u64, theta: T) -> Result<LargeSpinDistribution<T>> {
    if !(1..=MAX_SPINS).contains(&n) {
        return Err(domain(format!("N must lie in 1..={MAX_SPINS}, got {n}")));
    }
    if !theta.is_finite() {
        return Err(domain("theta must be finite"));
    }
    let half = theta.to_f64_lossy() * 0.5;
    let (p, q) = (half.cos().powi(2), half.sin().powi(2));
    let nu = n as usize;
    let mut logw = vec![f64::NEG_INFINITY; nu + 1];
    if q == 0.0 {
        logw[nu] = 0.0;
    } else if p == 0.0 {
        logw[0] = 0.0;
    } else {
        // recurrence outward from the mode keeps the log weights O(1) where they matter
        let nf = n as f64;
        let mode = (((nf + 1.0) * p).floor() as usize).min(nu);
        let lr = (p / q).ln();
        logw[mode] = 0.0;
        for k in mode..nu {
            let kf = k as f64;
            logw[k + 1] = logw[k] + ((nf - kf) / (kf + 1.0)).ln() + lr;
            if logw[k + 1] < -800.0 {
                break;
            }
        }
        for k in (1..=mode).rev() {
            let kf = k as f64;
            logw[k - 1] = logw[k] + (kf / (nf - kf + 1.0)).ln() - lr;
            if logw[k - 1] < -800.0 {
                break;
            }
        }
    }
    let raw: Vec<f64> = logw.iter().map(|l| l.exp()).collect();
    let mut acc = CompensatedSum::new();
    for w in &raw {
        acc.add(*w);
    }
    let total = acc.value();
    Ok(LargeSpinDistribution {
        n,
        theta,
        weights: raw.into_iter().map(|w| T::lit(w / total)).collect(),
    })
}

impl<T: Real> LargeSpinDistribution<T> {
    /// `x0 = cos^2(theta/2)`, the limiting value of `S_z / S` shifted to `[0, 1]`.
    pub fn x0(&self) -> T {
        (self.theta * T::lit(0.5)).cos().powi(2)
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = k;
            }
        }
        best
    }

    /// Rows `(k, k/N, |c_k|^2)`, skipping weights that underflowed to zero.
    pub fn rows(&self) -> impl Iterator<Item = (u64, T, T)> + '_ {
        let n = T::lit(self.n as f64);
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > T::zero())
            .map(move |(k, w)| (k as u64, T::lit(k as f64) / n, *w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpikeAnalysis<T> {
    /// `sum_k (k/N) |c_k|^2`
    pub mean_x: T,
    pub std_x: T,
    pub x0: T,
    /// Total-variation distance to the discretized saddle-point Gaussian.
    pub gaussian_tv_error: T,
    /// `<S_z>/S = 2 mean_x - 1`, which tends to `cos(theta)`.
    pub sz_over_s: T,
}

/// Moments of the k/N distribution and its distance from the Gaussian
/// `exp(-N (x - x0)^2 / (2 x0 (1 - x0)))` around the saddle point.
pub fn spike_analysis<T: Real>(dist: &LargeSpinDistribution<T>) -> Result<SpikeAnalysis<T>> {
    if dist.n < 2 {
        return Err(domain("spike analysis needs N >= 2"));
    }
    let n = dist.n as f64;
    let w: Vec<f64> = dist.weights.iter().map(|w| w.to_f64_lossy()).collect();
    let moment = |f: &dyn Fn(f64) -> f64| {
        let mut acc = CompensatedSum::new();
        for (k, wk) in w.iter().enumerate() {
            if *wk > 0.0 {
                acc.add(wk * f(k as f64 / n));
            }
        }
        acc.value()
    };
    let mean = moment(&|x| x);
    let var = moment(&|x| (x - mean) * (x - mean));
    let x0 = dist.x0().to_f64_lossy();
    let v0 = x0 * (1.0 - x0);
    let tv = if v0 <= 0.0 {
        0.0
    } else {
        let g: Vec<f64> = (0..w.len())
            .map(|k| {
                let d = k as f64 / n - x0;
                (-n * d * d / (2.0 * v0)).exp()
            })
            .collect();
        let gs = crate::scalar::stable_sum(g.iter().copied());
        let mut acc = CompensatedSum::new();
        for (a, b) in w.iter().zip(&g) {
            acc.add((a - b / gs).abs());
        }
        0.5 * acc.value()
    };
    Ok(SpikeAnalysis {
        mean_x: T::lit(mean),
        std_x: T::lit(var.sqrt()),
        x0: T::lit(x0),
        gaussian_tv_error: T::lit(tv),
        sz_over_s: T::lit(2.0 * mean - 1.0),
    })
}

//! Scenario configuration.
//!
//! A config file is TOML: global keys at the top, then one table per
//! subcommand holding the same keys as that subcommand's flags (dashes become
//! underscores). Flags given on the command line win over file values.
//!
//! ```toml
//! seed = 7
//! format = "json"
//!
//! [diffusion]
//! size = "1 um"
//! particles = ["electron", "C70"]
//!
//! [tunnel]
//! barrier = "rect:V0=2E,kw=10"
//! points = 100
//! ```

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

/// Seed used when neither the file nor the command line gives one.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fill every `None` field of `self` from `other`.
pub trait Merge {
    fn merge(self, other: Self) -> Self;
}

macro_rules! mergeable {
    ($ty:ident { $($field:ident),* $(,)? }) => {
        impl Merge for $ty {
            fn merge(self, other: Self) -> Self {
                Self { $($field: self.$field.or(other.$field)),* }
            }
        }
    };
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QratioArgs {
    /// Catalog particle; without it every catalog experiment is listed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    /// Quantum fluctuation range, e.g. `0.2 mm`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_q: Option<String>,
    /// Override the catalog size L0, e.g. `1.44 A`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0: Option<String>,
    /// Q at or above this is quantum [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hi: Option<f64>,
    /// Q at or below this is classical [default: 1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_lo: Option<f64>,
}
mergeable!(QratioArgs {
    particle,
    r_q,
    l0,
    q_hi,
    q_lo
});

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffusionArgs {
    /// Initial size (2 standard deviations) [default: 1 um].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<String>,
    /// Comma-separated catalog names [default: electron,hydrogen,C70,stone1g].
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particles: Option<Vec<String>>,
}
mergeable!(DiffusionArgs { size, particles });

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SgMode {
    Pure,
    Mixed,
    Classical,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SgArgs {
    /// pure: coherent spin state; mixed: coherence scaled by --gamma;
    /// classical: ensemble of classical moments [default: pure].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SgMode>,
    /// Polar angle of the spin, e.g. `pi/2` or `30deg` [default: pi/2].
    /// For classical runs, fixes the orientation instead of sampling it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    /// Azimuth of the spin [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    /// Coherence kept in mixed mode, 0..1 [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Classical ensemble size [default: 100000].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Screen histogram bins [default: 512].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// Field gradient; the silver preset solves it from a 0.2 mm separation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient: Option<String>,
}
mergeable!(SgArgs {
    mode,
    theta,
    phi,
    gamma,
    samples,
    bins,
    gradient
});

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinSpikeArgs {
    /// Number of spin-1/2 constituents, S = N/2; comma-separated [default: 1000].
    #[arg(long = "N", alias = "n", value_delimiter = ',', value_parser = clap::value_parser!(u64).range(1..=i64::MAX as u64))]
    #[serde(rename = "n", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<u64>>,
    /// Polar angles, comma-separated [default: pi/4].
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<String>>,
}
mergeable!(SpinSpikeArgs { n, theta });

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TalbotArgs {
    /// Particle for the de Broglie wavelength [default: C70].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    /// Beam speed [default: 100 m/s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<String>,
    /// Wavelength, overriding particle and speed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<String>,
    /// Period d of the diffraction grating [default: 1 um].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    /// Open fraction of the diffraction grating [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_fraction: Option<f64>,
    /// Slits in the diffraction grating [default: 100].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slits: Option<usize>,
    /// Source to grating distance [default: 1 m].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<String>,
    /// Grating to screen distance in units of M2 L_T [default: 2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    /// Transverse grid size [default: 16384].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Grid samples per grating period [default: 32].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_period: Option<usize>,
    /// Carpet rows [default: 64].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carpet_rows: Option<usize>,
    /// Keep every n-th transverse sample in the carpet [default: 4].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carpet_stride: Option<usize>,
}
mergeable!(TalbotArgs {
    particle,
    speed,
    wavelength,
    period,
    open_fraction,
    slits,
    l1,
    order,
    samples,
    per_period,
    carpet_rows,
    carpet_stride,
});

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Point,
    Lau,
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TalbotLauArgs {
    /// Particle for the de Broglie wavelength [default: C70].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    /// Beam speed [default: 100 m/s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<String>,
    /// Wavelength, overriding particle and speed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<String>,
    /// Period d of the diffraction grating [default: 1 um].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<String>,
    /// Open fraction of the diffraction grating [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_fraction: Option<f64>,
    /// Slits in the diffraction grating [default: 50].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slits: Option<usize>,
    /// Source grating to diffraction grating distance [default: 1 m].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<String>,
    /// Diffraction grating to scanner distance in units of M2 L_T [default: 2].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
    /// Transverse grid size [default: 16384].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Grid samples per grating period [default: 32].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_period: Option<usize>,
    /// point: one coherent source; lau: incoherent slits of a source grating
    /// with period M1 d [default: lau].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceKind>,
    /// Open fraction of the source grating [default: 0.1].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_open: Option<f64>,
    /// Source grating slits [default: 21].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g1_slits: Option<usize>,
    /// Incoherent points per source slit [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_slit: Option<usize>,
    /// Open fraction of the scanning grating; 1 removes it [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g3_open: Option<f64>,
    /// Scan points over one period [default: 32].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<usize>,
}
mergeable!(TalbotLauArgs {
    particle,
    speed,
    wavelength,
    period,
    open_fraction,
    slits,
    l1,
    order,
    samples,
    per_period,
    source,
    g1_open,
    g1_slits,
    per_slit,
    g3_open,
    shifts,
});

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TunnelArgs {
    /// Tunnelling particle [default: electron].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    /// Reference energy E; barrier heights may be written as multiples of it
    /// [default: 1 eV].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<String>,
    /// `rect:V0=<h>,w=<len>`, `rect:V0=<h>,kw=<x>` (width from kappa w at E),
    /// `gauss:V0=<h>,sigma=<len>,a=<len>` or `parabola:V0=<h>,a=<len>`; heights
    /// are energies or multiples of E such as `2E` [default: rect:V0=2E,kw=10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub barrier: Option<String>,
    /// Lowest scan energy [default: 0.01 V0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_min: Option<String>,
    /// Highest scan energy [default: 2 V0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_max: Option<String>,
    /// Scan points [default: 100].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}
mergeable!(TunnelArgs {
    particle,
    energy,
    barrier,
    e_min,
    e_max,
    points
});

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeArgs {
    /// Decoherence time [default: 1e-13 s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_dec: Option<String>,
    /// Transit time [default: 1e-4 s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_trans: Option<String>,
    /// Packet diffusion time [default: 1e-2 s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_diff: Option<String>,
    /// Dissipation time [default: 1 s].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_diss: Option<String>,
    /// Branch width a [default: 10 nm].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<String>,
    /// Environment wavelength [default: 1 um].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// Branch separation |r1 - r2| [default: 0.2 mm].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<String>,
    /// Factor that "much less than" must reach [default: 10].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strictness: Option<f64>,
    /// Take transit time, diffusion time and separation from the silver
    /// Stern-Gerlach preset.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from_sg: Option<bool>,
}
mergeable!(RegimeArgs {
    tau_dec,
    tau_trans,
    tau_diff,
    tau_diss,
    width,
    lambda,
    separation,
    strictness,
    from_sg,
});

/// Everything a run depends on. Output location and thread count are kept
/// out of the provenance hash since they cannot change the results.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Subcommand the run was made with; recorded, not read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Catalog file replacing the built-in one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<PathBuf>,
    pub qratio: QratioArgs,
    pub diffusion: DiffusionArgs,
    pub sg: SgArgs,
    pub spin_spike: SpinSpikeArgs,
    pub talbot: TalbotArgs,
    pub talbot_lau: TalbotLauArgs,
    pub tunnel: TunnelArgs,
    pub regime: RegimeArgs,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The same config without fields that only say where and how fast to run.
    pub fn for_hashing(&self) -> Self {
        Self {
            out: None,
            threads: None,
            ..self.clone()
        }
    }
}

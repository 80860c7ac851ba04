//! Particle catalog.
//!
//! A catalog is a TOML document holding one `[[particle]]` record per species
//! and, optionally, `[[experiment]]` records that pair a particle with a
//! measured quantum-fluctuation range. Dimensioned fields carry explicit
//! units and are converted to SI at load time:
//!
//! ```toml
//! [[particle]]
//! name = "Ag"
//! mass = "108 amu"
//! size_l0 = "1.44 Å"
//! magnetic_moment = "1 muB"
//! spin = 0.5
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{parse_quantity, Dimension};

/// The catalog shipped with the crate: elementary particles, nuclei, atoms,
/// molecules and a macroscopic reference body.
pub const DEFAULT_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Particle {
    pub name: String,
    /// kg
    pub mass: f64,
    /// Extent of the internal wave function (m); zero for elementary particles.
    pub size_l0: f64,
    /// J/T
    pub magnetic_moment: Option<f64>,
    pub spin: Option<f64>,
    pub note: Option<String>,
}

impl Particle {
    pub fn is_elementary(&self) -> bool {
        self.size_l0 == 0.0
    }
}

/// A published (particle, R_q) pairing with the order of magnitude of Q it reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Experiment {
    pub name: String,
    pub particle: String,
    /// m
    pub r_q: f64,
    pub q_reported: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Catalog {
    pub particles: Vec<Particle>,
    pub experiments: Vec<Experiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default)]
    particle: Vec<RawParticle>,
    #[serde(default)]
    experiment: Vec<RawExperiment>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParticle {
    name: String,
    mass: String,
    size_l0: String,
    magnetic_moment: Option<String>,
    spin: Option<f64>,
    note: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    particle: String,
    r_q: String,
    q_reported: f64,
    note: Option<String>,
}

impl RawParticle {
    fn validate(self) -> Result<Particle> {
        let err = |reason: String| Error::Load {
            entry: self.name.clone(),
            reason,
        };
        let mass = parse_quantity(&self.mass, Dimension::Mass).map_err(|e| err(e.to_string()))?;
        let size_l0 = parse_quantity(&self.size_l0, Dimension::Length).map_err(|e| err(e.to_string()))?;
        let magnetic_moment = self
            .magnetic_moment
            .as_deref()
            .map(|m| parse_quantity(m, Dimension::MagneticMoment))
            .transpose()
            .map_err(|e| err(e.to_string()))?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(err(format!("mass must be positive, got {mass} kg")));
        }
        if !(size_l0 >= 0.0) || !size_l0.is_finite() {
            return Err(err(format!("size_l0 must be nonnegative, got {size_l0} m")));
        }
        if let Some(s) = self.spin {
            if s < 0.0 || (2.0 * s).fract() != 0.0 {
                return Err(err(format!("spin must be a nonnegative half-integer, got {s}")));
            }
        }
        Ok(Particle {
            name: self.name,
            mass,
            size_l0,
            magnetic_moment,
            spin: self.spin,
            note: self.note,
        })
    }
}

impl Catalog {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let particles = raw
            .particle
            .into_iter()
            .map(RawParticle::validate)
            .collect::<Result<Vec<_>>>()?;
        let mut experiments = Vec::with_capacity(raw.experiment.len());
        for e in raw.experiment {
            let r_q = parse_quantity(&e.r_q, Dimension::Length).map_err(|err| Error::Load {
                entry: e.name.clone(),
                reason: err.to_string(),
            })?;
            if !particles.iter().any(|p| p.name == e.particle) {
                return Err(Error::Load {
                    entry: e.name,
                    reason: format!("unknown particle `{}`", e.particle),
                });
            }
            experiments.push(Experiment {
                name: e.name,
                particle: e.particle,
                r_q,
                q_reported: e.q_reported,
                note: e.note,
            });
        }
        Ok(Self { particles, experiments })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CATALOG).expect("embedded catalog is valid")
    }

    pub fn get(&self, name: &str) -> Option<&Particle> {
        self.particles
            .iter()
            .find(|p| p.name == name)
            .or_else(|| self.particles.iter().find(|p| p.name.eq_ignore_ascii_case(name)))
    }

    pub fn require(&self, name: &str) -> Result<&Particle> {
        self.get(name)
            .ok_or_else(|| Error::Config(format!("particle `{name}` is not in the catalog")))
    }
}

/// Read a catalog file and return its particles.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Vec<Particle>> {
    Catalog::load(path).map(|c| c.particles)
}

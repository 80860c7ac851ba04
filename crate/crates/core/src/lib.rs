//! The quantum ratio `Q = R_q / L_0`, comparing the range over which a body's
//! centre of mass stays coherent with the size of its internal wave function,
//! together with desk-scale models of the mechanisms that decide it: free
//! packet spreading, Stern-Gerlach splitting, large-spin spikes, Talbot-Lau
//! interferometry, barrier tunnelling and environmental decoherence.
//!
//! Numerical code is generic over [`scalar::Real`] (`f32` and `f64`); the
//! aliases below fix the common choice.

// `!(x > 0)` is how inputs reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod constants;
pub mod decoherence;
pub mod error;
pub mod export;
pub mod interferometry;
pub mod ratio;
pub mod scalar;
pub mod sterngerlach;
pub mod tunneling;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};

pub type GaussianPacket = wavepacket::GaussianPacket<f64>;
pub type GaussianPacketF32 = wavepacket::GaussianPacket<f32>;
pub type SgConfig = sterngerlach::SgConfig<f64>;
pub type SgConfigF32 = sterngerlach::SgConfig<f32>;
pub type WaveField = interferometry::WaveField<f64>;
pub type WaveFieldF32 = interferometry::WaveField<f32>;
pub type BarrierSpec = tunneling::BarrierSpec<f64>;
pub type BarrierSpecF32 = tunneling::BarrierSpec<f32>;
pub type BranchDensity = decoherence::BranchDensity<f64>;
pub type BranchDensityF32 = decoherence::BranchDensity<f32>;
pub type QuantumRatio = ratio::QuantumRatio<f64>;

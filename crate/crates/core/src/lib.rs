//! Simulation library for wideband THz massive-MIMO precoding.
//!
//! Quantifies the beam split effect of frequency-independent phase-shifter
//! beamforming on a uniform linear array and implements delay-phase precoding
//! (DPP) together with its true-time-delayer (TTD) hardware realization.
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: dependency-free complex linear algebra (Jacobi SVD,
//!   Cholesky log-determinant) and Simpson quadrature
//! - [`sysmodel`]: system configuration, subcarrier grid, array responses,
//!   and seeded wideband ray-based channel synthesis
//! - [`beam`]: classical phase-shifter beamforming, array gain, and the
//!   beam split ratio (BSR) metric
//! - [`dpp`]: delay-phase precoding beams, direction rotation factors, and
//!   expected-array-gain formulas
//! - [`ttd`]: TTD delay vectors, segment-phased PS beamformers, and the
//!   hybrid precoding algorithm for the TTD-DPP structure
//! - [`evaluate`]: achievable rates, the fully-digital benchmark, and the
//!   power / energy-efficiency model

pub mod beam;
pub mod dpp;
pub mod evaluate;
pub mod numerics;
pub mod sysmodel;
pub mod ttd;

pub use beam::{Beamformer, BeamformerKind};
pub use evaluate::{PowerModel, RateReport, Scheme};
pub use numerics::{ComplexMatrix, SvdResult};
pub use sysmodel::{PathComponent, SystemConfig, WidebandChannel};
pub use ttd::TtdPrecoder;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at row {row}, col {col}")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("subcarrier index {m} out of range 1..={max}")]
    SubcarrierOutOfRange { m: usize, max: usize },
    #[error("power constraint violated at subcarrier {m}: |A D|_F^2 = {got}, expected {expected}")]
    PowerConstraint { m: usize, got: f64, expected: f64 },
    #[error("unknown scheme: {0}")]
    UnknownScheme(String),
}

pub type Result<T> = std::result::Result<T, Error>;

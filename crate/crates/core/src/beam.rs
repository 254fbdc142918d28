//! Classical frequency-independent beamforming and beam split analysis.
//!
//! A classical analog beamformer steers all subcarriers with the same
//! phase-shifter weights, so the beam at subcarrier `m` points at
//! `theta_l / xi_m` instead of the target `theta_l`. The beam split ratio
//! (BSR) averages the resulting pointing deviation against half the
//! beamwidth `2 / n_t`; a value above 1 means the mainlobes no longer cover
//! the target on average.

use num_complex::Complex64;

use crate::numerics::integrate_uniform;
use crate::sysmodel::{array_response, SystemConfig};
use crate::{Error, Result};

/// Analog beamforming vector under the constant-modulus PS constraint:
/// every weight has magnitude `1/sqrt(n_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: Vec<Complex64>,
    pub kind: BeamformerKind,
    /// Set for DPP beams, which are built per subcarrier.
    pub subcarrier: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamformerKind {
    Classical,
    Dpp,
}

/// Dirichlet sinc `sin(n pi x / 2) / sin(pi x / 2)`.
///
/// The removable singularities at even integers take their limit value
/// `n cos(n pi x / 2) / cos(pi x / 2)` (= plus or minus `n`).
pub fn dirichlet_sinc(n: usize, x: f64) -> f64 {
    let half = std::f64::consts::FRAC_PI_2 * x;
    let denom = half.sin();
    // Distance to the nearest even integer decides whether we are at (or
    // essentially at) a removable singularity.
    let nearest_even = 2.0 * (x / 2.0).round();
    if (x - nearest_even).abs() < 1e-9 || denom == 0.0 {
        n as f64 * (n as f64 * half).cos() / half.cos()
    } else {
        (n as f64 * half).sin() / denom
    }
}

/// Steer a classical beam at the physical direction `theta`.
pub fn classical_beamformer(cfg: &SystemConfig, theta: f64) -> Result<Beamformer> {
    if theta.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "physical direction {theta} outside [-1, 1]"
        )));
    }
    Ok(Beamformer {
        weights: array_response(cfg.n_t, theta),
        kind: BeamformerKind::Classical,
        subcarrier: None,
    })
}

/// Normalized array gain `|f_t(xi theta)^H w|` at an explicit normalized
/// frequency `xi`.
pub fn array_gain_at_xi(b: &Beamformer, theta: f64, xi: f64) -> f64 {
    let n = b.weights.len();
    let probe = array_response(n, xi * theta);
    probe
        .iter()
        .zip(&b.weights)
        .map(|(p, w)| p.conj() * w)
        .sum::<Complex64>()
        .norm()
}

/// Normalized array gain of `b` in the physical direction `theta` at
/// subcarrier `m`. Always in `[0, 1]`.
pub fn array_gain(cfg: &SystemConfig, b: &Beamformer, theta: f64, m: usize) -> Result<f64> {
    if theta.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "physical direction {theta} outside [-1, 1]"
        )));
    }
    Ok(array_gain_at_xi(b, theta, cfg.xi(m)?))
}

/// Physical direction a classical beam steered at `theta_l` actually points
/// to at normalized frequency `xi_m`: `theta_l / xi_m`.
pub fn beam_pointing_direction(theta_l: f64, xi_m: f64) -> f64 {
    theta_l / xi_m
}

/// Upper bound `1 / (n_t sin(3 pi / (2 n_t)))` on the gain at the target
/// direction once the mainlobe has moved away.
pub fn gain_upper_bound(n_t: usize) -> f64 {
    1.0 / (n_t as f64 * (1.5 * std::f64::consts::PI / n_t as f64).sin())
}

/// Beam split ratio, closed form: `(n_t / (4 M)) sum_m |xi_m - 1|`.
///
/// Uses the pointing-deviation approximation `|theta_{l,m} - theta_l| ->
/// |(xi_m - 1) theta_l|`, whose integral over directions is 1.
pub fn beam_split_ratio(cfg: &SystemConfig) -> f64 {
    let m_total = cfg.m_subcarriers as f64;
    let sum: f64 = (1..=cfg.m_subcarriers)
        .map(|m| (cfg.xi(m).unwrap() - 1.0).abs())
        .sum();
    cfg.n_t as f64 / (4.0 * m_total) * sum
}

/// Quadrature cross-check of [`beam_split_ratio`]: integrates the ratio of
/// pointing deviation to half beamwidth over directions numerically.
pub fn beam_split_ratio_quadrature(cfg: &SystemConfig, panels: usize) -> Result<f64> {
    let m_total = cfg.m_subcarriers as f64;
    let xis: Vec<f64> = (1..=cfg.m_subcarriers)
        .map(|m| cfg.xi(m).unwrap())
        .collect();
    let n_t = cfg.n_t as f64;
    integrate_uniform(
        |theta| {
            xis.iter()
                .map(|xi| 0.5 * (n_t * (xi - 1.0) * theta).abs())
                .sum::<f64>()
                / m_total
        },
        -1.0,
        1.0,
        panels,
    )
    .map(|v| v / 2.0)
}

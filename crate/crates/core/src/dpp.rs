//! Delay-phase precoding: frequency-dependent analog beams that stay
//! aligned with the target direction across the whole band.
//!
//! Each RF chain drives `k_td` time-delay elements, each feeding a group of
//! `p_group = n_t / k_td` phase shifters. The PS layer steers the beam at
//! the target direction; the TD layer applies a per-subcarrier phase
//! progression (the direction rotation factor `beta`) that rotates the
//! beam's pointing direction back onto the target at every subcarrier.

use num_complex::Complex64;

use crate::beam::{dirichlet_sinc, Beamformer, BeamformerKind};
use crate::numerics::integrate_uniform;
use crate::sysmodel::{array_response, SystemConfig};
use crate::{Error, Result};

/// Simpson panel count for the exact expectation integrals.
const EXPECTATION_PANELS: usize = 2048;

/// Direction rotation factor `beta_{l,m} = (xi_m - 1) P theta_l`.
pub fn rotation_factor(xi_m: f64, p_group: usize, theta_l: f64) -> f64 {
    (xi_m - 1.0) * p_group as f64 * theta_l
}

/// Minimum TD element count `(f_M / f_c - 1) n_t` that keeps the rotation
/// factor inside `[-1, 1]` for every direction and subcarrier. Callers
/// round up to an integer divisor of `n_t` (see [`ceil_to_divisor`]).
pub fn min_td_elements(cfg: &SystemConfig) -> Result<f64> {
    let f_max = cfg.subcarrier_frequency(cfg.m_subcarriers)?;
    Ok((f_max / cfg.f_c - 1.0) * cfg.n_t as f64)
}

/// Same bound with the half-band approximation `f_M ~ f_c + B/2`.
pub fn min_td_elements_half_band(cfg: &SystemConfig) -> f64 {
    cfg.bandwidth / (2.0 * cfg.f_c) * cfg.n_t as f64
}

/// Smallest `k >= k_min` that divides `n_t`.
pub fn ceil_to_divisor(n_t: usize, k_min: f64) -> usize {
    let start = k_min.ceil().max(1.0) as usize;
    (start..=n_t)
        .find(|k| n_t % k == 0)
        .expect("n_t divides itself")
}

/// PS phase matrix and per-subcarrier rotation factors for one target
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DppDesign {
    pub theta_l: f64,
    pub k_td: usize,
    pub p_group: usize,
    /// `k_td` constant-modulus sub-vectors of length `p_group` whose
    /// concatenation is the steering vector at `theta_l`.
    pub ps_segment_vectors: Vec<Vec<Complex64>>,
    /// `beta_{l,m}` for every subcarrier.
    pub rotation_factors: Vec<f64>,
}

impl DppDesign {
    pub fn new(cfg: &SystemConfig, theta_l: f64) -> Result<Self> {
        check_dpp_inputs(cfg, theta_l)?;
        let p = cfg.p_group();
        let steering = array_response(cfg.n_t, theta_l);
        let ps_segment_vectors = steering.chunks(p).map(|c| c.to_vec()).collect();
        let rotation_factors = (1..=cfg.m_subcarriers)
            .map(|m| rotation_factor(cfg.xi(m).unwrap(), p, theta_l))
            .collect();
        Ok(Self {
            theta_l,
            k_td: cfg.k_td,
            p_group: p,
            ps_segment_vectors,
            rotation_factors,
        })
    }
}

fn check_dpp_inputs(cfg: &SystemConfig, theta_l: f64) -> Result<()> {
    cfg.validate()?;
    if cfg.k_td == 0 || cfg.n_t % cfg.k_td != 0 {
        return Err(Error::InvalidConfig(format!(
            "k_td={} must divide n_t={}",
            cfg.k_td, cfg.n_t
        )));
    }
    if theta_l.abs() > 1.0 {
        return Err(Error::InvalidArgument(format!(
            "physical direction {theta_l} outside [-1, 1]"
        )));
    }
    Ok(())
}

/// DPP analog beam for subcarrier `m`: the steering vector at `theta_l`
/// with the segment-wise rotation phases `e^{-j pi (k-1) beta}` applied.
///
/// `beta` outside `[-1, 1]` (when `k_td` is below the minimum) is not
/// clipped; the phase vector is 2-periodic in `beta` and stays well-defined.
pub fn dpp_beamformer(cfg: &SystemConfig, theta_l: f64, m: usize) -> Result<Beamformer> {
    check_dpp_inputs(cfg, theta_l)?;
    let p = cfg.p_group();
    let beta = rotation_factor(cfg.xi(m)?, p, theta_l);
    let mut weights = array_response(cfg.n_t, theta_l);
    for k in 0..cfg.k_td {
        let rot = Complex64::from_polar(1.0, -std::f64::consts::PI * k as f64 * beta);
        for w in &mut weights[k * p..(k + 1) * p] {
            *w *= rot;
        }
    }
    Ok(Beamformer {
        weights,
        kind: BeamformerKind::Dpp,
        subcarrier: Some(m),
    })
}

/// Direction the DPP beam points to at normalized frequency `xi_m`:
/// `theta_l / xi_m + beta / (xi_m P)`. With `beta` from
/// [`rotation_factor`] this is exactly `theta_l`.
pub fn dpp_pointing_direction(theta_l: f64, xi_m: f64, p_group: usize, beta: f64) -> f64 {
    theta_l / xi_m + beta / (xi_m * p_group as f64)
}

/// Peak gain of the DPP beam at its pointing direction:
/// `(K / n_t) |Xi_P(beta / P)|`.
pub fn dpp_peak_gain(n_t: usize, k_td: usize, beta: f64) -> f64 {
    let p = n_t / k_td;
    k_td as f64 / n_t as f64 * dirichlet_sinc(p, beta / p as f64).abs()
}

/// How the expectation integrals over directions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainAveraging {
    /// Three-point polynomial fit of the Dirichlet kernel.
    Approx,
    /// Composite Simpson quadrature over `theta in [-1, 1]`.
    Exact,
}

/// Expected array gain of the DPP beam over all subcarriers and directions
/// uniform on `[-1, 1]`.
pub fn expected_gain(cfg: &SystemConfig, mode: GainAveraging) -> Result<f64> {
    check_dpp_inputs(cfg, 0.0)?;
    let p = cfg.p_group();
    let (k, n_t, m_total) = (cfg.k_td as f64, cfg.n_t as f64, cfg.m_subcarriers as f64);
    let mut acc = 0.0;
    for m in 1..=cfg.m_subcarriers {
        let x = cfg.xi(m)? - 1.0;
        acc += match mode {
            GainAveraging::Approx => {
                2.0 / 3.0 * dirichlet_sinc(p, x).abs() + 4.0 / 3.0 * p as f64
            }
            GainAveraging::Exact => integrate_uniform(
                |theta| dirichlet_sinc(p, x * theta).abs(),
                -1.0,
                1.0,
                EXPECTATION_PANELS,
            )?,
        };
    }
    Ok(k / (2.0 * m_total * n_t) * acc)
}

/// Expected squared array gain, the rate-ratio lower bound.
pub fn expected_gain_squared(cfg: &SystemConfig, mode: GainAveraging) -> Result<f64> {
    check_dpp_inputs(cfg, 0.0)?;
    let p = cfg.p_group();
    let (k, n_t, m_total) = (cfg.k_td as f64, cfg.n_t as f64, cfg.m_subcarriers as f64);
    let mut acc = 0.0;
    for m in 1..=cfg.m_subcarriers {
        let x = cfg.xi(m)? - 1.0;
        acc += match mode {
            GainAveraging::Approx => {
                let xi_p = dirichlet_sinc(p, x);
                2.0 / 3.0 * xi_p * xi_p + 4.0 / 3.0 * (p * p) as f64
            }
            GainAveraging::Exact => integrate_uniform(
                |theta| {
                    let v = dirichlet_sinc(p, x * theta);
                    v * v
                },
                -1.0,
                1.0,
                EXPECTATION_PANELS,
            )?,
        };
    }
    Ok(k * k / (2.0 * m_total * n_t * n_t) * acc)
}

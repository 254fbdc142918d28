//! System configuration, subcarrier grid, array responses, and wideband
//! ray-based channel synthesis.
//!
//! The channel is the standard wideband ray model: `L` planar-wave paths,
//! each with a complex gain, a propagation delay, and physical directions
//! (stored as sines in `[-1, 1]`) at the transmit and receive uniform
//! linear arrays. Per-subcarrier frequency-domain matrices are assembled
//! in closed form from these parameters.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Path delays are drawn uniformly from `[0, 20 ns)`. Delays only enter the
/// channel as per-subcarrier unit-modulus phases, so any bounded support
/// works; this constant documents the one used.
pub const MAX_PATH_DELAY_S: f64 = 20e-9;

/// Full scenario description.
///
/// Antenna spacing is half a wavelength at the central frequency and the
/// carrier period follow from `f_c`; both are exposed as derived accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// BS antenna count (transmit ULA size).
    pub n_t: usize,
    /// User antenna count.
    pub n_r: usize,
    /// RF-chain count.
    pub n_rf: usize,
    /// Stream count.
    pub n_s: usize,
    /// Resolvable path count.
    pub n_paths: usize,
    /// OFDM subcarrier count.
    pub m_subcarriers: usize,
    /// TD elements per RF chain. `n_t` must be divisible by it.
    pub k_td: usize,
    /// Central frequency in Hz.
    pub f_c: f64,
    /// Bandwidth in Hz.
    pub bandwidth: f64,
    /// Transmit SNR (rho / sigma^2) in dB.
    pub snr_db: f64,
    /// RNG seed; trial `t` of a Monte-Carlo run uses sub-stream `t`.
    pub seed: u64,
}

impl SystemConfig {
    /// The THz scenario used throughout the simulations: 256 BS antennas,
    /// 4 user antennas, 4 paths, 300 GHz carrier, 30 GHz bandwidth,
    /// 128 subcarriers, 4 RF chains, 16 TD elements per chain.
    pub fn thz() -> Self {
        Self {
            n_t: 256,
            n_r: 4,
            n_rf: 4,
            n_s: 4,
            n_paths: 4,
            m_subcarriers: 128,
            k_td: 16,
            f_c: 300e9,
            bandwidth: 30e9,
            snr_db: 10.0,
            seed: 1,
        }
    }

    /// mmWave comparison scenario: 28 GHz carrier, 2 GHz bandwidth, 64 antennas.
    pub fn mmwave() -> Self {
        Self {
            n_t: 64,
            k_td: 4,
            f_c: 28e9,
            bandwidth: 2e9,
            ..Self::thz()
        }
    }

    /// Sub-6 GHz comparison scenario: 3.5 GHz carrier, 0.1 GHz bandwidth, 16 antennas.
    pub fn sub6() -> Self {
        Self {
            n_t: 16,
            k_td: 4,
            f_c: 3.5e9,
            bandwidth: 0.1e9,
            ..Self::thz()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_t == 0 || self.n_r == 0 || self.n_rf == 0 || self.n_s == 0 {
            return fail("antenna, RF-chain, and stream counts must be positive".into());
        }
        if !(self.n_s <= self.n_rf && self.n_rf <= self.n_t) {
            return fail(format!(
                "need n_s <= n_rf <= n_t, got n_s={}, n_rf={}, n_t={}",
                self.n_s, self.n_rf, self.n_t
            ));
        }
        if self.n_paths == 0 {
            return fail("need at least one path".into());
        }
        if self.n_rf > self.n_paths {
            return fail(format!(
                "each RF chain serves one path: n_rf={} exceeds n_paths={}",
                self.n_rf, self.n_paths
            ));
        }
        if self.m_subcarriers == 0 {
            return fail("need at least one subcarrier".into());
        }
        if self.k_td > 0 && self.n_t % self.k_td != 0 {
            return fail(format!(
                "n_t={} not divisible by k_td={}",
                self.n_t, self.k_td
            ));
        }
        if self.bandwidth < 0.0 {
            return fail(format!("negative bandwidth {}", self.bandwidth));
        }
        if !(self.f_c > self.bandwidth / 2.0) {
            return fail(format!(
                "central frequency {} must exceed half the bandwidth {}",
                self.f_c,
                self.bandwidth / 2.0
            ));
        }
        Ok(())
    }

    /// Antenna spacing `d = c / (2 f_c)` (half wavelength at the carrier).
    pub fn antenna_spacing(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.f_c)
    }

    /// Carrier period `T_c = 1 / f_c` in seconds.
    pub fn carrier_period(&self) -> f64 {
        1.0 / self.f_c
    }

    /// PS group size per TD element, `P = n_t / k_td`.
    pub fn p_group(&self) -> usize {
        debug_assert!(self.k_td > 0 && self.n_t % self.k_td == 0);
        self.n_t / self.k_td
    }

    /// Frequency of the 1-based subcarrier `m`:
    /// `f_m = f_c + (B/M) (m - 1 - (M-1)/2)`.
    pub fn subcarrier_frequency(&self, m: usize) -> Result<f64> {
        if m < 1 || m > self.m_subcarriers {
            return Err(Error::SubcarrierOutOfRange {
                m,
                max: self.m_subcarriers,
            });
        }
        let offset = (m - 1) as f64 - (self.m_subcarriers - 1) as f64 / 2.0;
        Ok(self.f_c + self.bandwidth / self.m_subcarriers as f64 * offset)
    }

    /// Normalized subcarrier frequency `xi_m = f_m / f_c`.
    pub fn xi(&self, m: usize) -> Result<f64> {
        Ok(self.subcarrier_frequency(m)? / self.f_c)
    }

    /// Spatial direction seen by the array at subcarrier `m` for a physical
    /// direction (sine) `theta`: `xi_m * theta`.
    pub fn spatial_direction(&self, theta: f64, m: usize) -> Result<f64> {
        if theta.abs() > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "physical direction {theta} outside [-1, 1]"
            )));
        }
        Ok(self.xi(m)? * theta)
    }
}

/// ULA array response `(1/sqrt(n)) [1, e^{j pi psi}, ..., e^{j pi (n-1) psi}]^H`.
///
/// Stored with the conjugation applied, i.e. entry `k` is
/// `(1/sqrt(n)) e^{-j pi k psi}`. Unit Euclidean norm by construction.
pub fn array_response(n: usize, spatial_direction: f64) -> Vec<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| Complex64::from_polar(scale, -std::f64::consts::PI * k as f64 * spatial_direction))
        .collect()
}

/// One resolvable propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    /// Complex gain `g_l`.
    pub gain: Complex64,
    /// Propagation delay in seconds.
    pub delay_s: f64,
    /// BS-side physical direction, stored as a sine in `[-1, 1]`.
    pub theta: f64,
    /// User-side physical direction, stored as a sine in `[-1, 1]`.
    pub phi: f64,
}

/// Per-subcarrier frequency-domain channel plus its generating paths.
///
/// Paths are sorted by descending gain magnitude; `h[m-1]` is the
/// `n_t x n_r` matrix at subcarrier `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WidebandChannel {
    pub paths: Vec<PathComponent>,
    pub h: Vec<crate::numerics::ComplexMatrix>,
}

impl WidebandChannel {
    /// Assemble the per-subcarrier matrices from explicit path parameters:
    /// `H_m = sum_l g_l e^{-j 2 pi tau_l f_m} f_t(xi_m theta_l) f_r(xi_m phi_l)^H`.
    ///
    /// Paths are re-sorted by descending gain magnitude.
    pub fn from_paths(cfg: &SystemConfig, mut paths: Vec<PathComponent>) -> Result<Self> {
        cfg.validate()?;
        if paths.is_empty() {
            return Err(Error::InvalidConfig("channel needs at least one path".into()));
        }
        for p in &paths {
            if p.theta.abs() > 1.0 || p.phi.abs() > 1.0 {
                return Err(Error::InvalidArgument(
                    "path direction outside [-1, 1]".into(),
                ));
            }
            if p.delay_s < 0.0 {
                return Err(Error::InvalidArgument("negative path delay".into()));
            }
        }
        paths.sort_by(|a, b| b.gain.norm().partial_cmp(&a.gain.norm()).unwrap());

        let mut h = Vec::with_capacity(cfg.m_subcarriers);
        for m in 1..=cfg.m_subcarriers {
            let f_m = cfg.subcarrier_frequency(m)?;
            let xi = f_m / cfg.f_c;
            let mut hm = crate::numerics::ComplexMatrix::zeros(cfg.n_t, cfg.n_r);
            for p in &paths {
                let ft = array_response(cfg.n_t, xi * p.theta);
                let fr = array_response(cfg.n_r, xi * p.phi);
                let c = p.gain
                    * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * p.delay_s * f_m);
                for i in 0..cfg.n_t {
                    let left = c * ft[i];
                    for j in 0..cfg.n_r {
                        hm[(i, j)] += left * fr[j].conj();
                    }
                }
            }
            h.push(hm);
        }
        Ok(Self { paths, h })
    }
}

/// RNG for Monte-Carlo trial `trial` of the configured seed.
///
/// Stream-splitting rule: ChaCha8 seeded with `cfg.seed`, word stream set to
/// the trial index. Every trial draws from an independent stream, so trials
/// can run concurrently and any single trial can be reproduced in isolation.
pub fn trial_rng(cfg: &SystemConfig, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    rng
}

/// Draw a random wideband channel for Monte-Carlo trial `trial`.
///
/// Physical angles are uniform on `[-pi/2, pi/2]` (stored as sines), gains
/// circularly-symmetric complex Gaussian with unit variance, delays uniform
/// on `[0, MAX_PATH_DELAY_S)`. Deterministic for a fixed `(seed, trial)`.
pub fn generate_channel_trial(cfg: &SystemConfig, trial: u64) -> Result<WidebandChannel> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg, trial);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let angle = Uniform::new(-half_pi, half_pi);
    let delay = Uniform::new(0.0, MAX_PATH_DELAY_S);
    let gauss = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();

    let mut paths = Vec::with_capacity(cfg.n_paths);
    for _ in 0..cfg.n_paths {
        let theta = angle.sample(&mut rng).sin();
        let phi = angle.sample(&mut rng).sin();
        let gain = Complex64::new(gauss.sample(&mut rng), gauss.sample(&mut rng));
        let delay_s = delay.sample(&mut rng);
        paths.push(PathComponent {
            gain,
            delay_s,
            theta,
            phi,
        });
    }
    WidebandChannel::from_paths(cfg, paths)
}

/// Trial 0 of [`generate_channel_trial`].
pub fn generate_channel(cfg: &SystemConfig) -> Result<WidebandChannel> {
    generate_channel_trial(cfg, 0)
}

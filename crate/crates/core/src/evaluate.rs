//! Achievable-rate evaluation, the fully-digital benchmark, and the
//! power / energy-efficiency model.
//!
//! Rates are per-subcarrier spectral efficiencies in bits/s/Hz under uniform
//! power allocation over `n_s` streams. The SNR knob is the transmit ratio
//! `rho / sigma^2` in dB with the noise power normalized to 1.

use num_complex::Complex64;

use crate::numerics::{logdet_hermitian_psd, matmul, svd, ComplexMatrix};
use crate::sysmodel::{generate_channel_trial, SystemConfig, WidebandChannel};
use crate::ttd::{algorithm1_precode, classical_hybrid_precode, TtdPrecoder};
use crate::{Error, Result};

/// Precoding architectures the evaluator can score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Unconstrained fully-digital SVD precoding (upper benchmark).
    Optimal,
    /// Delay-phase precoding with `k_td` TTDs per RF chain.
    TtdDpp,
    /// Classical hybrid precoding, frequency-flat analog beams.
    ClassicalHp,
    /// One TTD per antenna (`k_td = n_t`), no phase shifters.
    TtdFull,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Optimal,
        Scheme::TtdDpp,
        Scheme::ClassicalHp,
        Scheme::TtdFull,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Optimal => "optimal",
            Scheme::TtdDpp => "ttd_dpp",
            Scheme::ClassicalHp => "classical_hp",
            Scheme::TtdFull => "ttd_full",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimal" => Ok(Scheme::Optimal),
            "ttd_dpp" => Ok(Scheme::TtdDpp),
            "classical_hp" => Ok(Scheme::ClassicalHp),
            "ttd_full" => Ok(Scheme::TtdFull),
            other => Err(Error::UnknownScheme(other.into())),
        }
    }
}

/// Per-subcarrier achievable rates of one scheme at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scheme: Scheme,
    pub snr_db: f64,
    /// Rate at each subcarrier in bits/s/Hz, index `m - 1`.
    pub per_subcarrier_rates: Vec<f64>,
    /// Sum over subcarriers.
    pub total: f64,
}

impl RateReport {
    fn new(scheme: Scheme, snr_db: f64, per_subcarrier_rates: Vec<f64>) -> Self {
        let total = per_subcarrier_rates.iter().sum();
        Self {
            scheme,
            snr_db,
            per_subcarrier_rates,
            total,
        }
    }

    /// Mean per-subcarrier rate.
    pub fn mean(&self) -> f64 {
        self.total / self.per_subcarrier_rates.len() as f64
    }
}

/// Component power draws in mW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub p_t: f64,
    pub p_bb: f64,
    pub p_rf: f64,
    pub p_ps: f64,
    pub p_ttd: f64,
}

impl Default for PowerModel {
    /// Reference values: 30 mW transmit, 300 mW baseband, 200 mW per RF
    /// chain, 20 mW per phase shifter, 100 mW per time delayer.
    fn default() -> Self {
        Self {
            p_t: 30.0,
            p_bb: 300.0,
            p_rf: 200.0,
            p_ps: 20.0,
            p_ttd: 100.0,
        }
    }
}

fn snr_linear(snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0)
}

/// Rate of an explicit hybrid precoder: `a_m` are the per-subcarrier
/// effective analog matrices (`n_t x n_rf`), `d_m` the digital precoders
/// (`n_rf x n_s`). The per-subcarrier power constraint
/// `|A_m D_m|_F^2 = n_s` is enforced to 1e-6.
pub fn achievable_rate(
    cfg: &SystemConfig,
    channel: &WidebandChannel,
    a_m: &[ComplexMatrix],
    d_m: &[ComplexMatrix],
    scheme: Scheme,
) -> Result<RateReport> {
    cfg.validate()?;
    if a_m.len() != cfg.m_subcarriers || d_m.len() != cfg.m_subcarriers {
        return Err(Error::Shape(format!(
            "need {} per-subcarrier precoders, got {} analog and {} digital",
            cfg.m_subcarriers,
            a_m.len(),
            d_m.len()
        )));
    }
    let c = snr_linear(cfg.snr_db) / cfg.n_s as f64;
    let mut rates = Vec::with_capacity(cfg.m_subcarriers);
    for m in 1..=cfg.m_subcarriers {
        let f = matmul(&a_m[m - 1], &d_m[m - 1])?;
        let power = f.frobenius_norm().powi(2);
        if (power - cfg.n_s as f64).abs() > 1e-6 {
            return Err(Error::PowerConstraint {
                m,
                got: power,
                expected: cfg.n_s as f64,
            });
        }
        // Effective downlink channel is the conjugate transpose of the
        // stored n_t x n_r matrix.
        let g = matmul(&channel.h[m - 1].hermitian(), &f)?;
        let gram = matmul(&g, &g.hermitian())?.scale(Complex64::new(c, 0.0));
        let arg = ComplexMatrix::identity(cfg.n_r).add(&gram)?;
        rates.push(logdet_hermitian_psd(&arg)?);
    }
    Ok(RateReport::new(scheme, cfg.snr_db, rates))
}

/// Rate of a built [`TtdPrecoder`]. Uses the precoder's own configuration
/// (which may differ from the channel-generating one, e.g. in `k_td`).
pub fn precoder_rate(
    channel: &WidebandChannel,
    precoder: &TtdPrecoder,
    scheme: Scheme,
) -> Result<RateReport> {
    let cfg = &precoder.cfg;
    let mut a_m = Vec::with_capacity(cfg.m_subcarriers);
    for m in 1..=cfg.m_subcarriers {
        a_m.push(precoder.effective_analog(m)?);
    }
    achievable_rate(cfg, channel, &a_m, &precoder.d_m, scheme)
}

/// Fully-digital benchmark: per subcarrier, the top `n_s` singular values
/// of the effective channel feed the closed-form rate
/// `sum_i log2(1 + (rho / n_s sigma^2) sigma_i^2)`.
pub fn optimal_rate(cfg: &SystemConfig, channel: &WidebandChannel) -> Result<RateReport> {
    cfg.validate()?;
    let c = snr_linear(cfg.snr_db) / cfg.n_s as f64;
    let mut rates = Vec::with_capacity(cfg.m_subcarriers);
    for hm in &channel.h {
        let dec = svd(hm)?;
        let rate: f64 = dec
            .singular_values
            .iter()
            .take(cfg.n_s)
            .map(|s| (1.0 + c * s * s).log2())
            .sum();
        rates.push(rate);
    }
    Ok(RateReport::new(Scheme::Optimal, cfg.snr_db, rates))
}

/// Analytic lower bound on the per-subcarrier ratio `R_ttd / R_opt`: the
/// expected squared array gain of the DPP beams.
pub fn rate_lower_bound(cfg: &SystemConfig) -> Result<f64> {
    crate::dpp::expected_gain_squared(cfg, crate::dpp::GainAveraging::Approx)
}

/// Total front-end power draw of a hardware scheme in mW.
pub fn power_consumption(model: &PowerModel, scheme: Scheme, cfg: &SystemConfig) -> Result<f64> {
    let n_rf = cfg.n_rf as f64;
    let n_t = cfg.n_t as f64;
    let k = cfg.k_td as f64;
    match scheme {
        Scheme::ClassicalHp => Ok(model.p_t + model.p_bb + n_rf * (model.p_rf + n_t * model.p_ps)),
        Scheme::TtdFull => Ok(model.p_t + model.p_bb + n_rf * (model.p_rf + n_t * model.p_ttd)),
        Scheme::TtdDpp => Ok(model.p_t
            + model.p_bb
            + n_rf * (model.p_rf + k * model.p_ttd + n_t * model.p_ps)),
        Scheme::Optimal => Err(Error::UnknownScheme(
            "optimal (no hardware power model for the fully-digital benchmark)".into(),
        )),
    }
}

/// Rate per unit power, `bits/s/Hz/mW`.
pub fn energy_efficiency(rate_bps_hz: f64, power_mw: f64) -> Result<f64> {
    if power_mw <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "power must be positive, got {power_mw} mW"
        )));
    }
    Ok(rate_bps_hz / power_mw)
}

/// Build the scheme's precoder for `channel` and score it. For
/// [`Scheme::TtdFull`] the TD layer is widened to one delayer per antenna.
pub fn scheme_rate(
    cfg: &SystemConfig,
    channel: &WidebandChannel,
    scheme: Scheme,
) -> Result<RateReport> {
    match scheme {
        Scheme::Optimal => optimal_rate(cfg, channel),
        Scheme::TtdDpp => {
            let prec = algorithm1_precode(cfg, channel)?;
            precoder_rate(channel, &prec, scheme)
        }
        Scheme::ClassicalHp => {
            let prec = classical_hybrid_precode(cfg, channel)?;
            precoder_rate(channel, &prec, scheme)
        }
        Scheme::TtdFull => {
            let full = SystemConfig {
                k_td: cfg.n_t,
                ..cfg.clone()
            };
            let prec = algorithm1_precode(&full, channel)?;
            precoder_rate(channel, &prec, scheme)
        }
    }
}

/// Sample mean and standard error of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloStat {
    pub mean: f64,
    pub stderr: f64,
}

impl MonteCarloStat {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }
}

/// Mean per-subcarrier rate of `scheme` over seeded Monte-Carlo trials.
/// Trial `t` draws its channel from RNG sub-stream `t`, so the estimate is
/// reproducible and any trial can be replayed in isolation.
pub fn monte_carlo_mean_rate(
    cfg: &SystemConfig,
    scheme: Scheme,
    trials: usize,
) -> Result<MonteCarloStat> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut samples = Vec::with_capacity(trials);
    for t in 0..trials {
        let channel = generate_channel_trial(cfg, t as u64)?;
        samples.push(scheme_rate(cfg, &channel, scheme)?.mean());
    }
    Ok(MonteCarloStat::from_samples(&samples))
}

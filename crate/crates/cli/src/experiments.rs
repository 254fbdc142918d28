//! Experiment runners: each produces CSV comment lines, a column header,
//! and data rows, plus a matching gnuplot script on request.

use beamsplit_core::beam::{array_gain_at_xi, beam_split_ratio, classical_beamformer, Beamformer};
use beamsplit_core::dpp::dpp_beamformer;
use beamsplit_core::evaluate::{
    energy_efficiency, monte_carlo_mean_rate, power_consumption, rate_lower_bound,
};
use beamsplit_core::{PowerModel, Scheme, SystemConfig};

use crate::config::echo;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum RunError {
    /// Invalid request (bad flag combination, unknown scheme, ...): exit 2.
    Usage(String),
    /// Failure while computing or writing results: exit 3.
    Runtime(String),
}

impl From<beamsplit_core::Error> for RunError {
    fn from(e: beamsplit_core::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

/// Fully resolved experiment request.
pub struct RunSpec {
    pub cfg: SystemConfig,
    pub preset_name: Option<&'static str>,
    pub trials: usize,
    pub theta: f64,
    /// Explicit `--snr-db` (fixes rate-sweep to a single point).
    pub snr_db: Option<f64>,
    /// Explicit `--k` (fixes k-sweep to a single value).
    pub k: Option<usize>,
    /// Beam-gain scheme filter (`classical` / `dpp`); empty = both.
    pub schemes: Vec<String>,
}

/// CSV payload of one experiment run.
pub struct Report {
    pub comments: Vec<String>,
    pub columns: &'static str,
    pub rows: Vec<String>,
}

impl Report {
    fn new(name: &str, spec: &RunSpec, columns: &'static str) -> Self {
        let mut comments = vec![
            format!("beamsplit v{VERSION}"),
            format!("experiment: {name}"),
            format!("preset: {}", spec.preset_name.unwrap_or("(none)")),
            format!("config: {}", echo(&spec.cfg)),
            format!("trials: {}", spec.trials),
        ];
        comments.push(
            "rates are mean per-subcarrier spectral efficiencies in bits/s/Hz".into(),
        );
        Self {
            comments,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(self.columns);
        out.push('\n');
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

fn beam_schemes(spec: &RunSpec) -> Result<Vec<&'static str>, RunError> {
    if spec.schemes.is_empty() {
        return Ok(vec!["classical", "dpp"]);
    }
    let mut out = Vec::new();
    for s in &spec.schemes {
        match s.as_str() {
            "classical" => out.push("classical"),
            "dpp" => out.push("dpp"),
            other => {
                return Err(RunError::Usage(format!(
                    "unknown beam scheme `{other}` (expected classical or dpp)"
                )))
            }
        }
    }
    Ok(out)
}

fn check_theta(theta: f64) -> Result<(), RunError> {
    if theta.abs() > 1.0 {
        return Err(RunError::Usage(format!(
            "theta (a direction sine) must lie in [-1, 1], got {theta}"
        )));
    }
    Ok(())
}

/// Beam weights of `scheme` for the frequency label. At the carrier
/// frequency the DPP rotation vanishes, so both schemes reduce to the plain
/// steering beam there.
fn beam_for(
    cfg: &SystemConfig,
    scheme: &str,
    theta: f64,
    m: Option<usize>,
) -> Result<Beamformer, RunError> {
    Ok(match (scheme, m) {
        ("dpp", Some(m)) => dpp_beamformer(cfg, theta, m)?,
        _ => classical_beamformer(cfg, theta)?,
    })
}

/// Gain vs direction at the edge and central frequencies.
pub fn beam_pattern(spec: &RunSpec) -> Result<Report, RunError> {
    check_theta(spec.theta)?;
    let cfg = &spec.cfg;
    let mut report = Report::new("beam-pattern", spec, "theta,scheme,freq_label,gain");
    report
        .comments
        .push(format!("steered direction theta_l = {}", spec.theta));
    let freqs: [(&str, Option<usize>); 3] = [
        ("f1", Some(1)),
        ("fc", None),
        ("fM", Some(cfg.m_subcarriers)),
    ];
    for scheme in beam_schemes(spec)? {
        for (label, m) in freqs {
            let xi = match m {
                Some(m) => cfg.xi(m)?,
                None => 1.0,
            };
            let beam = beam_for(cfg, scheme, spec.theta, m)?;
            let mut theta = -1.0f64;
            while theta <= 1.0 + 1e-12 {
                let gain = array_gain_at_xi(&beam, theta.clamp(-1.0, 1.0), xi);
                report
                    .rows
                    .push(format!("{theta:.3},{scheme},{label},{gain:.6}"));
                theta += 1e-3;
            }
        }
    }
    Ok(report)
}

/// Gain at the target direction vs subcarrier index.
pub fn gain_profile(spec: &RunSpec) -> Result<Report, RunError> {
    check_theta(spec.theta)?;
    let cfg = &spec.cfg;
    let mut report = Report::new("gain-profile", spec, "m,scheme,bandwidth_hz,gain");
    report
        .comments
        .push(format!("steered direction theta_l = {}", spec.theta));
    for scheme in beam_schemes(spec)? {
        for m in 1..=cfg.m_subcarriers {
            let beam = beam_for(cfg, scheme, spec.theta, Some(m))?;
            let gain = array_gain_at_xi(&beam, spec.theta, cfg.xi(m)?);
            report
                .rows
                .push(format!("{m},{scheme},{},{gain:.6}", cfg.bandwidth));
        }
    }
    Ok(report)
}

/// Beam split ratio of the resolved config (when a preset was requested)
/// or of all three named presets.
pub fn bsr(spec: &RunSpec) -> Result<Report, RunError> {
    let mut report = Report::new("bsr", spec, "fc_hz,nt,m_subcarriers,bandwidth_hz,bsr");
    let configs: Vec<(&str, SystemConfig)> = match spec.preset_name {
        Some(name) => vec![(name, spec.cfg.clone())],
        None => vec![
            ("sub6", SystemConfig::sub6()),
            ("mmwave", SystemConfig::mmwave()),
            ("thz", SystemConfig::thz()),
        ],
    };
    for (name, cfg) in configs {
        cfg.validate()?;
        let ratio = beam_split_ratio(&cfg);
        report.comments.push(format!("row preset: {name}"));
        report.rows.push(format!(
            "{},{},{},{},{ratio}",
            cfg.f_c, cfg.n_t, cfg.m_subcarriers, cfg.bandwidth
        ));
    }
    Ok(report)
}

/// Mean rate vs SNR for the implemented schemes plus the analytic
/// rate-ratio lower bound applied to the optimal curve.
pub fn rate_sweep(spec: &RunSpec) -> Result<Report, RunError> {
    let mut report = Report::new("rate-sweep", spec, "snr_db,scheme,mean_rate,stderr");
    report.comments.push(
        "external baselines from the literature are out of scope; only schemes \
         implemented by this artifact are emitted"
            .into(),
    );
    let snrs: Vec<f64> = match spec.snr_db {
        Some(x) => vec![x],
        None => (-4..=3).map(|i| (i * 5) as f64).collect(),
    };
    for snr_db in snrs {
        let cfg = SystemConfig {
            snr_db,
            ..spec.cfg.clone()
        };
        let opt = monte_carlo_mean_rate(&cfg, Scheme::Optimal, spec.trials)?;
        for (scheme, stat) in [
            (Scheme::Optimal, opt),
            (
                Scheme::TtdDpp,
                monte_carlo_mean_rate(&cfg, Scheme::TtdDpp, spec.trials)?,
            ),
            (
                Scheme::ClassicalHp,
                monte_carlo_mean_rate(&cfg, Scheme::ClassicalHp, spec.trials)?,
            ),
        ] {
            report.rows.push(format!(
                "{snr_db},{scheme},{:.6},{:.6}",
                stat.mean, stat.stderr
            ));
        }
        let ratio = rate_lower_bound(&cfg)?;
        report.rows.push(format!(
            "{snr_db},lower_bound,{:.6},{:.6}",
            ratio * opt.mean,
            ratio * opt.stderr
        ));
    }
    Ok(report)
}

/// Mean DPP rate vs TD elements per chain at a fixed SNR.
pub fn k_sweep(spec: &RunSpec) -> Result<Report, RunError> {
    let mut report = Report::new("k-sweep", spec, "k,mean_rate,stderr");
    let ks: Vec<usize> = match spec.k {
        Some(k) => vec![k],
        None => vec![2, 4, 8, 16, 32],
    };
    for &k in &ks {
        if k == 0 || spec.cfg.n_t % k != 0 {
            return Err(RunError::Usage(format!(
                "k={k} must divide n_t={}",
                spec.cfg.n_t
            )));
        }
    }
    for k in ks {
        let cfg = SystemConfig {
            k_td: k,
            ..spec.cfg.clone()
        };
        let stat = monte_carlo_mean_rate(&cfg, Scheme::TtdDpp, spec.trials)?;
        report
            .rows
            .push(format!("{k},{:.6},{:.6}", stat.mean, stat.stderr));
    }
    Ok(report)
}

/// Energy efficiency vs RF-chain count for the three hardware schemes.
pub fn energy_sweep(spec: &RunSpec) -> Result<Report, RunError> {
    let mut report = Report::new("energy-sweep", spec, "n_rf,scheme,mean_rate,power_mw,ee");
    report.comments.push(
        "per n_rf, streams and user antennas are widened to n_rf and the path \
         count to max(n_paths, n_rf) so every chain has a path to serve"
            .into(),
    );
    let model = PowerModel::default();
    let mut dpp_beats_hp = true;
    for n_rf in 1..=16usize {
        let cfg = SystemConfig {
            n_rf,
            n_r: n_rf,
            n_s: n_rf,
            n_paths: spec.cfg.n_paths.max(n_rf),
            ..spec.cfg.clone()
        };
        let mut ee_by_scheme = Vec::new();
        for scheme in [Scheme::ClassicalHp, Scheme::TtdFull, Scheme::TtdDpp] {
            let stat = monte_carlo_mean_rate(&cfg, scheme, spec.trials)?;
            let power = power_consumption(&model, scheme, &cfg)?;
            let ee = energy_efficiency(stat.mean, power)?;
            ee_by_scheme.push((scheme, ee));
            report.rows.push(format!(
                "{n_rf},{scheme},{:.6},{power},{ee:.6e}",
                stat.mean
            ));
        }
        let ee_of = |s: Scheme| ee_by_scheme.iter().find(|(x, _)| *x == s).unwrap().1;
        if ee_of(Scheme::TtdDpp) <= ee_of(Scheme::ClassicalHp) {
            dpp_beats_hp = false;
        }
    }
    report.comments.push(format!(
        "informational: EE(ttd_dpp) > EE(classical_hp) at every n_rf: {dpp_beats_hp}"
    ));
    Ok(report)
}

/// Gnuplot script rendering the CSV; a pure side artifact that never
/// touches the data file.
pub fn plot_script(experiment: &str, csv_name: &str) -> String {
    let mut s = String::from("set datafile separator comma\nset key outside\nset grid\n");
    match experiment {
        "beam-pattern" => {
            s.push_str("set xlabel 'physical direction'\nset ylabel 'array gain'\n");
            s.push_str(&format!(
                "plot for [sch in \"classical dpp\"] for [fl in \"f1 fc fM\"] \
                 '{csv_name}' using 1:((strcol(2) eq sch && strcol(3) eq fl) ? $4 : 1/0) \
                 with lines title sch.' '.fl\n"
            ));
        }
        "gain-profile" => {
            s.push_str("set xlabel 'subcarrier index'\nset ylabel 'array gain'\n");
            s.push_str(&format!(
                "plot for [sch in \"classical dpp\"] '{csv_name}' \
                 using 1:((strcol(2) eq sch) ? $4 : 1/0) with lines title sch\n"
            ));
        }
        "bsr" => {
            s.push_str("set xlabel 'central frequency (Hz)'\nset ylabel 'BSR'\nset logscale x\n");
            s.push_str(&format!(
                "plot '{csv_name}' using 1:5 with points pt 7 title 'BSR'\n"
            ));
        }
        "rate-sweep" => {
            s.push_str("set xlabel 'SNR (dB)'\nset ylabel 'rate (bits/s/Hz)'\n");
            s.push_str(&format!(
                "plot for [sch in \"optimal ttd_dpp classical_hp lower_bound\"] \
                 '{csv_name}' using 1:((strcol(2) eq sch) ? $3 : 1/0) \
                 with linespoints title sch\n"
            ));
        }
        "k-sweep" => {
            s.push_str("set xlabel 'TD elements per RF chain'\nset ylabel 'rate (bits/s/Hz)'\nset logscale x 2\n");
            s.push_str(&format!(
                "plot '{csv_name}' using 1:2:3 with yerrorlines title 'ttd_dpp'\n"
            ));
        }
        "energy-sweep" => {
            s.push_str("set xlabel 'RF chains'\nset ylabel 'EE (bits/s/Hz/mW)'\n");
            s.push_str(&format!(
                "plot for [sch in \"classical_hp ttd_full ttd_dpp\"] \
                 '{csv_name}' using 1:((strcol(2) eq sch) ? $5 : 1/0) \
                 with linespoints title sch\n"
            ));
        }
        _ => {}
    }
    s
}

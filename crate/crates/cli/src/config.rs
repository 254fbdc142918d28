//! Configuration layering: built-in preset -> config file -> command-line
//! flags, later layers overriding earlier ones.

use std::path::Path;

use beamsplit_core::SystemConfig;

/// Named parameter presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Sub-6 GHz comparison scenario (3.5 GHz carrier, 16 antennas).
    Sub6,
    /// mmWave comparison scenario (28 GHz carrier, 64 antennas).
    Mmwave,
    /// THz reference scenario (300 GHz carrier, 256 antennas).
    Thz,
}

impl Preset {
    pub fn config(self) -> SystemConfig {
        match self {
            Preset::Sub6 => SystemConfig::sub6(),
            Preset::Mmwave => SystemConfig::mmwave(),
            Preset::Thz => SystemConfig::thz(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sub6 => "sub6",
            Preset::Mmwave => "mmwave",
            Preset::Thz => "thz",
        }
    }
}

/// Apply a flat `key = value` config file on top of `cfg`.
///
/// Keys mirror the `SystemConfig` fields; `#`-prefixed lines and blank
/// lines are ignored. Unknown keys and unparseable values are reported by
/// name.
pub fn apply_config_file(cfg: &mut SystemConfig, path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: &dyn std::fmt::Display| format!("line {}: invalid {key}: {e}", lineno + 1);
        match key {
            "n_t" => cfg.n_t = value.parse().map_err(|e| bad(&e))?,
            "n_r" => cfg.n_r = value.parse().map_err(|e| bad(&e))?,
            "n_rf" => cfg.n_rf = value.parse().map_err(|e| bad(&e))?,
            "n_s" => cfg.n_s = value.parse().map_err(|e| bad(&e))?,
            "n_paths" => cfg.n_paths = value.parse().map_err(|e| bad(&e))?,
            "m_subcarriers" => cfg.m_subcarriers = value.parse().map_err(|e| bad(&e))?,
            "k_td" => cfg.k_td = value.parse().map_err(|e| bad(&e))?,
            "f_c" => cfg.f_c = value.parse().map_err(|e| bad(&e))?,
            "bandwidth" => cfg.bandwidth = value.parse().map_err(|e| bad(&e))?,
            "snr_db" => cfg.snr_db = value.parse().map_err(|e| bad(&e))?,
            "seed" => cfg.seed = value.parse().map_err(|e| bad(&e))?,
            other => {
                return Err(format!(
                    "line {}: unknown configuration field `{other}`",
                    lineno + 1
                ))
            }
        }
    }
    Ok(())
}

/// One-line config echo for CSV headers (no timestamps: output must be
/// byte-identical across reruns).
pub fn echo(cfg: &SystemConfig) -> String {
    format!(
        "n_t={} n_r={} n_rf={} n_s={} n_paths={} m_subcarriers={} k_td={} \
         f_c={} bandwidth={} snr_db={} seed={}",
        cfg.n_t,
        cfg.n_r,
        cfg.n_rf,
        cfg.n_s,
        cfg.n_paths,
        cfg.m_subcarriers,
        cfg.k_td,
        cfg.f_c,
        cfg.bandwidth,
        cfg.snr_db,
        cfg.seed
    )
}

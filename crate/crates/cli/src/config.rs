//! Run-configuration resolution: command-line flags override the config file
//! named by `A2G_CONFIG` (plain `key = value` lines), which overrides the
//! built-in defaults (urban preset, 1.4 GHz, TX 202 m, RX 2 m).

use crate::CliError;
use a2g_core::{BsMode, LinkGeometry, ScenarioParams, ScenarioPreset};

/// Built-in defaults.
const DEFAULT_FREQ_HZ: f64 = 1.4e9;
const DEFAULT_H_TX: f64 = 202.0;
const DEFAULT_H_RX: f64 = 2.0;
pub const DEFAULT_D_MAX: f64 = 1500.0;
pub const DEFAULT_GRID_STEP: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 1;

/// Link and scenario flags shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Scenario preset: suburban, urban, dense-urban or high-rise-urban.
    #[arg(long, global = true)]
    pub scenario: Option<String>,

    /// Built-up area fraction (overrides the preset together with --beta and --gamma).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,

    /// Building density, buildings per km².
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Rayleigh scale of building heights, m.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,

    /// Carrier frequency; unit suffixes GHz, MHz, kHz, Hz accepted (default Hz).
    #[arg(long, global = true)]
    pub freq: Option<String>,

    /// Transmitter height, m.
    #[arg(long, global = true)]
    pub htx: Option<f64>,

    /// Receiver height, m.
    #[arg(long, global = true)]
    pub hrx: Option<f64>,

    /// Horizontal TX-RX distance, m (exclusive with --elev).
    #[arg(long, global = true)]
    pub dist: Option<f64>,

    /// Elevation angle, degrees (converted via the relative height).
    #[arg(long, global = true)]
    pub elev: Option<f64>,

    /// Scattering-threshold mode: corrected or literal.
    #[arg(long = "bs-mode", global = true)]
    pub bs_mode: Option<String>,

    /// RNG seed for the Monte Carlo oracles.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Trial count (model oracle) or placement count (geometric oracle).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Solver grid step, m.
    #[arg(long = "grid-step", global = true)]
    pub grid_step: Option<f64>,

    /// Solver search limit, m.
    #[arg(long, global = true)]
    pub dmax: Option<f64>,
}

/// String-valued key/value pairs from the `A2G_CONFIG` file.
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: Vec<(String, String)>,
}

impl FileConfig {
    pub fn from_env() -> Result<Self, CliError> {
        let Some(path) = std::env::var_os("A2G_CONFIG") else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::Io(format!("cannot read config file {}: {e}", path.to_string_lossy()))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key = value, got '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_ascii_lowercase();
            match key.as_str() {
                "scenario" | "alpha" | "beta" | "gamma" | "freq" | "htx" | "hrx" | "dist"
                | "elev" | "bs-mode" | "seed" | "trials" | "grid-step" | "dmax" => {
                    entries.push((key, value.trim().to_string()));
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        // Last occurrence wins, like overriding lines in a plain file.
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key '{key}': cannot parse '{raw}'"))
            }),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ScenarioParams,
    pub preset_name: Option<String>,
    pub h_tx: f64,
    pub h_rx: f64,
    pub frequency: f64,
    /// Distance resolved from --dist or --elev; None when neither was given.
    pub distance: Option<f64>,
    pub bs_mode: BsMode,
    pub seed: u64,
    pub trials: Option<u64>,
    pub grid_step: f64,
    pub d_max: f64,
}

impl RunConfig {
    /// Merges flags, config file and defaults.
    pub fn resolve(args: &CommonArgs, file: &FileConfig) -> Result<Self, CliError> {
        let alpha = merge(args.alpha, file.get_parsed("alpha")?);
        let beta = merge(args.beta, file.get_parsed("beta")?);
        let gamma = merge(args.gamma, file.get_parsed("gamma")?);
        let scenario = merge(args.scenario.clone(), file.get("scenario").map(String::from));

        let explicit = [alpha, beta, gamma].iter().filter(|v| v.is_some()).count();
        let (params, preset_name) = match (explicit, &scenario) {
            (0, name) => {
                let preset = match name {
                    Some(n) => n
                        .parse::<ScenarioPreset>()
                        .map_err(|e| CliError::Usage(e.to_string()))?,
                    None => ScenarioPreset::Urban,
                };
                (preset.params(), Some(preset.name().to_string()))
            }
            (3, None) => {
                let p = ScenarioParams::new(alpha.unwrap(), beta.unwrap(), gamma.unwrap())
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                (p, None)
            }
            (3, Some(_)) => {
                return Err(CliError::Usage(
                    "give either --scenario or all of --alpha/--beta/--gamma, not both".into(),
                ))
            }
            _ => {
                return Err(CliError::Usage(
                    "custom scenarios need all three of --alpha, --beta and --gamma".into(),
                ))
            }
        };

        let freq_raw = merge(args.freq.clone(), file.get("freq").map(String::from));
        let frequency = match freq_raw {
            Some(raw) => parse_frequency(&raw)?,
            None => DEFAULT_FREQ_HZ,
        };
        let h_tx = merge(args.htx, file.get_parsed("htx")?).unwrap_or(DEFAULT_H_TX);
        let h_rx = merge(args.hrx, file.get_parsed("hrx")?).unwrap_or(DEFAULT_H_RX);

        let dist = merge(args.dist, file.get_parsed("dist")?);
        let elev = merge(args.elev, file.get_parsed("elev")?);
        let distance = match (dist, elev) {
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "--dist and --elev are mutually exclusive".into(),
                ))
            }
            (Some(d), None) => Some(d),
            (None, Some(deg)) => {
                let h_tr = h_tx - h_rx;
                let d = a2g_core::elevation_to_distance(deg.to_radians(), h_tr)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                Some(d)
            }
            (None, None) => None,
        };

        let bs_mode = match merge(args.bs_mode.clone(), file.get("bs-mode").map(String::from)) {
            Some(raw) => raw
                .parse::<BsMode>()
                .map_err(|e| CliError::Usage(e.to_string()))?,
            None => BsMode::Corrected,
        };

        Ok(Self {
            params,
            preset_name,
            h_tx,
            h_rx,
            frequency,
            distance,
            bs_mode,
            seed: merge(args.seed, file.get_parsed("seed")?).unwrap_or(DEFAULT_SEED),
            trials: merge(args.trials, file.get_parsed("trials")?),
            grid_step: merge(args.grid_step, file.get_parsed("grid-step")?)
                .unwrap_or(DEFAULT_GRID_STEP),
            d_max: merge(args.dmax, file.get_parsed("dmax")?).unwrap_or(DEFAULT_D_MAX),
        })
    }

    /// The configured link; errors when no distance was given.
    pub fn link(&self) -> Result<LinkGeometry, CliError> {
        let d = self.distance.ok_or_else(|| {
            CliError::Usage("this command needs --dist or --elev".into())
        })?;
        LinkGeometry::new(self.h_tx, self.h_rx, d, self.frequency)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn template(&self) -> a2g_core::LinkTemplate {
        a2g_core::LinkTemplate::new(self.h_tx, self.h_rx, self.frequency)
    }
}

fn merge<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Parses a frequency with an optional GHz/MHz/kHz/Hz suffix (default Hz).
pub fn parse_frequency(raw: &str) -> Result<f64, CliError> {
    let lowered = raw.trim().to_ascii_lowercase();
    let (number, scale) = if let Some(n) = lowered.strip_suffix("ghz") {
        (n, 1e9)
    } else if let Some(n) = lowered.strip_suffix("mhz") {
        (n, 1e6)
    } else if let Some(n) = lowered.strip_suffix("khz") {
        (n, 1e3)
    } else if let Some(n) = lowered.strip_suffix("hz") {
        (n, 1.0)
    } else {
        (lowered.as_str(), 1.0)
    };
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse frequency '{raw}'")))?;
    if !value.is_finite() || value <= 0.0 {
        return Err(CliError::Usage(format!(
            "frequency must be > 0, got '{raw}'"
        )));
    }
    Ok(value * scale)
}

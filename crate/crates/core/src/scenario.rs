//! Stochastic urban-scenario description.
//!
//! A scenario is the ITU-R P.1410-style triple `{alpha, beta, gamma}`:
//!
//! - `alpha` — fraction of land area covered by buildings (dimensionless),
//! - `beta`  — building density in buildings per km²,
//! - `gamma` — scale of the Rayleigh distribution of building heights, m.
//!
//! From the triple follow the average building width `W = 1000*sqrt(alpha/beta)`,
//! the average street width `V = 1000/sqrt(beta) - W`, the expected number of
//! buildings crossed by a ground-projected link, and the deterministic
//! building positions used by every path-probability model. Building heights
//! are Rayleigh distributed with density `h/gamma^2 * exp(-h^2 / (2 gamma^2))`.

use crate::error::ModelError;
use serde::{Deserialize, Serialize};

/// Stochastic city descriptor `{alpha, beta, gamma}` plus derived widths.
///
/// Constructing a `ScenarioParams` validates the whole parameter set, so the
/// probability models can treat an instance as proof of a usable scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl ScenarioParams {
    /// Validates and builds a scenario.
    ///
    /// Requires `0 < alpha <= 1`, `beta > 0`, `gamma > 0`, and a positive
    /// derived street width `1000/sqrt(beta) - W > 0`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, ModelError> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
            return Err(ModelError::InvalidScenario(format!(
                "alpha must be in (0, 1], got {alpha}"
            )));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(ModelError::InvalidScenario(format!(
                "beta must be > 0 buildings/km^2, got {beta}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(ModelError::InvalidScenario(format!(
                "gamma must be > 0 m, got {gamma}"
            )));
        }
        let params = Self { alpha, beta, gamma };
        if params.avg_street_width() <= 0.0 {
            return Err(ModelError::InvalidScenario(format!(
                "derived street width {:.3} m is not positive (alpha={alpha}, beta={beta})",
                params.avg_street_width()
            )));
        }
        Ok(params)
    }

    /// Built-up area fraction.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Building density, buildings per km².
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Rayleigh scale of building heights, m.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Average building width `W = 1000*sqrt(alpha/beta)`, m.
    pub fn avg_building_width(&self) -> f64 {
        1000.0 * (self.alpha / self.beta).sqrt()
    }

    /// Average street width `V = 1000/sqrt(beta) - W`, m.
    pub fn avg_street_width(&self) -> f64 {
        1000.0 / self.beta.sqrt() - self.avg_building_width()
    }

    /// Grid pitch `W + V = 1000/sqrt(beta)`, m. One building plus one street.
    pub fn grid_pitch(&self) -> f64 {
        1000.0 / self.beta.sqrt()
    }

    /// Expected number of buildings crossed by a ground-projected span of
    /// length `d_tr` meters: `floor(d_tr * sqrt(alpha*beta) / 1000)`.
    ///
    /// Zero is a legal return; callers must then treat the span as
    /// unobstructed. Negative spans are a domain error.
    pub fn expected_building_count(&self, d_tr: f64) -> Result<u32, ModelError> {
        if !d_tr.is_finite() || d_tr < 0.0 {
            return Err(ModelError::Domain(format!(
                "span length must be >= 0 m, got {d_tr}"
            )));
        }
        Ok(self.building_count_unchecked(d_tr))
    }

    pub(crate) fn building_count_unchecked(&self, d_tr: f64) -> u32 {
        let n = (d_tr * (self.alpha * self.beta).sqrt() / 1000.0).floor();
        // Saturating cast keeps absurd spans from wrapping.
        n.min(u32::MAX as f64) as u32
    }

    /// Horizontal distance from the span origin to the `i`-th building
    /// (1-based): `(i - 0.5) * d_tr / E[N] + W/2`.
    ///
    /// Errors with [`ModelError::NoBuildings`] when `E[N] = 0` and with an
    /// index error when `i` is outside `1..=E[N]`.
    pub fn building_position(&self, i: u32, d_tr: f64) -> Result<f64, ModelError> {
        let count = self.expected_building_count(d_tr)?;
        if count == 0 {
            return Err(ModelError::NoBuildings);
        }
        if i == 0 || i > count {
            return Err(ModelError::IndexOutOfRange { index: i, count });
        }
        Ok(self.position_on_span(i, d_tr, count))
    }

    /// Position rule shared by every segment: `(i - 0.5) * span / count + W/2`
    /// measured from the segment start. Callers guarantee `1 <= i <= count`.
    pub(crate) fn position_on_span(&self, i: u32, span: f64, count: u32) -> f64 {
        (f64::from(i) - 0.5) * span / f64::from(count) + self.avg_building_width() / 2.0
    }
}

/// The four named Table-style scenario presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScenarioPreset {
    Suburban,
    Urban,
    DenseUrban,
    HighRiseUrban,
}

impl ScenarioPreset {
    /// All presets in canonical order.
    pub const ALL: [ScenarioPreset; 4] = [
        ScenarioPreset::Suburban,
        ScenarioPreset::Urban,
        ScenarioPreset::DenseUrban,
        ScenarioPreset::HighRiseUrban,
    ];

    /// The `{alpha, beta, gamma}` triple of the preset.
    pub fn params(self) -> ScenarioParams {
        let (alpha, beta, gamma) = match self {
            ScenarioPreset::Suburban => (0.1, 750.0, 8.0),
            ScenarioPreset::Urban => (0.3, 500.0, 15.0),
            ScenarioPreset::DenseUrban => (0.5, 300.0, 20.0),
            ScenarioPreset::HighRiseUrban => (0.5, 300.0, 50.0),
        };
        ScenarioParams::new(alpha, beta, gamma).expect("presets are valid by construction")
    }

    /// Kebab-case identifier used on the command line.
    pub fn name(self) -> &'static str {
        match self {
            ScenarioPreset::Suburban => "suburban",
            ScenarioPreset::Urban => "urban",
            ScenarioPreset::DenseUrban => "dense-urban",
            ScenarioPreset::HighRiseUrban => "high-rise-urban",
        }
    }

    /// Case-insensitive lookup of a preset identifier.
    pub fn parse(name: &str) -> Option<ScenarioPreset> {
        let lowered = name.to_ascii_lowercase();
        Self::ALL.into_iter().find(|p| p.name() == lowered)
    }
}

impl std::str::FromStr for ScenarioPreset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioPreset::parse(s).ok_or_else(|| {
            ModelError::Domain(format!(
                "unknown scenario preset '{s}' (expected suburban, urban, dense-urban or high-rise-urban)"
            ))
        })
    }
}

impl std::fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Rayleigh density of building heights, per meter. Zero for `h < 0`.
pub fn rayleigh_pdf(h: f64, gamma: f64) -> Result<f64, ModelError> {
    check_gamma(gamma)?;
    if h < 0.0 {
        return Ok(0.0);
    }
    Ok(h / (gamma * gamma) * (-(h * h) / (2.0 * gamma * gamma)).exp())
}

/// Rayleigh CDF `1 - exp(-h^2 / (2 gamma^2))` for `h >= 0`; 0 for `h < 0`.
///
/// The negative branch implements the blocked-by-anything convention: a
/// clearance ceiling below ground is exceeded by every building, so the
/// probability that a building stays below it is zero.
pub fn rayleigh_cdf(h: f64, gamma: f64) -> Result<f64, ModelError> {
    check_gamma(gamma)?;
    Ok(rayleigh_cdf_unchecked(h, gamma))
}

#[inline]
pub(crate) fn rayleigh_cdf_unchecked(h: f64, gamma: f64) -> f64 {
    if h <= 0.0 {
        0.0
    } else {
        1.0 - (-(h * h) / (2.0 * gamma * gamma)).exp()
    }
}

fn check_gamma(gamma: f64) -> Result<(), ModelError> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(ModelError::Domain(format!(
            "rayleigh scale must be > 0, got {gamma}"
        )));
    }
    Ok(())
}

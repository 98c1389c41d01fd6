//! Link-planning analyses over the three path models: sweeps along distance,
//! altitude, elevation angle or frequency, the maximum communication distance
//! at a probability threshold, and the scattering optimal-distance search.
//!
//! Probability curves are piecewise in distance: the expected building count
//! is a floor expression, so the curves jump at every count step. The solvers
//! therefore never assume continuity; they scan a grid first and only then
//! refine inside a scanned bracket, re-evaluating the model directly.

use crate::bs::{bs_probability, BsMode};
use crate::error::ModelError;
use crate::fresnel::LinkGeometry;
use crate::gs::gs_probability;
use crate::los::los_probability;
use crate::montecarlo::PathKind;
use crate::scenario::ScenarioParams;
use serde::{Deserialize, Serialize};

/// Refinement width of the bracket solvers, m.
const REFINE_WIDTH: f64 = 0.1;

/// Marginal occurrence probabilities of the three paths for one link.
/// The values are independent marginals; they need not sum to anything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathProbabilities {
    pub p_los: f64,
    pub p_gs: f64,
    pub p_bs: f64,
}

/// Link fields shared by every point of a sweep or solver run: terminal
/// heights and carrier frequency, with the distance supplied per evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkTemplate {
    pub h_tx: f64,
    pub h_rx: f64,
    pub frequency: f64,
}

impl LinkTemplate {
    pub fn new(h_tx: f64, h_rx: f64, frequency: f64) -> Self {
        Self {
            h_tx,
            h_rx,
            frequency,
        }
    }

    /// Relative transmitter height `h_tx - h_rx`, m.
    pub fn h_tr(&self) -> f64 {
        self.h_tx - self.h_rx
    }

    /// Completes the template into a link at horizontal distance `d_tr`.
    pub fn at_distance(&self, d_tr: f64) -> Result<LinkGeometry, ModelError> {
        LinkGeometry::new(self.h_tx, self.h_rx, d_tr, self.frequency)
    }
}

/// Evaluates all three path probabilities for one link.
pub fn evaluate_paths(
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<PathProbabilities, ModelError> {
    Ok(PathProbabilities {
        p_los: los_probability(link, params),
        p_gs: gs_probability(link, params)?,
        p_bs: bs_probability(link, params, mode)?,
    })
}

fn path_probability(
    path: PathKind,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<f64, ModelError> {
    Ok(match path {
        PathKind::Los => los_probability(link, params),
        PathKind::Gs => gs_probability(link, params)?,
        PathKind::Bs => bs_probability(link, params, mode)?,
    })
}

/// Swept quantity of a [`SweepTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Horizontal distance, m.
    Distance,
    /// Transmitter height, m; the receiver height stays at the template's.
    Altitude,
    /// Elevation angle, degrees; converted per point at fixed `h_tx - h_rx`.
    Elevation,
    /// Carrier frequency, Hz.
    Frequency,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Distance => "distance",
            SweepAxis::Altitude => "altitude",
            SweepAxis::Elevation => "elevation",
            SweepAxis::Frequency => "frequency",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "distance" => Ok(SweepAxis::Distance),
            "altitude" => Ok(SweepAxis::Altitude),
            "elevation" => Ok(SweepAxis::Elevation),
            "frequency" => Ok(SweepAxis::Frequency),
            other => Err(ModelError::Domain(format!(
                "unknown sweep axis '{other}' (expected distance, altitude, elevation or frequency)"
            ))),
        }
    }
}

/// One model evaluation per axis value, with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub rows: Vec<PathProbabilities>,
    pub template: LinkTemplate,
    pub mode: BsMode,
}

/// Converts an elevation angle (radians, `0 < theta <= pi/2`) and a relative
/// height into the horizontal distance `h_tr / tan(theta)`.
pub fn elevation_to_distance(theta: f64, h_tr: f64) -> Result<f64, ModelError> {
    if !theta.is_finite() || theta <= 0.0 || theta > std::f64::consts::FRAC_PI_2 {
        return Err(ModelError::Domain(format!(
            "elevation angle must be in (0, pi/2], got {theta} rad"
        )));
    }
    if !h_tr.is_finite() || h_tr <= 0.0 {
        return Err(ModelError::Domain(format!(
            "relative height must be > 0 m, got {h_tr}"
        )));
    }
    Ok(h_tr / theta.tan())
}

/// Evaluates the three models along `values` of the chosen axis.
///
/// `base_distance` supplies the fixed span for altitude and frequency sweeps
/// and is ignored by the distance and elevation axes.
pub fn sweep(
    axis: SweepAxis,
    values: &[f64],
    template: &LinkTemplate,
    base_distance: Option<f64>,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<SweepTable, ModelError> {
    if values.is_empty() {
        return Err(ModelError::Domain("sweep range is empty".into()));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ModelError::Domain(
            "sweep range must be strictly increasing".into(),
        ));
    }
    let need_base = matches!(axis, SweepAxis::Altitude | SweepAxis::Frequency);
    let base = match (need_base, base_distance) {
        (true, None) => {
            return Err(ModelError::Domain(format!(
                "{} sweep needs a fixed link distance",
                axis.name()
            )))
        }
        (true, Some(d)) => d,
        (false, _) => f64::NAN,
    };
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let link = match axis {
            SweepAxis::Distance => template.at_distance(v)?,
            SweepAxis::Altitude => {
                LinkGeometry::new(v, template.h_rx, base, template.frequency)?
            }
            SweepAxis::Elevation => {
                let d = elevation_to_distance(v.to_radians(), template.h_tr())?;
                template.at_distance(d)?
            }
            SweepAxis::Frequency => {
                LinkGeometry::new(template.h_tx, template.h_rx, base, v)?
            }
        };
        rows.push(evaluate_paths(&link, params, mode)?);
    }
    Ok(SweepTable {
        axis,
        values: values.to_vec(),
        rows,
        template: *template,
        mode,
    })
}

/// Outcome qualifier of an MCD solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum McdFlag {
    /// A threshold crossing was bracketed and refined.
    Converged,
    /// The probability still meets the threshold at `d_max`.
    Saturated,
    /// The probability is below the threshold on the whole grid.
    BelowThreshold,
}

/// Maximum communication distance result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McdResult {
    /// Largest distance still meeting the threshold, m (0 when below
    /// threshold everywhere, `d_max` when saturated).
    pub distance: f64,
    pub flag: McdFlag,
}

/// Largest distance in `(0, d_max]` whose path probability still meets
/// `threshold`, found by a grid scan from the far end followed by bisection
/// of the bracketing interval down to 0.1 m.
///
/// "Largest" rather than "first crossing": the count steps can lift the
/// probability back above the threshold after a dip, and the communication
/// range is delimited by the final crossing.
pub fn mcd(
    path: PathKind,
    threshold: f64,
    template: &LinkTemplate,
    params: &ScenarioParams,
    mode: BsMode,
    d_max: f64,
    grid_step: f64,
) -> Result<McdResult, ModelError> {
    if !threshold.is_finite() || threshold <= 0.0 || threshold >= 1.0 {
        return Err(ModelError::Domain(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    check_grid(d_max, grid_step)?;
    let eval = |d: f64| -> Result<f64, ModelError> {
        path_probability(path, &template.at_distance(d)?, params, mode)
    };
    let grid = build_grid(d_max, grid_step);
    let mut bracket = None;
    for (idx, &d) in grid.iter().enumerate().rev() {
        if eval(d)? >= threshold {
            bracket = Some(idx);
            break;
        }
    }
    let Some(idx) = bracket else {
        return Ok(McdResult {
            distance: 0.0,
            flag: McdFlag::BelowThreshold,
        });
    };
    if idx == grid.len() - 1 {
        return Ok(McdResult {
            distance: d_max,
            flag: McdFlag::Saturated,
        });
    }
    let (mut lo, mut hi) = (grid[idx], grid[idx + 1]);
    while hi - lo > REFINE_WIDTH {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(McdResult {
        distance: lo,
        flag: McdFlag::Converged,
    })
}

/// Outcome qualifier of the scattering optimal-distance search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BsOptFlag {
    /// A proper maximum was located.
    Located,
    /// The curve is zero on the whole grid; the reported point is the first
    /// grid point.
    Flat,
}

/// Scattering optimal-distance result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsOptimum {
    /// Distance maximizing the scattering probability, m.
    pub distance: f64,
    /// Probability at that distance.
    pub probability: f64,
    pub flag: BsOptFlag,
}

/// Distance in `(0, d_max]` maximizing the scattering path probability:
/// grid argmax (ties toward the smaller distance) refined by golden-section
/// search on the bracketing interval down to 0.1 m. The refined point is kept
/// only when it beats the grid point.
pub fn bs_optimal_distance(
    template: &LinkTemplate,
    params: &ScenarioParams,
    mode: BsMode,
    d_max: f64,
    grid_step: f64,
) -> Result<BsOptimum, ModelError> {
    check_grid(d_max, grid_step)?;
    let eval = |d: f64| -> Result<f64, ModelError> {
        path_probability(PathKind::Bs, &template.at_distance(d)?, params, mode)
    };
    let grid = build_grid(d_max, grid_step);
    let mut best_idx = 0;
    let mut best_p = f64::NEG_INFINITY;
    for (idx, &d) in grid.iter().enumerate() {
        let p = eval(d)?;
        if p > best_p {
            best_p = p;
            best_idx = idx;
        }
    }
    if best_p <= 0.0 {
        return Ok(BsOptimum {
            distance: grid[0],
            probability: 0.0,
            flag: BsOptFlag::Flat,
        });
    }
    let lo = if best_idx == 0 {
        (grid[0] - grid_step).max(REFINE_WIDTH.min(grid[0] / 2.0))
    } else {
        grid[best_idx - 1]
    };
    let hi = grid.get(best_idx + 1).copied().unwrap_or(d_max);
    let (mut distance, mut probability) = (grid[best_idx], best_p);
    let (gss_d, gss_p) = golden_section_max(&eval, lo, hi)?;
    if gss_p > probability || (gss_p == probability && gss_d < distance) {
        distance = gss_d;
        probability = gss_p;
    }
    Ok(BsOptimum {
        distance,
        probability,
        flag: BsOptFlag::Located,
    })
}

fn golden_section_max(
    eval: &impl Fn(f64) -> Result<f64, ModelError>,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64), ModelError> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = eval(a)?;
    let mut fb = eval(b)?;
    while hi - lo > REFINE_WIDTH {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = eval(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = eval(b)?;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok((mid, eval(mid)?))
}

fn check_grid(d_max: f64, grid_step: f64) -> Result<(), ModelError> {
    if !d_max.is_finite() || d_max <= 0.0 {
        return Err(ModelError::Domain(format!(
            "maximum distance must be > 0 m, got {d_max}"
        )));
    }
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(ModelError::Domain(format!(
            "grid step must be > 0 m, got {grid_step}"
        )));
    }
    Ok(())
}

/// Grid `step, 2 step, ...` up to and including `d_max`.
fn build_grid(d_max: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::with_capacity((d_max / step) as usize + 2);
    let mut k = 1u64;
    loop {
        let d = k as f64 * step;
        if d >= d_max {
            break;
        }
        grid.push(d);
        k += 1;
    }
    grid.push(d_max);
    grid
}

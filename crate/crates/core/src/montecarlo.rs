//! Monte Carlo verification oracles.
//!
//! Two independent checks back the closed-form models:
//!
//! 1. [`mc_model_faithful`] draws Rayleigh building heights at the same
//!    deterministic positions the closed forms use and replays the same
//!    clearance events, so its expectation equals the closed form exactly.
//!    Any disagreement beyond sampling noise indicates an implementation bug.
//! 2. [`mc_geometric`] builds explicit grid cities ([`generate_scene`]),
//!    throws uniformly oriented links into them and tests path existence by
//!    direct geometric clearance checks ([`geometric_path_check`]). It shares
//!    no positions with the closed forms and is only statistically
//!    equivalent, standing in for a full ray-tracing validation.
//!
//! Determinism contract: every estimate is a pure function of `(seed, trials,
//! configuration)`. Trials fold in per-trial sub-seeds derived from the seed
//! and the trial index, and outcomes are combined by integer counting, so the
//! result is bit-identical for any degree of parallelism.

use crate::bs::BsMode;
use crate::error::ModelError;
use crate::fresnel::{fresnel_radius_unchecked, slant_cosine_unchecked, LinkGeometry};
use crate::los::clamped_position;
use crate::scenario::ScenarioParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which propagation path an oracle estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathKind {
    Los,
    Gs,
    Bs,
}

impl std::str::FromStr for PathKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "los" => Ok(PathKind::Los),
            "gs" => Ok(PathKind::Gs),
            "bs" => Ok(PathKind::Bs),
            other => Err(ModelError::Domain(format!(
                "unknown path '{other}' (expected los, gs or bs)"
            ))),
        }
    }
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PathKind::Los => "los",
            PathKind::Gs => "gs",
            PathKind::Bs => "bs",
        })
    }
}

/// A Monte Carlo probability estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Success fraction.
    pub p_hat: f64,
    /// Number of trials behind the estimate.
    pub trials: u64,
    /// Binomial standard error `sqrt(p_hat (1 - p_hat) / trials)`.
    pub stderr: f64,
    /// Seed the estimate was produced from.
    pub seed: u64,
}

impl McEstimate {
    fn from_successes(successes: u64, trials: u64, seed: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        Self {
            p_hat,
            trials,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            seed,
        }
    }
}

/// One extruded rectangular building: footprint `[x, x+width] x [y, y+width]`
/// with flat roof at `height` meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Building {
    fn contains_ground_point(&self, x: f64, y: f64) -> bool {
        x >= self.x && x <= self.x + self.width && y >= self.y && y <= self.y + self.width
    }
}

/// One sampled city realization on `[0, extent]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UrbanScene {
    /// Side length of the square region, m.
    pub extent: f64,
    /// Buildings intersecting the region.
    pub buildings: Vec<Building>,
}

impl UrbanScene {
    /// A scene without buildings, for degenerate fixtures.
    pub fn empty(extent: f64) -> Self {
        Self {
            extent,
            buildings: Vec::new(),
        }
    }

    /// Fraction of the region covered by building footprints (clipped).
    pub fn coverage_fraction(&self) -> f64 {
        let area: f64 = self
            .buildings
            .iter()
            .map(|b| {
                let w = (b.x + b.width).min(self.extent) - b.x.max(0.0);
                let h = (b.y + b.width).min(self.extent) - b.y.max(0.0);
                w.max(0.0) * h.max(0.0)
            })
            .sum();
        area / (self.extent * self.extent)
    }

    /// Plain-text export, one `x y width height` line per building.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# x_m y_m width_m height_m\n");
        for b in &self.buildings {
            out.push_str(&format!(
                "{:.1} {:.1} {:.1} {:.1}\n",
                b.x, b.y, b.width, b.height
            ));
        }
        out
    }
}

/// A point in scene coordinates: `x`, `y` on the ground plane, `z` up, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Path-existence flags returned by the geometric checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFlags {
    pub los: bool,
    pub gs: bool,
    pub bs: bool,
}

impl PathFlags {
    fn get(&self, path: PathKind) -> bool {
        match path {
            PathKind::Los => self.los,
            PathKind::Gs => self.gs,
            PathKind::Bs => self.bs,
        }
    }
}

// ---------------------------------------------------------------------------
// Model-faithful oracle
// ---------------------------------------------------------------------------

/// Event list replayed by the model-faithful oracle. Thresholds are kept
/// unclamped: a Rayleigh sample is strictly positive, so "sample below a
/// non-positive threshold" fails naturally, matching the clamped factors.
enum EventPlan {
    /// Path exists when every sampled height stays below its threshold.
    AllBelow(Vec<f64>),
    /// Path exists when at least one candidate scatters: the candidate sample
    /// exceeds `entry` while the front and behind samples stay below their
    /// thresholds. Every slot draws independently.
    AnyScatter(Vec<CandidatePlan>),
}

struct CandidatePlan {
    entry: f64,
    fronts: Vec<f64>,
    behinds: Vec<f64>,
}

fn build_plan(
    path: PathKind,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<EventPlan, ModelError> {
    match path {
        PathKind::Los => {
            let rows = crate::los::los_breakdown(link, params);
            Ok(EventPlan::AllBelow(
                rows.iter().map(|r| r.clearance_height).collect(),
            ))
        }
        PathKind::Gs => {
            let rows = crate::gs::gs_breakdown(link, params)?;
            Ok(EventPlan::AllBelow(
                rows.iter().map(|r| r.clearance_height).collect(),
            ))
        }
        PathKind::Bs => {
            let count = params.building_count_unchecked(link.d_tr());
            let mut cands = Vec::with_capacity(count as usize);
            for i in 1..=count {
                let (d_i, _) = clamped_position(params, i, link.d_tr(), count);
                let entry = crate::bs::scatter_entry_height(d_i, link, mode)?;
                let n_front = params.building_count_unchecked(d_i);
                let n_behind = params.building_count_unchecked(link.d_tr() - d_i);
                let slope = link.h_tx() - entry;
                let fronts = (1..=n_front)
                    .map(|m| {
                        let (d_tf, _) = clamped_position(params, m, d_i, n_front);
                        (d_i - d_tf) * slope / d_i + entry
                    })
                    .collect();
                let tail = link.d_tr() - d_i;
                let behinds = (1..=n_behind)
                    .map(|n| {
                        let (offset, _) = clamped_position(params, n, tail, n_behind);
                        link.h_rx() + (link.d_tr() - (d_i + offset)) * slope / tail
                    })
                    .collect();
                cands.push(CandidatePlan {
                    entry,
                    fronts,
                    behinds,
                });
            }
            Ok(EventPlan::AnyScatter(cands))
        }
    }
}

/// Inverse-transform Rayleigh sample with scale `gamma`, strictly positive.
#[inline]
fn sample_rayleigh<R: Rng>(rng: &mut R, gamma: f64) -> f64 {
    let u: f64 = rng.random();
    gamma * (-2.0 * (1.0 - u).ln()).sqrt()
}

/// Sub-seed for trial `index` under `seed`; splitmix64 finalizer over the pair.
#[inline]
fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(plan: &EventPlan, gamma: f64, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match plan {
        EventPlan::AllBelow(thresholds) => thresholds
            .iter()
            .all(|&t| sample_rayleigh(&mut rng, gamma) < t),
        EventPlan::AnyScatter(cands) => {
            let mut any = false;
            for cand in cands {
                let entered = sample_rayleigh(&mut rng, gamma) > cand.entry;
                let mut clear = entered;
                for &t in &cand.fronts {
                    // Draw every slot regardless, so candidate outcomes stay
                    // independent of each other's early exits.
                    let s = sample_rayleigh(&mut rng, gamma);
                    clear = clear && s < t;
                }
                for &t in &cand.behinds {
                    let s = sample_rayleigh(&mut rng, gamma);
                    clear = clear && s < t;
                }
                any = any || clear;
            }
            any
        }
    }
}

/// Estimates the chosen path probability by sampling the exact per-building
/// events of the closed-form model at its deterministic positions.
///
/// The expectation equals the closed form: both sides multiply the same
/// independent Rayleigh clearance events.
pub fn mc_model_faithful(
    path: PathKind,
    link: &LinkGeometry,
    params: &ScenarioParams,
    trials: u64,
    seed: u64,
    mode: BsMode,
) -> Result<McEstimate, ModelError> {
    if trials == 0 {
        return Err(ModelError::Domain("trials must be >= 1".into()));
    }
    let plan = build_plan(path, link, params, mode)?;
    let gamma = params.gamma();
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&t| run_trial(&plan, gamma, trial_seed(seed, t)))
        .count() as u64;
    Ok(McEstimate::from_successes(successes, trials, seed))
}

// ---------------------------------------------------------------------------
// Geometric scene simulator
// ---------------------------------------------------------------------------

/// Generates one city realization: square footprints of width `W` on a grid
/// of pitch `W + V` with a uniform random offset, heights i.i.d. Rayleigh.
/// Requires `extent >= 10 (W + V)`.
pub fn generate_scene(
    params: &ScenarioParams,
    extent: f64,
    seed: u64,
) -> Result<UrbanScene, ModelError> {
    let pitch = params.grid_pitch();
    let minimum = 10.0 * pitch;
    if !extent.is_finite() || extent < minimum {
        return Err(ModelError::ExtentTooSmall { extent, minimum });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(generate_scene_with_rng(params, extent, &mut rng))
}

fn generate_scene_with_rng(params: &ScenarioParams, extent: f64, rng: &mut ChaCha8Rng) -> UrbanScene {
    let pitch = params.grid_pitch();
    let width = params.avg_building_width();
    let gamma = params.gamma();
    let off_x: f64 = rng.random::<f64>() * pitch;
    let off_y: f64 = rng.random::<f64>() * pitch;
    // Index ranges covering every footprint that intersects [0, extent]^2.
    let lo = |off: f64| ((-off - width) / pitch).ceil() as i64;
    let hi = |off: f64| ((extent - off) / pitch).floor() as i64;
    let mut buildings = Vec::new();
    for iy in lo(off_y)..=hi(off_y) {
        for ix in lo(off_x)..=hi(off_x) {
            let x = off_x + ix as f64 * pitch;
            let y = off_y + iy as f64 * pitch;
            if x > extent || y > extent || x + width < 0.0 || y + width < 0.0 {
                continue;
            }
            buildings.push(Building {
                x,
                y,
                width,
                height: sample_rayleigh(rng, gamma),
            });
        }
    }
    UrbanScene { extent, buildings }
}

/// Crossing of the ground segment with a footprint, as along-path distances
/// `(d_enter, d_exit)` from the segment start.
fn crossing_interval(
    ax: f64,
    ay: f64,
    bx: f64,
    by: f64,
    b: &Building,
) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (delta, start, lo, hi) in [
        (bx - ax, ax, b.x, b.x + b.width),
        (by - ay, ay, b.y, b.y + b.width),
    ] {
        if delta == 0.0 {
            if start < lo || start > hi {
                return None;
            }
        } else {
            let mut ta = (lo - start) / delta;
            let mut tb = (hi - start) / delta;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 >= t1 {
                return None;
            }
        }
    }
    let d = ((bx - ax).powi(2) + (by - ay).powi(2)).sqrt();
    Some((t0 * d, t1 * d))
}

struct Crossing {
    /// Along-path distance of the crossing, taken at the middle of the
    /// footprint's intersection with the segment. The checker treats every
    /// building as standing at this abscissa, mirroring the point-position
    /// assumption of the closed forms.
    abscissa: f64,
    height: f64,
}

/// Tests existence of the three paths in one explicit scene.
///
/// - LoS: no crossed building may reach the direct path's Fresnel clearance
///   anywhere on its crossing interval.
/// - GS: the same test against the mirror-path clearance, which switches from
///   the incident to the reflected ray at the ground reflection point.
/// - BS: some crossed building must reach into the first Fresnel zone while
///   every other crossed building stays below the incident and scattered
///   sub-ray clearances (zone-entry threshold in corrected form).
pub fn geometric_path_check(
    scene: &UrbanScene,
    tx: Point3,
    rx: Point3,
    wavelength: f64,
) -> Result<PathFlags, ModelError> {
    for (label, p) in [("tx", tx), ("rx", rx)] {
        if p.x < 0.0 || p.x > scene.extent || p.y < 0.0 || p.y > scene.extent {
            return Err(ModelError::OutsideScene(format!(
                "{label} at ({:.1}, {:.1}) outside [0, {:.1}]^2",
                p.x, p.y, scene.extent
            )));
        }
        if p.z < 0.0 {
            return Err(ModelError::Domain(format!("{label} below ground")));
        }
    }
    if !wavelength.is_finite() || wavelength <= 0.0 {
        return Err(ModelError::Domain(format!(
            "wavelength must be > 0 m, got {wavelength}"
        )));
    }
    let d_tr = ((rx.x - tx.x).powi(2) + (rx.y - tx.y).powi(2)).sqrt();
    if d_tr <= 0.0 {
        return Err(ModelError::DegenerateGeometry(
            "zero horizontal separation".into(),
        ));
    }
    let (h_tx, h_rx) = (tx.z, rx.z);

    let mut crossings: Vec<Crossing> = scene
        .buildings
        .iter()
        .filter_map(|b| {
            crossing_interval(tx.x, tx.y, rx.x, rx.y, b).map(|(enter, exit)| Crossing {
                abscissa: 0.5 * (enter + exit),
                height: b.height,
            })
        })
        .collect();
    crossings.sort_by(|a, b| a.abscissa.total_cmp(&b.abscissa));

    let fresnel = |d: f64| fresnel_radius_unchecked(d, d_tr, wavelength);
    let cos_direct = slant_cosine_unchecked(h_tx - h_rx, d_tr);
    let direct_clearance =
        |d: f64| h_tx - d * (h_tx - h_rx) / d_tr - fresnel(d) / cos_direct;

    // LoS: every crossed building stays below the direct-path clearance at
    // its abscissa.
    let los = crossings
        .iter()
        .all(|c| c.height < direct_clearance(c.abscissa));

    // GS: the same test against the mirror-path clearance, which switches
    // from the incident to the reflected ray at the reflection point.
    let gs = if h_tx + h_rx > 0.0 {
        let d_tg = d_tr * h_tx / (h_tx + h_rx);
        let cos_mirror = slant_cosine_unchecked(h_tx + h_rx, d_tr);
        let mirror_clearance = |d: f64| {
            let ray = if d <= d_tg {
                if d_tg > 0.0 {
                    h_tx * (d_tg - d) / d_tg
                } else {
                    0.0
                }
            } else {
                h_rx * (d - d_tg) / (d_tr - d_tg)
            };
            ray - fresnel(d) / cos_mirror
        };
        crossings
            .iter()
            .all(|c| c.height < mirror_clearance(c.abscissa))
    } else {
        false
    };

    // BS: one candidate entering the zone with clear front and behind rays.
    let bs = crossings.iter().enumerate().any(|(ci, cand)| {
        let d_c = cand.abscissa;
        let entry = direct_clearance(d_c);
        if cand.height <= entry {
            return false;
        }
        let slope = h_tx - entry;
        let front = |d: f64| (d_c - d) * slope / d_c + entry;
        let behind = |d: f64| h_rx + (d_tr - d) * slope / (d_tr - d_c);
        crossings.iter().enumerate().all(|(oi, other)| {
            if oi == ci {
                return true;
            }
            if other.abscissa < d_c {
                other.height < front(other.abscissa)
            } else {
                other.height < behind(other.abscissa)
            }
        })
    });

    Ok(PathFlags { los, gs, bs })
}

/// Estimates a path probability by throwing uniformly oriented links into
/// fresh scene realizations and averaging [`geometric_path_check`] outcomes.
///
/// Each placement rotates the link to a uniform random bearing around a
/// transmitter at the scene center and rejects orientations whose terminals
/// end up inside a building volume (a terminal must sit in open air), then
/// checks the requested path.
pub fn mc_geometric(
    path: PathKind,
    link: &LinkGeometry,
    params: &ScenarioParams,
    placements: u64,
    seed: u64,
) -> Result<McEstimate, ModelError> {
    if placements == 0 {
        return Err(ModelError::Domain("placements must be >= 1".into()));
    }
    let pitch = params.grid_pitch();
    let extent = (2.0 * (link.d_tr() + 2.0 * pitch)).max(10.0 * pitch);
    let count: u64 = (0..placements)
        .into_par_iter()
        .map(|p| -> Result<u64, ModelError> {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, p));
            let (scene, tx, rx) = place_link(link, params, extent, &mut rng)?;
            let flags = geometric_path_check(&scene, tx, rx, link.wavelength())?;
            Ok(u64::from(flags.get(path)))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(McEstimate::from_successes(count, placements, seed))
}

/// One placement: fresh scene, transmitter at the center, uniform bearing.
/// Re-draws the bearing (and, if needed, the scene) until both terminals sit
/// in open air.
fn place_link(
    link: &LinkGeometry,
    params: &ScenarioParams,
    extent: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(UrbanScene, Point3, Point3), ModelError> {
    let center = extent / 2.0;
    for _ in 0..16 {
        let scene = generate_scene_with_rng(params, extent, rng);
        for _ in 0..256 {
            let bearing = rng.random::<f64>() * std::f64::consts::TAU;
            let tx = Point3::new(center, center, link.h_tx());
            let rx = Point3::new(
                center + link.d_tr() * bearing.cos(),
                center + link.d_tr() * bearing.sin(),
                link.h_rx(),
            );
            if in_open_air(&scene, tx) && in_open_air(&scene, rx) {
                return Ok((scene, tx, rx));
            }
        }
    }
    Err(ModelError::DegenerateGeometry(
        "no open-air terminal placement found; scenario leaves no usable ground space".into(),
    ))
}

/// True when the point is not inside a building volume: a terminal may hover
/// above a low roof but cannot sit inside a building.
fn in_open_air(scene: &UrbanScene, p: Point3) -> bool {
    scene
        .buildings
        .iter()
        .all(|b| !(b.contains_ground_point(p.x, p.y) && p.z < b.height))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::los::los_probability;
    use crate::scenario::ScenarioPreset;

    fn urban() -> ScenarioParams {
        ScenarioPreset::Urban.params()
    }

    #[test]
    fn faithful_oracle_is_deterministic() {
        let params = urban();
        let link = LinkGeometry::new(32.0, 2.0, 200.0, 28e9).unwrap();
        let a = mc_model_faithful(PathKind::Los, &link, &params, 5000, 7, BsMode::Corrected)
            .unwrap();
        let b = mc_model_faithful(PathKind::Los, &link, &params, 5000, 7, BsMode::Corrected)
            .unwrap();
        assert_eq!(a, b);
        let c = mc_model_faithful(PathKind::Los, &link, &params, 5000, 8, BsMode::Corrected)
            .unwrap();
        assert_ne!(a.p_hat, c.p_hat);
    }

    #[test]
    fn faithful_oracle_deterministic_across_thread_counts() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 500.0, 1.4e9).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                mc_model_faithful(PathKind::Bs, &link, &params, 20_000, 11, BsMode::Corrected)
                    .unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn faithful_oracle_empty_span_is_certain() {
        let params = urban();
        let link = LinkGeometry::new(32.0, 2.0, 40.0, 28e9).unwrap();
        for seed in [0, 1, 99] {
            let est =
                mc_model_faithful(PathKind::Los, &link, &params, 1000, seed, BsMode::Corrected)
                    .unwrap();
            assert_eq!(est.p_hat, 1.0);
            assert_eq!(est.stderr, 0.0);
        }
    }

    #[test]
    fn faithful_oracle_matches_closed_form_los() {
        let params = urban();
        let link = LinkGeometry::new(32.0, 2.0, 200.0, 28e9).unwrap();
        let est = mc_model_faithful(PathKind::Los, &link, &params, 100_000, 42, BsMode::Corrected)
            .unwrap();
        let analytic = los_probability(&link, &params);
        let band = 4.0 * (analytic * (1.0 - analytic) / est.trials as f64).sqrt();
        assert!(
            (est.p_hat - analytic).abs() <= band,
            "estimate {} vs analytic {analytic} (band {band})",
            est.p_hat
        );
    }

    #[test]
    fn faithful_oracle_rejects_zero_trials() {
        let params = urban();
        let link = LinkGeometry::new(32.0, 2.0, 200.0, 28e9).unwrap();
        assert!(
            mc_model_faithful(PathKind::Los, &link, &params, 0, 1, BsMode::Corrected).is_err()
        );
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 300.0, 1.4e9).unwrap();
        let small =
            mc_model_faithful(PathKind::Gs, &link, &params, 20_000, 3, BsMode::Corrected).unwrap();
        let large =
            mc_model_faithful(PathKind::Gs, &link, &params, 80_000, 3, BsMode::Corrected).unwrap();
        let ratio = small.stderr / large.stderr;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn scene_statistics_match_scenario() {
        let params = urban();
        let scene = generate_scene(&params, 1000.0, 5).unwrap();
        let n = scene.buildings.len() as f64;
        assert!((n - 500.0).abs() <= 50.0, "building count {n}");
        let cov = scene.coverage_fraction();
        assert!((cov - 0.3).abs() <= 0.05, "coverage {cov}");
    }

    #[test]
    fn scene_heights_follow_rayleigh_mean() {
        let params = urban();
        // Large extent gives > 1e4 buildings for a tight mean estimate.
        let scene = generate_scene(&params, 5000.0, 9).unwrap();
        assert!(scene.buildings.len() > 10_000);
        let mean: f64 =
            scene.buildings.iter().map(|b| b.height).sum::<f64>() / scene.buildings.len() as f64;
        let expected = params.gamma() * (std::f64::consts::PI / 2.0).sqrt();
        assert!((mean - expected).abs() < 0.3, "mean {mean} vs {expected}");
    }

    #[test]
    fn scene_extent_validation() {
        let params = urban();
        assert!(matches!(
            generate_scene(&params, 100.0, 1),
            Err(ModelError::ExtentTooSmall { .. })
        ));
    }

    #[test]
    fn scene_generation_deterministic_in_seed() {
        let params = urban();
        assert_eq!(
            generate_scene(&params, 800.0, 21).unwrap(),
            generate_scene(&params, 800.0, 21).unwrap()
        );
    }

    #[test]
    fn empty_scene_flags() {
        let scene = UrbanScene::empty(500.0);
        let flags = geometric_path_check(
            &scene,
            Point3::new(50.0, 250.0, 30.0),
            Point3::new(450.0, 250.0, 2.0),
            0.01,
        )
        .unwrap();
        assert!(flags.los);
        assert!(flags.gs);
        assert!(!flags.bs);
    }

    #[test]
    fn single_tall_building_blocks_direct_path() {
        let mut scene = UrbanScene::empty(500.0);
        scene.buildings.push(Building {
            x: 240.0,
            y: 230.0,
            width: 20.0,
            height: 100.0,
        });
        let flags = geometric_path_check(
            &scene,
            Point3::new(50.0, 250.0, 30.0),
            Point3::new(450.0, 250.0, 2.0),
            0.01,
        )
        .unwrap();
        assert!(!flags.los);
        assert!(!flags.gs);
        // The lone building scatters: it enters the zone and nothing else
        // obstructs the sub-rays.
        assert!(flags.bs);
    }

    #[test]
    fn low_building_leaves_paths_clear() {
        let mut scene = UrbanScene::empty(500.0);
        scene.buildings.push(Building {
            x: 240.0,
            y: 230.0,
            width: 20.0,
            height: 0.2,
        });
        let flags = geometric_path_check(
            &scene,
            Point3::new(50.0, 250.0, 80.0),
            Point3::new(450.0, 250.0, 40.0),
            0.01,
        )
        .unwrap();
        assert!(flags.los);
        assert!(flags.gs);
        assert!(!flags.bs);
    }

    #[test]
    fn path_check_validates_endpoints() {
        let scene = UrbanScene::empty(500.0);
        assert!(matches!(
            geometric_path_check(
                &scene,
                Point3::new(-1.0, 0.0, 10.0),
                Point3::new(10.0, 10.0, 2.0),
                0.01
            ),
            Err(ModelError::OutsideScene(_))
        ));
        assert!(geometric_path_check(
            &scene,
            Point3::new(10.0, 10.0, -0.1),
            Point3::new(20.0, 10.0, 2.0),
            0.01
        )
        .is_err());
    }

    #[test]
    fn geometric_oracle_deterministic() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 150.0, 1.4e9).unwrap();
        let a = mc_geometric(PathKind::Gs, &link, &params, 40, 17).unwrap();
        let b = mc_geometric(PathKind::Gs, &link, &params, 40, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn geometric_single_placement_is_flag() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 150.0, 1.4e9).unwrap();
        let est = mc_geometric(PathKind::Los, &link, &params, 1, 3).unwrap();
        assert!(est.p_hat == 0.0 || est.p_hat == 1.0);
    }
}

//! Ground-specular path probability.
//!
//! The specular path is analysed through the mirror-image transmitter: folding
//! the geometry through the ground plane turns the reflection into a straight
//! path from the mirrored TX to the RX, crossing the ground at the reflection
//! point `d_tg = d_tr * h_tx / (h_tx + h_rx)` from the transmitter. Buildings
//! on the TX side of that point must leave the incident ray clear, buildings
//! on the RX side must leave the reflected ray clear; buildings inside the
//! ground reflection zone itself are covered by those two constraints. The
//! slant correction uses the mirror-path cosine, i.e. the height *sum*.

use crate::error::ModelError;
use crate::fresnel::{fresnel_radius_unchecked, slant_cosine_unchecked, LinkGeometry};
use crate::los::clamped_position;
use crate::scenario::{rayleigh_cdf_unchecked, ScenarioParams};
use serde::{Deserialize, Serialize};

/// Derived geometry of the mirror construction for one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsGeometry {
    /// Horizontal TX-to-reflection-point distance, m.
    pub d_tg: f64,
    /// Cosine of the mirror-path slant angle.
    pub cos_theta2: f64,
    /// Expected building count on the incident (TX side) segment.
    pub n_incident: u32,
    /// Expected building count on the reflection (RX side) segment.
    pub n_reflection: u32,
}

/// Per-building diagnostic for one segment of the specular path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsClearance {
    /// 1-based index within its segment.
    pub index: u32,
    /// True for the incident (TX side) segment, false for the reflection side.
    pub incident: bool,
    /// Horizontal distance from TX, m.
    pub position: f64,
    /// Maximum non-blocking building height, m.
    pub clearance_height: f64,
    /// Probability that this building leaves its segment clear.
    pub factor: f64,
}

/// Horizontal distance from TX to the ground reflection point.
///
/// Errors when both terminals are at ground level (no reflection geometry).
pub fn reflection_point(link: &LinkGeometry) -> Result<f64, ModelError> {
    let sum = link.h_tx() + link.h_rx();
    if sum <= 0.0 {
        return Err(ModelError::DegenerateGeometry(
            "both terminals at ground level: reflection point undefined".into(),
        ));
    }
    Ok(link.d_tr() * link.h_tx() / sum)
}

/// Mirror-construction geometry: reflection point, slant cosine and the
/// per-segment expected building counts.
pub fn gs_geometry(link: &LinkGeometry, params: &ScenarioParams) -> Result<GsGeometry, ModelError> {
    let d_tg = reflection_point(link)?;
    Ok(GsGeometry {
        d_tg,
        cos_theta2: slant_cosine_unchecked(link.h_tx() + link.h_rx(), link.d_tr()),
        n_incident: params.building_count_unchecked(d_tg),
        n_reflection: params.building_count_unchecked(link.d_tr() - d_tg),
    })
}

/// Probability that a building at `d_i` (before the reflection point) leaves
/// the incident ray clear.
pub fn gs_incident_factor(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> Result<f64, ModelError> {
    let geo = gs_geometry(link, params)?;
    if !d_i.is_finite() || d_i < 0.0 || d_i >= geo.d_tg {
        return Err(ModelError::SegmentMembership(format!(
            "incident-segment building must sit in [0, {:.3}) m, got {d_i}",
            geo.d_tg
        )));
    }
    Ok(incident_factor_unchecked(d_i, link, params, &geo))
}

/// Probability that a building at `d_i` (past the reflection point) leaves
/// the reflected ray clear.
pub fn gs_reflection_factor(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> Result<f64, ModelError> {
    let geo = gs_geometry(link, params)?;
    if !d_i.is_finite() || d_i <= geo.d_tg || d_i > link.d_tr() {
        return Err(ModelError::SegmentMembership(format!(
            "reflection-segment building must sit in ({:.3}, {:.3}] m, got {d_i}",
            geo.d_tg,
            link.d_tr()
        )));
    }
    Ok(reflection_factor_unchecked(d_i, link, params, &geo))
}

fn incident_factor_unchecked(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
    geo: &GsGeometry,
) -> f64 {
    rayleigh_cdf_unchecked(incident_clearance(d_i, link, geo), params.gamma())
}

fn reflection_factor_unchecked(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
    geo: &GsGeometry,
) -> f64 {
    rayleigh_cdf_unchecked(reflection_clearance(d_i, link, geo), params.gamma())
}

/// Incident-ray clearance: the ray height `h_tx (d_tg - d_i) / d_tg` minus the
/// full-link Fresnel radius over the mirror-path slant.
fn incident_clearance(d_i: f64, link: &LinkGeometry, geo: &GsGeometry) -> f64 {
    let ray = link.h_tx() * (geo.d_tg - d_i) / geo.d_tg;
    ray - fresnel_term(d_i, link, geo)
}

/// Reflected-ray clearance: `h_rx (d_i - d_tg) / (d_tr - d_tg)` minus the same
/// Fresnel term.
fn reflection_clearance(d_i: f64, link: &LinkGeometry, geo: &GsGeometry) -> f64 {
    let ray = link.h_rx() * (d_i - geo.d_tg) / (link.d_tr() - geo.d_tg);
    ray - fresnel_term(d_i, link, geo)
}

#[inline]
fn fresnel_term(d_i: f64, link: &LinkGeometry, geo: &GsGeometry) -> f64 {
    fresnel_radius_unchecked(d_i, link.d_tr(), link.wavelength()) / geo.cos_theta2
}

/// Ground-specular occurrence probability: the product of incident-segment
/// factors times reflection-segment factors, 1 when both segments are empty.
///
/// Building positions reuse the uniform span rule on each segment: incident
/// buildings at `(i-0.5) d_tg / E[N_inc] + W/2` from TX, reflection buildings
/// at `d_tg + (i-0.5)(d_tr - d_tg)/E[N_refl] + W/2`.
pub fn gs_probability(link: &LinkGeometry, params: &ScenarioParams) -> Result<f64, ModelError> {
    let geo = gs_geometry(link, params)?;
    let mut p = 1.0;
    for i in 1..=geo.n_incident {
        let (d_i, _) = clamped_position(params, i, geo.d_tg, geo.n_incident);
        p *= incident_factor_unchecked(d_i, link, params, &geo);
    }
    let tail = link.d_tr() - geo.d_tg;
    for i in 1..=geo.n_reflection {
        let (offset, _) = clamped_position(params, i, tail, geo.n_reflection);
        p *= reflection_factor_unchecked(geo.d_tg + offset, link, params, &geo);
    }
    Ok(p)
}

/// Per-building breakdown of [`gs_probability`]: incident segment first, then
/// the reflection segment. The product of factors equals the probability.
pub fn gs_breakdown(
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> Result<Vec<GsClearance>, ModelError> {
    let geo = gs_geometry(link, params)?;
    let mut rows = Vec::with_capacity((geo.n_incident + geo.n_reflection) as usize);
    for i in 1..=geo.n_incident {
        let (d_i, _) = clamped_position(params, i, geo.d_tg, geo.n_incident);
        rows.push(GsClearance {
            index: i,
            incident: true,
            position: d_i,
            clearance_height: incident_clearance(d_i, link, &geo),
            factor: incident_factor_unchecked(d_i, link, params, &geo),
        });
    }
    let tail = link.d_tr() - geo.d_tg;
    for i in 1..=geo.n_reflection {
        let (offset, _) = clamped_position(params, i, tail, geo.n_reflection);
        let d_i = geo.d_tg + offset;
        rows.push(GsClearance {
            index: i,
            incident: false,
            position: d_i,
            clearance_height: reflection_clearance(d_i, link, &geo),
            factor: reflection_factor_unchecked(d_i, link, params, &geo),
        });
    }
    Ok(rows)
}

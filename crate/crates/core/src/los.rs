//! Line-of-sight path probability.
//!
//! The direct path survives when none of the buildings crossed by its ground
//! projection reaches into the first Fresnel zone. Each crossed building
//! contributes the probability that its Rayleigh-distributed height stays
//! below the zone's lower edge at the crossing point; the LoS probability is
//! the product of those independent per-building factors, and 1 when the
//! expected building count is zero.

use crate::error::ModelError;
use crate::fresnel::{fresnel_radius_unchecked, slant_cosine_unchecked, LinkGeometry};
use crate::scenario::{rayleigh_cdf_unchecked, ScenarioParams};
use serde::{Deserialize, Serialize};

/// Per-building clearance diagnostic for the direct path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosClearance {
    /// 1-based building index along the span.
    pub index: u32,
    /// Horizontal distance from TX to the building, m.
    pub position: f64,
    /// Height of the straight TX-RX line above the building, m.
    pub straight_line_height: f64,
    /// Maximum building height that leaves the first Fresnel zone clear, m.
    /// May be negative when the zone dips below ground.
    pub clearance_height: f64,
    /// Probability that this building does not block the path.
    pub factor: f64,
    /// True when the nominal position fell past the receiver and was clamped.
    pub clamped: bool,
}

/// Height of the straight TX-RX line at along-path distance `d_i`, m.
pub fn straight_line_height(d_i: f64, link: &LinkGeometry) -> Result<f64, ModelError> {
    check_span(d_i, link)?;
    Ok(straight_line_height_unchecked(d_i, link))
}

#[inline]
fn straight_line_height_unchecked(d_i: f64, link: &LinkGeometry) -> f64 {
    link.h_tx() - d_i * link.height_delta() / link.d_tr()
}

/// Maximum height a building at `d_i` may have without entering the first
/// Fresnel zone of the direct path: the straight-line height minus the local
/// Fresnel radius corrected for the path slant. May be negative.
pub fn los_clearance_height(d_i: f64, link: &LinkGeometry) -> Result<f64, ModelError> {
    check_span(d_i, link)?;
    Ok(los_clearance_height_unchecked(d_i, link))
}

#[inline]
pub(crate) fn los_clearance_height_unchecked(d_i: f64, link: &LinkGeometry) -> f64 {
    let radius = fresnel_radius_unchecked(d_i, link.d_tr(), link.wavelength());
    let cos_slant = slant_cosine_unchecked(link.height_delta(), link.d_tr());
    straight_line_height_unchecked(d_i, link) - radius / cos_slant
}

/// Probability that a building at `d_i` leaves the direct path clear.
///
/// A non-positive clearance height yields 0: a zone edge at or below ground
/// is entered by a building of any height.
pub fn los_factor(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> Result<f64, ModelError> {
    check_span(d_i, link)?;
    Ok(los_factor_unchecked(d_i, link, params))
}

#[inline]
fn los_factor_unchecked(d_i: f64, link: &LinkGeometry, params: &ScenarioParams) -> f64 {
    rayleigh_cdf_unchecked(los_clearance_height_unchecked(d_i, link), params.gamma())
}

/// LoS occurrence probability: product of the per-building clearance factors
/// over the expected buildings along the span; 1 when none are expected.
pub fn los_probability(link: &LinkGeometry, params: &ScenarioParams) -> f64 {
    let count = params.building_count_unchecked(link.d_tr());
    let mut p = 1.0;
    for i in 1..=count {
        let d_i = clamped_position(params, i, link.d_tr(), count).0;
        p *= los_factor_unchecked(d_i, link, params);
    }
    p
}

/// Per-building breakdown of [`los_probability`], in span order. The product
/// of the reported factors equals the probability exactly.
pub fn los_breakdown(link: &LinkGeometry, params: &ScenarioParams) -> Vec<LosClearance> {
    let count = params.building_count_unchecked(link.d_tr());
    (1..=count)
        .map(|i| {
            let (d_i, clamped) = clamped_position(params, i, link.d_tr(), count);
            LosClearance {
                index: i,
                position: d_i,
                straight_line_height: straight_line_height_unchecked(d_i, link),
                clearance_height: los_clearance_height_unchecked(d_i, link),
                factor: los_factor_unchecked(d_i, link, params),
                clamped,
            }
        })
        .collect()
}

/// Position of building `i` on a span of `count` buildings, clamped into the
/// span. The nominal rule cannot exceed the span for valid scenarios
/// (`W * E[N] <= alpha * d < d`), so the clamp is purely defensive.
pub(crate) fn clamped_position(
    params: &ScenarioParams,
    i: u32,
    span: f64,
    count: u32,
) -> (f64, bool) {
    let nominal = params.position_on_span(i, span, count);
    if nominal > span {
        (span, true)
    } else {
        (nominal, false)
    }
}

fn check_span(d_i: f64, link: &LinkGeometry) -> Result<(), ModelError> {
    if !d_i.is_finite() || d_i < 0.0 || d_i > link.d_tr() {
        return Err(ModelError::Domain(format!(
            "crossing point {d_i} m outside [0, {} m]",
            link.d_tr()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioPreset;
    use approx::assert_relative_eq;

    fn urban() -> ScenarioParams {
        ScenarioPreset::Urban.params()
    }

    #[test]
    fn clearance_reduces_to_straight_line_at_zero_wavelength() {
        // Fresnel radius shrinks as sqrt(lambda): at 1e15 Hz it is below a
        // centimeter over 300 m.
        let link = LinkGeometry::new(60.0, 5.0, 300.0, 1e15).unwrap();
        for d_i in [10.0, 150.0, 290.0] {
            let gap = straight_line_height(d_i, &link).unwrap()
                - los_clearance_height(d_i, &link).unwrap();
            assert!((0.0..0.01).contains(&gap), "gap {gap}");
        }
    }

    #[test]
    fn clearance_symmetric_level_link() {
        // Equal terminal heights at the midpoint: H minus the semi-minor axis.
        let (h, d, f) = (40.0, 500.0, 2.4e9);
        let link = LinkGeometry::new(h, h, d, f).unwrap();
        let expected = h - (link.wavelength() * d).sqrt() / 2.0;
        assert_relative_eq!(
            los_clearance_height(d / 2.0, &link).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn clearance_worked_example_28ghz() {
        // h_tx 32 m, h_rx 2 m, 100 m span at 28 GHz, midpoint crossing:
        // straight line 17 m, radius 0.5174 m, slant cosine 0.95783,
        // clearance 17 - 0.5402 = 16.46 m.
        let link = LinkGeometry::new(32.0, 2.0, 100.0, 28e9).unwrap();
        let c = los_clearance_height(50.0, &link).unwrap();
        assert!((c - 16.46).abs() < 0.01, "clearance {c}");
    }

    #[test]
    fn factor_clamps_and_limits() {
        let params = urban();
        // Clearance forced negative: RX underground is impossible, so build a
        // link whose Fresnel term swamps the line height near the receiver.
        let link = LinkGeometry::new(0.5, 0.1, 2000.0, 100e6).unwrap();
        let d_i = 1000.0;
        assert!(los_clearance_height(d_i, &link).unwrap() < 0.0);
        assert_eq!(los_factor(d_i, &link, &params).unwrap(), 0.0);
        // Clearance of 15 m at gamma 15 m.
        let gamma = params.gamma();
        let c = 15.0;
        assert_relative_eq!(
            crate::scenario::rayleigh_cdf(c, gamma).unwrap(),
            1.0 - (-0.5f64).exp(),
            max_relative = 1e-12
        );
        // Very tall clearance: factor tends to 1.
        let high = LinkGeometry::new(5000.0, 4000.0, 100.0, 1e9).unwrap();
        assert!(los_factor(50.0, &high, &params).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn empty_span_probability_is_one() {
        let params = urban();
        // Below the first count step (81.65 m for the urban preset).
        let link = LinkGeometry::new(32.0, 2.0, 40.0, 28e9).unwrap();
        assert_eq!(params.expected_building_count(40.0).unwrap(), 0);
        assert_eq!(los_probability(&link, &params), 1.0);
        assert!(los_breakdown(&link, &params).is_empty());
    }

    #[test]
    fn probability_equals_product_of_breakdown() {
        let params = urban();
        let link = LinkGeometry::new(122.0, 2.0, 800.0, 28e9).unwrap();
        let rows = los_breakdown(&link, &params);
        assert_eq!(rows.len(), 9);
        let product: f64 = rows.iter().map(|r| r.factor).product();
        assert_eq!(product, los_probability(&link, &params));
        for r in &rows {
            assert!(r.clearance_height <= r.straight_line_height);
            assert!((0.0..=1.0).contains(&r.factor));
            assert!(!r.clamped);
        }
    }

    #[test]
    fn probability_non_increasing_in_gamma() {
        // All clearances positive here; taller building statistics can only
        // lower every factor.
        let link = LinkGeometry::new(122.0, 2.0, 600.0, 2.4e9).unwrap();
        let mut last = 1.0f64;
        for gamma in [5.0, 10.0, 20.0, 40.0, 80.0] {
            let params = ScenarioParams::new(0.3, 500.0, gamma).unwrap();
            assert!(los_breakdown(&link, &params)
                .iter()
                .all(|r| r.clearance_height > 0.0));
            let p = los_probability(&link, &params);
            assert!(p <= last, "gamma {gamma}: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn probability_non_increasing_in_wavelength() {
        // Fixed positions; a fatter Fresnel zone lowers every clearance.
        let params = urban();
        let mut last = 1.0f64;
        for freq in [60e9, 28e9, 6e9, 2.4e9, 0.7e9] {
            let link = LinkGeometry::new(122.0, 2.0, 600.0, freq).unwrap();
            let p = los_probability(&link, &params);
            assert!(p <= last, "freq {freq}: {p} > {last}");
            last = p;
        }
    }

    #[test]
    fn inverted_link_allowed() {
        // RX above TX evaluates the same formulas; the slant term is even in
        // the height delta.
        let params = urban();
        let up = LinkGeometry::new(2.0, 122.0, 600.0, 2.4e9).unwrap();
        let down = LinkGeometry::new(122.0, 2.0, 600.0, 2.4e9).unwrap();
        let p_up = los_probability(&up, &params);
        assert!((0.0..=1.0).contains(&p_up));
        // Positions are not symmetric under swapping terminals, so the two
        // probabilities differ, but both must be valid.
        assert!((0.0..=1.0).contains(&los_probability(&down, &params)));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn probability_stays_in_unit_interval(
                h_tx in 0.0f64..1000.0,
                h_rx in 0.0f64..50.0,
                d in 1.0f64..3000.0,
                f in 1e8f64..1e11,
                preset_idx in 0usize..4,
            ) {
                let params = ScenarioPreset::ALL[preset_idx].params();
                let link = LinkGeometry::new(h_tx, h_rx, d, f).unwrap();
                let p = los_probability(&link, &params);
                prop_assert!((0.0..=1.0).contains(&p), "p = {p}");
            }
        }
    }
}

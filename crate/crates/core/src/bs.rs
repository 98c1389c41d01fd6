//! Building-scattering (single-bounce) path probability.
//!
//! Every building along the ground projection is a scattering candidate: the
//! path through it exists when the building's height enters the first Fresnel
//! zone while the buildings in front of it (TX side) keep the incident ray
//! clear and the buildings behind it (RX side) keep the scattered ray clear.
//! The overall occurrence probability composes the per-candidate successes as
//! `1 - prod(1 - p_i)`; multi-bounce scattering is out of scope.
//!
//! The zone-entry threshold has two evaluation modes. The published inline
//! form divides the line-slope term by the receiver height, which explodes
//! for ground-level receivers; the surrounding derivation and the assembled
//! display both use the span length instead, making the threshold identical
//! to the direct-path clearance height. [`BsMode::Corrected`] (the default)
//! follows the assembled form; [`BsMode::Literal`] evaluates the inline form
//! verbatim for comparison.

use crate::error::ModelError;
use crate::fresnel::{fresnel_radius_unchecked, slant_cosine_unchecked, LinkGeometry};
use crate::los::{clamped_position, los_clearance_height_unchecked};
use crate::scenario::{rayleigh_cdf_unchecked, ScenarioParams};
use serde::{Deserialize, Serialize};

/// Evaluation mode of the scattering zone-entry threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BsMode {
    /// Slope term divided by the span length; equals the direct-path
    /// clearance height. Default, used by all shipped analyses.
    #[default]
    Corrected,
    /// Slope term divided by the receiver height, exactly as printed in the
    /// inline threshold formula. Requires `h_rx > 0`.
    Literal,
}

impl std::str::FromStr for BsMode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "corrected" => Ok(BsMode::Corrected),
            "literal" => Ok(BsMode::Literal),
            other => Err(ModelError::Domain(format!(
                "unknown scattering mode '{other}' (expected corrected or literal)"
            ))),
        }
    }
}

impl std::fmt::Display for BsMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BsMode::Corrected => "corrected",
            BsMode::Literal => "literal",
        })
    }
}

/// Per-candidate diagnostic of the scattering model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsCandidate {
    /// 1-based index of the candidate along the span.
    pub index: u32,
    /// Horizontal distance from TX, m.
    pub position: f64,
    /// Minimum height entering the first Fresnel zone, m.
    pub entry_height: f64,
    /// Probability that the candidate's height enters the zone.
    pub p_scatter: f64,
    /// Expected building count between TX and the candidate.
    pub n_front: u32,
    /// Expected building count between the candidate and RX.
    pub n_behind: u32,
    /// Product of front-building clearance factors.
    pub p_front_product: f64,
    /// Product of behind-building clearance factors.
    pub p_behind_product: f64,
}

impl BsCandidate {
    /// Success probability of this candidate's scattering path.
    pub fn success(&self) -> f64 {
        self.p_scatter * self.p_front_product * self.p_behind_product
    }
}

/// Minimum height at which a building at `d_i` enters the first Fresnel zone.
///
/// In corrected mode this equals the direct-path clearance height and may be
/// negative; literal mode errors for `h_rx = 0`.
pub fn scatter_entry_height(
    d_i: f64,
    link: &LinkGeometry,
    mode: BsMode,
) -> Result<f64, ModelError> {
    if !d_i.is_finite() || d_i < 0.0 || d_i > link.d_tr() {
        return Err(ModelError::Domain(format!(
            "candidate position {d_i} m outside [0, {} m]",
            link.d_tr()
        )));
    }
    match mode {
        BsMode::Corrected => Ok(los_clearance_height_unchecked(d_i, link)),
        BsMode::Literal => {
            if link.h_rx() <= 0.0 {
                return Err(ModelError::Domain(
                    "literal-mode entry height divides by the receiver height, which is zero"
                        .into(),
                ));
            }
            let radius = fresnel_radius_unchecked(d_i, link.d_tr(), link.wavelength());
            let cos_slant = slant_cosine_unchecked(link.height_delta(), link.d_tr());
            Ok(link.h_tx() - d_i * link.height_delta() / link.h_rx() - radius / cos_slant)
        }
    }
}

/// Probability that a building at `d_i` enters the first Fresnel zone:
/// `exp(-h^2 / (2 gamma^2))` for a positive entry threshold `h`, and 1 for a
/// non-positive threshold (any building height enters the zone).
pub fn scatter_factor(
    d_i: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<f64, ModelError> {
    let entry = scatter_entry_height(d_i, link, mode)?;
    Ok(scatter_factor_from_entry(entry, params))
}

#[inline]
fn scatter_factor_from_entry(entry: f64, params: &ScenarioParams) -> f64 {
    if entry <= 0.0 {
        1.0
    } else {
        let gamma = params.gamma();
        (-(entry * entry) / (2.0 * gamma * gamma)).exp()
    }
}

/// Probability that the `m`-th front building leaves the incident ray of
/// candidate `i` clear. Indices are 1-based; violations are index errors.
pub fn front_factor(
    m: u32,
    i: u32,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<f64, ModelError> {
    let (d_i, entry) = candidate_geometry(i, link, params, mode)?;
    let n_front = params.building_count_unchecked(d_i);
    if m == 0 || m > n_front {
        return Err(ModelError::IndexOutOfRange {
            index: m,
            count: n_front,
        });
    }
    Ok(front_factor_unchecked(m, n_front, d_i, entry, link, params))
}

/// Probability that the `n`-th behind building leaves the scattered ray of
/// candidate `i` clear.
pub fn behind_factor(
    n: u32,
    i: u32,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<f64, ModelError> {
    let (d_i, entry) = candidate_geometry(i, link, params, mode)?;
    let n_behind = params.building_count_unchecked(link.d_tr() - d_i);
    if n == 0 || n > n_behind {
        return Err(ModelError::IndexOutOfRange {
            index: n,
            count: n_behind,
        });
    }
    Ok(behind_factor_unchecked(n, n_behind, d_i, entry, link, params))
}

fn candidate_geometry(
    i: u32,
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<(f64, f64), ModelError> {
    let count = params.building_count_unchecked(link.d_tr());
    if count == 0 {
        return Err(ModelError::NoBuildings);
    }
    if i == 0 || i > count {
        return Err(ModelError::IndexOutOfRange { index: i, count });
    }
    let (d_i, _) = clamped_position(params, i, link.d_tr(), count);
    let entry = scatter_entry_height(d_i, link, mode)?;
    Ok((d_i, entry))
}

/// Front clearance: the incident ray interpolates from the TX height down to
/// the candidate's entry height; position rule `(m-0.5) d_i / n_front + W/2`.
fn front_factor_unchecked(
    m: u32,
    n_front: u32,
    d_i: f64,
    entry: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> f64 {
    let (d_tf, _) = clamped_position(params, m, d_i, n_front);
    let clearance = (d_i - d_tf) * (link.h_tx() - entry) / d_i + entry;
    rayleigh_cdf_unchecked(clearance, params.gamma())
}

/// Behind clearance: `h_rx + (d_tr - d_tb)(h_tx - entry)/(d_tr - d_i)`, with
/// behind positions `d_i + (n-0.5)(d_tr - d_i)/n_behind + W/2`.
fn behind_factor_unchecked(
    n: u32,
    n_behind: u32,
    d_i: f64,
    entry: f64,
    link: &LinkGeometry,
    params: &ScenarioParams,
) -> f64 {
    let tail = link.d_tr() - d_i;
    let (offset, _) = clamped_position(params, n, tail, n_behind);
    let d_tb = d_i + offset;
    let clearance = link.h_rx() + (link.d_tr() - d_tb) * (link.h_tx() - entry) / tail;
    rayleigh_cdf_unchecked(clearance, params.gamma())
}

/// Building-scattering occurrence probability over all candidates; 0 when no
/// buildings are expected along the span (nothing can scatter).
pub fn bs_probability(
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<f64, ModelError> {
    Ok(compose(&bs_breakdown(link, params, mode)?))
}

/// Per-candidate breakdown of [`bs_probability`], in span order. Candidates
/// are evaluated independently and composed as `1 - prod(1 - success_i)`.
pub fn bs_breakdown(
    link: &LinkGeometry,
    params: &ScenarioParams,
    mode: BsMode,
) -> Result<Vec<BsCandidate>, ModelError> {
    let count = params.building_count_unchecked(link.d_tr());
    let mut rows = Vec::with_capacity(count as usize);
    for i in 1..=count {
        let (d_i, _) = clamped_position(params, i, link.d_tr(), count);
        let entry = scatter_entry_height(d_i, link, mode)?;
        let n_front = params.building_count_unchecked(d_i);
        let n_behind = params.building_count_unchecked(link.d_tr() - d_i);
        let mut p_front = 1.0;
        for m in 1..=n_front {
            p_front *= front_factor_unchecked(m, n_front, d_i, entry, link, params);
        }
        let mut p_behind = 1.0;
        for n in 1..=n_behind {
            p_behind *= behind_factor_unchecked(n, n_behind, d_i, entry, link, params);
        }
        rows.push(BsCandidate {
            index: i,
            position: d_i,
            entry_height: entry,
            p_scatter: scatter_factor_from_entry(entry, params),
            n_front,
            n_behind,
            p_front_product: p_front,
            p_behind_product: p_behind,
        });
    }
    Ok(rows)
}

/// `1 - prod(1 - success_i)` over candidates, in index order.
pub(crate) fn compose(rows: &[BsCandidate]) -> f64 {
    1.0 - rows.iter().map(|r| 1.0 - r.success()).product::<f64>()
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
    fn corrected_entry_equals_direct_clearance() {
        let link = LinkGeometry::new(202.0, 2.0, 400.0, 1.4e9).unwrap();
        for d_i in [10.0, 100.0, 200.0, 399.0] {
            assert_eq!(
                scatter_entry_height(d_i, &link, BsMode::Corrected).unwrap(),
                crate::los::los_clearance_height(d_i, &link).unwrap()
            );
        }
    }

    #[test]
    fn corrected_entry_midpoint_straight_line() {
        // Negligible wavelength, midpoint of a 202 m / 2 m link: 102 m.
        let link = LinkGeometry::new(202.0, 2.0, 400.0, 1e15).unwrap();
        let entry = scatter_entry_height(200.0, &link, BsMode::Corrected).unwrap();
        assert!((entry - 102.0).abs() < 0.01, "entry {entry}");
    }

    #[test]
    fn literal_entry_reproduces_published_form() {
        // Verbatim slope term divided by h_rx: 202 - 100*200/2 = -9798 m.
        let link = LinkGeometry::new(202.0, 2.0, 400.0, 1e15).unwrap();
        let entry = scatter_entry_height(100.0, &link, BsMode::Literal).unwrap();
        assert!((entry - (-9798.0)).abs() < 0.01, "entry {entry}");
        // Ground-level receiver cannot evaluate the literal form.
        let flat = LinkGeometry::new(202.0, 0.0, 400.0, 1.4e9).unwrap();
        assert!(scatter_entry_height(100.0, &flat, BsMode::Literal).is_err());
    }

    #[test]
    fn scatter_factor_examples() {
        let params = urban();
        // Entry threshold at gamma: exp(-1/2).
        let gamma = params.gamma();
        assert_relative_eq!(
            scatter_factor_from_entry(gamma, &params),
            (-0.5f64).exp(),
            max_relative = 1e-12
        );
        // Non-positive threshold: any building enters the zone.
        assert_eq!(scatter_factor_from_entry(0.0, &params), 1.0);
        assert_eq!(scatter_factor_from_entry(-3.0, &params), 1.0);
        // Huge threshold: nothing reaches the zone.
        assert!(scatter_factor_from_entry(1e4, &params) < 1e-12);
    }

    #[test]
    fn front_factor_endpoints() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 700.0, 1.4e9).unwrap();
        let rows = bs_breakdown(&link, &params, BsMode::Corrected).unwrap();
        let cand = rows.last().unwrap();
        assert!(cand.n_front >= 1);
        // Clearance interpolates between h_tx at the TX foot and the entry
        // height at the candidate: every front clearance sits between them.
        for m in 1..=cand.n_front {
            let f = front_factor(m, cand.index, &link, &params, BsMode::Corrected).unwrap();
            assert!((0.0..=1.0).contains(&f));
        }
        // Worked value: clearance 20 m at gamma 20 m.
        let dense = ScenarioPreset::DenseUrban.params();
        assert_relative_eq!(
            crate::scenario::rayleigh_cdf(20.0, dense.gamma()).unwrap(),
            1.0 - (-0.5f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn behind_factor_approaches_rx_height_at_receiver() {
        // For a candidate far from RX the farthest behind building sits close
        // to the receiver, where the clearance tends to h_rx.
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 1200.0, 1.4e9).unwrap();
        let rows = bs_breakdown(&link, &params, BsMode::Corrected).unwrap();
        let first = &rows[0];
        assert!(first.n_behind >= 2);
        let slope = link.h_tx() - first.entry_height;
        let tail = link.d_tr() - first.position;
        // Clearance at the last behind slot.
        let (offset, _) = clamped_position(&params, first.n_behind, tail, first.n_behind);
        let clearance = link.h_rx() + (link.d_tr() - (first.position + offset)) * slope / tail;
        let f = behind_factor(first.n_behind, 1, &link, &params, BsMode::Corrected).unwrap();
        assert_relative_eq!(
            f,
            crate::scenario::rayleigh_cdf(clearance, params.gamma()).unwrap(),
            max_relative = 1e-12
        );
        // Worked value: clearance 2 m at gamma 15 m.
        assert!(
            (crate::scenario::rayleigh_cdf(2.0, 15.0).unwrap() - 0.00885).abs() < 5e-5
        );
    }

    #[test]
    fn index_errors() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 700.0, 1.4e9).unwrap();
        let count = params.expected_building_count(700.0).unwrap();
        assert!(matches!(
            front_factor(1, count + 1, &link, &params, BsMode::Corrected),
            Err(ModelError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            front_factor(0, 1, &link, &params, BsMode::Corrected),
            Err(ModelError::IndexOutOfRange { .. })
        ));
        let short = LinkGeometry::new(202.0, 2.0, 40.0, 1.4e9).unwrap();
        assert!(matches!(
            behind_factor(1, 1, &short, &params, BsMode::Corrected),
            Err(ModelError::NoBuildings)
        ));
    }

    #[test]
    fn no_buildings_means_no_scattering() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 40.0, 1.4e9).unwrap();
        assert_eq!(
            bs_probability(&link, &params, BsMode::Corrected).unwrap(),
            0.0
        );
        assert!(bs_breakdown(&link, &params, BsMode::Corrected)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn scatter_only_composition_is_upper_bound() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 600.0, 1.4e9).unwrap();
        let rows = bs_breakdown(&link, &params, BsMode::Corrected).unwrap();
        let p = compose(&rows);
        let upper = 1.0
            - rows
                .iter()
                .map(|r| 1.0 - r.p_scatter)
                .product::<f64>();
        assert!(p <= upper + 1e-15, "p {p} exceeds scatter-only bound {upper}");
    }

    #[test]
    fn breakdown_counts_follow_segment_lengths() {
        let params = urban();
        let link = LinkGeometry::new(202.0, 2.0, 900.0, 1.4e9).unwrap();
        let n = params.expected_building_count(900.0).unwrap();
        for row in bs_breakdown(&link, &params, BsMode::Corrected).unwrap() {
            assert_eq!(row.n_front, params.expected_building_count(row.position).unwrap());
            assert_eq!(
                row.n_behind,
                params
                    .expected_building_count(900.0 - row.position)
                    .unwrap()
            );
            assert!(row.n_front + row.n_behind <= n + 1);
        }
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
                let p = bs_probability(&link, &params, BsMode::Corrected).unwrap();
                prop_assert!((0.0..=1.0).contains(&p), "p = {p}");
            }
        }
    }
}

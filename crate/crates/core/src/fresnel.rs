//! First-order Fresnel ellipsoid geometry.
//!
//! Only the first Fresnel zone is considered; it carries half of the total
//! field strength and is the clearance criterion of every path model here.
//! The zone around a span of horizontal length `d_tr` at wavelength `lambda`
//! is the ellipsoid with semi-axes `X = Z = sqrt(lambda d_tr)/2` across the
//! path and `Y = sqrt(lambda d_tr/4 + d_tr^2/4)` along it. Its radius above
//! the crossing point of the `i`-th building reduces to
//! `sqrt(lambda d_tr) * min(d_i, d_tr - d_i) / d_tr`.

use crate::error::ModelError;
use crate::SPEED_OF_LIGHT;
use serde::{Deserialize, Serialize};

/// Fresnel zone order used throughout. Higher orders are out of scope.
pub const FRESNEL_ORDER: u32 = 1;

/// One air-to-ground link: terminal heights, horizontal separation and
/// carrier frequency, with the wavelength derived once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    h_tx: f64,
    h_rx: f64,
    d_tr: f64,
    frequency: f64,
    wavelength: f64,
}

impl LinkGeometry {
    /// Builds a link from TX height, RX height (m), horizontal distance (m)
    /// and carrier frequency (Hz). Heights may be zero; the distance and
    /// frequency must be positive.
    pub fn new(h_tx: f64, h_rx: f64, d_tr: f64, frequency: f64) -> Result<Self, ModelError> {
        if !h_tx.is_finite() || h_tx < 0.0 {
            return Err(ModelError::InvalidLink(format!(
                "TX height must be >= 0 m, got {h_tx}"
            )));
        }
        if !h_rx.is_finite() || h_rx < 0.0 {
            return Err(ModelError::InvalidLink(format!(
                "RX height must be >= 0 m, got {h_rx}"
            )));
        }
        if !d_tr.is_finite() || d_tr <= 0.0 {
            return Err(ModelError::InvalidLink(format!(
                "horizontal distance must be > 0 m, got {d_tr}"
            )));
        }
        if !frequency.is_finite() || frequency <= 0.0 {
            return Err(ModelError::InvalidLink(format!(
                "frequency must be > 0 Hz, got {frequency}"
            )));
        }
        Ok(Self {
            h_tx,
            h_rx,
            d_tr,
            frequency,
            wavelength: SPEED_OF_LIGHT / frequency,
        })
    }

    /// TX height above ground, m.
    pub fn h_tx(&self) -> f64 {
        self.h_tx
    }

    /// RX height above ground, m.
    pub fn h_rx(&self) -> f64 {
        self.h_rx
    }

    /// Horizontal TX-RX distance, m.
    pub fn d_tr(&self) -> f64 {
        self.d_tr
    }

    /// Carrier frequency, Hz.
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Carrier wavelength, m.
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// `h_tx - h_rx`, m. Negative when the receiver sits higher.
    pub fn height_delta(&self) -> f64 {
        self.h_tx - self.h_rx
    }
}

/// Semi-axes `(X, Y, Z)` of the first Fresnel ellipsoid.
pub fn ellipsoid_semiaxes(d_tr: f64, wavelength: f64) -> Result<(f64, f64, f64), ModelError> {
    if !d_tr.is_finite() || d_tr <= 0.0 {
        return Err(ModelError::Domain(format!(
            "distance must be > 0 m, got {d_tr}"
        )));
    }
    check_wavelength(wavelength)?;
    let x = (wavelength * d_tr).sqrt() / 2.0;
    let y = (wavelength * d_tr / 4.0 + d_tr * d_tr / 4.0).sqrt();
    Ok((x, y, x))
}

/// First Fresnel radius above the point at along-path distance `d_i` from TX;
/// the two half-span branches unify to
/// `sqrt(lambda d_tr) * min(d_i, d_tr - d_i) / d_tr`.
pub fn fresnel_radius(d_i: f64, d_tr: f64, wavelength: f64) -> Result<f64, ModelError> {
    if !d_tr.is_finite() || d_tr <= 0.0 {
        return Err(ModelError::Domain(format!(
            "distance must be > 0 m, got {d_tr}"
        )));
    }
    check_wavelength(wavelength)?;
    if !d_i.is_finite() || d_i < 0.0 || d_i > d_tr {
        return Err(ModelError::Domain(format!(
            "crossing point {d_i} m outside [0, {d_tr}] m"
        )));
    }
    Ok(fresnel_radius_unchecked(d_i, d_tr, wavelength))
}

#[inline]
pub(crate) fn fresnel_radius_unchecked(d_i: f64, d_tr: f64, wavelength: f64) -> f64 {
    (wavelength * d_tr).sqrt() * d_i.min(d_tr - d_i) / d_tr
}

/// Cosine of the slant angle of a path with height difference `delta_h` over
/// horizontal span `d_tr`: `d_tr / sqrt(d_tr^2 + delta_h^2)`, in `(0, 1]`.
///
/// With `delta_h = h_tx - h_rx` this is the direct-path slant; with
/// `delta_h = h_tx + h_rx` it is the slant of the mirror-image path used by
/// the ground-specular model.
pub fn slant_cosine(delta_h: f64, d_tr: f64) -> Result<f64, ModelError> {
    if !d_tr.is_finite() || d_tr <= 0.0 {
        return Err(ModelError::Domain(format!(
            "distance must be > 0 m, got {d_tr}"
        )));
    }
    if !delta_h.is_finite() {
        return Err(ModelError::Domain("height delta must be finite".into()));
    }
    Ok(slant_cosine_unchecked(delta_h, d_tr))
}

#[inline]
pub(crate) fn slant_cosine_unchecked(delta_h: f64, d_tr: f64) -> f64 {
    d_tr / (d_tr * d_tr + delta_h * delta_h).sqrt()
}

fn check_wavelength(wavelength: f64) -> Result<(), ModelError> {
    if !wavelength.is_finite() || wavelength <= 0.0 {
        return Err(ModelError::Domain(format!(
            "wavelength must be > 0 m, got {wavelength}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn link_geometry_derives_wavelength() {
        let link = LinkGeometry::new(32.0, 2.0, 100.0, 28e9).unwrap();
        assert!((link.wavelength() * link.frequency() / SPEED_OF_LIGHT - 1.0).abs() < 1e-6);
        assert!((link.wavelength() - 0.010707).abs() < 1e-5);
    }

    #[test]
    fn link_geometry_rejects_bad_inputs() {
        assert!(LinkGeometry::new(-1.0, 2.0, 100.0, 1e9).is_err());
        assert!(LinkGeometry::new(10.0, -2.0, 100.0, 1e9).is_err());
        assert!(LinkGeometry::new(10.0, 2.0, 0.0, 1e9).is_err());
        assert!(LinkGeometry::new(10.0, 2.0, 100.0, 0.0).is_err());
        assert!(LinkGeometry::new(10.0, 2.0, f64::NAN, 1e9).is_err());
    }

    #[test]
    fn semiaxes_examples() {
        let (x, y, z) = ellipsoid_semiaxes(1000.0, 0.01).unwrap();
        assert!((x - 1.581).abs() < 5e-4);
        assert_eq!(x, z);
        assert!(y >= 500.0);
        let (x, _, _) = ellipsoid_semiaxes(400.0, 0.214).unwrap();
        assert!((x - 4.63).abs() < 5e-3);
        // The along-path semi-axis approaches half the span as wavelength -> 0.
        let (_, y, _) = ellipsoid_semiaxes(1000.0, 1e-12).unwrap();
        assert_relative_eq!(y, 500.0, max_relative = 1e-12);
        assert!(ellipsoid_semiaxes(0.0, 0.01).is_err());
        assert!(ellipsoid_semiaxes(100.0, -1.0).is_err());
    }

    #[test]
    fn radius_examples() {
        let (lambda, d) = (0.0107, 240.0);
        let (x, _, _) = ellipsoid_semiaxes(d, lambda).unwrap();
        assert_relative_eq!(
            fresnel_radius(d / 2.0, d, lambda).unwrap(),
            x,
            max_relative = 1e-12
        );
        assert_eq!(fresnel_radius(0.0, d, lambda).unwrap(), 0.0);
        assert_eq!(fresnel_radius(d, d, lambda).unwrap(), 0.0);
        assert!(fresnel_radius(-0.1, d, lambda).is_err());
        assert!(fresnel_radius(d + 0.1, d, lambda).is_err());
    }

    #[test]
    fn slant_cosine_examples() {
        assert_eq!(slant_cosine(0.0, 400.0).unwrap(), 1.0);
        assert_relative_eq!(
            slant_cosine(400.0, 400.0).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-12
        );
        assert!((slant_cosine(200.0, 400.0).unwrap() - 0.8944).abs() < 5e-5);
        assert!(slant_cosine(10.0, 0.0).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn radius_peaks_at_midpoint(
                d_i in 0.0f64..1.0,
                d_tr in 1.0f64..5000.0,
                lambda in 1e-4f64..1.0,
            ) {
                let d_i = d_i * d_tr;
                let r = fresnel_radius(d_i, d_tr, lambda).unwrap();
                let x = ellipsoid_semiaxes(d_tr, lambda).unwrap().0;
                prop_assert!(r <= x + 1e-12);
            }

            #[test]
            fn radius_symmetric_and_sqrt_lambda_scaled(
                d_i in 0.0f64..1.0,
                d_tr in 1.0f64..5000.0,
                lambda in 1e-4f64..1.0,
                k in 0.1f64..10.0,
            ) {
                let d_i = d_i * d_tr;
                let r = fresnel_radius(d_i, d_tr, lambda).unwrap();
                let mirrored = fresnel_radius(d_tr - d_i, d_tr, lambda).unwrap();
                prop_assert!((r - mirrored).abs() <= 1e-9 * r.max(1.0));
                let scaled = fresnel_radius(d_i, d_tr, lambda * k).unwrap();
                prop_assert!((scaled - r * k.sqrt()).abs() <= 1e-9 * scaled.max(1.0));
            }

            #[test]
            fn slant_cosine_decreases_with_height_delta(
                d_tr in 1.0f64..5000.0,
                a in 0.0f64..2000.0,
                b in 0.0f64..2000.0,
            ) {
                prop_assume!(a != b);
                let (small, large) = if a.abs() < b.abs() { (a, b) } else { (b, a) };
                prop_assert!(
                    slant_cosine(small, d_tr).unwrap() > slant_cosine(large, d_tr).unwrap()
                );
            }
        }
    }
}

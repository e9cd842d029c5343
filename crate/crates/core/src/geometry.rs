//! Circular-orbit LEO pass geometry as seen from a ground station on the
//! ground track, and the beam angles that set anisoplanatism.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::numerics::find_zero;

pub const EARTH_RADIUS: f64 = 6.371e6;
pub const EARTH_GM: f64 = 3.986_004_418e14;
/// Largest zenith angle the model is exercised at.
pub const MAX_ZENITH: f64 = 75.0_f64.to_radians();

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassGeometry {
    /// Orbit altitude in m.
    pub altitude: f64,
    /// Zenith angle in rad.
    pub zenith: f64,
    pub earth_radius: f64,
    pub earth_gm: f64,
}

/// Angles between the beacon and the (delayed) signal optical paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    /// Physical beacon-signal separation on the satellite, m.
    pub separation: f64,
    /// AO loop 3 dB bandwidth, Hz.
    pub loop_bandwidth: f64,
    /// 10-90 % rise time of the loop, s.
    pub response_time: f64,
    pub theta_s: f64,
    pub theta_t: f64,
    pub theta_path: f64,
}

impl PassGeometry {
    pub fn new(altitude: f64, zenith: f64) -> Result<Self> {
        Self::with_constants(altitude, zenith, EARTH_RADIUS, EARTH_GM)
    }

    pub fn with_constants(
        altitude: f64,
        zenith: f64,
        earth_radius: f64,
        earth_gm: f64,
    ) -> Result<Self> {
        if !(altitude > 0.0) {
            return Err(Error::domain("altitude", altitude, "> 0"));
        }
        if !(0.0..FRAC_PI_2).contains(&zenith) {
            return Err(Error::domain("zenith angle", zenith, "[0, pi/2)"));
        }
        if !(earth_radius > 0.0) || !(earth_gm > 0.0) {
            return Err(Error::domain(
                "earth constants",
                earth_radius.min(earth_gm),
                "> 0",
            ));
        }
        Ok(Self {
            altitude,
            zenith,
            earth_radius,
            earth_gm,
        })
    }

    /// Slant range from the ground station to the satellite, m.
    pub fn range(&self) -> f64 {
        let (h, r) = (self.altitude, self.earth_radius);
        let c = self.zenith.cos();
        (h * h + 2.0 * h * r + r * r * c * c).sqrt() - r * c
    }

    /// Apparent angular slew rate of the satellite, rad/s.
    pub fn slew_rate(&self) -> f64 {
        let (h, r) = (self.altitude, self.earth_radius);
        let c = self.zenith.cos();
        (self.earth_gm / (h * h * (h + r))).sqrt() * c * c
    }

    pub fn beam_angles(&self, separation: f64, loop_bandwidth: f64) -> Result<BeamGeometry> {
        if !(separation >= 0.0) {
            return Err(Error::domain("beam separation", separation, ">= 0"));
        }
        if !(loop_bandwidth > 0.0) {
            return Err(Error::domain("loop bandwidth", loop_bandwidth, "> 0"));
        }
        let response_time = 0.35 / loop_bandwidth;
        let theta_s = separation / self.range();
        let theta_t = self.slew_rate() * response_time;
        Ok(BeamGeometry {
            separation,
            loop_bandwidth,
            response_time,
            theta_s,
            theta_t,
            theta_path: (theta_t - theta_s).abs(),
        })
    }
}

/// Zenith angle in `[0, 75 deg]` where `theta_t - theta_s` changes sign, if any.
pub fn zero_crossing_zenith(altitude: f64, separation: f64, loop_bandwidth: f64) -> Option<f64> {
    if !(separation > 0.0) {
        return None;
    }
    let signed = |zenith: f64| -> f64 {
        match PassGeometry::new(altitude, zenith)
            .and_then(|g| g.beam_angles(separation, loop_bandwidth))
        {
            Ok(b) => b.theta_t - b.theta_s,
            Err(_) => f64::NAN,
        }
    };
    let lo = signed(0.0);
    let hi = signed(MAX_ZENITH);
    if !(lo.is_finite() && hi.is_finite()) || lo.signum() == hi.signum() {
        return None;
    }
    find_zero(signed, 0.0, MAX_ZENITH, 1e-12).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn range_at_zenith_is_altitude() {
        for h in [4e5, 8e5, 1.234e6] {
            assert_eq!(PassGeometry::new(h, 0.0).unwrap().range(), h);
        }
    }

    #[test]
    fn range_at_sixty_degrees() {
        // sqrt(h^2 + 2hR + R^2/4) - R/2 with h = 4e5, R = 6.371e6
        let z = PassGeometry::new(4e5, deg(60.0)).unwrap().range();
        assert_relative_eq!(z, 739_319.772_932, max_relative = 1e-9);
    }

    #[test]
    fn range_increases_with_zenith() {
        let mut prev = 0.0;
        for d in 0..=75 {
            let z = PassGeometry::new(4e5, deg(d as f64)).unwrap().range();
            assert!(z > prev);
            prev = z;
        }
    }

    #[test]
    fn slew_rate_values() {
        let w = PassGeometry::new(4e5, 0.0).unwrap().slew_rate();
        assert_relative_eq!(w, 1.918_149_662_1e-2, max_relative = 1e-9);
        let w8 = PassGeometry::new(8e5, 0.0).unwrap().slew_rate();
        assert!(w8 < w);
        let edge = PassGeometry::new(4e5, FRAC_PI_2 - 1e-9)
            .unwrap()
            .slew_rate();
        assert!(edge < 1e-19);
    }

    #[test]
    fn beam_angles_at_zenith() {
        let b = PassGeometry::new(4e5, 0.0)
            .unwrap()
            .beam_angles(5.0, 500.0)
            .unwrap();
        assert_eq!(b.response_time, 7e-4);
        assert_eq!(b.theta_s, 1.25e-5);
        assert_relative_eq!(b.theta_t, 1.342_704_763_5e-5, max_relative = 1e-9);
        assert_relative_eq!(b.theta_path, 9.270_476_347e-7, max_relative = 1e-8);
        assert_eq!(b.theta_path, (b.theta_t - b.theta_s).abs());
    }

    #[test]
    fn no_separation_means_pure_temporal_angle() {
        let b = PassGeometry::new(8e5, deg(20.0))
            .unwrap()
            .beam_angles(0.0, 500.0)
            .unwrap();
        assert_eq!(b.theta_s, 0.0);
        assert_eq!(b.theta_path, b.theta_t);
    }

    #[test]
    fn zero_crossings() {
        assert!(zero_crossing_zenith(4e5, 0.0, 500.0).is_none());
        assert!(zero_crossing_zenith(4e5, 1.0, 500.0).is_none());
        // brackets from a 0.1 deg scan of theta_t - theta_s
        let z5 = zero_crossing_zenith(4e5, 5.0, 500.0).unwrap();
        assert!(z5 > deg(20.7) && z5 < deg(20.8), "{}", z5.to_degrees());
        let z5h = zero_crossing_zenith(8e5, 5.0, 500.0).unwrap();
        assert!(z5h > deg(15.7) && z5h < deg(15.8), "{}", z5h.to_degrees());
        let z1 = zero_crossing_zenith(8e5, 1.0, 500.0).unwrap();
        assert!(z1 > deg(73.7) && z1 < deg(73.8), "{}", z1.to_degrees());
        // the located angle really cancels the two angles
        let b = PassGeometry::new(8e5, z1)
            .unwrap()
            .beam_angles(1.0, 500.0)
            .unwrap();
        assert!(b.theta_path < 1e-15);
    }
}

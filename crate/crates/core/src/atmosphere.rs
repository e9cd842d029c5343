//! Turbulence and wind profiles and the classic integrated seeing parameters.
//!
//! Every altitude integral runs from the ground to the source altitude with no
//! artificial cutoff; breakpoints at the profile's natural scales keep the
//! adaptive quadrature from stepping over the thin boundary layer.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// Altitudes (m) where the Hufnagel-Valley profile changes character.
const PROFILE_BREAKS: [f64; 10] = [
    100.0, 300.0, 1_000.0, 3_000.0, 6_000.0, 10_000.0, 15_000.0, 20_000.0, 30_000.0, 60_000.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphereModel {
    /// Pseudo-wind (jet stream) speed in m/s.
    pub pseudo_wind: f64,
    /// Ground wind speed in m/s.
    pub ground_wind: f64,
    /// Coefficient of the tropopause (jet) term.
    pub hv_jet: f64,
    /// Coefficient of the free-atmosphere term, m^(-2/3).
    pub hv_free: f64,
    /// Coefficient of the boundary-layer term, m^(-2/3).
    pub hv_ground: f64,
    /// Top of the troposphere in m; the air column for chromatic dispersion stops here.
    pub troposphere_top: f64,
}

impl Default for AtmosphereModel {
    fn default() -> Self {
        Self {
            pseudo_wind: 21.0,
            ground_wind: 5.0,
            hv_jet: 0.00594,
            hv_free: 2.7e-16,
            hv_ground: 1.7e-14,
            troposphere_top: 1.1e4,
        }
    }
}

fn wavenumber(wavelength: f64) -> f64 {
    2.0 * PI / wavelength
}

impl AtmosphereModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.pseudo_wind > 0.0) {
            return Err(Error::domain("pseudo_wind", self.pseudo_wind, "> 0"));
        }
        if !(self.ground_wind >= 0.0) {
            return Err(Error::domain("ground_wind", self.ground_wind, ">= 0"));
        }
        for (name, v) in [
            ("hv_jet", self.hv_jet),
            ("hv_free", self.hv_free),
            ("hv_ground", self.hv_ground),
        ] {
            if !(v >= 0.0) {
                return Err(Error::domain(name, v, ">= 0"));
            }
        }
        if !(self.troposphere_top > 0.0) {
            return Err(Error::domain(
                "troposphere_top",
                self.troposphere_top,
                "> 0",
            ));
        }
        Ok(())
    }

    /// Refractive-index structure parameter C_n^2(h) in m^(-2/3).
    pub fn cn2(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::domain("altitude", h, ">= 0"));
        }
        Ok(self.cn2_unchecked(h))
    }

    pub(crate) fn cn2_unchecked(&self, h: f64) -> f64 {
        let jet = self.hv_jet
            * (self.pseudo_wind / 27.0).powi(2)
            * (h / 1e5).powi(10)
            * (-h / 1000.0).exp();
        jet + self.hv_free * (-h / 1500.0).exp() + self.hv_ground * (-h / 100.0).exp()
    }

    /// Natural (Bufton) wind speed at altitude `h`.
    pub fn wind_natural(&self, h: f64) -> f64 {
        let s = (h - 9400.0) / 4800.0;
        self.ground_wind + 30.0 * (-s * s).exp()
    }

    /// Natural wind plus the apparent wind `slew * h` of a moving source.
    pub fn wind_total(&self, h: f64, slew: f64) -> f64 {
        self.wind_natural(h) + slew * h
    }

    /// `int_0^top weight(h) C_n^2(h) dh`.
    pub fn profile_moment<W: Fn(f64) -> f64>(
        &self,
        weight: W,
        top: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        if !(top > 0.0) {
            return Err(Error::domain("altitude", top, "> 0"));
        }
        let mut points = vec![0.0];
        points.extend(PROFILE_BREAKS.iter().copied().filter(|&b| b < top));
        points.push(top);
        let est = integrate_with_breaks(|h| weight(h) * self.cn2_unchecked(h), &points, spec)?;
        Ok(est.value)
    }

    /// Fried parameter r0 in metres.
    pub fn fried_r0(&self, wavelength: f64, zenith: f64, altitude: f64) -> Result<f64> {
        check_path(wavelength, zenith, altitude)?;
        let k = wavenumber(wavelength);
        let m0 = self.profile_moment(|_| 1.0, altitude, &QuadratureSpec::default())?;
        Ok((0.423 * k * k / zenith.cos() * m0).powf(-0.6))
    }

    /// Isoplanatic angle theta0 in radians.
    pub fn isoplanatic_angle(&self, wavelength: f64, zenith: f64, altitude: f64) -> Result<f64> {
        check_path(wavelength, zenith, altitude)?;
        let k = wavenumber(wavelength);
        let m53 =
            self.profile_moment(|h| h.powf(5.0 / 3.0), altitude, &QuadratureSpec::default())?;
        let sec = 1.0 / zenith.cos();
        Ok((2.913 * k * k * sec.powf(8.0 / 3.0) * m53).powf(-0.6))
    }

    /// Greenwood frequency f_G in Hz for a source slewing at `slew` rad/s.
    pub fn greenwood_frequency(
        &self,
        wavelength: f64,
        zenith: f64,
        altitude: f64,
        slew: f64,
    ) -> Result<f64> {
        check_path(wavelength, zenith, altitude)?;
        if !(slew >= 0.0) {
            return Err(Error::domain("slew rate", slew, ">= 0"));
        }
        let k = wavenumber(wavelength);
        let mv = self.profile_moment(
            |h| self.wind_total(h, slew).powf(5.0 / 3.0),
            altitude,
            &QuadratureSpec::default(),
        )?;
        Ok((0.1022 * k * k / zenith.cos() * mv).powf(0.6))
    }
}

pub(crate) fn check_path(wavelength: f64, zenith: f64, altitude: f64) -> Result<()> {
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "> 0"));
    }
    if !(0.0..FRAC_PI_2).contains(&zenith) {
        return Err(Error::domain("zenith angle", zenith, "[0, pi/2)"));
    }
    if !(altitude > 0.0) {
        return Err(Error::domain("altitude", altitude, "> 0"));
    }
    Ok(())
}

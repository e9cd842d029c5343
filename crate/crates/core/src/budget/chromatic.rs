//! Chromatic terms that appear when beacon and signal wavelengths differ.

use std::cell::RefCell;
use std::f64::consts::PI;

use super::AoSystemConfig;
use crate::atmosphere::AtmosphereModel;
use crate::error::{Error, Result};
use crate::geometry::PassGeometry;
use crate::numerics::{bessel_j1, integrate_with_breaks, QuadratureSpec, TailPolicy};

const DENSITY_SCALE: f64 = 44_330.8;
const DENSITY_COEFF: f64 = 42_266.5;
const DENSITY_EXPONENT: f64 = 0.234_969;

/// `int_0^inf u^(-11/6) (1 - cos u) du = -Gamma(-5/6) cos(5 pi / 12)`.
const COSINE_MOMENT: f64 = 1.728_802_310_783_570_4;

/// Upper bound on `sup_x x^(1/3) |J1(x)|`.
const J1_ENVELOPE: f64 = 0.7858;

/// Phase refractive index of dry standard air (15 C, 101325 Pa, 450 ppm CO2).
pub fn refractive_index_air(wavelength: f64) -> Result<f64> {
    if !(300e-9..=1700e-9).contains(&wavelength) {
        return Err(Error::domain("wavelength", wavelength, "[300 nm, 1700 nm]"));
    }
    let s2 = (1e-6 / wavelength).powi(2);
    Ok(1.0 + 1e-8 * (5_792_105.0 / (238.0185 - s2) + 167_917.0 / (57.362 - s2)))
}

/// Residual from the beacon and signal accumulating different optical path lengths.
pub fn sigma_chromatic_path(cfg: &AoSystemConfig, r0: f64) -> Result<f64> {
    if !(r0 > 0.0) {
        return Err(Error::domain("r0", r0, "> 0"));
    }
    let (l, lb) = (cfg.wavelength, cfg.beacon_wavelength);
    if l == lb {
        return Ok(0.0);
    }
    let n = refractive_index_air(l)?;
    let nb = refractive_index_air(lb)?;
    let eps = (lb / l) * (n - nb) / (nb - 1.0);
    Ok(1.03 * (cfg.aperture / r0).powf(5.0 / 3.0) * eps * eps)
}

/// Air density in kg/m^3 from the inverted polytropic altitude model.
pub fn air_density(h: f64) -> Result<f64> {
    if !(0.0..DENSITY_SCALE).contains(&h) {
        return Err(Error::domain("altitude", h, "[0, 44330.8) m"));
    }
    Ok(((DENSITY_SCALE - h) / DENSITY_COEFF).powf(1.0 / DENSITY_EXPONENT))
}

/// Density relative to sea level; zero above `top`.
pub fn relative_density(h: f64, top: f64) -> f64 {
    if h > top {
        return 0.0;
    }
    (1.0 - h / DENSITY_SCALE).powf(1.0 / DENSITY_EXPONENT)
}

/// `int_0^h relative_density` in metres, saturating at `top`.
pub fn density_column(h: f64, top: f64) -> f64 {
    let h = h.clamp(0.0, top.min(DENSITY_SCALE));
    let p = 1.0 / DENSITY_EXPONENT + 1.0;
    DENSITY_SCALE / p * (1.0 - (1.0 - h / DENSITY_SCALE).powf(p))
}

/// Residual from beacon and signal being refracted along slightly different paths.
pub fn sigma_chromatic_aniso(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    model: &AtmosphereModel,
) -> Result<f64> {
    let dn = (refractive_index_air(cfg.wavelength)? - refractive_index_air(cfg.beacon_wavelength)?)
        .abs();
    let zenith = geom.zenith;
    if dn == 0.0 || zenith == 0.0 {
        return Ok(0.0);
    }
    let (s, c) = zenith.sin_cos();
    let kb = 2.0 * PI / cfg.beacon_wavelength;
    let top = model.troposphere_top;
    let m = model.profile_moment(
        |h| density_column(h, top).powf(5.0 / 3.0),
        geom.altitude,
        &QuadratureSpec::default(),
    )?;
    let t = 2.91 * kb * kb / c * m;
    Ok((s * dn / (c * c)).powf(5.0 / 3.0) * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffractionSettings {
    /// Relative tolerance of both the slant-path and the spatial-frequency integral.
    pub rel_tol: f64,
    /// The frequency integral stops at `k_max_factor / D` at the latest.
    pub k_max_factor: f64,
}

impl Default for DiffractionSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            k_max_factor: 2000.0,
        }
    }
}

/// Residual from the beacon and signal diffraction patterns differing after
/// propagation through the same turbulence.
pub fn sigma_diffraction(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    model: &AtmosphereModel,
) -> Result<f64> {
    sigma_diffraction_with(cfg, geom, model, &DiffractionSettings::default())
}

pub fn sigma_diffraction_with(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    model: &AtmosphereModel,
    settings: &DiffractionSettings,
) -> Result<f64> {
    let (l, lb) = (cfg.wavelength, cfg.beacon_wavelength);
    if !(l > 0.0) || !(lb > 0.0) {
        return Err(Error::domain("wavelength", l.min(lb), "> 0"));
    }
    if l == lb {
        return Ok(0.0);
    }
    let k = 2.0 * PI / l;
    let kb = 2.0 * PI / lb;
    let c = geom.zenith.cos();
    let failure = RefCell::new(None);
    // s is the slant distance from the receiver, h = s cos(zeta)
    let weight = |h: f64| {
        let s = h / c;
        match frequency_integral(s / (2.0 * kb), s / (2.0 * k), cfg.aperture, settings) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let spec = QuadratureSpec::new(settings.rel_tol, f64::MIN_POSITIVE, 2000)?;
    let moment = model.profile_moment(weight, geom.range() * c, &spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(4.08 / PI * k * k * moment? / c)
}

/// `int_0^inf K^(-8/3) [1 - A(K)] (cos aK^2 - cos bK^2)^2 dK`, where `A` is the
/// aperture filter `(2 J1(KD/2) / (KD/2))^2`.
///
/// Without the filter the integral is a combination of `c^(5/6)` moments
/// that is known in closed form; only the small filtered part is integrated.
fn frequency_integral(
    a: f64,
    b: f64,
    aperture: f64,
    settings: &DiffractionSettings,
) -> Result<f64> {
    let g = |c: f64| 0.5 * COSINE_MOMENT * c.powf(5.0 / 6.0);
    let flat = g(a + b) + g((a - b).abs()) - 0.5 * g(2.0 * a) - 0.5 * g(2.0 * b);
    if !(flat > 0.0) {
        return Ok(0.0);
    }

    let filtered = |kk: f64| {
        let x = 0.5 * kk * aperture;
        let airy = if x < 1e-4 {
            1.0 - 0.25 * x * x
        } else {
            (2.0 * bessel_j1(x) / x).powi(2)
        };
        let k2 = kk * kk;
        let diff = -2.0 * (0.5 * (a + b) * k2).sin() * (0.5 * (a - b) * k2).sin();
        kk.powf(-8.0 / 3.0) * airy * diff * diff
    };
    let k_max = settings.k_max_factor / aperture;
    let amplitude = 16.0 * J1_ENVELOPE * J1_ENVELOPE * (0.5 * aperture).powf(-8.0 / 3.0);
    let spec = QuadratureSpec::new(
        settings.rel_tol,
        (settings.rel_tol * flat).max(f64::MIN_POSITIVE),
        2000,
    )?
    .with_tail(TailPolicy::PowerLaw {
        cutoff: k_max,
        amplitude,
        exponent: 16.0 / 3.0,
    });
    let mut points = vec![0.0];
    points.extend((1..=12).rev().map(|j| k_max / f64::from(1u32 << j)));
    points.push(f64::INFINITY);
    let corr = integrate_with_breaks(filtered, &points, &spec)?;
    Ok(flat - corr.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Scheme;
    use approx::assert_relative_eq;

    fn wdm() -> AoSystemConfig {
        AoSystemConfig::new(Scheme::PureWdm)
    }

    #[test]
    fn ciddor_values() {
        assert_relative_eq!(
            refractive_index_air(633e-9).unwrap(),
            1.000_276_530_2,
            max_relative = 1e-10
        );
        let n780 = refractive_index_air(780e-9).unwrap();
        let n808 = refractive_index_air(808e-9).unwrap();
        assert!(n780 < refractive_index_air(633e-9).unwrap());
        assert_relative_eq!(n780 - n808, 1.764_170_7e-7, max_relative = 1e-6);
        assert!(refractive_index_air(200e-9).is_err());
        assert!(refractive_index_air(2e-6).is_err());
    }

    #[test]
    fn dispersion_is_normal_across_range() {
        let mut prev = f64::INFINITY;
        let mut l = 300e-9;
        while l <= 1700e-9 {
            let n = refractive_index_air(l).unwrap();
            assert!(n < prev);
            prev = n;
            l += 10e-9;
        }
    }

    #[test]
    fn density_model() {
        assert!((air_density(0.0).unwrap() - 1.225).abs() < 1e-3);
        assert_relative_eq!(
            air_density(0.0).unwrap(),
            1.225_000_405_5,
            max_relative = 1e-9
        );
        assert!(air_density(-1.0).is_err());
        assert_eq!(relative_density(0.0, 1.1e4), 1.0);
        assert_eq!(relative_density(1.2e4, 1.1e4), 0.0);
        let h = 5000.0;
        assert_relative_eq!(
            relative_density(h, 1.1e4),
            air_density(h).unwrap() / air_density(0.0).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn density_column_closed_form() {
        assert_eq!(density_column(0.0, 1.1e4), 0.0);
        assert_relative_eq!(
            density_column(1.1e4, 1.1e4),
            6_550.572_022_05,
            max_relative = 1e-10
        );
        assert_eq!(density_column(3e4, 1.1e4), density_column(1.1e4, 1.1e4));
        // trapezoid check of the antiderivative
        let n = 20_000;
        let dh = 8000.0 / n as f64;
        let mut sum = 0.5 * (relative_density(0.0, 1.1e4) + relative_density(8000.0, 1.1e4));
        for i in 1..n {
            sum += relative_density(i as f64 * dh, 1.1e4);
        }
        assert_relative_eq!(density_column(8000.0, 1.1e4), sum * dh, max_relative = 1e-8);
    }

    #[test]
    fn chromatic_path_values() {
        let tdm = AoSystemConfig::new(Scheme::PureTdm);
        assert_eq!(sigma_chromatic_path(&tdm, 0.08).unwrap(), 0.0);
        let r0 = AtmosphereModel::default()
            .fried_r0(780e-9, 0.0, 4e5)
            .unwrap();
        assert_relative_eq!(
            sigma_chromatic_path(&wdm(), r0).unwrap(),
            2.931_900_711e-5,
            max_relative = 1e-7
        );
        let a = sigma_chromatic_path(&wdm(), 0.1).unwrap();
        let b = sigma_chromatic_path(&wdm(), 0.2).unwrap();
        assert_relative_eq!(a / b, 2f64.powf(5.0 / 3.0), max_relative = 1e-12);
        assert!(sigma_chromatic_path(&wdm(), 0.0).is_err());
    }

    #[test]
    fn chromatic_aniso_values() {
        let model = AtmosphereModel::default();
        let zen = PassGeometry::new(4e5, 0.0).unwrap();
        assert_eq!(sigma_chromatic_aniso(&wdm(), &zen, &model).unwrap(), 0.0);
        let g30 = PassGeometry::new(4e5, 30f64.to_radians()).unwrap();
        assert_eq!(
            sigma_chromatic_aniso(&AoSystemConfig::new(Scheme::PureTdm), &g30, &model).unwrap(),
            0.0
        );
        assert_relative_eq!(
            sigma_chromatic_aniso(&wdm(), &g30, &model).unwrap(),
            2.056_853_807e-4,
            max_relative = 1e-7
        );
        let g60 = PassGeometry::new(4e5, 60f64.to_radians()).unwrap();
        assert_relative_eq!(
            sigma_chromatic_aniso(&wdm(), &g60, &model).unwrap(),
            5.553_505_28e-3,
            max_relative = 1e-7
        );
    }

    #[test]
    fn frequency_integral_matches_unfiltered_limit() {
        // a huge aperture filters nothing, so only the closed form remains
        let s = DiffractionSettings::default();
        let v = frequency_integral(2e-3, 1.9e-3, 1e3, &s).unwrap();
        let g = |c: f64| 0.5 * COSINE_MOMENT * c.powf(5.0 / 6.0);
        let flat = g(3.9e-3) + g(1e-4) - 0.5 * g(4e-3) - 0.5 * g(3.8e-3);
        assert_relative_eq!(v, flat, max_relative = 1e-5);
        assert_eq!(frequency_integral(1e-3, 1e-3, 1.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn diffraction_zero_and_symmetry() {
        let model = AtmosphereModel::default();
        let geom = PassGeometry::new(4e5, 20f64.to_radians()).unwrap();
        assert_eq!(
            sigma_diffraction(&AoSystemConfig::new(Scheme::PureTdm), &geom, &model).unwrap(),
            0.0
        );
        let fwd = sigma_diffraction(&wdm(), &geom, &model).unwrap();
        let mut swapped = wdm();
        swapped.wavelength = 808e-9;
        swapped.beacon_wavelength = 780e-9;
        let back = sigma_diffraction(&swapped, &geom, &model).unwrap();
        // the kernel is symmetric; only the k^2 prefactor follows the signal wavelength
        assert_relative_eq!(
            fwd * 780f64.powi(2),
            back * 808f64.powi(2),
            max_relative = 1e-5
        );
    }

    #[test]
    fn diffraction_values() {
        // the unfiltered kernel alone gives an upper bound a few 1e-5 above the total
        let model = AtmosphereModel::default();
        for (deg, unfiltered) in [
            (0.0, 2.450_884_921_6e-3),
            (30.0, 3.190_436_426_5e-3),
            (60.0, 8.733_960_939_8e-3),
        ] {
            for alt in [4e5, 8e5] {
                let geom = PassGeometry::new(alt, f64::to_radians(deg)).unwrap();
                let v = sigma_diffraction(&wdm(), &geom, &model).unwrap();
                assert!(v <= unfiltered * (1.0 + 1e-6), "{deg} {alt}: {v}");
                assert_relative_eq!(v, unfiltered, max_relative = 2e-4);
            }
        }
    }
}

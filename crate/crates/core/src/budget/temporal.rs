use std::f64::consts::PI;

use super::AoSystemConfig;
use crate::atmosphere::AtmosphereModel;
use crate::error::{Error, Result};
use crate::geometry::PassGeometry;
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// `int_0^z v^(5/3) C_n^2 ds` along the slant path to the satellite, with the
/// profiles evaluated at altitude `s cos(zeta)` and the apparent wind of the
/// slewing line of sight included.
pub fn slant_wind_moment(
    model: &AtmosphereModel,
    geom: &PassGeometry,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let c = geom.zenith.cos();
    let slew = geom.slew_rate();
    let top = geom.range() * c;
    let m = model.profile_moment(|h| model.wind_total(h, slew).powf(5.0 / 3.0), top, spec)?;
    Ok(m / c)
}

/// Residual variance from the finite loop bandwidth: the RC rejection
/// `f^2 / (f^2 + f_c^2)` applied to the temporal phase spectrum and integrated
/// over all frequencies.
pub fn sigma_band(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    model: &AtmosphereModel,
) -> Result<f64> {
    let fc = cfg.loop_bandwidth;
    if !(fc > 0.0) {
        return Err(Error::domain("loop bandwidth", fc, "> 0"));
    }
    if !(cfg.wavelength > 0.0) {
        return Err(Error::domain("wavelength", cfg.wavelength, "> 0"));
    }
    let spec = QuadratureSpec::default();
    let k = 2.0 * PI / cfg.wavelength;
    let amplitude = 0.0326 * k * k * slant_wind_moment(model, geom, &spec)?;
    let fc2 = fc * fc;
    let spectrum = |f: f64| amplitude * f.powf(-2.0 / 3.0) / (f * f + fc2);
    let est = integrate_with_breaks(spectrum, &[0.0, fc, f64::INFINITY], &spec)?;
    Ok(est.value)
}

/// Anisoplanatic variance for an angular offset `theta_path` between the
/// sensed and corrected paths.
pub fn sigma_path(theta_path: f64, theta0: f64) -> Result<f64> {
    if !(theta0 > 0.0) {
        return Err(Error::domain("isoplanatic angle", theta0, "> 0"));
    }
    if !(theta_path >= 0.0) {
        return Err(Error::domain("path angle", theta_path, ">= 0"));
    }
    Ok((theta_path / theta0).powf(5.0 / 3.0))
}

//! Channel efficiency factors, beacon cross-talk into the field stop, and
//! background photon counts.

use std::f64::consts::PI;

use crate::budget::AoSystemConfig;
use crate::error::{Error, Result};
use crate::geometry::{PassGeometry, MAX_ZENITH};
use crate::numerics::{bessel_j1, integrate_with_breaks, QuadratureSpec};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

const TRANS_ZENITH: f64 = 0.92;
const TRANS_LOW: f64 = 0.74;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverOptics {
    /// Primary diameter, m.
    pub aperture: f64,
    /// Secondary-to-primary diameter ratio.
    pub obscuration: f64,
    /// Effective focal length, m.
    pub focal_length: f64,
    /// Field-stop diameter override, m. Defaults to the first Airy null.
    pub field_stop: Option<f64>,
}

impl ReceiverOptics {
    pub fn new(aperture: f64, obscuration: f64, focal_length: f64) -> Self {
        Self {
            aperture,
            obscuration,
            focal_length,
            field_stop: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.aperture > 0.0) {
            return Err(Error::domain("aperture", self.aperture, "> 0"));
        }
        if !(self.focal_length > 0.0) {
            return Err(Error::domain("focal_length", self.focal_length, "> 0"));
        }
        if !(0.0..1.0).contains(&self.obscuration) {
            return Err(Error::domain("obscuration", self.obscuration, "[0, 1)"));
        }
        if let Some(d) = self.field_stop {
            if !(d > 0.0) {
                return Err(Error::domain("field_stop", d, "> 0"));
            }
        }
        Ok(())
    }

    pub fn field_stop_diameter(&self, wavelength: f64) -> f64 {
        self.field_stop
            .unwrap_or(2.44 * wavelength * self.focal_length / self.aperture)
    }

    /// Full field of view admitted by the field stop, rad.
    pub fn field_of_view(&self, wavelength: f64) -> f64 {
        self.field_stop_diameter(wavelength) / self.focal_length
    }

    /// Solid angle of the field of view, sr.
    pub fn solid_angle(&self, wavelength: f64) -> f64 {
        let t = self.field_of_view(wavelength);
        PI * t * t / 4.0
    }

    /// Focal-plane distance between two point sources `separation` apart at `range`.
    pub fn image_offset(&self, separation: f64, range: f64) -> f64 {
        self.focal_length * separation / range
    }
}

/// Fraction of a Gaussian beam from a transmitter of diameter `tx_aperture`
/// collected by a receiver of diameter `aperture` at the slant range of `geom`.
pub fn eta_geo(
    wavelength: f64,
    geom: &PassGeometry,
    aperture: f64,
    tx_aperture: f64,
) -> Result<f64> {
    for (name, v) in [
        ("wavelength", wavelength),
        ("aperture", aperture),
        ("tx_aperture", tx_aperture),
    ] {
        if !(v > 0.0) {
            return Err(Error::domain(name, v, "> 0"));
        }
    }
    Ok(coupling(wavelength, geom.range(), aperture, tx_aperture))
}

fn coupling(wavelength: f64, range: f64, aperture: f64, tx_aperture: f64) -> f64 {
    let w0 = 0.7 * tx_aperture / 2.0;
    let zr = PI * w0 * w0 / wavelength;
    let w2 = w0 * w0 * (1.0 + (range / zr).powi(2));
    -(-aperture * aperture / (2.0 * w2)).exp_m1()
}

/// Atmospheric transmission, linear in zenith angle between 0 and 75 degrees.
pub fn eta_trans(zenith: f64) -> Result<f64> {
    if !(0.0..=MAX_ZENITH).contains(&zenith) {
        return Err(Error::domain("zenith angle", zenith, "[0, 75 deg]"));
    }
    Ok(TRANS_ZENITH + (TRANS_LOW - TRANS_ZENITH) * zenith / MAX_ZENITH)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConstants {
    pub receiver: f64,
    pub spectral: f64,
    pub detector: f64,
    /// Field-stop transmission of a diffraction-limited spot.
    pub field_stop_peak: f64,
}

impl Default for ChannelConstants {
    fn default() -> Self {
        Self {
            receiver: 0.5,
            spectral: 0.9,
            detector: 0.8,
            field_stop_peak: 0.84,
        }
    }
}

impl ChannelConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_rec", self.receiver),
            ("eta_spec", self.spectral),
            ("eta_det", self.detector),
            ("field_stop_peak", self.field_stop_peak),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::domain(name, v, "[0, 1]"));
            }
        }
        Ok(())
    }

    /// Probability that a photon reaching the receiver optics is detected.
    pub fn detection(&self) -> f64 {
        self.spectral * self.receiver * self.detector
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyBreakdown {
    pub trans: f64,
    pub rec: f64,
    pub spec: f64,
    pub det: f64,
    pub geo: f64,
    pub fs: f64,
    pub total: f64,
}

pub fn eta_total(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    strehl: f64,
    constants: &ChannelConstants,
) -> Result<EfficiencyBreakdown> {
    if !(0.0..=1.0).contains(&strehl) {
        return Err(Error::domain("strehl", strehl, "[0, 1]"));
    }
    constants.validate()?;
    let trans = eta_trans(geom.zenith)?;
    let geo = eta_geo(cfg.wavelength, geom, cfg.aperture, cfg.tx_aperture)?;
    let fs = constants.field_stop_peak * strehl;
    let (rec, spec, det) = (constants.receiver, constants.spectral, constants.detector);
    Ok(EfficiencyBreakdown {
        trans,
        rec,
        spec,
        det,
        geo,
        fs,
        total: trans * rec * spec * det * geo * fs,
    })
}

/// `I(x) / I(0)` of the annular-aperture diffraction pattern at focal-plane
/// radius `x`.
pub fn normalized_intensity(optics: &ReceiverOptics, wavelength: f64, x: f64) -> f64 {
    let b = optics.obscuration;
    let u = PI * optics.aperture * x.abs() / (optics.focal_length * wavelength);
    if u < 1e-6 {
        // J1(u) - b J1(bu) ~ (1 - b^2) u / 2
        let lead = 0.5 * (1.0 - b * b);
        return lead * lead * (1.0 - 0.25 * u * u * (1.0 + b * b));
    }
    let amp = (bessel_j1(u) - b * bessel_j1(b * u)) / u;
    amp * amp
}

/// Integral of the beacon's normalised intensity over the field stop when the
/// beacon image centre lies `image_offset` from the field-stop centre, m^2.
pub fn crosstalk_fraction(
    optics: &ReceiverOptics,
    wavelength: f64,
    image_offset: f64,
) -> Result<f64> {
    optics.validate()?;
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "> 0"));
    }
    if !(image_offset >= 0.0) || !image_offset.is_finite() {
        return Err(Error::domain("image offset", image_offset, ">= 0"));
    }
    let rfs = 0.5 * optics.field_stop_diameter(wavelength);
    let d = image_offset;

    // polar coordinates about the beacon centre: a ring of radius r overlaps
    // the field stop over an arc of angle `arc(r)`
    let arc = |r: f64| -> f64 {
        if r + d <= rfs {
            2.0 * PI
        } else if d == 0.0 {
            0.0
        } else {
            let c = (r * r + d * d - rfs * rfs) / (2.0 * r * d);
            2.0 * c.clamp(-1.0, 1.0).acos()
        }
    };
    let integrand = |r: f64| arc(r) * r * normalized_intensity(optics, wavelength, r);

    let lo = (d - rfs).max(0.0);
    let hi = d + rfs;
    let mut points = vec![lo];
    if d < rfs && d > 0.0 {
        points.push(rfs - d);
    }
    // ring radii spaced by half the diffraction ring period
    let step = 0.5 * optics.focal_length * wavelength / optics.aperture;
    let mut r = (lo / step).floor() * step + step;
    while r < hi {
        if r > *points.last().unwrap() {
            points.push(r);
        }
        r += step;
    }
    points.push(hi);
    let spec = QuadratureSpec::default().with_tolerances(1e-9, f64::MIN_POSITIVE);
    Ok(integrate_with_breaks(integrand, &points, &spec)?.value)
}

/// Expected background photons per detection window from a sky radiance
/// `radiance` (W m^-2 sr^-1 um^-1) through a filter `bandwidth` metres wide.
pub fn sky_noise_photons(
    radiance: f64,
    optics: &ReceiverOptics,
    wavelength: f64,
    bandwidth: f64,
    window: f64,
) -> Result<f64> {
    optics.validate()?;
    for (name, v) in [
        ("sky radiance", radiance),
        ("filter bandwidth", bandwidth),
        ("detection window", window),
    ] {
        if !(v >= 0.0) {
            return Err(Error::domain(name, v, ">= 0"));
        }
    }
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength", wavelength, "> 0"));
    }
    let bandwidth_um = bandwidth * 1e6;
    let d = optics.aperture;
    Ok(
        radiance * optics.solid_angle(wavelength) * PI * d * d * wavelength * bandwidth_um * window
            / (4.0 * PLANCK * SPEED_OF_LIGHT),
    )
}

//! Vacuum + weak decoy BB84: gains, error rates, single-photon bounds and the
//! asymptotic secret-key rate.

use crate::channel::{sky_noise_photons, ChannelConstants, ReceiverOptics};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkdParams {
    /// Signal mean photon number.
    pub mu: f64,
    /// Decoy mean photon number.
    pub nu: f64,
    /// Pulse repetition rate, Hz.
    pub source_rate: f64,
    /// Daytime sky radiance, W m^-2 sr^-1 um^-1.
    pub sky_radiance: f64,
    /// Detector dark count rate, Hz.
    pub dark_rate: f64,
    /// Intrinsic polarisation error.
    pub misalignment: f64,
    /// Error rate of background clicks.
    pub noise_error: f64,
    /// Spectral filter bandwidth, m.
    pub filter_bandwidth: f64,
    /// Detection window, s.
    pub window: f64,
    /// Error-correction inefficiency.
    pub ec_efficiency: f64,
    /// Basis sifting factor.
    pub basis_match: f64,
    /// Radiance used for the beacon-scatter estimate.
    pub scatter_radiance: f64,
    /// Spectral width used for the beacon-scatter estimate, m.
    pub scatter_bandwidth: f64,
    /// Beacon cross-talk photons per window as a multiple of the scatter estimate.
    pub crosstalk_multiplier: f64,
}

impl Default for QkdParams {
    fn default() -> Self {
        Self {
            mu: 0.7,
            nu: 0.1,
            source_rate: 1e7,
            sky_radiance: 25.0,
            dark_rate: 10.0,
            misalignment: 0.01,
            noise_error: 0.5,
            filter_bandwidth: 0.2e-9,
            window: 1e-9,
            ec_efficiency: 1.22,
            basis_match: 0.5,
            scatter_radiance: 1.5e-5,
            scatter_bandwidth: 1e-6,
            crosstalk_multiplier: 100.0,
        }
    }
}

impl QkdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::domain("nu", self.nu, "> 0"));
        }
        if !(self.nu < self.mu) {
            return Err(Error::Invalid(format!(
                "decoy intensity requires ν < μ (ν = {}, μ = {})",
                self.nu, self.mu
            )));
        }
        if !(self.basis_match > 0.0 && self.basis_match <= 1.0) {
            return Err(Error::domain("basis_match", self.basis_match, "(0, 1]"));
        }
        for (name, v) in [
            ("misalignment", self.misalignment),
            ("noise_error", self.noise_error),
        ] {
            if !(0.0..=0.5).contains(&v) {
                return Err(Error::domain(name, v, "[0, 0.5]"));
            }
        }
        for (name, v) in [
            ("source_rate", self.source_rate),
            ("sky_radiance", self.sky_radiance),
            ("dark_rate", self.dark_rate),
            ("filter_bandwidth", self.filter_bandwidth),
            ("window", self.window),
            ("ec_efficiency", self.ec_efficiency),
            ("scatter_radiance", self.scatter_radiance),
            ("scatter_bandwidth", self.scatter_bandwidth),
            ("crosstalk_multiplier", self.crosstalk_multiplier),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, ">= 0"));
            }
        }
        Ok(())
    }

    /// Daytime background photons per window entering the receiver.
    pub fn sky_photons(&self, optics: &ReceiverOptics, wavelength: f64) -> Result<f64> {
        sky_noise_photons(
            self.sky_radiance,
            optics,
            wavelength,
            self.filter_bandwidth,
            self.window,
        )
    }

    /// Detection probability per window from light of the beacon scattered
    /// into the receiver field of view.
    pub fn scatter_probability(
        &self,
        optics: &ReceiverOptics,
        wavelength: f64,
        constants: &ChannelConstants,
    ) -> Result<f64> {
        let n = sky_noise_photons(
            self.scatter_radiance,
            optics,
            wavelength,
            self.scatter_bandwidth,
            self.window,
        )?;
        Ok(n * constants.detection())
    }

    /// Beacon photons per window leaking into the signal detector when the
    /// beacon shares the signal wavelength.
    pub fn crosstalk_photons(
        &self,
        optics: &ReceiverOptics,
        wavelength: f64,
        constants: &ChannelConstants,
    ) -> Result<f64> {
        Ok(self.crosstalk_multiplier * self.scatter_probability(optics, wavelength, constants)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkdResult {
    pub y0: f64,
    pub q_mu: f64,
    pub q_nu: f64,
    pub e_mu: f64,
    pub e_nu: f64,
    pub y1: f64,
    pub e1: f64,
    /// The decoy bound on the single-photon yield was not positive.
    pub collapsed: bool,
    /// Secret bits per pulse.
    pub r: f64,
    pub rate_hz: f64,
}

/// Probability of a click in a window without any signal photon.
pub fn background_yield(
    sky_photons: f64,
    crosstalk_photons: f64,
    detection: f64,
    params: &QkdParams,
) -> Result<f64> {
    if !(sky_photons >= 0.0) {
        return Err(Error::domain("background photons", sky_photons, ">= 0"));
    }
    if !(crosstalk_photons >= 0.0) {
        return Err(Error::domain(
            "cross-talk photons",
            crosstalk_photons,
            ">= 0",
        ));
    }
    Ok((sky_photons + crosstalk_photons) * detection + 4.0 * params.dark_rate * params.window)
}

pub fn gain(eta: f64, intensity: f64, y0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("channel efficiency", eta, "[0, 1]"));
    }
    if !(intensity >= 0.0) {
        return Err(Error::domain("intensity", intensity, ">= 0"));
    }
    Ok(y0 - (-eta * intensity).exp_m1())
}

pub fn qber(eta: f64, intensity: f64, y0: f64, params: &QkdParams) -> Result<f64> {
    let q = gain(eta, intensity, y0)?;
    if !(q > 0.0) {
        return Err(Error::domain("gain", q, "> 0"));
    }
    let signal = -(-eta * intensity).exp_m1();
    Ok((params.noise_error * y0 + params.misalignment * signal) / q)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoyEstimate {
    pub y1: f64,
    pub e1: f64,
    pub collapsed: bool,
}

/// Lower bound on the single-photon yield and upper bound on its error rate.
pub fn decoy_estimates(
    q_mu: f64,
    q_nu: f64,
    e_nu: f64,
    y0: f64,
    params: &QkdParams,
) -> Result<DecoyEstimate> {
    let (mu, nu) = (params.mu, params.nu);
    if !(nu > 0.0 && mu > nu) {
        return Err(Error::domain("decoy intensities", mu - nu, "mu > nu > 0"));
    }
    let y1 = mu / (mu * nu - nu * nu)
        * (q_nu * nu.exp()
            - q_mu * mu.exp() * nu * nu / (mu * mu)
            - (mu * mu - nu * nu) / (mu * mu) * y0);
    if !(y1 > 0.0) {
        return Ok(DecoyEstimate {
            y1: 0.0,
            e1: 0.5,
            collapsed: true,
        });
    }
    let e1 = (q_nu * e_nu * nu.exp() - params.noise_error * y0) / (y1 * nu);
    Ok(DecoyEstimate {
        y1: y1.min(1.0),
        e1: e1.clamp(0.0, 0.5),
        collapsed: false,
    })
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("probability", x, "[0, 1]"));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Secret bits per pulse (clamped at zero) and the corresponding bit rate.
pub fn key_rate(q_mu: f64, e_mu: f64, y1: f64, e1: f64, params: &QkdParams) -> Result<(f64, f64)> {
    let mu = params.mu;
    let r = params.basis_match
        * ((-mu).exp() * mu * y1 * (1.0 - binary_entropy(e1)?)
            - params.ec_efficiency * q_mu * binary_entropy(e_mu)?);
    let r = r.max(0.0);
    Ok((r, params.source_rate * r))
}

/// The whole decoy-state chain for a channel of efficiency `eta` and background yield `y0`.
pub fn evaluate(eta: f64, y0: f64, params: &QkdParams) -> Result<QkdResult> {
    params.validate()?;
    let q_mu = gain(eta, params.mu, y0)?;
    let q_nu = gain(eta, params.nu, y0)?;
    let e_mu = qber(eta, params.mu, y0, params)?;
    let e_nu = qber(eta, params.nu, y0, params)?;
    let d = decoy_estimates(q_mu, q_nu, e_nu, y0, params)?;
    let (r, rate_hz) = if d.collapsed {
        (0.0, 0.0)
    } else {
        key_rate(q_mu, e_mu, d.y1, d.e1, params)?
    };
    Ok(QkdResult {
        y0,
        q_mu,
        q_nu,
        e_mu,
        e_nu,
        y1: d.y1,
        e1: d.e1,
        collapsed: d.collapsed,
        r,
        rate_hz,
    })
}

//! Wavefront-variance budget of the corrected downlink and the Strehl ratio it
//! implies, for each beacon multiplexing scheme.

mod chromatic;
mod temporal;

use std::fmt;
use std::str::FromStr;

pub use chromatic::{
    air_density, density_column, refractive_index_air, relative_density, sigma_chromatic_aniso,
    sigma_chromatic_path, sigma_diffraction, sigma_diffraction_with, DiffractionSettings,
};
pub use temporal::{sigma_band, sigma_path, slant_wind_moment};

use crate::atmosphere::AtmosphereModel;
use crate::channel::ReceiverOptics;
use crate::error::{Error, Result};
use crate::geometry::{BeamGeometry, PassGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Pioneer beacon spatially separated from the signal and fired earlier.
    SpatialPioneer,
    PureTdm,
    PureWdm,
    /// WDM beacon that is also spatially displaced ahead of the signal.
    WdmPioneer,
    NoAo,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SpatialPioneer,
        Scheme::PureTdm,
        Scheme::PureWdm,
        Scheme::WdmPioneer,
        Scheme::NoAo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SpatialPioneer => "spatial_pioneer",
            Scheme::PureTdm => "pure_tdm",
            Scheme::PureWdm => "pure_wdm",
            Scheme::WdmPioneer => "wdm_pioneer",
            Scheme::NoAo => "no_ao",
        }
    }

    /// Whether the beacon leads the signal by the configured separation.
    pub fn uses_pioneer(self) -> bool {
        matches!(self, Scheme::SpatialPioneer | Scheme::WdmPioneer)
    }

    /// Whether beacon and signal are separated by wavelength.
    pub fn is_wdm(self) -> bool {
        matches!(self, Scheme::PureWdm | Scheme::WdmPioneer)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | '+' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "spatialpioneer" | "pioneer" | "ss" => Ok(Scheme::SpatialPioneer),
            "puretdm" | "tdm" => Ok(Scheme::PureTdm),
            "purewdm" | "wdm" => Ok(Scheme::PureWdm),
            "wdmpioneer" => Ok(Scheme::WdmPioneer),
            "noao" | "off" => Ok(Scheme::NoAo),
            _ => Err(Error::Invalid(format!(
                "unknown scheme '{s}' (expected one of spatial_pioneer, pure_tdm, pure_wdm, wdm_pioneer, no_ao)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoSystemConfig {
    pub scheme: Scheme,
    /// Signal wavelength, m.
    pub wavelength: f64,
    /// Beacon wavelength, m.
    pub beacon_wavelength: f64,
    /// Beacon-signal separation at the satellite, m.
    pub separation: f64,
    /// AO loop 3 dB bandwidth, Hz.
    pub loop_bandwidth: f64,
    /// Receiver primary diameter, m.
    pub aperture: f64,
    /// Secondary-to-primary diameter ratio.
    pub obscuration: f64,
    /// Effective focal length, m.
    pub focal_length: f64,
    /// Transmitter aperture diameter, m.
    pub tx_aperture: f64,
}

impl AoSystemConfig {
    pub const SIGNAL_WAVELENGTH: f64 = 780e-9;
    pub const WDM_BEACON_WAVELENGTH: f64 = 808e-9;

    /// Default optics for `scheme`; WDM schemes get the 808 nm beacon.
    pub fn new(scheme: Scheme) -> Self {
        let wavelength = Self::SIGNAL_WAVELENGTH;
        Self {
            scheme,
            wavelength,
            beacon_wavelength: if scheme.is_wdm() {
                Self::WDM_BEACON_WAVELENGTH
            } else {
                wavelength
            },
            separation: 0.0,
            loop_bandwidth: 500.0,
            aperture: 1.03,
            obscuration: 0.36 / 1.03,
            focal_length: 8.0,
            tx_aperture: 0.05,
        }
    }

    pub fn with_separation(mut self, separation: f64) -> Self {
        self.separation = separation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("beacon_wavelength", self.beacon_wavelength),
            ("loop_bandwidth", self.loop_bandwidth),
            ("aperture", self.aperture),
            ("focal_length", self.focal_length),
            ("tx_aperture", self.tx_aperture),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "> 0"));
            }
        }
        if !(0.0..1.0).contains(&self.obscuration) {
            return Err(Error::domain("obscuration", self.obscuration, "[0, 1)"));
        }
        if !(self.separation >= 0.0) || !self.separation.is_finite() {
            return Err(Error::domain("separation", self.separation, ">= 0"));
        }
        Ok(())
    }

    /// Separation that actually offsets the beacon path; zero unless the
    /// scheme uses a pioneer beacon.
    pub fn effective_separation(&self) -> f64 {
        if self.scheme.uses_pioneer() {
            self.separation
        } else {
            0.0
        }
    }

    pub fn receiver(&self) -> ReceiverOptics {
        ReceiverOptics::new(self.aperture, self.obscuration, self.focal_length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceBudget {
    pub band: f64,
    pub path: f64,
    pub diffraction: f64,
    pub chromatic_path: f64,
    pub chromatic_aniso: f64,
    pub total: f64,
    pub strehl: f64,
}

/// Chromatic terms for one beacon wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChromaticTerms {
    pub beacon_wavelength: f64,
    pub diffraction: f64,
    pub chromatic_path: f64,
    pub chromatic_aniso: f64,
}

/// Everything in the budget that depends only on the line of sight, so a
/// sweep can share it between schemes and separations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathTerms {
    pub geometry: PassGeometry,
    pub wavelength: f64,
    pub loop_bandwidth: f64,
    pub aperture: f64,
    pub r0: f64,
    pub theta0: f64,
    pub sigma_band: f64,
    pub strehl_no_ao: f64,
    pub chromatic: Option<ChromaticTerms>,
}

impl PathTerms {
    /// Evaluate the shared terms; chromatic terms only when `beacon_wavelength` is given.
    pub fn compute(
        cfg: &AoSystemConfig,
        geom: &PassGeometry,
        model: &AtmosphereModel,
        beacon_wavelength: Option<f64>,
    ) -> Result<Self> {
        cfg.validate()?;
        model.validate()?;
        let (lambda, zenith, alt) = (cfg.wavelength, geom.zenith, geom.altitude);
        let r0 = model.fried_r0(lambda, zenith, alt)?;
        let theta0 = model.isoplanatic_angle(lambda, zenith, alt)?;
        let band = sigma_band(cfg, geom, model)?;
        let chromatic = match beacon_wavelength {
            None => None,
            Some(lb) => {
                let c = AoSystemConfig {
                    beacon_wavelength: lb,
                    ..*cfg
                };
                c.validate()?;
                Some(ChromaticTerms {
                    beacon_wavelength: lb,
                    diffraction: sigma_diffraction(&c, geom, model)?,
                    chromatic_path: sigma_chromatic_path(&c, r0)?,
                    chromatic_aniso: sigma_chromatic_aniso(&c, geom, model)?,
                })
            }
        };
        Ok(Self {
            geometry: *geom,
            wavelength: lambda,
            loop_bandwidth: cfg.loop_bandwidth,
            aperture: cfg.aperture,
            r0,
            theta0,
            sigma_band: band,
            strehl_no_ao: strehl_no_ao(cfg.aperture, r0)?,
            chromatic,
        })
    }

    /// Compose the budget of `cfg` from the shared terms.
    pub fn budget(&self, cfg: &AoSystemConfig) -> Result<(VarianceBudget, BeamGeometry)> {
        if cfg.wavelength != self.wavelength
            || cfg.loop_bandwidth != self.loop_bandwidth
            || cfg.aperture != self.aperture
        {
            return Err(Error::Invalid(
                "configuration differs from the one the path terms were computed for".into(),
            ));
        }
        let beam = self
            .geometry
            .beam_angles(cfg.effective_separation(), cfg.loop_bandwidth)?;

        if cfg.scheme == Scheme::NoAo {
            let budget = VarianceBudget {
                band: 0.0,
                path: 0.0,
                diffraction: 0.0,
                chromatic_path: 0.0,
                chromatic_aniso: 0.0,
                total: 0.0,
                strehl: self.strehl_no_ao,
            };
            return Ok((budget, beam));
        }

        let path = sigma_path(beam.theta_path, self.theta0)?;
        let (diffraction, chromatic_path, chromatic_aniso) = if cfg.scheme.is_wdm() {
            match self.chromatic {
                Some(c) if c.beacon_wavelength == cfg.beacon_wavelength => {
                    (c.diffraction, c.chromatic_path, c.chromatic_aniso)
                }
                _ => {
                    return Err(Error::Invalid(format!(
                        "chromatic terms for beacon wavelength {} m were not computed",
                        cfg.beacon_wavelength
                    )))
                }
            }
        } else {
            (0.0, 0.0, 0.0)
        };
        let total = self.sigma_band + path + diffraction + chromatic_path + chromatic_aniso;
        let budget = VarianceBudget {
            band: self.sigma_band,
            path,
            diffraction,
            chromatic_path,
            chromatic_aniso,
            total,
            strehl: strehl_ao(total)?,
        };
        Ok((budget, beam))
    }
}

pub fn compose_budget(
    cfg: &AoSystemConfig,
    geom: &PassGeometry,
    model: &AtmosphereModel,
) -> Result<VarianceBudget> {
    let beacon = cfg.scheme.is_wdm().then_some(cfg.beacon_wavelength);
    let terms = PathTerms::compute(cfg, geom, model, beacon)?;
    terms.budget(cfg).map(|(b, _)| b)
}

/// Strehl ratio of a corrected wavefront with residual variance `variance`.
pub fn strehl_ao(variance: f64) -> Result<f64> {
    if !(variance >= 0.0) {
        return Err(Error::domain("wavefront variance", variance, ">= 0"));
    }
    Ok((-variance).exp())
}

/// Long-exposure Strehl ratio of an uncorrected aperture of diameter `aperture`.
pub fn strehl_no_ao(aperture: f64, r0: f64) -> Result<f64> {
    if !(aperture > 0.0) {
        return Err(Error::domain("aperture", aperture, "> 0"));
    }
    if !(r0 > 0.0) {
        return Err(Error::domain("r0", r0, "> 0"));
    }
    Ok((1.0 + (aperture / r0).powf(5.0 / 3.0)).powf(-1.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!(
            "SpatialPioneer".parse::<Scheme>().unwrap(),
            Scheme::SpatialPioneer
        );
        assert_eq!("NoAO".parse::<Scheme>().unwrap(), Scheme::NoAo);
        assert!("laser".parse::<Scheme>().is_err());
    }

    #[test]
    fn default_beacon_wavelengths() {
        assert_eq!(
            AoSystemConfig::new(Scheme::SpatialPioneer).beacon_wavelength,
            780e-9
        );
        assert_eq!(
            AoSystemConfig::new(Scheme::PureTdm).beacon_wavelength,
            780e-9
        );
        assert_eq!(
            AoSystemConfig::new(Scheme::PureWdm).beacon_wavelength,
            808e-9
        );
        assert_eq!(
            AoSystemConfig::new(Scheme::WdmPioneer).beacon_wavelength,
            808e-9
        );
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = AoSystemConfig::new(Scheme::PureTdm);
        c.obscuration = 1.0;
        assert!(c.validate().is_err());
        let c = AoSystemConfig::new(Scheme::PureTdm).with_separation(-1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn strehl_closed_cases() {
        assert_eq!(strehl_ao(0.0).unwrap(), 1.0);
        assert_eq!(strehl_ao(1.0).unwrap(), (-1.0f64).exp());
        assert!(strehl_ao(-0.1).is_err());
        assert!((strehl_no_ao(0.7, 0.7).unwrap() - 2f64.powf(-1.2)).abs() < 1e-12);
        assert!((strehl_no_ao(1e-9, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(strehl_no_ao(1.0, 0.0).is_err());
    }

    #[test]
    fn strehl_no_ao_pipeline_value() {
        // r0 = 0.0845825764 m at 780 nm, zenith, 400 km
        let r0 = AtmosphereModel::default()
            .fried_r0(780e-9, 0.0, 4e5)
            .unwrap();
        assert_relative_eq!(
            strehl_no_ao(1.03, r0).unwrap(),
            6.620_091_38e-3,
            max_relative = 1e-7
        );
    }

    #[test]
    fn strehl_monotonicity() {
        let mut prev = 2.0;
        for i in 0..50 {
            let s = strehl_ao(i as f64 * 0.1).unwrap();
            assert!(s < prev);
            prev = s;
        }
        let mut prev = 0.0;
        for i in 1..50 {
            let s = strehl_no_ao(1.03, i as f64 * 0.01).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn perfect_pioneer_with_infinite_bandwidth() {
        let model = AtmosphereModel::default();
        let geom = PassGeometry::new(8e5, deg(20.0)).unwrap();
        let mut cfg = AoSystemConfig::new(Scheme::SpatialPioneer);
        cfg.loop_bandwidth = 1e30;
        let beam = geom.beam_angles(0.0, cfg.loop_bandwidth).unwrap();
        cfg.separation = beam.theta_t * geom.range();
        let b = compose_budget(&cfg, &geom, &model).unwrap();
        assert!(b.total < 1e-20, "{b:?}");
        assert!((b.strehl - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scheme_composition() {
        let model = AtmosphereModel::default();
        let geom = PassGeometry::new(4e5, deg(30.0)).unwrap();
        let tdm = compose_budget(
            &AoSystemConfig::new(Scheme::PureTdm).with_separation(5.0),
            &geom,
            &model,
        )
        .unwrap();
        let wdm = compose_budget(
            &AoSystemConfig::new(Scheme::PureWdm).with_separation(5.0),
            &geom,
            &model,
        )
        .unwrap();
        let ss = compose_budget(
            &AoSystemConfig::new(Scheme::SpatialPioneer).with_separation(5.0),
            &geom,
            &model,
        )
        .unwrap();
        let wp = compose_budget(
            &AoSystemConfig::new(Scheme::WdmPioneer).with_separation(5.0),
            &geom,
            &model,
        )
        .unwrap();
        let off = compose_budget(&AoSystemConfig::new(Scheme::NoAo), &geom, &model).unwrap();

        assert_eq!(tdm.band, ss.band);
        assert_eq!(tdm.band, wdm.band);
        assert_eq!(tdm.path, wdm.path);
        assert_eq!(ss.path, wp.path);
        assert_eq!(
            tdm.diffraction + tdm.chromatic_path + tdm.chromatic_aniso,
            0.0
        );
        assert!(wdm.diffraction > 0.0 && wdm.chromatic_path > 0.0 && wdm.chromatic_aniso > 0.0);
        assert!(wdm.total >= tdm.total);
        assert_eq!(
            wdm.total,
            wdm.band + wdm.path + wdm.diffraction + wdm.chromatic_path + wdm.chromatic_aniso
        );
        assert!(ss.strehl > tdm.strehl && tdm.strehl > wdm.strehl && wdm.strehl > off.strehl);
        assert_eq!(off.total, 0.0);
    }

    #[test]
    fn zero_separation_pioneer_equals_tdm() {
        let model = AtmosphereModel::default();
        let geom = PassGeometry::new(8e5, deg(10.0)).unwrap();
        let a =
            compose_budget(&AoSystemConfig::new(Scheme::SpatialPioneer), &geom, &model).unwrap();
        let b = compose_budget(
            &AoSystemConfig::new(Scheme::PureTdm).with_separation(3.0),
            &geom,
            &model,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_terms_are_refused() {
        let model = AtmosphereModel::default();
        let geom = PassGeometry::new(4e5, 0.1).unwrap();
        let tdm = AoSystemConfig::new(Scheme::PureTdm);
        let terms = PathTerms::compute(&tdm, &geom, &model, None).unwrap();
        assert!(terms.budget(&AoSystemConfig::new(Scheme::PureWdm)).is_err());
        let mut other = tdm;
        other.loop_bandwidth = 1000.0;
        assert!(terms.budget(&other).is_err());
    }
}

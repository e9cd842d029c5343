//! Scenario files, parameter sweeps, CSV tables and comparison reports.

mod config;
mod format;
mod report;
mod sweep;
mod table;

pub use config::{dump_scenario, load_scenario, parse_scenario, KEYS};
pub use format::format_g;
pub use report::{improvement_report, ImprovementRow, RatePoint};
pub use sweep::{evaluate_point, run_sweep, SiteTerms, Status, SweepRow};
pub use table::{emit_csv, read_csv, write_csv, Preset, Table, Value};

use crate::atmosphere::AtmosphereModel;
use crate::budget::{AoSystemConfig, Scheme};
use crate::channel::{ChannelConstants, ReceiverOptics};
use crate::error::{Error, Result};
use crate::geometry::{EARTH_GM, EARTH_RADIUS};
use crate::qkd::QkdParams;

#[derive(Debug, Clone, PartialEq)]
pub struct OpticsConfig {
    pub wavelength: f64,
    /// Overrides the per-scheme beacon wavelength when set.
    pub beacon_wavelength: Option<f64>,
    pub loop_bandwidth: f64,
    pub aperture: f64,
    pub obscuration: f64,
    pub focal_length: f64,
    pub tx_aperture: f64,
    pub field_stop: Option<f64>,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        let c = AoSystemConfig::new(Scheme::PureTdm);
        Self {
            wavelength: c.wavelength,
            beacon_wavelength: None,
            loop_bandwidth: c.loop_bandwidth,
            aperture: c.aperture,
            obscuration: c.obscuration,
            focal_length: c.focal_length,
            tx_aperture: c.tx_aperture,
            field_stop: None,
        }
    }
}

impl OpticsConfig {
    pub fn system(&self, scheme: Scheme, separation: f64) -> AoSystemConfig {
        let mut c = AoSystemConfig::new(scheme);
        c.wavelength = self.wavelength;
        c.beacon_wavelength = match self.beacon_wavelength {
            Some(b) => b,
            None if scheme.is_wdm() => AoSystemConfig::WDM_BEACON_WAVELENGTH,
            None => self.wavelength,
        };
        c.separation = separation;
        c.loop_bandwidth = self.loop_bandwidth;
        c.aperture = self.aperture;
        c.obscuration = self.obscuration;
        c.focal_length = self.focal_length;
        c.tx_aperture = self.tx_aperture;
        c
    }

    pub fn receiver(&self) -> ReceiverOptics {
        ReceiverOptics {
            field_stop: self.field_stop,
            ..ReceiverOptics::new(self.aperture, self.obscuration, self.focal_length)
        }
    }

    /// Beacon wavelength the WDM schemes run with.
    pub fn wdm_beacon_wavelength(&self) -> f64 {
        self.beacon_wavelength
            .unwrap_or(AoSystemConfig::WDM_BEACON_WAVELENGTH)
    }
}

/// Zenith grid in degrees, `start:stop:step` inclusive of `stop` when it lies on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenithAxis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ZenithAxis {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub zenith: ZenithAxis,
    /// Beacon-signal separations, m.
    pub separations: Vec<f64>,
    /// Orbit altitudes, m.
    pub altitudes: Vec<f64>,
    pub schemes: Vec<Scheme>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            zenith: ZenithAxis {
                start: 0.0,
                stop: 75.0,
                step: 1.0,
            },
            separations: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            altitudes: vec![4e5, 8e5],
            schemes: Scheme::ALL.to_vec(),
        }
    }
}

impl SweepSpec {
    pub fn grid_size(&self) -> usize {
        self.schemes.len()
            * self.altitudes.len()
            * self.separations.len()
            * self.zenith.points().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub atmosphere: AtmosphereModel,
    pub optics: OpticsConfig,
    pub channel: ChannelConstants,
    pub qkd: QkdParams,
    pub earth_radius: f64,
    pub earth_gm: f64,
    pub sweep: SweepSpec,
    /// Tables written by `simulate`: `full` or a figure preset name.
    pub outputs: Vec<String>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            atmosphere: AtmosphereModel::default(),
            optics: OpticsConfig::default(),
            channel: ChannelConstants::default(),
            qkd: QkdParams::default(),
            earth_radius: EARTH_RADIUS,
            earth_gm: EARTH_GM,
            sweep: SweepSpec::default(),
            outputs: vec!["full".to_string()],
        }
    }
}

impl Scenario {
    /// Check every invariant that does not depend on where a value came from.
    pub fn validate(&self) -> Result<()> {
        self.atmosphere.validate()?;
        self.channel.validate()?;
        self.qkd.validate()?;
        self.optics.receiver().validate()?;
        for scheme in Scheme::ALL {
            self.optics.system(scheme, 0.0).validate()?;
        }
        if !(self.earth_radius > 0.0) || !(self.earth_gm > 0.0) {
            return Err(Error::Invalid(
                "earth radius and GM must be positive".into(),
            ));
        }
        let z = self.sweep.zenith;
        if !(z.step > 0.0) {
            return Err(Error::Invalid(format!(
                "zenith step must be > 0, got {}",
                z.step
            )));
        }
        if !(0.0 <= z.start && z.start <= z.stop && z.stop <= 75.0) {
            return Err(Error::Invalid(format!(
                "zenith range {}:{} must satisfy 0 <= start <= stop <= 75",
                z.start, z.stop
            )));
        }
        if self.sweep.separations.is_empty()
            || self.sweep.altitudes.is_empty()
            || self.sweep.schemes.is_empty()
        {
            return Err(Error::Invalid("sweep axes must not be empty".into()));
        }
        if let Some(l) = self
            .sweep
            .separations
            .iter()
            .find(|l| !(**l >= 0.0) || !l.is_finite())
        {
            return Err(Error::Invalid(format!("separation must be >= 0, got {l}")));
        }
        if let Some(h) = self
            .sweep
            .altitudes
            .iter()
            .find(|h| !(**h > 0.0) || !h.is_finite())
        {
            return Err(Error::Invalid(format!("altitude must be > 0, got {h}")));
        }
        for name in &self.outputs {
            if name != "full" {
                name.parse::<Preset>()?;
            }
        }
        Ok(())
    }
}
